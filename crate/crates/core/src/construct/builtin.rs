//! Closed-form builtin surfaces: the round circle and torus products of it.
//!
//! For the circle (`n = 1`) the two parameterizations are
//!
//! * center-chord, domain `(u, v)`:
//!   `x = cos((u−v)/2) (cos((u+v)/2), sin((u+v)/2))`,
//!   `y = sin((u−v)/2) (−sin((u+v)/2), cos((u+v)/2))`,
//!   `f = ¼ (v − u + sin(u − v))`;
//! * special, domain `(s, t)`:
//!   `x = cosh t (cos s, sin s)`, `y = sinh t (−sin s, cos s)`,
//!   `f = ¼ (sinh 2t − 2t)`.
//!
//! A torus factorizes coordinate-wise: block `i` of the domain drives the
//! ambient pair `(q_i, p_i)` through the circle formulas and the potentials
//! add up. Ambient components are ordered `(q_1..q_n, p_1..p_n)`, matching
//! the symbolic maps.

use crate::error::{Error, Result};

use super::Kind;

/// Builtin surface selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Circle,
    /// Product of `n ≥ 1` circles.
    Torus(usize),
}

impl Builtin {
    /// Germ dimension of the builtin.
    pub fn n(self) -> usize {
        match self {
            Builtin::Circle => 1,
            Builtin::Torus(n) => n,
        }
    }

    /// Parse `"circle"` or `"torus:N"`.
    pub fn parse(name: &str) -> Result<Builtin> {
        match name {
            "circle" => Ok(Builtin::Circle),
            other => {
                if let Some(arg) = other.strip_prefix("torus:") {
                    let n: usize = arg.parse().map_err(|_| {
                        Error::BadInput(format!("bad torus dimension {arg:?}"))
                    })?;
                    if n == 0 {
                        return Err(Error::BadInput("torus dimension must be ≥ 1".into()));
                    }
                    Ok(Builtin::Torus(n))
                } else {
                    Err(Error::BadInput(format!(
                        "unknown builtin {name:?}; expected \"circle\" or \"torus:N\""
                    )))
                }
            }
        }
    }

    pub fn name(self) -> String {
        match self {
            Builtin::Circle => "circle".to_string(),
            Builtin::Torus(n) => format!("torus:{n}"),
        }
    }
}

pub(super) fn eval_x(b: Builtin, kind: Kind, param: &[f64]) -> Vec<f64> {
    let n = b.n();
    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        let (a, bb) = (param[i], param[n + i]);
        let (q, p) = match kind {
            Kind::CenterChord => {
                let d = 0.5 * (a - bb);
                let m = 0.5 * (a + bb);
                (d.cos() * m.cos(), d.cos() * m.sin())
            }
            Kind::Special => (bb.cosh() * a.cos(), bb.cosh() * a.sin()),
        };
        out[i] = q;
        out[n + i] = p;
    }
    out
}

pub(super) fn eval_y(b: Builtin, kind: Kind, param: &[f64]) -> Vec<f64> {
    let n = b.n();
    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        let (a, bb) = (param[i], param[n + i]);
        let (q, p) = match kind {
            Kind::CenterChord => {
                let d = 0.5 * (a - bb);
                let m = 0.5 * (a + bb);
                (-d.sin() * m.sin(), d.sin() * m.cos())
            }
            Kind::Special => (-bb.sinh() * a.sin(), bb.sinh() * a.cos()),
        };
        out[i] = q;
        out[n + i] = p;
    }
    out
}

pub(super) fn eval_f(b: Builtin, kind: Kind, param: &[f64]) -> f64 {
    let n = b.n();
    let mut acc = 0.0;
    for i in 0..n {
        let (a, bb) = (param[i], param[n + i]);
        acc += match kind {
            Kind::CenterChord => 0.25 * (bb - a + (a - bb).sin()),
            Kind::Special => 0.25 * ((2.0 * bb).sinh() - 2.0 * bb),
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::IasMap;

    #[test]
    fn parse_names() {
        assert_eq!(Builtin::parse("circle").unwrap(), Builtin::Circle);
        assert_eq!(Builtin::parse("torus:2").unwrap(), Builtin::Torus(2));
        assert!(Builtin::parse("torus:0").is_err());
        assert!(Builtin::parse("sphere").is_err());
    }

    #[test]
    fn circle_center_chord_values() {
        let map = IasMap::builtin_map(Builtin::Circle, Kind::CenterChord);
        let (u, v) = (0.7, 0.1);
        let d = 0.5 * (u - v);
        let m = 0.5 * (u + v);
        let x = map.eval_x(&[u, v]);
        assert!((x[0] - d.cos() * m.cos()).abs() < 1e-15);
        assert!((x[1] - d.cos() * m.sin()).abs() < 1e-15);
        let y = map.eval_y(&[u, v]);
        assert!((y[0] + d.sin() * m.sin()).abs() < 1e-15);
        assert!((y[1] - d.sin() * m.cos()).abs() < 1e-15);
        let f = map.eval_f(&[u, v]);
        assert!((f - 0.25 * (v - u + (u - v).sin())).abs() < 1e-15);
        // shell: u = v lies on the unit circle with y = 0, f = 0
        let xs = map.eval_x(&[0.4, 0.4]);
        assert!((xs[0].hypot(xs[1]) - 1.0).abs() < 1e-15);
        assert_eq!(map.eval_y(&[0.4, 0.4]), vec![0.0, 0.0]);
        assert_eq!(map.eval_f(&[0.4, 0.4]), 0.0);
    }

    #[test]
    fn circle_special_values() {
        let map = IasMap::builtin_map(Builtin::Circle, Kind::Special);
        let (s, t) = (1.2, 0.5);
        let x = map.eval_x(&[s, t]);
        assert!((x[0] - t.cosh() * s.cos()).abs() < 1e-15);
        assert!((x[1] - t.cosh() * s.sin()).abs() < 1e-15);
        let f = map.eval_f(&[s, t]);
        assert!((f - 0.25 * ((2.0 * t).sinh() - 2.0 * t)).abs() < 1e-15);
        // shell: t = 0
        assert_eq!(map.eval_y(&[s, 0.0]), vec![0.0, 0.0]);
        assert_eq!(map.eval_f(&[s, 0.0]), 0.0);
    }

    #[test]
    fn torus_factorizes() {
        let torus = IasMap::builtin_map(Builtin::Torus(2), Kind::CenterChord);
        let circle = IasMap::builtin_map(Builtin::Circle, Kind::CenterChord);
        let (u1, u2, v1, v2) = (0.3, -0.8, 1.1, 0.25);
        let xt = torus.eval_x(&[u1, u2, v1, v2]);
        let x1 = circle.eval_x(&[u1, v1]);
        let x2 = circle.eval_x(&[u2, v2]);
        assert_eq!(&xt[..], &[x1[0], x2[0], x1[1], x2[1]]);
        let ft = torus.eval_f(&[u1, u2, v1, v2]);
        assert!((ft - circle.eval_f(&[u1, v1]) - circle.eval_f(&[u2, v2])).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_identity_by_finite_differences() {
        // df = ω(dx, y) holds to O(h²) at generic points for both kinds.
        for (kind, pt) in [
            (Kind::CenterChord, [0.9_f64, 0.2]),
            (Kind::Special, [0.6, 0.8]),
        ] {
            let map = IasMap::builtin_map(Builtin::Circle, kind);
            let h = 1e-5;
            for d in 0..2 {
                let mut pp = pt;
                let mut pm = pt;
                pp[d] += h;
                pm[d] -= h;
                let df = (map.eval_f(&pp) - map.eval_f(&pm)) / (2.0 * h);
                let xp = map.eval_x(&pp);
                let xm = map.eval_x(&pm);
                let y = map.eval_y(&pt);
                let dx: Vec<f64> = xp.iter().zip(&xm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
                let omega = dx[0] * y[1] - dx[1] * y[0];
                assert!((df - omega).abs() < 1e-9, "{kind} direction {d}");
            }
        }
    }
}
