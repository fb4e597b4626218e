//! The improper-affine-sphere maps `x`, `y` and graph potential `f`.
//!
//! For a germ potential `S` on `R^n` the two parameterizations over a
//! two-block domain are polynomial and kept exactly:
//!
//! * center-chord, domain `(u, v)`:
//!   `x = ½(u+v, dS(u)+dS(v))`, `y = ½(u−v, dS(u)−dS(v))`,
//!   `f = ½(S(u)−S(v)) − ¼ (dS(u)+dS(v))·(u−v)`;
//! * special, domain `(s, t)` with `Q = Im S(s+it)`:
//!   `x = (s, ∂Q/∂t)`, `y = (t, ∂Q/∂s)`, `f = Q − t·∂Q/∂t`.
//!
//! Ambient components are ordered `(q_1..q_n, p_1..p_n)`. In both cases the
//! defining relations are `df = ω(dx, y)` for the symplectic form
//! `ω(a, b) = Σ a_{q_i} b_{p_i} − a_{p_i} b_{q_i}`, and the shell
//! (`u = v`, resp. `t = 0`) maps onto `L` with `y = 0`, `f = 0` there.
//!
//! The round builtins (circle and torus products of it) are kept in closed
//! form instead; they evaluate through the same interface.

use crate::error::Result;
use crate::germ::LagrangianGerm;
use crate::{FPoly, Poly, QPoly};

use super::builtin::{self, Builtin};
use super::{Kind, PairVars};

/// One improper-affine-sphere parameterization `R^{2n} → R^{2n} × R`.
#[derive(Clone, Debug)]
pub struct IasMap {
    kind: Kind,
    n: usize,
    body: Body,
}

#[derive(Clone, Debug)]
enum Body {
    Symbolic {
        x: Vec<QPoly>,
        y: Vec<QPoly>,
        f: QPoly,
        // float copies, kept alongside to avoid re-conversion in grid sweeps
        xf: Vec<FPoly>,
        yf: Vec<FPoly>,
        ff: FPoly,
    },
    Closed(Builtin),
}

/// Borrowed view of the exact polynomials of a symbolic map.
pub struct SymbolicMaps<'a> {
    pub x: &'a [QPoly],
    pub y: &'a [QPoly],
    pub f: &'a QPoly,
}

impl IasMap {
    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Germ dimension `n`; domain and ambient space have dimension `2n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain_dim(&self) -> usize {
        2 * self.n
    }

    /// Exact polynomials of the map, when it came from a germ.
    pub fn symbolic(&self) -> Option<SymbolicMaps<'_>> {
        match &self.body {
            Body::Symbolic { x, y, f, .. } => Some(SymbolicMaps { x, y, f }),
            Body::Closed(_) => None,
        }
    }

    /// The builtin behind this map, when it is one.
    pub fn builtin(&self) -> Option<Builtin> {
        match &self.body {
            Body::Closed(b) => Some(*b),
            Body::Symbolic { .. } => None,
        }
    }

    pub fn eval_x(&self, param: &[f64]) -> Vec<f64> {
        assert_eq!(param.len(), self.domain_dim(), "parameter dimension");
        match &self.body {
            Body::Symbolic { xf, .. } => xf.iter().map(|p| p.evaluate(param)).collect(),
            Body::Closed(b) => builtin::eval_x(*b, self.kind, param),
        }
    }

    pub fn eval_y(&self, param: &[f64]) -> Vec<f64> {
        assert_eq!(param.len(), self.domain_dim(), "parameter dimension");
        match &self.body {
            Body::Symbolic { yf, .. } => yf.iter().map(|p| p.evaluate(param)).collect(),
            Body::Closed(b) => builtin::eval_y(*b, self.kind, param),
        }
    }

    pub fn eval_f(&self, param: &[f64]) -> f64 {
        assert_eq!(param.len(), self.domain_dim(), "parameter dimension");
        match &self.body {
            Body::Symbolic { ff, .. } => ff.evaluate(param),
            Body::Closed(b) => builtin::eval_f(*b, self.kind, param),
        }
    }

    fn from_polys(kind: Kind, n: usize, x: Vec<QPoly>, y: Vec<QPoly>, f: QPoly) -> IasMap {
        let xf = x.iter().map(QPoly::to_f64).collect();
        let yf = y.iter().map(QPoly::to_f64).collect();
        let ff = f.to_f64();
        IasMap {
            kind,
            n,
            body: Body::Symbolic { x, y, f, xf, yf, ff },
        }
    }

    /// Closed-form builtin map of the given kind.
    pub fn builtin_map(b: Builtin, kind: Kind) -> IasMap {
        IasMap {
            kind,
            n: b.n(),
            body: Body::Closed(b),
        }
    }
}

/// Center-chord parameterization of a germ (domain `(u, v)`, each block `n`).
pub fn center_chord_maps(germ: &LagrangianGerm) -> Result<IasMap> {
    let n = germ.n();
    let pv = PairVars { n };
    let total = pv.total();
    let s = germ.potential();

    // S and its gradient, transplanted to the u-block and the v-block.
    let u_map: Vec<usize> = (0..n).map(|i| pv.first(i)).collect();
    let v_map: Vec<usize> = (0..n).map(|i| pv.second(i)).collect();
    let s_u = s.embed(total, &u_map)?;
    let s_v = s.embed(total, &v_map)?;
    let ds_u: Vec<QPoly> = (0..n)
        .map(|i| s.differentiate(i, 1).embed(total, &u_map))
        .collect::<Result<_>>()?;
    let ds_v: Vec<QPoly> = (0..n)
        .map(|i| s.differentiate(i, 1).embed(total, &v_map))
        .collect::<Result<_>>()?;

    let half = crate::rat(1, 2);
    let quarter = crate::rat(1, 4);

    let mut x = Vec::with_capacity(2 * n);
    let mut y = Vec::with_capacity(2 * n);
    for i in 0..n {
        let u_i = Poly::var(total, pv.first(i));
        let v_i = Poly::var(total, pv.second(i));
        x.push((&u_i + &v_i).scale(&half));
        y.push((&u_i - &v_i).scale(&half));
    }
    for i in 0..n {
        x.push((&ds_u[i] + &ds_v[i]).scale(&half));
        y.push((&ds_u[i] - &ds_v[i]).scale(&half));
    }

    // f = ½(S(u) − S(v)) − ¼ Σ_j (∂_j S(u) + ∂_j S(v)) (u_j − v_j)
    let mut f = (&s_u - &s_v).scale(&half);
    for j in 0..n {
        let du = &Poly::var(total, pv.first(j)) - &Poly::var(total, pv.second(j));
        let avg = &ds_u[j] + &ds_v[j];
        f = &f - &(&avg * &du).scale(&quarter);
    }

    Ok(IasMap::from_polys(Kind::CenterChord, n, x, y, f))
}

/// Special parameterization of a germ (domain `(s, t)`, each block `n`).
pub fn special_maps(germ: &LagrangianGerm) -> Result<IasMap> {
    let n = germ.n();
    let pv = PairVars { n };
    let total = pv.total();
    let q = super::family::holomorphic_extension(germ.potential());

    let dq_dt: Vec<QPoly> = (0..n).map(|i| q.differentiate(pv.second(i), 1)).collect();
    let dq_ds: Vec<QPoly> = (0..n).map(|i| q.differentiate(pv.first(i), 1)).collect();

    let mut x = Vec::with_capacity(2 * n);
    let mut y = Vec::with_capacity(2 * n);
    for i in 0..n {
        x.push(Poly::var(total, pv.first(i)));
        y.push(Poly::var(total, pv.second(i)));
    }
    x.extend(dq_dt.iter().cloned());
    y.extend(dq_ds.iter().cloned());

    // f = Q − Σ_k t_k ∂Q/∂t_k
    let mut f = q;
    for (k, dq) in dq_dt.iter().enumerate() {
        f = &f - &(&Poly::var(total, pv.second(k)) * dq);
    }

    Ok(IasMap::from_polys(Kind::Special, n, x, y, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::gen_family;
    use crate::{rat, rint, Rat};

    fn var(n: usize, v: usize) -> QPoly {
        Poly::var(n, v)
    }

    /// ω(a, b) = Σ a_qi b_pi − a_pi b_qi for symbolic component vectors.
    fn omega(a: &[QPoly], b: &[QPoly], n: usize) -> QPoly {
        let mut acc = Poly::zero(a[0].nvars());
        for i in 0..n {
            acc = &acc + &(&a[i] * &b[n + i]);
            acc = &acc - &(&a[n + i] * &b[i]);
        }
        acc
    }

    #[test]
    fn center_chord_satisfies_defining_identities() {
        // d f = ω(dx, y) in every domain direction, exactly.
        let s = &(&var(2, 0).pow(2) * &var(2, 1)) + &var(2, 1).pow(5).scale(&rat(2, 3));
        let germ = LagrangianGerm::at_origin(2, s).unwrap();
        let map = center_chord_maps(&germ).unwrap();
        let sym = map.symbolic().unwrap();
        for d in 0..map.domain_dim() {
            let df = sym.f.differentiate(d, 1);
            let dx: Vec<QPoly> = sym.x.iter().map(|c| c.differentiate(d, 1)).collect();
            let rhs = omega(&dx, sym.y, 2);
            assert!((&df - &rhs).is_zero(), "direction {d}");
        }
    }

    #[test]
    fn special_satisfies_defining_identities() {
        let s = &var(1, 0).pow(5) + &var(1, 0).pow(4).scale(&rat(1, 4));
        let germ = LagrangianGerm::at_origin(1, s).unwrap();
        let map = special_maps(&germ).unwrap();
        let sym = map.symbolic().unwrap();
        for d in 0..map.domain_dim() {
            let df = sym.f.differentiate(d, 1);
            let dx: Vec<QPoly> = sym.x.iter().map(|c| c.differentiate(d, 1)).collect();
            let rhs = omega(&dx, sym.y, 1);
            assert!((&df - &rhs).is_zero(), "direction {d}");
        }
    }

    #[test]
    fn shell_maps_to_l_with_vanishing_y_and_f() {
        // cc on u = v: x = (u, dS(u)), y = 0, f = 0
        let s = var(1, 0).pow(3);
        let germ = LagrangianGerm::at_origin(1, s.clone()).unwrap();
        let map = center_chord_maps(&germ).unwrap();
        let sym = map.symbolic().unwrap();
        let diag = vec![var(1, 0), var(1, 0)]; // u → u, v → u
        for comp in sym.y {
            assert!(comp.substitute(&diag).unwrap().is_zero());
        }
        assert!(sym.f.substitute(&diag).unwrap().is_zero());
        assert_eq!(sym.x[0].substitute(&diag).unwrap(), var(1, 0));
        assert_eq!(sym.x[1].substitute(&diag).unwrap(), s.differentiate(0, 1));

        // sp on t = 0: x = (s, dS(s)), y = 0, f = 0
        let map = special_maps(&germ).unwrap();
        let sym = map.symbolic().unwrap();
        let restrict = vec![var(1, 0), Poly::zero(1)];
        for comp in sym.y {
            assert!(comp.substitute(&restrict).unwrap().is_zero());
        }
        assert!(sym.f.substitute(&restrict).unwrap().is_zero());
        assert_eq!(sym.x[1].substitute(&restrict).unwrap(), s.differentiate(0, 1));
    }

    #[test]
    fn cubic_curve_map_components() {
        // S = q^3: x = ((u+v)/2, (3u²+3v²)/2), f = ½(u³−v³) − ¼(3u²+3v²)(u−v)
        let germ = LagrangianGerm::at_origin(1, var(1, 0).pow(3)).unwrap();
        let map = center_chord_maps(&germ).unwrap();
        let sym = map.symbolic().unwrap();
        let u = var(2, 0);
        let v = var(2, 1);
        assert_eq!(sym.x[0], (&u + &v).scale(&rat(1, 2)));
        assert_eq!(
            sym.x[1],
            (&u.pow(2) + &v.pow(2)).scale(&rat(3, 2))
        );
        let f_want = &(&u.pow(3) - &v.pow(3)).scale(&rat(1, 2))
            - &(&(&u.pow(2) + &v.pow(2)).scale(&rint(3)) * &(&u - &v)).scale(&rat(1, 4));
        assert_eq!(sym.f, &f_want);
    }

    #[test]
    fn float_and_exact_evaluation_agree() {
        let s = &(&var(2, 0).pow(3) * &var(2, 1)) + &var(2, 1).pow(3);
        let germ = LagrangianGerm::at_origin(2, s).unwrap();
        for map in [center_chord_maps(&germ).unwrap(), special_maps(&germ).unwrap()] {
            let sym_f = map.symbolic().unwrap().f.clone();
            let pt = [0.3, -0.4, 0.15, 0.6];
            let exact_pt: Vec<Rat> = [rat(3, 10), rat(-2, 5), rat(3, 20), rat(3, 5)].into();
            let exact = crate::rat_to_f64(&sym_f.evaluate(&exact_pt));
            assert!((map.eval_f(&pt) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_values_of_family_recover_f() {
        // At a fiber-critical point of G (p = ∇_β g), the family value equals
        // the graph potential at the matching domain point. Exercised for cc
        // where (u, v) = (q+β, q−β).
        let s = &var(1, 0).pow(5) + &var(1, 0).pow(3).scale(&rat(-1, 2));
        let germ = LagrangianGerm::at_origin(1, s).unwrap();
        let fam = gen_family(&germ, Kind::CenterChord);
        let map = center_chord_maps(&germ).unwrap();
        let shell = fam.on_shell_part(); // g(q, β) on (q, β)
        let g_b = shell.differentiate(1, 1);
        for (qv, bv) in [(rat(1, 3), rat(1, 2)), (rat(-2, 5), rat(1, 7))] {
            let p = g_b.evaluate(&[qv.clone(), bv.clone()]);
            let g_val = fam
                .family_poly()
                .evaluate(&[bv.clone(), qv.clone(), p.clone()]);
            let u = qv.clone() + bv.clone();
            let v = qv.clone() - bv.clone();
            let f_val = map.symbolic().unwrap().f.evaluate(&[u, v]);
            assert_eq!(g_val, f_val);
        }
    }
}
