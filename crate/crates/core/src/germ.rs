//! Lagrangian germs `L = graph(dS)` with exact polynomial potentials.
//!
//! A germ is the pair (potential `S`, basepoint). All structural operations
//! (recentering, killing the 2-jet, jet extraction) are exact on rational
//! coefficients; a parallel float path exists for basepoints that are only
//! known numerically.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Scalar};
use crate::{FPoly, Poly, QPoly, Rat};

/// Germ of a Lagrangian submanifold `L = graph(dS) ⊂ R^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianGerm {
    n: usize,
    s: QPoly,
    basepoint: Vec<Rat>,
}

impl LagrangianGerm {
    pub fn new(n: usize, s: QPoly, basepoint: Vec<Rat>) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadInput("germ dimension n must be positive".into()));
        }
        if s.nvars() != n {
            return Err(Error::NvarsMismatch(s.nvars(), n));
        }
        if basepoint.len() != n {
            return Err(Error::BadInput(format!(
                "basepoint has {} coordinates, expected {n}",
                basepoint.len()
            )));
        }
        Ok(LagrangianGerm { n, s, basepoint })
    }

    /// Germ at the origin.
    pub fn at_origin(n: usize, s: QPoly) -> Result<Self> {
        let zero = vec![Rat::from_integer(0.into()); n];
        LagrangianGerm::new(n, s, zero)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn potential(&self) -> &QPoly {
        &self.s
    }

    pub fn basepoint(&self) -> &[Rat] {
        &self.basepoint
    }

    /// Move the study point to `q0` (coordinates of the current chart):
    /// `S̃(q) = S(q0+q) − S(q0) − ∇S(q0)·q`, basepoint shifted by `q0`.
    ///
    /// The result always has zero constant and linear parts, and recentering
    /// composes: recentering by `a` then `b` equals recentering by `a+b`.
    pub fn recenter(&self, q0: &[Rat]) -> Result<Self> {
        if q0.len() != self.n {
            return Err(Error::BadInput(format!(
                "recenter point has {} coordinates, expected {}",
                q0.len(),
                self.n
            )));
        }
        let images: Vec<QPoly> = (0..self.n)
            .map(|i| {
                let shift = Poly::constant(self.n, q0[i].clone());
                &shift + &Poly::var(self.n, i)
            })
            .collect();
        let shifted = self.s.substitute(&images)?;
        // Subtracting S(q0) and ∇S(q0)·q removes exactly the degree ≤ 1 part
        // of the shifted potential.
        let trimmed = strip_low_degree(&shifted, 1);
        let basepoint = self
            .basepoint
            .iter()
            .zip(q0)
            .map(|(b, d)| b.clone() + d.clone())
            .collect();
        LagrangianGerm::new(self.n, trimmed, basepoint)
    }

    /// Remove the quadratic part of `S`, returning the reduced germ together
    /// with the shear matrix `A = Hess(quadratic part)` that realizes the
    /// removal as the affine-symplectic change `p ↦ p − A q`.
    ///
    /// Postcondition: the returned potential has zero 2-jet (lies in `M³`).
    pub fn normalize_cubic(&self) -> (Self, Vec<Vec<Rat>>) {
        let mut shear = vec![vec![Rat::from_integer(0.into()); self.n]; self.n];
        for (e, c) in self.s.terms() {
            if e.degree() != 2 {
                continue;
            }
            let vars: Vec<usize> = (0..self.n).filter(|&v| e.exp(v) > 0).collect();
            match vars.as_slice() {
                [i] => {
                    // c q_i^2 contributes 2c on the diagonal
                    shear[*i][*i] = c.clone() + c.clone();
                }
                [i, j] => {
                    shear[*i][*j] = c.clone();
                    shear[*j][*i] = c.clone();
                }
                _ => unreachable!("degree-2 monomial involves at most two variables"),
            }
        }
        let reduced = strip_low_degree(&self.s, 2);
        (
            LagrangianGerm {
                n: self.n,
                s: reduced,
                basepoint: self.basepoint.clone(),
            },
            shear,
        )
    }

    /// Exact jet table at the germ's own origin:
    /// entry `α ↦ ∂^α S(0) = α! · coeff_α(S)`, for `|α| ≤ max_order`.
    pub fn jets(&self, max_order: u32) -> JetTable<Rat> {
        jet_table(&self.s, max_order)
    }

    /// Float-path jet table at a numeric point `q0` (same chart): the
    /// potential is shifted numerically and differentiated coefficient-wise.
    pub fn float_jets(&self, q0: &[f64], max_order: u32) -> Result<JetTable<f64>> {
        if q0.len() != self.n {
            return Err(Error::BadInput(format!(
                "jet point has {} coordinates, expected {}",
                q0.len(),
                self.n
            )));
        }
        let sf = self.s.to_f64();
        let images: Vec<FPoly> = (0..self.n)
            .map(|i| {
                let shift = Poly::constant(self.n, q0[i]);
                &shift + &Poly::var(self.n, i)
            })
            .collect();
        let shifted = sf.substitute(&images)?;
        Ok(jet_table(&shifted, max_order))
    }
}

/// Drop all terms of total degree ≤ `degree`.
fn strip_low_degree<T: Scalar>(p: &Poly<T>, degree: u32) -> Poly<T> {
    let keep = p
        .terms()
        .filter(|(e, _)| e.degree() > degree)
        .map(|(e, c)| (e.clone(), c.clone()));
    Poly::from_terms(p.nvars(), keep).expect("exponents already validated")
}

/// Table of partial derivatives of the potential at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct JetTable<T> {
    n: usize,
    max_order: u32,
    entries: std::collections::BTreeMap<MultiIndex, T>,
}

fn jet_table<T: Scalar>(s: &Poly<T>, max_order: u32) -> JetTable<T> {
    let mut entries = std::collections::BTreeMap::new();
    for (e, c) in s.terms() {
        if e.degree() > max_order {
            continue;
        }
        let mut factor = T::one();
        for v in 0..e.nvars() {
            for j in 2..=e.exp(v) {
                factor = factor * T::from_u32(j).expect("small integer fits the scalar");
            }
        }
        entries.insert(e.clone(), c.clone() * factor);
    }
    JetTable {
        n: s.nvars(),
        max_order,
        entries,
    }
}

impl<T: Scalar> JetTable<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// `∂^α S(0)`; zero when the entry is absent.
    pub fn get(&self, alpha: &[u32]) -> T {
        assert_eq!(alpha.len(), self.n, "jet index arity mismatch");
        assert!(
            alpha.iter().sum::<u32>() <= self.max_order,
            "jet order {} beyond table bound {}",
            alpha.iter().sum::<u32>(),
            self.max_order
        );
        self.entries
            .get(&MultiIndex::new(alpha.to_vec()))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    /// Curve shorthand (`n = 1`): the k-th derivative.
    pub fn d1(&self, k: u32) -> T {
        self.get(&[k])
    }

    /// Surface shorthand (`n = 2`): `S_{i,j} = ∂_1^i ∂_2^j S(0)`.
    pub fn d2(&self, i: u32, j: u32) -> T {
        self.get(&[i, j])
    }

    /// True when every derivative of total order in `lo..=hi` vanishes.
    pub fn vanishes_through(&self, lo: u32, hi: u32) -> bool {
        assert!(hi <= self.max_order);
        self.entries
            .iter()
            .all(|(e, c)| e.degree() < lo || e.degree() > hi || c.is_zero())
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"n": 2, "S": <poly>, "basepoint": ["0", "0"]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GermRepr {
    n: usize,
    #[serde(rename = "S")]
    s: QPoly,
    basepoint: Vec<String>,
}

impl Serialize for LagrangianGerm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = GermRepr {
            n: self.n,
            s: self.s.clone(),
            basepoint: self.basepoint.iter().map(|b| b.to_string()).collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LagrangianGerm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = GermRepr::deserialize(deserializer)?;
        let basepoint = repr
            .basepoint
            .iter()
            .map(|s| {
                s.parse::<Rat>()
                    .map_err(|e| D::Error::custom(format!("bad basepoint entry {s:?}: {e}")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        LagrangianGerm::new(repr.n, repr.s, basepoint)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rint};

    fn var(n: usize, v: usize) -> QPoly {
        Poly::var(n, v)
    }

    #[test]
    fn recenter_cubic_curve() {
        // S = q^3 recentered at q0 = 1: S(1+q) = 1 + 3q + 3q^2 + q^3,
        // so the recentered potential is 3q^2 + q^3.
        let g = LagrangianGerm::at_origin(1, var(1, 0).pow(3)).unwrap();
        let r = g.recenter(&[rint(1)]).unwrap();
        let expect = &var(1, 0).pow(2).scale(&rint(3)) + &var(1, 0).pow(3);
        assert_eq!(r.potential(), &expect);
        assert_eq!(r.basepoint(), &[rint(1)]);
        // zero constant and linear part
        assert!(r.potential().low_degree().unwrap() >= 2);
    }

    #[test]
    fn recenter_composes() {
        // recenter(recenter(g, a), b) == recenter(g, a + b)
        let s = &(&var(1, 0).pow(5) + &var(1, 0).pow(4).scale(&rat(1, 4)))
            + &var(1, 0).pow(2).scale(&rat(-2, 3));
        let g = LagrangianGerm::at_origin(1, s).unwrap();
        let a = rat(1, 2);
        let b = rat(-1, 3);
        let two_step = g.recenter(std::slice::from_ref(&a)).unwrap().recenter(std::slice::from_ref(&b)).unwrap();
        let one_step = g.recenter(&[a + b]).unwrap();
        assert_eq!(two_step, one_step);
    }

    #[test]
    fn normalize_cubic_reports_shear() {
        // S = q^2 + q^3 → reduced q^3, shear [2]
        let g = LagrangianGerm::at_origin(1, &var(1, 0).pow(2) + &var(1, 0).pow(3)).unwrap();
        let (red, shear) = g.normalize_cubic();
        assert_eq!(red.potential(), &var(1, 0).pow(3));
        assert_eq!(shear, vec![vec![rint(2)]]);

        // S = q1 q2 + q1^3 → shear [[0,1],[1,0]]
        let s = &(&var(2, 0) * &var(2, 1)) + &var(2, 0).pow(3);
        let g = LagrangianGerm::at_origin(2, s).unwrap();
        let (red, shear) = g.normalize_cubic();
        assert_eq!(red.potential(), &var(2, 0).pow(3));
        assert_eq!(
            shear,
            vec![vec![rint(0), rint(1)], vec![rint(1), rint(0)]]
        );
        assert!(red.potential().low_degree().unwrap() >= 3);
    }

    #[test]
    fn jets_scale_by_factorials() {
        // S = q1^2 q2^3: S_{2,3} = 2! 3! = 12, everything else (≤ order 5) zero except that slot
        let s = &var(2, 0).pow(2) * &var(2, 1).pow(3);
        let g = LagrangianGerm::at_origin(2, s).unwrap();
        let jets = g.jets(7);
        assert_eq!(jets.d2(2, 3), rint(12));
        assert_eq!(jets.d2(3, 2), rint(0));
        assert!(!jets.vanishes_through(3, 7));
        assert!(jets.vanishes_through(6, 7));
    }

    #[test]
    fn float_jets_match_exact_path() {
        // S = q^5 + q^4/4 at q0 = 1/2, exact vs float third derivative
        let s = &var(1, 0).pow(5) + &var(1, 0).pow(4).scale(&rat(1, 4));
        let g = LagrangianGerm::at_origin(1, s).unwrap();
        let exact = g.recenter(&[rat(1, 2)]).unwrap().jets(5);
        let float = g.float_jets(&[0.5], 5).unwrap();
        for k in 3..=5 {
            let want = crate::rat_to_f64(&exact.d1(k));
            assert!((float.d1(k) - want).abs() < 1e-12, "order {k}");
        }
    }

    #[test]
    fn json_round_trip() {
        let s = &var(2, 0).pow(2) * &var(2, 1);
        let g = LagrangianGerm::new(2, s, vec![rint(0), rat(1, 3)]).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.contains("\"basepoint\":[\"0\",\"1/3\"]"));
        let back: LagrangianGerm = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_malformed_germs() {
        assert!(LagrangianGerm::at_origin(2, var(1, 0)).is_err());
        assert!(LagrangianGerm::new(1, var(1, 0), vec![]).is_err());
        let bad = r#"{"n":1,"S":{"nvars":1,"terms":[]},"basepoint":["x"]}"#;
        assert!(serde_json::from_str::<LagrangianGerm>(bad).is_err());
    }
}
