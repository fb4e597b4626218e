//! Odd generating families of the two constructions.
//!
//! For a germ potential `S` on `R^n`:
//!
//! * center-chord: `G(β, q, p) = ½(S(q+β) − S(q−β)) − p·β`;
//! * special:      `G(β, q, p) = Q(q, β) − p·β`, where `Q(s, t) = Im S(s+it)`
//!   is the imaginary part of the holomorphic extension of `S`.
//!
//! Both are odd in `β`, and exchanging a term of fiber degree `j` with the
//! sign `(-1)^⌊j/2⌋` maps one family onto the other (an involution).

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::germ::LagrangianGerm;
use crate::poly::MultiIndex;
use crate::{Poly, QPoly, Rat};

use super::{FamilyVars, Kind, PairVars};

/// Generating family `G(β, q, p)` of one construction kind.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingFamily {
    kind: Kind,
    n: usize,
    g: QPoly,
}

impl GeneratingFamily {
    /// Wrap an explicit family polynomial. `g` must live on `3n` variables
    /// in the layout of [`FamilyVars`] and be odd in the fiber block.
    pub fn new(kind: Kind, n: usize, g: QPoly) -> Result<Self> {
        if g.nvars() != 3 * n {
            return Err(Error::NvarsMismatch(g.nvars(), 3 * n));
        }
        let vars = FamilyVars { n };
        let (even, _) = g.parity_split(&vars.betas());
        if !even.is_zero() {
            let offender = even
                .terms()
                .next()
                .map(|(e, _)| format!("{:?}", e.exps()))
                .unwrap_or_default();
            return Err(Error::NotOdd(offender));
        }
        Ok(GeneratingFamily { kind, n, g })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vars(&self) -> FamilyVars {
        FamilyVars { n: self.n }
    }

    /// The full family polynomial `G(β, q, p)`.
    pub fn family_poly(&self) -> &QPoly {
        &self.g
    }

    /// The `p`-free part `g(q, β) = G + p·β`, returned on `2n` variables
    /// with `q` in slots `0..n` and `β` in slots `n..2n`.
    pub fn on_shell_part(&self) -> QPoly {
        let vars = self.vars();
        let mut images = Vec::with_capacity(3 * self.n);
        for i in 0..self.n {
            images.push(Poly::var(2 * self.n, self.n + i)); // β_i → slot n+i
        }
        for i in 0..self.n {
            images.push(Poly::var(2 * self.n, i)); // q_i → slot i
        }
        for _ in 0..self.n {
            images.push(Poly::zero(2 * self.n)); // p_i → 0
        }
        debug_assert_eq!(images.len(), vars.total());
        self.g.substitute(&images).expect("arity matches layout")
    }
}

// JSON form: {"kind": "cc", "n": 2, "G": <poly>}
#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    kind: String,
    n: usize,
    #[serde(rename = "G")]
    g: QPoly,
}

impl Serialize for GeneratingFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr {
            kind: self.kind.as_str().to_string(),
            n: self.n,
            g: self.g.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GeneratingFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FamilyRepr::deserialize(deserializer)?;
        let kind = Kind::parse(&repr.kind).map_err(|e| D::Error::custom(e.to_string()))?;
        GeneratingFamily::new(kind, repr.n, repr.g).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Build the generating family of the requested kind from a germ.
pub fn gen_family(germ: &LagrangianGerm, kind: Kind) -> GeneratingFamily {
    let n = germ.n();
    let vars = FamilyVars { n };
    let total = vars.total();
    let odd_core = match kind {
        Kind::CenterChord => {
            // ½ (S(q+β) − S(q−β))
            let plus: Vec<QPoly> = (0..n)
                .map(|i| &Poly::var(total, vars.q(i)) + &Poly::var(total, vars.beta(i)))
                .collect();
            let minus: Vec<QPoly> = (0..n)
                .map(|i| &Poly::var(total, vars.q(i)) - &Poly::var(total, vars.beta(i)))
                .collect();
            let s = germ.potential();
            let diff = &s.substitute(&plus).expect("arity matches")
                - &s.substitute(&minus).expect("arity matches");
            diff.scale(&crate::rat(1, 2))
        }
        Kind::Special => {
            // Q(q, β) with the extension's (s, t) sent to (q, β)
            let q = holomorphic_extension(germ.potential());
            let mut map = Vec::with_capacity(2 * n);
            for i in 0..n {
                map.push(vars.q(i)); // s_i → q_i slot
            }
            for i in 0..n {
                map.push(vars.beta(i)); // t_i → β_i slot
            }
            q.embed(total, &map).expect("slots in range")
        }
    };
    let mut g = odd_core;
    for i in 0..n {
        let pb = &Poly::var(total, vars.p(i)) * &Poly::var(total, vars.beta(i));
        g = &g - &pb;
    }
    GeneratingFamily::new(kind, n, g).expect("built families are odd by construction")
}

/// Imaginary part `Q(s, t) = Im S(s + it)` of the holomorphic extension,
/// on `2n` variables (`s` in slots `0..n`, `t` in slots `n..2n`).
///
/// Each monomial `Π (s_k + i t_k)^{e_k}` is expanded exactly over the
/// Gaussian rationals and only the imaginary component is kept.
pub fn holomorphic_extension(s: &QPoly) -> QPoly {
    let n = s.nvars();
    let pv = PairVars { n };
    let total = pv.total();
    let mut result = ComplexPoly::zero(total);
    // powers[k][j] = (s_k + i t_k)^j
    let mut powers: Vec<Vec<ComplexPoly>> = (0..n)
        .map(|_| vec![ComplexPoly::one(total)])
        .collect();
    for (e, c) in s.terms() {
        let mut acc = ComplexPoly {
            re: Poly::constant(total, c.clone()),
            im: Poly::zero(total),
        };
        for (k, pk) in powers.iter_mut().enumerate() {
            let exp = e.exp(k) as usize;
            while pk.len() <= exp {
                let base = ComplexPoly {
                    re: Poly::var(total, pv.first(k)),
                    im: Poly::var(total, pv.second(k)),
                };
                let next = pk.last().unwrap().mul(&base);
                pk.push(next);
            }
            acc = acc.mul(&pk[exp]);
        }
        result = result.add(&acc);
    }
    result.im
}

/// Complexified polynomial `re + i·im` over a real variable space.
struct ComplexPoly {
    re: QPoly,
    im: QPoly,
}

impl ComplexPoly {
    fn zero(nvars: usize) -> Self {
        ComplexPoly {
            re: Poly::zero(nvars),
            im: Poly::zero(nvars),
        }
    }

    fn one(nvars: usize) -> Self {
        ComplexPoly {
            re: Poly::constant(nvars, Rat::from_integer(1.into())),
            im: Poly::zero(nvars),
        }
    }

    fn add(&self, other: &Self) -> Self {
        ComplexPoly {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        ComplexPoly {
            re: &(&self.re * &other.re) - &(&self.im * &other.im),
            im: &(&self.re * &other.im) + &(&self.im * &other.re),
        }
    }
}

/// Exchange the center-chord and special families of one germ: each term of
/// fiber degree `j` (always odd) is scaled by `(-1)^⌊j/2⌋`. Applying the
/// transform twice returns the input.
pub fn cc_sp_transform(fam: &GeneratingFamily) -> Result<GeneratingFamily> {
    let vars = fam.vars();
    let betas = vars.betas();
    let mut terms: Vec<(MultiIndex, Rat)> = Vec::with_capacity(fam.g.term_count());
    for (e, c) in fam.g.terms() {
        let j = e.degree_in(&betas);
        if j % 2 == 0 {
            return Err(Error::NotOdd(format!("{:?}", e.exps())));
        }
        let flip = (j / 2) % 2 == 1;
        let coef = if flip { -c.clone() } else { c.clone() };
        terms.push((e.clone(), coef));
    }
    let g = Poly::from_terms(fam.g.nvars(), terms)?;
    GeneratingFamily::new(fam.kind.other(), fam.n, g)
}
