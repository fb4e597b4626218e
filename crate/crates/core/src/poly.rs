//! Sparse multivariate polynomials over an exact or floating scalar ring.
//!
//! Everything downstream (germ jets, generating families, caustic equations,
//! classifier invariants) is built from [`Poly`], so this module favours
//! predictable, canonical behaviour over raw speed:
//!
//! * terms live in a `BTreeMap` keyed by [`MultiIndex`] under graded-lex
//!   order, so iteration, equality and serialization are deterministic;
//! * coefficients are any [`Scalar`] — `BigRational` for the exact paths,
//!   `f64` for grid evaluation — and zero coefficients are never stored;
//! * an optional truncation degree turns a polynomial into a jet: operations
//!   discard terms above the bound instead of growing without limit.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{FromPrimitive, One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Rat;

/// Coefficient ring bound shared by the exact and floating instantiations.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + FromPrimitive
{
}

impl<T> Scalar for T where
    T: Clone
        + fmt::Debug
        + PartialEq
        + Zero
        + One
        + Neg<Output = Self>
        + Sub<Output = Self>
        + FromPrimitive
{
}

/// Exponent vector of a monomial; ordered graded-lex (total degree first,
/// then lexicographic on the exponent slots).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Box<[u32]>);

impl MultiIndex {
    pub fn new(exps: impl Into<Box<[u32]>>) -> Self {
        MultiIndex(exps.into())
    }

    /// The zero exponent vector (the constant monomial) on `nvars` variables.
    pub fn zeros(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars].into())
    }

    /// The exponent vector of the single variable `var`.
    pub fn unit(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index {var} out of range 0..{nvars}");
        let mut e = vec![0u32; nvars];
        e[var] = 1;
        MultiIndex(e.into())
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, var: usize) -> u32 {
        self.0[var]
    }

    /// Total degree.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Total degree counting only the listed variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&v| self.0[v]).sum()
    }

    /// Product of monomials = componentwise sum of exponents.
    pub fn combine(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.nvars(), other.nvars());
        MultiIndex(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial (or jet, when a truncation degree is set).
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<T> {
    nvars: usize,
    truncation: Option<u32>,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            truncation: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Poly::zero(nvars);
        p.insert(MultiIndex::zeros(nvars), c);
        p
    }

    /// The polynomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut p = Poly::zero(nvars);
        p.insert(MultiIndex::unit(nvars, var), T::one());
        p
    }

    /// Single term `c * x^exp`.
    pub fn monomial(exp: MultiIndex, c: T) -> Self {
        let mut p = Poly::zero(exp.nvars());
        p.insert(exp, c);
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (MultiIndex, T)>,
    ) -> Result<Self> {
        let mut p = Poly::zero(nvars);
        for (exp, c) in terms {
            if exp.nvars() != nvars {
                return Err(Error::NvarsMismatch(exp.nvars(), nvars));
            }
            p.accumulate(exp, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncation_degree(&self) -> Option<u32> {
        self.truncation
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.terms.iter()
    }

    /// Coefficient of `exp` (zero when absent).
    pub fn coeff(&self, exp: &MultiIndex) -> T {
        self.terms.get(exp).cloned().unwrap_or_else(T::zero)
    }

    /// Highest total degree among stored terms; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    /// Lowest total degree among stored terms; `None` for the zero polynomial.
    pub fn low_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).min()
    }

    /// Attach a truncation degree, discarding terms above it.
    pub fn with_truncation(mut self, degree: u32) -> Self {
        self.truncation = Some(degree);
        self.terms.retain(|e, _| e.degree() <= degree);
        self
    }

    /// Remove the truncation marker (keeps the terms as they are).
    pub fn without_truncation(mut self) -> Self {
        self.truncation = None;
        self
    }

    /// Drop every term of total degree greater than `degree` (does not mark
    /// the result as truncated; use [`Poly::with_truncation`] for that).
    pub fn truncated(&self, degree: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|e, _| e.degree() <= degree);
        out
    }

    fn insert(&mut self, exp: MultiIndex, c: T) {
        if c.is_zero() {
            return;
        }
        if let Some(d) = self.truncation {
            if exp.degree() > d {
                return;
            }
        }
        self.terms.insert(exp, c);
    }

    fn accumulate(&mut self, exp: MultiIndex, c: T) {
        if c.is_zero() {
            return;
        }
        if let Some(d) = self.truncation {
            if exp.degree() > d {
                return;
            }
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn merged_truncation(&self, other: &Self) -> Option<u32> {
        match (self.truncation, other.truncation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        let mut out = Poly {
            nvars: self.nvars,
            truncation: self.merged_truncation(other),
            terms: BTreeMap::new(),
        };
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.accumulate(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.clone().negated())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        let mut out = Poly {
            nvars: self.nvars,
            truncation: self.merged_truncation(other),
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                if let Some(d) = out.truncation {
                    if ea.degree() + eb.degree() > d {
                        continue;
                    }
                }
                out.accumulate(ea.combine(eb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn negated(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Poly {
                nvars: self.nvars,
                truncation: self.truncation,
                terms: BTreeMap::new(),
            };
        }
        let mut out = self.clone();
        out.terms = out
            .terms
            .into_iter()
            .filter_map(|(e, v)| {
                let w = v * c.clone();
                if w.is_zero() {
                    None
                } else {
                    Some((e, w))
                }
            })
            .collect();
        out
    }

    /// `self^k`, honouring the truncation degree when one is set.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = Poly::constant(self.nvars, T::one());
        out.truncation = self.truncation;
        for _ in 0..k {
            out = out.try_mul(self).expect("same nvars");
        }
        out
    }

    /// `order`-fold partial derivative in variable `var`.
    pub fn differentiate(&self, var: usize, order: u32) -> Self {
        assert!(var < self.nvars, "variable index out of range");
        let mut out = Poly {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            let k = e.exp(var);
            if k < order {
                continue;
            }
            // falling factorial k (k-1) ... (k-order+1)
            let mut factor = T::one();
            for j in 0..order {
                factor = factor * T::from_u32(k - j).expect("small integer fits the scalar");
            }
            let mut exps = e.exps().to_vec();
            exps[var] = k - order;
            out.accumulate(MultiIndex::new(exps), c.clone() * factor);
        }
        out
    }

    /// Composite `self(images[0], ..., images[nvars-1])`.
    ///
    /// All images must share a common variable count, which becomes the
    /// variable count of the result. Truncation degrees (of `self` or of any
    /// image) carry over as the minimum of those present.
    pub fn substitute(&self, images: &[Poly<T>]) -> Result<Self> {
        if images.len() != self.nvars {
            return Err(Error::SubstitutionArity {
                expect: self.nvars,
                got: images.len(),
            });
        }
        let m = match images.first() {
            Some(p) => p.nvars,
            None => {
                // 0-variable polynomial: a constant; reinterpret as itself.
                return Ok(self.clone());
            }
        };
        let mut trunc = self.truncation;
        for img in images {
            if img.nvars != m {
                return Err(Error::NvarsMismatch(img.nvars, m));
            }
            trunc = match (trunc, img.truncation) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                (None, None) => None,
            };
        }
        let mut out = Poly {
            nvars: m,
            truncation: trunc,
            terms: BTreeMap::new(),
        };
        // Cache image powers: powers[v][k] = images[v]^k.
        let mut powers: Vec<Vec<Poly<T>>> = (0..images.len())
            .map(|_| {
                let mut base = Poly::constant(m, T::one());
                base.truncation = trunc;
                vec![base]
            })
            .collect();
        for (e, c) in &self.terms {
            let mut acc = Poly::constant(m, c.clone());
            acc.truncation = trunc;
            for v in 0..self.nvars {
                let k = e.exp(v) as usize;
                while powers[v].len() <= k {
                    let next = powers[v]
                        .last()
                        .unwrap()
                        .try_mul(&images[v])
                        .expect("same nvars");
                    powers[v].push(next);
                }
                acc = acc.try_mul(&powers[v][k]).expect("same nvars");
            }
            for (e2, c2) in acc.terms {
                out.accumulate(e2, c2);
            }
        }
        Ok(out)
    }

    /// Reinterpret on `target_nvars` variables, sending variable `i` of
    /// `self` to variable `var_map[i]` of the target space.
    pub fn embed(&self, target_nvars: usize, var_map: &[usize]) -> Result<Self> {
        if var_map.len() != self.nvars {
            return Err(Error::SubstitutionArity {
                expect: self.nvars,
                got: var_map.len(),
            });
        }
        for &v in var_map {
            if v >= target_nvars {
                return Err(Error::BadInput(format!(
                    "embed target variable {v} out of range 0..{target_nvars}"
                )));
            }
        }
        let mut out = Poly {
            nvars: target_nvars,
            truncation: self.truncation,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            let mut exps = vec![0u32; target_nvars];
            for (i, &v) in var_map.iter().enumerate() {
                exps[v] += e.exp(i);
            }
            out.accumulate(MultiIndex::new(exps), c.clone());
        }
        Ok(out)
    }

    /// Project onto the listed variables (in the given order). Errors if any
    /// term involves a variable outside `keep`.
    pub fn project(&self, keep: &[usize]) -> Result<Self> {
        let mut out = Poly {
            nvars: keep.len(),
            truncation: self.truncation,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            for v in 0..self.nvars {
                if e.exp(v) > 0 && !keep.contains(&v) {
                    return Err(Error::ProjectedVariable { var: v });
                }
            }
            let exps: Vec<u32> = keep.iter().map(|&v| e.exp(v)).collect();
            out.accumulate(MultiIndex::new(exps), c.clone());
        }
        Ok(out)
    }

    /// Split into (even, odd) parts by total degree in the listed variables.
    pub fn parity_split(&self, vars: &[usize]) -> (Self, Self) {
        let mut even = Poly {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: BTreeMap::new(),
        };
        let mut odd = even.clone();
        for (e, c) in &self.terms {
            if e.degree_in(vars) % 2 == 0 {
                even.insert(e.clone(), c.clone());
            } else {
                odd.insert(e.clone(), c.clone());
            }
        }
        (even, odd)
    }

    /// Keep only terms whose total degree in `vars` equals zero — i.e. the
    /// part constant in those variables.
    pub fn constant_part_in(&self, vars: &[usize]) -> Self {
        let mut out = Poly {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            if e.degree_in(vars) == 0 {
                out.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Evaluate at a point (Horner recursion on one variable at a time;
    /// exact when `T` is exact).
    pub fn evaluate(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        Evaluator::new(self).eval(point)
    }

    /// Map coefficients into another scalar ring (e.g. rational → f64).
    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        let mut out = Poly {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            out.accumulate(e.clone(), f(c));
        }
        out
    }

    /// Render with custom variable names.
    pub fn display_with<'a>(&'a self, namer: &'a dyn Fn(usize) -> String) -> PolyDisplay<'a, T>
    where
        T: fmt::Display,
    {
        PolyDisplay { poly: self, namer }
    }
}

impl Poly<Rat> {
    /// Lossy conversion to a float-coefficient polynomial.
    pub fn to_f64(&self) -> Poly<f64> {
        self.map_coeffs(crate::rat_to_f64)
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Self) -> Poly<T> {
        self.try_add(rhs).expect("polynomial nvars mismatch")
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: Self) -> Poly<T> {
        self.try_sub(rhs).expect("polynomial nvars mismatch")
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Self) -> Poly<T> {
        self.try_mul(rhs).expect("polynomial nvars mismatch")
    }
}

impl<T: Scalar> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        self.negated()
    }
}

/// Prebuilt Horner form for repeated evaluation of one polynomial
/// (grid sweeps); `Poly::evaluate` delegates to this.
pub struct Evaluator<T> {
    nvars: usize,
    root: Node<T>,
}

enum Node<T> {
    Const(T),
    /// Σ_k coeffs[k] · x_var^k, evaluated by Horner from the top coefficient.
    Chain { var: usize, coeffs: Vec<Node<T>> },
}

impl<T: Scalar> Evaluator<T> {
    pub fn new(poly: &Poly<T>) -> Self {
        let terms: Vec<(&MultiIndex, &T)> = poly.terms.iter().collect();
        Evaluator {
            nvars: poly.nvars,
            root: Self::build(&terms, 0, poly.nvars),
        }
    }

    fn build(terms: &[(&MultiIndex, &T)], var: usize, nvars: usize) -> Node<T> {
        if terms.is_empty() {
            return Node::Const(T::zero());
        }
        if var == nvars {
            debug_assert_eq!(terms.len(), 1);
            return Node::Const(terms[0].1.clone());
        }
        let max_exp = terms.iter().map(|(e, _)| e.exp(var)).max().unwrap() as usize;
        let mut buckets: Vec<Vec<(&MultiIndex, &T)>> = vec![Vec::new(); max_exp + 1];
        for &(e, c) in terms {
            buckets[e.exp(var) as usize].push((e, c));
        }
        let coeffs = buckets
            .into_iter()
            .map(|bucket| Self::build(&bucket, var + 1, nvars))
            .collect();
        Node::Chain { var, coeffs }
    }

    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        Self::eval_node(&self.root, point)
    }

    fn eval_node(node: &Node<T>, point: &[T]) -> T {
        match node {
            Node::Const(c) => c.clone(),
            Node::Chain { var, coeffs } => {
                let x = &point[*var];
                let mut acc = T::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * x.clone() + Self::eval_node(c, point);
                }
                acc
            }
        }
    }
}

pub struct PolyDisplay<'a, T> {
    poly: &'a Poly<T>,
    namer: &'a dyn Fn(usize) -> String,
}

impl<'a, T: Scalar + fmt::Display> fmt::Display for PolyDisplay<'a, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let one = T::one();
        let minus_one = -T::one();
        for (i, (e, c)) in self.poly.terms.iter().enumerate() {
            let is_const = e.degree() == 0;
            let body = format_monomial(e, self.namer);
            let coef = format!("{c}");
            let (sign, mag) = match coef.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", coef),
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else if sign == "-" {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if is_const {
                write!(f, "{mag}")?;
            } else if *c == one || *c == minus_one {
                write!(f, "{body}")?;
            } else {
                write!(f, "{mag}*{body}")?;
            }
        }
        Ok(())
    }
}

fn format_monomial(e: &MultiIndex, namer: &dyn Fn(usize) -> String) -> String {
    let mut parts = Vec::new();
    for v in 0..e.nvars() {
        match e.exp(v) {
            0 => {}
            1 => parts.push(namer(v)),
            k => parts.push(format!("{}^{}", namer(v), k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly<Rat> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let namer = |v: usize| format!("x{v}");
        write!(f, "{}", self.display_with(&namer))
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"nvars": n, "terms": [{"exp": [..], "coef": "p/q"}, ..]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<TermRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation_degree: Option<u32>,
}

impl Serialize for Poly<Rat> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exp: e.exps().to_vec(),
                    coef: c.to_string(),
                })
                .collect(),
            truncation_degree: self.truncation,
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly<Rat> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut poly = Poly::zero(repr.nvars);
        poly.truncation = repr.truncation_degree;
        for term in repr.terms {
            if term.exp.len() != repr.nvars {
                return Err(D::Error::custom(format!(
                    "term exponent length {} does not match nvars {}",
                    term.exp.len(),
                    repr.nvars
                )));
            }
            let coef: Rat = term
                .coef
                .parse()
                .map_err(|e| D::Error::custom(format!("bad coefficient {:?}: {e}", term.coef)))?;
            poly.accumulate(MultiIndex::new(term.exp), coef);
        }
        Ok(poly)
    }
}

/// Parse a rational from a "p/q" or integer string.
pub fn parse_rat(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| Error::BadInput(format!("bad rational {s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn q(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    /// Independent convolution product used as the multiplication oracle.
    fn mul_oracle(a: &Poly<Rat>, b: &Poly<Rat>) -> Vec<(Vec<u32>, Rat)> {
        let mut acc: std::collections::HashMap<Vec<u32>, Rat> = Default::default();
        for (ea, ca) in a.terms() {
            for (eb, cb) in b.terms() {
                let key: Vec<u32> = ea
                    .exps()
                    .iter()
                    .zip(eb.exps())
                    .map(|(x, y)| x + y)
                    .collect();
                *acc.entry(key).or_insert_with(Rat::zero) += ca.clone() * cb.clone();
            }
        }
        let mut v: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        v.sort();
        v
    }

    fn poly2(terms: &[(u32, u32, Rat)]) -> Poly<Rat> {
        Poly::from_terms(
            2,
            terms
                .iter()
                .map(|(a, b, c)| (MultiIndex::new(vec![*a, *b]), c.clone())),
        )
        .unwrap()
    }

    #[test]
    fn graded_lex_order() {
        // degree first, then lexicographic
        let a = MultiIndex::new(vec![0, 2]); // degree 2
        let b = MultiIndex::new(vec![1, 0]); // degree 1
        let c = MultiIndex::new(vec![1, 1]); // degree 2
        assert!(b < a);
        assert!(a < c); // same degree, [0,2] < [1,1] lexicographically
    }

    #[test]
    fn mul_matches_convolution_oracle() {
        // (q + p)^2 * (q - p) in variables (q, p)
        let qv = Poly::<Rat>::var(2, 0);
        let pv = Poly::<Rat>::var(2, 1);
        let s = &qv + &pv;
        let sq = &s * &s;
        let d = &qv - &pv;
        let prod = &sq * &d;
        let got: Vec<_> = prod
            .terms()
            .map(|(e, c)| (e.exps().to_vec(), c.clone()))
            .collect();
        let mut want = mul_oracle(&sq, &d);
        want.sort();
        let mut got_sorted = got.clone();
        got_sorted.sort();
        assert_eq!(got_sorted, want);
        assert_eq!(prod.degree(), Some(3));
        // (q+p)^2 (q-p) = q^3 + q^2 p - q p^2 - p^3
        assert_eq!(prod.term_count(), 4);
    }

    #[test]
    fn differentiate_basic() {
        // d^2/dq^2 (q^3 p) = 6 q p
        let p = poly2(&[(3, 1, q(1, 1))]);
        let d = p.differentiate(0, 2);
        assert_eq!(d, poly2(&[(1, 1, q(6, 1))]));
    }

    #[test]
    fn substitute_shift_has_binomial_coefficients() {
        // S(q) = q^3, q -> q + b: coefficients 1, 3, 3, 1
        let s = Poly::<Rat>::var(1, 0).pow(3);
        let image = &Poly::<Rat>::var(2, 0) + &Poly::<Rat>::var(2, 1);
        let shifted = s.substitute(&[image]).unwrap();
        let expect = poly2(&[
            (3, 0, q(1, 1)),
            (2, 1, q(3, 1)),
            (1, 2, q(3, 1)),
            (0, 3, q(1, 1)),
        ]);
        assert_eq!(shifted, expect);
    }

    #[test]
    fn parity_split_total_degree() {
        // q^3 + q^2 + q in one variable
        let s = Poly::from_terms(
            1,
            [
                (MultiIndex::new(vec![3]), q(1, 1)),
                (MultiIndex::new(vec![2]), q(1, 1)),
                (MultiIndex::new(vec![1]), q(1, 1)),
            ],
        )
        .unwrap();
        let (even, odd) = s.parity_split(&[0]);
        assert_eq!(even, Poly::from_terms(1, [(MultiIndex::new(vec![2]), q(1, 1))]).unwrap());
        assert_eq!(odd.term_count(), 2);
    }

    #[test]
    fn evaluate_exact_rational() {
        // p(q, b) = q^2 b / 2 - 3 b at (2/3, 5/7)
        let p = poly2(&[(2, 1, q(1, 2)), (0, 1, q(-3, 1))]);
        let got = p.evaluate(&[q(2, 3), q(5, 7)]);
        // (4/9)(5/7)/2 - 3*(5/7) = 10/63 - 15/7 = 10/63 - 135/63 = -125/63
        assert_eq!(got, q(-125, 63));
    }

    #[test]
    fn evaluate_matches_term_sum_oracle() {
        let p = poly2(&[
            (3, 0, q(2, 5)),
            (1, 2, q(-7, 3)),
            (0, 0, q(4, 1)),
            (2, 2, q(1, 6)),
        ]);
        let pt = [q(-3, 2), q(5, 4)];
        let mut oracle = Rat::zero();
        for (e, c) in p.terms() {
            let mut t = c.clone();
            for (v, coord) in pt.iter().enumerate() {
                for _ in 0..e.exp(v) {
                    t *= coord.clone();
                }
            }
            oracle += t;
        }
        assert_eq!(p.evaluate(&pt), oracle);
    }

    #[test]
    fn truncation_respected_by_mul() {
        let qv = Poly::<Rat>::var(1, 0).with_truncation(4);
        let p = qv.pow(3); // q^3, truncated at 4
        let sq = &p * &p; // q^6 -> truncated away
        assert!(sq.is_zero());
        assert_eq!(sq.truncation_degree(), Some(4));
    }

    #[test]
    fn nvars_mismatch_is_an_error() {
        let a = Poly::<Rat>::var(1, 0);
        let b = Poly::<Rat>::var(2, 0);
        assert!(a.try_add(&b).is_err());
        assert!(a.try_mul(&b).is_err());
        assert!(matches!(
            a.substitute(&[]),
            Err(Error::SubstitutionArity { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let p = poly2(&[(2, 1, q(3, 2)), (0, 3, q(-1, 1)), (1, 0, q(7, 1))]);
        let s1 = serde_json::to_string(&p).unwrap();
        let back: Poly<Rat> = serde_json::from_str(&s1).unwrap();
        assert_eq!(back, p);
        let s2 = serde_json::to_string(&back).unwrap();
        assert_eq!(s1, s2, "serialization must be byte-stable");
        assert!(s1.contains("\"coef\":\"3/2\""));
    }

    #[test]
    fn json_rejects_bad_exponent_length() {
        let src = r#"{"nvars":2,"terms":[{"exp":[1],"coef":"1"}]}"#;
        assert!(serde_json::from_str::<Poly<Rat>>(src).is_err());
    }

    #[test]
    fn project_and_embed() {
        let p = poly2(&[(2, 0, q(1, 1)), (1, 0, q(5, 1))]); // q^2 + 5q, no second var
        let restricted = p.project(&[0]).unwrap();
        assert_eq!(restricted.nvars(), 1);
        let lifted = restricted.embed(3, &[2]).unwrap();
        assert_eq!(lifted.nvars(), 3);
        assert_eq!(
            lifted.coeff(&MultiIndex::new(vec![0, 0, 2])),
            q(1, 1)
        );
        // projecting out a live variable errors
        assert!(p.project(&[1]).is_err());
    }

    #[test]
    fn display_readable() {
        let p = poly2(&[(2, 1, q(3, 2)), (0, 1, q(-1, 1))]);
        let namer = |v: usize| ["q", "p"][v].to_string();
        assert_eq!(format!("{}", p.display_with(&namer)), "-p + 3/2*q^2*p");
    }
}
