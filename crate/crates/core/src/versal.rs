//! Versality and infinitesimal stability of odd deformations.
//!
//! An odd function germ `G₀(β)` deforms inside the module of odd functions
//! over the ring of even functions. A deformation with initial velocities
//! `∂G/∂λ_l` is versal exactly when those velocities, together with the
//! tangent module spanned by `β_j ∂G₀/∂β_i` with even-function coefficients,
//! fill out every odd direction. Truncating at an odd degree `cutoff` turns
//! this into exact linear algebra over the rationals: stack the coefficient
//! rows, reduce, and test each odd monomial for membership in the row space.
//!
//! Two target ranges are used: `Full` demands every odd monomial from degree
//! 1, while `OnShell` starts at degree 3 because the `p·β` term of a
//! generating family supplies the linear monomials for free.
//!
//! The verdict is rigorous for the catalogued quasi-homogeneous normal forms
//! (finitely determined well below the default cutoff). For arbitrary input
//! the cutoff is reported, and an `Inconclusive` escape hatch fires when the
//! lowest jet of `G₀` sits too close to the truncation degree for the answer
//! to mean anything.

use rayon::prelude::*;

use crate::construct::GeneratingFamily;
use crate::error::{Error, Result};
use crate::poly::MultiIndex;
use crate::{rint, QPoly, Rat};
use num_traits::{One, Zero};

/// Default truncation degree for versality checks.
pub const DEFAULT_CUTOFF: u32 = 9;

/// A deformation of an odd germ: the central fiber `G₀` and the initial
/// velocities of the deformation parameters, all polynomials in the fiber
/// variables `β_1..β_n`.
#[derive(Clone, Debug)]
pub struct OddDeformation {
    pub g0: QPoly,
    pub directions: Vec<QPoly>,
    pub n: usize,
    pub cutoff: u32,
}

impl OddDeformation {
    pub fn new(g0: QPoly, directions: Vec<QPoly>, cutoff: u32) -> Result<Self> {
        let n = g0.nvars();
        ensure_odd(&g0, "G0")?;
        for (l, d) in directions.iter().enumerate() {
            if d.nvars() != n {
                return Err(Error::NvarsMismatch(n, d.nvars()));
            }
            ensure_odd(d, &format!("direction {l}"))?;
        }
        if cutoff < 3 || cutoff.is_multiple_of(2) {
            return Err(Error::BadInput(format!(
                "cutoff must be an odd degree >= 3, got {cutoff}"
            )));
        }
        Ok(OddDeformation {
            g0,
            directions,
            n,
            cutoff,
        })
    }
}

/// Which odd monomials the deformation must reach.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every odd monomial of degree `1..=cutoff`.
    Full,
    /// Degrees `3..=cutoff`; the linear monomials come from the `p·β` term.
    OnShell,
}

/// Result of a versality check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Versal,
    NotVersal { missing: Vec<String> },
    Inconclusive { cutoff: u32 },
}

impl Verdict {
    pub fn is_versal(&self) -> bool {
        matches!(self, Verdict::Versal)
    }
}

/// The report shape shared by library consumers and the CLI.
pub fn verdict_to_json(v: &Verdict, cutoff: u32) -> serde_json::Value {
    let (name, missing) = match v {
        Verdict::Versal => ("versal", Vec::new()),
        Verdict::NotVersal { missing } => ("not_versal", missing.clone()),
        Verdict::Inconclusive { .. } => ("inconclusive", Vec::new()),
    };
    serde_json::json!({
        "verdict": name,
        "missing": missing,
        "cutoff": cutoff,
    })
}

fn ensure_odd(p: &QPoly, what: &str) -> Result<()> {
    let all: Vec<usize> = (0..p.nvars()).collect();
    let (even, _) = p.parity_split(&all);
    if !even.is_zero() {
        return Err(Error::NotOdd(format!(
            "{what} contains even-degree terms: {even}"
        )));
    }
    Ok(())
}

/// All monomials of odd total degree `<= cutoff` in `n` variables, in
/// increasing graded-lex order. These index the matrix columns everywhere in
/// this module.
pub fn odd_monomials(n: usize, cutoff: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut d = 1;
    while d <= cutoff {
        out.extend(monomials_of_degree(n, d));
        d += 2;
    }
    out.sort();
    out
}

fn monomials_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    fill_degree(&mut exps, 0, d, &mut out);
    out
}

fn fill_degree(exps: &mut Vec<u32>, var: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if var + 1 == exps.len() {
        exps[var] = remaining;
        out.push(MultiIndex::new(exps.clone()));
        exps[var] = 0;
        return;
    }
    for e in 0..=remaining {
        exps[var] = e;
        fill_degree(exps, var + 1, remaining - e, out);
    }
    exps[var] = 0;
}

/// Human-readable monomial label, e.g. `b1^1 b2^2`.
pub fn monomial_name(m: &MultiIndex) -> String {
    let parts: Vec<String> = (0..m.nvars())
        .filter(|&v| m.exp(v) > 0)
        .map(|v| format!("b{}^{}", v + 1, m.exp(v)))
        .collect();
    parts.join(" ")
}

/// Coefficient rows, over the odd-monomial column basis, of the tangent
/// module generators `e · β_j · ∂G₀/∂β_i` for every even monomial `e` that
/// keeps the product within the cutoff.
pub fn tangent_module_basis(g0: &QPoly, cutoff: u32) -> Result<Vec<Vec<Rat>>> {
    ensure_odd(g0, "G0")?;
    let n = g0.nvars();
    let columns = odd_monomials(n, cutoff);
    let generators = tangent_generators(g0, cutoff);
    let rows: Vec<Vec<Vec<Rat>>> = generators
        .par_iter()
        .map(|gen| {
            let low = gen.low_degree().expect("generators are nonzero");
            let mut rows = Vec::new();
            let mut d = 0;
            while low + d <= cutoff {
                for e in monomials_of_degree(n, d) {
                    let row_poly = gen * &QPoly::monomial(e, Rat::one());
                    let row = vectorize(&row_poly, &columns, cutoff);
                    if row.iter().any(|c| !c.is_zero()) {
                        rows.push(row);
                    }
                }
                d += 2;
            }
            rows
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn tangent_generators(g0: &QPoly, cutoff: u32) -> Vec<QPoly> {
    let n = g0.nvars();
    let mut gens = Vec::new();
    for i in 0..n {
        let di = g0.differentiate(i, 1);
        if di.is_zero() {
            continue;
        }
        for j in 0..n {
            let gen = (&di * &QPoly::var(n, j)).truncated(cutoff);
            if !gen.is_zero() {
                gens.push(gen);
            }
        }
    }
    gens
}

fn vectorize(p: &QPoly, columns: &[MultiIndex], cutoff: u32) -> Vec<Rat> {
    let mut row = vec![Rat::zero(); columns.len()];
    for (e, c) in p.terms() {
        if e.degree() > cutoff {
            continue;
        }
        let idx = columns
            .binary_search(e)
            .expect("odd polynomial term indexes an odd monomial column");
        row[idx] = c.clone();
    }
    row
}

/// Reduced row echelon form in place; returns the pivot column of each
/// surviving row. Pivoting is deterministic: columns are visited in graded-lex
/// order and the first row with a nonzero entry wins.
fn rref(rows: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut next = 0usize;
    for col in 0..cols {
        let Some(r) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, r);
        let inv = rows[next][col].clone();
        for cell in rows[next][col..].iter_mut() {
            *cell = &*cell / &inv;
        }
        let pivot_row = rows[next].clone();
        for (r2, row) in rows.iter_mut().enumerate() {
            if r2 == next || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for c in col..cols {
                let reduced = &row[c] - &(&factor * &pivot_row[c]);
                row[c] = reduced;
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    pivots
}

/// Is the unit vector of `col` in the row space described by (`rows`,
/// `pivots`) in reduced echelon form?
fn unit_in_row_space(rows: &[Vec<Rat>], pivots: &[usize], col: usize, cols: usize) -> bool {
    let mut v = vec![Rat::zero(); cols];
    v[col] = Rat::one();
    for (row, &p) in rows.iter().zip(pivots) {
        if v[p].is_zero() {
            continue;
        }
        let factor = v[p].clone();
        for c in 0..cols {
            let reduced = &v[c] - &(&factor * &row[c]);
            v[c] = reduced;
        }
    }
    v.iter().all(Rat::is_zero)
}

/// Decide versality of an odd deformation by truncated row reduction.
pub fn is_versal(d: &OddDeformation, mode: Mode) -> Result<Verdict> {
    ensure_odd(&d.g0, "G0")?;
    for (l, dir) in d.directions.iter().enumerate() {
        ensure_odd(dir, &format!("direction {l}"))?;
    }
    let cutoff = d.cutoff;
    match d.g0.low_degree() {
        None => return Ok(Verdict::Inconclusive { cutoff }),
        Some(low) if low > cutoff - 2 => return Ok(Verdict::Inconclusive { cutoff }),
        Some(_) => {}
    }

    let columns = odd_monomials(d.n, cutoff);
    let mut rows = tangent_module_basis(&d.g0, cutoff)?;
    for dir in &d.directions {
        let row = vectorize(dir, &columns, cutoff);
        if row.iter().any(|c| !c.is_zero()) {
            rows.push(row);
        }
    }
    let pivots = rref(&mut rows);

    let min_degree = match mode {
        Mode::Full => 1,
        Mode::OnShell => 3,
    };
    let mut missing = Vec::new();
    for (idx, m) in columns.iter().enumerate() {
        if m.degree() < min_degree {
            continue;
        }
        if !unit_in_row_space(&rows, &pivots, idx, columns.len()) {
            missing.push(monomial_name(m));
        }
    }
    if missing.is_empty() {
        Ok(Verdict::Versal)
    } else {
        Ok(Verdict::NotVersal { missing })
    }
}

/// Infinitesimal stability of a generating family: restrict to the shell,
/// read off the central fiber `G₀ = g(0,·)` and the parameter velocities
/// `∂g/∂q_l` at the base point, and test versality in on-shell mode. The
/// `p`-parameters contribute the linear monomials `β_l` and are included as
/// directions for robustness against non-normalized input.
pub fn stability_check(fam: &GeneratingFamily, cutoff: u32) -> Result<Verdict> {
    let n = fam.n();
    let g = fam.on_shell_part();
    // on_shell_part lays out variables as (q_1..q_n, b_1..b_n)
    let restrict_to_beta = |p: &QPoly| -> Result<QPoly> {
        let images: Vec<QPoly> = (0..2 * n)
            .map(|v| {
                if v < n {
                    QPoly::zero(n)
                } else {
                    QPoly::var(n, v - n)
                }
            })
            .collect();
        p.substitute(&images)
    };
    let g0 = restrict_to_beta(&g)?;
    let mut directions = Vec::with_capacity(2 * n);
    for l in 0..n {
        let dir = restrict_to_beta(&g.differentiate(l, 1))?;
        if !dir.is_zero() {
            directions.push(dir);
        }
    }
    for l in 0..n {
        directions.push(QPoly::var(n, l));
    }
    let d = OddDeformation::new(g0, directions, cutoff)?;
    is_versal(&d, Mode::OnShell)
}

// ---------------------------------------------------------------------------
// Normal-form catalog
// ---------------------------------------------------------------------------

/// A catalogued stable normal form together with its miniversal deformation
/// directions.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub label: String,
    pub n: usize,
    pub normal_form: QPoly,
    pub directions: Vec<QPoly>,
}

impl CatalogEntry {
    pub fn deformation(&self, cutoff: u32) -> Result<OddDeformation> {
        OddDeformation::new(self.normal_form.clone(), self.directions.clone(), cutoff)
    }
}

fn t(n: usize, v: usize) -> QPoly {
    QPoly::var(n, v)
}

/// `A_{2k/2}`: `t^{2k+1}` with directions `t^{2j-1}`, `j = 1..k`.
pub fn catalog_a(k: u32) -> CatalogEntry {
    assert!(k >= 1, "A-series starts at k = 1");
    CatalogEntry {
        label: format!("A_{{{}/2}}", 2 * k),
        n: 1,
        normal_form: t(1, 0).pow(2 * k + 1),
        directions: (1..=k).map(|j| t(1, 0).pow(2 * j - 1)).collect(),
    }
}

/// `D_{2k/2}±`: `t₁²t₂ ± t₂^{2k-1}` with directions `t₁` and `t₂^{2i-3}`,
/// `i = 2..k`.
pub fn catalog_d(k: u32, sign: i64) -> CatalogEntry {
    assert!(k >= 2, "D-series starts at k = 2");
    assert!(sign == 1 || sign == -1);
    let nf = &(&t(2, 0).pow(2) * &t(2, 1)) + &t(2, 1).pow(2 * k - 1).scale(&rint(sign));
    let mut directions = vec![t(2, 0)];
    directions.extend((2..=k).map(|i| t(2, 1).pow(2 * i - 3)));
    CatalogEntry {
        label: format!("D_{{{}/2}}{}", 2 * k, if sign > 0 { "+" } else { "-" }),
        n: 2,
        normal_form: nf,
        directions,
    }
}

/// `E_{8/2}`: `t₁³ + t₂⁵` with directions `t₁, t₂, t₁t₂², t₂³`.
pub fn catalog_e8() -> CatalogEntry {
    CatalogEntry {
        label: "E_{8/2}".into(),
        n: 2,
        normal_form: &t(2, 0).pow(3) + &t(2, 1).pow(5),
        directions: vec![
            t(2, 0),
            t(2, 1),
            &t(2, 0) * &t(2, 1).pow(2),
            t(2, 1).pow(3),
        ],
    }
}

/// `J_{10/2}±`: `t₁³ ± t₁t₂⁴` with directions `t₁, t₂, t₁²t₂, t₁t₂², t₂³`.
pub fn catalog_j10(sign: i64) -> CatalogEntry {
    assert!(sign == 1 || sign == -1);
    CatalogEntry {
        label: format!("J_{{10/2}}{}", if sign > 0 { "+" } else { "-" }),
        n: 2,
        normal_form: &t(2, 0).pow(3) + &(&t(2, 0) * &t(2, 1).pow(4)).scale(&rint(sign)),
        directions: vec![
            t(2, 0),
            t(2, 1),
            &t(2, 0).pow(2) * &t(2, 1),
            &t(2, 0) * &t(2, 1).pow(2),
            t(2, 1).pow(3),
        ],
    }
}

/// `E_{12/2}`: `t₁³ + t₂⁷` with directions `t₁, t₂, t₁t₂², t₂³, t₁t₂⁴, t₂⁵`.
pub fn catalog_e12() -> CatalogEntry {
    CatalogEntry {
        label: "E_{12/2}".into(),
        n: 2,
        normal_form: &t(2, 0).pow(3) + &t(2, 1).pow(7),
        directions: vec![
            t(2, 0),
            t(2, 1),
            &t(2, 0) * &t(2, 1).pow(2),
            t(2, 1).pow(3),
            &t(2, 0) * &t(2, 1).pow(4),
            t(2, 1).pow(5),
        ],
    }
}

/// Every catalogued entry decidable at the default cutoff.
pub fn standard_catalog() -> Vec<CatalogEntry> {
    let mut entries = Vec::new();
    for k in 1..=3 {
        entries.push(catalog_a(k));
    }
    for k in 2..=4 {
        entries.push(catalog_d(k, 1));
        entries.push(catalog_d(k, -1));
    }
    entries.push(catalog_e8());
    entries.push(catalog_j10(1));
    entries.push(catalog_j10(-1));
    entries.push(catalog_e12());
    entries
}
