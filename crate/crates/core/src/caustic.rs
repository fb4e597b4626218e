//! Caustic extraction as polished point samples.
//!
//! For a generating family the momentum enters linearly, so the critical set
//! is parametrized by `(q,β)` with `p = ∇_β g(q,β)`, and the singular locus
//! is the zero set of `D(q,β) = det ∂²g/∂β²`. Samples of `{D = 0}` are found
//! on a grid (marching squares for curves, a sparse sign-change cell scan for
//! surfaces), polished by Newton steps along `∇D`, and pushed forward to the
//! caustic by `x = (q, ∇_β g)`, `z = g − β·∇_β g`.
//!
//! Because `g` is odd in `β`, its `β`-Hessian vanishes identically on the
//! shell `{β = 0}`: the shell is always part of the locus. For curves the
//! scalar `D` is odd in `β` and the sign scan picks the shell up by itself;
//! for surfaces `D` is even in `β` and may touch zero without crossing, so
//! the shell plane is emitted directly (as branch 0) and the scan hunts the
//! transverse branches.
//!
//! Parametric maps (closed-form surfaces in particular) are handled by
//! rank-drop detection instead: sign changes of `det Dx` along grid edges,
//! refined by bisection, with the smallest singular value of `Dx` as the
//! acceptance filter.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::construct::{GeneratingFamily, IasMap};
use crate::error::{Error, Result};
use crate::poly::Evaluator;
use crate::{FPoly, QPoly};

/// Residual bound a polished sample must meet.
pub const DEFAULT_TOL_POLISH: f64 = 1e-10;
/// Newton iteration budget per sample.
pub const DEFAULT_NEWTON_MAX: u32 = 30;
/// Rank-drop acceptance: smallest singular value of `Dx` must fall below
/// this for a parametric sample.
pub const DEFAULT_TOL_RANK: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct CausticConfig {
    pub tol_polish: f64,
    pub newton_max: u32,
    pub tol_rank: f64,
}

impl Default for CausticConfig {
    fn default() -> Self {
        CausticConfig {
            tol_polish: DEFAULT_TOL_POLISH,
            newton_max: DEFAULT_NEWTON_MAX,
            tol_rank: DEFAULT_TOL_RANK,
        }
    }
}

/// An axis-aligned box of parameters.
#[derive(Clone, Debug)]
pub struct Window {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::BadWindow(format!(
                "window needs matching nonempty bounds, got {} lows and {} highs",
                lo.len(),
                hi.len()
            )));
        }
        for (k, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::BadWindow(format!(
                    "axis {k} is empty or unbounded: [{a}, {b}]"
                )));
            }
        }
        Ok(Window { lo, hi })
    }

    /// The cube `[-half, half]^dim`.
    pub fn centered(half: f64, dim: usize) -> Result<Self> {
        Window::new(vec![-half; dim], vec![half; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    fn coord(&self, axis: usize, step: usize, res: usize) -> f64 {
        self.lo[axis] + (self.hi[axis] - self.lo[axis]) * (step as f64) / (res as f64)
    }
}

/// A polished point of the singular locus in `(q, β)` coordinates.
#[derive(Clone, Debug)]
pub struct LocusPoint {
    pub param: Vec<f64>,
    pub branch: usize,
    pub residual: f64,
}

/// Result of a singular-locus scan.
#[derive(Clone, Debug)]
pub struct Locus {
    pub n: usize,
    pub points: Vec<LocusPoint>,
    /// Seeds whose Newton polish failed to reach the tolerance.
    pub dropped: usize,
    /// `D ≡ 0`: every point of the window is singular and no discrete
    /// sampling is meaningful.
    pub degenerate: bool,
}

/// A sample of the caustic: the image point, its contact lift, the preimage
/// parameters, a connectivity label, and re-evaluated residuals.
///
/// Family samples report `|∂G/∂β|` and `|det ∂²g/∂β²|`; parametric samples
/// report the smallest singular value of `Dx` and `|det Dx|`.
#[derive(Clone, Debug)]
pub struct CausticSample {
    pub x: Vec<f64>,
    pub z: f64,
    pub param: Vec<f64>,
    pub branch: usize,
    pub res_grad: f64,
    pub res_det: f64,
}

/// `det ∂²g/∂β²` of the on-shell family as an exact polynomial in `(q, β)`.
pub fn hessian_determinant(fam: &GeneratingFamily) -> Result<QPoly> {
    let n = fam.n();
    let g = fam.on_shell_part();
    match n {
        1 => Ok(g.differentiate(1, 2)),
        2 => {
            let h11 = g.differentiate(2, 2);
            let h22 = g.differentiate(3, 2);
            let h12 = g.differentiate(2, 1).differentiate(3, 1);
            Ok(&(&h11 * &h22) - &(&h12 * &h12))
        }
        _ => Err(Error::BadInput(format!(
            "singular locus sampling supports n = 1 or 2, got n = {n}"
        ))),
    }
}

/// Sample the zero set of `D(q,β)` over a `2n`-dimensional window.
pub fn singular_locus(
    fam: &GeneratingFamily,
    window: &Window,
    resolution: usize,
    cfg: &CausticConfig,
) -> Result<Locus> {
    let n = fam.n();
    if window.dim() != 2 * n {
        return Err(Error::BadWindow(format!(
            "window has {} axes, expected {} for (q, beta)",
            window.dim(),
            2 * n
        )));
    }
    if resolution < 2 {
        return Err(Error::BadInput(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let det = hessian_determinant(fam)?;
    if det.is_zero() {
        return Ok(Locus {
            n,
            points: Vec::new(),
            dropped: 0,
            degenerate: true,
        });
    }
    let detf = det.to_f64();
    match n {
        1 => locus_curve(&detf, window, resolution, cfg),
        2 => locus_surface(&detf, window, resolution, cfg),
        _ => unreachable!("guarded by hessian_determinant"),
    }
}

/// Gradient-direction Newton for a scalar equation: steps `x ← x − D ∇D/|∇D|²`
/// until the residual stops improving. Returns the best point if it meets the
/// tolerance.
fn polish(
    seed: Vec<f64>,
    d: &Evaluator<f64>,
    grad: &[Evaluator<f64>],
    cfg: &CausticConfig,
) -> Option<(Vec<f64>, f64)> {
    let mut cur = seed;
    let mut best = cur.clone();
    let mut best_abs = d.eval(&cur).abs();
    for _ in 0..cfg.newton_max {
        if best_abs == 0.0 {
            break;
        }
        let val = d.eval(&cur);
        let g: Vec<f64> = grad.iter().map(|e| e.eval(&cur)).collect();
        let g2: f64 = g.iter().map(|v| v * v).sum();
        if g2 == 0.0 || !g2.is_finite() {
            break;
        }
        for (c, gk) in cur.iter_mut().zip(&g) {
            *c -= val * gk / g2;
        }
        let now = d.eval(&cur).abs();
        if now < best_abs {
            best_abs = now;
            best.copy_from_slice(&cur);
        } else {
            break;
        }
    }
    (best_abs < cfg.tol_polish).then_some((best, best_abs))
}

fn positive(v: f64) -> bool {
    v >= 0.0
}

// ---------------------------------------------------------------------------
// n = 1: marching squares over (q, β)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

fn locus_curve(
    det: &FPoly,
    window: &Window,
    res: usize,
    cfg: &CausticConfig,
) -> Result<Locus> {
    let eval = Evaluator::new(det);
    let grad = [
        Evaluator::new(&det.differentiate(0, 1)),
        Evaluator::new(&det.differentiate(1, 1)),
    ];
    let nodes = res + 1;
    let values: Vec<f64> = (0..nodes * nodes)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nodes, idx % nodes);
            eval.eval(&[window.coord(0, i, res), window.coord(1, j, res)])
        })
        .collect();
    let at = |i: usize, j: usize| values[i * nodes + j];

    // Edge crossings, linearly interpolated.
    let mut order: Vec<Edge> = Vec::new();
    let mut seeds: HashMap<Edge, Vec<f64>> = HashMap::new();
    for i in 0..nodes {
        for j in 0..nodes {
            let (v0, q0, b0) = (at(i, j), window.coord(0, i, res), window.coord(1, j, res));
            if i + 1 < nodes && positive(v0) != positive(at(i + 1, j)) {
                let t = zero_fraction(v0, at(i + 1, j));
                let q1 = window.coord(0, i + 1, res);
                seeds.insert(Edge::H(i, j), vec![q0 + t * (q1 - q0), b0]);
                order.push(Edge::H(i, j));
            }
            if j + 1 < nodes && positive(v0) != positive(at(i, j + 1)) {
                let t = zero_fraction(v0, at(i, j + 1));
                let b1 = window.coord(1, j + 1, res);
                seeds.insert(Edge::V(i, j), vec![q0, b0 + t * (b1 - b0)]);
                order.push(Edge::V(i, j));
            }
        }
    }

    // Contour connectivity: union crossings paired by each cell.
    let index: HashMap<Edge, usize> = order.iter().enumerate().map(|(k, e)| (*e, k)).collect();
    let mut uf = UnionFind::new(order.len());
    for i in 0..res {
        for j in 0..res {
            let cell = [
                Edge::H(i, j),
                Edge::V(i + 1, j),
                Edge::H(i, j + 1),
                Edge::V(i, j),
            ];
            let hits: Vec<usize> = cell
                .iter()
                .filter_map(|e| index.get(e).copied())
                .collect();
            match hits.len() {
                2 => uf.union(hits[0], hits[1]),
                4 => {
                    // Saddle cell: disambiguate with the center value.
                    let center = [
                        0.5 * (window.coord(0, i, res) + window.coord(0, i + 1, res)),
                        0.5 * (window.coord(1, j, res) + window.coord(1, j + 1, res)),
                    ];
                    let corner = positive(at(i, j));
                    let (a, b, c, d) = (
                        index[&cell[0]],
                        index[&cell[1]],
                        index[&cell[2]],
                        index[&cell[3]],
                    );
                    if positive(eval.eval(&center)) == corner {
                        // separatrices hug the off-corner vertices
                        uf.union(a, b);
                        uf.union(c, d);
                    } else {
                        uf.union(a, d);
                        uf.union(b, c);
                    }
                }
                _ => {}
            }
        }
    }
    let branch_of = uf.labels();

    let mut points = Vec::new();
    let mut dropped = 0usize;
    for (k, e) in order.iter().enumerate() {
        match polish(seeds[e].clone(), &eval, &grad, cfg) {
            Some((param, residual)) => points.push(LocusPoint {
                param,
                branch: branch_of[k],
                residual,
            }),
            None => dropped += 1,
        }
    }
    Ok(Locus {
        n: 1,
        points,
        dropped,
        degenerate: false,
    })
}

fn zero_fraction(v0: f64, v1: f64) -> f64 {
    if v0 == v1 {
        0.5
    } else {
        (v0 / (v0 - v1)).clamp(0.0, 1.0)
    }
}

// ---------------------------------------------------------------------------
// n = 2: sparse sign-change scan over (q₁, q₂, β₁, β₂)
// ---------------------------------------------------------------------------

fn locus_surface(
    det: &FPoly,
    window: &Window,
    res: usize,
    cfg: &CausticConfig,
) -> Result<Locus> {
    let eval = Evaluator::new(det);
    let grad: Vec<Evaluator<f64>> = (0..4)
        .map(|v| Evaluator::new(&det.differentiate(v, 1)))
        .collect();
    let nodes = res + 1;

    let mut points = Vec::new();
    // The shell plane {β = 0} is singular identically; emit it as branch 0
    // whenever the window contains it.
    if window.lo[2] <= 0.0 && window.hi[2] >= 0.0 && window.lo[3] <= 0.0 && window.hi[3] >= 0.0 {
        for i in 0..nodes {
            for j in 0..nodes {
                let param = vec![
                    window.coord(0, i, res),
                    window.coord(1, j, res),
                    0.0,
                    0.0,
                ];
                let residual = eval.eval(&param).abs();
                if residual < cfg.tol_polish {
                    points.push(LocusPoint {
                        param,
                        branch: 0,
                        residual,
                    });
                }
            }
        }
    }

    // Rolling slabs of node values along the q₁ axis.
    let slab = |i0: usize| -> Vec<f64> {
        (0..nodes * nodes * nodes)
            .into_par_iter()
            .map(|rest| {
                let i1 = rest / (nodes * nodes);
                let i2 = (rest / nodes) % nodes;
                let i3 = rest % nodes;
                eval.eval(&[
                    window.coord(0, i0, res),
                    window.coord(1, i1, res),
                    window.coord(2, i2, res),
                    window.coord(3, i3, res),
                ])
            })
            .collect()
    };
    let flat = |i1: usize, i2: usize, i3: usize| (i1 * nodes + i2) * nodes + i3;

    let mut mixed: Vec<[usize; 4]> = Vec::new();
    let mut prev = slab(0);
    for i0 in 0..res {
        let next = slab(i0 + 1);
        for i1 in 0..res {
            for i2 in 0..res {
                for i3 in 0..res {
                    let mut pos = 0u32;
                    let mut neg = 0u32;
                    for (di1, di2, di3) in CORNERS {
                        let idx = flat(i1 + di1, i2 + di2, i3 + di3);
                        for s in [&prev, &next] {
                            if positive(s[idx]) {
                                pos += 1;
                            } else {
                                neg += 1;
                            }
                        }
                    }
                    if pos > 0 && neg > 0 {
                        mixed.push([i0, i1, i2, i3]);
                    }
                }
            }
        }
        prev = next;
    }

    // Branch connectivity over face-adjacent mixed cells; 0 is the shell.
    let cell_index: HashMap<[usize; 4], usize> =
        mixed.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let mut uf = UnionFind::new(mixed.len());
    for (k, c) in mixed.iter().enumerate() {
        for axis in 0..4 {
            if c[axis] == 0 {
                continue;
            }
            let mut nb = *c;
            nb[axis] -= 1;
            if let Some(&other) = cell_index.get(&nb) {
                uf.union(k, other);
            }
        }
    }
    let labels = uf.labels();

    let mut dropped = 0usize;
    for (k, c) in mixed.iter().enumerate() {
        let seed: Vec<f64> = (0..4)
            .map(|a| {
                0.5 * (window.coord(a, c[a], res) + window.coord(a, c[a] + 1, res))
            })
            .collect();
        match polish(seed, &eval, &grad, cfg) {
            Some((param, residual)) => points.push(LocusPoint {
                param,
                branch: labels[k] + 1,
                residual,
            }),
            None => dropped += 1,
        }
    }
    Ok(Locus {
        n: 2,
        points,
        dropped,
        degenerate: false,
    })
}

const CORNERS: [(usize, usize, usize); 8] = [
    (0, 0, 0),
    (0, 0, 1),
    (0, 1, 0),
    (0, 1, 1),
    (1, 0, 0),
    (1, 0, 1),
    (1, 1, 0),
    (1, 1, 1),
];

// ---------------------------------------------------------------------------
// Push-forward to the caustic
// ---------------------------------------------------------------------------

/// Map locus points to caustic samples. Every sample re-evaluates both
/// residuals (`|∂G/∂β|` on the full family and `|D|`); anything above the
/// polish tolerance is discarded. A degenerate locus yields no samples.
pub fn caustic_points(
    fam: &GeneratingFamily,
    locus: &Locus,
    cfg: &CausticConfig,
) -> Result<Vec<CausticSample>> {
    let n = fam.n();
    if locus.n != n {
        return Err(Error::NvarsMismatch(n, locus.n));
    }
    if locus.degenerate {
        return Ok(Vec::new());
    }
    let g = fam.on_shell_part().to_f64();
    let eval_g = Evaluator::new(&g);
    let grad_b: Vec<Evaluator<f64>> = (0..n)
        .map(|i| Evaluator::new(&g.differentiate(n + i, 1)))
        .collect();
    let det = Evaluator::new(&hessian_determinant(fam)?.to_f64());
    let vars = fam.vars();
    let big = fam.family_poly().to_f64();
    let family_grad: Vec<Evaluator<f64>> = (0..n)
        .map(|i| Evaluator::new(&big.differentiate(vars.beta(i), 1)))
        .collect();

    let mut out = Vec::with_capacity(locus.points.len());
    for pt in &locus.points {
        let q = &pt.param[..n];
        let beta = &pt.param[n..];
        let p: Vec<f64> = grad_b.iter().map(|e| e.eval(&pt.param)).collect();
        let z = eval_g.eval(&pt.param)
            - beta.iter().zip(&p).map(|(b, pk)| b * pk).sum::<f64>();
        let res_det = det.eval(&pt.param).abs();
        // Full-family point in (β, q, p) layout.
        let mut full = vec![0.0; 3 * n];
        for i in 0..n {
            full[vars.beta(i)] = beta[i];
            full[vars.q(i)] = q[i];
            full[vars.p(i)] = p[i];
        }
        let res_grad = family_grad
            .iter()
            .map(|e| e.eval(&full).abs())
            .fold(0.0, f64::max);
        if res_det >= cfg.tol_polish || res_grad >= cfg.tol_polish {
            continue;
        }
        let mut x = q.to_vec();
        x.extend_from_slice(&p);
        out.push(CausticSample {
            x,
            z,
            param: pt.param.clone(),
            branch: pt.branch,
            res_grad,
            res_det,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parametric (closed-form) caustics via rank drop of Dx
// ---------------------------------------------------------------------------

/// Detect the singular set of a parametrized immersion by sign changes of
/// `det Dx` along grid edges, refine each crossing by bisection, filter by the
/// smallest singular value of `Dx`, and emit `x`, `f` there.
pub fn parametric_caustic(
    map: &IasMap,
    window: &Window,
    resolution: usize,
    cfg: &CausticConfig,
) -> Result<Vec<CausticSample>> {
    let dim = map.domain_dim();
    if window.dim() != dim {
        return Err(Error::BadWindow(format!(
            "window has {} axes, expected {}",
            window.dim(),
            dim
        )));
    }
    if resolution < 2 {
        return Err(Error::BadInput(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let res = resolution;
    let nodes = res + 1;
    let total = nodes.pow(dim as u32);

    let jacobian = |p: &[f64]| -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        let mut hi = p.to_vec();
        let mut lo = p.to_vec();
        for k in 0..dim {
            let h = 1e-6 * (1.0 + p[k].abs());
            hi[k] = p[k] + h;
            lo[k] = p[k] - h;
            let xp = map.eval_x(&hi);
            let xm = map.eval_x(&lo);
            for r in 0..dim {
                m[(r, k)] = (xp[r] - xm[r]) / (2.0 * h);
            }
            hi[k] = p[k];
            lo[k] = p[k];
        }
        m
    };
    let det_at = |p: &[f64]| jacobian(p).determinant();

    let decode = |idx: usize| -> Vec<usize> {
        let mut rest = idx;
        let mut out = vec![0usize; dim];
        for a in (0..dim).rev() {
            out[a] = rest % nodes;
            rest /= nodes;
        }
        out
    };
    let point_of = |steps: &[usize]| -> Vec<f64> {
        (0..dim).map(|a| window.coord(a, steps[a], res)).collect()
    };

    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| det_at(&point_of(&decode(idx))))
        .collect();

    // Edge crossings in deterministic (node, axis) order.
    let mut crossings: Vec<(usize, usize, Vec<f64>, f64, f64)> = Vec::new();
    let stride = |axis: usize| nodes.pow((dim - 1 - axis) as u32);
    for idx in 0..total {
        let steps = decode(idx);
        for axis in 0..dim {
            if steps[axis] + 1 >= nodes {
                continue;
            }
            let v0 = values[idx];
            let v1 = values[idx + stride(axis)];
            if positive(v0) == positive(v1) {
                continue;
            }
            let mut a = point_of(&steps);
            let mut b = a.clone();
            b[axis] = window.coord(axis, steps[axis] + 1, res);
            // Bisection on the edge.
            let mut fa = v0;
            for _ in 0..60 {
                let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
                let fm = det_at(&mid);
                if positive(fm) == positive(fa) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            let point: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            let jac = jacobian(&point);
            let det = jac.determinant().abs();
            let sigma_min = jac
                .svd(false, false)
                .singular_values
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if sigma_min < cfg.tol_rank {
                crossings.push((idx, axis, point, sigma_min, det));
            }
        }
    }

    // Branch connectivity: crossings meeting in a common grid cell join.
    let mut uf = UnionFind::new(crossings.len());
    let mut by_cell: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (k, (idx, axis, _, _, _)) in crossings.iter().enumerate() {
        let steps = decode(*idx);
        // Cells containing the edge: fix the edge axis, offset the others.
        let others: Vec<usize> = (0..dim).filter(|a| a != axis).collect();
        for mask in 0..(1usize << others.len()) {
            let mut cell = steps.clone();
            let mut ok = cell[*axis] < res;
            for (bit, &a) in others.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    if cell[a] == 0 {
                        ok = false;
                        break;
                    }
                    cell[a] -= 1;
                }
                if cell[a] >= res {
                    ok = false;
                    break;
                }
            }
            if ok {
                by_cell.entry(cell).or_default().push(k);
            }
        }
    }
    let mut cells: Vec<&Vec<usize>> = by_cell.values().collect();
    cells.sort();
    for members in cells {
        for w in members.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let labels = uf.labels();

    let samples = crossings
        .into_iter()
        .enumerate()
        .map(|(k, (_, _, param, sigma_min, det))| CausticSample {
            x: map.eval_x(&param),
            z: map.eval_f(&param),
            param,
            branch: labels[k],
            res_grad: sigma_min,
            res_det: det,
        })
        .collect();
    Ok(samples)
}

// ---------------------------------------------------------------------------

/// CSV dump: `branch, q…, beta…, x…, z, res_grad, res_det` with a header row.
/// Parametric samples write their chart coordinates into the `q`/`beta`
/// columns.
pub fn samples_to_csv(samples: &[CausticSample], n: usize) -> String {
    let mut out = String::from("branch");
    for i in 1..=n {
        out.push_str(&format!(",q{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",beta{i}"));
    }
    for i in 1..=2 * n {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",z,res_grad,res_det\n");
    for s in samples {
        out.push_str(&s.branch.to_string());
        for v in &s.param {
            out.push_str(&format!(",{v}"));
        }
        for v in &s.x {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(",{},{},{}\n", s.z, s.res_grad, s.res_det));
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Component labels numbered 0.. in order of first appearance.
    fn labels(&mut self) -> Vec<usize> {
        let len = self.parent.len();
        let mut map: HashMap<usize, usize> = HashMap::new();
        (0..len)
            .map(|k| {
                let root = self.find(k);
                let next = map.len();
                *map.entry(root).or_insert(next)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{gen_family, Builtin, Kind};
    use crate::germ::LagrangianGerm;
    use crate::{rat, Poly, Rat};

    fn builtin_map(b: Builtin, kind: Kind) -> IasMap {
        IasMap::builtin_map(b, kind)
    }

    fn family(s: QPoly, n: usize, kind: Kind) -> GeneratingFamily {
        let germ = LagrangianGerm::at_origin(n, s).unwrap();
        gen_family(&germ, kind)
    }

    #[test]
    fn quadratic_potential_is_degenerate() {
        let fam = family(Poly::var(1, 0).pow(2), 1, Kind::CenterChord);
        let window = Window::centered(1.0, 2).unwrap();
        let locus = singular_locus(&fam, &window, 16, &CausticConfig::default()).unwrap();
        assert!(locus.degenerate);
        assert!(locus.points.is_empty());
        let samples = caustic_points(&fam, &locus, &CausticConfig::default()).unwrap();
        assert!(samples.is_empty());
    }

    #[test]
    fn cubic_curve_caustic_is_the_shell() {
        let fam = family(Poly::var(1, 0).pow(3), 1, Kind::CenterChord);
        let window = Window::centered(1.0, 2).unwrap();
        let cfg = CausticConfig::default();
        let locus = singular_locus(&fam, &window, 64, &cfg).unwrap();
        assert!(!locus.degenerate);
        assert!(locus.points.len() > 30);
        assert_eq!(locus.dropped, 0);
        let samples = caustic_points(&fam, &locus, &cfg).unwrap();
        assert_eq!(samples.len(), locus.points.len());
        for s in &samples {
            // locus is β = 0, image is L = {(q, 3q²)} with z = 0
            assert!(s.param[1].abs() < 1e-9, "beta = {}", s.param[1]);
            assert!((s.x[1] - 3.0 * s.x[0] * s.x[0]).abs() < 1e-8);
            assert!(s.z.abs() < 1e-12);
            assert!(s.res_grad < 1e-10 && s.res_det < 1e-10);
        }
    }

    #[test]
    fn quintic_curve_caustic_has_both_branches() {
        // two branches: β = 0 and 3q + 30q² + 10β² = 0
        let s = &Poly::var(1, 0).pow(5) + &Poly::var(1, 0).pow(4).scale(&rat(1, 4));
        let fam = family(s, 1, Kind::CenterChord);
        let window = Window::new(vec![-0.15, -0.12], vec![0.05, 0.12]).unwrap();
        let cfg = CausticConfig::default();
        let locus = singular_locus(&fam, &window, 128, &cfg).unwrap();
        let samples = caustic_points(&fam, &locus, &cfg).unwrap();
        let (mut shell, mut oval) = (0usize, 0usize);
        for s in &samples {
            let (q, b) = (s.param[0], s.param[1]);
            if b.abs() < 1e-10 {
                shell += 1;
            } else {
                let implicit = 3.0 * q + 30.0 * q * q + 10.0 * b * b;
                assert!(
                    implicit.abs() < 1e-8,
                    "off both branches: q={q}, beta={b}, value={implicit}"
                );
                oval += 1;
            }
        }
        assert!(shell > 20, "shell samples: {shell}");
        assert!(oval > 20, "transverse samples: {oval}");
    }

    #[test]
    fn surface_locus_contains_shell_plane_and_cone() {
        // q₁²q₂ + q₂³: D = 12β₂² − 4β₁², a cone through the shell plane
        let q = |v: usize| Poly::<Rat>::var(2, v);
        let s = &(&q(0).pow(2) * &q(1)) + &q(1).pow(3);
        let fam = family(s, 2, Kind::CenterChord);
        let window = Window::centered(0.5, 4).unwrap();
        let cfg = CausticConfig::default();
        let locus = singular_locus(&fam, &window, 8, &cfg).unwrap();
        assert!(!locus.degenerate);
        let shell: Vec<_> = locus.points.iter().filter(|p| p.branch == 0).collect();
        let cone: Vec<_> = locus.points.iter().filter(|p| p.branch > 0).collect();
        assert_eq!(shell.len(), 81); // (res+1)² nodes
        assert!(!cone.is_empty());
        for p in &locus.points {
            assert!(p.residual < cfg.tol_polish);
        }
        let samples = caustic_points(&fam, &locus, &cfg).unwrap();
        assert_eq!(samples.len(), locus.points.len());
    }

    #[test]
    fn circle_parametric_caustic() {
        let cfg = CausticConfig::default();
        // center-chord: singular set u − v = kπ; even k maps to the unit
        // circle, odd k to the origin
        let map = builtin_map(Builtin::Circle, Kind::CenterChord);
        let window = Window::centered(3.3, 2).unwrap();
        let samples = parametric_caustic(&map, &window, 96, &cfg).unwrap();
        assert!(samples.len() > 100);
        let (mut on_circle, mut at_origin) = (0usize, 0usize);
        for s in &samples {
            let k = (s.param[0] - s.param[1]) / std::f64::consts::PI;
            assert!((k - k.round()).abs() < 1e-7, "u - v = {k}π");
            let r = (s.x[0] * s.x[0] + s.x[1] * s.x[1]).sqrt();
            if (k.round() as i64) % 2 == 0 {
                assert!((r - 1.0).abs() < 1e-6, "radius {r}");
                on_circle += 1;
            } else {
                assert!(r < 1e-6, "radius {r}");
                at_origin += 1;
            }
        }
        assert!(on_circle > 0 && at_origin > 0);

        // special: singular set t = 0, image on the unit circle
        let map = builtin_map(Builtin::Circle, Kind::Special);
        let window = Window::new(vec![-3.3, -1.0], vec![3.3, 1.0]).unwrap();
        let samples = parametric_caustic(&map, &window, 96, &cfg).unwrap();
        assert!(!samples.is_empty());
        for s in &samples {
            assert!(s.param[1].abs() < 1e-7, "t = {}", s.param[1]);
            let r = (s.x[0] * s.x[0] + s.x[1] * s.x[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-6);
            assert!(s.z.abs() < 1e-9);
        }
    }

    #[test]
    fn branch_labels_separate_parallel_lines() {
        let map = builtin_map(Builtin::Circle, Kind::CenterChord);
        let window = Window::centered(3.3, 2).unwrap();
        let samples =
            parametric_caustic(&map, &window, 96, &CausticConfig::default()).unwrap();
        let mut by_branch: HashMap<usize, Vec<f64>> = HashMap::new();
        for s in &samples {
            by_branch
                .entry(s.branch)
                .or_default()
                .push(s.param[0] - s.param[1]);
        }
        // u − v = kπ for k = −2..2 inside the window
        assert!(by_branch.len() >= 5, "{} branches", by_branch.len());
        for diffs in by_branch.values() {
            let k0 = (diffs[0] / std::f64::consts::PI).round();
            for d in diffs {
                assert_eq!((d / std::f64::consts::PI).round(), k0);
            }
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let samples = vec![CausticSample {
            x: vec![1.0, 2.0],
            z: 0.5,
            param: vec![0.25, 0.0],
            branch: 3,
            res_grad: 0.0,
            res_det: 1e-12,
        }];
        let csv = samples_to_csv(&samples, 1);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "branch,q1,beta1,x1,x2,z,res_grad,res_det"
        );
        assert_eq!(lines.next().unwrap(), "3,0.25,0,1,2,0.5,0,0.000000000001");
        assert!(lines.next().is_none());
    }

    #[test]
    fn window_validation() {
        assert!(Window::new(vec![], vec![]).is_err());
        assert!(Window::new(vec![0.0], vec![0.0]).is_err());
        assert!(Window::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Window::new(vec![0.0, f64::NAN], vec![1.0, 2.0]).is_err());
        let fam = family(Poly::var(1, 0).pow(3), 1, Kind::CenterChord);
        let w = Window::centered(1.0, 4).unwrap(); // wrong dimension
        assert!(singular_locus(&fam, &w, 8, &CausticConfig::default()).is_err());
    }
}
