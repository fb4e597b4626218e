//! Exact recognition of the stable odd singularity classes carried by a
//! germ's generating families at a point of `L`.
//!
//! Everything is decided from the jets of the (recentered, shear-normalized)
//! potential at the origin:
//!
//! * curves (`n = 1`): the third/fourth/fifth derivatives decide `A_{2/2}`
//!   vs `A_{4/2}`;
//! * surfaces (`n = 2`): the cubic discriminant `Δ` splits the `D_{4/2}^±`
//!   pair, and on the `Δ = 0` stratum the quintic/septic invariants
//!   `σ_{0,5}, σ_{0,7}` (or their tilded mirror branch) decide `D_{6/2}^±`,
//!   `D_{8/2}^±`, with a degenerate-cubic escape to `E_{8/2}`.
//!
//! One sign swap is kind-dependent: where `δ·σ₅ < 0` the center-chord family
//! carries `D_{6/2}+` and the special family `D_{6/2}−`, and conversely for
//! `δ·σ₅ > 0`. All other labels are shared by both kinds.
//!
//! The same decision tree runs in two modes behind a sign oracle: exact
//! rational signs (classification proper), or float signs with a zero
//! tolerance, where a quantity too close to zero yields an explicit
//! "sign uncertain" outcome instead of a silent choice.

use std::ops::Div;

use num_traits::{Signed, Zero};

use crate::construct::Kind;
use crate::error::{Error, Result};
use crate::germ::{JetTable, LagrangianGerm};
use crate::poly::Scalar;
use crate::Rat;

/// Zero tolerance used by the float-jet path when none is given.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-10;

/// Stable-class labels (plus the administrative outcomes).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    A22,
    A42,
    D42Plus,
    D42Minus,
    D62Plus,
    D62Minus,
    D82Plus,
    D82Minus,
    E82,
    Degenerate,
    NonSimple,
    Unrecognized,
}

impl ClassLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::A22 => "A_{2/2}",
            ClassLabel::A42 => "A_{4/2}",
            ClassLabel::D42Plus => "D_{4/2}+",
            ClassLabel::D42Minus => "D_{4/2}-",
            ClassLabel::D62Plus => "D_{6/2}+",
            ClassLabel::D62Minus => "D_{6/2}-",
            ClassLabel::D82Plus => "D_{8/2}+",
            ClassLabel::D82Minus => "D_{8/2}-",
            ClassLabel::E82 => "E_{8/2}",
            ClassLabel::Degenerate => "Degenerate",
            ClassLabel::NonSimple => "NonSimple",
            ClassLabel::Unrecognized => "Unrecognized",
        }
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The classifier invariants, each present only where defined (its branch
/// active and its denominator nonzero).
#[derive(Clone, Debug, PartialEq)]
pub struct Invariants<T> {
    pub delta: Option<T>,
    pub delta1: Option<T>,
    pub delta2: Option<T>,
    pub r1: Option<T>,
    pub r2: Option<T>,
    pub r1_tilde: Option<T>,
    pub r2_tilde: Option<T>,
    pub sigma05: Option<T>,
    pub sigma07: Option<T>,
    pub sigma50: Option<T>,
    pub sigma70: Option<T>,
}

impl<T> Default for Invariants<T> {
    fn default() -> Self {
        Invariants {
            delta: None,
            delta1: None,
            delta2: None,
            r1: None,
            r2: None,
            r1_tilde: None,
            r2_tilde: None,
            sigma05: None,
            sigma07: None,
            sigma50: None,
            sigma70: None,
        }
    }
}

impl<T: std::fmt::Display> Invariants<T> {
    /// Name/value pairs of the present entries, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |name: &'static str, v: &Option<T>| {
            if let Some(v) = v {
                out.push((name, v.to_string()));
            }
        };
        push("Delta", &self.delta);
        push("delta1", &self.delta1);
        push("delta2", &self.delta2);
        push("r1", &self.r1);
        push("r2", &self.r2);
        push("r1_tilde", &self.r1_tilde);
        push("r2_tilde", &self.r2_tilde);
        push("sigma05", &self.sigma05);
        push("sigma07", &self.sigma07);
        push("sigma50", &self.sigma50);
        push("sigma70", &self.sigma70);
        out
    }
}

/// A classification verdict: the label, which clause fired, and the
/// invariants computed on the way.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification<T> {
    pub label: ClassLabel,
    pub fired: String,
    pub invariants: Invariants<T>,
}

/// Outcome of the float-jet path.
#[derive(Clone, Debug, PartialEq)]
pub enum FloatOutcome {
    Decided(Classification<f64>),
    /// A consulted quantity was within tolerance of zero, so no class can be
    /// certified from float data.
    SignUncertain {
        quantity: &'static str,
        invariants: Invariants<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Sign {
    Neg,
    Zero,
    Pos,
}

/// Why the generic tree stopped without a verdict.
enum TreeFail {
    Uncertain(&'static str),
    Inconsistent(String),
}

fn exact_sign(x: &Rat) -> Option<Sign> {
    Some(if x.is_zero() {
        Sign::Zero
    } else if x.is_positive() {
        Sign::Pos
    } else {
        Sign::Neg
    })
}

fn float_sign(tol: f64) -> impl Fn(&f64) -> Option<Sign> {
    move |x: &f64| {
        if !x.is_finite() || x.abs() < tol {
            None
        } else if *x > 0.0 {
            Some(Sign::Pos)
        } else {
            Some(Sign::Neg)
        }
    }
}

fn pow_t<T: Scalar>(x: &T, k: u32) -> T {
    let mut acc = T::one();
    for _ in 0..k {
        acc = acc * x.clone();
    }
    acc
}

fn binom_t<T: Scalar>(n: u32, k: u32) -> T {
    T::from_u64(num_integer::binomial(n as u64, k as u64)).expect("small binomial fits")
}

// ---------------------------------------------------------------------------
// Invariant formulas
// ---------------------------------------------------------------------------

/// Cubic discriminant
/// `Δ = (3 S₁₂²S₂₁² − 4 S₀₃S₂₁³ − 4 S₁₂³S₃₀ − S₀₃²S₃₀² + 6 S₀₃S₁₂S₂₁S₃₀)/48`.
pub fn discriminant(j: &JetTable<Rat>) -> Rat {
    discriminant_t(j)
}

fn discriminant_t<T>(j: &JetTable<T>) -> T
where
    T: Scalar + Div<Output = T>,
{
    let s30 = j.d2(3, 0);
    let s21 = j.d2(2, 1);
    let s12 = j.d2(1, 2);
    let s03 = j.d2(0, 3);
    let term = |c: i64, parts: &[&T]| -> T {
        let mut acc = T::from_i64(c).expect("small integer");
        for p in parts {
            acc = acc * (*p).clone();
        }
        acc
    };
    let sum = term(3, &[&s12, &s12, &s21, &s21])
        + term(-4, &[&s03, &s21, &s21, &s21])
        + term(-4, &[&s12, &s12, &s12, &s30])
        + term(-1, &[&s03, &s03, &s30, &s30])
        + term(6, &[&s03, &s12, &s21, &s30]);
    sum * (T::one() / T::from_u32(48).expect("48 fits"))
}

/// Compute every invariant whose denominator is nonzero. Branch quantities
/// are only meaningful on the `Δ = 0` stratum but are well-defined wherever
/// the denominators allow; absence is encoded as `None`, never an error.
pub fn sigma_invariants(j: &JetTable<Rat>) -> Invariants<Rat> {
    sigma_invariants_t(j)
}

fn sigma_invariants_t<T>(j: &JetTable<T>) -> Invariants<T>
where
    T: Scalar + Div<Output = T>,
{
    let s30 = j.d2(3, 0);
    let s21 = j.d2(2, 1);
    let s12 = j.d2(1, 2);
    let s03 = j.d2(0, 3);

    let delta1 = s30.clone() * s12.clone() - s21.clone() * s21.clone();
    let delta2 = s03.clone() * s21.clone() - s12.clone() * s12.clone();
    let mut inv = Invariants::<T> {
        delta: Some(discriminant_t(j)),
        delta1: Some(delta1.clone()),
        delta2: Some(delta2.clone()),
        ..Invariants::default()
    };

    let two = T::from_u32(2).expect("2 fits");
    let four = T::from_u32(4).expect("4 fits");
    let three = T::from_u32(3).expect("3 fits");

    // Untilded branch (denominator δ₁):
    if !delta1.is_zero() {
        let r1 = (s21.clone() * s12.clone() - s30.clone() * s03.clone())
            / (two.clone() * delta1.clone());
        let r2 = (s30.clone() * s30.clone() * s03.clone()
            - four.clone() * s30.clone() * s21.clone() * s12.clone()
            + three.clone() * pow_t(&s21, 3))
            / delta1.clone();
        inv.r1 = Some(r1.clone());
        inv.r2 = Some(r2.clone());
        let den = s30.clone() * r1.clone() - r2.clone();
        if !den.is_zero() {
            inv.sigma05 = Some(sigma_sum(j, 5, &r1, false) / pow_t(&den, 5));
            inv.sigma07 = Some(sigma_sum(j, 7, &r1, false) / pow_t(&den, 7));
        }
    }

    // Tilded branch (denominator δ₂):
    if !delta2.is_zero() {
        let r1t = (s21.clone() * s12.clone() - s30.clone() * s03.clone())
            / (two * delta2.clone());
        let r2t = (s03.clone() * s03.clone() * s30.clone()
            - four * s03.clone() * s21.clone() * s12.clone()
            + three * pow_t(&s12, 3))
            / delta2.clone();
        inv.r1_tilde = Some(r1t.clone());
        inv.r2_tilde = Some(r2t.clone());
        let den = s03.clone() * r1t.clone() - r2t.clone();
        if !den.is_zero() {
            inv.sigma50 = Some(sigma_sum(j, 5, &r1t, true) / pow_t(&den, 5));
            inv.sigma70 = Some(sigma_sum(j, 7, &r1t, true) / pow_t(&den, 7));
        }
    }
    inv
}

/// Numerator `Σ_{k=0}^n C(n,k) S_{k,n−k} r^k` of the σ invariants; the tilded
/// branch reads the mirrored jets `S_{n−k,k}`.
fn sigma_sum<T: Scalar>(j: &JetTable<T>, n: u32, r: &T, tilded: bool) -> T {
    let mut acc = T::zero();
    for k in 0..=n {
        let jet = if tilded {
            j.d2(n - k, k)
        } else {
            j.d2(k, n - k)
        };
        if jet.is_zero() {
            continue;
        }
        acc = acc + binom_t::<T>(n, k) * jet * pow_t(r, k);
    }
    acc
}

// ---------------------------------------------------------------------------
// Decision trees
// ---------------------------------------------------------------------------

fn curve_tree<T>(
    j: &JetTable<T>,
    sign: &dyn Fn(&T) -> Option<Sign>,
) -> std::result::Result<Classification<T>, TreeFail>
where
    T: Scalar,
{
    let inv = Invariants::<T>::default();
    let s3 = sign(&j.d1(3)).ok_or(TreeFail::Uncertain("S'''(0)"))?;
    if s3 != Sign::Zero {
        return Ok(Classification {
            label: ClassLabel::A22,
            fired: "S''' != 0".into(),
            invariants: inv,
        });
    }
    let s4 = sign(&j.d1(4)).ok_or(TreeFail::Uncertain("S''''(0)"))?;
    let s5 = sign(&j.d1(5)).ok_or(TreeFail::Uncertain("S'''''(0)"))?;
    if s4 != Sign::Zero && s5 != Sign::Zero {
        return Ok(Classification {
            label: ClassLabel::A42,
            fired: "S''' = 0, S'''' != 0, S''''' != 0".into(),
            invariants: inv,
        });
    }
    if j.vanishes_through(3, 7) {
        return Ok(Classification {
            label: ClassLabel::Degenerate,
            fired: "jets of order 3..7 vanish".into(),
            invariants: inv,
        });
    }
    Ok(Classification {
        label: ClassLabel::Unrecognized,
        fired: "no clause matched".into(),
        invariants: inv,
    })
}

fn surface_tree<T>(
    j: &JetTable<T>,
    kind: Kind,
    sign: &dyn Fn(&T) -> Option<Sign>,
) -> std::result::Result<Classification<T>, TreeFail>
where
    T: Scalar + Div<Output = T>,
{
    let inv = sigma_invariants_t(j);
    let delta = inv.delta.clone().expect("always computed");
    match sign(&delta).ok_or(TreeFail::Uncertain("Delta"))? {
        Sign::Pos => {
            return Ok(Classification {
                label: ClassLabel::D42Minus,
                fired: "Delta > 0".into(),
                invariants: inv,
            })
        }
        Sign::Neg => {
            return Ok(Classification {
                label: ClassLabel::D42Plus,
                fired: "Delta < 0".into(),
                invariants: inv,
            })
        }
        Sign::Zero => {}
    }

    // Δ = 0 stratum. Consistency first: δ₁ ≤ 0 and δ₂ ≤ 0 must hold here.
    let d1_sign = sign(inv.delta1.as_ref().expect("computed")).ok_or(TreeFail::Uncertain("delta1"))?;
    let d2_sign = sign(inv.delta2.as_ref().expect("computed")).ok_or(TreeFail::Uncertain("delta2"))?;
    if d1_sign == Sign::Pos || d2_sign == Sign::Pos {
        return Err(TreeFail::Inconsistent(
            "Delta = 0 with a positive delta invariant (violates the cubic sign constraint)"
                .into(),
        ));
    }

    let route_a = sigma_route(
        j,
        kind,
        sign,
        d1_sign,
        inv.sigma05.as_ref(),
        inv.sigma07.as_ref(),
        &j.d2(3, 0),
        &j.d2(2, 1),
        RouteNames {
            delta: "delta1",
            sigma5: "sigma05",
            sigma7: "sigma07",
            lead: "S30",
            tilded: false,
        },
    )?;
    let route_b = sigma_route(
        j,
        kind,
        sign,
        d2_sign,
        inv.sigma50.as_ref(),
        inv.sigma70.as_ref(),
        &j.d2(0, 3),
        &j.d2(1, 2),
        RouteNames {
            delta: "delta2",
            sigma5: "sigma50",
            sigma7: "sigma70",
            lead: "S03",
            tilded: true,
        },
    )?;

    let verdict = match (route_a, route_b) {
        (Some(a), Some(b)) => {
            if a.0 != b.0 {
                return Err(TreeFail::Inconsistent(format!(
                    "branch disagreement: {} ({}) vs {} ({})",
                    a.0, a.1, b.0, b.1
                )));
            }
            Some(a)
        }
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };

    if let Some((label, fired)) = verdict {
        return Ok(Classification {
            label,
            fired,
            invariants: inv,
        });
    }
    if j.vanishes_through(3, 7) {
        return Ok(Classification {
            label: ClassLabel::Degenerate,
            fired: "jets of order 3..7 vanish".into(),
            invariants: inv,
        });
    }
    Ok(Classification {
        label: ClassLabel::Unrecognized,
        fired: "no clause matched".into(),
        invariants: inv,
    })
}

struct RouteNames {
    delta: &'static str,
    sigma5: &'static str,
    sigma7: &'static str,
    lead: &'static str,
    tilded: bool,
}

/// One witness branch of the `Δ = 0` subtree. `delta_sign` is the (already
/// certified) sign of this branch's δ; `lead`/`mixed` are the jets entering
/// the `δ = 0` quintic condition (`S₃₀`/`S₂₁` untilded, `S₀₃`/`S₁₂` tilded).
#[allow(clippy::too_many_arguments)]
fn sigma_route<T>(
    j: &JetTable<T>,
    kind: Kind,
    sign: &dyn Fn(&T) -> Option<Sign>,
    delta_sign: Sign,
    sigma5: Option<&T>,
    sigma7: Option<&T>,
    lead: &T,
    mixed: &T,
    names: RouteNames,
) -> std::result::Result<Option<(ClassLabel, String)>, TreeFail>
where
    T: Scalar + Div<Output = T>,
{
    match delta_sign {
        Sign::Pos => unreachable!("checked before routing"),
        Sign::Neg => {
            let Some(sigma5) = sigma5 else {
                // σ denominator vanished: this branch abstains.
                return Ok(None);
            };
            match sign(sigma5).ok_or(TreeFail::Uncertain(names.sigma5))? {
                // δ < 0 here, so δ·σ₅ < 0 ⟺ σ₅ > 0.
                Sign::Pos => {
                    let label = match kind {
                        Kind::CenterChord => ClassLabel::D62Plus,
                        Kind::Special => ClassLabel::D62Minus,
                    };
                    Ok(Some((label, format!("{}*{} < 0", names.delta, names.sigma5))))
                }
                Sign::Neg => {
                    let label = match kind {
                        Kind::CenterChord => ClassLabel::D62Minus,
                        Kind::Special => ClassLabel::D62Plus,
                    };
                    Ok(Some((label, format!("{}*{} > 0", names.delta, names.sigma5))))
                }
                Sign::Zero => {
                    let Some(sigma7) = sigma7 else {
                        return Ok(None);
                    };
                    match sign(sigma7).ok_or(TreeFail::Uncertain(names.sigma7))? {
                        Sign::Pos => Ok(Some((
                            ClassLabel::D82Plus,
                            format!(
                                "{} < 0, {} = 0, {} > 0",
                                names.delta, names.sigma5, names.sigma7
                            ),
                        ))),
                        Sign::Neg => Ok(Some((
                            ClassLabel::D82Minus,
                            format!(
                                "{} < 0, {} = 0, {} < 0",
                                names.delta, names.sigma5, names.sigma7
                            ),
                        ))),
                        Sign::Zero => Ok(None),
                    }
                }
            }
        }
        Sign::Zero => {
            // Degenerate cubic on this branch: the quintic transversality
            // condition recognizes E_{8/2}.
            if sign(lead).ok_or(TreeFail::Uncertain(names.lead))? == Sign::Zero {
                return Ok(None);
            }
            let mut sum = T::zero();
            for k in 0..=5u32 {
                let jet = if names.tilded {
                    j.d2(5 - k, k)
                } else {
                    j.d2(k, 5 - k)
                };
                if jet.is_zero() {
                    continue;
                }
                sum = sum
                    + binom_t::<T>(5, k)
                        * jet
                        * pow_t(&(-mixed.clone()), k)
                        * pow_t(lead, 5 - k);
            }
            match sign(&sum).ok_or(TreeFail::Uncertain("quintic sum"))? {
                Sign::Zero => Ok(None),
                _ => Ok(Some((
                    ClassLabel::E82,
                    format!("{} = 0, {} != 0, quintic sum != 0", names.delta, names.lead),
                ))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Classify a curve germ (`n = 1`) from its jets at the origin. Terms of
/// degree ≤ 2 never enter the decision, so prior normalization only matters
/// for reporting.
pub fn classify_curve(germ: &LagrangianGerm) -> Result<Classification<Rat>> {
    if germ.n() != 1 {
        return Err(Error::BadInput(format!(
            "classify_curve expects n = 1, got n = {}",
            germ.n()
        )));
    }
    let jets = germ.jets(7);
    curve_tree(&jets, &exact_sign).map_err(tree_fail_to_error)
}

/// Classify a surface germ (`n = 2`) from its jets at the origin.
pub fn classify_surface(germ: &LagrangianGerm, kind: Kind) -> Result<Classification<Rat>> {
    if germ.n() != 2 {
        return Err(Error::BadInput(format!(
            "classify_surface expects n = 2, got n = {}",
            germ.n()
        )));
    }
    let jets = germ.jets(7);
    surface_tree(&jets, kind, &exact_sign).map_err(tree_fail_to_error)
}

/// Full pipeline at an arbitrary rational point of the germ's chart:
/// recenter, shear-normalize, then classify. Dimensions ≥ 3 are outside the
/// stable range and report `NonSimple`.
pub fn classify_at(
    germ: &LagrangianGerm,
    point: &[Rat],
    kind: Kind,
) -> Result<Classification<Rat>> {
    if germ.n() >= 3 {
        return Ok(Classification {
            label: ClassLabel::NonSimple,
            fired: "n >= 3".into(),
            invariants: Invariants::default(),
        });
    }
    let (normalized, _shear) = germ.recenter(point)?.normalize_cubic();
    match germ.n() {
        1 => classify_curve(&normalized),
        2 => classify_surface(&normalized, kind),
        _ => unreachable!("n = 0 rejected at germ construction"),
    }
}

/// Float-jet pipeline at a numeric point. Any consulted quantity within
/// `tol` of zero aborts with [`FloatOutcome::SignUncertain`].
pub fn classify_at_float(
    germ: &LagrangianGerm,
    point: &[f64],
    kind: Kind,
    tol: f64,
) -> Result<FloatOutcome> {
    if germ.n() >= 3 {
        return Ok(FloatOutcome::Decided(Classification {
            label: ClassLabel::NonSimple,
            fired: "n >= 3".into(),
            invariants: Invariants::default(),
        }));
    }
    let jets = germ.float_jets(point, 7)?;
    let sign = float_sign(tol);
    let outcome = match germ.n() {
        1 => curve_tree(&jets, &sign),
        2 => surface_tree(&jets, kind, &sign),
        _ => unreachable!(),
    };
    match outcome {
        Ok(c) => Ok(FloatOutcome::Decided(c)),
        Err(TreeFail::Uncertain(quantity)) => Ok(FloatOutcome::SignUncertain {
            quantity,
            invariants: match germ.n() {
                2 => sigma_invariants_t(&jets),
                _ => Invariants::default(),
            },
        }),
        Err(TreeFail::Inconsistent(msg)) => Err(Error::Internal(msg)),
    }
}

fn tree_fail_to_error(f: TreeFail) -> Error {
    match f {
        TreeFail::Uncertain(q) => Error::Internal(format!(
            "exact sign oracle reported uncertainty for {q}"
        )),
        TreeFail::Inconsistent(msg) => Error::Internal(msg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rint, Poly, QPoly};

    fn var(n: usize, v: usize) -> QPoly {
        Poly::var(n, v)
    }

    fn germ(n: usize, s: QPoly) -> LagrangianGerm {
        LagrangianGerm::at_origin(n, s).unwrap()
    }

    /// q1^2 q2 + sign * q2^3
    fn cubic_surface(sgn: i64) -> LagrangianGerm {
        germ(
            2,
            &(&var(2, 0).pow(2) * &var(2, 1)) + &var(2, 1).pow(3).scale(&rint(sgn)),
        )
    }

    #[test]
    fn discriminant_reference_values() {
        assert_eq!(discriminant(&cubic_surface(1).jets(7)), rint(-4));
        assert_eq!(discriminant(&cubic_surface(-1).jets(7)), rint(4));
        // only S30 nonzero → every Δ term vanishes
        assert_eq!(discriminant(&germ(2, var(2, 0).pow(3)).jets(7)), rint(0));
    }

    #[test]
    fn sigma_reference_values() {
        // S = q1² q2 + q2⁵ + ¼ q2⁴
        let s = &(&(&var(2, 0).pow(2) * &var(2, 1)) + &var(2, 1).pow(5))
            + &var(2, 1).pow(4).scale(&rat(1, 4));
        let inv = sigma_invariants(&germ(2, s).jets(7));
        assert_eq!(inv.delta1, Some(rint(-4)));
        assert_eq!(inv.delta2, Some(rint(0)));
        assert_eq!(inv.r1, Some(rint(0)));
        assert_eq!(inv.r2, Some(rint(-6)));
        assert_eq!(inv.sigma05, Some(rat(5, 324))); // 120 / 6^5
        // tilded branch absent (δ₂ = 0)
        assert_eq!(inv.r1_tilde, None);
        assert_eq!(inv.sigma50, None);

        // degree-5 jets vanish → σ₀₅ = 0
        let inv = sigma_invariants(&cubic_surface(1).jets(7));
        assert_eq!(inv.sigma05, Some(rint(0)));
    }

    #[test]
    fn curve_classes() {
        let c = classify_curve(&germ(1, var(1, 0).pow(3))).unwrap();
        assert_eq!(c.label, ClassLabel::A22);

        let s = &var(1, 0).pow(5) + &var(1, 0).pow(4).scale(&rat(1, 4));
        let c = classify_curve(&germ(1, s)).unwrap();
        assert_eq!(c.label, ClassLabel::A42);

        // S⁽⁴⁾ = 0 fails the second clause
        let c = classify_curve(&germ(1, var(1, 0).pow(5))).unwrap();
        assert_eq!(c.label, ClassLabel::Unrecognized);

        let c = classify_curve(&germ(1, var(1, 0).pow(2))).unwrap();
        assert_eq!(c.label, ClassLabel::Degenerate);
    }

    #[test]
    fn surface_d4_pair() {
        for kind in [Kind::CenterChord, Kind::Special] {
            let c = classify_surface(&cubic_surface(1), kind).unwrap();
            assert_eq!(c.label, ClassLabel::D42Plus, "{kind}");
            assert_eq!(c.fired, "Delta < 0");
            let c = classify_surface(&cubic_surface(-1), kind).unwrap();
            assert_eq!(c.label, ClassLabel::D42Minus, "{kind}");
        }
    }

    #[test]
    fn surface_d6_swaps_with_kind() {
        // S = q1² q2 ± q2⁵ + ¼ q2⁴
        for sgn in [1i64, -1] {
            let s = &(&(&var(2, 0).pow(2) * &var(2, 1))
                + &var(2, 1).pow(5).scale(&rint(sgn)))
                + &var(2, 1).pow(4).scale(&rat(1, 4));
            let g = germ(2, s);
            let cc = classify_surface(&g, Kind::CenterChord).unwrap();
            let sp = classify_surface(&g, Kind::Special).unwrap();
            if sgn > 0 {
                assert_eq!(cc.label, ClassLabel::D62Plus);
                assert_eq!(sp.label, ClassLabel::D62Minus);
            } else {
                assert_eq!(cc.label, ClassLabel::D62Minus);
                assert_eq!(sp.label, ClassLabel::D62Plus);
            }
        }
    }

    #[test]
    fn mirrored_germ_routes_through_tilded_branch() {
        // Swapping q1 and q2 is a linear symplectic change, so the mirrored
        // germ must carry the same labels, now decided by the δ₂ branch.
        let plain = &(&var(2, 0).pow(2) * &var(2, 1)) + &var(2, 1).pow(5);
        let mirrored = &(&var(2, 0) * &var(2, 1).pow(2)) + &var(2, 0).pow(5);
        for kind in [Kind::CenterChord, Kind::Special] {
            let a = classify_surface(&germ(2, plain.clone()), kind).unwrap();
            let b = classify_surface(&germ(2, mirrored.clone()), kind).unwrap();
            assert_eq!(a.label, b.label, "{kind}");
            assert!(a.fired.contains("sigma05"));
            assert!(b.fired.contains("sigma50"));
            assert_eq!(b.invariants.delta1, Some(rint(0)));
            assert_eq!(b.invariants.delta2, Some(rint(-4)));
            assert_eq!(b.invariants.sigma50, Some(rat(5, 324)));
        }
    }

    #[test]
    fn surface_d8_pair() {
        // S = q1² q2 ± q2⁷ + q1 q2³ + ⅙ q2⁶
        for sgn in [1i64, -1] {
            let s = &(&(&(&var(2, 0).pow(2) * &var(2, 1))
                + &var(2, 1).pow(7).scale(&rint(sgn)))
                + &(&var(2, 0) * &var(2, 1).pow(3)))
                + &var(2, 1).pow(6).scale(&rat(1, 6));
            let g = germ(2, s);
            for kind in [Kind::CenterChord, Kind::Special] {
                let c = classify_surface(&g, kind).unwrap();
                let want = if sgn > 0 {
                    ClassLabel::D82Plus
                } else {
                    ClassLabel::D82Minus
                };
                assert_eq!(c.label, want, "sign {sgn} kind {kind}");
                assert_eq!(c.invariants.sigma05, Some(rint(0)));
                assert_eq!(c.invariants.sigma07, Some(rat(35 * sgn, 1944)));
            }
        }
    }

    #[test]
    fn surface_e8() {
        // S = q1³ + q2⁵ + q1 q2³
        let s = &(&var(2, 0).pow(3) + &var(2, 1).pow(5))
            + &(&var(2, 0) * &var(2, 1).pow(3));
        let g = germ(2, s);
        for kind in [Kind::CenterChord, Kind::Special] {
            let c = classify_surface(&g, kind).unwrap();
            assert_eq!(c.label, ClassLabel::E82);
            assert!(c.fired.contains("quintic sum"));
        }
    }

    #[test]
    fn degenerate_and_nonsimple() {
        let g = germ(2, &var(2, 0).pow(2) + &(&var(2, 0) * &var(2, 1)));
        let c = classify_at(&g, &[rint(0), rint(0)], Kind::CenterChord).unwrap();
        assert_eq!(c.label, ClassLabel::Degenerate);

        let g3 = germ(3, var(3, 0).pow(3));
        let c = classify_at(&g3, &[rint(0), rint(0), rint(0)], Kind::Special).unwrap();
        assert_eq!(c.label, ClassLabel::NonSimple);
    }

    #[test]
    fn classify_at_recenters_first() {
        // S = q⁴/4: at the origin S''' = 0 (degenerate direction), but at
        // q0 = 1 the recentered germ has S''' = 6 ≠ 0 → A_{2/2}.
        let g = germ(1, var(1, 0).pow(4).scale(&rat(1, 4)));
        let c0 = classify_at(&g, &[rint(0)], Kind::CenterChord).unwrap();
        assert_eq!(c0.label, ClassLabel::Unrecognized); // S⁽⁴⁾=6≠0 but S⁽⁵⁾=0
        let c1 = classify_at(&g, &[rint(1)], Kind::CenterChord).unwrap();
        assert_eq!(c1.label, ClassLabel::A22);
    }

    #[test]
    fn quadratic_invariance() {
        let base = &(&var(2, 0).pow(2) * &var(2, 1)) + &var(2, 1).pow(3);
        let noise = &(&var(2, 0) * &var(2, 1)).scale(&rat(7, 2)) + &var(2, 0).pow(2).scale(&rint(-3));
        let g1 = germ(2, base.clone());
        let g2 = germ(2, &base + &noise);
        for kind in [Kind::CenterChord, Kind::Special] {
            let a = classify_at(&g1, &[rint(0), rint(0)], kind).unwrap();
            let b = classify_at(&g2, &[rint(0), rint(0)], kind).unwrap();
            assert_eq!(a.label, b.label);
            assert_eq!(a.invariants, b.invariants);
        }
    }

    #[test]
    fn scaling_covariance() {
        // classify(S(λq)) = classify(S(q)) for rational λ ≠ 0
        let cases: Vec<QPoly> = vec![
            &(&var(2, 0).pow(2) * &var(2, 1)) + &var(2, 1).pow(3),
            &(&(&var(2, 0).pow(2) * &var(2, 1)) + &var(2, 1).pow(5))
                + &var(2, 1).pow(4).scale(&rat(1, 4)),
            &(&var(2, 0).pow(3) + &var(2, 1).pow(5)) + &(&var(2, 0) * &var(2, 1).pow(3)),
        ];
        for s in cases {
            for lambda in [rat(2, 1), rat(-1, 3), rat(5, 7)] {
                let images: Vec<QPoly> = (0..2)
                    .map(|i| var(2, i).scale(&lambda))
                    .collect();
                let scaled = s.substitute(&images).unwrap();
                for kind in [Kind::CenterChord, Kind::Special] {
                    let a = classify_surface(&germ(2, s.clone()), kind).unwrap();
                    let b = classify_surface(&germ(2, scaled.clone()), kind).unwrap();
                    assert_eq!(a.label, b.label, "lambda = {lambda}");
                }
            }
        }
    }

    #[test]
    fn float_path_decides_or_abstains() {
        // Clear D4 discriminant signs survive the float path.
        let g = cubic_surface(1);
        let out = classify_at_float(&g, &[0.0, 0.0], Kind::CenterChord, DEFAULT_FLOAT_TOL)
            .unwrap();
        match out {
            FloatOutcome::Decided(c) => assert_eq!(c.label, ClassLabel::D42Plus),
            other => panic!("unexpected {other:?}"),
        }

        // A curve inflection: S''' ≈ 0 at the study point → sign uncertain.
        let g = germ(1, var(1, 0).pow(4).scale(&rat(1, 4)));
        let out =
            classify_at_float(&g, &[1e-13], Kind::CenterChord, DEFAULT_FLOAT_TOL).unwrap();
        match out {
            FloatOutcome::SignUncertain { quantity, .. } => {
                assert_eq!(quantity, "S'''(0)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invariant_entries_render_as_rationals() {
        let inv = sigma_invariants(&cubic_surface(1).jets(7));
        let entries = inv.entries();
        assert!(entries.iter().any(|(k, v)| *k == "Delta" && v == "-4"));
    }
}
