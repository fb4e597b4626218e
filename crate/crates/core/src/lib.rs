//! Improper affine spheres from Lagrangian germs.
//!
//! Pipeline: a Lagrangian germ `L = graph(dS)` (exactly represented by a
//! rational polynomial `S`) is turned into a pair of improper-affine-sphere
//! parameterizations — the *center-chord* one built from chord midpoints and
//! the *special* one built from the holomorphic extension of `S` — together
//! with the odd generating families that control their singularities. On top
//! of that sit caustic extraction, an exact classifier of the stable odd
//! singularity classes, versality checks for odd deformations, and numeric
//! verification of the defining identities.
//!
//! The polynomial core is generic over the coefficient ring (see
//! [`poly::Scalar`]); the crate-level aliases fix the two rings actually
//! used: [`Rat`]/[`QPoly`] for exact work and `f64`/[`FPoly`] for grids.

// Compile the README's examples alongside the doctests so they cannot drift.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;

pub mod caustic;
pub mod classify;
pub mod construct;
pub mod error;
pub mod germ;
pub mod poly;
pub mod random;
pub mod svg;
pub mod verify;
pub mod versal;

pub use error::{Error, Result};
pub use poly::{MultiIndex, Poly, Scalar};

/// Exact scalar used throughout the symbolic paths.
pub type Rat = num_rational::BigRational;

/// Polynomial with exact rational coefficients.
pub type QPoly = Poly<Rat>;

/// Polynomial with floating-point coefficients (grid/plot paths).
pub type FPoly = Poly<f64>;

/// Shorthand rational constructor.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(numer.into(), denom.into())
}

/// Integer as a rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Lossy rational → f64 conversion.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact binomial coefficient as a rational.
pub fn binomial(n: u32, k: u32) -> Rat {
    use num_bigint::BigInt;
    use num_integer::binomial as int_binomial;
    Rat::from_integer(int_binomial(BigInt::from(n), BigInt::from(k)))
}
