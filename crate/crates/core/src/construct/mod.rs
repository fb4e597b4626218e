//! Construction of improper affine spheres from a Lagrangian germ.
//!
//! Two parameterizations are produced for each germ:
//!
//! * **center-chord** (`cc`): built from chord midpoints of `L`; the graph
//!   potential satisfies the Monge–Ampère equation with `det D²F = -1` on
//!   surfaces (non-convex kind);
//! * **special** (`sp`): built from the holomorphic extension of the germ
//!   potential; `det D²F = +1` (convex kind).
//!
//! Alongside the maps themselves, each kind has an odd *generating family*
//! `G(β, q, p)` whose fiberwise critical values recover the sphere and whose
//! degenerate critical points carve out its singularities. The two families
//! are exchanged by a coefficient involution acting on the fiber degree; see
//! [`family::cc_sp_transform`].

mod builtin;
mod family;
mod maps;

pub use builtin::Builtin;
pub use family::{cc_sp_transform, gen_family, holomorphic_extension, GeneratingFamily};
pub use maps::{center_chord_maps, special_maps, IasMap, SymbolicMaps};

use crate::error::{Error, Result};

/// Which of the two constructions a family or map belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Center-chord (non-convex) construction.
    CenterChord,
    /// Special (convex) construction via the holomorphic extension.
    Special,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::CenterChord => "cc",
            Kind::Special => "sp",
        }
    }

    pub fn parse(s: &str) -> Result<Kind> {
        match s {
            "cc" => Ok(Kind::CenterChord),
            "sp" => Ok(Kind::Special),
            other => Err(Error::BadInput(format!(
                "unknown kind {other:?}; expected \"cc\" or \"sp\""
            ))),
        }
    }

    pub fn other(self) -> Kind {
        match self {
            Kind::CenterChord => Kind::Special,
            Kind::Special => Kind::CenterChord,
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Variable layout of a generating family `G(β, q, p)` on `3n` slots:
/// fiber variables `β` first, then base `q`, then momenta `p`.
#[derive(Clone, Copy, Debug)]
pub struct FamilyVars {
    pub n: usize,
}

impl FamilyVars {
    pub fn total(self) -> usize {
        3 * self.n
    }

    pub fn beta(self, i: usize) -> usize {
        debug_assert!(i < self.n);
        i
    }

    pub fn q(self, i: usize) -> usize {
        debug_assert!(i < self.n);
        self.n + i
    }

    pub fn p(self, i: usize) -> usize {
        debug_assert!(i < self.n);
        2 * self.n + i
    }

    pub fn betas(self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn qs(self) -> Vec<usize> {
        (self.n..2 * self.n).collect()
    }

    pub fn ps(self) -> Vec<usize> {
        (2 * self.n..3 * self.n).collect()
    }
}

/// Variable layout of a two-block domain (`(u, v)` for center-chord,
/// `(s, t)` for special): first block `0..n`, second block `n..2n`.
#[derive(Clone, Copy, Debug)]
pub struct PairVars {
    pub n: usize,
}

impl PairVars {
    pub fn total(self) -> usize {
        2 * self.n
    }

    pub fn first(self, i: usize) -> usize {
        debug_assert!(i < self.n);
        i
    }

    pub fn second(self, i: usize) -> usize {
        debug_assert!(i < self.n);
        self.n + i
    }
}
