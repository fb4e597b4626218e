//! Seeded random germs for property suites and the self-test command.
//!
//! Potentials are drawn with small rational coefficients over the monomials
//! of total degree 3 through `max_degree`, so every draw is a valid germ
//! input (vanishing 2-jet) with exact arithmetic downstream. The stream is
//! ChaCha-based: one seed reproduces one germ sequence on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::germ::LagrangianGerm;
use crate::poly::MultiIndex;
use crate::{rat, Poly, QPoly, Rat};

/// Deterministic generator stream for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All exponent vectors of total degree `deg` in `n` variables,
/// lexicographically ordered.
fn exponents_of_degree(n: usize, deg: u32) -> Vec<Vec<u32>> {
    fn fill(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            let mut e = prefix.clone();
            e.push(left);
            out.push(e);
            return;
        }
        for take in (0..=left).rev() {
            prefix.push(take);
            fill(n - 1, left - take, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(n, deg, &mut Vec::new(), &mut out);
    out
}

/// A random potential in `M³`: each monomial of degree `3..=max_degree`
/// enters with probability one half and a coefficient `num/den`,
/// `num ∈ ±1..9`, `den ∈ 1..4`. The result is never the zero polynomial.
pub fn random_potential(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> QPoly {
    assert!(n >= 1 && max_degree >= 3, "need n >= 1 and degree >= 3");
    let mut p: QPoly = Poly::zero(n);
    for deg in 3..=max_degree {
        for exps in exponents_of_degree(n, deg) {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let mut num: i64 = rng.gen_range(-9..=9);
            if num == 0 {
                num = 1;
            }
            let den: i64 = rng.gen_range(1..=4);
            let term = Poly::monomial(MultiIndex::new(exps), rat(num, den));
            p = &p + &term;
        }
    }
    if p.is_zero() {
        // Guarantee a usable germ even on an all-tails draw.
        let mut exps = vec![0u32; n];
        exps[0] = 3;
        p = Poly::monomial(MultiIndex::new(exps), Rat::from_integer(1.into()));
    }
    p
}

/// A random germ at the origin.
pub fn random_germ(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> LagrangianGerm {
    let s = random_potential(rng, n, max_degree);
    LagrangianGerm::at_origin(n, s).expect("generated potentials are valid germs")
}
