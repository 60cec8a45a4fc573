//! Sampling test for membership of a pattern's matrix space in the common
//! zero set of the polynomials `p_σ`.

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{p_sigma, random_integer_matrix, ExactMatrix};
use crate::pattern::SparsityPattern;
use crate::permutation::Permutation;

/// The scan visits all `n!` permutations per sample.
pub const MAX_VARIETY_N: usize = 8;

/// Magnitude bound for sampled entries.
pub const SAMPLE_BOUND: i64 = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VarietyError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("variety sampling is limited to n <= {MAX_VARIETY_N}, got n = {0}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum VarietyMembership {
    /// Every sample annihilated every `p_σ` (probabilistic).
    GenericMember { trials: usize },
    /// `p_σ(matrix) ≠ 0` and `det(matrix) ≠ 0`.
    GenericNonmember {
        sigma: Permutation,
        matrix: ExactMatrix,
        #[serde(serialize_with = "serialize_rational")]
        p_sigma: BigRational,
    },
}

fn serialize_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::exact::rational_to_string(r))
}

/// Samples `trials` random integer matrices on `p` and looks for a
/// permutation `σ` with `p_σ(A) ≠ 0`.
///
/// A sample only counts as a nonmember witness when `A` is also
/// nonsingular, i.e. all `n` leading minors of the conjugate are nonzero.
/// Without that, a pattern such as `{(1,1),(1,2)}` would produce witnesses
/// despite having no stable member.
pub fn variety_membership_sample(
    p: &SparsityPattern,
    trials: usize,
    seed: u64,
) -> Result<VarietyMembership, VarietyError> {
    if trials == 0 {
        return Err(VarietyError::NoTrials);
    }
    let n = p.n();
    if n > MAX_VARIETY_N {
        return Err(VarietyError::TooLarge(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let a = random_integer_matrix(p, SAMPLE_BOUND, &mut rng);
        if a.determinant().is_zero() {
            continue;
        }
        for sigma in Permutation::all(n) {
            let value = p_sigma(&a, &sigma).expect("sizes match");
            if !value.is_zero() {
                return Ok(VarietyMembership::GenericNonmember { sigma, matrix: a, p_sigma: value });
            }
        }
    }
    Ok(VarietyMembership::GenericMember { trials })
}
