//! Exact identity suites for the polynomials `p_σ`.
//!
//! Every check compares exact rationals; a single mismatch is a failure.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact::{
    jacobi_residual, leading_principal_minors, p_sigma, random_integer_matrix, random_nonzero, ExactMatrix,
};
use crate::graph::VertexSet;
use crate::par::{self, Execution};
use crate::pattern::SparsityPattern;
use crate::permutation::Permutation;

/// Entry bound for sampled matrices.
pub const IDENTITY_BOUND: i64 = 1000;

/// Largest side for which the composition suite runs over all pairs.
const EXHAUSTIVE_PAIRS_N: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    /// Description of the first failing trial.
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn trial_rng(seed: u64, suite: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ suite.wrapping_mul(0xA24B_AED4_963E_E407));
    rng.set_stream(trial as u64);
    rng
}

/// Dense half the time, otherwise on a random pattern of density 0.7 so
/// that vanishing `p_σ` also occurs.
fn sample_matrix(n: usize, rng: &mut ChaCha8Rng) -> ExactMatrix {
    let p = if rng.gen_bool(0.5) {
        SparsityPattern::full(n).expect("n >= 1")
    } else {
        let entries: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(0.7)).collect();
        SparsityPattern::from_entries(n, entries).expect("valid entries")
    };
    random_integer_matrix(&p, IDENTITY_BOUND, rng)
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(rng);
    Permutation::from_images(map).expect("shuffle is a permutation")
}

fn run(
    mode: Execution,
    trials: usize,
    f: impl Fn(usize) -> Result<(), String> + Sync + Send,
) -> Vec<Result<(), String>> {
    par::map_range(mode, trials, f)
}

fn finish(name: &str, n: usize, outcomes: Vec<Result<(), String>>) -> SuiteResult {
    let trials = outcomes.len();
    let failures = outcomes.iter().filter(|o| o.is_err()).count();
    let first_failure = outcomes.into_iter().find_map(|o| o.err());
    SuiteResult { name: name.to_string(), n, trials, failures, first_failure }
}

/// `p_σ(Aᵀ) = p_σ(A)` for a random `A` and random `σ` per trial.
pub fn transpose_suite(n: usize, trials: usize, seed: u64, mode: Execution) -> SuiteResult {
    let outcomes = run(mode, trials, |t| {
        let mut rng = trial_rng(seed, 1, t);
        let a = sample_matrix(n, &mut rng);
        let sigma = random_permutation(n, &mut rng);
        let lhs = p_sigma(&a.transpose(), &sigma).map_err(|e| e.to_string())?;
        let rhs = p_sigma(&a, &sigma).map_err(|e| e.to_string())?;
        if lhs == rhs {
            Ok(())
        } else {
            Err(format!("sigma={sigma}: {lhs} != {rhs}"))
        }
    });
    finish("transpose", n, outcomes)
}

/// `p_τ(P_σ A P_σ⁻¹) = p_{τσ}(A)`: every pair `(τ, σ)` when `n ≤ 3`,
/// otherwise `trials` random pairs.
pub fn composition_suite(n: usize, trials: usize, seed: u64, mode: Execution) -> SuiteResult {
    let pairs: Option<Vec<(Permutation, Permutation)>> = (n <= EXHAUSTIVE_PAIRS_N).then(|| {
        Permutation::all(n).flat_map(|tau| Permutation::all(n).map(move |sigma| (tau.clone(), sigma))).collect()
    });
    let count = pairs.as_ref().map_or(trials, |p| p.len());
    let outcomes = run(mode, count, |t| {
        let mut rng = trial_rng(seed, 2, t);
        let a = sample_matrix(n, &mut rng);
        let (tau, sigma) = match &pairs {
            Some(p) => p[t].clone(),
            None => (random_permutation(n, &mut rng), random_permutation(n, &mut rng)),
        };
        let conj = a.conjugate(&sigma).map_err(|e| e.to_string())?;
        let lhs = p_sigma(&conj, &tau).map_err(|e| e.to_string())?;
        let ts = tau.compose(&sigma).map_err(|e| e.to_string())?;
        let rhs = p_sigma(&a, &ts).map_err(|e| e.to_string())?;
        if lhs == rhs {
            Ok(())
        } else {
            Err(format!("tau={tau}, sigma={sigma}: {lhs} != {rhs}"))
        }
    });
    finish("composition", n, outcomes)
}

/// `p_σ(DA) = c · p_σ(A)` with `c` the product of the leading minors
/// `1..n−1` of `P_σ D P_σ⁻¹`; in particular the zero sets agree.
pub fn scaling_suite(n: usize, trials: usize, seed: u64, mode: Execution) -> SuiteResult {
    let outcomes = run(mode, trials, |t| {
        let mut rng = trial_rng(seed, 3, t);
        let a = sample_matrix(n, &mut rng);
        let sigma = random_permutation(n, &mut rng);
        let d: Vec<BigRational> =
            (0..n).map(|_| BigRational::from_integer(random_nonzero(&mut rng, IDENTITY_BOUND).into())).collect();
        let dm = ExactMatrix::diagonal(&d);
        let da = dm.mul(&a).map_err(|e| e.to_string())?;
        let minors = leading_principal_minors(&dm.conjugate(&sigma).map_err(|e| e.to_string())?);
        let c: BigRational = minors.iter().take(n.saturating_sub(1)).fold(BigRational::one(), |acc, m| acc * m);
        let lhs = p_sigma(&da, &sigma).map_err(|e| e.to_string())?;
        let base = p_sigma(&a, &sigma).map_err(|e| e.to_string())?;
        if lhs != &c * &base {
            return Err(format!("sigma={sigma}: {lhs} != {c} * {base}"));
        }
        if lhs.is_zero() != base.is_zero() {
            return Err(format!("sigma={sigma}: zero sets differ"));
        }
        Ok(())
    });
    finish("scaling", n, outcomes)
}

/// Random invertible integer matrix.
fn invertible(n: usize, rng: &mut ChaCha8Rng) -> ExactMatrix {
    let full = SparsityPattern::full(n).expect("n >= 1");
    loop {
        let b = random_integer_matrix(&full, IDENTITY_BOUND, rng);
        if !b.determinant().is_zero() {
            return b;
        }
    }
}

/// `det((B⁻¹)_I) = det(B_{Iᶜ}) / det(B)` on random invertible `B` and random
/// index sets `I`.
pub fn jacobi_suite(n: usize, trials: usize, seed: u64, mode: Execution) -> SuiteResult {
    let outcomes = run(mode, trials, |t| {
        let mut rng = trial_rng(seed, 4, t);
        let b = invertible(n, &mut rng);
        let subset: VertexSet = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let r = jacobi_residual(&b, subset).map_err(|e| e.to_string())?;
        if r.is_zero() {
            Ok(())
        } else {
            Err(format!("I={subset}: residual {r}"))
        }
    });
    finish("jacobi", n, outcomes)
}

/// For invertible `A` with `det_k(A) = 0`, the minor of `A⁻¹` on the
/// trailing indices `k+1..n` vanishes.
pub fn inverse_closure_suite(n: usize, trials: usize, seed: u64, mode: Execution) -> SuiteResult {
    if n < 2 {
        return finish("inverse-closure", n, Vec::new());
    }
    let outcomes = run(mode, trials, |t| {
        let mut rng = trial_rng(seed, 5, t);
        let k = rng.gen_range(1..n);
        let a = loop {
            let mut a = invertible(n, &mut rng);
            // row k−1 of the leading block becomes the sum of the rows above it
            for j in 0..k {
                let s: BigRational = (0..k - 1).map(|i| a.get(i, j).clone()).fold(BigRational::zero(), |x, y| x + y);
                a.set(k - 1, j, s);
            }
            if !a.determinant().is_zero() {
                break a;
            }
        };
        if !a.leading_minor(k).is_zero() {
            return Err(format!("construction left det_{k} nonzero"));
        }
        let inv = a.inverse().map_err(|e| e.to_string())?;
        let trailing: Vec<usize> = (k..n).collect();
        let m = inv.principal_submatrix(&trailing).map_err(|e| e.to_string())?.determinant();
        if m.is_zero() {
            Ok(())
        } else {
            Err(format!("k={k}: trailing minor of the inverse is {m}"))
        }
    });
    finish("inverse-closure", n, outcomes)
}

/// All suites at side `n`.
pub fn run_identity_suites(n: usize, trials: usize, seed: u64, mode: Execution) -> Vec<SuiteResult> {
    vec![
        transpose_suite(n, trials, seed, mode),
        composition_suite(n, trials, seed, mode),
        scaling_suite(n, trials, seed, mode),
        jacobi_suite(n, trials, seed, mode),
        inverse_closure_suite(n, trials, seed, mode),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_small_sizes() {
        for n in 1..=4 {
            for r in run_identity_suites(n, 20, 11, Execution::Sequential) {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn composition_is_exhaustive_at_three() {
        let r = composition_suite(3, 5, 0, Execution::Sequential);
        assert_eq!(r.trials, 36);
        assert!(r.passed());
    }

    #[test]
    fn reversed_composition_is_caught() {
        // σ∘τ in place of τ∘σ must produce mismatches at n = 3
        let mut bad = 0;
        for tau in Permutation::all(3) {
            for sigma in Permutation::all(3) {
                let mut rng = trial_rng(1, 9, 0);
                let a = random_integer_matrix(&SparsityPattern::full(3).unwrap(), IDENTITY_BOUND, &mut rng);
                let lhs = p_sigma(&a.conjugate(&sigma).unwrap(), &tau).unwrap();
                let wrong = p_sigma(&a, &sigma.compose(&tau).unwrap()).unwrap();
                bad += usize::from(lhs != wrong);
            }
        }
        assert!(bad > 0);
    }

    #[test]
    fn modes_agree() {
        let a = run_identity_suites(3, 10, 5, Execution::Sequential);
        let b = run_identity_suites(3, 10, 5, Execution::Parallel);
        assert_eq!(a, b);
    }
}
