//! Fixtures and independent reference computations shared by the
//! integration tests.
#![allow(dead_code)]

use std::io::Write;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use smstab::spectral::RealMatrix;
use smstab::{ExactMatrix, SparsityPattern};

pub fn pat(n: usize, entries: &[(usize, usize)]) -> SparsityPattern {
    SparsityPattern::from_one_based(n, entries.iter().copied()).unwrap()
}

pub fn loop_three_cycle() -> SparsityPattern {
    pat(3, &[(1, 1), (1, 2), (2, 3), (3, 1)])
}

pub fn nested_three() -> SparsityPattern {
    pat(3, &[(1, 1), (1, 2), (2, 1), (2, 3), (3, 1)])
}

pub fn sinkless_components() -> SparsityPattern {
    pat(5, &[(1, 2), (1, 3), (2, 3), (2, 5), (4, 2), (3, 4), (4, 5), (5, 5)])
}

pub fn nested_five() -> SparsityPattern {
    SparsityPattern::from_mask("**000\n*0*00\n*00*0\n00*0*\n*0000").unwrap()
}

pub fn no_four_subgraph() -> SparsityPattern {
    SparsityPattern::from_mask("**00*\n00*00\n*00*0\n0000*\n*00*0").unwrap()
}

/// All permutations of `0..n` in one-line form, by recursive insertion.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn parity(p: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                odd = !odd;
            }
        }
    }
    odd
}

/// Determinant by the permutation expansion.
pub fn leibniz_det(m: &ExactMatrix) -> BigRational {
    let n = m.n();
    let mut total = BigRational::zero();
    for p in permutations(n) {
        let mut term = BigRational::one();
        for (i, &j) in p.iter().enumerate() {
            term *= m.get(i, j);
            if term.is_zero() {
                break;
            }
        }
        if parity(&p) {
            total -= term;
        } else {
            total += term;
        }
    }
    total
}

/// Whether some bijection of `subset` onto itself uses only free entries.
pub fn brute_force_matching(p: &SparsityPattern, subset: &[usize]) -> bool {
    permutations(subset.len()).iter().any(|perm| subset.iter().enumerate().all(|(k, &i)| p.is_free(i, subset[perm[k]])))
}

/// Largest real part of the eigenvalues, computed by nalgebra.
pub fn nalgebra_abscissa(m: &RealMatrix) -> f64 {
    let n = m.n();
    let dm = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    dm.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Writes straight to the process stdout so the line survives test capture.
pub fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}
