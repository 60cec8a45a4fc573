//! Canonical forms of patterns under vertex relabeling and transposition.
//!
//! Both actions preserve stability, so orbit representatives are all an
//! exhaustive study needs. The canonical representative is the orbit member
//! whose row-major bit string (`1` = free, first character = entry (1,1)) is
//! lexicographically smallest.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::pattern::SparsityPattern;
use crate::permutation::Permutation;

/// Orbit scans cost `2·n!` images.
pub const MAX_CANON_N: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("canonical forms are limited to n <= {MAX_CANON_N}, got n = {0}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternOrbitInfo {
    pub canonical: SparsityPattern,
    pub orbit_size: usize,
    /// Applied after the optional transpose, maps the input onto `canonical`.
    pub relabeling: Permutation,
    pub transposed: bool,
}

/// One element of `S_n × {id, transpose}` as a map on bit positions.
struct OrbitAction {
    relabeling: Permutation,
    transposed: bool,
    /// `target[i·n + j]` is the key shift receiving entry `(i, j)`.
    target: Vec<u8>,
}

/// Precomputed group actions for one side length.
pub struct OrbitTable {
    n: usize,
    actions: Vec<OrbitAction>,
}

impl OrbitTable {
    fn build(n: usize) -> Self {
        let nn = n * n;
        let mut actions = Vec::with_capacity(2 * crate::permutation::factorial(n) as usize);
        for transposed in [false, true] {
            for sigma in Permutation::all(n) {
                let mut target = vec![0u8; nn];
                for i in 0..n {
                    for j in 0..n {
                        let (a, b) = if transposed { (j, i) } else { (i, j) };
                        let pos = sigma.apply(a) * n + sigma.apply(b);
                        target[i * n + j] = (nn - 1 - pos) as u8;
                    }
                }
                actions.push(OrbitAction { relabeling: sigma, transposed, target });
            }
        }
        Self { n, actions }
    }

    /// Shared table for side `n` (built once per process).
    pub fn get(n: usize) -> Result<Arc<OrbitTable>, CanonError> {
        if n == 0 || n > MAX_CANON_N {
            return Err(CanonError::TooLarge(n));
        }
        static TABLES: OnceLock<Mutex<HashMap<usize, Arc<OrbitTable>>>> = OnceLock::new();
        let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = tables.lock().expect("orbit table lock");
        Ok(guard.entry(n).or_insert_with(|| Arc::new(OrbitTable::build(n))).clone())
    }

    #[inline]
    fn image_key(&self, action: &OrbitAction, bits: u64) -> u64 {
        let mut key = 0u64;
        let mut rest = bits;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            key |= 1u64 << action.target[b];
        }
        key
    }

    /// Lexicographic key of the pattern with row-major packing `bits`.
    pub fn key_of(&self, bits: u64) -> u64 {
        self.image_key(&self.actions[0], bits)
    }

    /// Minimal key over the orbit of `bits`.
    pub fn canonical_key(&self, bits: u64) -> u64 {
        self.actions.iter().map(|a| self.image_key(a, bits)).min().expect("nonempty group")
    }

    /// Whether `bits` is already its orbit's representative.
    pub fn is_canonical(&self, bits: u64) -> bool {
        let own = self.key_of(bits);
        self.actions.iter().all(|a| self.image_key(a, bits) >= own)
    }

    pub fn orbit_size(&self, bits: u64) -> usize {
        let mut keys: Vec<u64> = self.actions.iter().map(|a| self.image_key(a, bits)).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }

    /// Converts a key back into row-major packing.
    pub fn bits_of_key(&self, key: u64) -> u64 {
        let nn = self.n * self.n;
        (0..nn).filter(|&pos| (key >> (nn - 1 - pos)) & 1 == 1).fold(0, |acc, pos| acc | (1 << pos))
    }
}

/// Lexicographic sort key of a pattern with `n ≤ 8`.
pub fn pattern_key(p: &SparsityPattern) -> Option<u64> {
    let n = p.n();
    let bits = p.to_bits()?;
    let nn = n * n;
    Some((0..nn).filter(|&pos| (bits >> pos) & 1 == 1).fold(0u64, |acc, pos| acc | (1 << (nn - 1 - pos))))
}

pub fn canonical_form(p: &SparsityPattern) -> Result<PatternOrbitInfo, CanonError> {
    let n = p.n();
    let table = OrbitTable::get(n)?;
    let bits = p.to_bits().expect("n <= 8 packs into 64 bits");
    let mut keys = Vec::with_capacity(table.actions.len());
    let mut best: Option<(u64, &OrbitAction)> = None;
    for action in &table.actions {
        let key = table.image_key(action, bits);
        keys.push(key);
        if best.is_none_or(|(k, _)| key < k) {
            best = Some((key, action));
        }
    }
    keys.sort_unstable();
    keys.dedup();
    let (key, action) = best.expect("nonempty group");
    let canonical = SparsityPattern::from_bits(n, table.bits_of_key(key)).expect("valid bits");
    Ok(PatternOrbitInfo {
        canonical,
        orbit_size: keys.len(),
        relabeling: action.relabeling.clone(),
        transposed: action.transposed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::factorial;

    fn loop_three_cycle() -> SparsityPattern {
        SparsityPattern::from_one_based(3, [(1, 1), (1, 2), (2, 3), (3, 1)]).unwrap()
    }

    fn apply(info: &PatternOrbitInfo, p: &SparsityPattern) -> SparsityPattern {
        let q = if info.transposed { p.transpose() } else { p.clone() };
        q.permute(&info.relabeling).unwrap()
    }

    #[test]
    fn full_pattern_is_fixed() {
        let full = SparsityPattern::full(4).unwrap();
        let info = canonical_form(&full).unwrap();
        assert_eq!(info.canonical, full);
        assert_eq!(info.orbit_size, 1);
    }

    #[test]
    fn transpose_related_edges_share_a_form() {
        let a = SparsityPattern::from_one_based(2, [(1, 2)]).unwrap();
        let b = SparsityPattern::from_one_based(2, [(2, 1)]).unwrap();
        let ca = canonical_form(&a).unwrap();
        assert_eq!(ca.canonical, canonical_form(&b).unwrap().canonical);
        // "0010" < "0100"
        assert_eq!(ca.canonical, b);
        assert_eq!(ca.orbit_size, 2);
    }

    #[test]
    fn whole_orbit_of_example_pattern_collapses() {
        let p = loop_three_cycle();
        let reference = canonical_form(&p).unwrap();
        let mut images = std::collections::BTreeSet::new();
        for sigma in Permutation::all(3) {
            for t in [false, true] {
                let q = if t { p.transpose() } else { p.clone() };
                let q = q.permute(&sigma).unwrap();
                images.insert(q.to_bits().unwrap());
                assert_eq!(canonical_form(&q).unwrap().canonical, reference.canonical);
            }
        }
        assert_eq!(images.len(), reference.orbit_size);
        assert_eq!(apply(&reference, &p), reference.canonical);
    }

    #[test]
    fn orbit_size_divides_group_order() {
        for bits in 0..512u64 {
            let p = SparsityPattern::from_bits(3, bits).unwrap();
            let info = canonical_form(&p).unwrap();
            assert_eq!(2 * factorial(3) as usize % info.orbit_size, 0);
            assert_eq!(apply(&info, &p), info.canonical);
        }
    }

    #[test]
    fn canonical_is_orbit_minimum() {
        let table = OrbitTable::get(3).unwrap();
        for bits in 0..512u64 {
            let p = SparsityPattern::from_bits(3, bits).unwrap();
            let info = canonical_form(&p).unwrap();
            let cbits = info.canonical.to_bits().unwrap();
            assert!(table.is_canonical(cbits));
            assert_eq!(table.canonical_key(bits), table.key_of(cbits));
            assert_eq!(pattern_key(&info.canonical), Some(table.key_of(cbits)));
        }
    }

    #[test]
    fn rejects_large_n() {
        assert_eq!(canonical_form(&SparsityPattern::full(9).unwrap()), Err(CanonError::TooLarge(9)));
    }
}
