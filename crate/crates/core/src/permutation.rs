//! Permutations of `{0, .., n-1}` in one-line notation.
//!
//! A permutation `σ` maps vertex `i` to `σ(i)`. Acting on a pattern it sends
//! the free entry `(a, b)` to `(σ(a), σ(b))`; on matrices it is conjugation by
//! the permutation matrix `P_σ` whose column `j` is the unit vector
//! `e_{σ(j)}`, so that `(P_σ A P_σ⁻¹)[σ(a)][σ(b)] = A[a][b]`. Composition is
//! ordinary function composition, which makes `P_τ P_σ = P_{τ∘σ}`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermutationError {
    #[error("value {value} at position {position} is outside 1..={n}")]
    OutOfRange { position: usize, value: usize, n: usize },
    #[error("value {value} appears more than once")]
    Repeated { value: usize },
    #[error("permutation sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// The order-reversing permutation `i ↦ n-1-i`.
    pub fn reversal(n: usize) -> Self {
        Self { map: (0..n).rev().collect() }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(map: Vec<usize>) -> Result<Self, PermutationError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for (position, &value) in map.iter().enumerate() {
            if value >= n {
                return Err(PermutationError::OutOfRange { position: position + 1, value: value + 1, n });
            }
            if seen[value] {
                return Err(PermutationError::Repeated { value: value + 1 });
            }
            seen[value] = true;
        }
        Ok(Self { map })
    }

    /// Builds a permutation from 1-based one-line notation `(σ_1, .., σ_n)`.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self, PermutationError> {
        let n = one_line.len();
        let mut map = Vec::with_capacity(n);
        for (position, &value) in one_line.iter().enumerate() {
            if value == 0 || value > n {
                return Err(PermutationError::OutOfRange { position: position + 1, value, n });
            }
            map.push(value - 1);
        }
        Self::from_images(map)
    }

    /// The relabeling that sends the `m`-th vertex of `ordering` to position
    /// `m`. Conjugating by it moves the vertices of `ordering` to the front,
    /// in order.
    pub fn from_ordering(ordering: &[usize]) -> Result<Self, PermutationError> {
        Ok(Self::from_images(ordering.to_vec())?.inverse())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    /// 1-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.map.iter().map(|&v| v + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermutationError> {
        if self.len() != other.len() {
            return Err(PermutationError::SizeMismatch { left: self.len(), right: other.len() });
        }
        Ok(Self { map: other.map.iter().map(|&v| self.map[v]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Self { map: inv }
    }

    /// `+1` for even permutations, `-1` for odd ones (the determinant of `P_σ`).
    pub fn sign(&self) -> i32 {
        let parity = self.cycles().iter().map(|c| c.len() - 1).sum::<usize>();
        if parity % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Disjoint cycles, each starting at its smallest element, ordered by that
    /// element. Fixed points appear as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.map.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cycle.push(v);
                v = self.map[v];
            }
            out.push(cycle);
        }
        out
    }

    /// Entry `(i, j)` of `P_σ`.
    pub fn matrix_entry(&self, i: usize, j: usize) -> bool {
        self.map[j] == i
    }

    /// Advances to the next permutation in lexicographic order of the image
    /// vector; returns `false` after the last one.
    pub fn next_lexicographic(&mut self) -> bool {
        let m = &mut self.map;
        if m.len() < 2 {
            return false;
        }
        let mut i = m.len() - 1;
        while i > 0 && m[i - 1] >= m[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = m.len() - 1;
        while m[j] <= m[i - 1] {
            j -= 1;
        }
        m.swap(i - 1, j);
        m[i..].reverse();
        true
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations { next: Some(Permutation::identity(n)) }
    }
}

pub struct AllPermutations {
    next: Option<Permutation>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if succ.next_lexicographic() {
            self.next = Some(succ);
        }
        Some(current)
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

impl fmt::Display for Permutation {
    /// 1-based one-line notation, e.g. `(1,3,4,2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.map.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, ")")
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.one_line().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let one_line = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_line(&one_line).map_err(serde::de::Error::custom)
    }
}
