//! Sparsity patterns: the free-entry sets of sparse matrix spaces.
//!
//! A pattern on an `n × n` grid doubles as a digraph on `n` vertices with an
//! edge `i → j` for every free entry `(i, j)`; a free diagonal entry is a
//! self-loop ("sink"). Vertices are 0-based in the API and 1-based in every
//! text format.
//!
//! Left or right multiplication by an invertible diagonal matrix maps a
//! sparse matrix space onto itself, so diagonal scaling has no action on
//! patterns and is not represented here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::permutation::Permutation;

/// Largest supported side length; rows are stored as 64-bit column masks.
pub const MAX_N: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("line {line}, column {column}: {message}")]
    Format { line: usize, column: usize, message: String },
    #[error("side length {0} is outside 1..={MAX_N}")]
    BadSize(usize),
    #[error("entry ({i},{j}) is outside 1..={n}")]
    OutOfRange { i: usize, j: usize, n: usize },
    #[error("entry ({i},{j}) is listed twice")]
    Duplicate { i: usize, j: usize },
    #[error("size mismatch: pattern has n={pattern}, permutation has n={permutation}")]
    SizeMismatch { pattern: usize, permutation: usize },
}

/// Input/output syntax for patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternFormat {
    /// `n` lines of `n` characters; `*` (or `∗`) is free, `0` or `.` is zero.
    Mask,
    /// `{"n": 3, "free": [[1,1],[1,2]]}` with 1-based pairs.
    Json,
}

impl PatternFormat {
    /// Picks the format from a file extension (`.mask` / `.json`).
    pub fn from_extension(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "mask" => Some(Self::Mask),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsityPattern {
    n: usize,
    rows: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternJson {
    n: usize,
    free: Vec<[usize; 2]>,
}

#[inline]
fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl SparsityPattern {
    /// The zero pattern (no free entries).
    pub fn empty(n: usize) -> Result<Self, PatternError> {
        if n == 0 || n > MAX_N {
            return Err(PatternError::BadSize(n));
        }
        Ok(Self { n, rows: vec![0; n] })
    }

    pub fn full(n: usize) -> Result<Self, PatternError> {
        let mut p = Self::empty(n)?;
        p.rows.iter_mut().for_each(|r| *r = full_mask(n));
        Ok(p)
    }

    pub fn diagonal(n: usize) -> Result<Self, PatternError> {
        let mut p = Self::empty(n)?;
        for i in 0..n {
            p.rows[i] = 1 << i;
        }
        Ok(p)
    }

    /// Every off-diagonal entry free, every diagonal entry zero.
    pub fn zero_diagonal(n: usize) -> Result<Self, PatternError> {
        let mut p = Self::full(n)?;
        for i in 0..n {
            p.rows[i] &= !(1 << i);
        }
        Ok(p)
    }

    /// Builds a pattern from 0-based pairs; duplicates are rejected.
    pub fn from_entries<I>(n: usize, entries: I) -> Result<Self, PatternError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut p = Self::empty(n)?;
        for (i, j) in entries {
            if i >= n || j >= n {
                return Err(PatternError::OutOfRange { i: i + 1, j: j + 1, n });
            }
            if p.is_free(i, j) {
                return Err(PatternError::Duplicate { i: i + 1, j: j + 1 });
            }
            p.rows[i] |= 1 << j;
        }
        Ok(p)
    }

    /// Builds a pattern from 1-based pairs.
    pub fn from_one_based<I>(n: usize, entries: I) -> Result<Self, PatternError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut shifted = Vec::new();
        for (i, j) in entries {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(PatternError::OutOfRange { i, j, n });
            }
            shifted.push((i - 1, j - 1));
        }
        Self::from_entries(n, shifted)
    }

    /// Builds a pattern from per-row column masks (bit `j` of `rows[i]` marks
    /// entry `(i, j)`).
    pub fn from_row_masks(rows: Vec<u64>) -> Result<Self, PatternError> {
        let n = rows.len();
        if n == 0 || n > MAX_N {
            return Err(PatternError::BadSize(n));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| **r & !full_mask(n) != 0) {
            let j = 63 - r.leading_zeros() as usize;
            return Err(PatternError::OutOfRange { i: i + 1, j: j + 1, n });
        }
        Ok(Self { n, rows })
    }

    /// Decodes the row-major bit packing used for small patterns
    /// (`n² ≤ 64`): bit `i·n + j` marks entry `(i, j)`.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self, PatternError> {
        if n == 0 || n * n > 64 {
            return Err(PatternError::BadSize(n));
        }
        let mask = full_mask(n);
        let rows = (0..n).map(|i| (bits >> (i * n)) & mask).collect();
        Ok(Self { n, rows })
    }

    /// Row-major bit packing for `n ≤ 8`; inverse of [`Self::from_bits`].
    pub fn to_bits(&self) -> Option<u64> {
        if self.n * self.n > 64 {
            return None;
        }
        Some(self.rows.iter().enumerate().fold(0u64, |acc, (i, r)| acc | (r << (i * self.n))))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_free(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    /// Column mask of row `i`.
    #[inline]
    pub fn row_mask(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn row_masks(&self) -> &[u64] {
        &self.rows
    }

    pub fn col_mask(&self, j: usize) -> u64 {
        self.rows.iter().enumerate().filter(|(_, r)| (*r >> j) & 1 == 1).fold(0, |acc, (i, _)| acc | (1 << i))
    }

    /// A copy with entry `(i, j)` set free or zero.
    pub fn with_entry(&self, i: usize, j: usize, free: bool) -> Self {
        let mut p = self.clone();
        if free {
            p.rows[i] |= 1 << j;
        } else {
            p.rows[i] &= !(1 << j);
        }
        p
    }

    /// Number of free entries, the dimension of the matrix space.
    pub fn dimension(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// `n² − dimension`.
    pub fn codimension(&self) -> usize {
        self.n * self.n - self.dimension()
    }

    pub fn free_diagonal_count(&self) -> usize {
        (0..self.n).filter(|&i| self.is_free(i, i)).count()
    }

    /// Number of zero entries off the diagonal.
    pub fn off_diagonal_zero_count(&self) -> usize {
        self.codimension() - (self.n - self.free_diagonal_count())
    }

    pub fn has_sink(&self) -> bool {
        (0..self.n).any(|i| self.is_free(i, i))
    }

    /// Free entries, 0-based, in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.is_free(i, j)).map(move |j| (i, j)))
    }

    /// Free entries, 1-based, in row-major order.
    pub fn one_based_entries(&self) -> Vec<(usize, usize)> {
        self.entries().map(|(i, j)| (i + 1, j + 1)).collect()
    }

    /// Reverses every edge: `(i, j)` is free in the result iff `(j, i)` is
    /// free here.
    pub fn transpose(&self) -> Self {
        let mut rows = vec![0u64; self.n];
        for (i, j) in self.entries() {
            rows[j] |= 1 << i;
        }
        Self { n: self.n, rows }
    }

    /// Relabels vertices: `(a, b)` becomes `(σ(a), σ(b))`.
    pub fn permute(&self, sigma: &Permutation) -> Result<Self, PatternError> {
        if sigma.len() != self.n {
            return Err(PatternError::SizeMismatch { pattern: self.n, permutation: sigma.len() });
        }
        let mut rows = vec![0u64; self.n];
        for (a, b) in self.entries() {
            rows[sigma.apply(a)] |= 1 << sigma.apply(b);
        }
        Ok(Self { n: self.n, rows })
    }

    /// Parses mask or JSON text.
    pub fn parse(text: &str, format: PatternFormat) -> Result<Self, PatternError> {
        match format {
            PatternFormat::Mask => Self::from_mask(text),
            PatternFormat::Json => Self::from_json(text),
        }
    }

    pub fn serialize(&self, format: PatternFormat) -> String {
        match format {
            PatternFormat::Mask => self.to_mask(),
            PatternFormat::Json => self.to_json(),
        }
    }

    pub fn from_mask(text: &str) -> Result<Self, PatternError> {
        let lines: Vec<(usize, &str)> =
            text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty()).collect();
        let n = lines.len();
        if n == 0 {
            return Err(PatternError::Format { line: 1, column: 1, message: "empty mask".into() });
        }
        if n > MAX_N {
            return Err(PatternError::BadSize(n));
        }
        let mut rows = vec![0u64; n];
        for (row, (line_no, line)) in lines.iter().enumerate() {
            let mut width = 0;
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '*' | '∗' => {
                        if col < n {
                            rows[row] |= 1 << col;
                        }
                    }
                    '0' | '.' => {}
                    other => {
                        return Err(PatternError::Format {
                            line: *line_no,
                            column: col + 1,
                            message: format!("unexpected character {other:?}; expected '*', '0' or '.'"),
                        })
                    }
                }
                width = col + 1;
            }
            if width != n {
                return Err(PatternError::Format {
                    line: *line_no,
                    column: width.min(n) + 1,
                    message: format!("row has {width} cells, expected {n}"),
                });
            }
        }
        Ok(Self { n, rows })
    }

    pub fn to_mask(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for i in 0..self.n {
            for j in 0..self.n {
                out.push(if self.is_free(i, j) { '*' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self, PatternError> {
        let raw: PatternJson = serde_json::from_str(text).map_err(|e| PatternError::Format {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_one_based(raw.n, raw.free.into_iter().map(|[i, j]| (i, j)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("pattern json")
    }

    fn to_json_value(&self) -> PatternJson {
        PatternJson { n: self.n, free: self.one_based_entries().into_iter().map(|(i, j)| [i, j]).collect() }
    }
}

impl fmt::Debug for SparsityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsityPattern(n={}, free={:?})", self.n, self.one_based_entries())
    }
}

impl fmt::Display for SparsityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_mask().trim_end())
    }
}

impl FromStr for SparsityPattern {
    type Err = PatternError;

    /// Accepts either syntax: JSON when the text starts with `{`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim_start().starts_with('{') {
            Self::from_json(s)
        } else {
            Self::from_mask(s)
        }
    }
}

impl Serialize for SparsityPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsityPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PatternJson::deserialize(d)?;
        Self::from_one_based(raw.n, raw.free.into_iter().map(|[i, j]| (i, j))).map_err(serde::de::Error::custom)
    }
}
