//! Exhaustive classification of small patterns up to relabeling and
//! transposition.
//!
//! An atlas file is json-lines: a header, then one record per orbit
//! representative sorted by canonical key. While classification runs,
//! verdicts are appended to `<atlas>.partial` so an interrupted run resumes
//! where it stopped.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::canon::{CanonError, OrbitTable};
use crate::graph::find_nested_chain;
use crate::par::{self, Execution};
use crate::pattern::SparsityPattern;
use crate::verdict::{classify, EngineConfig, StabilityVerdict, VerdictTag};

/// Largest side enumerated without a filter.
pub const MAX_FULL_ENUMERATION_N: usize = 4;
/// Largest side enumerated at all.
pub const MAX_ENUMERATION_N: usize = 5;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Representatives classified between checkpoint flushes.
const CHECKPOINT_BATCH: usize = 256;

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error("unfiltered enumeration is limited to n <= {MAX_FULL_ENUMERATION_N}, got n = {0}")]
    NeedsFilter(usize),
    #[error("enumeration is limited to n <= {MAX_ENUMERATION_N}, got n = {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("atlas is incomplete: orbit sizes sum to {found}, expected {expected}")]
    Incomplete { found: u128, expected: u128 },
    #[error("checkpoint header does not match this run: {0}")]
    HeaderMismatch(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> AtlasError + '_ {
    move |source| AtlasError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasHeader {
    pub n: usize,
    pub tool_version: String,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasRecord {
    pub canonical: SparsityPattern,
    pub orbit_size: usize,
    pub verdict: StabilityVerdict,
    pub dimension: usize,
    pub codimension: usize,
    pub minimal_stable: bool,
    pub maximal_unstable: bool,
}

impl AtlasRecord {
    pub fn key(&self) -> u64 {
        crate::canon::pattern_key(&self.canonical).expect("atlas patterns have n <= 8")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atlas {
    pub header: AtlasHeader,
    /// Sorted by canonical key.
    pub records: Vec<AtlasRecord>,
}

impl Atlas {
    pub fn n(&self) -> usize {
        self.header.n
    }

    /// Raw patterns (orbit sizes summed) with a `ProvedStable` verdict.
    pub fn stable_raw_count(&self) -> u128 {
        self.records.iter().filter(|r| r.verdict.is_stable()).map(|r| r.orbit_size as u128).sum()
    }

    pub fn raw_count(&self) -> u128 {
        self.records.iter().map(|r| r.orbit_size as u128).sum()
    }

    pub fn unknown(&self) -> impl Iterator<Item = &AtlasRecord> {
        self.records.iter().filter(|r| r.verdict.tag() == VerdictTag::Unknown)
    }

    /// Record of the orbit containing `p`.
    pub fn lookup(&self, p: &SparsityPattern) -> Option<&AtlasRecord> {
        let table = OrbitTable::get(p.n()).ok()?;
        let key = table.canonical_key(p.to_bits()?);
        self.records.binary_search_by_key(&key, |r| r.key()).ok().map(|i| &self.records[i])
    }

    pub fn write_to(&self, path: &Path) -> Result<(), AtlasError> {
        let tmp = path.with_extension("tmp");
        {
            let file = File::create(&tmp).map_err(io_err(&tmp))?;
            let mut w = BufWriter::new(file);
            write_line(&mut w, &self.header, &tmp)?;
            for r in &self.records {
                write_line(&mut w, r, &tmp)?;
            }
            w.flush().map_err(io_err(&tmp))?;
        }
        fs::rename(&tmp, path).map_err(io_err(path))
    }

    pub fn read_from(path: &Path) -> Result<Self, AtlasError> {
        let (header, records) = read_lines(path)?;
        let header = header.ok_or_else(|| AtlasError::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "missing header".into(),
        })?;
        let mut records = records;
        records.sort_by_key(|r| r.key());
        Ok(Self { header, records })
    }
}

fn write_line<T: Serialize>(w: &mut impl Write, value: &T, path: &Path) -> Result<(), AtlasError> {
    let line = serde_json::to_string(value).expect("atlas values serialize");
    writeln!(w, "{line}").map_err(io_err(path))
}

fn read_lines(path: &Path) -> Result<(Option<AtlasHeader>, Vec<AtlasRecord>), AtlasError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut header = None;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err =
            |e: serde_json::Error| AtlasError::Parse { path: path.to_path_buf(), line: i + 1, message: e.to_string() };
        if header.is_none() {
            header = Some(serde_json::from_str::<AtlasHeader>(&line).map_err(parse_err)?);
        } else {
            records.push(serde_json::from_str::<AtlasRecord>(&line).map_err(parse_err)?);
        }
    }
    Ok((header, records))
}

/// One representative per orbit with its orbit size, in increasing key
/// order. `filter` sees raw patterns before the canonical check.
pub fn enumerate_patterns(
    n: usize,
    filter: Option<&(dyn Fn(&SparsityPattern) -> bool + Sync)>,
) -> Result<Vec<(SparsityPattern, usize)>, AtlasError> {
    if n > MAX_ENUMERATION_N {
        return Err(AtlasError::TooLarge(n));
    }
    if n > MAX_FULL_ENUMERATION_N && filter.is_none() {
        return Err(AtlasError::NeedsFilter(n));
    }
    let table = OrbitTable::get(n)?;
    let total = 1u64 << (n * n);
    let mut out: Vec<(u64, SparsityPattern, usize)> = Vec::new();
    for bits in 0..total {
        let p = SparsityPattern::from_bits(n, bits).expect("valid bits");
        if let Some(f) = filter {
            if !f(&p) {
                continue;
            }
        }
        if table.is_canonical(bits) {
            out.push((table.key_of(bits), p, table.orbit_size(bits)));
        }
    }
    out.sort_by_key(|e| e.0);
    Ok(out.into_iter().map(|(_, p, s)| (p, s)).collect())
}

/// `count` raw patterns with each entry free independently with probability
/// `density`.
pub fn sample_patterns(n: usize, count: usize, density: f64, seed: u64) -> Vec<SparsityPattern> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let entries: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect::<Vec<_>>();
            let chosen: Vec<(usize, usize)> = entries.into_iter().filter(|_| rng.gen_bool(density)).collect();
            SparsityPattern::from_entries(n, chosen).expect("valid entries")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtlasConfig {
    pub engine: EngineConfig,
    pub seed: u64,
    /// Oracle budget multiplier for re-attacking `Unknown` verdicts.
    pub reattack_factor: usize,
}

impl Default for AtlasConfig {
    fn default() -> Self {
        Self { engine: EngineConfig::default(), seed: 0, reattack_factor: 10 }
    }
}

impl AtlasConfig {
    /// Hex digest of everything that affects verdicts.
    pub fn config_hash(&self) -> String {
        let mut c = *self;
        c.engine.execution = Execution::Sequential;
        c.seed = 0;
        let digest = Sha256::digest(serde_json::to_vec(&c).expect("config serializes"));
        digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }

    pub fn header(&self, n: usize) -> AtlasHeader {
        AtlasHeader { n, tool_version: TOOL_VERSION.to_string(), seed: self.seed, config_hash: self.config_hash() }
    }
}

/// Per-pattern seed so that verdicts do not depend on enumeration order.
fn pattern_seed(seed: u64, key: u64) -> u64 {
    seed ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// `classify`, re-run with a larger oracle budget when inconclusive.
pub fn classify_with_reattack(p: &SparsityPattern, config: &AtlasConfig, seed: u64) -> StabilityVerdict {
    let v = classify(p, &config.engine, seed);
    if v.tag() != VerdictTag::Unknown || config.reattack_factor <= 1 {
        return v;
    }
    let mut boosted = config.engine;
    boosted.oracle = boosted.oracle.scaled(config.reattack_factor);
    classify(p, &boosted, seed)
}

fn partial_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".partial");
    PathBuf::from(s)
}

/// Classifies every orbit representative for side `n`, marks minimally
/// stable and maximally unstable patterns, and writes the atlas to `path`
/// when given.
pub fn classify_atlas(n: usize, config: &AtlasConfig, path: Option<&Path>) -> Result<Atlas, AtlasError> {
    let reps = enumerate_patterns(n, None)?;
    let table = OrbitTable::get(n)?;
    let header = config.header(n);
    let inner = AtlasConfig { engine: EngineConfig { execution: Execution::Sequential, ..config.engine }, ..*config };

    let mut done: HashMap<u64, StabilityVerdict> = HashMap::new();
    let mut checkpoint: Option<BufWriter<File>> = None;
    if let Some(path) = path {
        let partial = partial_path(path);
        if partial.exists() {
            let (h, recs) = read_lines(&partial)?;
            match h {
                Some(h) if h == header => {
                    for r in recs {
                        done.insert(r.key(), r.verdict);
                    }
                }
                Some(h) => return Err(AtlasError::HeaderMismatch(format!("{h:?}"))),
                None => {}
            }
        }
        let fresh = done.is_empty();
        let file = OpenOptions::new()
            .create(true)
            .append(!fresh)
            .write(true)
            .truncate(fresh)
            .open(&partial)
            .map_err(io_err(&partial))?;
        let mut w = BufWriter::new(file);
        if fresh {
            write_line(&mut w, &header, &partial)?;
            w.flush().map_err(io_err(&partial))?;
        }
        checkpoint = Some(w);
    }

    let todo: Vec<(u64, &SparsityPattern, usize)> = reps
        .iter()
        .map(|(p, s)| (table.key_of(p.to_bits().expect("n <= 8")), p, *s))
        .filter(|(k, _, _)| !done.contains_key(k))
        .collect();
    for chunk in todo.chunks(CHECKPOINT_BATCH) {
        let verdicts = par::map(config.engine.execution, chunk, |(key, p, _)| {
            classify_with_reattack(p, &inner, pattern_seed(config.seed, *key))
        });
        for ((key, p, size), v) in chunk.iter().zip(verdicts) {
            if let (Some(w), Some(path)) = (checkpoint.as_mut(), path) {
                let rec = bare_record(p, *size, v.clone());
                write_line(w, &rec, &partial_path(path))?;
            }
            done.insert(*key, v);
        }
        if let (Some(w), Some(path)) = (checkpoint.as_mut(), path) {
            w.flush().map_err(io_err(&partial_path(path)))?;
        }
    }
    drop(checkpoint);

    let tags: HashMap<u64, VerdictTag> = done.iter().map(|(k, v)| (*k, v.tag())).collect();
    let neighbour_tags = |p: &SparsityPattern, add: bool| -> Vec<VerdictTag> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if p.is_free(i, j) != add {
                    let q = p.with_entry(i, j, add);
                    let key = table.canonical_key(q.to_bits().expect("n <= 8"));
                    out.push(tags[&key]);
                }
            }
        }
        out
    };
    let mut records = Vec::with_capacity(reps.len());
    for (p, size) in &reps {
        let key = table.key_of(p.to_bits().expect("n <= 8"));
        let verdict = done.remove(&key).expect("every representative classified");
        let mut rec = bare_record(p, *size, verdict);
        rec.minimal_stable =
            rec.verdict.is_stable() && neighbour_tags(p, false).iter().all(|t| *t == VerdictTag::ProvedUnstable);
        rec.maximal_unstable =
            rec.verdict.is_unstable() && neighbour_tags(p, true).iter().all(|t| *t == VerdictTag::ProvedStable);
        records.push(rec);
    }
    let atlas = Atlas { header, records };
    if let Some(path) = path {
        atlas.write_to(path)?;
        let partial = partial_path(path);
        fs::remove_file(&partial).map_err(io_err(&partial))?;
    }
    Ok(atlas)
}

fn bare_record(p: &SparsityPattern, orbit_size: usize, verdict: StabilityVerdict) -> AtlasRecord {
    AtlasRecord {
        canonical: p.clone(),
        orbit_size,
        verdict,
        dimension: p.dimension(),
        codimension: p.codimension(),
        minimal_stable: false,
        maximal_unstable: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureCheck {
    pub name: String,
    pub description: String,
    pub passed: bool,
    /// Masks of offending representatives.
    pub violations: Vec<String>,
    /// Representatives the check ranged over.
    pub examined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub representatives: usize,
    pub raw_patterns: u128,
    pub stable_raw: u128,
    pub checks: Vec<StructureCheck>,
    /// Masks of `Unknown` representatives (excluded from the checks).
    pub unknown: Vec<String>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn mask_line(p: &SparsityPattern) -> String {
    p.to_mask().trim_end().replace('\n', "/")
}

/// Checks the structural claims about least dimension and codimension on
/// a complete atlas.
pub fn validate_structure_theorem(atlas: &Atlas) -> Result<ValidationReport, AtlasError> {
    let n = atlas.n();
    let expected = 1u128 << (n * n);
    let found = atlas.raw_count();
    if found != expected {
        return Err(AtlasError::Incomplete { found, expected });
    }
    let recs = &atlas.records;
    let check = |name: &str, description: &str, examined: usize, violations: Vec<String>, passed: bool| {
        StructureCheck { name: name.into(), description: description.into(), passed, violations, examined }
    };
    let mut checks = Vec::new();

    let a: Vec<String> =
        recs.iter().filter(|r| r.verdict.is_stable() && r.dimension < n).map(|r| mask_line(&r.canonical)).collect();
    checks.push(check("a", "no stable pattern has dimension below n", recs.len(), a.clone(), a.is_empty()));

    let minimal: Vec<&AtlasRecord> = recs.iter().filter(|r| r.minimal_stable).collect();
    let b = minimal.iter().any(|r| r.dimension == n);
    checks.push(check("b", "some minimally stable pattern has dimension n", minimal.len(), Vec::new(), b));

    let low: Vec<&AtlasRecord> = recs.iter().filter(|r| r.codimension < n).collect();
    let c: Vec<String> = low.iter().filter(|r| !r.verdict.is_stable()).map(|r| mask_line(&r.canonical)).collect();
    checks.push(check("c", "every pattern with codimension below n is stable", low.len(), c.clone(), c.is_empty()));

    let zd = SparsityPattern::zero_diagonal(n).expect("n >= 1");
    let d_ok = atlas.lookup(&zd).is_some_and(|r| r.verdict.is_unstable() && r.maximal_unstable);
    let d_viol = if d_ok { Vec::new() } else { vec![mask_line(&zd)] };
    checks.push(check("d", "the zero-diagonal pattern is maximally unstable", 1, d_viol, d_ok));

    let e_set: Vec<&AtlasRecord> = recs
        .iter()
        .filter(|r| r.canonical.free_diagonal_count() >= 1 && r.canonical.off_diagonal_zero_count() + 2 <= n)
        .collect();
    let e: Vec<String> = e_set
        .iter()
        .filter(|r| !matches!(find_nested_chain(&r.canonical), Ok(Some(_))) || !r.verdict.is_stable())
        .map(|r| mask_line(&r.canonical))
        .collect();
    checks.push(check(
        "e",
        "every pattern with a free diagonal entry and at most n-2 off-diagonal zeros has a nested chain",
        e_set.len(),
        e.clone(),
        e.is_empty(),
    ));

    Ok(ValidationReport {
        n,
        representatives: recs.len(),
        raw_patterns: found,
        stable_raw: atlas.stable_raw_count(),
        checks,
        unknown: atlas.unknown().map(|r| mask_line(&r.canonical)).collect(),
    })
}

/// Stable representatives with an unstable pattern above them in the
/// inclusion order.
pub fn monotonicity_violations(atlas: &Atlas) -> Vec<String> {
    let n = atlas.n();
    let mut out = Vec::new();
    for r in atlas.records.iter().filter(|r| r.verdict.is_stable()) {
        for i in 0..n {
            for j in 0..n {
                if !r.canonical.is_free(i, j) {
                    let parent = r.canonical.with_entry(i, j, true);
                    if atlas.lookup(&parent).is_some_and(|q| q.verdict.is_unstable()) {
                        out.push(format!("{} < {}", mask_line(&r.canonical), mask_line(&parent)));
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictFilter {
    Stable,
    Unstable,
    Unknown,
}

impl VerdictFilter {
    fn matches(self, tag: VerdictTag) -> bool {
        matches!(
            (self, tag),
            (Self::Stable, VerdictTag::ProvedStable)
                | (Self::Unstable, VerdictTag::ProvedUnstable)
                | (Self::Unknown, VerdictTag::Unknown)
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasQuery {
    pub min_dim: Option<usize>,
    pub max_codim: Option<usize>,
    pub verdict: Option<VerdictFilter>,
    pub minimal_stable: Option<bool>,
    pub maximal_unstable: Option<bool>,
}

impl AtlasQuery {
    pub fn matches(&self, r: &AtlasRecord) -> bool {
        self.min_dim.is_none_or(|d| r.dimension >= d)
            && self.max_codim.is_none_or(|c| r.codimension <= c)
            && self.verdict.is_none_or(|v| v.matches(r.verdict.tag()))
            && self.minimal_stable.is_none_or(|m| r.minimal_stable == m)
            && self.maximal_unstable.is_none_or(|m| r.maximal_unstable == m)
    }
}

pub fn query_atlas(path: &Path, query: &AtlasQuery) -> Result<Vec<AtlasRecord>, AtlasError> {
    let atlas = Atlas::read_from(path)?;
    Ok(atlas.records.into_iter().filter(|r| query.matches(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        let one = enumerate_patterns(1, None).unwrap();
        assert_eq!(one.len(), 2);
        for n in 1..=3 {
            let reps = enumerate_patterns(n, None).unwrap();
            assert_eq!(reps.iter().map(|r| r.1 as u64).sum::<u64>(), 1 << (n * n));
        }
        assert!(matches!(enumerate_patterns(5, None), Err(AtlasError::NeedsFilter(5))));
        assert!(matches!(enumerate_patterns(6, Some(&|_| true)), Err(AtlasError::TooLarge(6))));
    }

    #[test]
    fn filtered_enumeration_at_five() {
        let full_ish = |p: &SparsityPattern| p.codimension() <= 1;
        let reps = enumerate_patterns(5, Some(&full_ish)).unwrap();
        // the full pattern, one diagonal hole, one off-diagonal hole
        assert_eq!(reps.len(), 3);
        assert_eq!(reps.iter().map(|r| r.1).sum::<usize>(), 26);
    }

    #[test]
    fn two_by_two_atlas() {
        let atlas = classify_atlas(2, &AtlasConfig::default(), None).unwrap();
        assert_eq!(atlas.raw_count(), 16);
        assert_eq!(atlas.stable_raw_count(), 6);
        let zd = atlas.lookup(&SparsityPattern::zero_diagonal(2).unwrap()).unwrap();
        assert!(zd.verdict.is_unstable() && zd.maximal_unstable);
        let report = validate_structure_theorem(&atlas).unwrap();
        assert!(report.all_passed(), "{report:?}");
        assert!(monotonicity_violations(&atlas).is_empty());
    }

    #[test]
    fn incomplete_atlas_is_rejected() {
        let mut atlas = classify_atlas(2, &AtlasConfig::default(), None).unwrap();
        atlas.records.pop();
        assert!(matches!(validate_structure_theorem(&atlas), Err(AtlasError::Incomplete { .. })));
    }

    #[test]
    fn persistence_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a2.jsonl");
        let cfg = AtlasConfig::default();
        let a = classify_atlas(2, &cfg, Some(&path)).unwrap();
        let first = fs::read(&path).unwrap();
        assert!(!partial_path(&path).exists());
        assert_eq!(Atlas::read_from(&path).unwrap(), a);

        // a half-written checkpoint resumes to the same bytes
        let text = String::from_utf8(first.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        fs::write(partial_path(&path), format!("{}\n{}\n", lines[0], lines[1])).unwrap();
        fs::remove_file(&path).unwrap();
        classify_atlas(2, &cfg, Some(&path)).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
    }

    #[test]
    fn queries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a2.jsonl");
        let atlas = classify_atlas(2, &AtlasConfig::default(), Some(&path)).unwrap();
        let all = query_atlas(&path, &AtlasQuery::default()).unwrap();
        assert_eq!(all.len(), atlas.records.len());
        let q = AtlasQuery { min_dim: Some(4), ..Default::default() };
        let full = query_atlas(&path, &q).unwrap();
        assert_eq!(full.len(), 1);
        assert!(full[0].verdict.is_stable());
        let q: AtlasQuery = serde_json::from_str(r#"{"verdict":"unstable","maximal_unstable":true}"#).unwrap();
        let hits = query_atlas(&path, &q).unwrap();
        assert!(hits.iter().any(|r| r.canonical == SparsityPattern::zero_diagonal(2).unwrap()));
        assert!(serde_json::from_str::<AtlasQuery>(r#"{"colour":1}"#).is_err());
    }

    #[test]
    fn malformed_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        fs::write(&path, "{\"n\":2,\"tool_version\":\"x\",\"seed\":0,\"config_hash\":\"y\"}\n{oops}\n").unwrap();
        assert!(matches!(Atlas::read_from(&path), Err(AtlasError::Parse { line: 2, .. })));
    }
}
