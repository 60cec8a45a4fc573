//! One verdict per pattern.
//!
//! Graph conditions decide instability, a nested chain plus a synthesized
//! witness decides stability, and a randomized search over the free entries
//! covers patterns that fall between the two conditions. Oracle failure is
//! never read as instability.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{char_poly, leading_principal_minors, ExactMatrix};
use crate::graph::{
    check_necessary, check_scc_sink, find_nested_chain, hamiltonian_k_exists, NecessaryCheck, SinkCheck,
};
use crate::par::{self, Execution};
use crate::pattern::SparsityPattern;
use crate::spectral::{abscissa_or_inf, spectral_abscissa, Eigenvalue, RealMatrix, DEFAULT_TOLERANCE};
use crate::witness::{ordering_permutation, synthesize_from_chain, WitnessCertificate, WitnessConfig};

/// Exact Routh checks are skipped above this size.
pub const MAX_EXACT_ROUTH_N: usize = 12;

/// Restarts evaluated per round; success in a round stops the search.
const ORACLE_BATCH: usize = 8;

/// Smallest coordinate step before a restart is abandoned.
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub restarts: usize,
    pub steps: usize,
    pub initial_step: f64,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { restarts: 64, steps: 400, initial_step: 0.5, tolerance: DEFAULT_TOLERANCE }
    }
}

impl OracleConfig {
    /// Same search with `factor` times the restarts and steps.
    pub fn scaled(&self, factor: usize) -> Self {
        Self { restarts: self.restarts * factor, steps: self.steps * factor, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub witness: WitnessConfig,
    pub oracle: OracleConfig,
    pub execution: Execution,
}

impl EngineConfig {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.witness.tolerance = tol;
        self.oracle.tolerance = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.witness.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnstableReason {
    /// No free diagonal entry at all.
    NoSink,
    /// Vertices whose strongly connected component has no sink.
    SccWithoutSink { violating: Vec<usize> },
    /// No Hamiltonian `k`-subgraph.
    NoHamiltonianK { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleStats {
    pub restarts: usize,
    pub best_abscissa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleWitness {
    pub matrix: RealMatrix,
    pub eigenvalues: Vec<Eigenvalue>,
    pub abscissa: f64,
    /// 0-based index of the succeeding restart.
    pub restart: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub witness: Option<OracleWitness>,
    pub stats: OracleStats,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StabilityVerdict {
    ProvedUnstable(UnstableReason),
    ProvedStable(StableProof),
    Unknown { oracle_stats: OracleStats, diagnostics: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum StableProof {
    Chain(Box<WitnessCertificate>),
    Oracle { witness: OracleWitness, stats: OracleStats, diagnostics: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerdictTag {
    ProvedUnstable,
    ProvedStable,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReasonTag {
    NoSink,
    SccWithoutSink,
    NoHamiltonianK,
    ChainFound,
    OracleFound,
    Exhausted,
}

impl StabilityVerdict {
    pub fn tag(&self) -> VerdictTag {
        match self {
            Self::ProvedUnstable(_) => VerdictTag::ProvedUnstable,
            Self::ProvedStable(_) => VerdictTag::ProvedStable,
            Self::Unknown { .. } => VerdictTag::Unknown,
        }
    }

    pub fn reason(&self) -> ReasonTag {
        match self {
            Self::ProvedUnstable(UnstableReason::NoSink) => ReasonTag::NoSink,
            Self::ProvedUnstable(UnstableReason::SccWithoutSink { .. }) => ReasonTag::SccWithoutSink,
            Self::ProvedUnstable(UnstableReason::NoHamiltonianK { .. }) => ReasonTag::NoHamiltonianK,
            Self::ProvedStable(StableProof::Chain(_)) => ReasonTag::ChainFound,
            Self::ProvedStable(StableProof::Oracle { .. }) => ReasonTag::OracleFound,
            Self::Unknown { .. } => ReasonTag::Exhausted,
        }
    }

    pub fn is_stable(&self) -> bool {
        self.tag() == VerdictTag::ProvedStable
    }

    pub fn is_unstable(&self) -> bool {
        self.tag() == VerdictTag::ProvedUnstable
    }

    pub fn certificate(&self) -> Option<&WitnessCertificate> {
        match self {
            Self::ProvedStable(StableProof::Chain(c)) => Some(c),
            _ => None,
        }
    }

    pub fn chain_ordering(&self) -> Option<&[usize]> {
        self.certificate().map(|c| c.ordering.as_slice())
    }
}

/// Json form of a verdict; vertex labels are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictJson {
    pub tag: VerdictTag,
    pub reason: ReasonTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violating: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<WitnessCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_witness: Option<OracleWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_stats: Option<OracleStats>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl From<&StabilityVerdict> for VerdictJson {
    fn from(v: &StabilityVerdict) -> Self {
        let mut j = VerdictJson {
            tag: v.tag(),
            reason: v.reason(),
            k: None,
            violating: None,
            certificate: None,
            oracle_witness: None,
            oracle_stats: None,
            diagnostics: Vec::new(),
        };
        match v {
            StabilityVerdict::ProvedUnstable(UnstableReason::NoSink) => {}
            StabilityVerdict::ProvedUnstable(UnstableReason::SccWithoutSink { violating }) => {
                j.violating = Some(violating.iter().map(|v| v + 1).collect());
            }
            StabilityVerdict::ProvedUnstable(UnstableReason::NoHamiltonianK { k }) => j.k = Some(*k),
            StabilityVerdict::ProvedStable(StableProof::Chain(c)) => j.certificate = Some((**c).clone()),
            StabilityVerdict::ProvedStable(StableProof::Oracle { witness, stats, diagnostics }) => {
                j.oracle_witness = Some(witness.clone());
                j.oracle_stats = Some(*stats);
                j.diagnostics = diagnostics.clone();
            }
            StabilityVerdict::Unknown { oracle_stats, diagnostics } => {
                j.oracle_stats = Some(*oracle_stats);
                j.diagnostics = diagnostics.clone();
            }
        }
        j
    }
}

impl TryFrom<VerdictJson> for StabilityVerdict {
    type Error = String;

    fn try_from(j: VerdictJson) -> Result<Self, String> {
        let missing = |what: &str| format!("{:?} verdict without {what}", j.reason);
        Ok(match j.reason {
            ReasonTag::NoSink => StabilityVerdict::ProvedUnstable(UnstableReason::NoSink),
            ReasonTag::SccWithoutSink => {
                let labels = j.violating.clone().ok_or_else(|| missing("violating"))?;
                let violating =
                    labels.iter().map(|v| v.checked_sub(1).ok_or("vertices are 1-based")).collect::<Result<_, _>>()?;
                StabilityVerdict::ProvedUnstable(UnstableReason::SccWithoutSink { violating })
            }
            ReasonTag::NoHamiltonianK => {
                StabilityVerdict::ProvedUnstable(UnstableReason::NoHamiltonianK { k: j.k.ok_or_else(|| missing("k"))? })
            }
            ReasonTag::ChainFound => StabilityVerdict::ProvedStable(StableProof::Chain(Box::new(
                j.certificate.clone().ok_or_else(|| missing("certificate"))?,
            ))),
            ReasonTag::OracleFound => StabilityVerdict::ProvedStable(StableProof::Oracle {
                witness: j.oracle_witness.clone().ok_or_else(|| missing("oracle_witness"))?,
                stats: j.oracle_stats.ok_or_else(|| missing("oracle_stats"))?,
                diagnostics: j.diagnostics.clone(),
            }),
            ReasonTag::Exhausted => StabilityVerdict::Unknown {
                oracle_stats: j.oracle_stats.ok_or_else(|| missing("oracle_stats"))?,
                diagnostics: j.diagnostics.clone(),
            },
        })
    }
}

impl Serialize for StabilityVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        VerdictJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for StabilityVerdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        StabilityVerdict::try_from(VerdictJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Whether the exact characteristic polynomial of `m` passes the Routh test.
/// `None` above [`MAX_EXACT_ROUTH_N`].
pub fn exact_routh(m: &RealMatrix) -> Option<bool> {
    if m.n() > MAX_EXACT_ROUTH_N {
        return None;
    }
    let exact = ExactMatrix::from_real(m).ok()?;
    Some(char_poly(&exact).ok()?.is_hurwitz())
}

/// Float abscissa below `−tol` and, where feasible, an exact Routh pass.
fn accepted(m: &RealMatrix, abscissa: f64, tol: f64) -> bool {
    abscissa < -tol && exact_routh(m).unwrap_or(true)
}

struct RestartResult {
    witness: Option<OracleWitness>,
    best: f64,
}

fn run_restart(p: &SparsityPattern, config: &OracleConfig, seed: u64, restart: usize) -> RestartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let m = p.dimension();
    let tol = config.tolerance;
    let mut x: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let build = |x: &[f64]| RealMatrix::from_pattern_values(p, x);
    let mut mat = build(&x);
    let mut f = abscissa_or_inf(&mat);
    let done = |mat: &RealMatrix, f: f64| -> Option<OracleWitness> {
        if !accepted(mat, f, tol) {
            return None;
        }
        let report = spectral_abscissa(mat, tol).ok()?;
        Some(OracleWitness { matrix: mat.clone(), eigenvalues: report.eigenvalues, abscissa: report.abscissa, restart })
    };
    if let Some(w) = done(&mat, f) {
        return RestartResult { best: f, witness: Some(w) };
    }
    if m == 0 {
        return RestartResult { witness: None, best: f };
    }
    let mut step = config.initial_step;
    let mut failures = 0;
    for _ in 0..config.steps {
        let coord = rng.gen_range(0..m);
        let delta = step * rng.gen_range(-1.0..=1.0);
        let old = x[coord];
        x[coord] = old + delta;
        let cand = build(&x);
        let fc = abscissa_or_inf(&cand);
        if fc < f {
            mat = cand;
            f = fc;
            failures = 0;
            if let Some(w) = done(&mat, f) {
                return RestartResult { best: f, witness: Some(w) };
            }
        } else {
            x[coord] = old;
            failures += 1;
            if failures >= 2 * m {
                step *= 0.5;
                failures = 0;
                if step < MIN_STEP {
                    break;
                }
            }
        }
    }
    RestartResult { witness: None, best: f }
}

/// Multi-start coordinate descent on the spectral abscissa over the free
/// entries. Restarts run in rounds; the lowest succeeding restart index
/// wins, so the result does not depend on the execution mode.
pub fn oracle_search(p: &SparsityPattern, config: &OracleConfig, seed: u64, execution: Execution) -> OracleOutcome {
    let mut best = f64::INFINITY;
    let mut ran = 0;
    while ran < config.restarts {
        let batch = ORACLE_BATCH.min(config.restarts - ran);
        let results = par::map_range(execution, batch, |i| run_restart(p, config, seed, ran + i));
        ran += batch;
        for r in results {
            best = best.min(r.best);
            if let Some(w) = r.witness {
                return OracleOutcome { witness: Some(w), stats: OracleStats { restarts: ran, best_abscissa: best } };
            }
        }
    }
    OracleOutcome { witness: None, stats: OracleStats { restarts: ran, best_abscissa: best } }
}

/// Graph conditions first, then the chain and its witness, then the oracle.
pub fn classify(p: &SparsityPattern, config: &EngineConfig, seed: u64) -> StabilityVerdict {
    if !p.has_sink() {
        return StabilityVerdict::ProvedUnstable(UnstableReason::NoSink);
    }
    if let SinkCheck::Fail { violating } = check_scc_sink(p) {
        return StabilityVerdict::ProvedUnstable(UnstableReason::SccWithoutSink { violating });
    }
    let mut diagnostics = Vec::new();
    match check_necessary(p) {
        Ok(NecessaryCheck::Fail { k }) => {
            return StabilityVerdict::ProvedUnstable(UnstableReason::NoHamiltonianK { k })
        }
        Ok(NecessaryCheck::Pass) => {}
        Err(e) => diagnostics.push(format!("necessary check skipped: {e}")),
    }
    match find_nested_chain(p) {
        Ok(Some(chain)) => match synthesize_from_chain(p, &chain, &config.witness, seed) {
            Ok(cert) => return StabilityVerdict::ProvedStable(StableProof::Chain(Box::new(cert))),
            Err(e) => diagnostics.push(format!("witness synthesis failed: {e}")),
        },
        Ok(None) => diagnostics.push("no nested chain".to_string()),
        Err(e) => diagnostics.push(format!("chain search skipped: {e}")),
    }
    let outcome = oracle_search(p, &config.oracle, seed, config.execution);
    match outcome.witness {
        Some(witness) => {
            StabilityVerdict::ProvedStable(StableProof::Oracle { witness, stats: outcome.stats, diagnostics })
        }
        None => StabilityVerdict::Unknown { oracle_stats: outcome.stats, diagnostics },
    }
}

/// `classify` over a batch, in input order.
pub fn classify_batch(patterns: &[SparsityPattern], config: &EngineConfig, seed: u64) -> Vec<StabilityVerdict> {
    let inner = EngineConfig { execution: Execution::Sequential, ..*config };
    par::map(config.execution, patterns, |p| classify(p, &inner, seed))
}

/// Re-checks every claim of a certificate from primitive operations.
/// Returns the list of failed claims.
pub fn verify_certificate(cert: &WitnessCertificate, tolerance: f64) -> Result<(), Vec<String>> {
    let mut failed = Vec::new();
    let p = &cert.pattern;
    let n = p.n();
    if cert.core.n() != n || cert.witness.n() != n || cert.stabilizer.len() != n {
        return Err(vec![format!("size mismatch with pattern n = {n}")]);
    }
    for i in 0..n {
        for j in 0..n {
            let core_zero = cert.core.get(i, j).is_zero();
            let wit_zero = cert.witness.get(i, j) == 0.0;
            if p.is_free(i, j) {
                if core_zero || wit_zero {
                    failed.push(format!("free entry ({},{}) is zero", i + 1, j + 1));
                }
            } else if !core_zero || !wit_zero {
                failed.push(format!("entry ({},{}) lies outside the pattern", i + 1, j + 1));
            }
        }
    }
    if let Err(e) = cert.chain().verify(p) {
        failed.push(format!("chain: {e}"));
        return Err(failed);
    }
    let ordered = cert.core.conjugate(&ordering_permutation(&cert.ordering)).expect("sizes match");
    let minors = leading_principal_minors(&ordered);
    if minors != cert.minors {
        failed.push("recorded minors differ from recomputed minors".to_string());
    }
    if let Some(k) = minors.iter().position(|m| m.is_zero()) {
        failed.push(format!("det_{} is zero", k + 1));
    }
    let product = cert.core.to_real().scale_rows(&cert.stabilizer);
    if product != cert.witness {
        failed.push("witness differs from diag(stabilizer) * core".to_string());
    }
    match spectral_abscissa(&cert.witness, tolerance) {
        Ok(r) if r.hurwitz => {}
        Ok(r) => failed.push(format!("abscissa {:e} is not below -{tolerance:e}", r.abscissa)),
        Err(e) => failed.push(format!("eigenvalues: {e}")),
    }
    if exact_routh(&cert.witness) == Some(false) {
        failed.push("exact Routh test fails".to_string());
    }
    if !cert.spectral.hurwitz {
        failed.push("certificate does not claim Hurwitz".to_string());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(failed)
    }
}

/// Re-checks a verdict against its pattern.
pub fn verify_verdict(v: &StabilityVerdict, p: &SparsityPattern, tolerance: f64) -> Result<(), Vec<String>> {
    let fail = |m: String| Err(vec![m]);
    match v {
        StabilityVerdict::ProvedUnstable(UnstableReason::NoSink) => {
            if p.has_sink() {
                return fail("pattern has a sink".into());
            }
        }
        StabilityVerdict::ProvedUnstable(UnstableReason::SccWithoutSink { violating }) => match check_scc_sink(p) {
            SinkCheck::Fail { violating: v2 } if v2 == *violating => {}
            other => return fail(format!("sink check gives {other:?}")),
        },
        StabilityVerdict::ProvedUnstable(UnstableReason::NoHamiltonianK { k }) => match hamiltonian_k_exists(p, *k) {
            Ok(None) => {}
            Ok(Some(w)) => return fail(format!("Hamiltonian {k}-subgraph on {}", w.subset)),
            Err(e) => return fail(e.to_string()),
        },
        StabilityVerdict::ProvedStable(StableProof::Chain(cert)) => {
            if cert.pattern != *p {
                return fail("certificate is for another pattern".into());
            }
            verify_certificate(cert, tolerance)?;
        }
        StabilityVerdict::ProvedStable(StableProof::Oracle { witness, .. }) => {
            if !witness.matrix.respects(p) {
                return fail("oracle matrix leaves the pattern".into());
            }
            match spectral_abscissa(&witness.matrix, tolerance) {
                Ok(r) if r.hurwitz => {}
                Ok(r) => return fail(format!("oracle abscissa {:e}", r.abscissa)),
                Err(e) => return fail(e.to_string()),
            }
            if exact_routh(&witness.matrix) == Some(false) {
                return fail("oracle matrix fails the exact Routh test".into());
            }
        }
        StabilityVerdict::Unknown { .. } => {
            if check_necessary(p) != Ok(NecessaryCheck::Pass) || !matches!(check_scc_sink(p), SinkCheck::Pass) {
                return fail("unknown verdict on a pattern failing a necessary condition".into());
            }
            if matches!(find_nested_chain(p), Ok(Some(_))) {
                return fail("unknown verdict on a pattern with a nested chain".into());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(n: usize, e: &[(usize, usize)]) -> SparsityPattern {
        SparsityPattern::from_one_based(n, e.iter().copied()).unwrap()
    }

    fn loop_three_cycle() -> SparsityPattern {
        pat(3, &[(1, 1), (1, 2), (2, 3), (3, 1)])
    }

    fn nested_three() -> SparsityPattern {
        pat(3, &[(1, 1), (1, 2), (2, 1), (2, 3), (3, 1)])
    }

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn example_verdicts() {
        let v = classify(&loop_three_cycle(), &cfg(), 0);
        assert_eq!(v, StabilityVerdict::ProvedUnstable(UnstableReason::NoHamiltonianK { k: 2 }));
        let v = classify(&nested_three(), &cfg(), 0);
        assert_eq!(v.chain_ordering(), Some(&[0, 1, 2][..]));
        verify_verdict(&v, &nested_three(), 1e-9).unwrap();
    }

    #[test]
    fn no_sink_and_scc_reasons() {
        let z = SparsityPattern::zero_diagonal(3).unwrap();
        assert_eq!(classify(&z, &cfg(), 0), StabilityVerdict::ProvedUnstable(UnstableReason::NoSink));
        let p = pat(2, &[(1, 2), (2, 2)]);
        let v = classify(&p, &cfg(), 0);
        assert_eq!(v, StabilityVerdict::ProvedUnstable(UnstableReason::SccWithoutSink { violating: vec![0] }));
        verify_verdict(&v, &p, 1e-9).unwrap();
    }

    #[test]
    fn oracle_examples() {
        let o =
            oracle_search(&SparsityPattern::diagonal(2).unwrap(), &OracleConfig::default(), 0, Execution::Sequential);
        let w = o.witness.unwrap();
        assert!(w.abscissa <= -1e-9);
        assert!(oracle_search(&loop_three_cycle(), &OracleConfig::default(), 0, Execution::Sequential)
            .witness
            .is_none());
        let o = oracle_search(&nested_three(), &OracleConfig::default(), 0, Execution::Sequential);
        let w = o.witness.unwrap();
        assert!(w.matrix.respects(&nested_three()));
        assert!(spectral_abscissa(&w.matrix, 1e-9).unwrap().hurwitz);
    }

    #[test]
    fn oracle_is_mode_independent() {
        for p in [nested_three(), loop_three_cycle()] {
            let c = OracleConfig { restarts: 10, steps: 50, ..Default::default() };
            let a = oracle_search(&p, &c, 7, Execution::Sequential);
            let b = oracle_search(&p, &c, 7, Execution::Parallel);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn certificate_negatives() {
        let v = classify(&nested_three(), &cfg(), 0);
        let cert = v.certificate().unwrap().clone();
        verify_certificate(&cert, 1e-9).unwrap();

        let mut bad = cert.clone();
        bad.witness.set(2, 2, 1.0);
        let errs = verify_certificate(&bad, 1e-9).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("outside the pattern")), "{errs:?}");

        let mut bad = cert.clone();
        bad.stabilizer = bad.stabilizer.iter().map(|d| d.abs()).collect();
        bad.witness = bad.core.to_real().scale_rows(&bad.stabilizer);
        let errs = verify_certificate(&bad, 1e-9).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("abscissa") || e.contains("Routh")), "{errs:?}");
    }

    #[test]
    fn verdict_json() {
        let v = classify(&loop_three_cycle(), &cfg(), 0);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"tag":"ProvedUnstable","reason":"NoHamiltonianK","k":2}"#);
        for p in [nested_three(), pat(2, &[(1, 2), (2, 2)])] {
            let v = classify(&p, &cfg(), 0);
            let s = serde_json::to_string(&v).unwrap();
            assert_eq!(serde_json::from_str::<StabilityVerdict>(&s).unwrap(), v);
        }
    }

    #[test]
    fn batch_matches_single() {
        let ps = vec![loop_three_cycle(), nested_three(), SparsityPattern::diagonal(2).unwrap()];
        let batch = classify_batch(&ps, &cfg(), 4);
        for (p, v) in ps.iter().zip(&batch) {
            assert_eq!(*v, classify(p, &cfg(), 4));
        }
    }
}
