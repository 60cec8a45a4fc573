//! Explicit Hurwitz matrices on a pattern.
//!
//! The pipeline takes a nested chain, samples an integer matrix whose
//! chain-ordered leading minors are all nonzero, and then searches for a
//! diagonal `D` making `D·A` Hurwitz by hierarchical scaling.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{leading_principal_minors, parse_rational, random_integer_matrix, rational_to_string, ExactMatrix};
use crate::graph::{find_nested_chain, ChainCertificate, CycleDecomposition, GraphError};
use crate::pattern::SparsityPattern;
use crate::permutation::{factorial, Permutation};
use crate::spectral::{spectral_abscissa, RealMatrix, SpectralReport, DEFAULT_TOLERANCE};

/// `corollary_stabilize` scans all of `S_n`.
pub const MAX_COROLLARY_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WitnessConfig {
    pub tolerance: f64,
    pub t_start: f64,
    pub t_factor: f64,
    /// Geometric steps of the scaling cascade.
    pub t_cap: usize,
    pub jitter_attempts: usize,
    pub jitter_seed: u64,
    /// Resampling budget of [`chain_generic_matrix`].
    pub retry_cap: usize,
    pub sample_bound: i64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            t_start: 1.0,
            t_factor: 0.5,
            t_cap: 200,
            jitter_attempts: 32,
            jitter_seed: 0,
            retry_cap: 64,
            sample_bound: 1000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("entry ({i},{j}) of the support permutation is not free")]
    SupportNotFree { i: usize, j: usize },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("the assignment is singular")]
    Singular,
    #[error("leading principal minor det_{k} is zero")]
    ZeroMinor { k: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("no nested chain exists for this pattern")]
    NoChain,
    #[error("chain does not verify: {0}")]
    BadChain(String),
    #[error("{tries} samples without all minors nonzero")]
    RetryCapExceeded { tries: usize },
    #[error("no stabilizer found after {attempts} attempts (best abscissa {best_abscissa:e})")]
    StabilizationFailed { attempts: usize, best_abscissa: f64 },
    #[error("corollary scan is limited to n <= {MAX_COROLLARY_N}, got n = {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

impl WitnessConfig {
    pub fn validate(&self) -> Result<(), WitnessError> {
        let bad = |m: &str| Err(WitnessError::BadConfig(m.to_string()));
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance must be positive");
        }
        if !(self.t_start > 0.0 && self.t_start.is_finite()) {
            return bad("t_start must be positive");
        }
        if !(self.t_factor > 0.0 && self.t_factor < 1.0) {
            return bad("t_factor must lie in (0, 1)");
        }
        if self.t_cap == 0 || self.retry_cap == 0 {
            return bad("t_cap and retry_cap must be positive");
        }
        if self.sample_bound <= 0 {
            return bad("sample_bound must be positive");
        }
        Ok(())
    }
}

/// `n!` on the support permutation's entries, `1` on every other free entry.
pub fn nonsingular_assignment(p: &SparsityPattern, support: &Permutation) -> Result<ExactMatrix, WitnessError> {
    let n = p.n();
    if support.len() != n {
        return Err(WitnessError::SizeMismatch(support.len(), n));
    }
    for i in 0..n {
        if !p.is_free(i, support.apply(i)) {
            return Err(WitnessError::SupportNotFree { i: i + 1, j: support.apply(i) + 1 });
        }
    }
    let big = BigRational::from_integer(factorial(n).into());
    let one = BigRational::from_integer(1.into());
    let mut m = ExactMatrix::zeros(n);
    for (i, j) in p.entries() {
        m.set(i, j, if support.apply(i) == j { big.clone() } else { one.clone() });
    }
    if m.determinant().is_zero() {
        return Err(WitnessError::Singular);
    }
    Ok(m)
}

/// Relabeling that moves `ordering[k]` to position `k`.
pub fn ordering_permutation(ordering: &[usize]) -> Permutation {
    Permutation::from_ordering(ordering).expect("ordering is a permutation")
}

/// Integer matrix on `p` whose chain-ordered leading minors are all nonzero.
pub fn chain_generic_matrix(
    p: &SparsityPattern,
    chain: &ChainCertificate,
    seed: u64,
    config: &WitnessConfig,
) -> Result<ExactMatrix, WitnessError> {
    chain.verify(p).map_err(WitnessError::BadChain)?;
    let sigma = ordering_permutation(&chain.ordering);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..config.retry_cap {
        let a = random_integer_matrix(p, config.sample_bound, &mut rng);
        let c = a.conjugate(&sigma).expect("sizes match");
        if (1..=p.n()).all(|k| !c.leading_minor(k).is_zero()) {
            return Ok(a);
        }
    }
    Err(WitnessError::RetryCapExceeded { tries: config.retry_cap })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stabilizer {
    pub d: Vec<f64>,
    pub report: SpectralReport,
    /// Cascade parameter at success.
    pub t: f64,
    pub attempts: usize,
}

/// Signs `s_k = −sign(det_k / det_{k−1})`.
fn cascade_signs(a: &RealMatrix) -> Result<Vec<f64>, WitnessError> {
    let exact = ExactMatrix::from_real(a).map_err(|_| WitnessError::NonFinite)?;
    let minors = leading_principal_minors(&exact);
    let mut prev_positive = true;
    let mut signs = Vec::with_capacity(minors.len());
    for (k, m) in minors.iter().enumerate() {
        if m.is_zero() {
            return Err(WitnessError::ZeroMinor { k: k + 1 });
        }
        let ratio_positive = m.is_positive() == prev_positive;
        signs.push(if ratio_positive { -1.0 } else { 1.0 });
        prev_positive = m.is_positive();
    }
    Ok(signs)
}

/// Tries `d`, rescaled by a positive factor so a negative abscissa clears
/// the tolerance.
fn try_diagonal(a: &RealMatrix, d: &[f64], tol: f64) -> Option<(Vec<f64>, SpectralReport, f64)> {
    let report = spectral_abscissa(&a.scale_rows(d), tol).ok()?;
    if report.hurwitz {
        return Some((d.to_vec(), report.clone(), report.abscissa));
    }
    if report.abscissa < 0.0 && report.abscissa.is_finite() {
        let c = 2.0 * tol / -report.abscissa;
        let scaled: Vec<f64> = d.iter().map(|v| v * c).collect();
        let again = spectral_abscissa(&a.scale_rows(&scaled), tol).ok()?;
        if again.hurwitz {
            return Some((scaled, again.clone(), again.abscissa));
        }
        return None;
    }
    None
}

/// Diagonal `D` with `D·A` Hurwitz for a matrix whose leading principal
/// minors are all nonzero.
///
/// Runs the cascade `d_k = s_k t^{k−1}` over `t = t_start · t_factor^h`,
/// then jittered magnitudes around the best `t` seen.
pub fn diagonal_stabilize(a: &RealMatrix, config: &WitnessConfig) -> Result<Stabilizer, WitnessError> {
    config.validate()?;
    let n = a.n();
    let signs = cascade_signs(a)?;
    let tol = config.tolerance;
    let mut best = (f64::INFINITY, config.t_start);
    let mut t = config.t_start;
    let mut attempts = 0;
    for _ in 0..=config.t_cap {
        attempts += 1;
        let d: Vec<f64> = (0..n).map(|k| signs[k] * t.powi(k as i32)).collect();
        if d.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            break;
        }
        match try_diagonal(a, &d, tol) {
            Some((d, report, _)) => return Ok(Stabilizer { d, report, t, attempts }),
            None => {
                let abscissa = crate::spectral::abscissa_or_inf(&a.scale_rows(&d));
                if abscissa < best.0 {
                    best = (abscissa, t);
                }
            }
        }
        t *= config.t_factor;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.jitter_seed);
    let t = best.1;
    for _ in 0..config.jitter_attempts {
        attempts += 1;
        let d: Vec<f64> = (0..n).map(|k| signs[k] * t.powi(k as i32) * 2f64.powf(rng.gen_range(-1.0..1.0))).collect();
        if let Some((d, report, _)) = try_diagonal(a, &d, tol) {
            return Ok(Stabilizer { d, report, t, attempts });
        }
    }
    Err(WitnessError::StabilizationFailed { attempts, best_abscissa: best.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryStabilizer {
    pub sigma: Permutation,
    pub d: Vec<f64>,
    pub report: SpectralReport,
}

/// Scans `σ ∈ S_n` for nonzero conjugated minors and stabilizes the first
/// hit. `None` does not mean `A` is not diagonally stabilizable.
pub fn corollary_stabilize(
    a: &RealMatrix,
    config: &WitnessConfig,
) -> Result<Option<CorollaryStabilizer>, WitnessError> {
    let n = a.n();
    if n > MAX_COROLLARY_N {
        return Err(WitnessError::TooLarge(n));
    }
    let exact = ExactMatrix::from_real(a).map_err(|_| WitnessError::NonFinite)?;
    for sigma in Permutation::all(n) {
        let c = exact.conjugate(&sigma).expect("sizes match");
        if (1..=n).any(|k| c.leading_minor(k).is_zero()) {
            continue;
        }
        let inner = diagonal_stabilize(&a.conjugate(sigma.images()), config)?;
        let d: Vec<f64> = (0..n).map(|v| inner.d[sigma.apply(v)]).collect();
        let report = spectral_abscissa(&a.scale_rows(&d), config.tolerance).map_err(|_| WitnessError::NonFinite)?;
        return Ok(Some(CorollaryStabilizer { sigma, d, report }));
    }
    Ok(None)
}

/// Hurwitz matrix on a pattern with everything needed to re-check it.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate {
    pub pattern: SparsityPattern,
    /// Chain ordering, 0-based.
    pub ordering: Vec<usize>,
    pub prefix_cycles: Vec<CycleDecomposition>,
    /// Integer matrix before stabilization.
    pub core: ExactMatrix,
    /// `diag(stabilizer) · core`.
    pub witness: RealMatrix,
    pub stabilizer: Vec<f64>,
    /// `det_1 .. det_n` of the chain-ordered core.
    pub minors: Vec<BigRational>,
    pub spectral: SpectralReport,
}

impl WitnessCertificate {
    pub fn chain(&self) -> ChainCertificate {
        ChainCertificate { ordering: self.ordering.clone(), prefix_cycles: self.prefix_cycles.clone() }
    }
}

/// Chain → generic integer matrix → cascade on the chain-ordered matrix →
/// stabilizer moved back to the original labels.
pub fn synthesize_stable_witness(
    p: &SparsityPattern,
    config: &WitnessConfig,
    seed: u64,
) -> Result<WitnessCertificate, WitnessError> {
    let chain = find_nested_chain(p)?.ok_or(WitnessError::NoChain)?;
    synthesize_from_chain(p, &chain, config, seed)
}

pub fn synthesize_from_chain(
    p: &SparsityPattern,
    chain: &ChainCertificate,
    config: &WitnessConfig,
    seed: u64,
) -> Result<WitnessCertificate, WitnessError> {
    config.validate()?;
    let core = chain_generic_matrix(p, chain, seed, config)?;
    let sigma = ordering_permutation(&chain.ordering);
    let ordered = core.conjugate(&sigma).expect("sizes match");
    let minors = leading_principal_minors(&ordered);
    let mut cfg = *config;
    cfg.jitter_seed = seed;
    let inner = diagonal_stabilize(&ordered.to_real(), &cfg)?;
    let n = p.n();
    let stabilizer: Vec<f64> = (0..n).map(|v| inner.d[sigma.apply(v)]).collect();
    let witness = core.to_real().scale_rows(&stabilizer);
    let spectral = spectral_abscissa(&witness, config.tolerance).map_err(|_| WitnessError::NonFinite)?;
    if !spectral.hurwitz {
        return Err(WitnessError::StabilizationFailed { attempts: inner.attempts, best_abscissa: spectral.abscissa });
    }
    Ok(WitnessCertificate {
        pattern: p.clone(),
        ordering: chain.ordering.clone(),
        prefix_cycles: chain.prefix_cycles.clone(),
        core,
        witness,
        stabilizer,
        minors,
        spectral,
    })
}

/// Json form of a certificate; indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub pattern: SparsityPattern,
    pub ordering: Vec<usize>,
    pub prefix_cycles: Vec<CycleDecomposition>,
    pub core: ExactMatrix,
    pub witness: RealMatrix,
    pub stabilizer: Vec<f64>,
    pub minors: Vec<String>,
    pub eigenvalues: Vec<crate::spectral::Eigenvalue>,
    pub abscissa: f64,
    pub hurwitz: bool,
}

impl From<&WitnessCertificate> for CertificateJson {
    fn from(c: &WitnessCertificate) -> Self {
        Self {
            pattern: c.pattern.clone(),
            ordering: c.ordering.iter().map(|v| v + 1).collect(),
            prefix_cycles: c.prefix_cycles.clone(),
            core: c.core.clone(),
            witness: c.witness.clone(),
            stabilizer: c.stabilizer.clone(),
            minors: c.minors.iter().map(rational_to_string).collect(),
            eigenvalues: c.spectral.eigenvalues.clone(),
            abscissa: c.spectral.abscissa,
            hurwitz: c.spectral.hurwitz,
        }
    }
}

impl TryFrom<CertificateJson> for WitnessCertificate {
    type Error = String;

    fn try_from(j: CertificateJson) -> Result<Self, String> {
        let zero_based = |v: usize| v.checked_sub(1).ok_or_else(|| "indices are 1-based".to_string());
        let ordering = j.ordering.iter().map(|&v| zero_based(v)).collect::<Result<Vec<_>, _>>()?;
        let minors = j.minors.iter().map(|s| parse_rational(s).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
        Ok(WitnessCertificate {
            pattern: j.pattern,
            ordering,
            prefix_cycles: j.prefix_cycles,
            core: j.core,
            witness: j.witness,
            stabilizer: j.stabilizer,
            minors,
            spectral: SpectralReport { eigenvalues: j.eigenvalues, abscissa: j.abscissa, hurwitz: j.hurwitz },
        })
    }
}

impl Serialize for WitnessCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CertificateJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WitnessCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = CertificateJson::deserialize(d)?;
        WitnessCertificate::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(n: usize, e: &[(usize, usize)]) -> SparsityPattern {
        SparsityPattern::from_one_based(n, e.iter().copied()).unwrap()
    }

    fn nested_three() -> SparsityPattern {
        pat(3, &[(1, 1), (1, 2), (2, 1), (2, 3), (3, 1)])
    }

    fn nested_five() -> SparsityPattern {
        SparsityPattern::from_mask("**000\n*0*00\n*00*0\n00*0*\n*0000").unwrap()
    }

    fn real(rows: &[&[f64]]) -> RealMatrix {
        RealMatrix::from_rows(rows).unwrap()
    }

    fn cfg() -> WitnessConfig {
        WitnessConfig::default()
    }

    #[test]
    fn assignment_one_by_one() {
        let p = SparsityPattern::diagonal(1).unwrap();
        let m = nonsingular_assignment(&p, &Permutation::identity(1)).unwrap();
        assert_eq!(m.determinant(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn assignment_full_three() {
        let p = SparsityPattern::full(3).unwrap();
        let m = nonsingular_assignment(&p, &Permutation::identity(3)).unwrap();
        // 6·(36−1) − (6−1) + (1−6) = 200
        assert_eq!(m.determinant(), BigRational::from_integer(200.into()));
    }

    #[test]
    fn assignment_on_three_cycle() {
        let support = Permutation::from_one_line(&[2, 3, 1]).unwrap();
        let m = nonsingular_assignment(&nested_three(), &support).unwrap();
        assert_eq!(m.to_strings()[0], vec!["1", "6", "0"]);
        // rows (1,6,0),(1,0,6),(6,0,0): det = 216
        assert_eq!(m.determinant(), BigRational::from_integer(216.into()));
    }

    #[test]
    fn assignment_rejects_unsupported_permutation() {
        let r = nonsingular_assignment(&nested_three(), &Permutation::identity(3));
        assert_eq!(r, Err(WitnessError::SupportNotFree { i: 2, j: 2 }));
    }

    #[test]
    fn generic_matrix_has_nonzero_chain_minors() {
        for p in [SparsityPattern::diagonal(3).unwrap(), nested_three(), nested_five()] {
            let chain = find_nested_chain(&p).unwrap().unwrap();
            let a = chain_generic_matrix(&p, &chain, 5, &cfg()).unwrap();
            assert!(a.respects(&p));
            let c = a.conjugate(&ordering_permutation(&chain.ordering)).unwrap();
            assert!(leading_principal_minors(&c).iter().all(|m| !m.is_zero()));
        }
    }

    #[test]
    fn stabilize_diagonal() {
        let s = diagonal_stabilize(&real(&[&[1.0, 0.0], &[0.0, -2.0]]), &cfg()).unwrap();
        assert!(s.d[0] < 0.0 && s.d[1] > 0.0);
        assert!(s.report.hurwitz);
    }

    #[test]
    fn stabilize_dense_examples() {
        for a in [real(&[&[1.0, 2.0], &[3.0, 4.0]]), real(&[&[-1.0, 2.0], &[-1.0, 0.0]])] {
            let s = diagonal_stabilize(&a, &cfg()).unwrap();
            let r = spectral_abscissa(&a.scale_rows(&s.d), 1e-9).unwrap();
            assert!(r.hurwitz, "{a:?} {s:?}");
            // A·D is similar to D·A
            assert!(spectral_abscissa(&a.scale_cols(&s.d), 1e-9).unwrap().hurwitz);
        }
    }

    #[test]
    fn stabilize_rejects_zero_minor() {
        let a = real(&[&[0.0, -1.0], &[2.0, -1.0]]);
        assert_eq!(diagonal_stabilize(&a, &cfg()).unwrap_err(), WitnessError::ZeroMinor { k: 1 });
    }

    #[test]
    fn corollary_examples() {
        let a = real(&[&[0.0, -1.0], &[2.0, -1.0]]);
        let c = corollary_stabilize(&a, &cfg()).unwrap().unwrap();
        assert_eq!(c.sigma.one_line(), vec![2, 1]);
        assert!(c.report.hurwitz && c.report.abscissa < -1e-9);

        let c = corollary_stabilize(&RealMatrix::identity(2), &cfg()).unwrap().unwrap();
        assert!(c.sigma.is_identity());
        assert!(c.d.iter().all(|v| *v < 0.0));

        assert_eq!(corollary_stabilize(&RealMatrix::zeros(3), &cfg()).unwrap(), None);
    }

    #[test]
    fn pipeline_on_diagonal_pattern() {
        let p = SparsityPattern::diagonal(4).unwrap();
        let c = synthesize_stable_witness(&p, &cfg(), 0).unwrap();
        assert!(c.spectral.hurwitz);
        for i in 0..4 {
            assert!(c.witness.get(i, i) < 0.0);
        }
    }

    #[test]
    fn pipeline_on_example_pattern() {
        let p = nested_three();
        let c = synthesize_stable_witness(&p, &cfg(), 1).unwrap();
        assert_eq!(c.ordering, vec![0, 1, 2]);
        for (i, j) in [(0, 2), (1, 1), (2, 1), (2, 2)] {
            assert_eq!(c.witness.get(i, j), 0.0);
        }
        for (i, j) in p.entries() {
            assert_ne!(c.witness.get(i, j), 0.0);
        }
        assert!(c.spectral.abscissa < -1e-9);
    }

    #[test]
    fn pipeline_on_five_vertex_chain() {
        let c = synthesize_stable_witness(&nested_five(), &cfg(), 2).unwrap();
        assert!(c.spectral.hurwitz);
        assert!(c.witness.respects(&nested_five()));
    }

    #[test]
    fn pipeline_requires_chain() {
        let p = pat(3, &[(1, 1), (1, 2), (2, 3), (3, 1)]);
        assert_eq!(synthesize_stable_witness(&p, &cfg(), 0), Err(WitnessError::NoChain));
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = synthesize_stable_witness(&nested_three(), &cfg(), 3).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains(r#""ordering":[1,2,3]"#));
        let back: WitnessCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn bad_config() {
        let c = WitnessConfig { t_factor: 1.5, ..cfg() };
        assert!(matches!(diagonal_stabilize(&RealMatrix::identity(1), &c), Err(WitnessError::BadConfig(_))));
    }
}
