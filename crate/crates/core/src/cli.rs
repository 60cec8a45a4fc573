//! Command-line front end.
//!
//! Exit codes: 0 stable / success, 1 unstable, 2 unknown or not found,
//! 3 failed checks, and 10.. for errors (see [`exit`]).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::atlas::{
    classify_atlas, query_atlas, validate_structure_theorem, Atlas, AtlasConfig, AtlasError, AtlasQuery,
    ValidationReport, VerdictFilter,
};
use crate::canon::canonical_form;
use crate::exact::rational_to_string;
use crate::identities::run_identity_suites;
use crate::par::Execution;
use crate::pattern::{PatternFormat, SparsityPattern};
use crate::spectral::DEFAULT_TOLERANCE;
use crate::verdict::{
    classify, oracle_search, verify_certificate, EngineConfig, OracleConfig, StabilityVerdict, StableProof,
    UnstableReason, VerdictTag,
};
use crate::witness::{synthesize_stable_witness, CertificateJson, WitnessCertificate, WitnessConfig};

pub mod exit {
    pub const STABLE: i32 = 0;
    pub const UNSTABLE: i32 = 1;
    pub const UNKNOWN: i32 = 2;
    pub const CHECK_FAILED: i32 = 3;
    pub const USAGE: i32 = 10;
    pub const IO: i32 = 11;
    pub const PARSE: i32 = 12;
    /// Input beyond what an operation supports (for example `n` too large).
    pub const CAPABILITY: i32 = 13;
    pub const SYNTHESIS: i32 = 14;
    /// A flag value outside its allowed range.
    pub const CONFIG: i32 = 15;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "smstab", version, about = "Stability of sparse matrix patterns")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Hurwitz margin: abscissa must be below -tol.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Write the report here instead of stdout; for `atlas enumerate`, the atlas file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long = "t-start", global = true)]
    pub t_start: Option<f64>,
    #[arg(long = "t-factor", global = true)]
    pub t_factor: Option<f64>,
    #[arg(long = "t-cap", global = true)]
    pub t_cap: Option<usize>,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a pattern file.
    Analyze { file: PathBuf },
    /// Build and verify a Hurwitz witness from a nested chain.
    Witness { file: PathBuf },
    /// Run only the numerical search.
    Oracle { file: PathBuf },
    /// Canonical representative and orbit size.
    Canon { file: PathBuf },
    /// Exact identity suites on random matrices.
    Identities {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long = "n", default_value_t = 4)]
        n: usize,
    },
    #[command(subcommand)]
    Atlas(AtlasCommand),
}

#[derive(Debug, Subcommand)]
pub enum AtlasCommand {
    /// Classify every pattern of side n up to symmetry.
    Enumerate {
        #[arg(short = 'n')]
        n: usize,
    },
    /// Check the structural claims on a complete atlas.
    Validate {
        #[arg(short = 'n')]
        n: usize,
        /// Read this atlas instead of building one.
        #[arg(long)]
        atlas: Option<PathBuf>,
    },
    /// Filter the records of an atlas file.
    Query {
        path: PathBuf,
        #[arg(long)]
        min_dim: Option<usize>,
        #[arg(long)]
        max_codim: Option<usize>,
        #[arg(long, value_enum)]
        verdict: Option<VerdictArg>,
        #[arg(long)]
        minimal_stable: Option<bool>,
        #[arg(long)]
        maximal_unstable: Option<bool>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VerdictArg {
    Stable,
    Unstable,
    Unknown,
}

impl From<VerdictArg> for VerdictFilter {
    fn from(v: VerdictArg) -> Self {
        match v {
            VerdictArg::Stable => VerdictFilter::Stable,
            VerdictArg::Unstable => VerdictFilter::Unstable,
            VerdictArg::Unknown => VerdictFilter::Unknown,
        }
    }
}

/// Resolved settings shared by all subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CliConfig {
    pub seed: u64,
    pub tolerance: f64,
    pub oracle_restarts: usize,
    pub oracle_steps: usize,
    pub output_format: OutputFormat,
    pub t_start: f64,
    pub t_factor: f64,
    pub t_cap: usize,
    pub execution: Execution,
}

impl CliConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self, CliError> {
        let w = WitnessConfig::default();
        let o = OracleConfig::default();
        let c = Self {
            seed: g.seed,
            tolerance: g.tol,
            oracle_restarts: g.restarts.unwrap_or(o.restarts),
            oracle_steps: g.steps.unwrap_or(o.steps),
            output_format: g.format,
            t_start: g.t_start.unwrap_or(w.t_start),
            t_factor: g.t_factor.unwrap_or(w.t_factor),
            t_cap: g.t_cap.unwrap_or(w.t_cap),
            execution: if g.sequential { Execution::Sequential } else { Execution::Parallel },
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.tolerance) {
            return Err(CliError::Config("--tol must be positive".into()));
        }
        if self.oracle_restarts == 0 || self.oracle_steps == 0 {
            return Err(CliError::Config("--restarts and --steps must be positive".into()));
        }
        if !positive(self.t_start) || !(self.t_factor > 0.0 && self.t_factor < 1.0) || self.t_cap == 0 {
            return Err(CliError::Config("need --t-start > 0, 0 < --t-factor < 1 and --t-cap > 0".into()));
        }
        Ok(())
    }

    pub fn engine(&self) -> EngineConfig {
        let mut e =
            EngineConfig { execution: self.execution, ..EngineConfig::default() }.with_tolerance(self.tolerance);
        e.witness.t_start = self.t_start;
        e.witness.t_factor = self.t_factor;
        e.witness.t_cap = self.t_cap;
        e.oracle.restarts = self.oracle_restarts;
        e.oracle.steps = self.oracle_steps;
        e
    }

    pub fn atlas(&self) -> AtlasConfig {
        AtlasConfig { engine: self.engine(), seed: self.seed, ..AtlasConfig::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Capability(String),
    #[error("{0}")]
    Synthesis(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => exit::USAGE,
            Self::Io { .. } => exit::IO,
            Self::Parse { .. } => exit::PARSE,
            Self::Capability(_) => exit::CAPABILITY,
            Self::Synthesis(_) => exit::SYNTHESIS,
            Self::Config(_) => exit::CONFIG,
        }
    }
}

impl From<AtlasError> for CliError {
    fn from(e: AtlasError) -> Self {
        match e {
            AtlasError::Io { path, source } => CliError::Io { path, source },
            AtlasError::Parse { path, line, message } => {
                CliError::Parse { path, message: format!("line {line}: {message}") }
            }
            other => CliError::Capability(other.to_string()),
        }
    }
}

/// Reads a pattern; `.mask` and `.json` decide the syntax, anything else is sniffed.
pub fn load_pattern(path: &Path) -> Result<SparsityPattern, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let parsed = match PatternFormat::from_extension(path) {
        Some(f) => SparsityPattern::parse(&text, f),
        None => text.parse(),
    };
    parsed.map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return exit::STABLE;
                }
                _ => exit::USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let config = CliConfig::from_args(&cli.global)?;
    let mut report = String::new();
    let redirect = !matches!(cli.command, Command::Atlas(AtlasCommand::Enumerate { .. }));
    let code = match &cli.command {
        Command::Analyze { file } => analyze(&load_pattern(file)?, &config, &mut report),
        Command::Witness { file } => witness(&load_pattern(file)?, &config, &mut report)?,
        Command::Oracle { file } => oracle(&load_pattern(file)?, &config, &mut report),
        Command::Canon { file } => canon(&load_pattern(file)?, &config, &mut report)?,
        Command::Identities { trials, n } => identities(*n, *trials, &config, &mut report)?,
        Command::Atlas(a) => atlas(a, cli.global.out.as_deref(), &config, &mut report)?,
    };
    match (&cli.global.out, redirect) {
        (Some(path), true) => {
            fs::write(path, &report).map_err(|source| CliError::Io { path: path.clone(), source })?;
        }
        _ => {
            stdout
                .write_all(report.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
    }
    Ok(code)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report serializes") + "\n"
}

fn verdict_code(v: &StabilityVerdict) -> i32 {
    match v.tag() {
        VerdictTag::ProvedStable => exit::STABLE,
        VerdictTag::ProvedUnstable => exit::UNSTABLE,
        VerdictTag::Unknown => exit::UNKNOWN,
    }
}

fn one_based(v: &[usize]) -> String {
    let labels: Vec<String> = v.iter().map(|x| (x + 1).to_string()).collect();
    format!("({})", labels.join(","))
}

fn floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ")
}

fn pattern_summary(p: &SparsityPattern, s: &mut String) {
    s.push_str(&format!(
        "pattern: n = {}, dimension {}, codimension {}\n{}",
        p.n(),
        p.dimension(),
        p.codimension(),
        p.to_mask()
    ));
}

fn certificate_text(c: &WitnessCertificate, s: &mut String) {
    let minors: Vec<String> = c.minors.iter().map(rational_to_string).collect();
    s.push_str(&format!("ordering: {}\n", one_based(&c.ordering)));
    s.push_str(&format!("minors: {}\n", minors.join(" ")));
    s.push_str(&format!("stabilizer: {}\n", floats(&c.stabilizer)));
    s.push_str(&format!("abscissa: {:e}\n", c.spectral.abscissa));
    s.push_str(&format!("witness:\n{}", c.witness));
}

fn analyze(p: &SparsityPattern, config: &CliConfig, s: &mut String) -> i32 {
    let v = classify(p, &config.engine(), config.seed);
    if config.output_format == OutputFormat::Json {
        s.push_str(&to_json(&v));
        return verdict_code(&v);
    }
    pattern_summary(p, s);
    s.push_str(&format!("verdict: {:?}\nreason: {:?}\n", v.tag(), v.reason()));
    match &v {
        StabilityVerdict::ProvedUnstable(UnstableReason::NoSink) => s.push_str("no free diagonal entry\n"),
        StabilityVerdict::ProvedUnstable(UnstableReason::SccWithoutSink { violating }) => {
            s.push_str(&format!("vertices in components without a sink: {}\n", one_based(violating)));
        }
        StabilityVerdict::ProvedUnstable(UnstableReason::NoHamiltonianK { k }) => {
            s.push_str(&format!("no Hamiltonian {k}-subgraph\n"));
        }
        StabilityVerdict::ProvedStable(StableProof::Chain(c)) => certificate_text(c, s),
        StabilityVerdict::ProvedStable(StableProof::Oracle { witness, .. }) => {
            s.push_str(&format!(
                "restart: {}\nabscissa: {:e}\nwitness:\n{}",
                witness.restart, witness.abscissa, witness.matrix
            ));
        }
        StabilityVerdict::Unknown { oracle_stats, diagnostics } => {
            s.push_str(&format!(
                "oracle restarts: {}, best abscissa {:e}\n",
                oracle_stats.restarts, oracle_stats.best_abscissa
            ));
            for d in diagnostics {
                s.push_str(&format!("note: {d}\n"));
            }
        }
    }
    verdict_code(&v)
}

fn witness(p: &SparsityPattern, config: &CliConfig, s: &mut String) -> Result<i32, CliError> {
    let engine = config.engine();
    let cert = synthesize_stable_witness(p, &engine.witness, config.seed)
        .map_err(|e| CliError::Synthesis(format!("witness synthesis failed: {e}")))?;
    verify_certificate(&cert, config.tolerance)
        .map_err(|problems| CliError::Synthesis(format!("certificate does not verify: {}", problems.join("; "))))?;
    if config.output_format == OutputFormat::Json {
        s.push_str(&to_json(&CertificateJson::from(&cert)));
    } else {
        pattern_summary(p, s);
        certificate_text(&cert, s);
        s.push_str("hurwitz: true\n");
    }
    Ok(exit::STABLE)
}

fn oracle(p: &SparsityPattern, config: &CliConfig, s: &mut String) -> i32 {
    let engine = config.engine();
    let outcome = oracle_search(p, &engine.oracle, config.seed, engine.execution);
    if config.output_format == OutputFormat::Json {
        #[derive(Serialize)]
        struct OracleJson<'a> {
            found: bool,
            witness: &'a Option<crate::verdict::OracleWitness>,
            stats: &'a crate::verdict::OracleStats,
        }
        s.push_str(&to_json(&OracleJson {
            found: outcome.witness.is_some(),
            witness: &outcome.witness,
            stats: &outcome.stats,
        }));
    } else {
        match &outcome.witness {
            Some(w) => {
                s.push_str(&format!("found: restart {}\nabscissa: {:e}\nwitness:\n{}", w.restart, w.abscissa, w.matrix))
            }
            None => s.push_str("found: none\n"),
        }
        s.push_str(&format!("restarts: {}, best abscissa {:e}\n", outcome.stats.restarts, outcome.stats.best_abscissa));
    }
    if outcome.witness.is_some() {
        exit::STABLE
    } else {
        exit::UNKNOWN
    }
}

fn canon(p: &SparsityPattern, config: &CliConfig, s: &mut String) -> Result<i32, CliError> {
    let info = canonical_form(p).map_err(|e| CliError::Capability(e.to_string()))?;
    if config.output_format == OutputFormat::Json {
        s.push_str(&to_json(&info));
    } else {
        s.push_str(&format!(
            "canonical:\n{}orbit size: {}\nrelabeling: {}\ntransposed: {}\n",
            info.canonical.to_mask(),
            info.orbit_size,
            info.relabeling,
            info.transposed
        ));
    }
    Ok(exit::STABLE)
}

fn identities(n: usize, trials: usize, config: &CliConfig, s: &mut String) -> Result<i32, CliError> {
    if n == 0 || n > crate::pattern::MAX_N {
        return Err(CliError::Capability(format!("--n must lie in 1..={}", crate::pattern::MAX_N)));
    }
    if trials == 0 {
        return Err(CliError::Config("--trials must be positive".into()));
    }
    let results = run_identity_suites(n, trials, config.seed, config.execution);
    if config.output_format == OutputFormat::Json {
        s.push_str(&to_json(&results));
    } else {
        for r in &results {
            let status = if r.passed() { "pass" } else { "FAIL" };
            s.push_str(&format!("{:<16} {status}  trials {:>5}  failures {}\n", r.name, r.trials, r.failures));
            if let Some(f) = &r.first_failure {
                s.push_str(&format!("  first failure: {f}\n"));
            }
        }
    }
    Ok(if results.iter().all(|r| r.passed()) { exit::STABLE } else { exit::CHECK_FAILED })
}

fn validation_text(r: &ValidationReport, s: &mut String) {
    s.push_str(&format!(
        "n = {}: {} representatives, {} patterns, {} stable\n",
        r.n, r.representatives, r.raw_patterns, r.stable_raw
    ));
    for c in &r.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        s.push_str(&format!("check {} {status} ({} examined): {}\n", c.name, c.examined, c.description));
        for v in c.violations.iter().take(10) {
            s.push_str(&format!("  violation: {v}\n"));
        }
    }
    if !r.unknown.is_empty() {
        s.push_str(&format!("unknown representatives: {}\n", r.unknown.len()));
        for u in &r.unknown {
            s.push_str(&format!("  {u}\n"));
        }
    }
}

fn atlas(cmd: &AtlasCommand, out: Option<&Path>, config: &CliConfig, s: &mut String) -> Result<i32, CliError> {
    match cmd {
        AtlasCommand::Enumerate { n } => {
            let default_path = PathBuf::from(format!("atlas_n{n}.jsonl"));
            let path = out.unwrap_or(&default_path);
            let atlas = classify_atlas(*n, &config.atlas(), Some(path))?;
            let unknown = atlas.unknown().count();
            if config.output_format == OutputFormat::Json {
                #[derive(Serialize)]
                struct Summary<'a> {
                    path: &'a Path,
                    n: usize,
                    representatives: usize,
                    raw_patterns: u128,
                    stable_raw: u128,
                    unknown: usize,
                }
                s.push_str(&to_json(&Summary {
                    path,
                    n: *n,
                    representatives: atlas.records.len(),
                    raw_patterns: atlas.raw_count(),
                    stable_raw: atlas.stable_raw_count(),
                    unknown,
                }));
            } else {
                s.push_str(&format!(
                    "wrote {}\nn = {n}: {} representatives, {} patterns, {} stable, {unknown} unknown\n",
                    path.display(),
                    atlas.records.len(),
                    atlas.raw_count(),
                    atlas.stable_raw_count()
                ));
            }
            Ok(if unknown == 0 { exit::STABLE } else { exit::UNKNOWN })
        }
        AtlasCommand::Validate { n, atlas } => {
            let built = match atlas {
                Some(path) => Atlas::read_from(path)?,
                None => classify_atlas(*n, &config.atlas(), None)?,
            };
            if built.n() != *n {
                return Err(CliError::Usage(format!("atlas has n = {}, expected {n}", built.n())));
            }
            let report = validate_structure_theorem(&built)?;
            if config.output_format == OutputFormat::Json {
                s.push_str(&to_json(&report));
            } else {
                validation_text(&report, s);
            }
            Ok(if report.all_passed() { exit::STABLE } else { exit::CHECK_FAILED })
        }
        AtlasCommand::Query { path, min_dim, max_codim, verdict, minimal_stable, maximal_unstable } => {
            let query = AtlasQuery {
                min_dim: *min_dim,
                max_codim: *max_codim,
                verdict: verdict.map(Into::into),
                minimal_stable: *minimal_stable,
                maximal_unstable: *maximal_unstable,
            };
            let records = query_atlas(path, &query)?;
            for r in &records {
                if config.output_format == OutputFormat::Json {
                    s.push_str(&to_json(r));
                } else {
                    s.push_str(&format!(
                        "{}  orbit {:>3}  dim {:>2}  {:?}/{:?}\n",
                        r.canonical.to_mask().trim_end().replace('\n', "/"),
                        r.orbit_size,
                        r.dimension,
                        r.verdict.tag(),
                        r.verdict.reason()
                    ));
                }
            }
            Ok(exit::STABLE)
        }
    }
}
