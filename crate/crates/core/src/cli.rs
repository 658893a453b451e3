//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 spec or argument error,
//! 3 quadrature or norm failure, 4 degenerate profile, 5 failed check.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticFunction, FunctionSpec};
use crate::asymptotics::{fit_exponent, FitReport, GridKind, MeanProfile, DEFAULT_K_MAX, DEFAULT_K_MIN, MAX_GRID_K};
use crate::corpus::{default_corpus, CorpusEntry, EntryKind};
use crate::equivalence::{
    equivalence_report, run_checks, Calibration, CheckSummary, Condition, EquivalenceReport, REPORT_K_MAX, REPORT_K_MIN,
};
use crate::error::Error;
use crate::means::{mean_in_space, QuadratureConfig, SpaceSpec};
use crate::report::{labelled_profiles_csv, profile_csv, read_profile_csv, to_json, write_atomic};
use crate::weights::{classify_weight, parse_weight};

pub const EXIT_IO: i32 = 1;
pub const EXIT_SPEC: i32 = 2;
pub const EXIT_QUADRATURE: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_CHECK: i32 = 5;

/// Environment variable overriding the sample cap.
pub const MAX_SAMPLES_ENV: &str = "MEANLIP_MAX_SAMPLES";

#[derive(Debug, Parser)]
#[command(name = "meanlip", version, about = "Integral means, gaps and mean-Lipschitz exponents on the unit disc")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON config file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Relative tolerance of the quadratures.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Sample cap of the circle quadratures (power of two).
    #[arg(long, global = true)]
    pub max_samples: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integral means at one radius or along the grid r = 1 - 2^-k.
    Means(MeansArgs),
    /// Fit a mean-Lipschitz exponent to a condition profile or a CSV.
    Fit(FitArgs),
    /// Equivalence report with identity and inequality checks.
    Verify(VerifyArgs),
    /// Classify a weight.
    Weights(WeightsArgs),
    /// List the built-in corpus.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Hardy,
    Bergman,
    Dirichlet,
    #[value(alias = "disc_algebra", alias = "disc")]
    DiscAlgebra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    #[arg(long, value_enum)]
    pub space: Option<Family>,
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct MeansArgs {
    /// Function spec: catalog id (e.g. monomial:3, lacunary:0.5) or JSON file.
    #[arg(long = "fn")]
    pub function: String,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, conflicts_with = "grid")]
    pub r: Option<f64>,
    /// k-range `k1:k2` of the radii 1 - 2^-k.
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long = "fn", required_unless_present = "csv")]
    pub function: Option<String>,
    /// Profile CSV instead of a function.
    #[arg(long, conflicts_with = "function")]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value = "c")]
    pub condition: String,
    /// Exponent offset; defaults to -1 for condition b and 0 otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<f64>,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "fn", required_unless_present = "corpus")]
    pub function: Option<String>,
    /// `default` runs the built-in corpus.
    #[arg(long, conflicts_with = "function")]
    pub corpus: Option<String>,
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Expected exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Weight for the weighted comparison (Hardy spaces only).
    #[arg(long = "w")]
    pub weight: Option<String>,
    /// Grid of the exponent fits.
    #[arg(long)]
    pub grid: Option<String>,
    /// Grid of the inequality checks.
    #[arg(long, default_value = "3:10")]
    pub check_grid: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// Weight spec, e.g. power:0.5, powerlog:1,1, or JSON.
    #[arg(long = "w")]
    pub weight: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Optional JSON config merged under the flags.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub quadrature: Option<QuadratureConfig>,
    pub space: Option<Family>,
    pub p: Option<f64>,
    pub grid: Option<String>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
}

/// Resolved settings of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub space: SpaceSpec,
    pub grid: (u32, u32),
    pub quadrature: QuadratureConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Spec(_) | Error::InvalidArgument(_) | Error::InvalidWeight(_) | Error::OutOfDomain(_) => EXIT_SPEC,
            Error::DegenerateProfile(_) => EXIT_DEGENERATE,
            Error::Hypothesis(_) => EXIT_CHECK,
            _ => EXIT_QUADRATURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn spec_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_SPEC,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

/// Parses `k1:k2` with `2 ≤ k1 < k2 ≤ 16`.
pub fn parse_grid(s: &str) -> Result<(u32, u32), Failure> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| spec_failure(format!("grid must look like k1:k2, got {s:?}")))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<u32>()
            .map_err(|_| spec_failure(format!("grid bound {x:?} is not an integer")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if !(2 <= a && a < b && b <= MAX_GRID_K) {
        return Err(spec_failure(format!("grid {a}:{b} must satisfy 2 <= k1 < k2 <= {MAX_GRID_K}")));
    }
    Ok((a, b))
}

fn space_from(family: Family, p: Option<f64>) -> Result<SpaceSpec, Failure> {
    let needs_p = |p: Option<f64>| p.ok_or_else(|| spec_failure("--p is required for hardy and bergman"));
    let space = match family {
        Family::Hardy => SpaceSpec::Hardy { p: needs_p(p)? },
        Family::Bergman => SpaceSpec::Bergman { p: needs_p(p)? },
        Family::Dirichlet => SpaceSpec::Dirichlet,
        Family::DiscAlgebra => SpaceSpec::DiscAlgebra,
    };
    space.validate()?;
    Ok(space)
}

/// Catalog id, or path to a JSON function spec.
pub fn load_function(spec: &str) -> Result<(String, AnalyticFunction), Failure> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || (path.is_file() && !spec.contains(':')) {
        let text = std::fs::read_to_string(path).map_err(|e| spec_failure(format!("{spec}: {e}")))?;
        let parsed: FunctionSpec =
            serde_json::from_str(&text).map_err(|e| spec_failure(format!("{spec}: {e}")))?;
        return Ok((spec.to_string(), parsed.build()?));
    }
    let parsed = FunctionSpec::parse_short(spec)?;
    Ok((spec.to_string(), parsed.build()?))
}

fn resolve(
    file: &FileConfig,
    cli: &Cli,
    space: &SpaceArgs,
    grid: Option<&str>,
    default_grid: (u32, u32),
    output: &OutputArgs,
    default_format: Format,
) -> Result<RunConfig, Failure> {
    let mut quadrature = file.quadrature.unwrap_or_default();
    if let Ok(v) = std::env::var(MAX_SAMPLES_ENV) {
        quadrature.max_samples = v
            .trim()
            .parse()
            .map_err(|_| spec_failure(format!("{MAX_SAMPLES_ENV}={v:?} is not an integer")))?;
    }
    if let Some(n) = cli.max_samples {
        quadrature.max_samples = n;
    }
    if let Some(t) = cli.tol {
        quadrature.rel_tol = t;
    }
    quadrature.initial_samples = quadrature.initial_samples.min(quadrature.max_samples);
    quadrature.validate()?;
    let family = space.space.or(file.space).unwrap_or(Family::Hardy);
    let p = space.p.or(file.p).or(match family {
        Family::Hardy | Family::Bergman => Some(2.0),
        _ => None,
    });
    let grid = match grid.map(str::to_string).or_else(|| file.grid.clone()) {
        Some(g) => parse_grid(&g)?,
        None => default_grid,
    };
    Ok(RunConfig {
        space: space_from(family, p)?,
        grid,
        quadrature,
        format: output.format.or(file.format).unwrap_or(default_format),
        out: output.out.clone(),
        jobs: cli.jobs.or(file.jobs),
    })
}

fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => write_atomic(path, bytes).map_err(|e| io_failure(path, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| io_failure(Path::new("<stdout>"), e)),
    }
}

#[derive(Serialize)]
struct MeanRow {
    function: String,
    space: SpaceSpec,
    r: f64,
    value: f64,
    samples_used: u64,
    converged: bool,
}

pub fn cmd_means(args: &MeansArgs, cfg: &RunConfig) -> Result<(), Failure> {
    let (id, f) = load_function(&args.function)?;
    let q = cfg.quadrature;
    let space = cfg.space;
    let profile = match args.r {
        Some(r) => {
            if !(0.0..=1.0).contains(&r) {
                return Err(spec_failure(format!("--r {r} outside [0, 1]")));
            }
            let m = if r == 1.0 {
                crate::means::space_norm(&f, &space, &q)?
            } else {
                mean_in_space(&f, &space, r, &q)?
            };
            MeanProfile {
                grid_kind: GridKind::RadiusToOne,
                points: vec![crate::asymptotics::ProfilePoint {
                    parameter: r,
                    abscissa: 1.0 - r,
                    value: m.value,
                    samples_used: m.samples_used,
                    converged: m.converged,
                }],
            }
        }
        None => MeanProfile::sample_radii(cfg.grid.0, cfg.grid.1, |r| mean_in_space(&f, &space, r, &q))?,
    };
    let bytes = match cfg.format {
        Format::Csv => profile_csv(&profile)?,
        Format::Json => {
            let rows: Vec<MeanRow> = profile
                .points
                .iter()
                .map(|p| MeanRow {
                    function: id.clone(),
                    space,
                    r: p.parameter,
                    value: p.value,
                    samples_used: p.samples_used,
                    converged: p.converged,
                })
                .collect();
            to_json(&rows)?
        }
    };
    emit(cfg, &bytes)
}

pub fn cmd_fit(args: &FitArgs, cfg: &RunConfig) -> Result<(), Failure> {
    let condition = Condition::parse(&args.condition)?;
    let (profile, default_offset) = match (&args.csv, &args.function) {
        (Some(path), _) => {
            let file = std::fs::File::open(path).map_err(|e| io_failure(path, e))?;
            (read_profile_csv(file)?, 0.0)
        }
        (None, Some(spec)) => {
            let (_, f) = load_function(spec)?;
            let p = crate::equivalence::condition_profile(&f, &cfg.space, condition, cfg.grid.0, cfg.grid.1, &cfg.quadrature)?;
            (p, condition.offset())
        }
        (None, None) => return Err(spec_failure("either --fn or --csv is required")),
    };
    let offset = args.offset.unwrap_or(default_offset);
    let fit = fit_exponent(&profile, offset)?;
    let bytes = match cfg.format {
        Format::Json => to_json(&FitReport::new(&fit, offset, &profile))?,
        Format::Csv => profile_csv(&profile)?,
    };
    emit(cfg, &bytes)
}

#[derive(Serialize)]
struct CorpusRun {
    space: SpaceSpec,
    calibration: Calibration,
    passed: bool,
    reports: Vec<EquivalenceReport>,
    skipped: Vec<Skipped>,
}

#[derive(Serialize)]
struct Skipped {
    function: String,
    reason: String,
}

fn report_passes(r: &EquivalenceReport) -> bool {
    r.agreement
        && r.target_agreement != Some(false)
        && r.details.passed()
        && r.weighted.as_ref().is_none_or(|w| w.all_bounded())
}

fn verify_one(
    f: &AnalyticFunction,
    id: &str,
    alpha: Option<f64>,
    weight: Option<&crate::weights::Weight>,
    calibration: &Calibration,
    radii: &[f64],
    cfg: &RunConfig,
) -> crate::error::Result<EquivalenceReport> {
    let mut report = equivalence_report(f, id, &cfg.space, alpha, weight, cfg.grid, &cfg.quadrature)?;
    let checks: CheckSummary = run_checks(f, &cfg.space, radii, Some(calibration), &cfg.quadrature)?;
    let mut notes = std::mem::take(&mut report.details.notes);
    notes.extend(checks.notes.iter().cloned());
    report.details = CheckSummary { notes, ..checks };
    Ok(report)
}

fn profiles_of(reports: &[EquivalenceReport]) -> Vec<(String, String, String, MeanProfile)> {
    reports
        .iter()
        .flat_map(|r| {
            r.profiles.iter().map(move |(c, p)| {
                let c = match c {
                    Condition::A => "a",
                    Condition::B => "b",
                    Condition::C => "c",
                };
                (r.function.clone(), r.space.label(), c.to_string(), p.clone())
            })
        })
        .collect()
}

pub fn cmd_verify(args: &VerifyArgs, cfg: &RunConfig) -> Result<(), Failure> {
    let (k1, k2) = parse_grid(&args.check_grid)?;
    let radii = crate::asymptotics::radius_grid(k1, k2)?;
    let weight = args.weight.as_deref().map(parse_weight).transpose()?;
    let calibration = Calibration::measure(&cfg.space, &cfg.quadrature)?;

    if let Some(name) = &args.corpus {
        if name != "default" {
            return Err(spec_failure(format!("unknown corpus {name:?}; only 'default' exists")));
        }
        let corpus = default_corpus();
        let results: Vec<(CorpusEntry, crate::error::Result<EquivalenceReport>)> = corpus
            .into_par_iter()
            .map(|e| {
                let alpha = args.alpha.or_else(|| e.known_exponent(&cfg.space));
                let r = verify_one(&e.function, &e.id, alpha, weight.as_ref(), &calibration, &radii, cfg);
                (e, r)
            })
            .collect();
        let mut reports = Vec::new();
        let mut skipped = Vec::new();
        for (e, r) in results {
            match r {
                Ok(r) => reports.push(r),
                Err(err @ (Error::NotInSpace(_) | Error::DivergentNorm(_))) => skipped.push(Skipped {
                    function: e.id,
                    reason: err.to_string(),
                }),
                Err(err) => return Err(Failure::from(err)),
            }
        }
        let passed = reports.iter().all(report_passes);
        let bytes = match cfg.format {
            Format::Json => to_json(&CorpusRun {
                space: cfg.space,
                calibration,
                passed,
                reports: reports.clone(),
                skipped,
            })?,
            Format::Csv => labelled_profiles_csv(&profiles_of(&reports))?,
        };
        emit(cfg, &bytes)?;
        if !passed {
            let failing: Vec<String> = reports.iter().filter(|r| !report_passes(r)).map(|r| r.function.clone()).collect();
            return Err(Failure {
                code: EXIT_CHECK,
                message: format!("checks failed for {}", failing.join(", ")),
            });
        }
        return Ok(());
    }

    let spec = args.function.as_deref().ok_or_else(|| spec_failure("either --fn or --corpus is required"))?;
    let (id, f) = load_function(spec)?;
    let report = verify_one(&f, &id, args.alpha, weight.as_ref(), &calibration, &radii, cfg)?;
    let bytes = match cfg.format {
        Format::Json => to_json(&report)?,
        Format::Csv => labelled_profiles_csv(&profiles_of(std::slice::from_ref(&report)))?,
    };
    emit(cfg, &bytes)?;
    if !report_passes(&report) {
        let mut what = report.details.failures();
        if !report.agreement {
            what.push(format!("agreement (spread {})", report.max_pairwise_difference));
        }
        if report.target_agreement == Some(false) {
            what.push("target exponent".into());
        }
        if report.weighted.as_ref().is_some_and(|w| !w.all_bounded()) {
            what.push("weighted bound".into());
        }
        return Err(Failure {
            code: EXIT_CHECK,
            message: format!("failed: {}", what.join(", ")),
        });
    }
    Ok(())
}

pub fn cmd_weights(args: &WeightsArgs, cfg: &RunConfig) -> Result<(), Failure> {
    let w = parse_weight(&args.weight)?;
    let c = classify_weight(&w)?;
    emit(cfg, &to_json(&c)?)
}

#[derive(Serialize)]
struct CorpusListing {
    id: String,
    kind: EntryKind,
    exponent_hardy2: Option<f64>,
    exponent_bergman2: Option<f64>,
    exponent_dirichlet: Option<f64>,
    exponent_disc_algebra: Option<f64>,
}

pub fn cmd_corpus(cfg: &RunConfig) -> Result<(), Failure> {
    let rows: Vec<CorpusListing> = default_corpus()
        .into_iter()
        .map(|e| CorpusListing {
            exponent_hardy2: e.known_exponent(&SpaceSpec::Hardy { p: 2.0 }),
            exponent_bergman2: e.known_exponent(&SpaceSpec::Bergman { p: 2.0 }),
            exponent_dirichlet: e.known_exponent(&SpaceSpec::Dirichlet),
            exponent_disc_algebra: e.known_exponent(&SpaceSpec::DiscAlgebra),
            id: e.id,
            kind: e.kind,
        })
        .collect();
    let bytes = match cfg.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "kind", "exponent_hardy2", "exponent_bergman2", "exponent_dirichlet", "exponent_disc_algebra"])
                .map_err(|e| spec_failure(e.to_string()))?;
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            for r in &rows {
                let kind = match r.kind {
                    EntryKind::Constant => "constant",
                    EntryKind::Polynomial => "polynomial",
                    EntryKind::Lacunary { .. } => "lacunary",
                    EntryKind::Singular => "singular",
                };
                w.write_record([
                    r.id.clone(),
                    kind.to_string(),
                    opt(r.exponent_hardy2),
                    opt(r.exponent_bergman2),
                    opt(r.exponent_dirichlet),
                    opt(r.exponent_disc_algebra),
                ])
                .map_err(|e| spec_failure(e.to_string()))?;
            }
            w.into_inner().map_err(|e| spec_failure(e.to_string()))?
        }
    };
    emit(cfg, &bytes)
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| io_failure(p, e))?;
            serde_json::from_str(&text).map_err(|e| spec_failure(format!("{}: {e}", p.display())))
        }
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("meanlip: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let file = load_file_config(cli.config.as_deref())?;
    let default_fit_grid = (DEFAULT_K_MIN, DEFAULT_K_MAX);
    let cfg = match &cli.command {
        Command::Means(a) => resolve(&file, cli, &a.space, a.grid.as_deref(), default_fit_grid, &a.output, Format::Csv)?,
        Command::Fit(a) => resolve(&file, cli, &a.space, a.grid.as_deref(), default_fit_grid, &a.output, Format::Json)?,
        Command::Verify(a) => resolve(
            &file,
            cli,
            &a.space,
            a.grid.as_deref(),
            (REPORT_K_MIN, REPORT_K_MAX),
            &a.output,
            Format::Json,
        )?,
        Command::Weights(a) => resolve(&file, cli, &no_space(), None, default_fit_grid, &a.output, Format::Json)?,
        Command::Corpus(a) => resolve(&file, cli, &no_space(), None, default_fit_grid, &a.output, Format::Json)?,
    };
    if let Some(n) = cfg.jobs {
        if n == 0 {
            return Err(spec_failure("--jobs must be positive"));
        }
        // Fails only if a pool already exists (e.g. repeated calls in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Means(a) => cmd_means(a, &cfg),
        Command::Fit(a) => cmd_fit(a, &cfg),
        Command::Verify(a) => cmd_verify(a, &cfg),
        Command::Weights(a) => cmd_weights(a, &cfg),
        Command::Corpus(_) => cmd_corpus(&cfg),
    }
}

fn no_space() -> SpaceArgs {
    SpaceArgs { space: None, p: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("4:10").unwrap(), (4, 10));
        assert_eq!(parse_grid("1:10").unwrap_err().code, EXIT_SPEC);
        assert_eq!(parse_grid("5:5").unwrap_err().code, EXIT_SPEC);
        assert_eq!(parse_grid("4:17").unwrap_err().code, EXIT_SPEC);
        assert!(parse_grid("4-10").is_err());
    }

    #[test]
    fn exit_codes_from_errors() {
        assert_eq!(Failure::from(Error::Spec("x".into())).code, EXIT_SPEC);
        assert_eq!(Failure::from(Error::DegenerateProfile(2)).code, EXIT_DEGENERATE);
        assert_eq!(Failure::from(Error::DivergentNorm("x".into())).code, EXIT_QUADRATURE);
        assert_eq!(Failure::from(Error::Hypothesis("x".into())).code, EXIT_CHECK);
    }

    #[test]
    fn cli_parses_examples() {
        let cli = Cli::try_parse_from(["meanlip", "means", "--fn", "monomial:3", "--space", "hardy", "--p", "4", "--r", "0.5"]).unwrap();
        assert!(matches!(cli.command, Command::Means(_)));
        let cli = Cli::try_parse_from(["meanlip", "--jobs", "2", "verify", "--corpus", "default", "--space", "bergman", "--p", "2"]).unwrap();
        assert_eq!(cli.jobs, Some(2));
        let cli = Cli::try_parse_from(["meanlip", "fit", "--csv", "x.csv", "--offset", "-1"]).unwrap();
        match cli.command {
            Command::Fit(f) => assert_eq!(f.offset, Some(-1.0)),
            _ => unreachable!(),
        }
        assert!(Cli::try_parse_from(["meanlip", "means", "--fn", "z", "--r", "0.5", "--grid", "3:4"]).is_err());
    }
}
