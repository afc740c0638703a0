//! `klsm`: exact Kloosterman sums, partial-sum scans, transforms, Hecke
//! operators, partition numbers and the verification suites.

mod config;
mod output;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use klsm::hecke::{dilate_l, eta_delta_qexp, eta_qexp, hecke_tn2_half, MultiplicativeFunction};
use klsm::kloosterman::partial::{CheckpointGrid, SumOptions};
use klsm::kloosterman::{KloostermanQuery, SumKind};
use klsm::rademacher::{default_terms, partition_rademacher, partition_sweep, CSV_HEADER};
use klsm::scan::{fit_loglog, presets, scan, ScanConfig};
use klsm::special::{transform_check, transform_hat, transform_phi, SpectralParam, TestFunctionParams};
use klsm::verify::{run, Suite, VerifyOptions};

use config::{ConfigFile, Layered, Settings};
use output::{complex12, render, Format};

/// Exit status classes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Verification(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<klsm::error::Error> for CliError {
    fn from(e: klsm::error::Error) -> Self {
        use klsm::error::Error as E;
        match e {
            E::Io(_) | E::CacheFormat(_) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "klsm", version, about = "Half-integral-weight Kloosterman sums and friends")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Worker threads
    #[arg(long, global = true, env = "KLSM_THREADS")]
    threads: Option<usize>,
    /// Directory of cached per-c sums
    #[arg(long, global = true, env = "KLSM_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_parser = clap::value_parser!(Format))]
    format: Option<Format>,
    /// Seed for randomized suites
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// key=value file consulted after flags and environment
    #[arg(long, global = true, env = "KLSM_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One exact sum S(m, n, c)
    Sum {
        /// classical, eta, eta-conjugate, twisted-trivial or twisted-chi12 [default: eta]
        #[arg(long)]
        kind: Option<String>,
        #[arg(short = 'm', allow_hyphen_values = true)]
        m: i64,
        #[arg(short = 'n', allow_hyphen_values = true)]
        n: i64,
        #[arg(short = 'c', allow_hyphen_values = true)]
        c: i64,
    },
    /// Partial sums of S(m, n, c)/c over c ≤ x with a log-log fit
    Scan {
        /// classical, eta, eta-conjugate, twisted-trivial or twisted-chi12 [default: eta]
        #[arg(long)]
        kind: Option<String>,
        #[arg(short = 'm', allow_hyphen_values = true)]
        m: i64,
        #[arg(short = 'n', allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = 1e3)]
        x_min: f64,
        #[arg(long, default_value_t = 1e5)]
        x_max: f64,
        /// Number of log-spaced checkpoints
        #[arg(long, default_value_t = 32)]
        checkpoints: usize,
        /// Use powers of two instead of log-spaced checkpoints
        #[arg(long)]
        dyadic: bool,
    },
    /// Bessel transforms of the cutoff weight on an r-grid
    Transform {
        #[arg(long, value_enum, default_value_t = TransformKind::Hat)]
        kind: TransformKind,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        x: f64,
        #[arg(long = "t", short = 'T')]
        t: f64,
        /// Explicit comma-separated r values, possibly empty; overrides the dyadic grid
        #[arg(long)]
        r: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        r_min: f64,
        #[arg(long, default_value_t = 256.0)]
        r_max: f64,
        /// Print the log-log slope of |value| to stderr
        #[arg(long)]
        fit: bool,
    },
    /// Rademacher's series against exact partition numbers
    Rademacher {
        #[arg(long, default_value_t = 500)]
        n_max: usize,
        /// Fixed number of terms instead of ceil(3 sqrt n)
        #[arg(long)]
        terms: Option<u64>,
    },
    /// Coefficients of T_{k²} applied to a built-in form
    Hecke {
        #[arg(long, value_enum, default_value_t = Series::EtaDelta)]
        series: Series,
        /// Number of coefficients of the input form
        #[arg(long, default_value_t = 1000)]
        len: usize,
        /// k with (k, 6) = 1; 1 leaves the form unchanged
        #[arg(long, default_value_t = 1)]
        index: u64,
        /// Apply f(τ) ↦ f(24τ) first
        #[arg(long)]
        dilate: bool,
    },
    /// Run invariant suites
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Named split points for (m, n) at x
    Presets {
        #[arg(short = 'm', allow_hyphen_values = true)]
        m: i64,
        #[arg(short = 'n', allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = 1e5)]
        x: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransformKind {
    Check,
    Hat,
    #[value(alias = "Phi")]
    Phi,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Series {
    Eta,
    EtaDelta,
}

fn parse_kind(s: &str) -> Result<SumKind, CliError> {
    SumKind::parse(s).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown kind '{s}' (expected classical, eta, eta-conjugate, twisted-trivial or twisted-chi12)"
        ))
    })
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_sum(kind: &str, m: i64, n: i64, c: i64, s: &Settings) -> Result<String, CliError> {
    let kind = parse_kind(kind)?;
    if c <= 0 {
        return Err(CliError::Usage(format!("c must be a positive integer (got {c})")));
    }
    let sum = KloostermanQuery::new(m, n, c as u64, kind)?.compute()?;
    let v = sum.evaluate();
    let nonzero: Vec<(usize, i64)> =
        sum.multiplicities().iter().enumerate().filter(|(_, &k)| k != 0).map(|(i, &k)| (i, k)).collect();
    if s.format == Format::Json {
        let obj = serde_json::json!({
            "kind": kind.to_string(), "m": m, "n": n, "c": c,
            "modulus": sum.modulus(), "terms": sum.term_count(), "distinct": nonzero.len(),
            "re": v.re, "im": v.im,
        });
        return Ok(format!("{obj}\n"));
    }
    let shown: Vec<String> = nonzero.iter().take(8).map(|(k, mult)| format!("{k}:{mult}")).collect();
    let more = if nonzero.len() > 8 { format!(" ... ({} more)", nonzero.len() - 8) } else { String::new() };
    Ok(format!(
        "{kind} S({m}, {n}, {c})\nmodulus Q = {}\nterms = {}, distinct exponents = {}\nexponent:multiplicity {}{more}\nvalue = {}\n",
        sum.modulus(),
        sum.term_count(),
        nonzero.len(),
        shown.join(" "),
        complex12(v.re, v.im)
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    kind: &str,
    m: i64,
    n: i64,
    x_min: f64,
    x_max: f64,
    checkpoints: usize,
    dyadic: bool,
    s: &Settings,
) -> Result<String, CliError> {
    let mut cfg = ScanConfig::log_spaced(m, n, x_min, x_max, checkpoints);
    if dyadic {
        cfg.grid = CheckpointGrid::Dyadic;
    }
    cfg.options = SumOptions { kind: parse_kind(kind)?, ..SumOptions::default() };
    let res = scan(&cfg, s.cache_dir.as_deref())?;
    match &res.fit {
        Some(f) => eprintln!(
            "{}: slope {:.4} over x in [{}, {}], r^2 = {:.4}",
            res.regime, f.slope, f.window.0, f.window.1, f.r_squared
        ),
        None => eprintln!("{}: too few checkpoints for a fit", res.regime),
    }
    Ok(render(res.series.to_csv(), s.format))
}

#[allow(clippy::too_many_arguments)]
fn cmd_transform(
    kind: TransformKind,
    a: f64,
    x: f64,
    t: f64,
    r: Option<String>,
    r_min: f64,
    r_max: f64,
    fit: bool,
    s: &Settings,
) -> Result<String, CliError> {
    let p = TestFunctionParams::new(a, x, t)?;
    let grid = match r {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| v.parse::<f64>().map_err(|_| CliError::Usage(format!("bad r value '{v}'"))))
            .collect::<Result<Vec<_>, _>>()?,
        None => klsm::special::decay::dyadic_grid(r_min, r_max),
    };
    let mut csv = String::from("r,re,im,abs,quad_error\n");
    let mut abs = Vec::with_capacity(grid.len());
    for &r in &grid {
        let v = match kind {
            TransformKind::Check => transform_check(&p, r)?,
            TransformKind::Hat => transform_hat(&p, r)?,
            TransformKind::Phi => transform_phi(&p, SpectralParam::Real(r))?,
        };
        abs.push(v.value.norm());
        csv.push_str(&format!("{},{:e},{:e},{:e},{:e}\n", r, v.value.re, v.value.im, v.value.norm(), v.quad_error));
    }
    if fit {
        match fit_loglog(&grid, &abs) {
            Some(f) if grid.len() >= 2 => eprintln!("slope {:.4}, r^2 = {:.4}", f.slope, f.r_squared),
            _ => eprintln!("too few points for a fit"),
        }
    }
    Ok(render(csv, s.format))
}

fn cmd_rademacher(n_max: usize, terms: Option<u64>, s: &Settings) -> Result<String, CliError> {
    let rows = match terms {
        None => partition_sweep(n_max),
        Some(t) => (1..=n_max).map(|n| partition_rademacher(n, t)).collect::<Result<Vec<_>, _>>()?,
    };
    let mut csv = format!("{CSV_HEADER}\n");
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let wrong = rows.iter().filter(|r| !r.rounds_correctly()).count();
    eprintln!(
        "max |p_est - p_exact| over n <= {n_max}: {worst:.3e}; rounding failures: {wrong}{}",
        if terms.is_none() { format!(" (N = ceil(3 sqrt n), {} at n_max)", default_terms(n_max.max(1))) } else { String::new() }
    );
    Ok(render(csv, s.format))
}

fn cmd_hecke(series: Series, len: usize, index: u64, dilate: bool, s: &Settings) -> Result<String, CliError> {
    if index == 0 || index % 2 == 0 || index % 3 == 0 {
        return Err(CliError::Usage(format!("index must be coprime to 6 (got {index})")));
    }
    let (f, k) = match series {
        Series::Eta => (eta_qexp(len), 0),
        Series::EtaDelta => (eta_delta_qexp(len)?, 12),
    };
    let f = if dilate { dilate_l(&f)? } else { f };
    let chi12 = MultiplicativeFunction::kronecker_character(12);
    let g = if index == 1 { f } else { hecke_tn2_half(&f, index, k, &chi12)? };
    Ok(render(g.to_csv(), s.format))
}

fn cmd_verify(suite: &str, s: &Settings) -> Result<String, CliError> {
    let suite: Suite = suite.parse()?;
    let opts = VerifyOptions { seed: s.seed, cache_dir: s.cache_dir.clone(), threads: None };
    let report = run(suite, &opts)?;
    let text = match s.format {
        Format::Csv => format!("{report}\n"),
        Format::Json => {
            let rows: Vec<serde_json::Value> = report
                .checks
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "suite": c.suite, "name": c.name, "measured": c.measured,
                        "limit": c.limit, "passed": c.passed, "detail": c.detail,
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).expect("serializable"))
        }
    };
    emit(&text)?;
    if report.passed() {
        Ok(String::new())
    } else {
        let bad: Vec<String> = report.failures().map(|c| format!("{}/{}", c.suite, c.name)).collect();
        Err(CliError::Verification(format!("verification failed: {}", bad.join("; "))))
    }
}

fn cmd_presets(m: i64, n: i64, x: f64, s: &Settings) -> Result<String, CliError> {
    let mut csv = String::from("name,value,formula\n");
    for p in presets(m, n, x) {
        csv.push_str(&format!("{},{},{}\n", p.name, p.value, p.formula));
    }
    Ok(render(csv, s.format))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let settings = Settings::resolve(
        Layered {
            threads: cli.common.threads,
            cache_dir: cli.common.cache_dir.clone(),
            format: cli.common.format,
            seed: cli.common.seed,
        },
        &file,
    )?;
    if let Some(t) = settings.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let kind = |k: Option<String>| k.unwrap_or_else(|| file.get("kind").unwrap_or("eta").to_string());
    let text = match cli.command {
        Command::Sum { kind: k, m, n, c } => cmd_sum(&kind(k), m, n, c, &settings)?,
        Command::Scan { kind: k, m, n, x_min, x_max, checkpoints, dyadic } => {
            cmd_scan(&kind(k), m, n, x_min, x_max, checkpoints, dyadic, &settings)?
        }
        Command::Transform { kind, a, x, t, r, r_min, r_max, fit } => {
            cmd_transform(kind, a, x, t, r, r_min, r_max, fit, &settings)?
        }
        Command::Rademacher { n_max, terms } => cmd_rademacher(n_max, terms, &settings)?,
        Command::Hecke { series, len, index, dilate } => cmd_hecke(series, len, index, dilate, &settings)?,
        Command::Verify { suite } => cmd_verify(&suite, &settings)?,
        Command::Presets { m, n, x } => cmd_presets(m, n, x, &settings)?,
    };
    emit(&text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
