//! `grushin` command line: transforms, propagation, kernel samples, the
//! dispersive constant, and verification reports.
//!
//! Exit status: 0 success, 1 internal error, 2 configuration error,
//! 3 an experiment row failed. Errors print one line `error[CODE]: message`
//! on stderr.

use clap::{Args, Parser, Subcommand};
use grushin::kernel::{dispersive_constant, schrodinger_kernel_strip, KernelQuadratureConfig, StripKernelQuery};
use grushin::propagator::EvolutionRequest;
use grushin::transform::forward_transform;
use grushin::{EvolutionKind, SpectralCoefficients, TimeSeries, TransformConfig, Wavepacket};
use grushin_verify::{Estimate, ExperimentConfig, Format, Report};
use serde::Deserialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "grushin", version, about = "Spectral toolkit for the Grushin operator -Δ - |x|²∂²_t", arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scaled Hermite–Fourier transform of a Gaussian wavepacket (JSON coefficients).
    Transform(TransformArgs),
    /// Propagate coefficients with e^{-isG}, e^{-sG} or the wave group (JSON time series).
    Evolve(EvolveArgs),
    /// Sample the strip Schrödinger kernel H_s (CSV x,t,y,t1,s,re,im).
    Kernel(KernelArgs),
    /// Print the dispersive constant M for dimension n.
    Constant {
        #[arg(long)]
        n: usize,
    },
    /// Run a verification experiment and write its report.
    Verify(VerifyArgs),
    /// Re-emit or summarize a JSON report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct TransformArgs {
    /// TOML with optional [transform] (TransformConfig) and [datum] (Wavepacket) tables.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Coefficients written by `transform`.
    #[arg(long)]
    input: PathBuf,
    /// Velocity coefficients (wave only).
    #[arg(long)]
    velocity: Option<PathBuf>,
    #[arg(long, default_value = "schrodinger")]
    kind: String,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    times: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    s: f64,
    /// Target `x1,..,xn,t`; repeatable.
    #[arg(long = "target", required = true, allow_hyphen_values = true)]
    targets: Vec<String>,
    /// Source `y1,..,yn,t1`; repeatable.
    #[arg(long = "source", required = true, allow_hyphen_values = true)]
    sources: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    estimate: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Dotted `key=value` override; repeatable, applied after the config file.
    #[arg(long = "set")]
    overrides: Vec<String>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    input: PathBuf,
    /// Re-emit in this format instead of summarizing.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    tag: &'static str,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, tag: "E_CONFIG", message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: EXIT_CONFIG, tag: "E_IO", message: format!("{}: {e}", path.display()) }
    }
}

impl From<grushin::Error> for Failure {
    fn from(e: grushin::Error) -> Self {
        use grushin::Error::*;
        let tag = match &e {
            Configuration(_) => "E_CONFIG",
            Parameter(_) => "E_PARAM",
            Domain(_) => "E_DOMAIN",
            Index(_) => "E_INDEX",
            Coverage(_) => "E_COVERAGE",
            Evaluation(_) => "E_EVAL",
        };
        let code = if matches!(e, Evaluation(_)) { EXIT_INTERNAL } else { EXIT_CONFIG };
        Self { code, tag, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the command line `argv` (without the program name) and returns the exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("grushin")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            // empty argv and unknown verbs land here with usage text
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                return EXIT_CONFIG;
            }
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error[{}]: {}", f.tag, f.message.replace('\n', " "));
            f.code
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<i32> {
    match cmd {
        Command::Transform(a) => transform(a),
        Command::Evolve(a) => evolve(a),
        Command::Kernel(a) => kernel(a),
        Command::Constant { n } => constant(n),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|e| Failure { code: EXIT_INTERNAL, tag: "E_IO", message: e.to_string() })
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure { code: EXIT_INTERNAL, tag: "E_JSON", message: e.to_string() })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransformFile {
    transform: Option<TransformConfig>,
    datum: Option<Wavepacket>,
}

fn transform(a: TransformArgs) -> CliResult<i32> {
    let file: TransformFile = match &a.config {
        Some(p) => toml::from_str(&read(p)?).map_err(|e| Failure::config(format!("{}: {}", p.display(), e.message())))?,
        None => TransformFile { transform: None, datum: None },
    };
    let cfg = file.transform.unwrap_or_else(|| TransformConfig::default_for(a.n));
    let n = cfg.n;
    let datum = file.datum.unwrap_or(Wavepacket { x0: vec![0.0; n], t0: 0.0, a: 1.0, b: 1.0, xi: vec![0.0; n], tau: 0.0 });
    if datum.x0.len() != n || datum.xi.len() != n {
        return Err(Failure::config(format!("datum has dimension {} but the transform has n = {n}", datum.x0.len())));
    }
    let c = forward_transform(&datum.field(), &cfg)?;
    emit(a.out.as_deref(), &to_json(&c)?)?;
    Ok(EXIT_OK)
}

fn load_coefficients(path: &Path) -> CliResult<SpectralCoefficients> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

fn evolve(a: EvolveArgs) -> CliResult<i32> {
    let kind: EvolutionKind = serde_json::from_value(serde_json::Value::String(a.kind.clone()))
        .map_err(|_| Failure::config(format!("unknown kind '{}' (schrodinger, heat or wave)", a.kind)))?;
    let initial = load_coefficients(&a.input)?;
    let velocity = a.velocity.as_deref().map(load_coefficients).transpose()?;
    let req = EvolutionRequest { kind, times: a.times.clone(), initial, velocity, forcing: None };
    let values = req.run()?;
    emit(a.out.as_deref(), &to_json(&TimeSeries { times: a.times, values })?)?;
    Ok(EXIT_OK)
}

fn point(text: &str, n: usize) -> CliResult<(Vec<f64>, f64)> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::config(format!("bad coordinate '{s}' in '{text}'"))))
        .collect::<CliResult<_>>()?;
    if v.len() != n + 1 {
        return Err(Failure::config(format!("point '{text}' needs n+1 = {} coordinates", n + 1)));
    }
    Ok((v[..n].to_vec(), v[n]))
}

fn kernel(a: KernelArgs) -> CliResult<i32> {
    let targets: Vec<_> = a.targets.iter().map(|t| point(t, a.n)).collect::<CliResult<_>>()?;
    let sources: Vec<_> = a.sources.iter().map(|t| point(t, a.n)).collect::<CliResult<_>>()?;
    let cfg = KernelQuadratureConfig::default();
    let mut out = String::from("x,t,y,t1,s,re,im\n");
    let join = |v: &[f64]| v.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(" ");
    for tg in &targets {
        for sc in &sources {
            let h = schrodinger_kernel_strip(&StripKernelQuery::new(tg.clone(), sc.clone(), a.s)?, &cfg)?;
            out += &format!("{},{:?},{},{:?},{:?},{:?},{:?}\n", join(&tg.0), tg.1, join(&sc.0), sc.1, a.s, h.re, h.im);
        }
    }
    emit(a.out.as_deref(), &out)?;
    Ok(EXIT_OK)
}

/// `v` with ten significant digits.
pub fn ten_digits(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (9 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

fn constant(n: usize) -> CliResult<i32> {
    if n == 0 {
        return Err(Failure::config("n must be at least 1"));
    }
    emit(None, &format!("{}\n", ten_digits(dispersive_constant(n))))?;
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs) -> CliResult<i32> {
    let format: Format = a.format.parse()?;
    let estimate = a.estimate.as_deref().map(str::parse::<Estimate>).transpose()?;
    let text = a.config.as_deref().map(read).transpose()?;
    let mut overrides = Vec::new();
    if let Some(seed) = a.seed {
        overrides.push(format!("seed={seed}"));
    }
    overrides.extend(a.overrides);
    let cfg = ExperimentConfig::load(text.as_deref(), estimate, a.n, &overrides)?;
    let report = grushin_verify::run_experiment(&cfg)?;
    emit(a.out.as_deref(), &report.render(format)?)?;
    if let (Format::Csv, Some(out)) = (format, &a.out) {
        let mut side = out.clone().into_os_string();
        side.push(".meta.json");
        let side = PathBuf::from(side);
        fs::write(&side, to_json(&report.meta)?).map_err(|e| Failure::io(&side, e))?;
    }
    if report.all_pass() {
        Ok(EXIT_OK)
    } else {
        eprintln!("error[E_VALIDATION]: {} of {} rows failed", report.failures(), report.rows.len());
        Ok(EXIT_VALIDATION)
    }
}

fn report(a: ReportArgs) -> CliResult<i32> {
    let r = Report::from_json(&read(&a.input)?)?;
    match a.format.as_deref() {
        Some(f) => emit(a.out.as_deref(), &r.render(f.parse()?)?)?,
        None => {
            let mut text = format!("estimate {} seed {} rows {} failed {}\n", r.meta.estimate, r.meta.seed, r.rows.len(), r.failures());
            for row in r.rows.iter().filter(|r| !r.pass) {
                text += &format!("FAIL {} {} lhs={:?} rhs={:?}\n", row.experiment, row.params, row.lhs, row.rhs);
            }
            emit(a.out.as_deref(), &text)?;
        }
    }
    Ok(if r.all_pass() { EXIT_OK } else { EXIT_VALIDATION })
}
