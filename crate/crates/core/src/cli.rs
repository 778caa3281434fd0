//! Command-line surface: `sweep`, `visibility`, `fwhm`, `evolve`, `verify`.
//!
//! Exit codes: 0 on success, 1 on a numerical or verification failure,
//! 2 on a usage error.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    estimate_fwhm, estimate_visibility, pattern_zeros, sweep, verify_routes, AngleGrid, RouteChoice, SweepResult,
    DEFAULT_POINTS,
};
use crate::correlations::{fwhm_predicted, visibility_closed_form};
use crate::error::Error;
use crate::geometry::EmitterChain;
use crate::state::PureState;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(Error::InvalidInput(_)) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

/// Parses a real number or a multiple of pi: `1.5`, `pi`, `2pi`, `-pi/2`,
/// `0.5*pi`, `3pi/4`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || format!("cannot parse '{s}' as a number or multiple of pi");
    let Some(idx) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let coef = t[..idx].trim_end_matches('*').trim();
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = t[idx + 2..].trim();
    let den = if rest.is_empty() {
        1.0
    } else {
        let d = rest.strip_prefix('/').ok_or_else(bad)?;
        d.trim().parse::<f64>().map_err(|_| bad())?
    };
    let v = coef * PI / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_angle_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_real).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum RouteArg {
    #[default]
    Auto,
    Paths,
    Operator,
    #[value(name = "closed_form", alias = "closed-form")]
    ClosedForm,
}

impl From<RouteArg> for RouteChoice {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Auto => RouteChoice::Auto,
            RouteArg::Paths => RouteChoice::Paths,
            RouteArg::Operator => RouteChoice::Operator,
            RouteArg::ClosedForm => RouteChoice::ClosedForm,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "photon-focus",
    version,
    about = "Multi-photon correlations of independent single-photon emitters"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Sample G^(m)(theta1,...,theta1,theta2) over theta2; CSV + JSON meta sidecar.
    Sweep(PatternArgs),
    /// Compare the predicted fringe visibility with a dense-grid measurement.
    Visibility(PatternArgs),
    /// Compare the predicted central peak width with a dense-grid measurement.
    Fwhm(PatternArgs),
    /// Register state after a sequence of detections, and its W-state overlap.
    Evolve(EvolveArgs),
    /// Seeded random cross-check of every correlation route.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct PatternArgs {
    /// Number of emitters N
    #[arg(long)]
    pub n: usize,
    /// Correlation order m (defaults to N)
    #[arg(long)]
    pub m: Option<usize>,
    /// Wavenumber times spacing; accepts `pi`, `2pi`, decimals
    #[arg(long, default_value = "pi", value_parser = parse_real)]
    pub kd: f64,
    /// Angle of the first m-1 detectors (radians)
    #[arg(long, default_value = "0", value_parser = parse_real, allow_hyphen_values = true)]
    pub theta1: f64,
    /// Grid points over [-pi/2, pi/2]
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
    pub route: RouteArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file (stdout when omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "pi", value_parser = parse_real)]
    pub kd: f64,
    /// Comma-separated detection angles, applied in order
    #[arg(long, default_value = "", value_parser = parse_angle_list, allow_hyphen_values = true)]
    pub detections: std::vec::Vec<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest chain size sampled
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Sweep,
    Visibility,
    Fwhm,
    Evolve,
    Verify,
}

/// Fully resolved and validated settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub m: usize,
    pub kd: f64,
    pub theta1: f64,
    pub points: usize,
    pub route: RouteChoice,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub trials: usize,
    pub detections: Vec<f64>,
}

impl RunConfig {
    fn defaults(command: Command, n: usize) -> Self {
        RunConfig {
            command,
            n,
            m: n,
            kd: PI,
            theta1: 0.0,
            points: DEFAULT_POINTS,
            route: RouteChoice::Auto,
            output_format: OutputFormat::Json,
            output_path: None,
            seed: 42,
            trials: 100,
            detections: Vec::new(),
        }
    }

    fn validate(self) -> Result<Self, CliError> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.n == 0 {
            return usage("--n must be at least 1".into());
        }
        if !(self.kd.is_finite() && self.kd > 0.0) {
            return usage(format!("--kd must be positive, got {}", self.kd));
        }
        match self.command {
            Command::Sweep | Command::Visibility | Command::Fwhm => {
                if self.m == 0 || self.m > self.n {
                    return usage(format!("--m must be in 1..={}, got {}", self.n, self.m));
                }
                if self.points < 3 {
                    return usage("--points must be at least 3".into());
                }
                crate::geometry::check_angle(self.theta1)?;
                if matches!(self.command, Command::Visibility | Command::Fwhm) && self.n < 2 {
                    return usage("visibility and fwhm need --n >= 2".into());
                }
            }
            Command::Evolve => {
                if self.detections.len() >= self.n {
                    return usage(format!("--detections must list fewer than N = {} angles", self.n));
                }
                for &a in &self.detections {
                    crate::geometry::check_angle(a)?;
                }
            }
            Command::Verify => {
                if self.n > crate::analysis::VERIFY_MAX_N {
                    return usage(format!("verify supports --n up to {}", crate::analysis::VERIFY_MAX_N));
                }
            }
        }
        Ok(self)
    }
}

impl TryFrom<Cli> for RunConfig {
    type Error = CliError;

    fn try_from(cli: Cli) -> Result<Self, CliError> {
        let config = match cli.command {
            CommandArgs::Sweep(a) => pattern_config(Command::Sweep, a),
            CommandArgs::Visibility(a) => pattern_config(Command::Visibility, a),
            CommandArgs::Fwhm(a) => pattern_config(Command::Fwhm, a),
            CommandArgs::Evolve(a) => RunConfig {
                kd: a.kd,
                output_path: a.output,
                detections: a.detections,
                ..RunConfig::defaults(Command::Evolve, a.n)
            },
            CommandArgs::Verify(a) => RunConfig {
                trials: a.trials,
                seed: a.seed,
                output_path: a.output,
                ..RunConfig::defaults(Command::Verify, a.n)
            },
        };
        config.validate()
    }
}

fn pattern_config(command: Command, a: PatternArgs) -> RunConfig {
    RunConfig {
        m: a.m.unwrap_or(a.n),
        kd: a.kd,
        theta1: a.theta1,
        points: a.points,
        route: a.route.into(),
        output_format: a.format,
        output_path: a.output,
        seed: a.seed,
        ..RunConfig::defaults(command, a.n)
    }
}

/// Executes one command and returns the process exit code.
pub fn run(config: &RunConfig) -> Result<i32, CliError> {
    match config.command {
        Command::Sweep => run_sweep(config),
        Command::Visibility => run_visibility(config),
        Command::Fwhm => run_fwhm(config),
        Command::Evolve => run_evolve(config),
        Command::Verify => run_verify(config),
    }
}

/// Round-trip float formatting: 17 significant digits, `.` separator.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV body for a sweep: header `theta2,g_value,g_normalized`, `\n` endings.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::with_capacity(64 * (result.len() + 1));
    out.push_str("theta2,g_value,g_normalized\n");
    for i in 0..result.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_float(result.angles[i]),
            format_float(result.values[i]),
            format_float(result.normalized[i])
        );
    }
    out
}

fn sweep_meta(config: &RunConfig, result: &SweepResult) -> serde_json::Value {
    json!({
        "n": config.n,
        "m": config.m,
        "kd": config.kd,
        "theta1": config.theta1,
        "route": result.meta.route.as_str(),
        "points": result.len(),
        "seed": config.seed,
        "tool_version": TOOL_VERSION,
    })
}

/// Path of the JSON metadata written next to a CSV output.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{stem}.meta.json"))
}

fn run_sweep(config: &RunConfig) -> Result<i32, CliError> {
    let chain = EmitterChain::new(config.n, config.kd)?;
    let grid = AngleGrid::full(config.points)?;
    let result = sweep(&chain, config.m, config.theta1, &grid, config.route)?;
    let meta = sweep_meta(config, &result);
    match config.output_format {
        OutputFormat::Csv => {
            emit(config.output_path.as_deref(), sweep_csv(&result).as_bytes())?;
            let meta_text = serde_json::to_string_pretty(&meta)? + "\n";
            match &config.output_path {
                Some(path) => write_atomic(&sidecar_path(path), meta_text.as_bytes())?,
                None => eprint!("{meta_text}"),
            }
        }
        OutputFormat::Json => {
            let body = json!({
                "meta": meta,
                "theta2": result.angles,
                "g_value": result.values,
                "g_normalized": result.normalized,
            });
            emit_json(config.output_path.as_deref(), &body)?;
        }
    }
    Ok(EXIT_OK)
}

fn comparison(config: &RunConfig, predicted: f64, measured: f64) -> serde_json::Value {
    let relative_error = if predicted != 0.0 {
        (measured - predicted).abs() / predicted.abs()
    } else {
        (measured - predicted).abs()
    };
    json!({
        "n": config.n,
        "m": config.m,
        "kd": config.kd,
        "theta1": config.theta1,
        "points": config.points,
        "predicted": predicted,
        "measured": measured,
        "relative_error": relative_error,
        "tool_version": TOOL_VERSION,
    })
}

fn run_visibility(config: &RunConfig) -> Result<i32, CliError> {
    let chain = EmitterChain::new(config.n, config.kd)?;
    let grid = AngleGrid::full(config.points)?.with_angles(pattern_zeros(config.n, config.kd, config.theta1))?;
    let result = sweep(&chain, config.m, config.theta1, &grid, config.route)?;
    let measured = estimate_visibility(&result)?;
    let predicted = visibility_closed_form(config.n, config.m)?;
    emit_json(config.output_path.as_deref(), &comparison(config, predicted, measured))?;
    Ok(EXIT_OK)
}

fn run_fwhm(config: &RunConfig) -> Result<i32, CliError> {
    let chain = EmitterChain::new(config.n, config.kd)?;
    let grid = AngleGrid::full(config.points)?;
    let result = sweep(&chain, config.m, config.theta1, &grid, config.route)?;
    let measured = estimate_fwhm(&result)?;
    let predicted = fwhm_predicted(config.n, config.kd)?;
    emit_json(config.output_path.as_deref(), &comparison(config, predicted, measured))?;
    Ok(EXIT_OK)
}

fn run_evolve(config: &RunConfig) -> Result<i32, CliError> {
    let chain = EmitterChain::new(config.n, config.kd)?;
    let state = PureState::conditional_state(&chain, &config.detections)?;
    let (target, overlap_sq) = if config.n < 2 {
        (serde_json::Value::Null, serde_json::Value::Null)
    } else {
        let same_angle = config.detections.windows(2).all(|w| w[0] == w[1]);
        let (name, target) = match config.detections.first() {
            Some(&theta) if same_angle && theta != 0.0 => {
                ("heralded_w_state", PureState::heralded_w_state(&chain, theta)?)
            }
            _ => ("w_state", PureState::w_state(config.n)?),
        };
        (json!(name), json!(state.overlap(&target)?.norm_sqr()))
    };
    let body = json!({
        "n": config.n,
        "kd": config.kd,
        "detections": config.detections,
        "state": state,
        "target": target,
        "overlap_sq": overlap_sq,
        "tool_version": TOOL_VERSION,
    });
    emit_json(config.output_path.as_deref(), &body)?;
    Ok(EXIT_OK)
}

fn run_verify(config: &RunConfig) -> Result<i32, CliError> {
    let report = verify_routes(config.n, config.trials, config.seed)?;
    let mut body = serde_json::to_value(&report)?;
    body["tool_version"] = json!(TOOL_VERSION);
    emit_json(config.output_path.as_deref(), &body)?;
    eprintln!(
        "verify seed={} trials={} max_route_discrepancy={:e} max_permanent_discrepancy={:e}: {}",
        report.seed,
        report.trials,
        report.max_route_discrepancy,
        report.max_permanent_discrepancy,
        if report.passed { "pass" } else { "FAIL" }
    );
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
}

fn emit_json(path: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    emit(path, text.as_bytes())
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pi_multiples() {
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_real("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_real("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_real("3PI/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_real("1.25").unwrap(), 1.25);
        assert!(parse_real("tau").is_err());
        assert!(parse_real("pi/x").is_err());
        assert!(parse_real("2pi3").is_err());
        assert_eq!(parse_angle_list("0,pi/6,-0.1").unwrap(), vec![0.0, PI / 6.0, -0.1]);
        assert!(parse_angle_list("").unwrap().is_empty());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, -0.1234567890123457, 1.0 / 3.0, 3.6288e6, 1e-300] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn config_validation() {
        let cli = Cli::parse_from(["photon-focus", "sweep", "--n", "3", "--m", "4"]);
        assert_eq!(RunConfig::try_from(cli).unwrap_err().exit_code(), EXIT_USAGE);
        let cli = Cli::parse_from(["photon-focus", "evolve", "--n", "3", "--detections", "0,0,0"]);
        assert_eq!(RunConfig::try_from(cli).unwrap_err().exit_code(), EXIT_USAGE);
        let cli = Cli::parse_from(["photon-focus", "verify", "--n", "9"]);
        assert!(RunConfig::try_from(cli).is_err());
        let cli = Cli::parse_from(["photon-focus", "sweep", "--n", "10", "--kd", "2pi", "--theta1", "-pi/8"]);
        let c = RunConfig::try_from(cli).unwrap();
        assert_eq!((c.n, c.m, c.kd, c.theta1), (10, 10, 2.0 * PI, -PI / 8.0));
        assert_eq!(c.output_format, OutputFormat::Csv);
    }

    #[test]
    fn sidecar_next_to_csv() {
        assert_eq!(
            sidecar_path(Path::new("out/fig2.csv")),
            PathBuf::from("out/fig2.meta.json")
        );
        assert_eq!(sidecar_path(Path::new("fig2")), PathBuf::from("fig2.meta.json"));
    }
}
