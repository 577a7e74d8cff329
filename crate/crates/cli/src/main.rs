//! `complementarity`: simulate, analyse, sweep and verify joint-measurement
//! complementarity relations.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 invalid input
//! data, 4 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use complementarity::dataio::{emit_analysis_csv, emit_json, format_number, parse_density_matrix, parse_distribution};
use complementarity::experiment::{self, Analysis, EstimatorChoice, ScenarioConfig, StateSource};
use complementarity::verify::{run_verification, VerifyConfig, VerifySummary};
use complementarity::{EstimatorKind, Tolerances};

#[derive(Parser)]
#[command(name = "complementarity", version, about = "Joint-measurement complementarity relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict p(m, y, w) for one scenario and evaluate the relations.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// W polar angle in degrees.
        #[arg(long, default_value_t = 90.0)]
        theta: f64,
        /// W azimuth in degrees.
        #[arg(long, default_value_t = 180.0)]
        phi: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Analyse a measured distribution file.
    Analyze {
        /// Distribution CSV (m,y,w,p,sigma).
        #[arg(long)]
        dist_file: PathBuf,
        #[command(flatten)]
        state: StateArgs,
        /// Override the file's r_h.
        #[arg(long, requires = "rv")]
        rh: Option<f64>,
        /// Override the file's r_v.
        #[arg(long, requires = "rh")]
        rv: Option<f64>,
        #[command(flatten)]
        estimators: EstimatorArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value = "standard")]
        tolerance_profile: String,
    },
    /// Simulate a list or range of W azimuths.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 90.0)]
        theta: f64,
        /// Comma-separated list (`135,180,225`) or `start:stop:step` range, in degrees.
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the randomised verification suites.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct StateArgs {
    /// Source entanglement angle in degrees (default 22.5).
    #[arg(long, conflicts_with = "state_file")]
    gamma: Option<f64>,
    /// Density-matrix CSV (row,col,re,im).
    #[arg(long)]
    state_file: Option<PathBuf>,
}

#[derive(Args)]
struct EstimatorArgs {
    #[arg(long, value_enum, default_value = "both")]
    estimator: EstimatorArg,
    /// Y estimate: the outcome itself, or its conditional mean.
    #[arg(long, value_enum, default_value = "simple")]
    y_estimator: YEstimatorArg,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = 0.1244)]
    rh: f64,
    #[arg(long, default_value_t = 0.4645)]
    rv: f64,
    #[command(flatten)]
    estimators: EstimatorArgs,
    #[arg(long, default_value = "standard")]
    tolerance_profile: String,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default: csv for sweeps, json otherwise).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Simple,
    Optimal,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum YEstimatorArg {
    Simple,
    Optimal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Data {
        path: String,
        source: complementarity::Error,
    },
    #[error("{0}")]
    Model(#[from] complementarity::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io { .. } => 1,
            Failure::Usage(_) => 2,
            Failure::Data { .. } | Failure::Model(_) => 3,
            Failure::Verification(_) => 4,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|source| Failure::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_output(output: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|source| Failure::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn tolerances(profile: &str) -> Result<Tolerances, Failure> {
    Tolerances::from_profile(profile).map_err(|e| Failure::Usage(e.to_string()))
}

impl EstimatorArgs {
    fn choice(&self) -> EstimatorChoice {
        match self.estimator {
            EstimatorArg::Simple => EstimatorChoice::Simple,
            EstimatorArg::Optimal => EstimatorChoice::Optimal,
            EstimatorArg::Both => EstimatorChoice::Both,
        }
    }

    fn y_kind(&self) -> EstimatorKind {
        match self.y_estimator {
            YEstimatorArg::Simple => EstimatorKind::Simple,
            YEstimatorArg::Optimal => EstimatorKind::Optimal,
        }
    }
}

impl StateArgs {
    fn source(&self, tol: &Tolerances) -> Result<StateSource, Failure> {
        match (&self.state_file, self.gamma) {
            (Some(_), Some(_)) => Err(Failure::Usage("give either --gamma or --state-file, not both".into())),
            (Some(path), None) => {
                let data_err = |source| Failure::Data {
                    path: path.display().to_string(),
                    source,
                };
                let file = parse_density_matrix(&read(path)?, tol).map_err(data_err)?;
                for w in &file.warnings {
                    eprintln!("warning: {}: {w}", path.display());
                }
                let reference_gamma_deg = file
                    .metadata
                    .get("gamma_deg")
                    .map(|g| {
                        g.parse::<f64>().map_err(|_| {
                            data_err(complementarity::Error::Parse {
                                line: 0,
                                message: format!("gamma_deg `{g}` is not a number"),
                            })
                        })
                    })
                    .transpose()?;
                let name = path
                    .file_name()
                    .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
                Ok(StateSource::Tomographic {
                    name,
                    state: file.state,
                    reference_gamma_deg,
                })
            }
            (None, gamma) => Ok(StateSource::Epr {
                gamma_deg: gamma.unwrap_or(22.5),
            }),
        }
    }
}

impl ScenarioArgs {
    fn config(&self, theta: f64, phi: f64) -> Result<ScenarioConfig, Failure> {
        let tol = tolerances(&self.tolerance_profile)?;
        Ok(ScenarioConfig {
            source: self.state.source(&tol)?,
            r_h: self.rh,
            r_v: self.rv,
            theta_deg: theta,
            phi_deg: phi,
            x_estimator: self.estimators.choice(),
            y_estimator: self.estimators.y_kind(),
            tolerances: tol,
        })
    }
}

/// `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
fn parse_angles(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = |what: &str| Failure::Usage(format!("--phi `{spec}`: {what}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(bad("range must be start:stop:step"));
        };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(bad("range needs step > 0 and stop >= start"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| start + i as f64 * step).collect())
    } else {
        let angles = spec.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
        if angles.is_empty() {
            return Err(bad("no angles"));
        }
        Ok(angles)
    }
}

fn render(analyses: &[Analysis], single: bool, format: Format) -> String {
    match (format, single) {
        (Format::Csv, _) => emit_analysis_csv(analyses),
        (Format::Json, true) => emit_json(&analyses[0]),
        (Format::Json, false) => emit_json(&analyses),
    }
}

fn verify_csv(summary: &VerifySummary) -> String {
    let mut out = format!("# seed={}\n# ak_violations={}\nsuite,trials,failures,worst\n", summary.seed, summary.ak_violations);
    for s in &summary.suites {
        out.push_str(&format!("{},{},{},{}\n", s.name, s.trials, s.failures, format_number(s.worst)));
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            scenario,
            theta,
            phi,
            output,
        } => {
            let a = experiment::simulate(&scenario.config(theta, phi)?)?;
            write_output(&output, &render(&[a], true, output.format.unwrap_or(Format::Json)))
        }
        Command::Analyze {
            dist_file,
            state,
            rh,
            rv,
            estimators,
            output,
            tolerance_profile,
        } => {
            let tol = tolerances(&tolerance_profile)?;
            let source = state.source(&tol)?;
            let file = parse_distribution(&read(&dist_file)?, &tol).map_err(|source| Failure::Data {
                path: dist_file.display().to_string(),
                source,
            })?;
            let slide = rh.zip(rv);
            let a = experiment::analyze(&file, slide, &source, estimators.choice(), estimators.y_kind(), &tol)
                .map_err(|source| Failure::Data {
                    path: dist_file.display().to_string(),
                    source,
                })?;
            write_output(&output, &render(&[a], true, output.format.unwrap_or(Format::Json)))
        }
        Command::Sweep {
            scenario,
            theta,
            phi,
            output,
        } => {
            let phis = parse_angles(&phi)?;
            let config = scenario.config(theta, phis[0])?;
            let rows = experiment::sweep(&config, &phis)?;
            write_output(&output, &render(&rows, false, output.format.unwrap_or(Format::Csv)))
        }
        Command::Verify { trials, seed, output } => {
            if trials == 0 {
                return Err(Failure::Usage("--trials must be positive".into()));
            }
            let summary = run_verification(&VerifyConfig { trials, seed });
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => emit_json(&summary),
                Format::Csv => verify_csv(&summary),
            };
            write_output(&output, &text)?;
            for s in &summary.suites {
                eprintln!(
                    "{:<24} {:>6} trials  {:>4} failures  worst {}",
                    s.name,
                    s.trials,
                    s.failures,
                    format_number(s.worst)
                );
            }
            eprintln!("arthurs-kelly violations: {}", summary.ak_violations);
            if summary.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = summary.suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect();
                Err(Failure::Verification(failed.join(", ")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
