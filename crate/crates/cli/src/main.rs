use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zsrp_core::analytic::{zsrp_pfs_report, zsrp_rs_report, ClosedFormParams, ZsrpReport};
use zsrp_core::optimize::{optimal_altitude, AltitudeSearchSpec, Evaluator};
use zsrp_core::scheduling::SchemeId;
use zsrp_core::secrecy::{run_monte_carlo, ScenarioConfig};
use zsrp_core::Error;
use zsrp_cli::config::{load_config, parse_config, EvaluatorKind};
use zsrp_cli::selftest::run_selftest;
use zsrp_cli::{run_experiment, write_csv, CliError, ExperimentSpec};

/// Zero-secrecy-rate probability of FC-RIS assisted UAV downlinks.
#[derive(Debug, Parser)]
#[command(name = "zsrp", version)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed of the Monte-Carlo streams.
    #[arg(long, global = true, env = "ZSRP_SEED")]
    seed: Option<u64>,
    /// Monte-Carlo trials per point.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: the configured output, else stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall-clock milliseconds in the output.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured experiment and write CSV.
    Run,
    /// Evaluate one scheme at the configured point.
    Zsrp {
        #[arg(long, default_value = "fcr-rs")]
        scheme: String,
        /// `analytic` or `mc`.
        #[arg(long, default_value = "analytic")]
        evaluator: String,
        /// Also evaluate the Meijer-G closed forms and the series path.
        #[arg(long)]
        closed_form: bool,
    },
    /// Search the altitude that minimises the ZSRP.
    OptimizeAltitude {
        #[arg(long, default_value = "fcr-rs")]
        scheme: String,
        /// `analytic` or `mc`.
        #[arg(long, default_value = "analytic")]
        evaluator: String,
        #[arg(long)]
        h_lo: Option<f64>,
        #[arg(long)]
        h_hi: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Check the numerical building blocks against independent oracles.
    Selftest,
}

fn output(cli: &Cli, spec: &ExperimentSpec) -> Result<Box<dyn Write>, CliError> {
    match cli.out.as_ref().or(spec.output.as_ref()) {
        Some(path) => Ok(Box::new(BufWriter::new(File::create(path)?))),
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn load(cli: &Cli) -> Result<(ScenarioConfig, ExperimentSpec), CliError> {
    let (config, mut spec) = match &cli.config {
        Some(path) => load_config(path)?,
        None => parse_config("")?,
    };
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(trials) = cli.trials {
        spec.trials = trials;
    }
    spec.validate()?;
    Ok((config, spec))
}

fn scheme(s: &str) -> Result<SchemeId, CliError> {
    s.parse().map_err(|e: Error| CliError::Config(e.to_string()))
}

fn report_lines(report: &ZsrpReport) -> Vec<String> {
    let mut lines = vec![format!("zsrp={}", report.value)];
    for (key, v) in [
        ("series", report.series),
        ("meijer", report.meijer),
        ("printed", report.printed),
    ] {
        if let Some(v) = v {
            lines.push(format!("{key}={v}"));
        }
    }
    lines
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run => {
            let (config, spec) = load(cli)?;
            let rows = run_experiment(&config, &spec, cli.timing)?;
            write_csv(&rows, output(cli, &spec)?)?;
        }
        Command::Zsrp {
            scheme: s,
            evaluator,
            closed_form,
        } => {
            let (mut config, spec) = load(cli)?;
            let id = scheme(s)?;
            config.scheme = id;
            let mut lines = vec![format!("scheme={id}"), format!("evaluator={evaluator}")];
            match EvaluatorKind::parse(evaluator)? {
                EvaluatorKind::Mc => {
                    let est = run_monte_carlo(&config, spec.trials, spec.seed)?;
                    lines.push(format!("zsrp={}", est.p_hat));
                    lines.push(format!("std_err={}", est.std_err));
                    lines.push(format!("trials={}", est.trials));
                    lines.push(format!("seed={}", est.seed));
                }
                EvaluatorKind::Analytic => {
                    let p = ClosedFormParams::from_config(&config)?;
                    let report = match id {
                        SchemeId::FcrRs => zsrp_rs_report(&p, *closed_form)?,
                        SchemeId::FcrGcsiPfs => zsrp_pfs_report(&p, *closed_form)?,
                        other => {
                            return Err(Error::NotAvailable(format!(
                                "no analytic expression for {other}; use --evaluator mc"
                            ))
                            .into())
                        }
                    };
                    lines.extend(report_lines(&report));
                }
            }
            let mut out = output(cli, &spec)?;
            for line in lines {
                writeln!(out, "{line}")?;
            }
            out.flush()?;
        }
        Command::OptimizeAltitude {
            scheme: s,
            evaluator,
            h_lo,
            h_hi,
            tol,
        } => {
            let (config, spec) = load(cli)?;
            let id = scheme(s)?;
            let search = AltitudeSearchSpec {
                h_lo: h_lo.unwrap_or(spec.h_lo),
                h_hi: h_hi.unwrap_or(spec.h_hi),
                tol: tol.unwrap_or(spec.tol),
                scheme: id,
                config,
                evaluator: match EvaluatorKind::parse(evaluator)? {
                    EvaluatorKind::Analytic => Evaluator::Analytic,
                    EvaluatorKind::Mc => Evaluator::MonteCarlo {
                        trials: spec.trials,
                        seed: spec.seed,
                    },
                },
            };
            let result = optimal_altitude(&search)?;
            let mut out = output(cli, &spec)?;
            writeln!(out, "scheme={id}")?;
            writeln!(out, "evaluator={evaluator}")?;
            writeln!(out, "altitude={}", result.altitude)?;
            writeln!(out, "zsrp={}", result.zsrp)?;
            writeln!(out, "evaluations={}", result.evaluations)?;
            out.flush()?;
        }
        Command::Selftest => run_selftest(io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(0) => Err(CliError::Config("--threads must be >= 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(CliError::Config(format!("cannot start {n} threads: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
