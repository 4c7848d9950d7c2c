//! Sweeps over one scenario parameter and the CSV they produce.

use std::io::Write;
use std::time::Instant;

use zsrp_core::analytic::zsrp_for_scheme;
use zsrp_core::scheduling::{Connectivity, SchemeId};
use zsrp_core::secrecy::{run_monte_carlo_schemes, ScenarioConfig};

use crate::config::{EvaluatorKind, ExperimentKind, ExperimentSpec};
use crate::CliError;

pub const CSV_HEADER: &str = "sweep_var,sweep_value,scheme,evaluator,zsrp,std_err,trials,seed,wall_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_var: &'static str,
    pub sweep_value: f64,
    pub scheme: SchemeId,
    pub evaluator: EvaluatorKind,
    pub zsrp: f64,
    /// Zero for analytic rows.
    pub std_err: f64,
    /// Zero for analytic rows.
    pub trials: u64,
    pub seed: u64,
    /// Wall time of the evaluation, or 0 unless timing was requested.
    pub wall_ms: u64,
}

impl Row {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.sweep_var,
            self.sweep_value,
            self.scheme,
            self.evaluator.as_str(),
            self.zsrp,
            self.std_err,
            self.trials,
            self.seed,
            self.wall_ms
        )
    }
}

/// The scenario at one grid point of a sweep.
pub fn point_config(base: &ScenarioConfig, kind: ExperimentKind, value: f64) -> ScenarioConfig {
    let mut config = base.clone();
    match kind {
        ExperimentKind::Fig2 => config.geometry.r_max = value,
        ExperimentKind::Fig3 => config.fading.l = value as usize,
        ExperimentKind::Fig4 | ExperimentKind::Single => config.geometry.h_br = value,
    }
    config
}

fn elapsed_ms(start: Instant, timing: bool) -> u64 {
    if timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

/// Evaluates every (grid point, scheme, evaluator) combination. Monte-Carlo
/// rows at one grid point share their random draws across schemes.
/// Analytic rows for single-connected schemes are skipped with a warning.
pub fn run_experiment(
    base: &ScenarioConfig,
    spec: &ExperimentSpec,
    timing: bool,
) -> Result<Vec<Row>, CliError> {
    spec.validate()?;
    let sweep_var = spec.kind.sweep_var();
    let wants_mc = spec.evaluators.contains(&EvaluatorKind::Mc);
    let mut skipped_note = false;
    let mut rows = Vec::new();
    for &value in &spec.grid {
        let config = point_config(base, spec.kind, value);
        config
            .validate()
            .map_err(|e| CliError::Config(format!("{sweep_var} = {value}: {e}")))?;
        let mc = if wants_mc {
            let start = Instant::now();
            let estimates = run_monte_carlo_schemes(&config, &spec.schemes, spec.trials, spec.seed)?;
            Some((estimates, elapsed_ms(start, timing)))
        } else {
            None
        };
        for (i, &scheme) in spec.schemes.iter().enumerate() {
            for &evaluator in &spec.evaluators {
                match evaluator {
                    EvaluatorKind::Mc => {
                        let (estimates, wall_ms) = mc.as_ref().expect("Monte-Carlo evaluated");
                        let est = estimates[i];
                        rows.push(Row {
                            sweep_var,
                            sweep_value: value,
                            scheme,
                            evaluator,
                            zsrp: est.p_hat,
                            std_err: est.std_err,
                            trials: est.trials,
                            seed: est.seed,
                            wall_ms: *wall_ms,
                        });
                    }
                    EvaluatorKind::Analytic => {
                        if scheme.connectivity() == Connectivity::Single {
                            if !skipped_note {
                                log::warn!("no analytic expression for single-connected schemes; those analytic rows are omitted");
                                skipped_note = true;
                            }
                            continue;
                        }
                        let start = Instant::now();
                        let zsrp = zsrp_for_scheme(scheme, &config)?;
                        rows.push(Row {
                            sweep_var,
                            sweep_value: value,
                            scheme,
                            evaluator,
                            zsrp,
                            std_err: 0.0,
                            trials: 0,
                            seed: spec.seed,
                            wall_ms: elapsed_ms(start, timing),
                        });
                    }
                }
            }
        }
        log::info!("{sweep_var} = {value} done");
    }
    Ok(rows)
}

/// Writes the header and one line per row, LF-terminated.
pub fn write_csv<W: Write>(rows: &[Row], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    out.flush()
}
