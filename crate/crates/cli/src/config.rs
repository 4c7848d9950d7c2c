//! TOML configuration: `[geometry]`, `[environment]`, `[fading]` and
//! `[experiment]`. Every key is optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use zsrp_core::fading::FadingParams;
use zsrp_core::propagation::{AirGroundParams, EveCenter, ScenarioGeometry};
use zsrp_core::scheduling::SchemeId;
use zsrp_core::secrecy::ScenarioConfig;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    geometry: GeometrySection,
    environment: EnvironmentSection,
    fading: FadingSection,
    experiment: ExperimentSection,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Distances {
    Common(f64),
    PerUser(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GeometrySection {
    r_br: Option<f64>,
    h_br: Option<f64>,
    users: Option<usize>,
    d_rn: Option<Distances>,
    r_max: Option<f64>,
    eve_center: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EnvironmentSection {
    a2: Option<f64>,
    b2: Option<f64>,
    alpha_zenith: Option<f64>,
    alpha_ground: Option<f64>,
    alpha_rn: Option<f64>,
    alpha_be: Option<f64>,
    g0: Option<f64>,
    gamma_b_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FadingSection {
    m1: Option<u32>,
    m2: Option<u32>,
    l: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExperimentSection {
    kind: Option<String>,
    grid: Option<Vec<f64>>,
    schemes: Option<Vec<String>>,
    evaluators: Option<Vec<String>>,
    trials: Option<u64>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    h_lo: Option<f64>,
    h_hi: Option<f64>,
    tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// ZSRP versus the eavesdropper radius.
    Fig2,
    /// ZSRP versus the number of RIS elements.
    Fig3,
    /// ZSRP versus the UAV altitude.
    Fig4,
    /// The configured point only.
    Single,
}

impl ExperimentKind {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "fig2" => Ok(Self::Fig2),
            "fig3" => Ok(Self::Fig3),
            "fig4" => Ok(Self::Fig4),
            "single" => Ok(Self::Single),
            other => Err(CliError::Config(format!(
                "unknown experiment kind '{other}' (expected fig2, fig3, fig4 or single)"
            ))),
        }
    }

    pub fn sweep_var(self) -> &'static str {
        match self {
            Self::Fig2 => "r_max",
            Self::Fig3 => "l",
            Self::Fig4 | Self::Single => "h_br",
        }
    }

    fn default_grid(self, config: &ScenarioConfig) -> Vec<f64> {
        match self {
            Self::Fig2 => vec![100.0, 200.0, 300.0, 400.0, 500.0],
            Self::Fig3 => vec![4.0, 8.0, 16.0, 32.0],
            Self::Fig4 => (1..=20).map(|i| 50.0 * i as f64).collect(),
            Self::Single => vec![config.geometry.h_br],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluatorKind {
    Mc,
    Analytic,
}

impl EvaluatorKind {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "mc" => Ok(Self::Mc),
            "analytic" => Ok(Self::Analytic),
            other => Err(CliError::Config(format!(
                "unknown evaluator '{other}' (expected mc or analytic)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mc => "mc",
            Self::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub grid: Vec<f64>,
    pub schemes: Vec<SchemeId>,
    pub evaluators: Vec<EvaluatorKind>,
    pub trials: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Altitude search range and tolerance for `optimize-altitude`.
    pub h_lo: f64,
    pub h_hi: f64,
    pub tol: f64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid.is_empty() {
            return Err(CliError::Config("experiment grid is empty".into()));
        }
        if self.schemes.is_empty() {
            return Err(CliError::Config("scheme list is empty".into()));
        }
        if self.evaluators.is_empty() {
            return Err(CliError::Config("evaluator list is empty".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be >= 1".into()));
        }
        if self.trials < 1000 {
            log::warn!("{} trials per point gives a coarse estimate", self.trials);
        }
        for &v in &self.grid {
            let ok = match self.kind {
                ExperimentKind::Fig2 => v.is_finite() && v > 0.0,
                ExperimentKind::Fig3 => v >= 1.0 && v.fract() == 0.0 && v <= 4096.0,
                ExperimentKind::Fig4 | ExperimentKind::Single => v.is_finite() && v > 0.0,
            };
            if !ok {
                return Err(CliError::Config(format!(
                    "grid value {v} is out of range for a {} sweep",
                    self.kind.sweep_var()
                )));
            }
        }
        if !(self.h_lo > 0.0 && self.h_lo < self.h_hi && self.h_hi.is_finite()) {
            return Err(CliError::Config(format!(
                "altitude search range needs 0 < h_lo < h_hi, got [{}, {}]",
                self.h_lo, self.h_hi
            )));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Config(format!("altitude tolerance must be > 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Parses configuration text, filling defaults and validating ranges.
pub fn parse_config(text: &str) -> Result<(ScenarioConfig, ExperimentSpec), CliError> {
    let file: FileConfig =
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;
    let config = scenario(&file)?;
    let spec = experiment(&file.experiment, &config)?;
    Ok((config, spec))
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<(ScenarioConfig, ExperimentSpec), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn scenario(file: &FileConfig) -> Result<ScenarioConfig, CliError> {
    let mut config = ScenarioConfig::default();
    let g = &file.geometry;
    let geo = &mut config.geometry;
    if let Some(v) = g.r_br {
        geo.r_br = v;
    }
    if let Some(v) = g.h_br {
        geo.h_br = v;
    }
    if let Some(v) = g.r_max {
        geo.r_max = v;
    }
    let default_d = ScenarioGeometry::default().d_rn[0];
    geo.d_rn = match (&g.d_rn, g.users) {
        (Some(Distances::PerUser(list)), users) => {
            if users.is_some_and(|u| u != list.len()) {
                return Err(CliError::Config(format!(
                    "geometry.users = {} but d_rn lists {} distances",
                    users.unwrap_or_default(),
                    list.len()
                )));
            }
            list.clone()
        }
        (Some(Distances::Common(d)), users) => vec![*d; users.unwrap_or(geo.d_rn.len())],
        (None, Some(users)) => vec![default_d; users],
        (None, None) => geo.d_rn.clone(),
    };
    geo.eve_center = match g.eve_center.as_deref() {
        None | Some("bs") => EveCenter::Bs,
        Some("fixed") => EveCenter::Fixed(geo.bs_position()),
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown eve_center '{other}' (expected bs or fixed)"
            )))
        }
    };

    let e = &file.environment;
    let air = &mut config.air;
    let defaults = AirGroundParams::default();
    air.a2 = e.a2.unwrap_or(defaults.a2);
    air.b2 = e.b2.unwrap_or(defaults.b2);
    air.alpha_zenith = e.alpha_zenith.unwrap_or(defaults.alpha_zenith);
    air.alpha_ground = e.alpha_ground.unwrap_or(defaults.alpha_ground);
    air.alpha_rn = e.alpha_rn.unwrap_or(defaults.alpha_rn);
    air.g0 = e.g0.unwrap_or(defaults.g0);
    if let Some(v) = e.alpha_be {
        config.alpha_be = v;
    }
    if let Some(v) = e.gamma_b_db {
        config.gamma_b_db = v;
    }

    let f = &file.fading;
    let fd = FadingParams::default();
    config.fading = FadingParams {
        m1: f.m1.unwrap_or(fd.m1),
        m2: f.m2.unwrap_or(fd.m2),
        l: f.l.unwrap_or(fd.l),
    };
    config
        .validate()
        .map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;
    Ok(config)
}

fn experiment(x: &ExperimentSection, config: &ScenarioConfig) -> Result<ExperimentSpec, CliError> {
    let kind = match x.kind.as_deref() {
        Some(s) => ExperimentKind::parse(s)?,
        None => ExperimentKind::Single,
    };
    let schemes = match &x.schemes {
        Some(list) => list
            .iter()
            .map(|s| s.parse::<SchemeId>().map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?,
        None => SchemeId::ALL.to_vec(),
    };
    let evaluators = match &x.evaluators {
        Some(list) => list
            .iter()
            .map(|s| EvaluatorKind::parse(s))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![EvaluatorKind::Mc, EvaluatorKind::Analytic],
    };
    let spec = ExperimentSpec {
        kind,
        grid: x.grid.clone().unwrap_or_else(|| kind.default_grid(config)),
        schemes,
        evaluators,
        trials: x.trials.unwrap_or(100_000),
        seed: x.seed.unwrap_or(1),
        output: x.output.clone(),
        h_lo: x.h_lo.unwrap_or(20.0),
        h_hi: x.h_hi.unwrap_or(1200.0),
        tol: x.tol.unwrap_or(1.0),
    };
    spec.validate()?;
    Ok(spec)
}
