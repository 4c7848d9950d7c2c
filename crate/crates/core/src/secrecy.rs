//! Capacities, the zero-secrecy-rate event and the Monte-Carlo ZSRP engine.
//!
//! Every trial owns a ChaCha8 stream selected by `(seed, trial index)`, and
//! all schemes consume the same draws in the same order: BS-RIS element
//! powers, then RIS-user element powers user by user, then the eavesdropper
//! placement. Estimates for different schemes, altitudes or powers that use
//! the same seed therefore share random numbers. Trials are grouped into
//! fixed blocks whose partial sums are reduced in block order, so the
//! result does not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bdris::{fc_gain_from_powers, sc_gain_from_powers};
use crate::error::{domain, Result};
use crate::fading::{FadingParams, NakagamiPower};
use crate::propagation::{
    large_scale_gain, sample_eve_placement, AirGroundParams, EveCenter, EvePlacement,
    ScenarioGeometry,
};
use crate::scheduling::{
    sc_ergodic_gain, select_fcsi_pfs, select_gcsi_pfs, Connectivity, SchemeId, Selection,
};

/// Trials per reduction block.
const BLOCK: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: ScenarioGeometry,
    pub air: AirGroundParams,
    pub fading: FadingParams,
    /// Transmit SNR `P_B / N_0` in dB.
    pub gamma_b_db: f64,
    /// Path-loss exponent of the UAV-eavesdropper link.
    pub alpha_be: f64,
    pub scheme: SchemeId,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            geometry: ScenarioGeometry::default(),
            air: AirGroundParams::default(),
            fading: FadingParams::default(),
            gamma_b_db: 20.0,
            alpha_be: 2.0,
            scheme: SchemeId::FcrRs,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.air.validate()?;
        self.fading.validate()?;
        if !self.gamma_b_db.is_finite() {
            return domain(format!("gamma_b must be finite, got {}", self.gamma_b_db));
        }
        if !(self.alpha_be > 0.0) || !self.alpha_be.is_finite() {
            return domain(format!("alpha_be must be finite and > 0, got {}", self.alpha_be));
        }
        Ok(())
    }

    pub fn users(&self) -> usize {
        self.geometry.users()
    }

    pub fn gamma_b_linear(&self) -> f64 {
        db_to_linear(self.gamma_b_db)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZsrpEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Small-scale realisation of one trial, as unit-mean element powers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub br_power: Vec<f64>,
    /// One power profile per user.
    pub rn_power: Vec<Vec<f64>>,
    pub eve: EvePlacement,
}

/// `log2(1 + gamma_b * gain)`.
pub fn capacity_main(gamma_b: f64, cascaded_gain: f64) -> f64 {
    (gamma_b * cascaded_gain).ln_1p() / std::f64::consts::LN_2
}

/// `log2(1 + gamma_b * gain)` for the wiretap link.
pub fn capacity_eve(gamma_b: f64, wiretap_gain: f64) -> f64 {
    capacity_main(gamma_b, wiretap_gain)
}

/// Zero secrecy rate occurs when the main gain is strictly below the
/// wiretap gain; `gamma_b` drops out because `log2(1 + gamma x)` is increasing.
pub fn zsr_indicator(main_gain: f64, eve_gain: f64) -> bool {
    main_gain < eve_gain
}

/// The per-trial RNG stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Per-configuration constants shared by all trials.
struct Prepared {
    users: usize,
    l: usize,
    sigma2_br: f64,
    sigma2_rn: Vec<f64>,
    br: NakagamiPower,
    rn: NakagamiPower,
    sc_norm: f64,
    g0: f64,
    alpha_be: f64,
    r_max: f64,
    eve_center: EveCenter,
    bs: crate::propagation::NodePosition,
}

impl Prepared {
    fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let g = &config.geometry;
        let sigma2_rn = (0..g.users())
            .map(|n| g.ris_user_gain(&config.air, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            users: g.users(),
            l: config.fading.l,
            sigma2_br: g.bs_ris_gain(&config.air)?,
            sigma2_rn,
            br: NakagamiPower::new(config.fading.m2, 1.0)?,
            rn: NakagamiPower::new(config.fading.m1, 1.0)?,
            sc_norm: sc_ergodic_gain(config.fading.m1, config.fading.m2, config.fading.l),
            g0: config.air.g0,
            alpha_be: config.alpha_be,
            r_max: g.r_max,
            eve_center: g.eve_center,
            bs: g.bs_position(),
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, draw: &mut ChannelDraw) -> Result<()> {
        self.br.fill(rng, &mut draw.br_power);
        for profile in &mut draw.rn_power {
            self.rn.fill(rng, profile);
        }
        draw.eve = sample_eve_placement(rng, self.r_max)?;
        Ok(())
    }

    fn empty_draw(&self) -> ChannelDraw {
        ChannelDraw {
            br_power: vec![0.0; self.l],
            rn_power: vec![vec![0.0; self.l]; self.users],
            eve: EvePlacement {
                d_be: 0.0,
                lambda_e: 0.0,
                beta_e: 0.0,
            },
        }
    }

    fn eve_distance(&self, eve: &EvePlacement) -> f64 {
        match self.eve_center {
            EveCenter::Bs => eve.d_be,
            EveCenter::Fixed(c) => eve.position(&c).distance(&self.bs),
        }
    }

    fn eve_gain(&self, d_be: f64) -> Result<f64> {
        if d_be == 0.0 {
            return Ok(f64::INFINITY);
        }
        large_scale_gain(self.g0, d_be, self.alpha_be)
    }

    /// Small-scale cascaded gain of user `n`.
    fn unit_gain(&self, conn: Connectivity, draw: &ChannelDraw, n: usize) -> f64 {
        match conn {
            Connectivity::Fully => fc_gain_from_powers(&draw.br_power, &draw.rn_power[n]),
            Connectivity::Single => sc_gain_from_powers(&draw.br_power, &draw.rn_power[n]),
        }
    }

    fn main_gain(&self, conn: Connectivity, draw: &ChannelDraw, n: usize) -> f64 {
        self.sigma2_rn[n] * self.sigma2_br * self.unit_gain(conn, draw, n)
    }

    /// The user served in this draw, or `None` for round-robin (all users
    /// are averaged).
    fn selected(&self, scheme: SchemeId, draw: &ChannelDraw, scratch: &mut Vec<f64>) -> Result<Option<usize>> {
        scratch.clear();
        match scheme.selection() {
            Selection::RoundRobin => Ok(None),
            Selection::GcsiPfs => {
                // Unit-mean element powers: S_n / E[S_n] up to the common factor L.
                scratch.extend(draw.rn_power.iter().map(|p| p.iter().sum::<f64>()));
                Ok(Some(select_gcsi_pfs(scratch)?))
            }
            Selection::FcsiPfs => {
                for n in 0..self.users {
                    let gain = self.main_gain(scheme.connectivity(), draw, n);
                    let ergodic = self.sigma2_rn[n] * self.sigma2_br * match scheme.connectivity() {
                        Connectivity::Fully => (self.l * self.l) as f64,
                        Connectivity::Single => self.sc_norm,
                    };
                    scratch.push(gain / ergodic);
                }
                Ok(Some(select_fcsi_pfs(scratch)?))
            }
        }
    }

    /// `P(main gain of user n < wiretap gain | small-scale draw)`, integrating
    /// the eavesdropper radius analytically.
    fn conditional_outage(&self, main: f64) -> f64 {
        if self.r_max == 0.0 {
            return 1.0;
        }
        let reach = (self.g0 / main).powf(1.0 / self.alpha_be);
        (reach / self.r_max).min(1.0).powi(3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Estimator {
    Indicator,
    Conditional,
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return domain("trials must be >= 1");
    }
    Ok(())
}

fn run_blocks(
    config: &ScenarioConfig,
    schemes: &[SchemeId],
    trials: u64,
    seed: u64,
    estimator: Estimator,
) -> Result<Vec<ZsrpEstimate>> {
    check_trials(trials)?;
    let prep = Prepared::new(config)?;
    let k = schemes.len();
    let blocks = trials.div_ceil(BLOCK);
    let partials: Vec<Result<Vec<(f64, f64)>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut sums = vec![(0.0f64, 0.0f64); k];
            let mut draw = prep.empty_draw();
            let mut scratch = Vec::with_capacity(prep.users);
            let start = b * BLOCK;
            let end = (start + BLOCK).min(trials);
            for trial in start..end {
                let mut rng = trial_rng(seed, trial);
                prep.draw(&mut rng, &mut draw)?;
                let d_be = prep.eve_distance(&draw.eve);
                let eve = prep.eve_gain(d_be)?;
                for (slot, &scheme) in sums.iter_mut().zip(schemes) {
                    let conn = scheme.connectivity();
                    let value = |n: usize| {
                        let main = prep.main_gain(conn, &draw, n);
                        match estimator {
                            Estimator::Indicator => f64::from(u8::from(zsr_indicator(main, eve))),
                            Estimator::Conditional => prep.conditional_outage(main),
                        }
                    };
                    let v = match prep.selected(scheme, &draw, &mut scratch)? {
                        Some(o) => value(o),
                        None => (0..prep.users).map(value).sum::<f64>() / prep.users as f64,
                    };
                    slot.0 += v;
                    slot.1 += v * v;
                }
            }
            Ok(sums)
        })
        .collect();
    let mut totals = vec![(0.0f64, 0.0f64); k];
    for block in partials {
        for (t, s) in totals.iter_mut().zip(block?) {
            t.0 += s.0;
            t.1 += s.1;
        }
    }
    let n = trials as f64;
    Ok(totals
        .into_iter()
        .map(|(sum, sum_sq)| {
            let p_hat = (sum / n).clamp(0.0, 1.0);
            let std_err = match estimator {
                Estimator::Indicator => (p_hat * (1.0 - p_hat) / n).sqrt(),
                Estimator::Conditional => {
                    let var = if trials > 1 {
                        ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0)
                    } else {
                        0.0
                    };
                    (var / n).sqrt()
                }
            };
            ZsrpEstimate {
                p_hat,
                std_err,
                trials,
                seed,
            }
        })
        .collect())
}

/// Monte-Carlo ZSRP of `config.scheme`.
pub fn run_monte_carlo(config: &ScenarioConfig, trials: u64, seed: u64) -> Result<ZsrpEstimate> {
    Ok(run_blocks(config, &[config.scheme], trials, seed, Estimator::Indicator)?[0])
}

/// Monte-Carlo ZSRP of several schemes on shared draws; `config.scheme` is
/// ignored.
pub fn run_monte_carlo_schemes(
    config: &ScenarioConfig,
    schemes: &[SchemeId],
    trials: u64,
    seed: u64,
) -> Result<Vec<ZsrpEstimate>> {
    run_blocks(config, schemes, trials, seed, Estimator::Indicator)
}

/// Monte-Carlo ZSRP with the eavesdropper radius integrated in closed form
/// per draw: each trial contributes `min(1, (g0 / main)^(1/alpha_be) / R)^3`
/// instead of a 0/1 indicator. Same estimand, lower variance and a smooth
/// dependence on the geometry. Falls back to the indicator estimator when
/// the eavesdropper ball is not centred on the UAV.
pub fn run_conditional_monte_carlo(
    config: &ScenarioConfig,
    schemes: &[SchemeId],
    trials: u64,
    seed: u64,
) -> Result<Vec<ZsrpEstimate>> {
    let estimator = match config.geometry.eve_center {
        EveCenter::Bs => Estimator::Conditional,
        EveCenter::Fixed(_) => Estimator::Indicator,
    };
    run_blocks(config, schemes, trials, seed, estimator)
}

/// How often each user is served by `scheme` over `trials` draws. Round
/// robin serves slot `t` to user `t mod N`.
pub fn selection_counts(
    config: &ScenarioConfig,
    scheme: SchemeId,
    trials: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    check_trials(trials)?;
    let prep = Prepared::new(config)?;
    let blocks = trials.div_ceil(BLOCK);
    let partials: Vec<Result<Vec<u64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut counts = vec![0u64; prep.users];
            let mut draw = prep.empty_draw();
            let mut scratch = Vec::with_capacity(prep.users);
            for trial in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                prep.draw(&mut trial_rng(seed, trial), &mut draw)?;
                let n = match prep.selected(scheme, &draw, &mut scratch)? {
                    Some(n) => n,
                    None => (trial % prep.users as u64) as usize,
                };
                counts[n] += 1;
            }
            Ok(counts)
        })
        .collect();
    let mut totals = vec![0u64; prep.users];
    for block in partials {
        for (t, c) in totals.iter_mut().zip(block?) {
            *t += c;
        }
    }
    Ok(totals)
}

/// The draw a given trial sees, for inspection and tests.
pub fn sample_channel_draw(config: &ScenarioConfig, seed: u64, trial: u64) -> Result<ChannelDraw> {
    let prep = Prepared::new(config)?;
    let mut draw = prep.empty_draw();
    prep.draw(&mut trial_rng(seed, trial), &mut draw)?;
    Ok(draw)
}
