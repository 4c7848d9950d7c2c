//! Hovering-altitude search.
//!
//! The objective is evaluated analytically (fully-connected schemes) or by
//! seeded Monte-Carlo with the eavesdropper radius integrated per draw, so a
//! fixed seed gives a deterministic, piecewise-smooth function of altitude.
//! A coarse scan picks the best neighbourhood and golden-section search
//! refines inside it.

use crate::analytic::zsrp_for_scheme;
use crate::error::{domain, Result};
use crate::scheduling::SchemeId;
use crate::secrecy::{run_conditional_monte_carlo, ScenarioConfig};

/// `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;
const PRESCAN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub argmin: f64,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Current bracket `[a, b]` with its two interior probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub a: f64,
    pub b: f64,
    pub x1: f64,
    pub f1: f64,
    pub x2: f64,
    pub f2: f64,
}

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]` down to a
/// bracket no wider than `tol`; returns the bracket midpoint.
pub fn golden_section_min<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<GoldenResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    golden_section_observed(f, lo, hi, tol, |_| {})
}

/// [`golden_section_min`] calling `observe` with every bracket.
pub fn golden_section_observed<F, O>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    mut observe: O,
) -> Result<GoldenResult>
where
    F: FnMut(f64) -> Result<f64>,
    O: FnMut(&Bracket),
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return domain(format!("search interval needs lo < hi, got [{lo}, {hi}]"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be > 0, got {tol}"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evaluations = 2;
    let mut iterations = 0;
    while b - a > tol {
        observe(&Bracket { a, b, x1, f1, x2, f2 });
        iterations += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        evaluations += 1;
    }
    let argmin = 0.5 * (a + b);
    let value = f(argmin)?;
    Ok(GoldenResult {
        argmin,
        value,
        iterations,
        evaluations: evaluations + 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluator {
    Analytic,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AltitudeSearchSpec {
    pub h_lo: f64,
    pub h_hi: f64,
    pub tol: f64,
    pub scheme: SchemeId,
    /// Everything except the altitude, which the search overrides.
    pub config: ScenarioConfig,
    pub evaluator: Evaluator,
}

impl AltitudeSearchSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.h_lo > 0.0 && self.h_lo < self.h_hi && self.h_hi.is_finite()) {
            return domain(format!(
                "altitude range needs 0 < h_lo < h_hi, got [{}, {}]",
                self.h_lo, self.h_hi
            ));
        }
        if !(self.tol > 0.0) {
            return domain(format!("altitude tolerance must be > 0, got {}", self.tol));
        }
        if let Evaluator::MonteCarlo { trials: 0, .. } = self.evaluator {
            return domain("trials must be >= 1");
        }
        self.config.validate()
    }

    /// ZSRP with the UAV at altitude `h`.
    pub fn objective(&self, h: f64) -> Result<f64> {
        let mut config = self.config.clone();
        config.geometry.h_br = h;
        config.scheme = self.scheme;
        match self.evaluator {
            Evaluator::Analytic => zsrp_for_scheme(self.scheme, &config),
            Evaluator::MonteCarlo { trials, seed } => {
                Ok(run_conditional_monte_carlo(&config, &[self.scheme], trials, seed)?[0].p_hat)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltitudeResult {
    pub altitude: f64,
    pub zsrp: f64,
    pub evaluations: usize,
}

/// Altitude minimising the ZSRP of `spec.scheme`.
pub fn optimal_altitude(spec: &AltitudeSearchSpec) -> Result<AltitudeResult> {
    spec.validate()?;
    let step = (spec.h_hi - spec.h_lo) / (PRESCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..PRESCAN_POINTS).map(|i| spec.h_lo + step * i as f64).collect();
    let mut values = Vec::with_capacity(PRESCAN_POINTS);
    for &h in &grid {
        values.push(spec.objective(h)?);
    }
    let best = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(PRESCAN_POINTS - 1)];
    let refined = golden_section_min(|h| spec.objective(h), lo, hi, spec.tol)?;
    let evaluations = PRESCAN_POINTS + refined.evaluations;
    log::info!(
        "optimal altitude for {}: {:.3} m (ZSRP {:.6e}, {} evaluations)",
        spec.scheme,
        refined.argmin,
        refined.value,
        evaluations
    );
    Ok(AltitudeResult {
        altitude: refined.argmin,
        zsrp: refined.value,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let r = golden_section_min(|x| Ok((x - 2.0) * (x - 2.0)), 0.0, 5.0, 1e-6).unwrap();
        assert!((r.argmin - 2.0).abs() < 1e-6);
        let bound = ((5.0f64 / 1e-6).ln() / (1.0 / INV_PHI).ln()).ceil() as usize + 2;
        assert!(r.iterations <= bound);
    }

    #[test]
    fn monotone_goes_to_endpoint() {
        let r = golden_section_min(Ok, 1.0, 3.0, 1e-4).unwrap();
        assert!((r.argmin - 1.0).abs() <= 1e-4);
        let r = golden_section_min(|x| Ok(-x), 1.0, 3.0, 1e-4).unwrap();
        assert!((r.argmin - 3.0).abs() <= 1e-4);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(golden_section_min(Ok, 2.0, 2.0, 1e-3).is_err());
        assert!(golden_section_min(Ok, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn bracket_invariant() {
        let f = |x: f64| (x - 0.7).abs().powf(1.5);
        golden_section_observed(
            |x| Ok(f(x)),
            -3.0,
            4.0,
            1e-6,
            |br| assert!(br.f1.min(br.f2) <= f(br.a).min(f(br.b))),
        )
        .unwrap();
    }
}
