//! Nakagami-m channel vectors and the gamma laws of the aggregated gains.
//!
//! Per-element power gains are `Gamma(m, 1/m)` (unit mean) scaled by the
//! large-scale gain, phases are uniform and independent. Summed over `L`
//! elements this gives `S ~ Gamma(m1 L, 1/m1)` on the RIS-user hop and
//! `W ~ Gamma(m2 L, 1/m2)` on the BS-RIS hop.

use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{domain, Result};
use crate::specfun::{lgamma, lower_gamma_p};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FadingParams {
    /// Nakagami shape of the RIS-user links.
    pub m1: u32,
    /// Nakagami shape of the BS-RIS link.
    pub m2: u32,
    /// Number of RIS elements.
    pub l: usize,
}

impl Default for FadingParams {
    fn default() -> Self {
        Self { m1: 2, m2: 2, l: 16 }
    }
}

impl FadingParams {
    pub fn validate(&self) -> Result<()> {
        if self.m1 == 0 || self.m2 == 0 {
            return domain(format!(
                "fading shapes must be integers >= 1 (m1 = {}, m2 = {})",
                self.m1, self.m2
            ));
        }
        if self.l == 0 {
            return domain("RIS element count must be >= 1");
        }
        if self.l > u32::MAX as usize / self.m1.max(self.m2) as usize {
            return domain(format!("element count {} too large", self.l));
        }
        Ok(())
    }

    /// `m1 L`, the shape of `S`.
    pub fn shape_s(&self) -> u32 {
        self.m1 * self.l as u32
    }

    /// `m2 L`, the shape of `W`.
    pub fn shape_w(&self) -> u32 {
        self.m2 * self.l as u32
    }
}

/// One channel realisation over the `L` RIS elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(pub DVector<Complex64>);

impl ChannelVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }
}

/// Nakagami power sampler for one link: `sigma2 * Gamma(m, 1/m)` per element.
#[derive(Debug, Clone, Copy)]
pub struct NakagamiPower {
    gamma: Gamma<f64>,
    sigma2: f64,
}

impl NakagamiPower {
    pub fn new(m: u32, sigma2: f64) -> Result<Self> {
        if m == 0 {
            return domain("Nakagami shape must be >= 1");
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return domain(format!("link gain must be finite and > 0, got {sigma2}"));
        }
        Ok(Self {
            gamma: gamma_dist(m as f64, 1.0 / m as f64)?,
            sigma2,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sigma2 * self.gamma.sample(rng)
    }

    /// Fills `out` with independent element powers.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for v in out {
            *v = self.sample(rng);
        }
    }
}

fn gamma_dist(shape: f64, scale: f64) -> Result<Gamma<f64>> {
    if !(shape > 0.0 && scale > 0.0) || !shape.is_finite() || !scale.is_finite() {
        return domain(format!(
            "gamma parameters must be finite and > 0 (shape = {shape}, scale = {scale})"
        ));
    }
    Gamma::new(shape, scale).map_err(|e| crate::Error::Domain(e.to_string()))
}

/// One `Gamma(shape, scale)` draw.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> Result<f64> {
    Ok(gamma_dist(shape, scale)?.sample(rng))
}

/// A Nakagami-m vector of length `l` with per-element mean power `sigma2`.
pub fn sample_channel_vector<R: Rng + ?Sized>(
    rng: &mut R,
    m: u32,
    sigma2: f64,
    l: usize,
) -> Result<ChannelVector> {
    let power = NakagamiPower::new(m, sigma2)?;
    let entries = (0..l).map(|_| {
        let amp = power.sample(rng).sqrt();
        let phase = TAU * rng.random::<f64>();
        Complex64::from_polar(amp, phase)
    });
    Ok(ChannelVector(DVector::from_iterator(l, entries)))
}

/// CDF of `S ~ Gamma(m1 L, 1/m1)`.
pub fn cdf_s(s: f64, m1: u32, l: usize) -> Result<f64> {
    if !(s >= 0.0) {
        return domain(format!("cdf_s requires s >= 0, got {s}"));
    }
    let p = FadingParams { m1, m2: 1, l };
    p.validate()?;
    Ok(lower_gamma_p(p.shape_s(), m1 as f64 * s))
}

/// Density of `W ~ Gamma(m2 L, 1/m2)`.
pub fn pdf_w(w: f64, m2: u32, l: usize) -> Result<f64> {
    if !(w >= 0.0) {
        return domain(format!("pdf_w requires w >= 0, got {w}"));
    }
    let p = FadingParams { m1: 1, m2, l };
    p.validate()?;
    Ok(gamma_pdf(w, p.shape_w() as f64, m2 as f64))
}

/// Density of `Gamma(shape, 1/rate)`.
pub(crate) fn gamma_pdf(w: f64, shape: f64, rate: f64) -> f64 {
    if w == 0.0 {
        return if shape == 1.0 {
            rate
        } else if shape < 1.0 {
            f64::INFINITY
        } else {
            0.0
        };
    }
    ((shape - 1.0) * w.ln() + shape * rate.ln() - rate * w - lgamma(shape)).exp()
}

pub fn sample_s<R: Rng + ?Sized>(rng: &mut R, m1: u32, l: usize) -> Result<f64> {
    sample_gamma(rng, (m1 as usize * l) as f64, 1.0 / m1 as f64)
}

pub fn sample_w<R: Rng + ?Sized>(rng: &mut R, m2: u32, l: usize) -> Result<f64> {
    sample_gamma(rng, (m2 as usize * l) as f64, 1.0 / m2 as f64)
}
