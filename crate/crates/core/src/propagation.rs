//! Geometry, the air-to-ground path-loss model and the eavesdropper location law.
//!
//! The RIS sits at the origin. The UAV base station hovers at horizontal
//! distance `r_br` from it and altitude `h_br`; users lie on the ground at
//! distance `d_rn` from the RIS. Elevation angles are carried in radians and
//! converted to degrees only inside [`los_probability`], because the published
//! environment constants `(a2, b2)` of the logistic LoS model assume degrees.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{domain, Result};

/// A point in the RIS-centred Cartesian frame, in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl NodePosition {
    pub const ORIGIN: NodePosition = NodePosition {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &NodePosition) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Where the eavesdropper ball is centred.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EveCenter {
    /// Centred on the UAV wherever it hovers.
    #[default]
    Bs,
    /// Centred on a fixed point, typically the UAV's nominal position.
    Fixed(NodePosition),
}

/// Distances that define one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGeometry {
    /// Horizontal UAV-RIS distance.
    pub r_br: f64,
    /// UAV altitude.
    pub h_br: f64,
    /// RIS-user distance, one entry per user.
    pub d_rn: Vec<f64>,
    /// Radius of the eavesdropper ball.
    pub r_max: f64,
    pub eve_center: EveCenter,
}

impl Default for ScenarioGeometry {
    fn default() -> Self {
        Self {
            r_br: 300.0,
            h_br: 300.0,
            d_rn: vec![50.0; 4],
            r_max: 500.0,
            eve_center: EveCenter::Bs,
        }
    }
}

impl ScenarioGeometry {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                domain(format!("{name} must be finite and > 0, got {v}"))
            }
        };
        positive("r_br", self.r_br)?;
        positive("h_br", self.h_br)?;
        positive("r_max", self.r_max)?;
        if self.d_rn.is_empty() {
            return domain("at least one user distance is required");
        }
        for (n, &d) in self.d_rn.iter().enumerate() {
            positive(&format!("d_rn[{n}]"), d)?;
        }
        Ok(())
    }

    pub fn users(&self) -> usize {
        self.d_rn.len()
    }

    /// UAV position; the UAV is placed on the positive x axis.
    pub fn bs_position(&self) -> NodePosition {
        NodePosition::new(self.r_br, 0.0, self.h_br)
    }

    /// Three-dimensional UAV-RIS distance used in the large-scale gain.
    pub fn d_br(&self) -> f64 {
        self.r_br.hypot(self.h_br)
    }

    pub fn elevation(&self) -> Result<f64> {
        elevation_angle(self.h_br, self.r_br)
    }

    /// Per-element BS-RIS large-scale gain at the configured altitude.
    pub fn bs_ris_gain(&self, air: &AirGroundParams) -> Result<f64> {
        let theta = self.elevation()?;
        let alpha = pathloss_exponent_air(theta.to_degrees(), air);
        large_scale_gain(air.g0, self.d_br(), alpha)
    }

    /// Per-element RIS-user large-scale gain of user `n`.
    pub fn ris_user_gain(&self, air: &AirGroundParams, n: usize) -> Result<f64> {
        large_scale_gain(air.g0, self.d_rn[n], air.alpha_rn)
    }

    /// The common RIS-user distance, if every user sits at the same range.
    pub fn common_user_distance(&self) -> Option<f64> {
        let first = *self.d_rn.first()?;
        self.d_rn.iter().all(|&d| d == first).then_some(first)
    }
}

/// Environment constants of the air-to-ground model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirGroundParams {
    pub a2: f64,
    pub b2: f64,
    /// Path-loss exponent at 90 degrees elevation.
    pub alpha_zenith: f64,
    /// Path-loss exponent at 0 degrees elevation.
    pub alpha_ground: f64,
    /// Linear reference gain at 1 m.
    pub g0: f64,
    /// Exponent of the RIS-user ground links.
    pub alpha_rn: f64,
}

impl Default for AirGroundParams {
    fn default() -> Self {
        Self {
            a2: 9.61,
            b2: 0.16,
            alpha_zenith: 2.0,
            alpha_ground: 3.5,
            g0: 3.0e4,
            alpha_rn: 3.5,
        }
    }
}

impl AirGroundParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a2 > 0.0 && self.b2 > 0.0) {
            return domain(format!(
                "a2 and b2 must be > 0, got a2={}, b2={}",
                self.a2, self.b2
            ));
        }
        if !(self.alpha_zenith <= self.alpha_ground) {
            return domain(format!(
                "alpha_zenith ({}) must not exceed alpha_ground ({})",
                self.alpha_zenith, self.alpha_ground
            ));
        }
        if !(self.g0 > 0.0 && self.g0.is_finite()) {
            return domain(format!("g0 must be finite and > 0, got {}", self.g0));
        }
        if !self.alpha_rn.is_finite() || !self.alpha_zenith.is_finite() {
            return domain("path-loss exponents must be finite");
        }
        Ok(())
    }
}

/// Coefficients of the affine map from LoS probability to path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub a1: f64,
    pub b1: f64,
}

impl ExponentFit {
    pub fn exponent(&self, p_los: f64) -> f64 {
        self.a1 * p_los + self.b1
    }
}

/// Elevation angle in radians of a node at height `h` seen from horizontal
/// distance `r`.
pub fn elevation_angle(h: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("horizontal distance must be > 0, got {r}"));
    }
    if !(h >= 0.0) {
        return domain(format!("height must be >= 0, got {h}"));
    }
    Ok((h / r).atan())
}

/// Logistic LoS probability; `theta_deg` is in degrees.
pub fn los_probability(theta_deg: f64, params: &AirGroundParams) -> f64 {
    debug_assert!((0.0..=90.0).contains(&theta_deg));
    1.0 / (1.0 + params.a2 * (-params.b2 * (theta_deg - params.a2)).exp())
}

/// Fit `(a1, b1)` so the exponent equals `alpha_ground` at the grazing LoS
/// probability `1 / (1 + a2 exp(a2 b2))` and `alpha_zenith` at LoS probability 1.
pub fn fit_exponent_coefficients(params: &AirGroundParams) -> ExponentFit {
    let c = params.a2 * (params.a2 * params.b2).exp();
    let a1 = (params.alpha_zenith - params.alpha_ground) * (1.0 + c) / c;
    let b1 = params.alpha_ground - a1 / (1.0 + c);
    ExponentFit { a1, b1 }
}

/// Altitude-dependent exponent of the UAV-RIS link; `theta_deg` in degrees.
pub fn pathloss_exponent_air(theta_deg: f64, params: &AirGroundParams) -> f64 {
    fit_exponent_coefficients(params).exponent(los_probability(theta_deg, params))
}

/// `g0 * d^-alpha`.
pub fn large_scale_gain(g0: f64, d: f64, alpha: f64) -> Result<f64> {
    if !(d > 0.0) {
        return domain(format!("distance must be > 0, got {d}"));
    }
    if !(g0 > 0.0) {
        return domain(format!("reference gain must be > 0, got {g0}"));
    }
    Ok(g0 * d.powf(-alpha))
}

/// Distance of a point uniform in a ball of radius `r_max`, density
/// `3 psi^2 / r_max^3`, drawn by inverting the CDF `(psi / r_max)^3`.
pub fn sample_eve_distance<R: Rng + ?Sized>(rng: &mut R, r_max: f64) -> Result<f64> {
    if !(r_max >= 0.0) {
        return domain(format!("eavesdropper radius must be >= 0, got {r_max}"));
    }
    let u: f64 = rng.random();
    Ok(r_max * u.cbrt())
}

/// Polar offset of the eavesdropper from the centre of its ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvePlacement {
    pub d_be: f64,
    /// Azimuth in `[0, 2 pi)`.
    pub lambda_e: f64,
    /// Polar angle in `[0, pi)`.
    pub beta_e: f64,
}

impl EvePlacement {
    pub fn position(&self, center: &NodePosition) -> NodePosition {
        let (sb, cb) = self.beta_e.sin_cos();
        let (sl, cl) = self.lambda_e.sin_cos();
        NodePosition::new(
            center.x + self.d_be * cl * sb,
            center.y + self.d_be * sl * sb,
            center.z + self.d_be * cb,
        )
    }
}

/// Uniform point in the ball: radius by [`sample_eve_distance`], direction
/// uniform on the sphere.
pub fn sample_eve_placement<R: Rng + ?Sized>(rng: &mut R, r_max: f64) -> Result<EvePlacement> {
    let d_be = sample_eve_distance(rng, r_max)?;
    let lambda_e = rng.random::<f64>() * TAU;
    let cos_beta = 1.0 - 2.0 * rng.random::<f64>();
    let beta_e = cos_beta.clamp(-1.0, 1.0).acos().min(PI.next_down());
    Ok(EvePlacement {
        d_be,
        lambda_e,
        beta_e,
    })
}

/// Deterministic LoS wiretap gain `g0 / d_be^2`.
pub fn eve_wiretap_gain(g0: f64, d_be: f64) -> Result<f64> {
    eve_wiretap_gain_with_exponent(g0, d_be, 2.0)
}

pub fn eve_wiretap_gain_with_exponent(g0: f64, d_be: f64, alpha_be: f64) -> Result<f64> {
    if !(d_be > 0.0) {
        return domain(format!("eavesdropper distance must be > 0, got {d_be}"));
    }
    large_scale_gain(g0, d_be, alpha_be)
}
