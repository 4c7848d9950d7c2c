//! Zero-secrecy-rate probability (ZSRP) of multiuser downlinks relayed by a
//! fully-connected reconfigurable intelligent surface (FC-RIS) from a hovering
//! UAV base station, with an eavesdropper placed uniformly in a ball around
//! the UAV.
//!
//! The crate is organised bottom-up:
//!
//! - [`propagation`]: geometry, air-to-ground path-loss exponent, eavesdropper
//!   distance law.
//! - [`fading`]: Nakagami-m channel vectors and the gamma-family laws of the
//!   aggregated gains.
//! - [`bdris`]: symmetric unitary scattering matrices and cascaded gains for
//!   fully-connected and single-connected surfaces.
//! - [`scheduling`]: round-robin and proportional-fair user selection.
//! - [`secrecy`]: capacities, the zero-secrecy-rate event and the parallel
//!   Monte-Carlo estimator.
//! - [`specfun`]: log-gamma, incomplete gamma, Bessel K and a Mellin-Barnes
//!   Meijer-G engine.
//! - [`quadrature`]: adaptive Gauss-Legendre integration.
//! - [`analytic`]: closed-form and quadrature ZSRP for the FC-RIS schemes.
//! - [`optimize`]: golden-section search over the hovering altitude.

pub mod analytic;
pub mod bdris;
pub mod error;
pub mod fading;
pub mod optimize;
pub mod propagation;
pub mod quadrature;
pub mod scheduling;
pub mod secrecy;
pub mod specfun;

pub use error::{Error, Result};
