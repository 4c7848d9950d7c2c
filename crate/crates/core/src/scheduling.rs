//! User selection: round-robin and the two proportional-fair variants.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::specfun::lgamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    FcrRs,
    FcrGcsiPfs,
    ScrRs,
    ScrGcsiPfs,
    ScrFcsiPfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Fully,
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    RoundRobin,
    /// Argmax of the normalised RIS-user gain (no BS-RIS knowledge needed).
    GcsiPfs,
    /// Argmax of the normalised cascaded gain.
    FcsiPfs,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::FcrRs,
        SchemeId::FcrGcsiPfs,
        SchemeId::ScrRs,
        SchemeId::ScrGcsiPfs,
        SchemeId::ScrFcsiPfs,
    ];

    pub fn connectivity(self) -> Connectivity {
        match self {
            SchemeId::FcrRs | SchemeId::FcrGcsiPfs => Connectivity::Fully,
            _ => Connectivity::Single,
        }
    }

    pub fn selection(self) -> Selection {
        match self {
            SchemeId::FcrRs | SchemeId::ScrRs => Selection::RoundRobin,
            SchemeId::FcrGcsiPfs | SchemeId::ScrGcsiPfs => Selection::GcsiPfs,
            SchemeId::ScrFcsiPfs => Selection::FcsiPfs,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::FcrRs => "fcr-rs",
            SchemeId::FcrGcsiPfs => "fcr-gcsi-pfs",
            SchemeId::ScrRs => "scr-rs",
            SchemeId::ScrGcsiPfs => "scr-gcsi-pfs",
            SchemeId::ScrFcsiPfs => "scr-fcsi-pfs",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown scheme '{s}' (expected one of fcr-rs, fcr-gcsi-pfs, scr-rs, scr-gcsi-pfs, scr-fcsi-pfs)"
                ))
            })
    }
}

pub fn select_round_robin(slot: u64, n: usize) -> Result<usize> {
    if n == 0 {
        return domain("round-robin needs at least one user");
    }
    Ok((slot % n as u64) as usize)
}

fn argmax(values: &[f64]) -> Result<usize> {
    if values.is_empty() {
        return domain("selection over an empty user set");
    }
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if !(v >= 0.0) {
            return domain(format!("selection metric must be >= 0, got {v} for user {i}"));
        }
        if v > values[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Index of the largest normalised RIS-user gain; ties go to the lowest index.
pub fn select_gcsi_pfs(s_values: &[f64]) -> Result<usize> {
    argmax(s_values)
}

/// Index of the largest normalised cascaded gain; ties go to the lowest index.
pub fn select_fcsi_pfs(normalized_cascaded_gains: &[f64]) -> Result<usize> {
    argmax(normalized_cascaded_gains)
}

/// `E|h|` for a unit-power Nakagami-m amplitude.
pub fn nakagami_mean_amplitude(m: u32) -> f64 {
    let m = m as f64;
    (lgamma(m + 0.5) - lgamma(m)).exp() / m.sqrt()
}

/// Ergodic single-connected cascaded gain per unit large-scale gain:
/// `E[(sum_l |h_br,l| |h_rn,l|)^2] = L + L (L - 1) mu1^2 mu2^2`.
pub fn sc_ergodic_gain(m1: u32, m2: u32, l: usize) -> f64 {
    let mu1 = nakagami_mean_amplitude(m1);
    let mu2 = nakagami_mean_amplitude(m2);
    let lf = l as f64;
    lf + lf * (lf - 1.0) * (mu1 * mu2).powi(2)
}

/// Ergodic fully-connected cascaded gain per unit large-scale gain:
/// `E[||h_br||^2 ||h_rn||^2] = L^2`.
pub fn fc_ergodic_gain(l: usize) -> f64 {
    (l * l) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_robin() {
        assert_eq!(select_round_robin(5, 3).unwrap(), 2);
        assert_eq!(select_round_robin(0, 7).unwrap(), 0);
        let mut counts = [0; 4];
        for slot in 0..12 {
            counts[select_round_robin(slot, 4).unwrap()] += 1;
        }
        assert_eq!(counts, [3; 4]);
        assert!(select_round_robin(1, 0).is_err());
    }

    #[test]
    fn pfs_argmax() {
        assert_eq!(select_gcsi_pfs(&[0.2, 0.9, 0.5]).unwrap(), 1);
        assert_eq!(select_gcsi_pfs(&[0.4, 0.4]).unwrap(), 0);
        assert_eq!(select_fcsi_pfs(&[1.1, 0.3]).unwrap(), 0);
        assert_eq!(select_fcsi_pfs(&[0.7]).unwrap(), 0);
        assert!(select_gcsi_pfs(&[]).is_err());
        assert!(select_fcsi_pfs(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn scheme_strings_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.as_str().parse::<SchemeId>().unwrap(), id);
        }
        assert!("fcr-fcsi-pfs".parse::<SchemeId>().is_err());
    }

    #[test]
    fn mean_amplitude() {
        // Rayleigh: E|h| = sqrt(pi) / 2
        assert!((nakagami_mean_amplitude(1) - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        assert!(nakagami_mean_amplitude(64) < 1.0 && nakagami_mean_amplitude(64) > 0.99);
        assert_eq!(sc_ergodic_gain(2, 2, 1), 1.0);
        assert!(sc_ergodic_gain(2, 2, 16) < fc_ergodic_gain(16));
    }
}
