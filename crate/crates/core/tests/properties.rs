use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use zsrp_core::bdris::{fc_cascaded_gain, optimal_theta, sc_cascaded_gain};
use zsrp_core::fading::{cdf_s, ChannelVector};
use zsrp_core::propagation::{elevation_angle, los_probability, AirGroundParams};
use zsrp_core::scheduling::{select_fcsi_pfs, select_gcsi_pfs, select_round_robin};
use zsrp_core::specfun::{bessel_k_scaled, ln_bessel_k_seq, regularized_upper_gamma};

fn channel(l: usize) -> impl Strategy<Value = ChannelVector> {
    prop::collection::vec((0.05f64..3.0, -std::f64::consts::PI..std::f64::consts::PI), l)
        .prop_map(|v| {
            ChannelVector(DVector::from_iterator(
                v.len(),
                v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)),
            ))
        })
}

fn channel_pair() -> impl Strategy<Value = (ChannelVector, ChannelVector)> {
    (1usize..=16).prop_flat_map(|l| (channel(l), channel(l)))
}

proptest! {
    #[test]
    fn theta_is_unitary_symmetric_and_optimal((h_br, h_rn) in channel_pair()) {
        let theta = optimal_theta(&h_br, &h_rn).unwrap();
        prop_assert!(theta.unitarity_defect() < 1e-10);
        prop_assert!(theta.symmetry_defect() < 1e-10);
        let fc = fc_cascaded_gain(&h_br, &h_rn).unwrap();
        let got = theta.response(&h_br, &h_rn).norm_sqr();
        prop_assert!(((got - fc) / fc).abs() < 1e-9);
        prop_assert!(sc_cascaded_gain(&h_br, &h_rn).unwrap() <= fc * (1.0 + 1e-12));
    }

    #[test]
    fn gains_ignore_a_common_phase((h_br, h_rn) in channel_pair(), t in -3.0f64..3.0) {
        let rot = Complex64::from_polar(1.0, t);
        let turned = ChannelVector(h_br.0.map(|z| z * rot));
        let a = fc_cascaded_gain(&h_br, &h_rn).unwrap();
        let b = optimal_theta(&turned, &h_rn).unwrap().response(&turned, &h_rn).norm_sqr();
        prop_assert!(((a - b) / a).abs() < 1e-9);
    }

    #[test]
    fn selection_is_scale_invariant(v in prop::collection::vec(0.0f64..10.0, 1..12), c in 1e-3f64..1e3) {
        let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
        let i = select_gcsi_pfs(&v).unwrap();
        prop_assert_eq!(i, select_fcsi_pfs(&v).unwrap());
        prop_assert!(v.iter().all(|&x| x <= v[i]));
        prop_assert!(v[..i].iter().all(|&x| x < v[i]));
        if v.iter().filter(|&&x| x == v[i]).count() == 1 && scaled.iter().filter(|&&x| x == scaled[i]).count() == 1 {
            prop_assert_eq!(select_gcsi_pfs(&scaled).unwrap(), i);
        }
    }

    #[test]
    fn round_robin_cycles(slot in 0u64..1_000_000, n in 1usize..64) {
        let i = select_round_robin(slot, n).unwrap();
        prop_assert!(i < n);
        prop_assert_eq!(select_round_robin(slot + n as u64, n).unwrap(), i);
    }

    #[test]
    fn cdf_s_is_monotone(a in 0.0f64..50.0, d in 0.0f64..10.0, m in 1u32..4, l in 1usize..32) {
        let lo = cdf_s(a, m, l).unwrap();
        let hi = cdf_s(a + d, m, l).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= hi + 1e-15);
    }

    #[test]
    fn upper_gamma_is_monotone(a in 1u32..60, x in 0.0f64..100.0, dx in 0.0f64..5.0) {
        let q = regularized_upper_gamma(a, x).unwrap();
        prop_assert!(regularized_upper_gamma(a, x + dx).unwrap() <= q + 1e-15);
        prop_assert!(regularized_upper_gamma(a + 1, x).unwrap() >= q - 1e-15);
    }

    #[test]
    fn bessel_k_sequence_obeys_recurrence(x in 0.05f64..60.0) {
        let ln_k = ln_bessel_k_seq(40, x).unwrap();
        for nu in 1..40 {
            // K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu, checked in ratio form.
            let lhs = (ln_k[nu + 1] - ln_k[nu]).exp();
            let rhs = (ln_k[nu - 1] - ln_k[nu]).exp() + 2.0 * nu as f64 / x;
            prop_assert!(((lhs - rhs) / rhs).abs() < 1e-10);
            prop_assert!(ln_k[nu + 1] > ln_k[nu]);
        }
    }

    #[test]
    fn bessel_k_decreases_in_x(nu in 0u32..40, x in 0.05f64..50.0, dx in 0.01f64..5.0) {
        let a = bessel_k_scaled(nu, x).unwrap() * (-x).exp();
        let b = bessel_k_scaled(nu, x + dx).unwrap() * (-(x + dx)).exp();
        prop_assert!(a > 0.0 && b >= 0.0);
        prop_assert!(b <= a);
    }

    #[test]
    fn los_probability_grows_with_elevation(h in 1.0f64..2000.0, dh in 0.0f64..500.0, r in 1.0f64..2000.0) {
        let air = AirGroundParams::default();
        let lo = los_probability(elevation_angle(h, r).unwrap(), &air);
        let hi = los_probability(elevation_angle(h + dh, r).unwrap(), &air);
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo - 1e-15);
    }
}
