use rayon::ThreadPoolBuilder;
use zsrp_core::propagation::EveCenter;
use zsrp_core::scheduling::SchemeId;
use zsrp_core::secrecy::{
    run_conditional_monte_carlo, run_monte_carlo, run_monte_carlo_schemes, selection_counts,
    ScenarioConfig,
};

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let config = ScenarioConfig::default();
    let run = |threads| {
        ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_monte_carlo_schemes(&config, &SchemeId::ALL, 20_000, 9).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(2));
    assert_eq!(one, run(5));
}

#[test]
fn transmit_power_cancels() {
    let mut config = ScenarioConfig::default();
    config.geometry.eve_center = EveCenter::Fixed(config.geometry.bs_position());
    let mut out = Vec::new();
    for db in [-10.0, 0.0, 35.0] {
        config.gamma_b_db = db;
        out.push(run_monte_carlo_schemes(&config, &SchemeId::ALL, 10_000, 4).unwrap());
    }
    assert_eq!(out[0], out[1]);
    assert_eq!(out[1], out[2]);
}

#[test]
fn fully_connected_never_loses_on_shared_draws() {
    for l in [2, 8, 32] {
        let mut config = ScenarioConfig::default();
        config.fading.l = l;
        let est = run_monte_carlo_schemes(&config, &SchemeId::ALL, 20_000, 2).unwrap();
        assert!(est[0].p_hat <= est[2].p_hat, "rs at L = {l}");
        assert!(est[1].p_hat <= est[3].p_hat, "pfs at L = {l}");
        assert!(est[1].p_hat <= est[0].p_hat, "pfs vs rs at L = {l}");
    }
}

#[test]
fn seed_changes_the_estimate() {
    let config = ScenarioConfig::default();
    let a = run_monte_carlo(&config, 20_000, 1).unwrap();
    let b = run_monte_carlo(&config, 20_000, 2).unwrap();
    assert_ne!(a.p_hat, b.p_hat);
    assert_eq!(a, run_monte_carlo(&config, 20_000, 1).unwrap());
}

#[test]
fn conditional_estimator_is_smooth_in_radius() {
    let mut config = ScenarioConfig::default();
    let mut last = 1.0;
    for r in [150.0, 200.0, 300.0, 450.0, 600.0] {
        config.geometry.r_max = r;
        let p = run_conditional_monte_carlo(&config, &[SchemeId::FcrRs], 5_000, 8).unwrap()[0].p_hat;
        assert!(p < last, "R = {r}");
        last = p;
    }
}

#[test]
fn selection_counts_cover_every_trial() {
    let config = ScenarioConfig::default();
    let rr = selection_counts(&config, SchemeId::FcrRs, 10_002, 1).unwrap();
    assert_eq!(rr, vec![2501, 2501, 2500, 2500]);
    let pfs = selection_counts(&config, SchemeId::ScrFcsiPfs, 10_000, 1).unwrap();
    assert_eq!(pfs.iter().sum::<u64>(), 10_000);
    assert!(pfs.iter().all(|&c| c > 2000));
}
