//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! and the process fails if any criterion does.

use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;
use zsrp_core::analytic::{
    cdf_s_max_series, cdf_z_quadrature, cdf_z_single, enumerate_subset_terms, zsrp_for_scheme,
    zsrp_pfs, zsrp_rs, ClosedFormParams,
};
use zsrp_core::bdris::{fc_cascaded_gain, optimal_theta, sc_cascaded_gain};
use zsrp_core::fading::{cdf_s, sample_channel_vector, ChannelVector};
use zsrp_core::optimize::{optimal_altitude, AltitudeSearchSpec, Evaluator};
use zsrp_core::scheduling::{fc_ergodic_gain, select_fcsi_pfs, select_gcsi_pfs, SchemeId};
use zsrp_core::secrecy::{
    run_monte_carlo_schemes, sample_channel_draw, selection_counts, trial_rng, ScenarioConfig,
    ZsrpEstimate,
};
use zsrp_core::specfun::{bessel_k, meijer_g_m0};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const TREND_TRIALS: u64 = 100_000;
const PAIRS: [(SchemeId, SchemeId); 2] = [
    (SchemeId::FcrRs, SchemeId::ScrRs),
    (SchemeId::FcrGcsiPfs, SchemeId::ScrGcsiPfs),
];

fn verdict(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// How far `hi` sits above `lo`, in units of their combined standard error.
fn separation(hi: &ZsrpEstimate, lo: &ZsrpEstimate) -> f64 {
    (hi.p_hat - lo.p_hat) / (hi.std_err.powi(2) + lo.std_err.powi(2)).sqrt()
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn amplitudes(powers: &[f64]) -> ChannelVector {
    ChannelVector(DVector::from_iterator(
        powers.len(),
        powers.iter().map(|p| Complex64::new(p.sqrt(), 0.0)),
    ))
}

fn scheme_index(s: SchemeId) -> usize {
    SchemeId::ALL.iter().position(|&x| x == s).unwrap()
}

fn sweep<F: Fn(&mut ScenarioConfig, f64)>(values: &[f64], set: F) -> Result<Vec<Vec<ZsrpEstimate>>, String> {
    values
        .iter()
        .map(|&v| {
            let mut c = ScenarioConfig::default();
            set(&mut c, v);
            run_monte_carlo_schemes(&c, &SchemeId::ALL, TREND_TRIALS, 1).map_err(e)
        })
        .collect()
}

fn mc_vs_quadrature() -> Outcome {
    let config = ScenarioConfig::default();
    let p = ClosedFormParams::from_config(&config).map_err(e)?;
    let exact = [zsrp_rs(&p).map_err(e)?, zsrp_pfs(&p).map_err(e)?];
    let mut parts = Vec::new();
    let mut ok = true;
    for (scheme, exact) in [SchemeId::FcrRs, SchemeId::FcrGcsiPfs].into_iter().zip(exact) {
        let start = Instant::now();
        let est = run_monte_carlo_schemes(&config, &[scheme], 1_000_000, 1).map_err(e)?[0];
        let secs = start.elapsed().as_secs_f64();
        let z = (est.p_hat - exact).abs() / est.std_err;
        ok &= z <= 3.0 && secs < 60.0;
        parts.push(format!("{scheme} {:.6} vs {exact:.6} ({z:.2} se, {secs:.1} s)", est.p_hat));
    }
    verdict(ok, parts.join(", "))
}

fn cdf_series_vs_quadrature() -> Outcome {
    let mut worst: f64 = 0.0;
    for (m1, m2, l) in [(1u32, 1u32, 1usize), (2, 2, 2), (2, 2, 16)] {
        let p = ClosedFormParams {
            sigma1_sq: 1.0,
            sigma2_sq: 1.0,
            m1,
            m2,
            l,
            n: 1,
            g0: 1.0,
            r: 1.0,
        };
        let mean = (l * l) as f64;
        for i in 0..20 {
            let z = mean * 10f64.powf(-4.0 + 5.5 * i as f64 / 19.0);
            let a = cdf_z_single(z, &p).map_err(e)?;
            let b = cdf_z_quadrature(z, &p, false).map_err(e)?;
            worst = worst.max((a - b).abs());
        }
    }
    verdict(worst < 1e-8, format!("max abs gap {worst:.2e} over 60 points"))
}

fn multinomial_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 3, 4] {
        for (m1, l) in [(1u32, 2usize), (2, 1), (1, 4), (2, 2), (4, 1)] {
            let terms = enumerate_subset_terms(n, m1 * l as u32).map_err(e)?;
            for f in [0.25, 0.5, 1.0, 2.0, 4.0] {
                let s = f * l as f64;
                let direct = cdf_s(s, m1, l).map_err(e)?.powi(n as i32);
                let series = cdf_s_max_series(s, m1, &terms);
                worst = worst.max(((series - direct) / direct).abs());
            }
        }
    }
    verdict(worst < 1e-9, format!("max relative gap {worst:.2e}"))
}

fn special_functions() -> Outcome {
    let oracle = |nu: f64, x: f64| {
        simpson(|t| (-x * t.cosh()).exp() * (nu * t).cosh(), 0.0, 12.0, 20_000)
    };
    let mut k_err: f64 = 0.0;
    for nu in [0u32, 1] {
        let k = bessel_k(nu, 1.0).map_err(e)?.value;
        let r = oracle(nu as f64, 1.0);
        k_err = k_err.max(((k - r) / r).abs());
    }
    let mut g_err: f64 = 0.0;
    for nu in [0u32, 1, 3] {
        for z in [0.25f64, 1.0, 4.0] {
            let half = nu as f64 / 2.0;
            let g = meijer_g_m0(&[], &[half, -half], z).map_err(e)?;
            let k = 2.0 * bessel_k(nu, 2.0 * z.sqrt()).map_err(e)?.value;
            g_err = g_err.max(((g - k) / k).abs());
        }
    }
    verdict(
        k_err < 1e-10 && g_err < 1e-6,
        format!("K0/K1 rel {k_err:.2e}, Meijer G vs 2K rel {g_err:.2e}"),
    )
}

fn bdris_contract() -> Outcome {
    let (mut unit, mut sym, mut gain): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut sc_wins = 0;
    for l in [2usize, 4, 8, 16] {
        let mut rng = trial_rng(77, l as u64);
        for _ in 0..1000 {
            let h_br = sample_channel_vector(&mut rng, 2, 1.0, l).map_err(e)?;
            let h_rn = sample_channel_vector(&mut rng, 2, 1.0, l).map_err(e)?;
            let theta = optimal_theta(&h_br, &h_rn).map_err(e)?;
            let fc = fc_cascaded_gain(&h_br, &h_rn).map_err(e)?;
            unit = unit.max(theta.unitarity_defect());
            sym = sym.max(theta.symmetry_defect());
            gain = gain.max(((theta.response(&h_br, &h_rn).norm_sqr() - fc) / fc).abs());
            if sc_cascaded_gain(&h_br, &h_rn).map_err(e)? > fc {
                sc_wins += 1;
            }
        }
    }
    verdict(
        unit < 1e-10 && sym < 1e-10 && gain < 1e-9 && sc_wins == 0,
        format!("unitarity {unit:.1e}, symmetry {sym:.1e}, gain rel {gain:.1e}, sc > fc on {sc_wins} draws"),
    )
}

fn decreasing(label: &str, series: &[Vec<ZsrpEstimate>], failures: &mut Vec<String>) -> f64 {
    let mut min_sep = f64::INFINITY;
    for (k, scheme) in SchemeId::ALL.iter().enumerate() {
        for w in series.windows(2) {
            let sep = separation(&w[0][k], &w[1][k]);
            min_sep = min_sep.min(sep);
            if sep < 3.0 {
                failures.push(format!("{scheme} not decreasing in {label} ({sep:.1} se)"));
            }
        }
    }
    min_sep
}

fn sweep_trends() -> Outcome {
    let mut failures = Vec::new();

    let by_r = sweep(&[100.0, 200.0, 300.0, 400.0, 500.0], |c, r| c.geometry.r_max = r)?;
    let r_sep = decreasing("R", &by_r, &mut failures);

    let ls = [4.0, 8.0, 16.0, 32.0];
    let by_l = sweep(&ls, |c, l| c.fading.l = l as usize)?;
    let l_sep = decreasing("L", &by_l, &mut failures);
    let mut fc_sc_sep = f64::INFINITY;
    for (row, l) in by_l.iter().zip(ls) {
        for (fc, sc) in PAIRS {
            let sep = separation(&row[scheme_index(sc)], &row[scheme_index(fc)]);
            fc_sc_sep = fc_sc_sep.min(sep);
            if sep < 3.0 {
                failures.push(format!("{fc} not below {sc} at L = {l} ({sep:.1} se)"));
            }
        }
    }

    let heights: Vec<f64> = (1..=20).map(|i| 50.0 * i as f64).collect();
    let by_h = sweep(&heights, |c, h| c.geometry.h_br = h)?;
    let last = heights.len() - 1;
    let mut u_sep = f64::INFINITY;
    for (k, scheme) in SchemeId::ALL.iter().enumerate() {
        let best = (0..heights.len())
            .min_by(|&a, &b| by_h[a][k].p_hat.total_cmp(&by_h[b][k].p_hat))
            .unwrap();
        let left = separation(&by_h[0][k], &by_h[best][k]);
        let right = separation(&by_h[last][k], &by_h[best][k]);
        u_sep = u_sep.min(left).min(right);
        if best == 0 || best == last || left < 3.0 || right < 3.0 {
            failures.push(format!("{scheme} has no interior altitude minimum"));
        }
    }

    let tol = 1.0;
    let mut gap: f64 = 0.0;
    let mut optima = Vec::new();
    for (fc, sc) in PAIRS {
        let search = |scheme| {
            optimal_altitude(&AltitudeSearchSpec {
                h_lo: 20.0,
                h_hi: 1200.0,
                tol,
                scheme,
                config: ScenarioConfig::default(),
                evaluator: Evaluator::MonteCarlo {
                    trials: TREND_TRIALS,
                    seed: 1,
                },
            })
            .map(|r| r.altitude)
            .map_err(e)
        };
        let (a, b) = (search(fc)?, search(sc)?);
        gap = gap.max((a - b).abs());
        optima.push(format!("{fc} {a:.1} m, {sc} {b:.1} m"));
        if (a - b).abs() > tol {
            failures.push(format!("{fc} optimum {a:.1} m vs {sc} optimum {b:.1} m"));
        }
    }

    let summary = format!(
        "min separation R {r_sep:.1} se, L {l_sep:.1} se, fc/sc {fc_sc_sep:.1} se, altitude U {u_sep:.1} se; optima {} (gap {gap:.3} m)",
        optima.join(", ")
    );
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn gcsi_matches_fcsi() -> Outcome {
    let config = ScenarioConfig::default();
    let g = &config.geometry;
    let sigma_br = g.bs_ris_gain(&config.air).map_err(e)?;
    let sigma_rn: Vec<f64> = (0..g.users())
        .map(|n| g.ris_user_gain(&config.air, n))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let ergodic = fc_ergodic_gain(config.fading.l);
    let trials = 100_000u64;
    let mut mismatches = 0u64;
    for trial in 0..trials {
        let draw = sample_channel_draw(&config, 2, trial).map_err(e)?;
        let h_br = amplitudes(&draw.br_power);
        let s: Vec<f64> = draw.rn_power.iter().map(|p| p.iter().sum()).collect();
        let normalized = draw
            .rn_power
            .iter()
            .zip(&sigma_rn)
            .map(|(p, sn)| {
                let gain = sigma_br * sn * fc_cascaded_gain(&h_br, &amplitudes(p))?;
                Ok(gain / (sigma_br * sn * ergodic))
            })
            .collect::<Result<Vec<f64>, zsrp_core::Error>>()
            .map_err(e)?;
        if select_gcsi_pfs(&s).map_err(e)? != select_fcsi_pfs(&normalized).map_err(e)? {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("{mismatches} mismatches in {trials} draws"))
}

fn power_invariance() -> Outcome {
    let mut config = ScenarioConfig::default();
    let mut runs = Vec::new();
    for db in [0.0, 20.0, 40.0] {
        config.gamma_b_db = db;
        let mc = run_monte_carlo_schemes(&config, &SchemeId::ALL, TREND_TRIALS, 1).map_err(e)?;
        let mut bits: Vec<u64> = mc
            .iter()
            .flat_map(|x| [x.p_hat.to_bits(), x.std_err.to_bits()])
            .collect();
        for scheme in [SchemeId::FcrRs, SchemeId::FcrGcsiPfs] {
            bits.push(zsrp_for_scheme(scheme, &config).map_err(e)?.to_bits());
        }
        runs.push(bits);
    }
    verdict(
        runs[0] == runs[1] && runs[1] == runs[2],
        "Monte-Carlo and analytic outputs compared bitwise at 0, 20 and 40 dB".into(),
    )
}

fn fairness() -> Outcome {
    let trials = 1_000_000u64;
    let mut worst: f64 = 0.0;
    for n in [2usize, 4, 8] {
        let mut config = ScenarioConfig::default();
        config.geometry.d_rn = vec![50.0; n];
        for scheme in [SchemeId::FcrGcsiPfs, SchemeId::ScrFcsiPfs] {
            let counts = selection_counts(&config, scheme, trials, 1).map_err(e)?;
            let p = 1.0 / n as f64;
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            for c in counts {
                worst = worst.max((c as f64 / trials as f64 - p).abs() / se);
            }
        }
    }
    verdict(worst <= 3.0, format!("largest deviation from 1/N is {worst:.2} se"))
}

fn thread_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let config = dir.path().join("fig3.toml");
    std::fs::write(&config, "[experiment]\nkind = \"fig3\"\ntrials = 20000\nseed = 5\n").map_err(e)?;
    let mut outputs = Vec::new();
    for threads in [1, 4, 8] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_zsrp"))
            .arg("--config")
            .arg(&config)
            .args(["--threads", &threads.to_string(), "--out"])
            .arg(&out)
            .arg("run")
            .status()
            .map_err(e)?;
        if !status.success() {
            return Err(format!("run with {threads} threads exited with {status}"));
        }
        outputs.push(std::fs::read(&out).map_err(e)?);
    }
    verdict(
        outputs[0] == outputs[1] && outputs[1] == outputs[2] && !outputs[0].is_empty(),
        format!("{} CSV bytes identical on 1, 4 and 8 threads", outputs[0].len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("mc-vs-quadrature", mc_vs_quadrature),
        ("cdf-series", cdf_series_vs_quadrature),
        ("multinomial", multinomial_identity),
        ("special-functions", special_functions),
        ("bdris", bdris_contract),
        ("trends", sweep_trends),
        ("gcsi-fcsi-equivalence", gcsi_matches_fcsi),
        ("power-invariance", power_invariance),
        ("fairness", fairness),
        ("thread-determinism", thread_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                println!("FAIL {} {name}: {msg}", i + 1);
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
