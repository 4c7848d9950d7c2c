//! A quick oracle-agreement pass over the numerical building blocks.

use std::io::Write;

use rayon::ThreadPoolBuilder;
use zsrp_core::analytic::{
    cdf_s_max_series, cdf_z_quadrature, cdf_z_single, enumerate_subset_terms, zsrp_rs,
    ClosedFormParams,
};
use zsrp_core::bdris::{fc_cascaded_gain, optimal_theta, sc_cascaded_gain};
use zsrp_core::fading::{cdf_s, sample_channel_vector};
use zsrp_core::scheduling::SchemeId;
use zsrp_core::secrecy::{run_monte_carlo, trial_rng, ScenarioConfig};
use zsrp_core::specfun::{bessel_k, meijer_g_m0};

use crate::CliError;

type Check = (&'static str, fn() -> Result<String, String>);

/// `integral_0^inf exp(-x cosh t) cosh(nu t) dt` by the trapezoid rule.
fn bessel_integral(nu: f64, x: f64) -> f64 {
    let h = 0.01;
    let mut acc = 0.5 * (-x).exp();
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let v = (-x * t.cosh()).exp() * (nu * t).cosh();
        acc += v;
        if v < 1e-300 || v < acc * 1e-18 {
            break;
        }
        k += 1;
    }
    acc * h
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn bessel() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for nu in [0u32, 1] {
        let k = bessel_k(nu, 1.0).map_err(|e| e.to_string())?.value;
        worst = worst.max(rel(k, bessel_integral(nu as f64, 1.0)));
    }
    if worst < 1e-10 {
        Ok(format!("K0(1), K1(1) relative error {worst:.1e}"))
    } else {
        Err(format!("K0(1), K1(1) relative error {worst:.1e}"))
    }
}

fn meijer() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for nu in [0u32, 1, 3] {
        for z in [0.25f64, 1.0, 4.0] {
            let nuf = nu as f64;
            let g = meijer_g_m0(&[], &[nuf / 2.0, -nuf / 2.0], z).map_err(|e| e.to_string())?;
            let k = 2.0 * bessel_k(nu, 2.0 * z.sqrt()).map_err(|e| e.to_string())?.value;
            worst = worst.max(rel(g, k));
        }
    }
    if worst < 1e-6 {
        Ok(format!("G(2,0;0,2) vs 2 K_nu relative error {worst:.1e}"))
    } else {
        Err(format!("G(2,0;0,2) vs 2 K_nu relative error {worst:.1e}"))
    }
}

fn cdf_series() -> Result<String, String> {
    let p = ClosedFormParams {
        sigma1_sq: 1.0,
        sigma2_sq: 1.0,
        m1: 2,
        m2: 2,
        l: 2,
        n: 1,
        g0: 1.0,
        r: 1.0,
    };
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let z = 10f64.powf(-2.0 + 4.0 * i as f64 / 19.0);
        let a = cdf_z_single(z, &p).map_err(|e| e.to_string())?;
        let b = cdf_z_quadrature(z, &p, false).map_err(|e| e.to_string())?;
        worst = worst.max((a - b).abs());
    }
    if worst < 1e-8 {
        Ok(format!("series vs quadrature CDF max abs gap {worst:.1e}"))
    } else {
        Err(format!("series vs quadrature CDF max abs gap {worst:.1e}"))
    }
}

fn multinomial() -> Result<String, String> {
    let terms = enumerate_subset_terms(3, 4).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for s in [1.0, 2.0, 4.0] {
        let direct = cdf_s(s, 2, 2).map_err(|e| e.to_string())?.powi(3);
        worst = worst.max(rel(cdf_s_max_series(s, 2, &terms), direct));
    }
    if worst < 1e-9 {
        Ok(format!("subset series vs F_S^3 relative error {worst:.1e}"))
    } else {
        Err(format!("subset series vs F_S^3 relative error {worst:.1e}"))
    }
}

fn bdris() -> Result<String, String> {
    let mut rng = trial_rng(2024, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let h_br = sample_channel_vector(&mut rng, 2, 1.0, 8).map_err(|e| e.to_string())?;
        let h_rn = sample_channel_vector(&mut rng, 2, 1.0, 8).map_err(|e| e.to_string())?;
        let theta = optimal_theta(&h_br, &h_rn).map_err(|e| e.to_string())?;
        let fc = fc_cascaded_gain(&h_br, &h_rn).map_err(|e| e.to_string())?;
        let sc = sc_cascaded_gain(&h_br, &h_rn).map_err(|e| e.to_string())?;
        worst = worst
            .max(theta.unitarity_defect())
            .max(theta.symmetry_defect())
            .max(rel(theta.response(&h_br, &h_rn).norm_sqr(), fc));
        if sc > fc * (1.0 + 1e-12) {
            return Err("single-connected gain exceeded fully-connected gain".into());
        }
    }
    if worst < 1e-9 {
        Ok(format!("scattering-matrix defects below {worst:.1e}"))
    } else {
        Err(format!("scattering-matrix defect {worst:.1e}"))
    }
}

fn mc_vs_analytic() -> Result<String, String> {
    let config = ScenarioConfig::default();
    let p = ClosedFormParams::from_config(&config).map_err(|e| e.to_string())?;
    let exact = zsrp_rs(&p).map_err(|e| e.to_string())?;
    let est = run_monte_carlo(&config, 200_000, 7).map_err(|e| e.to_string())?;
    let z = (est.p_hat - exact).abs() / est.std_err;
    let msg = format!("fcr-rs analytic {exact:.5} vs mc {:.5} ({z:.2} se)", est.p_hat);
    if z <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn power_invariance() -> Result<String, String> {
    let mut config = ScenarioConfig {
        scheme: SchemeId::ScrGcsiPfs,
        ..ScenarioConfig::default()
    };
    let mut values = Vec::new();
    for db in [0.0, 20.0, 40.0] {
        config.gamma_b_db = db;
        values.push(run_monte_carlo(&config, 20_000, 5).map_err(|e| e.to_string())?);
    }
    if values.windows(2).all(|w| w[0] == w[1]) {
        Ok("identical estimates at 0, 20 and 40 dB".into())
    } else {
        Err("estimates changed with transmit power".into())
    }
}

fn thread_determinism() -> Result<String, String> {
    let config = ScenarioConfig::default();
    let mut values = Vec::new();
    for threads in [1, 3] {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        values.push(
            pool.install(|| run_monte_carlo(&config, 30_000, 11))
                .map_err(|e| e.to_string())?,
        );
    }
    if values[0] == values[1] {
        Ok("identical estimates on 1 and 3 threads".into())
    } else {
        Err("estimate depends on the thread count".into())
    }
}

const CHECKS: [Check; 8] = [
    ("bessel-k", bessel),
    ("meijer-g", meijer),
    ("cdf-series", cdf_series),
    ("multinomial", multinomial),
    ("bdris", bdris),
    ("mc-vs-analytic", mc_vs_analytic),
    ("power-invariance", power_invariance),
    ("thread-determinism", thread_determinism),
];

/// Runs every check, writing one `PASS`/`FAIL` line each.
pub fn run_selftest<W: Write>(mut out: W) -> Result<(), CliError> {
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        match check() {
            Ok(msg) => writeln!(out, "PASS {name}: {msg}")?,
            Err(msg) => {
                writeln!(out, "FAIL {name}: {msg}")?;
                failed.push(name);
            }
        }
    }
    out.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Selftest(failed.join(", ")))
    }
}
