//! Special functions used by the closed-form ZSRP expressions.
//!
//! Everything here is written from scratch on `f64`:
//!
//! - log-gamma for real and complex arguments (Stirling series after an
//!   upward shift),
//! - digamma,
//! - regularized incomplete gamma for integer shape (finite Poisson sum),
//! - modified Bessel functions of the second kind of integer order,
//! - Meijer G-functions `G^{m,0}_{p,m}` through a Mellin-Barnes contour
//!   integral on a vertical line.
//!
//! Large-argument Bessel values underflow quickly, so the log-space
//! variants ([`ln_bessel_k`], [`ln_bessel_k_seq`]) are what the analytic
//! evaluators consume.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `B_{2k} / (2k (2k - 1))` for k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Arguments are shifted up to this real part before the Stirling series.
const STIRLING_SHIFT: f64 = 15.0;

fn stirling_tail(z_inv: f64) -> f64 {
    let z2 = z_inv * z_inv;
    let mut acc = 0.0;
    for &c in STIRLING.iter().rev() {
        acc = acc * z2 + c;
    }
    acc * z_inv
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires a finite x > 0, got {x}"));
    }
    Ok(lgamma(x))
}

/// Unchecked `ln Gamma(x)`, `x > 0`.
pub(crate) fn lgamma(x: f64) -> f64 {
    let mut z = x;
    let mut prod = 1.0;
    while z < STIRLING_SHIFT {
        prod *= z;
        z += 1.0;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + stirling_tail(1.0 / z) - prod.ln()
}

/// `ln t!`, tabulated from exact products up to `170!`.
pub(crate) fn ln_factorial(t: u32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut prod = 1.0f64;
        let mut out = vec![0.0];
        for k in 1..=170 {
            prod *= k as f64;
            out.push(prod.ln());
        }
        out
    });
    table
        .get(t as usize)
        .copied()
        .unwrap_or_else(|| lgamma(t as f64 + 1.0))
}

/// A logarithm of `Gamma(z)` for `Re z > 0`. The imaginary part is only
/// determined modulo `2 pi`, which is all that exponentiating callers need.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0, "ln_gamma_complex needs Re z > 0, got {z}");
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while w.re < STIRLING_SHIFT {
        prod *= w;
        w += 1.0;
    }
    let w_inv = w.inv();
    let w2 = w_inv * w_inv;
    let mut tail = Complex64::new(0.0, 0.0);
    for &c in STIRLING.iter().rev() {
        tail = tail * w2 + c;
    }
    tail *= w_inv;
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + tail - prod.ln()
}

/// Digamma `psi(x)` for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut z = x;
    let mut acc = 0.0;
    while z < STIRLING_SHIFT {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let z2 = 1.0 / (z * z);
    let series = z2
        * (1.0 / 12.0
            - z2 * (1.0 / 120.0 - z2 * (1.0 / 252.0 - z2 * (1.0 / 240.0 - z2 / 132.0))));
    acc + z.ln() - 0.5 / z - series
}

/// Trigamma `psi'(x)` for `x > 0`.
pub(crate) fn trigamma(x: f64) -> f64 {
    let mut z = x;
    let mut acc = 0.0;
    while z < STIRLING_SHIFT {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let zi = 1.0 / z;
    let z2 = zi * zi;
    acc + zi
        + 0.5 * z2
        + zi * z2 * (1.0 / 6.0 - z2 * (1.0 / 30.0 - z2 * (1.0 / 42.0 - z2 / 30.0)))
}

/// `Gamma(a, x) / Gamma(a) = e^{-x} sum_{t<a} x^t / t!` for integer `a >= 1`.
///
/// Terms are summed relative to the largest one so neither `e^{-x}` nor
/// `x^t` is formed on its own.
pub fn regularized_upper_gamma(a: u32, x: f64) -> Result<f64> {
    if a == 0 {
        return domain("regularized_upper_gamma requires a >= 1");
    }
    if !(x >= 0.0) {
        return domain(format!("regularized_upper_gamma requires x >= 0, got {x}"));
    }
    Ok(upper_gamma_q(a, x))
}

pub(crate) fn upper_gamma_q(a: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < a as f64 {
        return 1.0 - lower_gamma_p(a, x);
    }
    let top = a - 1;
    let peak = (x.floor() as u64).min(top as u64) as u32;
    let ln_peak = -x + peak as f64 * x.ln() - ln_factorial(peak);
    let mut sum = 1.0;
    let mut term = 1.0;
    for t in (1..=peak).rev() {
        term *= t as f64 / x;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    term = 1.0;
    for t in peak..top {
        term *= x / (t + 1) as f64;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    (ln_peak + sum.ln()).exp().min(1.0)
}

/// `gamma(a, x) / Gamma(a)`, the complement of [`upper_gamma_q`], computed
/// without cancellation when `x < a`.
pub(crate) fn lower_gamma_p(a: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= a as f64 {
        return 1.0 - upper_gamma_q(a, x);
    }
    // e^{-x} sum_{t >= a} x^t / t!, terms decrease from t = a because x < a.
    let ln_first = -x + a as f64 * x.ln() - ln_factorial(a);
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut t = a;
    loop {
        t += 1;
        term *= x / t as f64;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    (ln_first + sum.ln()).exp().min(1.0)
}

/// `e^x K_0(x)` and `e^x K_1(x)` for `x > 0`.
fn bessel_k01_scaled(x: f64) -> (f64, f64) {
    if x <= 2.0 {
        let y = 0.25 * x * x;
        let ln_half = (0.5 * x).ln();
        // I0, I1 and the digamma-weighted companion series.
        let mut i0 = 0.0;
        let mut i1 = 0.0;
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        let mut t0 = 1.0; // y^k / (k!)^2
        let mut t1 = 1.0; // y^k / (k! (k+1)!)
        let mut harmonic = 0.0; // H_k
        for k in 0..60 {
            let kf = k as f64;
            if k > 0 {
                t0 *= y / (kf * kf);
                t1 *= y / (kf * (kf + 1.0));
                harmonic += 1.0 / kf;
            }
            let psi_k1 = -EULER_GAMMA + harmonic;
            let psi_k2 = psi_k1 + 1.0 / (kf + 1.0);
            i0 += t0;
            i1 += t1;
            s0 += psi_k1 * t0;
            s1 += (psi_k1 + psi_k2) * t1;
            if t0 < 1e-17 * i0 && k > 2 {
                break;
            }
        }
        i1 *= 0.5 * x;
        let k0 = -ln_half * i0 + s0;
        let k1 = 1.0 / x + ln_half * i1 - 0.25 * x * s1;
        let ex = x.exp();
        (k0 * ex, k1 * ex)
    } else {
        // Steed's continued fraction (Temme's CF2) at order 0.
        let a1 = 0.25;
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 1..100_000 {
            let fi = i as f64;
            a -= 2.0 * fi;
            c = -a * c / (fi + 1.0);
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < 1e-17 {
                break;
            }
        }
        h *= a1;
        let k0 = (PI / (2.0 * x)).sqrt() / s;
        let k1 = k0 * (x + 0.5 - h) / x;
        (k0, k1)
    }
}

/// `ln K_nu(x)` for `nu = 0..=nu_max`.
///
/// Upward recurrence `K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu` on scaled values,
/// renormalising whenever the running value grows past `1e250`.
pub fn ln_bessel_k_seq(nu_max: u32, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("bessel_k requires a finite x > 0, got {x}"));
    }
    Ok(ln_bessel_k_seq_unchecked(nu_max, x))
}

pub(crate) fn ln_bessel_k_seq_unchecked(nu_max: u32, x: f64) -> Vec<f64> {
    let (k0, k1) = bessel_k01_scaled(x);
    let mut out = Vec::with_capacity(nu_max as usize + 1);
    out.push(k0.ln() - x);
    if nu_max == 0 {
        return out;
    }
    out.push(k1.ln() - x);
    let mut shift = -x;
    let (mut prev, mut cur) = (k0, k1);
    for nu in 1..nu_max {
        let next = prev + (2.0 * nu as f64 / x) * cur;
        prev = cur;
        cur = next;
        if cur > 1e250 {
            let lc = cur.ln();
            prev /= cur;
            cur = 1.0;
            shift += lc;
        }
        out.push(cur.ln() + shift);
    }
    out
}

/// `ln K_nu(x)`; negative orders use `K_{-nu} = K_nu`.
pub fn ln_bessel_k(nu: i64, x: f64) -> Result<f64> {
    let order = nu.unsigned_abs() as u32;
    Ok(ln_bessel_k_seq(order, x)?[order as usize])
}

/// `e^x K_nu(x)`.
pub fn bessel_k_scaled(nu: u32, x: f64) -> Result<f64> {
    Ok((ln_bessel_k(nu as i64, x)? + x).exp())
}

/// A Bessel K value with an underflow flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselK {
    pub value: f64,
    /// Set when the true value lies below the smallest normal `f64`; `value`
    /// is then 0.
    pub underflow: bool,
}

/// `K_nu(x)` for integer `nu >= 0`, `x > 0`.
pub fn bessel_k(nu: u32, x: f64) -> Result<BesselK> {
    let ln_k = ln_bessel_k(nu as i64, x)?;
    if ln_k < f64::MIN_POSITIVE.ln() {
        Ok(BesselK {
            value: 0.0,
            underflow: true,
        })
    } else {
        Ok(BesselK {
            value: ln_k.exp(),
            underflow: false,
        })
    }
}

/// Parameters of `G^{3,0}_{1,3}(x | a1; b1, b2, b3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerG30Params {
    pub a1: f64,
    pub b: [f64; 3],
    pub x: f64,
}

/// A contour-integral value kept as `sign * exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerValue {
    pub ln_abs: f64,
    pub sign: f64,
    /// Real part of the integration line.
    pub abscissa: f64,
    /// Final trapezoid step.
    pub step: f64,
}

impl MeijerValue {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// Largest `|tau|` grid index explored on one contour before giving up.
const MAX_CONTOUR_NODES: usize = 4_000_000;
/// Relative self-convergence target between successive step halvings.
const CONTOUR_RTOL: f64 = 1e-11;

/// `G^{m,0}_{p,m}(x | a; b)`, `m = b.len()`, `p = a.len() < m`.
///
/// Defined as `(1 / 2 pi i) * integral of prod Gamma(b_j + s) / prod Gamma(a_i + s)
/// * x^{-s} ds` along `Re s = c`, with `c` right of every pole of the numerator.
pub fn meijer_g_m0(a: &[f64], b: &[f64], x: f64) -> Result<f64> {
    Ok(meijer_g_m0_ln(a, b, x)?.value())
}

pub fn meijer_g30(p: &MeijerG30Params) -> Result<f64> {
    meijer_g_m0(&[p.a1], &p.b, p.x)
}

/// Log-space [`meijer_g_m0`], with step halving until two successive
/// trapezoid sums agree to `1e-11` relative.
pub fn meijer_g_m0_ln(a: &[f64], b: &[f64], x: f64) -> Result<MeijerValue> {
    let line = ContourLine::new(a, b, x)?;
    let mut h = line.initial_step();
    let mut prev = line.trapezoid(h)?;
    for _ in 0..10 {
        h *= 0.5;
        let next = line.trapezoid(h)?;
        let scale = next.abs_sum.max(next.sum.abs()) * h;
        if (next.sum * h - prev.sum * 2.0 * h).abs() <= CONTOUR_RTOL * scale {
            return Ok(line.finish(next.sum, h));
        }
        prev = next;
    }
    Err(Error::Accuracy {
        routine: "meijer_g_m0",
        detail: format!(
            "trapezoid sums did not settle on Re s = {} (x = {x}, a = {a:?}, b = {b:?})",
            line.c
        ),
    })
}

/// Single-step evaluation, used to check self-convergence.
pub fn meijer_g_m0_with_step(a: &[f64], b: &[f64], x: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return domain("contour step must be > 0");
    }
    let line = ContourLine::new(a, b, x)?;
    let t = line.trapezoid(step)?;
    Ok(line.finish(t.sum, step).value())
}

struct ContourLine<'a> {
    a: &'a [f64],
    b: &'a [f64],
    ln_x: f64,
    c: f64,
    /// `ln f(c)`, real on the real axis.
    ln_peak: f64,
    width: f64,
}

struct TrapezoidSum {
    sum: f64,
    abs_sum: f64,
}

impl<'a> ContourLine<'a> {
    fn new(a: &'a [f64], b: &'a [f64], x: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return domain(format!("Meijer G argument must be finite and > 0, got {x}"));
        }
        if b.is_empty() || a.len() >= b.len() {
            return domain(format!(
                "G^(m,0)_(p,m) contour needs p < m (got p = {}, m = {}); the integrand would not decay",
                a.len(),
                b.len()
            ));
        }
        if a.iter().chain(b).any(|v| !v.is_finite()) {
            return domain("Meijer G parameters must be finite");
        }
        let min_b = b.iter().copied().fold(f64::INFINITY, f64::min);
        let mut c = (1.0 - min_b).max(0.5);
        for &ai in a {
            c = c.max(0.5 - ai);
        }
        let ln_x = x.ln();
        let slope = |c: f64| -> f64 {
            b.iter().map(|&bj| digamma(bj + c)).sum::<f64>()
                - a.iter().map(|&ai| digamma(ai + c)).sum::<f64>()
                - ln_x
        };
        // Move right to the saddle of |f| on the real axis if it lies beyond
        // the minimal abscissa; the vertical line through it carries the
        // least cancellation.
        if slope(c) < 0.0 {
            let mut lo = c;
            let mut hi = c + 1.0;
            while slope(hi) < 0.0 {
                lo = hi;
                hi = c + 2.0 * (hi - c);
                if hi > 1e8 {
                    return domain(format!("no saddle found on the real axis for x = {x}"));
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-12 * hi.max(1.0) {
                    break;
                }
            }
            c = hi;
        }
        let curvature = b.iter().map(|&bj| trigamma(bj + c)).sum::<f64>()
            - a.iter().map(|&ai| trigamma(ai + c)).sum::<f64>();
        let width = if curvature > 0.0 {
            1.0 / curvature.sqrt()
        } else {
            1.0
        };
        let ln_peak = b.iter().map(|&bj| lgamma(bj + c)).sum::<f64>()
            - a.iter().map(|&ai| lgamma(ai + c)).sum::<f64>()
            - c * ln_x;
        Ok(Self {
            a,
            b,
            ln_x,
            c,
            ln_peak,
            width,
        })
    }

    fn initial_step(&self) -> f64 {
        (self.width / 8.0).min(0.05)
    }

    fn ln_integrand(&self, tau: f64) -> Complex64 {
        let s = Complex64::new(self.c, tau);
        let mut acc = -s * self.ln_x;
        for &bj in self.b {
            acc += ln_gamma_complex(s + bj);
        }
        for &ai in self.a {
            acc -= ln_gamma_complex(s + ai);
        }
        acc
    }

    fn trapezoid(&self, h: f64) -> Result<TrapezoidSum> {
        let mut sum = 0.5;
        let mut abs_sum = 0.5;
        let mut quiet = 0usize;
        for k in 1..MAX_CONTOUR_NODES {
            let f = (self.ln_integrand(k as f64 * h) - self.ln_peak).exp();
            let mag = f.norm();
            sum += f.re;
            abs_sum += mag;
            if mag < 1e-18 {
                quiet += 1;
                if quiet >= 8 {
                    return Ok(TrapezoidSum { sum, abs_sum });
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::Accuracy {
            routine: "meijer_g_m0",
            detail: format!(
                "integrand had not decayed after {MAX_CONTOUR_NODES} nodes at step {h}"
            ),
        })
    }

    fn finish(&self, sum: f64, h: f64) -> MeijerValue {
        let scaled = sum * h / PI;
        MeijerValue {
            ln_abs: self.ln_peak + scaled.abs().ln(),
            sign: scaled.signum(),
            abscissa: self.c,
            step: h,
        }
    }
}
