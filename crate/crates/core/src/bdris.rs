//! Fully-connected RIS scattering matrices and cascaded gains.
//!
//! A fully-connected surface realises any complex symmetric unitary `Theta`.
//! Writing `Theta = V diag(e^{-j phi}) V^T` keeps both constraints for free;
//! choosing `V` so that `V^T conj(h_rn)` and `V^T h_br` have proportional
//! magnitude profiles and then co-phasing element by element reaches the
//! Cauchy-Schwarz bound `|h_rn^H Theta h_br| = ||h_rn|| ||h_br||`.
//!
//! The single-connected baseline is the diagonal special case, whose best
//! gain is `(sum_l |h_br,l| |h_rn,l|)^2`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::fading::ChannelVector;

type CVec = DVector<Complex64>;
type CMat = DMatrix<Complex64>;

/// Symmetric unitary `L x L` scattering matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix(pub CMat);

impl ScatteringMatrix {
    /// `||Theta^H Theta - I||_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.0.nrows();
        (self.0.adjoint() * &self.0 - CMat::identity(n, n)).norm()
    }

    /// `||Theta - Theta^T||_F`.
    pub fn symmetry_defect(&self) -> f64 {
        (&self.0 - self.0.transpose()).norm()
    }

    /// `h_rn^H Theta h_br`.
    pub fn response(&self, h_br: &ChannelVector, h_rn: &ChannelVector) -> Complex64 {
        (h_rn.0.adjoint() * &self.0 * &h_br.0)[(0, 0)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDecomposition {
    pub v: CMat,
    /// Phase shifts in `[0, 2 pi)`.
    pub phi: Vec<f64>,
}

fn check_pair(h_br: &ChannelVector, h_rn: &ChannelVector) -> Result<()> {
    if h_br.len() != h_rn.len() || h_br.is_empty() {
        return domain(format!(
            "channel vectors must share a nonzero length (got {} and {})",
            h_br.len(),
            h_rn.len()
        ));
    }
    if h_br.norm_sqr() == 0.0 || h_rn.norm_sqr() == 0.0 {
        return domain("channel vectors must be nonzero");
    }
    Ok(())
}

/// Orthonormal basis whose leading columns are `seed` (already orthonormal),
/// completed by column-pivoted Gram-Schmidt over the standard basis.
fn complete_basis(seed: &[CVec], l: usize) -> CMat {
    let mut basis: Vec<CVec> = seed.to_vec();
    let mut used = vec![false; l];
    while basis.len() < l {
        let mut best: Option<(usize, CVec, f64)> = None;
        for k in (0..l).filter(|&k| !used[k]) {
            let mut r = CVec::zeros(l);
            r[k] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dotc(&r);
                    r -= q * c;
                }
            }
            let n = r.norm();
            if best.as_ref().is_none_or(|b| n > b.2) {
                best = Some((k, r, n));
            }
        }
        let (k, r, n) = best.expect("a candidate remains while the basis is incomplete");
        used[k] = true;
        basis.push(r / Complex64::new(n, 0.0));
    }
    CMat::from_columns(&basis)
}

/// Unit vector with flat magnitudes `1/sqrt(L)` whose inner product with
/// `1/sqrt(L)` equals `gamma`.
fn flat_partner(gamma: Complex64, l: usize) -> CVec {
    let lf = l as f64;
    let mag = gamma.norm().min(1.0);
    let theta = gamma.arg();
    let cos_delta = if l.is_multiple_of(2) {
        mag
    } else {
        (lf * mag - 1.0) / (lf - 1.0)
    };
    let delta = cos_delta.clamp(-1.0, 1.0).acos();
    let amp = 1.0 / lf.sqrt();
    CVec::from_fn(l, |i, _| {
        let offset = if l % 2 == 1 && i == l - 1 {
            0.0
        } else if i % 2 == 0 {
            delta
        } else {
            -delta
        };
        Complex64::from_polar(amp, theta + offset)
    })
}

/// Unitary `V` such that `V^T conj(h_rn)` and `V^T h_br` both have flat
/// magnitude profiles.
pub fn construct_aligning_unitary(h_br: &ChannelVector, h_rn: &ChannelVector) -> Result<CMat> {
    check_pair(h_br, h_rn)?;
    let l = h_br.len();
    if l == 1 {
        return Ok(CMat::identity(1, 1));
    }
    let a = h_rn.0.map(|z| z.conj()).normalize();
    let b = h_br.0.normalize();
    let gamma = a.dotc(&b);
    let x = CVec::from_element(l, Complex64::new(1.0 / (l as f64).sqrt(), 0.0));
    let y = flat_partner(gamma, l);

    let residual_b = &b - &a * gamma;
    let residual_y = &y - &x * gamma;
    let (src, dst) = if residual_b.norm() > 1e-14 {
        let rb = residual_b.norm();
        let ry = residual_y.norm();
        (
            vec![a, residual_b / Complex64::new(rb, 0.0)],
            vec![x, residual_y / Complex64::new(ry, 0.0)],
        )
    } else {
        (vec![a], vec![x])
    };
    let e = complete_basis(&src, l);
    let f = complete_basis(&dst, l);
    // U = F E^H maps a -> x and b -> y; V = U^T.
    Ok((f * e.adjoint()).transpose())
}

/// Co-phasing shifts for a given `V`.
pub fn optimal_phases(v: &CMat, h_br: &ChannelVector, h_rn: &ChannelVector) -> Result<Vec<f64>> {
    check_pair(h_br, h_rn)?;
    if v.nrows() != h_br.len() || v.ncols() != h_br.len() {
        return domain("V must be L x L");
    }
    let vt = v.transpose();
    let p = &vt * h_rn.0.map(|z| z.conj());
    let q = &vt * &h_br.0;
    Ok(p.iter()
        .zip(q.iter())
        .map(|(pl, ql)| {
            if *pl == Complex64::new(0.0, 0.0) || *ql == Complex64::new(0.0, 0.0) {
                0.0
            } else {
                (pl.arg() + ql.arg()).rem_euclid(TAU)
            }
        })
        .collect())
}

/// `Theta = V diag(e^{-j phi}) V^T`.
pub fn assemble_theta(decomp: &PhaseDecomposition) -> Result<ScatteringMatrix> {
    let l = decomp.v.nrows();
    if decomp.v.ncols() != l || decomp.phi.len() != l {
        return domain("decomposition dimensions disagree");
    }
    let d = CVec::from_iterator(l, decomp.phi.iter().map(|&p| Complex64::from_polar(1.0, -p)));
    let vd = CMat::from_fn(l, l, |i, j| decomp.v[(i, j)] * d[j]);
    Ok(ScatteringMatrix(vd * decomp.v.transpose()))
}

/// The optimal fully-connected scattering matrix for one user.
pub fn optimal_theta(h_br: &ChannelVector, h_rn: &ChannelVector) -> Result<ScatteringMatrix> {
    let v = construct_aligning_unitary(h_br, h_rn)?;
    let phi = optimal_phases(&v, h_br, h_rn)?;
    assemble_theta(&PhaseDecomposition { v, phi })
}

/// Fully-connected gain `||h_br||^2 ||h_rn||^2`.
pub fn fc_cascaded_gain(h_br: &ChannelVector, h_rn: &ChannelVector) -> Result<f64> {
    check_pair(h_br, h_rn)?;
    Ok(h_br.norm_sqr() * h_rn.norm_sqr())
}

/// Fully-connected gain through the explicit optimal `Theta`.
pub fn fc_cascaded_gain_matrix(h_br: &ChannelVector, h_rn: &ChannelVector) -> Result<f64> {
    let theta = optimal_theta(h_br, h_rn)?;
    Ok(theta.response(h_br, h_rn).norm_sqr())
}

/// Single-connected gain `(sum_l |h_br,l| |h_rn,l|)^2`.
pub fn sc_cascaded_gain(h_br: &ChannelVector, h_rn: &ChannelVector) -> Result<f64> {
    check_pair(h_br, h_rn)?;
    let s: f64 = h_br.0.iter().zip(h_rn.0.iter()).map(|(a, b)| a.norm() * b.norm()).sum();
    Ok(s * s)
}

/// Fully-connected gain from per-element powers.
pub(crate) fn fc_gain_from_powers(br: &[f64], rn: &[f64]) -> f64 {
    br.iter().sum::<f64>() * rn.iter().sum::<f64>()
}

/// Single-connected gain from per-element powers.
pub(crate) fn sc_gain_from_powers(br: &[f64], rn: &[f64]) -> f64 {
    let s: f64 = br.iter().zip(rn).map(|(a, b)| (a * b).sqrt()).sum();
    s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::sample_channel_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cv(v: &[Complex64]) -> ChannelVector {
        ChannelVector(CVec::from_column_slice(v))
    }

    fn ones(l: usize) -> ChannelVector {
        ChannelVector(CVec::from_element(l, Complex64::new(1.0, 0.0)))
    }

    #[test]
    fn single_element() {
        let h_br = cv(&[Complex64::from_polar(1.3, std::f64::consts::FRAC_PI_3)]);
        let h_rn = cv(&[Complex64::from_polar(0.7, std::f64::consts::FRAC_PI_6)]);
        let v = construct_aligning_unitary(&h_br, &h_rn).unwrap();
        assert_eq!(v, CMat::identity(1, 1));
        let theta = optimal_theta(&h_br, &h_rn).unwrap();
        let r = theta.response(&h_br, &h_rn);
        assert!(r.im.abs() < 1e-15 && (r.re - 1.3 * 0.7).abs() < 1e-15);
        let expect = 1.69 * 0.49;
        assert!((fc_cascaded_gain(&h_br, &h_rn).unwrap() - expect).abs() < 1e-15);
        assert!((sc_cascaded_gain(&h_br, &h_rn).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn identity_decomposition() {
        let theta = assemble_theta(&PhaseDecomposition {
            v: CMat::identity(4, 4),
            phi: vec![0.0; 4],
        })
        .unwrap();
        assert_eq!(theta.0, CMat::identity(4, 4));
        let phi = optimal_phases(&CMat::identity(3, 3), &ones(3), &ones(3)).unwrap();
        assert_eq!(phi, vec![0.0; 3]);
    }

    #[test]
    fn flat_vectors() {
        assert_eq!(fc_cascaded_gain(&ones(16), &ones(16)).unwrap(), 256.0);
        assert!((sc_cascaded_gain(&ones(16), &ones(16)).unwrap() - 256.0).abs() < 1e-12);
        assert!((fc_cascaded_gain_matrix(&ones(16), &ones(16)).unwrap() - 256.0).abs() < 1e-9);
    }

    #[test]
    fn random_alignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for &l in &[2usize, 3, 4, 7, 8] {
            let h_br = sample_channel_vector(&mut rng, 2, 1.0, l).unwrap();
            let h_rn = sample_channel_vector(&mut rng, 2, 1.0, l).unwrap();
            let v = construct_aligning_unitary(&h_br, &h_rn).unwrap();
            assert!((v.adjoint() * &v - CMat::identity(l, l)).norm() < 1e-12);
            let p = v.transpose() * h_rn.0.map(|z| z.conj());
            let q = v.transpose() * &h_br.0;
            for i in 0..l {
                assert!((p[i].norm() * q.norm() - q[i].norm() * p.norm()).abs() < 1e-9 * p.norm() * q.norm());
            }
            let fast = fc_cascaded_gain(&h_br, &h_rn).unwrap();
            let slow = fc_cascaded_gain_matrix(&h_br, &h_rn).unwrap();
            assert!(((fast - slow) / fast).abs() < 1e-9);
            assert!(sc_cascaded_gain(&h_br, &h_rn).unwrap() <= fast * (1.0 + 1e-12));
        }
    }

    #[test]
    fn collinear_inputs() {
        let h = cv(&[
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.0, 2.0),
        ]);
        let h_rn = ChannelVector(h.0.map(|z| z.conj() * Complex64::from_polar(2.0, 0.4)));
        let slow = fc_cascaded_gain_matrix(&h, &h_rn).unwrap();
        let fast = fc_cascaded_gain(&h, &h_rn).unwrap();
        assert!(((fast - slow) / fast).abs() < 1e-9);
    }

    #[test]
    fn rejects_degenerate_input() {
        let zero = ChannelVector(CVec::zeros(3));
        assert!(construct_aligning_unitary(&ones(3), &zero).is_err());
        assert!(fc_cascaded_gain(&ones(3), &ones(4)).is_err());
        assert!(sc_cascaded_gain(&zero, &ones(3)).is_err());
    }

    #[test]
    fn power_shortcuts_match_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h_br = sample_channel_vector(&mut rng, 2, 1.0, 8).unwrap();
        let h_rn = sample_channel_vector(&mut rng, 2, 1.0, 8).unwrap();
        let br: Vec<f64> = h_br.0.iter().map(|z| z.norm_sqr()).collect();
        let rn: Vec<f64> = h_rn.0.iter().map(|z| z.norm_sqr()).collect();
        let fc = fc_cascaded_gain(&h_br, &h_rn).unwrap();
        let sc = sc_cascaded_gain(&h_br, &h_rn).unwrap();
        assert!((fc_gain_from_powers(&br, &rn) - fc).abs() < 1e-12 * fc);
        assert!((sc_gain_from_powers(&br, &rn) - sc).abs() < 1e-12 * sc);
    }
}
