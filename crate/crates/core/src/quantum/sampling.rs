//! Seeded random states.
//!
//! Every sampler has a seed-based entry point and an `_with` twin taking an
//! RNG, so callers can derive independent streams per sample.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{CMatrix, DensityMatrix};
use crate::error::{domain, Result};
use crate::probdist::extremal_y;

/// Independent ChaCha stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Hilbert-Schmidt state of the given rank: `GG†/Tr(GG†)` with `G` a
/// `d × rank` Ginibre matrix.
pub fn random_density_hs(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_hs_with(d, rank, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_density_hs_with<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(domain(format!("need 1 <= rank <= d, got rank={rank}, d={d}")));
    }
    let g = ginibre(d, rank, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.unscale(tr))
}

/// Flat Dirichlet draw of length `n`.
pub(crate) fn flat_dirichlet<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Probability vector of length `n` with `Σλ² = purity` exactly (up to
/// rounding). A flat Dirichlet point is either shrunk towards the uniform
/// vector or pushed towards a random vertex until the target is hit.
pub(crate) fn spectrum_with_purity<R: Rng + ?Sized>(n: usize, purity: f64, rng: &mut R) -> Vec<f64> {
    let nf = n as f64;
    if purity <= 1.0 / nf + 1e-15 {
        return vec![1.0 / nf; n];
    }
    if purity >= 1.0 - 1e-15 {
        let mut v = vec![0.0; n];
        v[rng.random_range(0..n)] = 1.0;
        return v;
    }
    let x = flat_dirichlet(n, rng);
    let px: f64 = x.iter().map(|v| v * v).sum();
    if px >= purity {
        let t = ((purity - 1.0 / nf) / (px - 1.0 / nf)).sqrt();
        return x.iter().map(|v| 1.0 / nf + t * (v - 1.0 / nf)).collect();
    }
    let j = rng.random_range(0..n);
    let dir: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, v)| if i == j { 1.0 - v } else { -v })
        .collect();
    let a: f64 = dir.iter().map(|v| v * v).sum();
    let b: f64 = 2.0 * x.iter().zip(&dir).map(|(u, v)| u * v).sum::<f64>();
    let c = px - purity;
    let s = (-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a);
    x.iter().zip(&dir).map(|(u, v)| (u + s * v).max(0.0)).collect()
}

fn check_purity(d: usize, purity: f64) -> Result<()> {
    let lo = 1.0 / d as f64;
    if !purity.is_finite() || purity < lo - 1e-12 || purity > 1.0 + 1e-12 {
        return Err(domain(format!("purity {purity} outside [{lo}, 1]")));
    }
    Ok(())
}

/// State with prescribed purity and Haar-random eigenbasis.
pub fn random_density_fixed_purity(d: usize, purity: f64, seed: u64) -> Result<DensityMatrix> {
    random_density_fixed_purity_rank_with(d, d, purity, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// As [`random_density_fixed_purity`] with at most `rank` nonzero eigenvalues.
pub fn random_density_fixed_purity_rank(d: usize, rank: usize, purity: f64, seed: u64) -> Result<DensityMatrix> {
    random_density_fixed_purity_rank_with(d, rank, purity, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_density_fixed_purity_rank_with<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    purity: f64,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(domain(format!("need 1 <= rank <= d, got rank={rank}, d={d}")));
    }
    check_purity(rank, purity)?;
    let purity = purity.clamp(1.0 / rank as f64, 1.0);
    let mut lambda = spectrum_with_purity(rank, purity, rng);
    lambda.resize(d, 0.0);
    let s: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|l| *l /= s);
    DensityMatrix::from_spectrum(&lambda, &haar_unitary(d, rng))
}

/// State whose spectrum is `P_y^d[purity]` (zero-padded) in a Haar-random
/// eigenbasis.
pub fn conjecture_spectrum_state(d: usize, purity: f64, seed: u64) -> Result<DensityMatrix> {
    conjecture_spectrum_state_with(d, purity, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn conjecture_spectrum_state_with<R: Rng + ?Sized>(d: usize, purity: f64, rng: &mut R) -> Result<DensityMatrix> {
    check_purity(d, purity)?;
    let lambda = conjecture_spectrum(d, purity)?;
    DensityMatrix::from_spectrum(&lambda, &haar_unitary(d, rng))
}

pub(crate) fn conjecture_spectrum(d: usize, purity: f64) -> Result<Vec<f64>> {
    if d == 1 {
        return Ok(vec![1.0]);
    }
    let mut lambda = extremal_y(d, purity)?.probs().to_vec();
    lambda.resize(d, 0.0);
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn haar_is_unitary() {
        let mut rng = stream_rng(3, 0);
        for d in 1..=5 {
            let u = haar_unitary(d, &mut rng);
            assert!((&u * u.adjoint() - CMatrix::identity(d, d)).norm() < 1e-12);
        }
    }

    #[test]
    fn hs_rank_one_is_pure() {
        for seed in 0..20 {
            assert_abs_diff_eq!(random_density_hs(4, 1, seed).unwrap().purity(), 1.0, epsilon = 1e-10);
        }
        assert!(random_density_hs(3, 4, 0).is_err());
        assert!(random_density_hs(3, 0, 0).is_err());
    }

    #[test]
    fn hs_mean_purity() {
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|i| random_density_hs_with(3, 3, &mut stream_rng(5, i)).unwrap().purity())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.6).abs() < 0.01, "mean purity {mean}");
    }

    #[test]
    fn seeded_determinism() {
        assert_eq!(random_density_hs(3, 2, 42).unwrap(), random_density_hs(3, 2, 42).unwrap());
        assert_ne!(random_density_hs(3, 2, 42).unwrap(), random_density_hs(3, 2, 43).unwrap());
    }

    #[test]
    fn fixed_purity_hits_target() {
        for seed in 0..200 {
            let target = 1.0 / 3.0 + (seed as f64 / 200.0) * (2.0 / 3.0);
            let rho = random_density_fixed_purity(3, target, seed).unwrap();
            assert_abs_diff_eq!(rho.purity(), target, epsilon = 1e-9);
        }
        let mm = random_density_fixed_purity(3, 1.0 / 3.0, 1).unwrap();
        assert!((mm.matrix() - DensityMatrix::maximally_mixed(3).matrix()).norm() < 1e-12);
        assert_abs_diff_eq!(random_density_fixed_purity(4, 1.0, 1).unwrap().purity(), 1.0, epsilon = 1e-12);
        assert!(random_density_fixed_purity(3, 0.2, 1).is_err());
    }

    #[test]
    fn fixed_purity_rank() {
        let rho = random_density_fixed_purity_rank(4, 2, 0.7, 9).unwrap();
        assert_eq!(rho.rank(1e-9), 2);
        assert_abs_diff_eq!(rho.purity(), 0.7, epsilon = 1e-9);
        assert!(random_density_fixed_purity_rank(4, 2, 0.4, 9).is_err());
    }

    #[test]
    fn conjecture_spectra() {
        let rho = conjecture_spectrum_state(3, 0.5, 1).unwrap();
        assert_abs_diff_eq!(rho.spectrum()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.spectrum()[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.spectrum()[2], 0.0, epsilon = 1e-12);
        let rho = conjecture_spectrum_state(4, 0.3, 2).unwrap();
        let y = extremal_y(4, 0.3).unwrap();
        for (a, b) in rho.spectrum().iter().zip(y.probs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let mm = conjecture_spectrum_state(3, 1.0 / 3.0, 3).unwrap();
        assert_abs_diff_eq!(mm.purity(), 1.0 / 3.0, epsilon = 1e-12);
    }
}
