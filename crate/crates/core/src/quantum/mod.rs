//! Density matrices, POVMs and the measurement families used by the bounds.

mod construct;
mod gell_mann;
mod measurement;
mod sampling;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::probdist::ProbDist;

pub use construct::{
    gsic, gsic_a_of_t, gsic_t_for_a, gsic_t_max, mub_set, mum_kappa_of_t, mum_set,
    mum_t_for_kappa, mum_t_max, sic_set, sic_set_from_file, sic_set_from_fiducials,
};
pub use gell_mann::gell_mann_basis;
pub use measurement::{MeasurementKind, MeasurementSet, Povm};
pub use sampling::{
    conjecture_spectrum_state, conjecture_spectrum_state_with, haar_unitary,
    random_density_fixed_purity, random_density_fixed_purity_rank,
    random_density_fixed_purity_rank_with, random_density_hs, random_density_hs_with, stream_rng,
};
pub(crate) use sampling::{conjecture_spectrum, flat_dirichlet};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = 1e-10;

/// `Tr(AB)`.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub(crate) fn max_hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_spectrum(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// A validated quantum state with cached spectrum and purity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    spectrum: Vec<f64>,
    purity: f64,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let d = entries.nrows();
        if d == 0 || entries.ncols() != d {
            return Err(domain(format!(
                "density matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(domain("density matrix has non-finite entries"));
        }
        let defect = max_hermitian_defect(&entries);
        if defect > HERMITIAN_TOLERANCE {
            return Err(domain(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        let entries = hermitize(&entries);
        let tr = entries.trace().re;
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(domain(format!("trace is {tr}, expected 1")));
        }
        let spectrum = hermitian_spectrum(&entries);
        let lowest = spectrum[d - 1];
        if lowest < -PSD_TOLERANCE {
            return Err(domain(format!("matrix is not positive semidefinite (eigenvalue {lowest:e})")));
        }
        let purity = entries.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let spectral: f64 = spectrum.iter().map(|l| l * l).sum();
        if (purity - spectral).abs() > 1e-10 {
            return Err(Error::Invariant(format!(
                "purity {purity} disagrees with spectrum ({spectral})"
            )));
        }
        let purity = purity.clamp(1.0 / d as f64, 1.0);
        Ok(Self { entries, spectrum, purity })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let entries = CMatrix::identity(d, d).scale(1.0 / d as f64);
        Self {
            entries,
            spectrum: vec![1.0 / d as f64; d],
            purity: 1.0 / d as f64,
        }
    }

    pub fn pure(v: &CVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(domain("state vector must be nonzero"));
        }
        Self::new(projector(&v.unscale(n)))
    }

    /// `U diag(λ) U†`.
    pub fn from_spectrum(eigenvalues: &[f64], unitary: &CMatrix) -> Result<Self> {
        let d = eigenvalues.len();
        if unitary.nrows() != d || unitary.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: unitary.nrows() });
        }
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(
            d,
            eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)),
        ));
        Self::new(unitary * diag * unitary.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.spectrum.iter().filter(|&&l| l > tol).count()
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        -self
            .spectrum
            .iter()
            .filter(|&&l| l > 1e-15)
            .map(|&l| l * l.log2())
            .sum::<f64>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DensityJson::from(self)).expect("plain numeric data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DensityJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

/// Row-major `[[re, im], ...]` with `d²` entries.
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct DensityJson(Vec<[f64; 2]>);

impl From<&DensityMatrix> for DensityJson {
    fn from(rho: &DensityMatrix) -> Self {
        let d = rho.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = rho.entries[(i, j)];
                out.push([z.re, z.im]);
            }
        }
        Self(out)
    }
}

impl TryFrom<DensityJson> for DensityMatrix {
    type Error = Error;

    fn try_from(raw: DensityJson) -> Result<Self> {
        let n = raw.0.len();
        let d = (n as f64).sqrt().round() as usize;
        if d == 0 || d * d != n {
            return Err(Error::Parse(format!("expected d² entries, got {n}")));
        }
        let m = CMatrix::from_row_iterator(d, d, raw.0.iter().map(|[re, im]| Complex64::new(*re, *im)));
        DensityMatrix::new(m)
    }
}

/// Outcome probabilities `Tr(P_i ρ)` in element order.
pub fn probabilities(povm: &Povm, rho: &DensityMatrix) -> Result<Vec<f64>> {
    if povm.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: povm.dim(), got: rho.dim() });
    }
    Ok(povm
        .elements()
        .iter()
        .map(|e| trace_product(e, rho.matrix()).re.max(0.0))
        .collect())
}

/// Outcome distribution in canonical form.
pub fn measure(povm: &Povm, rho: &DensityMatrix) -> Result<ProbDist> {
    ProbDist::new(probabilities(povm, rho)?)
}
