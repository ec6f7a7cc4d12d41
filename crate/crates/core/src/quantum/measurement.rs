use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hermitian_spectrum, max_hermitian_defect, projector, trace_product, CMatrix, CVector, PSD_TOLERANCE};
use crate::error::{domain, Error, Result};

/// Tolerance for the defining trace relations of each measurement family.
pub const RELATION_TOLERANCE: f64 = 1e-9;

/// A positive operator-valued measure; outcome labels are element indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let d = elements.first().map(|e| e.nrows()).ok_or_else(|| domain("POVM has no elements"))?;
        let mut sum = CMatrix::zeros(d, d);
        for (i, e) in elements.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: e.nrows() });
            }
            if max_hermitian_defect(e) > 1e-10 {
                return Err(domain(format!("POVM element {i} is not Hermitian")));
            }
            let low = *hermitian_spectrum(e).last().expect("nonempty");
            if low < -PSD_TOLERANCE {
                return Err(domain(format!("POVM element {i} has eigenvalue {low:e}")));
            }
            sum += e;
        }
        let defect = (sum - CMatrix::identity(d, d)).norm();
        if defect > 1e-10 {
            return Err(domain(format!("POVM elements do not sum to identity (defect {defect:e})")));
        }
        Ok(Self { elements })
    }

    /// Projective measurement in an orthonormal basis.
    pub fn from_basis(vectors: &[CVector]) -> Result<Self> {
        Self::new(vectors.iter().map(projector).collect())
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// The elements tensored with identities on the other factor.
    pub fn tensor_left(&self, other_dim: usize) -> Vec<CMatrix> {
        let id = CMatrix::identity(other_dim, other_dim);
        self.elements.iter().map(|e| e.kronecker(&id)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasurementKind {
    Mub,
    Mum { kappa: f64 },
    Gsic { a: f64 },
    Sic,
    Custom,
}

impl std::fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Mub => write!(f, "mub"),
            Self::Mum { kappa } => write!(f, "mum(kappa={kappa})"),
            Self::Gsic { a } => write!(f, "gsic(a={a})"),
            Self::Sic => write!(f, "sic"),
            Self::Custom => write!(f, "custom"),
        }
    }
}

/// An ordered collection of POVMs tagged with its family.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    dim: usize,
    kind: MeasurementKind,
    povms: Vec<Povm>,
}

impl MeasurementSet {
    /// Builds the set and checks the family relations.
    pub fn new(kind: MeasurementKind, povms: Vec<Povm>) -> Result<Self> {
        let dim = povms.first().map(Povm::dim).ok_or_else(|| domain("measurement set is empty"))?;
        if let Some(p) = povms.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
        }
        let set = Self { dim, kind, povms };
        set.verify()?;
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    /// `M = |P|`.
    pub fn len(&self) -> usize {
        self.povms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povms.is_empty()
    }

    /// Keeps the POVMs at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let povms = indices
            .iter()
            .map(|&i| {
                self.povms
                    .get(i)
                    .cloned()
                    .ok_or_else(|| domain(format!("no POVM with index {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.kind, povms)
    }

    /// Checks the kind-specific trace relations at [`RELATION_TOLERANCE`].
    pub fn verify(&self) -> Result<()> {
        let d = self.dim;
        let df = d as f64;
        match self.kind {
            MeasurementKind::Custom => Ok(()),
            MeasurementKind::Mub => {
                self.check_block_structure()?;
                for (m, povm) in self.povms.iter().enumerate() {
                    for (i, e) in povm.elements().iter().enumerate() {
                        check_close(trace_product(e, e), 1.0, || format!("basis {m} element {i}: Tr(P²)"))?;
                        check_close(e.trace(), 1.0, || format!("basis {m} element {i}: Tr(P)"))?;
                    }
                }
                self.check_relations(|same_povm, same_elem| match (same_povm, same_elem) {
                    (true, true) => 1.0,
                    (true, false) => 0.0,
                    (false, _) => 1.0 / df,
                })
            }
            MeasurementKind::Mum { kappa } => {
                if !(kappa > 1.0 / df && kappa <= 1.0 + 1e-12) {
                    return Err(domain(format!("kappa {kappa} outside (1/d, 1]")));
                }
                self.check_block_structure()?;
                for (m, povm) in self.povms.iter().enumerate() {
                    for (i, e) in povm.elements().iter().enumerate() {
                        check_close(e.trace(), 1.0, || format!("MUM {m} element {i}: Tr(P)"))?;
                    }
                }
                self.check_relations(|same_povm, same_elem| match (same_povm, same_elem) {
                    (true, true) => kappa,
                    (true, false) => (1.0 - kappa) / (df - 1.0),
                    (false, _) => 1.0 / df,
                })
            }
            MeasurementKind::Gsic { a } => {
                if !(a > 1.0 / (df * df * df) && a <= 1.0 / (df * df) + 1e-12) {
                    return Err(domain(format!("a = {a} outside (1/d³, 1/d²]")));
                }
                self.check_gsic(a)
            }
            MeasurementKind::Sic => {
                self.check_gsic(1.0 / (df * df))?;
                for (i, e) in self.povms[0].elements().iter().enumerate() {
                    let defect = (e * e - e.scale(1.0 / df)).norm();
                    if defect > RELATION_TOLERANCE {
                        return Err(Error::Invariant(format!("SIC element {i} is not rank one")));
                    }
                }
                Ok(())
            }
        }
    }

    fn check_block_structure(&self) -> Result<()> {
        if self.povms.len() > self.dim + 1 {
            return Err(Error::Invariant(format!(
                "{} POVMs exceed the maximum d+1 = {}",
                self.povms.len(),
                self.dim + 1
            )));
        }
        for (m, p) in self.povms.iter().enumerate() {
            if p.len() != self.dim {
                return Err(Error::Invariant(format!("POVM {m} has {} outcomes, expected {}", p.len(), self.dim)));
            }
        }
        Ok(())
    }

    fn check_gsic(&self, a: f64) -> Result<()> {
        let d = self.dim as f64;
        if self.povms.len() != 1 || self.povms[0].len() != self.dim * self.dim {
            return Err(Error::Invariant("a SIC-POVM is a single POVM with d² elements".into()));
        }
        let off = (1.0 - a * d) / (d * (d * d - 1.0));
        self.check_relations(|_, same| if same { a } else { off })
    }

    fn check_relations(&self, expected: impl Fn(bool, bool) -> f64) -> Result<()> {
        for (m, pm) in self.povms.iter().enumerate() {
            for (n, pn) in self.povms.iter().enumerate().skip(m) {
                for (i, a) in pm.elements().iter().enumerate() {
                    for (j, b) in pn.elements().iter().enumerate() {
                        if m == n && j < i {
                            continue;
                        }
                        let want = expected(m == n, m == n && i == j);
                        check_close(trace_product(a, b), want, || {
                            format!("Tr(P_{i}^{m} P_{j}^{n})")
                        })?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_close(got: Complex64, want: f64, what: impl Fn() -> String) -> Result<()> {
    let err = (got - want).norm();
    if err > RELATION_TOLERANCE {
        return Err(Error::Invariant(format!(
            "{} = {} but expected {want} (error {err:e})",
            what(),
            got.re
        )));
    }
    Ok(())
}
