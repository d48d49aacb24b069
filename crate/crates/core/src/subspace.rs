//! Subspaces as orthonormal column frames, with toleranced rank decisions.
//!
//! A zero-dimensional subspace is an ordinary value (a frame with no
//! columns) and flows through every operation.

use crate::error::{DqlsError, Result};
use crate::linalg::{self, c, CMatrix, CVector, ONE, ZERO};
use crate::tensor::{Bipartition, Neighborhood, TensorSpace};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    frame: CMatrix,
}

/// Record of a threshold-based rank decision.
///
/// `borderline` lists the eigenvalues within [`tol::BORDERLINE_FACTOR`] of
/// the cutoff on either side.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDiagnostic {
    pub cutoff: f64,
    pub eigenvalues: Vec<f64>,
    pub borderline: Vec<f64>,
}

impl RankDiagnostic {
    fn new(cutoff: f64, eigenvalues: Vec<f64>) -> Self {
        let lo = cutoff / tol::BORDERLINE_FACTOR;
        let hi = cutoff * tol::BORDERLINE_FACTOR;
        let borderline = eigenvalues.iter().cloned().filter(|&v| v.abs() >= lo && v.abs() <= hi).collect();
        RankDiagnostic { cutoff, eigenvalues, borderline }
    }

    pub fn is_borderline(&self) -> bool {
        !self.borderline.is_empty()
    }
}

impl Subspace {
    /// Validates that `frame` has orthonormal columns.
    pub fn new(frame: CMatrix) -> Result<Self> {
        let k = frame.ncols();
        let gram = frame.adjoint() * &frame;
        let deviation = linalg::max_abs(&(gram - linalg::identity(k)));
        if deviation > tol::ORTH {
            return Err(DqlsError::InvalidArgument(format!(
                "frame columns are not orthonormal (deviation {deviation:.3e})"
            )));
        }
        Ok(Subspace { ambient_dim: frame.nrows(), frame })
    }

    pub(crate) fn from_frame(frame: CMatrix) -> Self {
        Subspace { ambient_dim: frame.nrows(), frame }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, frame: CMatrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, frame: linalg::identity(ambient_dim) }
    }

    /// Span of a single nonzero vector.
    pub fn span_of(v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(DqlsError::ZeroOperator);
        }
        Ok(Subspace::from_frame(CMatrix::from_column_slice(v.len(), 1, (v / c(norm, 0.0)).as_slice())))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    pub fn projector(&self) -> CMatrix {
        &self.frame * self.frame.adjoint()
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &CVector) -> f64 {
        let coeffs = self.frame.adjoint() * v;
        (v - &self.frame * coeffs).norm()
    }

    /// Largest residual of `other`'s frame columns; zero iff `other ⊆ self`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        other
            .frame
            .column_iter()
            .map(|col| self.residual(&col.into_owned()))
            .fold(0.0, f64::max)
    }
}

/// Support of a positive semidefinite matrix: eigenvectors whose eigenvalue
/// exceeds `rel_tol` times the largest eigenvalue.
pub fn support_of(m: &CMatrix, rel_tol: f64) -> Result<(Subspace, RankDiagnostic)> {
    let (values, vectors) = linalg::eigh(m);
    let max = values.last().cloned().unwrap_or(0.0);
    if max <= 0.0 {
        return Err(DqlsError::ZeroOperator);
    }
    let cutoff = rel_tol * max;
    let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] > cutoff).collect();
    let frame = CMatrix::from_fn(m.nrows(), keep.len(), |i, j| vectors[(i, keep[j])]);
    Ok((Subspace::from_frame(frame), RankDiagnostic::new(cutoff, values)))
}

pub fn support(rho: &crate::tensor::DensityMatrix, rel_tol: f64) -> Result<Subspace> {
    support_of(rho.matrix(), rel_tol).map(|(s, _)| s)
}

/// Intersection of subspaces, as the kernel of `sum_k (I - P_k)`.
///
/// The kernel is the eigenspace of eigenvalues below
/// [`tol::INTERSECT`]; the returned diagnostic records the spectrum.
pub fn intersect_with_diagnostics(subspaces: &[Subspace]) -> Result<(Subspace, RankDiagnostic)> {
    let first = subspaces
        .first()
        .ok_or_else(|| DqlsError::InvalidArgument("intersection of an empty list".into()))?;
    let n = first.ambient_dim;
    if let Some(bad) = subspaces.iter().find(|s| s.ambient_dim != n) {
        return Err(DqlsError::DimensionMismatch(format!(
            "ambient dimensions {n} and {} differ",
            bad.ambient_dim
        )));
    }
    let mut total = CMatrix::zeros(n, n);
    for s in subspaces {
        total += linalg::identity(n) - s.projector();
    }
    Ok(kernel_of_psd(&total, tol::INTERSECT))
}

pub fn intersect(subspaces: &[Subspace]) -> Result<Subspace> {
    intersect_with_diagnostics(subspaces).map(|(s, _)| s)
}

/// Eigenspace of a PSD matrix for eigenvalues below `cutoff`.
pub(crate) fn kernel_of_psd(m: &CMatrix, cutoff: f64) -> (Subspace, RankDiagnostic) {
    let (values, vectors) = linalg::eigh(m);
    let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] < cutoff).collect();
    let frame = CMatrix::from_fn(m.nrows(), keep.len(), |i, j| vectors[(i, keep[j])]);
    (Subspace::from_frame(frame), RankDiagnostic::new(cutoff, values))
}

pub fn complement(sub: &Subspace) -> Subspace {
    Subspace::from_frame(linalg::orthonormal_completion(&sub.frame))
}

pub fn projector(sub: &Subspace) -> CMatrix {
    sub.projector()
}

/// Projector distance in the spectral norm.
pub fn distance(a: &Subspace, b: &Subspace) -> Result<f64> {
    if a.ambient_dim != b.ambient_dim {
        return Err(DqlsError::DimensionMismatch(format!(
            "ambient dimensions {} and {} differ",
            a.ambient_dim, b.ambient_dim
        )));
    }
    Ok(linalg::spectral_norm(&(a.projector() - b.projector())))
}

pub fn equals(a: &Subspace, b: &Subspace, tol: f64) -> Result<bool> {
    Ok(distance(a, b)? <= tol)
}

/// The subspace `sub ⊗ H_rest` of the full space, where `sub` lives on the
/// neighborhood factor.
pub fn embed_subspace(sub: &Subspace, space: &TensorSpace, neighborhood: &Neighborhood) -> Result<Subspace> {
    let split = Bipartition::new(space, neighborhood)?;
    if sub.ambient_dim != split.keep_dim {
        return Err(DqlsError::DimensionMismatch(format!(
            "subspace of dimension {} on a neighborhood of dimension {}",
            sub.ambient_dim, split.keep_dim
        )));
    }
    let cols = sub.dim() * split.rest_dim;
    let mut frame = CMatrix::from_element(space.total_dim(), cols, ZERO);
    for (j, col) in sub.frame.column_iter().enumerate() {
        for t in 0..split.rest_dim {
            let out = j * split.rest_dim + t;
            for k in 0..split.keep_dim {
                frame[(split.compose(k, t), out)] = col[k];
            }
        }
    }
    Ok(Subspace::from_frame(frame))
}

/// Span of the listed computational basis vectors.
pub fn coordinate_span(ambient_dim: usize, indices: &[usize]) -> Subspace {
    let mut frame = CMatrix::zeros(ambient_dim, indices.len());
    for (j, &i) in indices.iter().enumerate() {
        frame[(i, j)] = ONE;
    }
    Subspace::from_frame(frame)
}
