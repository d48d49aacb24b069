use num_complex::Complex64;

use super::{vectorize, LindbladGenerator};
use crate::error::{DqlsError, Result};
use crate::linalg;
use crate::tensor::PureState;
use crate::tol;

/// Largest Hilbert-space dimension handled by the dense Liouvillian path.
pub const DEFAULT_DIM_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalues with modulus at most [`tol::EIG`].
    pub kernel_dim: usize,
    /// Largest real part among the nonzero eigenvalues (0 when there are none).
    pub spectral_abscissa_nonzero: f64,
    pub gap: f64,
    /// Largest real part over the whole spectrum.
    pub max_real_part: f64,
    /// Eigenvalues within a factor 100 of the zero threshold.
    pub near_threshold: Vec<Complex64>,
}

pub fn spectrum_report(eigenvalues: Vec<Complex64>) -> SpectrumReport {
    let is_zero = |z: &Complex64| z.norm() <= tol::EIG;
    let kernel_dim = eigenvalues.iter().filter(|z| is_zero(z)).count();
    let spectral_abscissa_nonzero = eigenvalues
        .iter()
        .filter(|z| !is_zero(z))
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let spectral_abscissa_nonzero = if spectral_abscissa_nonzero.is_finite() { spectral_abscissa_nonzero } else { 0.0 };
    let max_real_part = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let lo = tol::EIG / tol::BORDERLINE_FACTOR;
    let hi = tol::EIG * tol::BORDERLINE_FACTOR;
    let near_threshold = eigenvalues
        .iter()
        .filter(|z| {
            let m = z.norm();
            (m >= lo && m <= hi) || (!is_zero(z) && z.re.abs() <= hi)
        })
        .cloned()
        .collect();
    SpectrumReport {
        eigenvalues,
        kernel_dim,
        spectral_abscissa_nonzero,
        gap: -spectral_abscissa_nonzero,
        max_real_part,
        near_threshold,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasCertificate {
    pub spectrum: SpectrumReport,
    /// Frobenius distance between the trace-normalized kernel vector and
    /// the target projector.
    pub kernel_state_error: f64,
    /// Nonzero eigenvalues whose real part is within [`tol::EIG`] of zero.
    pub marginal_eigenvalues: Vec<Complex64>,
    pub certified: bool,
}

/// Spectral check that `target` is the unique, attractive steady state.
///
/// Certified iff the Liouvillian kernel is one-dimensional, the kernel
/// vector is `|Ψ><Ψ|` (within 1e-7 after trace normalization) and no
/// nonzero eigenvalue sits on the imaginary axis.
pub fn gas_certificate(gen: &LindbladGenerator, target: &PureState, dim_cap: usize) -> Result<GasCertificate> {
    let d = gen.dim();
    if d > dim_cap {
        return Err(DqlsError::DimensionCap { dim: d, cap: dim_cap });
    }
    if target.space().total_dim() != d {
        return Err(DqlsError::DimensionMismatch(format!(
            "target of dimension {} for a generator of dimension {d}",
            target.space().total_dim()
        )));
    }
    let lhat = vectorize(gen);
    let spectrum = spectrum_report(linalg::eigenvalues(&lhat)?);

    let (_, vectors) = linalg::smallest_singular_vectors(&lhat);
    let kernel = linalg::unstack(&vectors.column(0).into_owned(), d);
    let tr = linalg::trace(&kernel);
    let kernel_state_error = if tr.norm() > 1e-12 {
        linalg::frobenius(&(kernel / tr - target.projector()))
    } else {
        f64::INFINITY
    };

    let marginal_eigenvalues: Vec<Complex64> = spectrum
        .eigenvalues
        .iter()
        .filter(|z| z.norm() > tol::EIG && z.re.abs() <= tol::EIG)
        .cloned()
        .collect();
    let certified = spectrum.kernel_dim == 1 && kernel_state_error <= 1e-7 && marginal_eigenvalues.is_empty();
    Ok(GasCertificate { spectrum, kernel_state_error, marginal_eigenvalues, certified })
}
