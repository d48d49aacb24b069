//! Lindblad generators and everything that runs them.
//!
//! The generator is
//!
//! ```text
//!   L(ρ) = -i[H, ρ] + Σ_k ( L_k ρ L_k† - ½ {L_k† L_k, ρ} )
//! ```
//!
//! Vectorization stacks columns, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

mod evolve;
mod invariance;
mod spectrum;
mod switched;

pub use evolve::{default_dt, evolve, evolve_with, Trajectory};
pub use invariance::{check_invariance, InvarianceReport};
pub use spectrum::{gas_certificate, spectrum_report, GasCertificate, SpectrumReport, DEFAULT_DIM_CAP};
pub use switched::{simulate_switched, switched_map, SwitchingSchedule};

use crate::error::{DqlsError, Result};
use crate::linalg::{self, c, CMatrix, I};
use crate::tensor::{DensityMatrix, TensorSpace};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    space: TensorSpace,
    hamiltonian: Option<CMatrix>,
    noise_ops: Vec<CMatrix>,
    /// `-iH - ½ Σ L_k† L_k`, so that `L(ρ) = Kρ + ρK† + Σ L_k ρ L_k†`.
    effective: CMatrix,
    effective_adj: CMatrix,
    noise_adj: Vec<CMatrix>,
}

impl LindbladGenerator {
    pub fn new(space: TensorSpace, hamiltonian: Option<CMatrix>, noise_ops: Vec<CMatrix>) -> Result<Self> {
        let d = space.total_dim();
        if hamiltonian.is_none() && noise_ops.is_empty() {
            return Err(DqlsError::InvalidArgument("generator needs a Hamiltonian or a noise operator".into()));
        }
        let mut effective = CMatrix::zeros(d, d);
        if let Some(h) = &hamiltonian {
            check_square(h, d, "Hamiltonian")?;
            let deviation = linalg::hermitian_deviation(h);
            if deviation > tol::HERM {
                return Err(DqlsError::NotHermitian { deviation });
            }
            effective -= h * I;
        }
        for l in &noise_ops {
            check_square(l, d, "noise operator")?;
            effective -= l.adjoint() * l * c(0.5, 0.0);
        }
        let effective_adj = effective.adjoint();
        let noise_adj = noise_ops.iter().map(|l| l.adjoint()).collect();
        Ok(LindbladGenerator { space, hamiltonian, noise_ops, effective, effective_adj, noise_adj })
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn hamiltonian(&self) -> Option<&CMatrix> {
        self.hamiltonian.as_ref()
    }

    pub fn noise_ops(&self) -> &[CMatrix] {
        &self.noise_ops
    }

    /// Action on an arbitrary `D x D` matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = &self.effective * rho;
        out += rho * &self.effective_adj;
        for (l, l_adj) in self.noise_ops.iter().zip(&self.noise_adj) {
            out += l * (rho * l_adj);
        }
        out
    }

    /// Cheap upper bound on the spectral norm of the vectorized generator.
    pub fn norm_bound(&self) -> f64 {
        2.0 * linalg::frobenius(&self.effective)
            + self.noise_ops.iter().map(|l| linalg::frobenius(l).powi(2)).sum::<f64>()
    }
}

fn check_square(m: &CMatrix, d: usize, what: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(DqlsError::DimensionMismatch(format!(
            "{}x{} {what} on a space of dimension {d}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `L(ρ)` for a validated density matrix.
pub fn apply_generator(gen: &LindbladGenerator, rho: &DensityMatrix) -> Result<CMatrix> {
    if rho.space().total_dim() != gen.dim() {
        return Err(DqlsError::DimensionMismatch(format!(
            "state of dimension {} for a generator of dimension {}",
            rho.space().total_dim(),
            gen.dim()
        )));
    }
    Ok(gen.apply(rho.matrix()))
}

/// Direct evaluation of the defining formula, term by term.
pub fn apply_generator_matrix(h: Option<&CMatrix>, ls: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let mut out = match h {
        Some(h) => linalg::commutator(h, rho) * (-I),
        None => CMatrix::zeros(rho.nrows(), rho.ncols()),
    };
    for l in ls {
        let ldl = l.adjoint() * l;
        out += l * rho * l.adjoint() - linalg::anticommutator(&ldl, rho) * c(0.5, 0.0);
    }
    out
}

/// The `D² x D²` matrix of the generator acting on column-stacked states.
pub fn vectorize(gen: &LindbladGenerator) -> CMatrix {
    let d = gen.dim();
    let id = linalg::identity(d);
    // vec(Kρ) = (I ⊗ K) vec ρ and vec(ρK†) = (conj(K) ⊗ I) vec ρ.
    let mut out = linalg::kron(&id, &gen.effective) + linalg::kron(&gen.effective.map(|z| z.conj()), &id);
    for l in &gen.noise_ops {
        out += linalg::kron(&l.map(|z| z.conj()), l);
    }
    out
}

/// Generator of the feedback master equation for measurement operator `m`,
/// feedback Hamiltonian `f` and control Hamiltonian `hc`.
///
/// The result has Hamiltonian `H + Hc + ½(F M + M† F)` and the single noise
/// operator `M - iF`.
pub fn fme_generator(
    space: &TensorSpace,
    h: &CMatrix,
    hc: &CMatrix,
    f: &CMatrix,
    m: &CMatrix,
) -> Result<LindbladGenerator> {
    let d = space.total_dim();
    for (mat, what) in [(h, "H"), (hc, "Hc"), (f, "F")] {
        check_square(mat, d, what)?;
        let deviation = linalg::hermitian_deviation(mat);
        if deviation > tol::HERM {
            return Err(DqlsError::NotHermitian { deviation });
        }
    }
    check_square(m, d, "M")?;
    let total = h + hc + (f * m + m.adjoint() * f) * c(0.5, 0.0);
    let deviation = linalg::hermitian_deviation(&total);
    if deviation > tol::HERM {
        return Err(DqlsError::NotHermitian { deviation });
    }
    let lf = m - f * I;
    LindbladGenerator::new(space.clone(), Some(total), vec![lf])
}

/// `½ ||a - b||₁` for Hermitian arguments.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * linalg::trace_norm_hermitian(&(a - b))
}
