use super::LindbladGenerator;
use crate::linalg::{self, c, CMatrix, I};
use crate::tensor::PureState;

const INVARIANCE_TOL: f64 = 1e-9;

/// Outcome of the two independent invariance tests for `|Ψ><Ψ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// Block route: every `L_k` maps `|Ψ>` into span{|Ψ>} and
    /// `i H_P - ½ Σ conj(L_S,k) L_P,k = 0`.
    pub block_route: bool,
    /// Residual route: `||L(|Ψ><Ψ|)|| ≈ 0`.
    pub residual_route: bool,
    /// Largest norm of a lower-left block column `L_Q,k`.
    pub lower_left_norm: f64,
    pub hamiltonian_condition_norm: f64,
    pub generator_residual: f64,
    pub diagnostics: Vec<String>,
}

pub fn check_invariance(gen: &LindbladGenerator, psi: &PureState) -> InvarianceReport {
    let d = gen.dim();
    let v = psi.amplitudes();
    let frame = CMatrix::from_column_slice(d, 1, v.as_slice());
    let comp = linalg::orthonormal_completion(&frame);

    // Blocks relative to H_S ⊕ H_S^⊥.
    let mut lower_left_norm: f64 = 0.0;
    let mut condition = CMatrix::zeros(1, comp.ncols());
    if let Some(h) = gen.hamiltonian() {
        let h_p = v.adjoint() * h * &comp;
        condition += h_p * I;
    }
    for l in gen.noise_ops() {
        let lv = l * v;
        let l_s = v.dotc(&lv);
        let l_q = comp.adjoint() * &lv;
        lower_left_norm = lower_left_norm.max(l_q.norm());
        let l_p = v.adjoint() * l * &comp;
        condition -= l_p * (l_s.conj() * c(0.5, 0.0));
    }
    let hamiltonian_condition_norm = linalg::frobenius(&condition);
    let block_route = lower_left_norm <= INVARIANCE_TOL && hamiltonian_condition_norm <= INVARIANCE_TOL;

    let generator_residual = linalg::frobenius(&gen.apply(&psi.projector()));
    let residual_route = generator_residual <= INVARIANCE_TOL;

    let mut diagnostics = Vec::new();
    if block_route != residual_route {
        diagnostics.push(format!(
            "invariance routes disagree: block conditions ({lower_left_norm:.3e}, {hamiltonian_condition_norm:.3e}) vs generator residual {generator_residual:.3e}"
        ));
    }
    InvarianceReport {
        invariant: block_route && residual_route,
        block_route,
        residual_route,
        lower_left_norm,
        hamiltonian_condition_norm,
        generator_residual,
        diagnostics,
    }
}
