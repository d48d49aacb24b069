//! Explicit neighborhood-local noise operators that stabilize the reduced
//! supports of a target state.
//!
//! For a support of dimension `s` inside a neighborhood factor of dimension
//! `d = s + r`, the operator is written in the basis (support frame, then
//! complement frame) as
//!
//! ```text
//!   [ 0 | D_P ]      D_P: s x r, single gain g1 in its bottom-left corner
//!   [ 0 | D_R ]      D_R: r x r, superdiagonal shift with gains g2..gr
//! ```
//!
//! so each complement vector is pushed one step down a chain that ends in
//! the support, and the support is the only invariant subspace.

use std::str::FromStr;

use crate::analysis;
use crate::dynamics::{LindbladGenerator, SwitchingSchedule};
use crate::error::{DqlsError, Result};
use crate::linalg::{self, c, CMatrix, ZERO};
use crate::subspace::{self, Subspace};
use crate::tensor::{self, LocalityPattern, PureState, QLOperator, TensorSpace};
use crate::tol;

/// How the chain gains are chosen for each operator.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum GainsPolicy {
    /// Every gain equal to one.
    #[default]
    Uniform,
    /// Gain `i` on the `i`-th link (1-based), which breaks spectral degeneracy.
    Graded,
}

impl GainsPolicy {
    pub fn gains(&self, count: usize) -> Vec<f64> {
        match self {
            GainsPolicy::Uniform => vec![1.0; count],
            GainsPolicy::Graded => (1..=count).map(|i| i as f64).collect(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GainsPolicy::Uniform => "uniform",
            GainsPolicy::Graded => "graded",
        }
    }
}

impl FromStr for GainsPolicy {
    type Err = DqlsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GainsPolicy::Uniform),
            "graded" => Ok(GainsPolicy::Graded),
            other => Err(DqlsError::InvalidArgument(format!("unknown gains policy {other:?}"))),
        }
    }
}

/// One stabilizing operator per neighborhood.
#[derive(Debug, Clone)]
pub struct StabilizerSet {
    pub operators: Vec<QLOperator>,
    /// Gains used for each operator; empty for a zero operator.
    pub gains: Vec<Vec<f64>>,
    /// Unitary whose columns are the support frame followed by the
    /// complement frame, per operator.
    pub bases: Vec<CMatrix>,
    /// Dimension of the stabilized support, per operator.
    pub support_dims: Vec<usize>,
    pub warnings: Vec<String>,
}

impl StabilizerSet {
    pub fn embedded(&self, space: &TensorSpace) -> Result<Vec<CMatrix>> {
        self.operators.iter().map(|op| tensor::embed(op, space)).collect()
    }

    /// All operators acting simultaneously.
    pub fn generator(&self, space: &TensorSpace) -> Result<LindbladGenerator> {
        LindbladGenerator::new(space.clone(), None, self.embedded(space)?)
    }

    /// One single-operator generator per neighborhood, cycled every `tau`.
    pub fn schedule(&self, space: &TensorSpace, tau: f64) -> Result<SwitchingSchedule> {
        let generators = self
            .embedded(space)?
            .into_iter()
            .map(|op| LindbladGenerator::new(space.clone(), None, vec![op]))
            .collect::<Result<Vec<_>>>()?;
        SwitchingSchedule::new(tau, generators)
    }

    /// `||D_k |Ψ>||` for each operator.
    pub fn residuals(&self, psi: &PureState) -> Result<Vec<f64>> {
        self.embedded(psi.space())?
            .iter()
            .map(|d| Ok((d * psi.amplitudes()).norm()))
            .collect()
    }
}

/// Support frame followed by its deterministic orthonormal completion.
pub fn synthesis_basis(support: &Subspace) -> CMatrix {
    let comp = subspace::complement(support);
    let cols: Vec<_> = support.frame().column_iter().chain(comp.frame().column_iter()).collect();
    CMatrix::from_columns(&cols)
}

/// The chain operator in the synthesis basis, for a support of dimension
/// `support_dim` in a space of dimension `support_dim + gains.len()`.
pub fn canonical_block(support_dim: usize, gains: &[f64]) -> CMatrix {
    assert!(support_dim >= 1, "the chain must end in a nonzero support");
    let d = support_dim + gains.len();
    let mut m = CMatrix::zeros(d, d);
    for (i, &g) in gains.iter().enumerate() {
        // Link i maps complement vector i onto the previous vector of the chain.
        m[(support_dim + i - 1, support_dim + i)] = c(g, 0.0);
    }
    m
}

/// Liouvillian spectrum of a single chain block: `-(g_i + g_j)/2` over all
/// ordered index pairs, with `g = (0, ..., 0, ℓ_1², ℓ_2², ...)` the diagonal
/// of `D†D`. Sorted descending.
pub fn predicted_block_spectrum(support_dim: usize, gains: &[f64]) -> Vec<f64> {
    let g: Vec<f64> = std::iter::repeat_n(0.0, support_dim).chain(gains.iter().map(|l| l * l)).collect();
    let mut out: Vec<f64> = g.iter().flat_map(|a| g.iter().map(move |b| -(a + b) / 2.0)).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

fn validate_gains(gains: &[f64], expected: usize) -> Result<()> {
    if gains.len() != expected {
        return Err(DqlsError::InvalidGains(format!("{} gains for a complement of dimension {expected}", gains.len())));
    }
    if let Some(g) = gains.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(DqlsError::InvalidGains(format!("gain {g} is not a positive finite number")));
    }
    Ok(())
}

/// Chain operator stabilizing `target_support`, in the computational basis.
pub fn synthesize_block(target_support: &Subspace, gains: &[f64]) -> Result<CMatrix> {
    let d = target_support.ambient_dim();
    let s = target_support.dim();
    if s == 0 {
        return Err(DqlsError::InvalidArgument("cannot stabilize the zero subspace".into()));
    }
    if s == d {
        return Err(DqlsError::FullSupport);
    }
    validate_gains(gains, d - s)?;
    let basis = synthesis_basis(target_support);
    Ok(&basis * canonical_block(s, gains) * basis.adjoint())
}

/// Builds one stabilizing operator per neighborhood of `pattern`.
///
/// Refuses non-stabilizable targets unless `force` is set. A neighborhood
/// whose reduced state has full support contributes the zero operator.
pub fn synthesize_stabilizers(
    psi: &PureState,
    pattern: &LocalityPattern,
    policy: &GainsPolicy,
    rel_tol: f64,
    force: bool,
) -> Result<StabilizerSet> {
    let report = analysis::check_dqls(psi, pattern, rel_tol)?;
    let mut warnings = report.warnings.clone();
    if !report.verdict {
        if !force {
            return Err(DqlsError::NotDqls { intersection_dim: report.intersection.dim() });
        }
        warnings.push(format!(
            "target is not DQLS (intersection dimension {}); the synthesized dynamics has more than one invariant state",
            report.intersection.dim()
        ));
    }
    let space = psi.space();
    let mut set = StabilizerSet {
        operators: Vec::new(),
        gains: Vec::new(),
        bases: Vec::new(),
        support_dims: Vec::new(),
        warnings,
    };
    for a in &report.per_neighborhood {
        let d = a.support.ambient_dim();
        let s = a.support.dim();
        let basis = synthesis_basis(&a.support);
        let (block, gains) = if s == d {
            set.warnings.push(format!(
                "reduced state on {} has full support; that neighborhood contributes the zero operator",
                a.neighborhood
            ));
            (CMatrix::zeros(d, d), Vec::new())
        } else {
            let gains = policy.gains(d - s);
            validate_gains(&gains, d - s)?;
            (&basis * canonical_block(s, &gains) * basis.adjoint(), gains)
        };
        set.operators.push(QLOperator::new(space, a.neighborhood.clone(), block)?);
        set.gains.push(gains);
        set.bases.push(basis);
        set.support_dims.push(s);
    }
    Ok(set)
}

/// Shifts every noise operator so that `psi` becomes a dark state, with a
/// Hamiltonian correction that leaves the generator unchanged.
///
/// With `l_k = <Ψ|L_k|Ψ>` the new operators are `L_k - l_k I` and the new
/// Hamiltonian is `H + (i/2) Σ_k (conj(l_k) L_k - l_k L_k†)`. The factor
/// 1/2 is the one for which the generator is invariant; a unit factor in
/// front of the sum changes the dynamics whenever some `l_k` is nonzero.
pub fn renormalize_generator(h: &CMatrix, ls: &[CMatrix], psi: &PureState) -> Result<(CMatrix, Vec<CMatrix>)> {
    let d = psi.space().total_dim();
    if h.nrows() != d || h.ncols() != d {
        return Err(DqlsError::DimensionMismatch(format!("{}x{} Hamiltonian on dimension {d}", h.nrows(), h.ncols())));
    }
    let deviation = linalg::hermitian_deviation(h);
    if deviation > tol::HERM {
        return Err(DqlsError::NotHermitian { deviation });
    }
    let v = psi.amplitudes();
    let mut new_h = h.clone();
    let mut new_ls = Vec::with_capacity(ls.len());
    for (index, l) in ls.iter().enumerate() {
        if l.nrows() != d || l.ncols() != d {
            return Err(DqlsError::DimensionMismatch(format!(
                "{}x{} noise operator on dimension {d}",
                l.nrows(),
                l.ncols()
            )));
        }
        let lv = l * v;
        let ell = v.dotc(&lv);
        let residual = (&lv - v * ell).norm();
        if residual > tol::HERM * linalg::frobenius(l).max(1.0) {
            return Err(DqlsError::NotCommonEigenvector { index, residual });
        }
        if ell == ZERO {
            new_ls.push(l.clone());
            continue;
        }
        new_h += (l * ell.conj() - l.adjoint() * ell) * c(0.0, 0.5);
        new_ls.push(l - linalg::identity(d) * ell);
    }
    // Restore exact Hermiticity lost to rounding.
    new_h = (&new_h + new_h.adjoint()) * c(0.5, 0.0);
    Ok((new_h, new_ls))
}
