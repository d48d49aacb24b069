//! Stabilizability decision, parent Hamiltonians and frustration-freeness.
//!
//! A pure target `|Ψ>` is stabilizable by neighborhood-local dissipation iff
//! the span of `|Ψ>` equals the intersection over neighborhoods `N_k` of the
//! supports of `ρ_{N_k} ⊗ I`, where `ρ_{N_k}` is the reduced state of the
//! target on `N_k`. [`check_dqls`] evaluates exactly that test.

use rayon::prelude::*;

use crate::error::{DqlsError, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::subspace::{self, RankDiagnostic, Subspace};
use crate::tensor::{self, DensityMatrix, LocalityPattern, Neighborhood, PureState, QLOperator, TensorSpace};
use crate::tol;

/// Per-neighborhood data gathered by [`check_dqls`].
#[derive(Debug, Clone)]
pub struct NeighborhoodAnalysis {
    pub neighborhood: Neighborhood,
    pub reduced: DensityMatrix,
    /// Support of the reduced state, on the neighborhood factor.
    pub support: Subspace,
    pub diagnostic: RankDiagnostic,
}

#[derive(Debug, Clone)]
pub struct DqlsReport {
    pub verdict: bool,
    /// Set when a rank decision was within the borderline band and the
    /// verdict was forced to `false`.
    pub indeterminate: bool,
    pub intersection: Subspace,
    pub intersection_diagnostic: RankDiagnostic,
    /// Spectral-norm distance between the intersection and span{|Ψ>}.
    pub target_distance: f64,
    /// Residual of `|Ψ>` against the intersection; always ~0.
    pub containment_residual: f64,
    pub per_neighborhood: Vec<NeighborhoodAnalysis>,
    pub warnings: Vec<String>,
}

fn check_same_space(psi: &PureState, pattern: &LocalityPattern) -> Result<()> {
    if psi.space() != pattern.space() {
        return Err(DqlsError::DimensionMismatch(format!(
            "state on {} but locality pattern on {}",
            psi.space(),
            pattern.space()
        )));
    }
    Ok(())
}

fn analyze_neighborhoods(
    psi: &PureState,
    pattern: &LocalityPattern,
    rel_tol: f64,
) -> Result<Vec<NeighborhoodAnalysis>> {
    pattern
        .neighborhoods()
        .par_iter()
        .map(|nb| {
            let reduced = tensor::reduced_state(psi, nb)?;
            let (support, diagnostic) = subspace::support_of(reduced.matrix(), rel_tol)?;
            Ok(NeighborhoodAnalysis { neighborhood: nb.clone(), reduced, support, diagnostic })
        })
        .collect()
}

/// Decides whether `psi` is dissipatively quasi-locally stabilizable under
/// `pattern`. `rel_tol` is the relative support threshold.
pub fn check_dqls(psi: &PureState, pattern: &LocalityPattern, rel_tol: f64) -> Result<DqlsReport> {
    check_same_space(psi, pattern)?;
    let space = psi.space();
    let mut warnings = pattern.warnings();

    let per_neighborhood = analyze_neighborhoods(psi, pattern, rel_tol)?;
    let embedded = per_neighborhood
        .iter()
        .map(|a| subspace::embed_subspace(&a.support, space, &a.neighborhood))
        .collect::<Result<Vec<_>>>()?;
    let (intersection, intersection_diagnostic) = subspace::intersect_with_diagnostics(&embedded)?;

    let target = Subspace::span_of(psi.amplitudes())?;
    let target_distance = subspace::distance(&intersection, &target)?;
    let containment_residual = intersection.residual(psi.amplitudes());
    if containment_residual > tol::EIG {
        warnings.push(format!(
            "target lies outside the computed intersection (residual {containment_residual:.3e}); rank decisions are unreliable"
        ));
    }

    let mut verdict = intersection.dim() == 1 && target_distance <= tol::ORTH;
    let mut indeterminate = false;
    for a in &per_neighborhood {
        if a.diagnostic.is_borderline() {
            warnings.push(format!(
                "support rank on {} is borderline: eigenvalues {:?} near cutoff {:.3e}",
                a.neighborhood, a.diagnostic.borderline, a.diagnostic.cutoff
            ));
            indeterminate = true;
        }
    }
    if intersection_diagnostic.is_borderline() {
        warnings.push(format!(
            "intersection rank is borderline: eigenvalues {:?} near cutoff {:.3e}",
            intersection_diagnostic.borderline, intersection_diagnostic.cutoff
        ));
        indeterminate = true;
    }
    if indeterminate && verdict {
        warnings.push("borderline rank decision; verdict resolved to false".into());
        verdict = false;
    }

    Ok(DqlsReport {
        verdict,
        indeterminate,
        intersection,
        intersection_diagnostic,
        target_distance,
        containment_residual,
        per_neighborhood,
        warnings,
    })
}

/// Sum of neighborhood projectors onto the orthogonal complements of the
/// reduced-state supports.
#[derive(Debug, Clone)]
pub struct ParentHamiltonian {
    pub terms: Vec<QLOperator>,
    pub total: CMatrix,
}

impl ParentHamiltonian {
    /// Kernel of the total, with eigenvalues below [`tol::EIG`] taken as zero.
    pub fn kernel(&self) -> (Subspace, RankDiagnostic) {
        subspace::kernel_of_psd(&self.total, tol::EIG)
    }

    pub fn spectrum(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.total)
    }
}

pub fn parent_hamiltonian(psi: &PureState, pattern: &LocalityPattern, rel_tol: f64) -> Result<ParentHamiltonian> {
    check_same_space(psi, pattern)?;
    let space = psi.space();
    let per_neighborhood = analyze_neighborhoods(psi, pattern, rel_tol)?;
    let mut terms = Vec::with_capacity(per_neighborhood.len());
    let mut total = CMatrix::zeros(space.total_dim(), space.total_dim());
    for a in per_neighborhood {
        let block = subspace::complement(&a.support).projector();
        let term = QLOperator::new(space, a.neighborhood, block)?;
        total += tensor::embed(&term, space)?;
        terms.push(term);
    }
    Ok(ParentHamiltonian { terms, total })
}

/// True iff `psi` minimizes every term separately.
///
/// The expectation of an embedded term equals `tr(H_k ρ_{N_k})` and its
/// minimum eigenvalue equals that of the block, so neither the embedded
/// matrices nor their spectra are formed.
pub fn is_frustration_free(psi: &PureState, terms: &[QLOperator]) -> Result<bool> {
    let space = psi.space();
    for term in terms {
        let deviation = linalg::hermitian_deviation(term.block());
        if deviation > tol::HERM {
            return Err(DqlsError::NotHermitian { deviation });
        }
        term.neighborhood().validate(space)?;
        if term.block().nrows() != space.neighborhood_dim(term.neighborhood()) {
            return Err(DqlsError::DimensionMismatch(format!(
                "term on {} does not fit {}",
                term.neighborhood(),
                space
            )));
        }
    }
    for term in terms {
        let reduced = tensor::reduced_state(psi, term.neighborhood())?;
        let expectation = linalg::trace(&(term.block() * reduced.matrix())).re;
        let min = linalg::eigvalsh(term.block())[0];
        if (expectation - min).abs() > tol::EIG {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finest tensor-product decomposition of `psi` across disjoint subsystem
/// sets, ordered by smallest subsystem index.
///
/// A set splits off iff its reduced state is pure. Factors carry their
/// own space (the listed subsystems in increasing order); the global phase
/// is absorbed into the first factor so the product reproduces `psi`.
pub fn factorization_prereduction(psi: &PureState) -> Result<Vec<(Vec<usize>, PureState)>> {
    let mut factors = Vec::new();
    let all: Vec<usize> = (0..psi.space().num_subsystems()).collect();
    split_recursive(all, psi.clone(), &mut factors)?;
    factors.sort_by(|a, b| a.0[0].cmp(&b.0[0]));

    let space = psi.space();
    let product = CVector::from_fn(space.total_dim(), |x, _| {
        let digits = space.digits(x);
        factors.iter().fold(linalg::ONE, |acc, (set, f)| {
            let local: Vec<usize> = set.iter().map(|&a| digits[a]).collect();
            acc * f.amplitudes()[f.space().index(&local)]
        })
    });
    let overlap = product.dotc(psi.amplitudes());
    if overlap.norm() > 0.0 {
        let phase = overlap / overlap.norm();
        let (set, first) = factors.remove(0);
        let rotated = PureState::normalized(first.space().clone(), first.amplitudes() * phase)?;
        factors.insert(0, (set, rotated));
    }
    Ok(factors)
}

fn split_recursive(indices: Vec<usize>, state: PureState, out: &mut Vec<(Vec<usize>, PureState)>) -> Result<()> {
    let m = indices.len();
    if m == 1 {
        out.push((indices, state));
        return Ok(());
    }
    // Smallest subset containing local position 0 with a pure marginal.
    let mut masks: Vec<u64> = (1u64..(1u64 << m) - 1).filter(|mask| mask & 1 == 1).collect();
    masks.sort_by_key(|mask| (mask.count_ones(), *mask));
    for mask in masks {
        let keep: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).collect();
        let rest: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 0).collect();
        let keep_nb = Neighborhood::new(keep.clone())?;
        let reduced = tensor::reduced_state(&state, &keep_nb)?;
        if 1.0 - reduced.purity() > tol::PSD {
            continue;
        }
        let keep_state = dominant_state(&reduced)?;
        let rest_nb = Neighborhood::new(rest.clone())?;
        let rest_state = dominant_state(&tensor::reduced_state(&state, &rest_nb)?)?;
        out.push((keep.iter().map(|&b| indices[b]).collect(), keep_state));
        return split_recursive(rest.iter().map(|&b| indices[b]).collect(), rest_state, out);
    }
    out.push((indices, state));
    Ok(())
}

fn dominant_state(rho: &DensityMatrix) -> Result<PureState> {
    let (_, vectors) = linalg::eigh(rho.matrix());
    let top = vectors.column(vectors.ncols() - 1).into_owned();
    // Fix the phase so the largest-modulus amplitude is real positive.
    let (pivot, _) = top
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (i, z)| if z.norm() > best.1 + 1e-12 { (i, z.norm()) } else { best });
    let phase = top[pivot].conj() / top[pivot].norm();
    PureState::normalized(rho.space().clone(), top * phase)
}

/// Convenience: the full neighborhood `{0, ..., n-1}` as a one-element pattern.
pub fn trivial_pattern(space: &TensorSpace) -> LocalityPattern {
    LocalityPattern::new(space.clone(), vec![Neighborhood::full(space.num_subsystems())])
        .expect("full neighborhood is valid")
}
