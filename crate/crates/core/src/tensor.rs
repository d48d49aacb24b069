//! Multipartite spaces, states and the tensor algebra on them.
//!
//! Composite indices are big-endian: subsystem 0 is the most significant
//! digit, so `|q0 q1 ... q(n-1)>` sits at `q0 * d1 * ... + ... + q(n-1)`.
//! This makes [`embed`] a permutation-conjugated Kronecker product.

use std::fmt;

use crate::error::{DqlsError, Result};
use crate::linalg::{self, c, CMatrix, CVector, ONE, ZERO};
use crate::tol;

/// Shape of a multipartite Hilbert space: one dimension per subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorSpace {
    dims: Vec<usize>,
    total: usize,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(DqlsError::InvalidSpace("at least one subsystem is required".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(DqlsError::InvalidSpace(format!("subsystem dimension {d} < 2")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| DqlsError::InvalidSpace("total dimension overflows".into()))?;
        Ok(TensorSpace { dims, total })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        TensorSpace::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// Mixed-radix digits of a composite index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&q, &d)| acc * d + q)
    }

    /// The space of the listed subsystems, in the order given.
    pub fn subspace_of(&self, neighborhood: &Neighborhood) -> TensorSpace {
        let dims = neighborhood.indices().iter().map(|&a| self.dims[a]).collect();
        TensorSpace::new(dims).expect("sub-dimensions of a valid space are valid")
    }

    pub fn neighborhood_dim(&self, neighborhood: &Neighborhood) -> usize {
        neighborhood.indices().iter().map(|&a| self.dims[a]).product()
    }
}

impl fmt::Display for TensorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join("x"))
    }
}

/// A normalized state vector on a [`TensorSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: TensorSpace,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(space: TensorSpace, amplitudes: CVector) -> Result<Self> {
        check_len(&space, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tol::NORM {
            return Err(DqlsError::NotNormalized { norm });
        }
        Ok(PureState { space, amplitudes })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(space: TensorSpace, amplitudes: CVector) -> Result<Self> {
        check_len(&space, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(DqlsError::NotNormalized { norm });
        }
        PureState::new(space, amplitudes / c(norm, 0.0))
    }

    pub fn basis(space: TensorSpace, index: usize) -> Result<Self> {
        if index >= space.total_dim() {
            return Err(DqlsError::DimensionMismatch(format!(
                "basis index {index} out of range for dimension {}",
                space.total_dim()
            )));
        }
        let mut amps = CVector::zeros(space.total_dim());
        amps[index] = ONE;
        PureState::new(space, amps)
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> num_complex::Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_with(&self, rho: &CMatrix) -> f64 {
        (self.amplitudes.adjoint() * rho * &self.amplitudes)[(0, 0)].re
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.space.dims.clone();
        dims.extend_from_slice(&other.space.dims);
        let space = TensorSpace::new(dims).expect("concatenated valid dims");
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        PureState { space, amplitudes: amps }
    }
}

fn check_len(space: &TensorSpace, len: usize) -> Result<()> {
    if len != space.total_dim() {
        return Err(DqlsError::DimensionMismatch(format!(
            "{len} amplitudes for a space of dimension {}",
            space.total_dim()
        )));
    }
    Ok(())
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: TensorSpace,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(space: TensorSpace, matrix: CMatrix) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(DqlsError::DimensionMismatch(format!(
                "{}x{} matrix for a space of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > tol::HERM {
            return Err(DqlsError::NotHermitian { deviation });
        }
        let tr = linalg::trace(&matrix);
        if (tr - ONE).norm() > tol::NORM {
            return Err(DqlsError::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min = linalg::eigvalsh(&matrix).first().cloned().unwrap_or(0.0);
        if min < -tol::PSD {
            return Err(DqlsError::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(DensityMatrix { space, matrix })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts(space: TensorSpace, matrix: CMatrix) -> Self {
        DensityMatrix { space, matrix }
    }

    pub fn maximally_mixed(space: TensorSpace) -> Self {
        let d = space.total_dim();
        let matrix = linalg::identity(d) * c(1.0 / d as f64, 0.0);
        DensityMatrix { space, matrix }
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `rho_self ⊗ rho_other` on the concatenated space.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.space.dims.clone();
        dims.extend_from_slice(&other.space.dims);
        DensityMatrix {
            space: TensorSpace::new(dims).expect("concatenated valid dims"),
            matrix: linalg::kron(&self.matrix, &other.matrix),
        }
    }
}

/// A set of subsystem indices, stored sorted without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Neighborhood {
    indices: Vec<usize>,
}

impl Neighborhood {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(DqlsError::InvalidNeighborhood("empty neighborhood".into()));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(DqlsError::InvalidNeighborhood(format!("duplicate index in {indices:?}")));
        }
        Ok(Neighborhood { indices })
    }

    pub fn full(n: usize) -> Self {
        Neighborhood { indices: (0..n).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.indices.binary_search(&a).is_ok()
    }

    pub fn is_disjoint(&self, other: &Neighborhood) -> bool {
        self.indices.iter().all(|a| !other.contains(*a))
    }

    /// Indices of `0..n` outside the neighborhood.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|a| !self.contains(*a)).collect()
    }

    pub fn validate(&self, space: &TensorSpace) -> Result<()> {
        let n = space.num_subsystems();
        if let Some(&a) = self.indices.iter().find(|&&a| a >= n) {
            return Err(DqlsError::InvalidNeighborhood(format!(
                "index {a} out of range for {n} subsystems"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|d| d.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The fixed quasi-locality constraint: neighborhoods on a space.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityPattern {
    space: TensorSpace,
    neighborhoods: Vec<Neighborhood>,
}

impl LocalityPattern {
    pub fn new(space: TensorSpace, neighborhoods: Vec<Neighborhood>) -> Result<Self> {
        if neighborhoods.is_empty() {
            return Err(DqlsError::InvalidNeighborhood("locality pattern has no neighborhoods".into()));
        }
        for nb in &neighborhoods {
            nb.validate(&space)?;
        }
        Ok(LocalityPattern { space, neighborhoods })
    }

    pub fn from_indices(space: TensorSpace, sets: &[Vec<usize>]) -> Result<Self> {
        let neighborhoods = sets.iter().map(|s| Neighborhood::new(s.clone())).collect::<Result<_>>()?;
        LocalityPattern::new(space, neighborhoods)
    }

    /// Sliding windows `{i, ..., i+width-1}` over `n` subsystems.
    pub fn sliding(space: TensorSpace, width: usize) -> Result<Self> {
        let n = space.num_subsystems();
        if width == 0 || width > n {
            return Err(DqlsError::InvalidNeighborhood(format!("window {width} on {n} subsystems")));
        }
        let sets: Vec<Vec<usize>> = (0..=n - width).map(|i| (i..i + width).collect()).collect();
        LocalityPattern::from_indices(space, &sets)
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn neighborhoods(&self) -> &[Neighborhood] {
        &self.neighborhoods
    }

    pub fn len(&self) -> usize {
        self.neighborhoods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighborhoods.is_empty()
    }

    /// Subsystems that no neighborhood touches.
    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.space.num_subsystems())
            .filter(|&a| !self.neighborhoods.iter().any(|nb| nb.contains(a)))
            .collect()
    }

    pub fn warnings(&self) -> Vec<String> {
        let uncovered = self.uncovered();
        if uncovered.is_empty() {
            Vec::new()
        } else {
            vec![format!(
                "subsystems {uncovered:?} are not covered by any neighborhood; an entangled target cannot be stabilized there"
            )]
        }
    }
}

/// An operator acting as `block` on one neighborhood and as the identity on
/// the rest of the system.
#[derive(Debug, Clone, PartialEq)]
pub struct QLOperator {
    neighborhood: Neighborhood,
    block: CMatrix,
}

impl QLOperator {
    pub fn new(space: &TensorSpace, neighborhood: Neighborhood, block: CMatrix) -> Result<Self> {
        neighborhood.validate(space)?;
        let d = space.neighborhood_dim(&neighborhood);
        if block.nrows() != d || block.ncols() != d {
            return Err(DqlsError::DimensionMismatch(format!(
                "{}x{} block on neighborhood {neighborhood} of dimension {d}",
                block.nrows(),
                block.ncols()
            )));
        }
        Ok(QLOperator { neighborhood, block })
    }

    pub fn neighborhood(&self) -> &Neighborhood {
        &self.neighborhood
    }

    pub fn block(&self) -> &CMatrix {
        &self.block
    }
}

/// Index bookkeeping for a split of the subsystems into a kept neighborhood
/// and its complement.
///
/// `full[k * rest_dim + t]` is the composite index whose kept digits read
/// `k` and whose remaining digits read `t`, both big-endian.
#[derive(Debug, Clone)]
pub(crate) struct Bipartition {
    pub keep_dim: usize,
    pub rest_dim: usize,
    pub full: Vec<usize>,
}

impl Bipartition {
    pub fn new(space: &TensorSpace, keep: &Neighborhood) -> Result<Self> {
        keep.validate(space)?;
        let n = space.num_subsystems();
        let rest = keep.complement(n);
        let keep_dim = space.neighborhood_dim(keep);
        let rest_dim: usize = rest.iter().map(|&a| space.dims[a]).product();
        let mut full = vec![0; space.total_dim()];
        for x in 0..space.total_dim() {
            let digits = space.digits(x);
            let k = keep.indices().iter().fold(0, |acc, &a| acc * space.dims[a] + digits[a]);
            let t = rest.iter().fold(0, |acc, &a| acc * space.dims[a] + digits[a]);
            full[k * rest_dim + t] = x;
        }
        Ok(Bipartition { keep_dim, rest_dim, full })
    }

    #[inline]
    pub fn compose(&self, k: usize, t: usize) -> usize {
        self.full[k * self.rest_dim + t]
    }
}

/// Reduced state on `keep`, tracing out the complement.
///
/// The result lives on the kept subsystems in increasing index order.
pub fn partial_trace(rho: &DensityMatrix, keep: &Neighborhood) -> Result<DensityMatrix> {
    let space = rho.space();
    let split = Bipartition::new(space, keep)?;
    let m = rho.matrix();
    let mut out = CMatrix::zeros(split.keep_dim, split.keep_dim);
    for b in 0..split.keep_dim {
        for a in 0..split.keep_dim {
            let mut acc = ZERO;
            for t in 0..split.rest_dim {
                acc += m[(split.compose(a, t), split.compose(b, t))];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::from_parts(space.subspace_of(keep), out))
}

/// Reduced state of a pure state; avoids forming the full `D x D` projector.
pub fn reduced_state(psi: &PureState, keep: &Neighborhood) -> Result<DensityMatrix> {
    let space = psi.space();
    let split = Bipartition::new(space, keep)?;
    // Coefficient matrix C[k, t] = psi[(k, t)], so rho_keep = C C†.
    let amps = psi.amplitudes();
    let coeff = CMatrix::from_fn(split.keep_dim, split.rest_dim, |k, t| amps[split.compose(k, t)]);
    let out = &coeff * coeff.adjoint();
    Ok(DensityMatrix::from_parts(space.subspace_of(keep), out))
}

/// Full-space matrix of a quasi-local operator.
pub fn embed(op: &QLOperator, space: &TensorSpace) -> Result<CMatrix> {
    let d = space.neighborhood_dim(&op.neighborhood);
    op.neighborhood.validate(space)?;
    if op.block.nrows() != d {
        return Err(DqlsError::DimensionMismatch(format!(
            "block dimension {} does not match neighborhood dimension {d}",
            op.block.nrows()
        )));
    }
    let split = Bipartition::new(space, &op.neighborhood)?;
    let total = space.total_dim();
    let mut out = CMatrix::zeros(total, total);
    for b in 0..split.keep_dim {
        for a in 0..split.keep_dim {
            let v = op.block[(a, b)];
            if v == ZERO {
                continue;
            }
            for t in 0..split.rest_dim {
                out[(split.compose(a, t), split.compose(b, t))] = v;
            }
        }
    }
    Ok(out)
}

/// Applies `⊗_a U_a` to a state, one subsystem at a time.
pub fn apply_local_unitary(psi: &PureState, locals: &[CMatrix]) -> Result<PureState> {
    let space = psi.space();
    if locals.len() != space.num_subsystems() {
        return Err(DqlsError::DimensionMismatch(format!(
            "{} local unitaries for {} subsystems",
            locals.len(),
            space.num_subsystems()
        )));
    }
    for (u, &d) in locals.iter().zip(space.dims()) {
        if u.nrows() != d || u.ncols() != d {
            return Err(DqlsError::DimensionMismatch(format!(
                "{}x{} local unitary on a subsystem of dimension {d}",
                u.nrows(),
                u.ncols()
            )));
        }
        let deviation = linalg::max_abs(&(u.adjoint() * u - linalg::identity(d)));
        if deviation > tol::HERM {
            return Err(DqlsError::NotUnitary { deviation });
        }
    }
    let mut amps = psi.amplitudes().clone();
    let total = space.total_dim();
    let mut stride = total;
    for (u, &d) in locals.iter().zip(space.dims()) {
        stride /= d;
        let mut next = CVector::zeros(total);
        for x in 0..total {
            let digit = (x / stride) % d;
            let base = x - digit * stride;
            let mut acc = ZERO;
            for j in 0..d {
                acc += u[(digit, j)] * amps[base + j * stride];
            }
            next[x] = acc;
        }
        amps = next;
    }
    PureState::normalized(space.clone(), amps)
}

/// `(|0...0> + |1...1>) / sqrt(2)` on `n` qubits.
pub fn make_ghz(n: usize) -> Result<PureState> {
    let space = TensorSpace::qubits(n)?;
    let mut amps = CVector::zeros(space.total_dim());
    let a = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = a;
    amps[space.total_dim() - 1] = a;
    PureState::new(space, amps)
}

/// Equal superposition of the `n` weight-one basis states.
pub fn make_w(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(DqlsError::InvalidSpace("W state needs at least 2 qubits".into()));
    }
    let space = TensorSpace::qubits(n)?;
    let mut amps = CVector::zeros(space.total_dim());
    let a = c(1.0 / (n as f64).sqrt(), 0.0);
    for q in 0..n {
        amps[1 << q] = a;
    }
    PureState::new(space, amps)
}

/// Graph state: a controlled-Z on every edge applied to `|+>^n`.
pub fn make_graph_state(n: usize, edges: &[(usize, usize)]) -> Result<PureState> {
    let space = TensorSpace::qubits(n)?;
    let mut seen = std::collections::HashSet::new();
    for &(a, b) in edges {
        if a == b || a >= n || b >= n {
            return Err(DqlsError::InvalidEdge(a, b));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(DqlsError::InvalidEdge(a, b));
        }
    }
    let total = space.total_dim();
    let amp = (total as f64).sqrt().recip();
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let amps = CVector::from_fn(total, |x, _| {
        let parity = edges.iter().filter(|&&(a, b)| bit(x, a) & bit(x, b) == 1).count();
        if parity % 2 == 0 {
            c(amp, 0.0)
        } else {
            c(-amp, 0.0)
        }
    });
    PureState::new(space, amps)
}

/// Edges of the linear chain `0-1-...-(n-1)`.
pub fn chain_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|q| (q - 1, q)).collect()
}

/// For each vertex, the vertex together with its graph neighbors.
pub fn graph_neighborhoods(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    (0..n)
        .map(|v| {
            let mut set = vec![v];
            for &(a, b) in edges {
                if a == v {
                    set.push(b);
                } else if b == v {
                    set.push(a);
                }
            }
            set.sort_unstable();
            set.dedup();
            set
        })
        .collect()
}

/// The 4-qubit equal superposition of the six weight-two basis states.
pub fn make_psi_t() -> Result<PureState> {
    let space = TensorSpace::qubits(4)?;
    let mut amps = CVector::zeros(16);
    let a = c(1.0 / 6f64.sqrt(), 0.0);
    for idx in [3, 5, 6, 9, 10, 12] {
        amps[idx] = a;
    }
    PureState::new(space, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    #[test]
    fn space_validation() {
        assert!(TensorSpace::new(vec![]).is_err());
        assert!(TensorSpace::new(vec![2, 1]).is_err());
        let s = TensorSpace::new(vec![2, 3, 2]).unwrap();
        assert_eq!(s.total_dim(), 12);
        assert_eq!(s.digits(7), vec![1, 0, 1]);
        assert_eq!(s.index(&[1, 2, 1]), 11);
    }

    #[test]
    fn ghz_amplitudes() {
        let g1 = make_ghz(1).unwrap();
        assert!((g1.amplitudes()[0].re - g1.amplitudes()[1].re).abs() < 1e-15);
        let g4 = make_ghz(4).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (i, a) in g4.amplitudes().iter().enumerate() {
            let expect = if i == 0 || i == 15 { r } else { 0.0 };
            assert_eq!(a.re, expect);
        }
    }

    #[test]
    fn w_amplitudes() {
        assert!(make_w(1).is_err());
        let w2 = make_w(2).unwrap();
        assert!((w2.amplitudes()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((w2.amplitudes()[2].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let w4 = make_w(4).unwrap();
        for (i, a) in w4.amplitudes().iter().enumerate() {
            let expect = if [1, 2, 4, 8].contains(&i) { 0.5 } else { 0.0 };
            assert!((a.re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn graph_state_single_edge() {
        let g = make_graph_state(2, &[(0, 1)]).unwrap();
        let expect = [0.5, 0.5, 0.5, -0.5];
        for (a, e) in g.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-15 && a.im == 0.0);
        }
        let plus = make_graph_state(1, &[]).unwrap();
        assert!((plus.amplitudes()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn graph_state_rejects_bad_edges() {
        assert_eq!(make_graph_state(3, &[(1, 1)]), Err(DqlsError::InvalidEdge(1, 1)));
        assert!(make_graph_state(3, &[(0, 1), (1, 0)]).is_err());
        assert!(make_graph_state(3, &[(0, 3)]).is_err());
    }

    /// Oracle: build |+>^n and multiply in explicit CZ diagonals edge by edge.
    #[test]
    fn chain_graph_state_matches_cz_products() {
        let n = 4;
        let edges = chain_edges(n);
        let mut amps = [0.25f64; 16];
        for &(a, b) in &edges {
            for (x, amp) in amps.iter_mut().enumerate() {
                let digits = TensorSpace::qubits(n).unwrap().digits(x);
                if digits[a] == 1 && digits[b] == 1 {
                    *amp = -*amp;
                }
            }
        }
        let g = make_graph_state(n, &edges).unwrap();
        for (x, a) in g.amplitudes().iter().enumerate() {
            assert_eq!(a.re, amps[x]);
        }
    }

    #[test]
    fn psi_t_support_and_w_overlap() {
        let t = make_psi_t().unwrap();
        let nonzero: Vec<usize> =
            t.amplitudes().iter().enumerate().filter(|(_, a)| a.norm() > 0.0).map(|(i, _)| i).collect();
        assert_eq!(nonzero, vec![3, 5, 6, 9, 10, 12]);
        assert!((t.amplitudes().norm() - 1.0).abs() < 1e-15);
        // Disjoint Hamming weights, so the overlap with W(4) vanishes.
        let w = make_w(4).unwrap();
        assert!(t.inner(&w).norm() < 1e-15);
    }

    #[test]
    fn ghz_marginals_are_classical_mixtures() {
        for n in 2..=5 {
            let rho = make_ghz(n).unwrap().density();
            for keep in [vec![0], vec![n - 1], (0..n - 1).collect::<Vec<_>>()] {
                let nb = Neighborhood::new(keep).unwrap();
                let red = partial_trace(&rho, &nb).unwrap();
                let d = red.matrix().nrows();
                let mut expect = CMatrix::zeros(d, d);
                expect[(0, 0)] = c(0.5, 0.0);
                expect[(d - 1, d - 1)] = c(0.5, 0.0);
                assert!(linalg::max_abs(&(red.matrix() - expect)) < 1e-15);
            }
        }
    }

    #[test]
    fn partial_trace_of_product_returns_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random::random_density(&TensorSpace::new(vec![3]).unwrap(), 3, &mut rng);
        let b = random::random_density(&TensorSpace::new(vec![2, 2]).unwrap(), 2, &mut rng);
        let ab = a.tensor(&b);
        let red = partial_trace(&ab, &Neighborhood::new(vec![0]).unwrap()).unwrap();
        assert!(linalg::max_abs(&(red.matrix() - a.matrix())) < 1e-14);
        let red_b = partial_trace(&ab, &Neighborhood::new(vec![1, 2]).unwrap()).unwrap();
        assert!(linalg::max_abs(&(red_b.matrix() - b.matrix())) < 1e-14);
    }

    #[test]
    fn reduced_state_agrees_with_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let space = TensorSpace::new(vec![2, 3, 2]).unwrap();
        let psi = random::haar_state(&space, &mut rng);
        let nb = Neighborhood::new(vec![0, 2]).unwrap();
        let a = partial_trace(&psi.density(), &nb).unwrap();
        let b = reduced_state(&psi, &nb).unwrap();
        assert!(linalg::max_abs(&(a.matrix() - b.matrix())) < 1e-15);
    }

    #[test]
    fn embed_identity_and_z_placement() {
        let space = TensorSpace::qubits(2).unwrap();
        let id = QLOperator::new(&space, Neighborhood::new(vec![1]).unwrap(), linalg::identity(2)).unwrap();
        assert_eq!(embed(&id, &space).unwrap(), linalg::identity(4));
        let z = QLOperator::new(&space, Neighborhood::new(vec![1]).unwrap(), pauli_z()).unwrap();
        let full = embed(&z, &space).unwrap();
        let expect = [1.0, -1.0, 1.0, -1.0];
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { expect[i] } else { 0.0 };
                assert_eq!(full[(i, j)], c(e, 0.0));
            }
        }
    }

    /// Oracle: <x|embed(A)|y> = A[x_N, y_N] * prod_{a not in N} delta(x_a, y_a).
    #[test]
    fn embed_non_contiguous_matches_elementwise_oracle() {
        let space = TensorSpace::qubits(3).unwrap();
        let block = linalg::kron(&pauli_x(), &pauli_x());
        let op = QLOperator::new(&space, Neighborhood::new(vec![0, 2]).unwrap(), block.clone()).unwrap();
        let full = embed(&op, &space).unwrap();
        for x in 0..8 {
            for y in 0..8 {
                let dx = space.digits(x);
                let dy = space.digits(y);
                let expect = if dx[1] == dy[1] {
                    block[(dx[0] * 2 + dx[2], dy[0] * 2 + dy[2])]
                } else {
                    ZERO
                };
                assert_eq!(full[(x, y)], expect);
            }
        }
    }

    #[test]
    fn block_dimension_is_checked() {
        let space = TensorSpace::new(vec![2, 3]).unwrap();
        let nb = Neighborhood::new(vec![1]).unwrap();
        assert!(matches!(
            QLOperator::new(&space, nb, linalg::identity(2)),
            Err(DqlsError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn local_unitaries() {
        let zero = PureState::basis(TensorSpace::qubits(1).unwrap(), 0).unwrap();
        let flipped = apply_local_unitary(&zero, &[pauli_x()]).unwrap();
        assert_eq!(flipped.amplitudes()[1], ONE);
        let g = make_ghz(3).unwrap();
        let same = apply_local_unitary(&g, &vec![linalg::identity(2); 3]).unwrap();
        assert_eq!(same, g);
        let not_unitary = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            apply_local_unitary(&zero, &[not_unitary]),
            Err(DqlsError::NotUnitary { .. })
        ));
    }

    #[test]
    fn local_unitary_matches_kronecker_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let space = TensorSpace::new(vec![2, 3]).unwrap();
        let psi = random::haar_state(&space, &mut rng);
        let u0 = random::haar_unitary(2, &mut rng);
        let u1 = random::haar_unitary(3, &mut rng);
        let out = apply_local_unitary(&psi, &[u0.clone(), u1.clone()]).unwrap();
        let expect = linalg::kron(&u0, &u1) * psi.amplitudes();
        assert!((out.amplitudes() - expect).norm() < 1e-14);
    }

    #[test]
    fn pattern_coverage_warning() {
        let space = TensorSpace::qubits(3).unwrap();
        let p = LocalityPattern::from_indices(space.clone(), &[vec![0, 1]]).unwrap();
        assert_eq!(p.uncovered(), vec![2]);
        assert_eq!(p.warnings().len(), 1);
        assert!(LocalityPattern::from_indices(space.clone(), &[]).is_err());
        assert!(LocalityPattern::from_indices(space, &[vec![0, 3]]).is_err());
        assert!(Neighborhood::new(vec![1, 1]).is_err());
    }
}
