//! Seeded random states, unitaries and operators.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, CMatrix, CVector};
use crate::tensor::{DensityMatrix, PureState, TensorSpace};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // Fill in column-major order so the stream does not depend on nalgebra internals.
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

/// Haar-uniform pure state: a normalized complex Gaussian vector.
pub fn haar_state<R: Rng + ?Sized>(space: &TensorSpace, rng: &mut R) -> PureState {
    let d = space.total_dim();
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    PureState::normalized(space.clone(), v).expect("Gaussian vector is nonzero")
}

/// Wishart-style mixed state `G G† / tr(G G†)` with `G` of shape `D x rank`.
pub fn random_density<R: Rng + ?Sized>(space: &TensorSpace, rank: usize, rng: &mut R) -> DensityMatrix {
    let d = space.total_dim();
    let g = ginibre(d, rank.max(1), rng);
    let w = &g * g.adjoint();
    let tr = crate::linalg::trace(&w).re;
    let mut m = w / c(tr, 0.0);
    // Symmetrize away rounding so the Hermiticity invariant holds exactly.
    m = (&m + m.adjoint()) * c(0.5, 0.0);
    DensityMatrix::new(space.clone(), m).expect("Wishart matrices are valid states")
}

/// Haar-random unitary from the phase-corrected QR of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// One Haar unitary per subsystem.
pub fn local_unitaries<R: Rng + ?Sized>(space: &TensorSpace, rng: &mut R) -> Vec<CMatrix> {
    space.dims().iter().map(|&d| haar_unitary(d, rng)).collect()
}
