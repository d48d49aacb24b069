//! Dense complex linear algebra shared by every module.
//!
//! Everything here works on column-major `nalgebra` matrices of `Complex64`.
//! Density matrices are vectorized by column stacking, which is also the
//! native storage order, so [`stack`] and [`unstack`] are plain copies.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{DqlsError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Kronecker product `a ⊗ b`, with `a` on the most significant index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigen-decomposition of the Hermitian part of `m`, sorted ascending.
///
/// Returns the eigenvalues and a matrix whose columns are the matching
/// orthonormal eigenvectors.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().cloned().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues of a general square complex matrix.
///
/// Householder reduction to Hessenberg form followed by single-shift
/// implicit QR with Wilkinson shifts, the conservative small-subdiagonal
/// test of Ahues and Tisseur, and exceptional shifts after 10 and 20
/// stalled iterations.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(DqlsError::DimensionMismatch(format!("eigenvalues of a {}x{} matrix", n, m.ncols())));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(DqlsError::Eigensolver("matrix has non-finite entries".into()));
    }
    let mut h = m.clone().hessenberg().h();
    let mut eigs = vec![ZERO; n];
    hessenberg_qr(&mut h, &mut eigs)?;
    Ok(eigs)
}

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

fn hessenberg_qr(h: &mut CMatrix, eigs: &mut [Complex64]) -> Result<()> {
    let n = h.nrows();
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let itmax = 30 * n.max(10);
    let mut ihi = n as isize - 1;
    while ihi >= 0 {
        let hi = ihi as usize;
        let mut converged = false;
        for its in 0..=itmax {
            let mut l = hi;
            while l > 0 {
                let sub = h[(l, l - 1)];
                if cabs1(sub) <= smlnum {
                    break;
                }
                let mut tst = cabs1(h[(l - 1, l - 1)]) + cabs1(h[(l, l)]);
                if tst == 0.0 {
                    if l >= 2 {
                        tst += h[(l - 1, l - 2)].re.abs();
                    }
                    if l < hi {
                        tst += h[(l + 1, l)].re.abs();
                    }
                }
                if cabs1(sub) <= ulp * tst {
                    let ab = cabs1(sub).max(cabs1(h[(l - 1, l)]));
                    let ba = cabs1(sub).min(cabs1(h[(l - 1, l)]));
                    let diff = h[(l - 1, l - 1)] - h[(l, l)];
                    let aa = cabs1(h[(l, l)]).max(cabs1(diff));
                    let bb = cabs1(h[(l, l)]).min(cabs1(diff));
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                l -= 1;
            }
            if l > 0 {
                h[(l, l - 1)] = ZERO;
            }
            if l == hi {
                eigs[hi] = h[(hi, hi)];
                converged = true;
                break;
            }
            if its == itmax {
                break;
            }

            let shift = if its == 10 {
                h[(l, l)] + c(0.75 * h[(l + 1, l)].re.abs(), 0.0)
            } else if its == 20 {
                h[(hi, hi)] + c(0.75 * h[(hi, hi - 1)].re.abs(), 0.0)
            } else {
                wilkinson_shift(h, hi)
            };

            for k in l..hi {
                let (a, b) = if k == l { (h[(l, l)] - shift, h[(l + 1, l)]) } else { (h[(k, k - 1)], h[(k + 1, k - 1)]) };
                let (cs, sn) = givens(a, b);
                let first_col = if k == l { l } else { k - 1 };
                for j in first_col..=hi {
                    let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                    h[(k, j)] = x * cs + sn * y;
                    h[(k + 1, j)] = y * cs - sn.conj() * x;
                }
                if k > l {
                    h[(k + 1, k - 1)] = ZERO;
                }
                for i in l..=(k + 2).min(hi) {
                    let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                    h[(i, k)] = x * cs + y * sn.conj();
                    h[(i, k + 1)] = y * cs - x * sn;
                }
            }
        }
        if !converged {
            return Err(DqlsError::Eigensolver(format!("QR iteration stalled at index {hi} of {n}")));
        }
        ihi -= 1;
    }
    Ok(())
}

fn wilkinson_shift(h: &CMatrix, hi: usize) -> Complex64 {
    let mut t = h[(hi, hi)];
    let u = h[(hi - 1, hi)].sqrt() * h[(hi, hi - 1)].sqrt();
    let s = cabs1(u);
    if s != 0.0 {
        let x = (h[(hi - 1, hi - 1)] - t) * 0.5;
        let sx = cabs1(x);
        let s = s.max(sx);
        let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
        if sx > 0.0 {
            let xs = x / sx;
            if xs.re * y.re + xs.im * y.im < 0.0 {
                y = -y;
            }
        }
        t -= u * (u / (x + y));
    }
    t
}

/// `(c, s)` with real `c` such that `[c s; -conj(s) c] [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let rho = a.norm().hypot(b.norm());
    if rho == 0.0 {
        return (1.0, ZERO);
    }
    if a.norm() == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    let phase = a / a.norm();
    (a.norm() / rho, phase * b.conj() / rho)
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    eigvalsh(m).iter().map(|v| v.abs()).sum()
}

/// Right singular vectors ordered by increasing singular value.
pub fn smallest_singular_vectors(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let values = order.iter().map(|&k| svd.singular_values[k]).collect();
    let vectors = CMatrix::from_fn(n, order.len(), |i, j| v_t[(order[j], i)].conj());
    (values, vectors)
}

/// Column-stacking vectorization.
pub fn stack(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

/// Inverse of [`stack`] for a `d x d` matrix.
pub fn unstack(v: &CVector, d: usize) -> CMatrix {
    assert_eq!(v.len(), d * d, "vector length is not a square");
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Completes the orthonormal columns of `frame` to an orthonormal basis of
/// the ambient space.
///
/// Candidates are the computational basis vectors in order, each
/// orthogonalized twice against the frame built so far; candidates whose
/// remainder is too small are skipped. The output only depends on the input
/// bits, so it is reproducible across runs.
pub fn orthonormal_completion(frame: &CMatrix) -> CMatrix {
    let n = frame.nrows();
    let target = n - frame.ncols();
    let mut basis: Vec<CVector> = frame.column_iter().map(|col| col.into_owned()).collect();
    let mut extra: Vec<CVector> = Vec::with_capacity(target);
    for k in 0..n {
        if extra.len() == target {
            break;
        }
        let mut v = CVector::zeros(n);
        v[k] = ONE;
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = b.dotc(&v);
                v.axpy(-proj, b, ONE);
            }
        }
        let norm = v.norm();
        // Any remainder below this is a candidate already spanned by the frame.
        if norm > 1e-6 {
            v /= c(norm, 0.0);
            basis.push(v.clone());
            extra.push(v);
        }
    }
    debug_assert_eq!(extra.len(), target);
    columns_to_matrix(n, &extra)
}

pub fn columns_to_matrix(rows: usize, cols: &[CVector]) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        m.set_column(j, col);
    }
    m
}

/// Matrix exponential by scaling and squaring around a diagonal Padé
/// approximant (degree 3 to 13, picked from the 1-norm).
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let norm = one_norm(a);
    for &(theta, degree) in &[
        (1.495585217958292e-2, 3usize),
        (2.53939833006323e-1, 5),
        (9.504178996162932e-1, 7),
        (2.097847961257068, 9),
    ] {
        if norm <= theta {
            return pade_low(a, degree);
        }
    }
    let theta13 = 5.371920351148152;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * c(2f64.powi(-s), 0.0);
    let mut result = pade13(&scaled);
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

fn pade_coefficients(degree: usize) -> &'static [f64] {
    match degree {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        _ => unreachable!("unsupported Padé degree {degree}"),
    }
}

fn pade_low(a: &CMatrix, degree: usize) -> CMatrix {
    let n = a.nrows();
    let b = pade_coefficients(degree);
    let id = identity(n);
    let a2 = a * a;
    // Even powers of A up to A^(degree-1).
    let mut powers = vec![id.clone(), a2.clone()];
    while powers.len() * 2 < degree + 1 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut odd = CMatrix::zeros(n, n);
    let mut even = CMatrix::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        odd += p * c(b[2 * k + 1], 0.0);
        even += p * c(b[2 * k], 0.0);
    }
    let u = a * odd;
    solve_pade(&even, &u)
}

fn pade13(a: &CMatrix) -> CMatrix {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    let id = identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let s = |k: usize| c(B[k], 0.0);

    let inner_u = &a6 * s(13) + &a4 * s(11) + &a2 * s(9);
    let u = a * (&a6 * inner_u + &a6 * s(7) + &a4 * s(5) + &a2 * s(3) + &id * s(1));
    let inner_v = &a6 * s(12) + &a4 * s(10) + &a2 * s(8);
    let v = &a6 * inner_v + &a6 * s(6) + &a4 * s(4) + &a2 * s(2) + &id * s(0);
    solve_pade(&v, &u)
}

/// Solves `(V - U) X = V + U`.
fn solve_pade(v: &CMatrix, u: &CMatrix) -> CMatrix {
    let lhs = v - u;
    let rhs = v + u;
    lhs.lu()
        .solve(&rhs)
        .expect("Padé denominator is nonsingular for the scaled argument")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[Complex64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_column_slice(values))
    }

    #[test]
    fn expm_of_diagonal_matches_scalar_exponentials() {
        for scale in [1e-3, 0.2, 0.9, 2.0, 5.0, 40.0] {
            let vals = [c(-scale, 0.3), c(0.5 * scale, -1.0), c(0.0, scale)];
            let e = expm(&diag(&vals));
            for (k, v) in vals.iter().enumerate() {
                let expect = v.exp();
                assert!((e[(k, k)] - expect).norm() <= 1e-12 * expect.norm().max(1.0));
            }
        }
    }

    #[test]
    fn expm_of_nilpotent_is_truncated_series() {
        // Strict upper shift: exp(N) = I + N + N^2/2.
        let mut n = CMatrix::zeros(3, 3);
        n[(0, 1)] = c(2.0, 0.0);
        n[(1, 2)] = c(0.0, 3.0);
        let expect = identity(3) + &n + &n * &n * c(0.5, 0.0);
        assert!(max_abs(&(expm(&n) - expect)) < 1e-13);
    }

    #[test]
    fn expm_of_rotation_generator() {
        // exp(-i θ σ_x) = cos θ I - i sin θ σ_x
        let theta: f64 = 7.3;
        let sx = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let e = expm(&(&sx * c(0.0, -theta)));
        let expect = identity(2) * c(theta.cos(), 0.0) + &sx * c(0.0, -theta.sin());
        assert!(max_abs(&(e - expect)) < 1e-12);
    }

    #[test]
    fn completion_spans_complement() {
        let mut frame = CMatrix::zeros(3, 1);
        frame[(0, 0)] = c(1.0 / 2f64.sqrt(), 0.0);
        frame[(2, 0)] = c(0.0, 1.0 / 2f64.sqrt());
        let comp = orthonormal_completion(&frame);
        assert_eq!(comp.ncols(), 2);
        let full = CMatrix::from_columns(&[frame.column(0), comp.column(0), comp.column(1)]);
        assert!(max_abs(&(full.adjoint() * &full - identity(3))) < 1e-14);
    }

    #[test]
    fn stack_is_column_major() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let v = stack(&m);
        assert_eq!(v[1], c(3.0, 0.0));
        assert_eq!(unstack(&v, 2), m);
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn eigenvalues_of_random_matrices_are_backward_stable() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 3, 7, 30, 64] {
            let a = crate::random::ginibre(n, n, &mut rng);
            let eigs = eigenvalues(&a).unwrap();
            assert_eq!(eigs.len(), n);
            let sum: Complex64 = eigs.iter().sum();
            assert!((sum - trace(&a)).norm() < 1e-10 * n as f64);
            let scale = spectral_norm(&a);
            for &lambda in &eigs {
                let shifted = &a - identity(n) * lambda;
                let smin = shifted.singular_values().min();
                assert!(smin < 1e-12 * scale * n as f64, "n={n} smin={smin}");
            }
        }
    }

    #[test]
    fn eigenvalues_of_hermitian_matrices_match_eigvalsh() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let h = crate::random::random_hermitian(20, &mut rng);
        let general = sorted(eigenvalues(&h).unwrap());
        for (z, x) in general.iter().zip(eigvalsh(&h)) {
            assert!((z - c(x, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_structured_matrices() {
        // Triangular with repeated diagonal, a nilpotent shift, and a
        // permutation whose eigenvalues are roots of unity.
        let t = CMatrix::from_fn(6, 6, |i, j| if i == j { c((i % 2) as f64, 0.0) } else if j > i { ONE } else { ZERO });
        let e = sorted(eigenvalues(&t).unwrap());
        for (k, z) in e.iter().enumerate() {
            let expect = if k < 3 { 0.0 } else { 1.0 };
            assert!((z - c(expect, 0.0)).norm() < 1e-5, "{z}");
        }
        let shift = CMatrix::from_fn(5, 5, |i, j| if i == j + 1 { ONE } else { ZERO });
        assert!(eigenvalues(&shift).unwrap().iter().all(|z| z.norm() < 1e-12));
        let perm = CMatrix::from_fn(5, 5, |i, j| if i == (j + 1) % 5 { ONE } else { ZERO });
        for z in eigenvalues(&perm).unwrap() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(5) - ONE).norm() < 1e-11);
        }
        assert!(eigenvalues(&CMatrix::zeros(4, 4)).unwrap().iter().all(|z| *z == ZERO));
        assert!(eigenvalues(&CMatrix::zeros(2, 3)).is_err());
    }
}
