//! C interface to the `dqls` crate.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `dqls_*_new`-style constructor and released with the matching `*_free`.
//! Fallible calls return a [`DqlsStatus`]; on failure the message is kept in
//! thread-local storage and read back with [`dqls_last_error`].
//!
//! Matrices are exchanged as separate real and imaginary `double` arrays in
//! column-major order. Subsystem indices are 0-based and composite indices
//! are big-endian (subsystem 0 is the most significant digit).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use dqls::linalg::{c, CVector};
use dqls::{
    check_dqls, gas_certificate, is_frustration_free, parent_hamiltonian, synthesize_stabilizers, tol, DqlsError,
    DqlsReport as CheckReport, GainsPolicy, LocalityPattern, PureState, StabilizerSet, TensorSpace,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqlsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Malformed dimensions, neighborhoods, edges or amplitudes.
    InvalidInput = 2,
    /// The target is not stabilizable and the call needs it to be.
    NotDqls = 3,
    /// The dense Liouvillian would exceed the requested cap.
    DimensionCap = 4,
    /// A numerical routine failed (eigensolver, integrator).
    Numerical = 5,
    /// The caller's output buffer is too small.
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
    Other = 8,
}

/// Gain policy for synthesized noise operators.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqlsGains {
    Uniform = 0,
    Graded = 1,
}

/// Opaque pure state.
pub struct DqlsState(PureState);

/// Opaque locality pattern.
pub struct DqlsPattern(LocalityPattern);

/// Opaque result of a stabilizability check.
pub struct DqlsCheckReport(CheckReport);

/// Opaque set of synthesized noise operators together with their space.
pub struct DqlsStabilizers {
    set: StabilizerSet,
    space: TensorSpace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &DqlsError) -> DqlsStatus {
    match err {
        DqlsError::InvalidSpace(_)
        | DqlsError::DimensionMismatch(_)
        | DqlsError::InvalidNeighborhood(_)
        | DqlsError::NotNormalized { .. }
        | DqlsError::InvalidEdge(..)
        | DqlsError::InvalidArgument(_)
        | DqlsError::InvalidGains(_)
        | DqlsError::Parse(_) => DqlsStatus::InvalidInput,
        DqlsError::NotDqls { .. } => DqlsStatus::NotDqls,
        DqlsError::DimensionCap { .. } => DqlsStatus::DimensionCap,
        DqlsError::Eigensolver(_) | DqlsError::IntegratorDrift { .. } => DqlsStatus::Numerical,
        _ => DqlsStatus::Other,
    }
}

fn fail(status: DqlsStatus, msg: impl Into<String>) -> DqlsStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), DqlsStatus>) -> DqlsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DqlsStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(DqlsStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn lift<T>(r: dqls::Result<T>) -> Result<T, DqlsStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), DqlsStatus> {
    if p.is_null() {
        Err(fail(DqlsStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be null only when `len` is zero, otherwise valid for `len` reads.
unsafe fn input<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], DqlsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(slice::from_raw_parts(p, len))
}

/// # Safety
/// `out` must be a valid, writable pointer.
unsafe fn emit<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

fn rel_tol(t: f64) -> Result<f64, DqlsStatus> {
    if t == 0.0 {
        Ok(tol::SUPPORT)
    } else if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(fail(DqlsStatus::InvalidInput, format!("tolerance {t} must be 0 (default) or lie in (0, 1)")))
    }
}

/// Message of the last failed call on this thread, or null if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dqls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Default relative support threshold used when a tolerance argument is 0.
#[no_mangle]
pub extern "C" fn dqls_default_tolerance() -> f64 {
    tol::SUPPORT
}

/// GHZ state on `n` qubits.
///
/// # Safety
/// `out` must be a valid pointer to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn dqls_state_ghz(n: usize, out: *mut *mut DqlsState) -> DqlsStatus {
    guard(|| {
        non_null(out, "out")?;
        emit(out, DqlsState(lift(dqls::make_ghz(n))?));
        Ok(())
    })
}

/// W state on `n` qubits.
///
/// # Safety
/// `out` must be a valid pointer to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn dqls_state_w(n: usize, out: *mut *mut DqlsState) -> DqlsStatus {
    guard(|| {
        non_null(out, "out")?;
        emit(out, DqlsState(lift(dqls::make_w(n))?));
        Ok(())
    })
}

/// The four-qubit state that is stabilizable on two overlapping triples
/// but not a graph state of that pattern.
///
/// # Safety
/// `out` must be a valid pointer to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn dqls_state_psi_t(out: *mut *mut DqlsState) -> DqlsStatus {
    guard(|| {
        non_null(out, "out")?;
        emit(out, DqlsState(lift(dqls::make_psi_t())?));
        Ok(())
    })
}

/// Graph state on `n` qubits; `edges` holds `num_edges` pairs laid out flat.
///
/// # Safety
/// `edges` must be valid for `2 * num_edges` reads and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dqls_state_graph(
    n: usize,
    edges: *const usize,
    num_edges: usize,
    out: *mut *mut DqlsState,
) -> DqlsStatus {
    guard(|| {
        non_null(out, "out")?;
        let flat = input(edges, 2 * num_edges, "edges")?;
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|e| (e[0], e[1])).collect();
        emit(out, DqlsState(lift(dqls::make_graph_state(n, &pairs))?));
        Ok(())
    })
}

/// State from explicit amplitudes on subsystems of dimensions `dims`.
/// The vector is normalized; `len` must equal the product of `dims`.
///
/// # Safety
/// `dims` must be valid for `num_dims` reads, `re` and `im` for `len` reads,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dqls_state_from_amplitudes(
    dims: *const usize,
    num_dims: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut DqlsState,
) -> DqlsStatus {
    guard(|| {
        non_null(out, "out")?;
        let space = lift(TensorSpace::new(input(dims, num_dims, "dims")?.to_vec()))?;
        if len != space.total_dim() {
            return Err(fail(
                DqlsStatus::InvalidInput,
                format!("{len} amplitudes for total dimension {}", space.total_dim()),
            ));
        }
        let (re, im) = (input(re, len, "re")?, input(im, len, "im")?);
        if re.iter().chain(im).any(|x| !x.is_finite()) {
            return Err(fail(DqlsStatus::InvalidInput, "amplitudes must be finite"));
        }
        let v = CVector::from_iterator(len, re.iter().zip(im).map(|(&a, &b)| c(a, b)));
        emit(out, DqlsState(lift(PureState::normalized(space, v))?));
        Ok(())
    })
}

/// Total Hilbert-space dimension of the state, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dqls_state_dim(state: *const DqlsState) -> usize {
    state.as_ref().map_or(0, |s| s.0.space().total_dim())
}

/// Copies the amplitudes into `re` and `im`, each of capacity `cap`.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must be writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn dqls_state_amplitudes(
    state: *const DqlsState,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> DqlsStatus {
    guard(|| {
        non_null(state, "state")?;
        let amps = (*state).0.amplitudes();
        copy_complex(amps.iter().map(|z| (z.re, z.im)), amps.len(), re, im, cap)
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqls_state_free(state: *mut DqlsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Locality pattern in CSR layout: neighborhood `k` is
/// `indices[offsets[k] .. offsets[k + 1]]`, so `offsets` has
/// `num_neighborhoods + 1` entries.
///
/// # Safety
/// `dims` must be valid for `num_dims` reads, `offsets` for
/// `num_neighborhoods + 1` reads, `indices` for `offsets[num_neighborhoods]`
/// reads, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dqls_pattern_new(
    dims: *const usize,
    num_dims: usize,
    indices: *const usize,
    offsets: *const usize,
    num_neighborhoods: usize,
    out: *mut *mut DqlsPattern,
) -> DqlsStatus {
    guard(|| {
        non_null(out, "out")?;
        let space = lift(TensorSpace::new(input(dims, num_dims, "dims")?.to_vec()))?;
        let offsets = input(offsets, num_neighborhoods + 1, "offsets")?;
        if offsets[0] != 0 || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(fail(DqlsStatus::InvalidInput, "offsets must start at 0 and be nondecreasing"));
        }
        let flat = input(indices, offsets[num_neighborhoods], "indices")?;
        let sets: Vec<Vec<usize>> = offsets.windows(2).map(|w| flat[w[0]..w[1]].to_vec()).collect();
        emit(out, DqlsPattern(lift(LocalityPattern::from_indices(space, &sets))?));
        Ok(())
    })
}

/// # Safety
/// `pattern` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dqls_pattern_len(pattern: *const DqlsPattern) -> usize {
    pattern.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `pattern` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqls_pattern_free(pattern: *mut DqlsPattern) {
    if !pattern.is_null() {
        drop(Box::from_raw(pattern));
    }
}

/// Decides stabilizability of `state` under `pattern`. `rel_tol` of 0 picks
/// the default support threshold.
///
/// # Safety
/// `state` and `pattern` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dqls_check(
    state: *const DqlsState,
    pattern: *const DqlsPattern,
    rel_tol: f64,
    out: *mut *mut DqlsCheckReport,
) -> DqlsStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(pattern, "pattern")?;
        non_null(out, "out")?;
        let report = lift(check_dqls(&(*state).0, &(*pattern).0, self::rel_tol(rel_tol)?))?;
        emit(out, DqlsCheckReport(report));
        Ok(())
    })
}

/// 1 if stabilizable, 0 otherwise (including a null handle).
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dqls_report_verdict(report: *const DqlsCheckReport) -> i32 {
    report.as_ref().map_or(0, |r| r.0.verdict as i32)
}

/// 1 if a rank decision fell inside the borderline band and the verdict was
/// forced to 0.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dqls_report_indeterminate(report: *const DqlsCheckReport) -> i32 {
    report.as_ref().map_or(0, |r| r.0.indeterminate as i32)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dqls_report_intersection_dim(report: *const DqlsCheckReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.intersection.dim())
}

/// Distance between the intersection and the span of the target, or NaN
/// for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dqls_report_target_distance(report: *const DqlsCheckReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.target_distance)
}

/// Copies the orthonormal intersection basis, a `D x k` column-major matrix,
/// into `re` and `im` of capacity `cap` each.
///
/// # Safety
/// `report` must be a live handle; `re` and `im` must be writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn dqls_report_intersection_basis(
    report: *const DqlsCheckReport,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> DqlsStatus {
    guard(|| {
        non_null(report, "report")?;
        let frame = (*report).0.intersection.frame();
        copy_complex(frame.iter().map(|z| (z.re, z.im)), frame.len(), re, im, cap)
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqls_report_free(report: *mut DqlsCheckReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Builds the parent Hamiltonian and reports its kernel dimension and
/// whether the target minimizes every term.
///
/// # Safety
/// `state` and `pattern` must be live handles; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn dqls_parent_hamiltonian(
    state: *const DqlsState,
    pattern: *const DqlsPattern,
    rel_tol: f64,
    kernel_dim: *mut usize,
    frustration_free: *mut i32,
) -> DqlsStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(pattern, "pattern")?;
        non_null(kernel_dim, "kernel_dim")?;
        non_null(frustration_free, "frustration_free")?;
        let psi = &(*state).0;
        let ph = lift(parent_hamiltonian(psi, &(*pattern).0, self::rel_tol(rel_tol)?))?;
        let ff = lift(is_frustration_free(psi, &ph.terms))?;
        *kernel_dim = ph.kernel().0.dim();
        *frustration_free = ff as i32;
        Ok(())
    })
}

/// Synthesizes one noise operator per neighborhood. Returns
/// [`DqlsStatus::NotDqls`] for a non-stabilizable target unless `force` is
/// nonzero.
///
/// # Safety
/// `state` and `pattern` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dqls_synthesize(
    state: *const DqlsState,
    pattern: *const DqlsPattern,
    gains: DqlsGains,
    rel_tol: f64,
    force: i32,
    out: *mut *mut DqlsStabilizers,
) -> DqlsStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(pattern, "pattern")?;
        non_null(out, "out")?;
        let policy = match gains {
            DqlsGains::Uniform => GainsPolicy::Uniform,
            DqlsGains::Graded => GainsPolicy::Graded,
        };
        let psi = &(*state).0;
        let set = lift(synthesize_stabilizers(psi, &(*pattern).0, &policy, self::rel_tol(rel_tol)?, force != 0))?;
        emit(out, DqlsStabilizers { set, space: psi.space().clone() });
        Ok(())
    })
}

/// Number of synthesized operators, or 0 for a null handle.
///
/// # Safety
/// `stabilizers` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dqls_stabilizers_len(stabilizers: *const DqlsStabilizers) -> usize {
    stabilizers.as_ref().map_or(0, |s| s.set.operators.len())
}

/// Copies operator `index`, embedded in the full space, as a `D x D`
/// column-major matrix into `re` and `im` of capacity `cap` each.
///
/// # Safety
/// `stabilizers` must be a live handle; `re` and `im` must be writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn dqls_stabilizers_operator(
    stabilizers: *const DqlsStabilizers,
    index: usize,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> DqlsStatus {
    guard(|| {
        non_null(stabilizers, "stabilizers")?;
        let s = &*stabilizers;
        let Some(op) = s.set.operators.get(index) else {
            return Err(fail(
                DqlsStatus::InvalidInput,
                format!("operator {index} out of range ({} operators)", s.set.operators.len()),
            ));
        };
        let m = lift(dqls::embed(op, &s.space))?;
        copy_complex(m.iter().map(|z| (z.re, z.im)), m.len(), re, im, cap)
    })
}

/// Spectral certificate of the synthesized dynamics. Fails with
/// [`DqlsStatus::DimensionCap`] when the state dimension exceeds `dim_cap`.
///
/// # Safety
/// `stabilizers` and `target` must be live handles; every output must be writable.
#[no_mangle]
pub unsafe extern "C" fn dqls_certify(
    stabilizers: *const DqlsStabilizers,
    target: *const DqlsState,
    dim_cap: usize,
    certified: *mut i32,
    gap: *mut f64,
    kernel_dim: *mut usize,
) -> DqlsStatus {
    guard(|| {
        non_null(stabilizers, "stabilizers")?;
        non_null(target, "target")?;
        non_null(certified, "certified")?;
        non_null(gap, "gap")?;
        non_null(kernel_dim, "kernel_dim")?;
        let s = &*stabilizers;
        let gen = lift(s.set.generator(&s.space))?;
        let cert = lift(gas_certificate(&gen, &(*target).0, dim_cap))?;
        *certified = cert.certified as i32;
        *gap = cert.spectrum.gap;
        *kernel_dim = cert.spectrum.kernel_dim;
        Ok(())
    })
}

/// # Safety
/// `stabilizers` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqls_stabilizers_free(stabilizers: *mut DqlsStabilizers) {
    if !stabilizers.is_null() {
        drop(Box::from_raw(stabilizers));
    }
}

unsafe fn copy_complex(
    values: impl Iterator<Item = (f64, f64)>,
    len: usize,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> Result<(), DqlsStatus> {
    non_null(re, "re")?;
    non_null(im, "im")?;
    if cap < len {
        return Err(fail(DqlsStatus::BufferTooSmall, format!("need {len} entries, buffer holds {cap}")));
    }
    for (k, (a, b)) in values.enumerate() {
        *re.add(k) = a;
        *im.add(k) = b;
    }
    Ok(())
}
