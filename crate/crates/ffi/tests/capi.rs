use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use dqls_ffi::*;

fn last_error() -> String {
    let p = dqls_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn pattern(dims: &[usize], sets: &[&[usize]]) -> *mut DqlsPattern {
    let mut offsets = vec![0];
    let mut flat = Vec::new();
    for s in sets {
        flat.extend_from_slice(s);
        offsets.push(flat.len());
    }
    let mut out = ptr::null_mut();
    let st = unsafe { dqls_pattern_new(dims.as_ptr(), dims.len(), flat.as_ptr(), offsets.as_ptr(), sets.len(), &mut out) };
    assert_eq!(st, DqlsStatus::Ok);
    out
}

fn state(f: impl FnOnce(*mut *mut DqlsState) -> DqlsStatus) -> *mut DqlsState {
    let mut out = ptr::null_mut();
    assert_eq!(f(&mut out), DqlsStatus::Ok, "{}", last_error());
    out
}

fn check(s: *const DqlsState, p: *const DqlsPattern) -> *mut DqlsCheckReport {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { dqls_check(s, p, 0.0, &mut r) }, DqlsStatus::Ok);
    r
}

#[test]
fn ghz_on_pairs_leaves_the_code_space() {
    let ghz = state(|o| unsafe { dqls_state_ghz(3, o) });
    let pairs = pattern(&[2, 2, 2], &[&[0, 1], &[1, 2]]);
    let r = check(ghz, pairs);
    unsafe {
        assert_eq!(dqls_report_verdict(r), 0);
        assert_eq!(dqls_report_indeterminate(r), 0);
        // Both |000> and |111> reduce to the same supports.
        assert_eq!(dqls_report_intersection_dim(r), 2);

        let (mut re, mut im) = (vec![0.0; 16], vec![0.0; 16]);
        assert_eq!(dqls_report_intersection_basis(r, re.as_mut_ptr(), im.as_mut_ptr(), 15), DqlsStatus::BufferTooSmall);
        assert!(last_error().contains("16"));
        assert_eq!(dqls_report_intersection_basis(r, re.as_mut_ptr(), im.as_mut_ptr(), 16), DqlsStatus::Ok);
        // The basis spans exactly {|000>, |111>}: its projector has ones at 0 and 7.
        for row in 0..8 {
            let weight: f64 = (0..2).map(|k| re[k * 8 + row].powi(2) + im[k * 8 + row].powi(2)).sum();
            let expect = if row == 0 || row == 7 { 1.0 } else { 0.0 };
            assert!((weight - expect).abs() < 1e-10, "row {row}: {weight}");
        }

        let (mut kdim, mut ff) = (0usize, -1i32);
        assert_eq!(dqls_parent_hamiltonian(ghz, pairs, 0.0, &mut kdim, &mut ff), DqlsStatus::Ok);
        assert_eq!((kdim, ff), (2, 1));

        let mut stabs = ptr::null_mut();
        assert_eq!(dqls_synthesize(ghz, pairs, DqlsGains::Uniform, 0.0, 0, &mut stabs), DqlsStatus::NotDqls);
        assert!(stabs.is_null());
        assert!(last_error().contains("intersection dimension 2"));

        dqls_report_free(r);
        dqls_pattern_free(pairs);
        dqls_state_free(ghz);
    }
}

#[test]
fn psi_t_is_stabilizable_and_certified() {
    let t = state(|o| unsafe { dqls_state_psi_t(o) });
    let triples = pattern(&[2, 2, 2, 2], &[&[0, 1, 2], &[1, 2, 3]]);
    unsafe {
        assert_eq!(dqls_state_dim(t), 16);
        assert_eq!(dqls_pattern_len(triples), 2);
        let r = check(t, triples);
        assert_eq!(dqls_report_verdict(r), 1);
        assert_eq!(dqls_report_intersection_dim(r), 1);
        assert!(dqls_report_target_distance(r) < 1e-9);
        dqls_report_free(r);

        let mut stabs = ptr::null_mut();
        assert_eq!(dqls_synthesize(t, triples, DqlsGains::Uniform, 0.0, 0, &mut stabs), DqlsStatus::Ok);
        assert_eq!(dqls_stabilizers_len(stabs), 2);

        // Each operator annihilates the target.
        let (mut are, mut aim) = (vec![0.0; 16], vec![0.0; 16]);
        assert_eq!(dqls_state_amplitudes(t, are.as_mut_ptr(), aim.as_mut_ptr(), 16), DqlsStatus::Ok);
        for k in 0..2 {
            let (mut re, mut im) = (vec![0.0; 256], vec![0.0; 256]);
            assert_eq!(dqls_stabilizers_operator(stabs, k, re.as_mut_ptr(), im.as_mut_ptr(), 256), DqlsStatus::Ok);
            for row in 0..16 {
                let (mut x, mut y) = (0.0, 0.0);
                for col in 0..16 {
                    let (a, b) = (re[col * 16 + row], im[col * 16 + row]);
                    x += a * are[col] - b * aim[col];
                    y += a * aim[col] + b * are[col];
                }
                assert!(x.hypot(y) < 1e-10);
            }
        }
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(dqls_stabilizers_operator(stabs, 2, &mut re, &mut im, 1), DqlsStatus::InvalidInput);

        let (mut certified, mut gap, mut kdim) = (0, 0.0, 0usize);
        assert_eq!(dqls_certify(stabs, t, 8, &mut certified, &mut gap, &mut kdim), DqlsStatus::DimensionCap);
        assert_eq!(dqls_certify(stabs, t, 256, &mut certified, &mut gap, &mut kdim), DqlsStatus::Ok);
        assert_eq!((certified, kdim), (1, 1));
        assert!(gap > 0.0);

        dqls_stabilizers_free(stabs);
        dqls_pattern_free(triples);
        dqls_state_free(t);
    }
}

#[test]
fn single_qubit_decay_gap_is_one_half() {
    // Cooling |1> -> |0> with unit gain: Liouvillian eigenvalues 0, -1/2, -1/2, -1.
    let (dims, re, im) = ([2usize], [3.0, 0.0], [0.0, 0.0]);
    let s = state(|o| unsafe { dqls_state_from_amplitudes(dims.as_ptr(), 1, re.as_ptr(), im.as_ptr(), 2, o) });
    let p = pattern(&dims, &[&[0]]);
    unsafe {
        let (mut are, mut aim) = ([0.0; 2], [0.0; 2]);
        assert_eq!(dqls_state_amplitudes(s, are.as_mut_ptr(), aim.as_mut_ptr(), 2), DqlsStatus::Ok);
        assert_eq!(are, [1.0, 0.0]);

        let mut stabs = ptr::null_mut();
        assert_eq!(dqls_synthesize(s, p, DqlsGains::Uniform, 0.0, 0, &mut stabs), DqlsStatus::Ok);
        let (mut certified, mut gap, mut kdim) = (0, 0.0, 0usize);
        assert_eq!(dqls_certify(stabs, s, 64, &mut certified, &mut gap, &mut kdim), DqlsStatus::Ok);
        assert_eq!(certified, 1);
        assert!((gap - 0.5).abs() < 1e-12, "{gap}");
        dqls_stabilizers_free(stabs);
        dqls_pattern_free(p);
        dqls_state_free(s);
    }
}

#[test]
fn graph_and_w_states() {
    // A 3-qubit path graph state is stabilized by its closed neighborhoods.
    let edges = [0usize, 1, 1, 2];
    let g = state(|o| unsafe { dqls_state_graph(3, edges.as_ptr(), 2, o) });
    let closed = pattern(&[2, 2, 2], &[&[0, 1], &[0, 1, 2], &[1, 2]]);
    let r = check(g, closed);
    assert_eq!(unsafe { dqls_report_verdict(r) }, 1);

    // W on nearest-neighbor pairs keeps |000> in the intersection.
    let w = state(|o| unsafe { dqls_state_w(3, o) });
    let pairs = pattern(&[2, 2, 2], &[&[0, 1], &[1, 2]]);
    let rw = check(w, pairs);
    unsafe {
        assert_eq!(dqls_report_verdict(rw), 0);
        assert!(dqls_report_intersection_dim(rw) >= 2);
        for p in [r, rw] {
            dqls_report_free(p);
        }
        dqls_pattern_free(closed);
        dqls_pattern_free(pairs);
        dqls_state_free(g);
        dqls_state_free(w);
    }
}

#[test]
fn invalid_input_is_reported() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(dqls_state_ghz(3, ptr::null_mut()), DqlsStatus::NullPointer);
        assert!(last_error().contains("out"));

        let edges = [0usize, 3];
        assert_eq!(dqls_state_graph(3, edges.as_ptr(), 1, &mut s), DqlsStatus::InvalidInput);
        assert!(s.is_null());

        let (dims, re, im) = ([2usize, 2], [1.0, 0.0, 0.0], [0.0; 3]);
        assert_eq!(dqls_state_from_amplitudes(dims.as_ptr(), 2, re.as_ptr(), im.as_ptr(), 3, &mut s), DqlsStatus::InvalidInput);
        let zeros = [0.0; 4];
        assert_eq!(
            dqls_state_from_amplitudes(dims.as_ptr(), 2, zeros.as_ptr(), zeros.as_ptr(), 4, &mut s),
            DqlsStatus::InvalidInput
        );
        let nan = [f64::NAN, 1.0, 0.0, 0.0];
        assert_eq!(dqls_state_from_amplitudes(dims.as_ptr(), 2, nan.as_ptr(), zeros.as_ptr(), 4, &mut s), DqlsStatus::InvalidInput);

        let mut p = ptr::null_mut();
        let idx = [0usize, 1];
        let bad_offsets = [1usize, 2];
        assert_eq!(dqls_pattern_new(dims.as_ptr(), 2, idx.as_ptr(), bad_offsets.as_ptr(), 1, &mut p), DqlsStatus::InvalidInput);
        let out_of_range = [0usize, 2];
        let offsets = [0usize, 2];
        assert_eq!(dqls_pattern_new(dims.as_ptr(), 2, out_of_range.as_ptr(), offsets.as_ptr(), 1, &mut p), DqlsStatus::InvalidInput);
        assert!(p.is_null());

        // State and pattern on different spaces.
        let ghz = state(|o| dqls_state_ghz(3, o));
        let two = pattern(&[2, 2], &[&[0, 1]]);
        let mut r = ptr::null_mut();
        assert_eq!(dqls_check(ghz, two, 0.0, &mut r), DqlsStatus::InvalidInput);
        assert_eq!(dqls_check(ghz, two, 1.5, &mut r), DqlsStatus::InvalidInput);
        assert!(last_error().contains("tolerance"));

        // Null handles are inert.
        assert_eq!(dqls_report_verdict(ptr::null()), 0);
        assert_eq!(dqls_state_dim(ptr::null()), 0);
        assert!(dqls_report_target_distance(ptr::null()).is_nan());
        dqls_state_free(ptr::null_mut());
        dqls_report_free(ptr::null_mut());

        dqls_pattern_free(two);
        dqls_state_free(ghz);
    }
}

#[test]
fn errors_are_thread_local() {
    unsafe { assert_eq!(dqls_state_ghz(0, &mut ptr::null_mut()), DqlsStatus::InvalidInput) };
    let other = std::thread::spawn(|| dqls_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(!dqls_last_error().is_null());
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/dqls.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["dqls_check", "dqls_certify", "DQLS_STATUS_NOT_DQLS", "typedef struct DqlsState DqlsState"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"dqls.h\"\nint main(void) { DqlsState *s = 0; return dqls_state_ghz(3, &s) == DQLS_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let include = header.parent().unwrap();
    for (compiler, extra) in [("cc", &["-std=c99"][..]), ("c++", &["-x", "c++"][..])] {
        let Ok(out) = Command::new(compiler)
            .args(extra)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(include)
            .arg(&src)
            .output()
        else {
            eprintln!("{compiler} not available, skipping");
            continue;
        };
        assert!(out.status.success(), "{compiler}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
