use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mixcs_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(mixcs_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_exposed() {
    let v = unsafe { CStr::from_ptr(mixcs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn matrix_handle_lifecycle() {
    unsafe {
        let mut m: *mut MixcsMatrix = ptr::null_mut();
        assert_eq!(mixcs_matrix_generate(MixcsEnsemble::SMixed, 6, 10, 3, &mut m), MixcsStatus::Ok);
        let (mut rows, mut cols) = (0usize, 0usize);
        assert_eq!(mixcs_matrix_dims(m, &mut rows, &mut cols), MixcsStatus::Ok);
        assert_eq!((rows, cols), (6, 10));
        let mut buf = vec![0.0; 60];
        assert_eq!(mixcs_matrix_copy_entries(m, buf.as_mut_ptr(), 60), MixcsStatus::Ok);
        assert_eq!(mixcs_matrix_copy_entries(m, buf.as_mut_ptr(), 59), MixcsStatus::InvalidArgument);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("m.csmat").to_str().unwrap()).unwrap();
        assert_eq!(mixcs_matrix_save(m, path.as_ptr()), MixcsStatus::Ok);
        let mut back: *mut MixcsMatrix = ptr::null_mut();
        assert_eq!(mixcs_matrix_load(path.as_ptr(), &mut back), MixcsStatus::Ok);
        let mut buf2 = vec![0.0; 60];
        mixcs_matrix_copy_entries(back, buf2.as_mut_ptr(), 60);
        assert_eq!(buf, buf2);
        mixcs_matrix_free(back);
        mixcs_matrix_free(m);
        mixcs_matrix_free(ptr::null_mut());
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut m: *mut MixcsMatrix = ptr::null_mut();
        assert_eq!(mixcs_matrix_generate(MixcsEnsemble::Gaussian, 20, 10, 0, &mut m), MixcsStatus::InvalidArgument);
        assert!(m.is_null());
        assert!(last_error().contains("n <= N"), "{}", last_error());
        let missing = CString::new("/nonexistent/dir/m.csmat").unwrap();
        assert_eq!(mixcs_matrix_load(missing.as_ptr(), &mut m), MixcsStatus::Io);
        let mut r = MixcsRipResult { delta: 0.0, gram_min: 0.0, gram_max: 0.0, supports_examined: 0 };
        assert_eq!(mixcs_rip_exhaustive(ptr::null(), 2, &mut r, ptr::null_mut()), MixcsStatus::NullPointer);
        let rank_one = [1.0, 2.0, 2.0, 4.0];
        assert_eq!(mixcs_matrix_from_rows(rank_one.as_ptr(), 2, 2, &mut m), MixcsStatus::Ok);
        let y = [1.0, 2.0];
        let mut x = [0.0; 2];
        assert_eq!(
            mixcs_basis_pursuit(m, y.as_ptr(), 2, 1e-6, 100, x.as_mut_ptr(), 2, ptr::null_mut()),
            MixcsStatus::RankDeficient
        );
        mixcs_matrix_free(m);
    }
}

#[test]
fn identity_rip_and_recovery() {
    unsafe {
        let eye = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let mut m: *mut MixcsMatrix = ptr::null_mut();
        assert_eq!(mixcs_matrix_from_rows(eye.as_ptr(), 3, 3, &mut m), MixcsStatus::Ok);
        let mut r = MixcsRipResult { delta: 1.0, gram_min: 0.0, gram_max: 0.0, supports_examined: 0 };
        let mut witness = [9usize; 2];
        assert_eq!(mixcs_rip_exhaustive(m, 2, &mut r, witness.as_mut_ptr()), MixcsStatus::Ok);
        assert_eq!(r.delta, 0.0);
        assert_eq!(r.supports_examined, 3);
        assert_eq!(witness, [0, 1]);
        assert_eq!(mixcs_rip_monte_carlo(m, 2, 50, 1, &mut r, ptr::null_mut()), MixcsStatus::Ok);
        assert_eq!(r.delta, 0.0);

        let y = [1.5, 0.0, -2.0];
        let mut x = [0.0; 3];
        let mut info = MixcsRecoveryInfo {
            objective: 0.0,
            residual: 0.0,
            iterations: 0,
            status: MixcsSolveStatus::Infeasible,
            certificate_gap: 0.0,
        };
        assert_eq!(mixcs_basis_pursuit(m, y.as_ptr(), 3, 1e-6, 1000, x.as_mut_ptr(), 3, &mut info), MixcsStatus::Ok);
        assert_eq!(info.status, MixcsSolveStatus::Converged);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((info.objective - 3.5).abs() < 1e-9);
        assert_eq!(mixcs_bpdn(m, y.as_ptr(), 3, 10.0, 1e-6, 1000, x.as_mut_ptr(), 3, &mut info), MixcsStatus::Ok);
        assert_eq!(x, [0.0; 3]);
        mixcs_matrix_free(m);
    }
}

#[test]
fn sigma_interval_at_zero_gamma() {
    let (mut lo, mut hi, mut feasible) = (0.0, 0.0, 0);
    let s = unsafe { mixcs_sigma_interval(0.0, 0.3, MixcsSupportCase::OffDiag, &mut lo, &mut hi, &mut feasible) };
    assert_eq!(s, MixcsStatus::Ok);
    assert_eq!((lo, hi, feasible), (0.7, 1.3, 1));
    let s = unsafe { mixcs_sigma_interval(1.5, 0.3, MixcsSupportCase::OffDiag, &mut lo, &mut hi, ptr::null_mut()) };
    assert_eq!(s, MixcsStatus::InvalidArgument);
}

/// Compiles a small C program against the generated header and the static
/// library. Skipped when no C compiler is on the path.
#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("mixcs.h").exists());
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libmixcs_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "mixcs.h"
int main(void) {
    MixcsMatrix *m = NULL;
    if (mixcs_matrix_generate(MIXCS_ENSEMBLE_BERNOULLI, 20, 40, 1, &m) != MIXCS_STATUS_OK) return 1;
    double x0[40] = {0}, y[20] = {0}, entries[800], x[40];
    x0[3] = 1.0; x0[17] = -1.0;
    mixcs_matrix_copy_entries(m, entries, 800);
    for (int i = 0; i < 20; i++)
        for (int j = 0; j < 40; j++) y[i] += entries[i * 40 + j] * x0[j];
    MixcsRecoveryInfo info;
    if (mixcs_basis_pursuit(m, y, 20, 1e-6, 10000, x, 40, &info) != MIXCS_STATUS_OK) return 2;
    double err = 0;
    for (int j = 0; j < 40; j++) err += (x[j] - x0[j]) * (x[j] - x0[j]);
    if (err > 1e-12 || info.status != MIXCS_SOLVE_STATUS_CONVERGED) return 3;
    if (mixcs_matrix_generate(MIXCS_ENSEMBLE_GAUSSIAN, 50, 10, 1, &m) != MIXCS_STATUS_INVALID_ARGUMENT) return 4;
    printf("%s ok\n", mixcs_version());
    mixcs_matrix_free(m);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke program exited with {:?}", out.status);
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok"));
}
