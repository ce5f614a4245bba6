use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("cranked.h")
}

#[test]
fn header_declares_every_entry_point() {
    let text = std::fs::read_to_string(header()).expect("header generated by build script");
    for f in [
        "cranked_last_error_message",
        "cranked_regime_name",
        "cranked_classify",
        "cranked_spectral",
        "cranked_propagate",
        "cranked_propagator_compose",
        "cranked_propagator_matrix",
        "cranked_propagator_free",
        "cranked_state_new",
        "cranked_state_evolve",
        "cranked_state_matrix",
        "cranked_state_occupation",
        "cranked_state_lz",
        "cranked_state_free",
        "cranked_entropy_vn",
        "cranked_entropy_renyi",
        "cranked_linear_entropy",
    ] {
        assert!(text.contains(&format!("{f}(")), "missing {f}");
    }
    assert!(text.contains("typedef struct CrankedPropagator CrankedPropagator;"));
    assert!(text.contains("CRANKED_STATUS_OK = 0"));
}

/// Compiles and runs a small C client against the static library when a C
/// compiler is available.
#[test]
fn c_client_round_trip() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    // target/<profile>/deps/<this test> -> target/<profile>
    let exe_path = std::env::current_exe().unwrap();
    let profile_dir = exe_path.parent().and_then(Path::parent).unwrap().to_path_buf();
    let mut build = Command::new(env!("CARGO"));
    build.args(["build", "-p", "cranked-ffi", "--lib"]);
    if profile_dir.file_name().is_some_and(|n| n == "release") {
        build.arg("--release");
    }
    let built = build
        .env("CARGO_TARGET_DIR", profile_dir.parent().unwrap())
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .status()
        .unwrap();
    assert!(built.success(), "building the static library failed");
    let lib = profile_dir.join("libcranked_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(
        &src,
        r#"
#include <math.h>
#include <stdio.h>
#include "cranked.h"

int main(void) {
    CrankedRegime r;
    if (cranked_classify(1.0, 0.3, 0.4, 1e-9, &r) != CRANKED_STATUS_OK || r != CRANKED_REGIME_SECTOR_A) return 1;
    CrankedPropagator *u = NULL;
    if (cranked_propagate(1.0, 1.0, 0.5, M_PI / 2.0, &u) != CRANKED_STATUS_OK) return 2;
    CrankedState *s0 = NULL, *s = NULL;
    if (cranked_state_new(CRANKED_INITIAL_KIND_ANISOTROPIC, 2.0, 0.5, 1.0, 1.0, &s0) != CRANKED_STATUS_OK) return 3;
    if (cranked_state_evolve(s0, u, &s) != CRANKED_STATUS_OK) return 4;
    double f = -1.0;
    if (cranked_state_occupation(s, &f) != CRANKED_STATUS_OK) return 5;
    if (fabs(f - 0.125) > 1e-12) return 6;
    if (cranked_state_new(CRANKED_INITIAL_KIND_GROUND_STATE_OF_H0, 0, 0, 1.0, -1.0, &s) != CRANKED_STATUS_NO_GROUND_STATE) return 7;
    if (cranked_last_error_message() == NULL) return 8;
    cranked_state_free(s0);
    cranked_propagator_free(u);
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("client");
    let include = header().parent().unwrap().to_path_buf();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to compile");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C client exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
