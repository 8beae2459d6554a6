use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use gslearn_ffi::*;

fn rng(seed: u64) -> *mut GslRng {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { gsl_rng_new(seed, 0, 0, &mut r) }, GslStatus::Ok);
    r
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gsl_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn graph_round_trip() {
    unsafe {
        let r = rng(5);
        let mut g = ptr::null_mut();
        assert_eq!(gsl_graph_random_regular(10, 3, r, &mut g), GslStatus::Ok);
        let (mut n, mut d) = (0, 0);
        assert_eq!(gsl_graph_shape(g, &mut n, &mut d), GslStatus::Ok);
        assert_eq!((n, d), (10, 3));

        let mut text = ptr::null_mut();
        assert_eq!(gsl_graph_to_edge_list(g, &mut text), GslStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(gsl_graph_parse(text, &mut h), GslStatus::Ok);
        for v in 0..10 {
            let (mut a, mut b) = ([0u32; 3], [0u32; 3]);
            assert_eq!(gsl_graph_neighbors(g, v, a.as_mut_ptr(), 3), GslStatus::Ok);
            assert_eq!(gsl_graph_neighbors(h, v, b.as_mut_ptr(), 3), GslStatus::Ok);
            assert_eq!(a, b);
        }
        let mut small = [0u32; 2];
        assert_eq!(gsl_graph_neighbors(g, 0, small.as_mut_ptr(), 2), GslStatus::InvalidArgument);
        gsl_string_free(text);
        gsl_graph_free(g);
        gsl_graph_free(h);
        gsl_rng_free(r);
    }
}

#[test]
fn parse_errors_carry_messages() {
    let bad = CString::new("4 2\n1 2\n2 3\n3 4\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gsl_graph_parse(bad.as_ptr(), &mut g) }, GslStatus::Parse);
    assert!(g.is_null());
    assert!(last_error().contains("line"));
}

#[test]
fn k2_sampling_and_probabilities() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(gsl_graph_from_edges(2, 1, [0u32, 1].as_ptr(), 1, &mut g), GslStatus::Ok);
        // X on qubit 0, Z on qubit 1: outcomes satisfy m0 = m1.
        let basis = [1u8, 0];
        let mut prob = 0.0;
        assert_eq!(gsl_exact_prob(g, basis.as_ptr(), [1u8, 1].as_ptr(), &mut prob), GslStatus::Ok);
        assert_eq!(prob, 0.5);
        assert_eq!(gsl_exact_prob(g, basis.as_ptr(), [1u8, 0].as_ptr(), &mut prob), GslStatus::Ok);
        assert_eq!(prob, 0.0);
        assert_eq!(gsl_exact_prob(g, [2u8, 0].as_ptr(), [1u8, 0].as_ptr(), &mut prob), GslStatus::InvalidArgument);

        let r = rng(9);
        let mut out = [0u8; 2];
        for _ in 0..200 {
            assert_eq!(
                gsl_sample(g, basis.as_ptr(), 0.0, GslNoiseMode::PauliInject, r, out.as_mut_ptr()),
                GslStatus::Ok
            );
            assert_eq!(out[0], out[1]);
        }
        assert_eq!(
            gsl_sample(g, basis.as_ptr(), 0.9, GslNoiseMode::Bitflip, r, out.as_mut_ptr()),
            GslStatus::InvalidArgument
        );
        gsl_rng_free(r);
        gsl_graph_free(g);
    }
}

#[test]
fn learn_recovers_a_small_graph() {
    unsafe {
        let r = rng(2);
        let mut g = ptr::null_mut();
        assert_eq!(gsl_graph_random_regular(12, 2, r, &mut g), GslStatus::Ok);
        let mut c = ptr::null_mut();
        assert_eq!(gsl_learn(g, 400, 1, 0, 0.0, GslNoiseMode::PauliInject, r, &mut c), GslStatus::Ok);
        let mut ok = false;
        assert_eq!(gsl_candidates_is_success(c, g, &mut ok), GslStatus::Ok);
        assert!(ok);
        let mut count = 0;
        assert_eq!(gsl_candidates_count(c, 0, &mut count), GslStatus::Ok);
        assert_eq!(count, 1);
        assert_eq!(gsl_candidates_count(c, 12, &mut count), GslStatus::InvalidArgument);
        gsl_candidates_free(c);

        assert_eq!(gsl_learn(g, 10, 0, 0, 0.0, GslNoiseMode::PauliInject, r, &mut c), GslStatus::InvalidArgument);
        gsl_graph_free(g);
        gsl_rng_free(r);
        gsl_graph_free(ptr::null_mut());
    }
}

#[test]
fn bounds_match_the_library() {
    unsafe {
        let mut m = 0u64;
        assert_eq!(gsl_bound_m_noiseless(30, 3, 0.1, &mut m), GslStatus::Ok);
        assert_eq!(m, 510);
        assert_eq!(gsl_bound_m_noisy(30, 3, 0.2, &mut m), GslStatus::Ok);
        assert_eq!(m, 465);
        assert_eq!(gsl_bound_r_noisy(30, 3, 0.2, 0.05, &mut m), GslStatus::Ok);
        assert_eq!(m, 20);
        let mut x = 0.0;
        assert_eq!(gsl_bound_p_samp(20, 2, 9, &mut x), GslStatus::Ok);
        assert!((x - 0.130263).abs() < 1e-6);
        assert_eq!(gsl_bound_converse_n(100, 2, 0.0, 0.0, &mut x), GslStatus::Ok);
        assert!((x - 7.568).abs() < 1e-3);
        assert_eq!(gsl_bound_m_noiseless(10, 3, 0.1, &mut m), GslStatus::InvalidArgument);
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "gslearn.h"

int main(void) {
    GslRng *rng = NULL;
    GslGraph *g = NULL;
    GslCandidates *c = NULL;
    uint64_t m = 0;
    bool ok = false;
    if (gsl_bound_m_noiseless(30, 3, 0.1, &m) != GSL_STATUS_OK || m != 510) return 1;
    if (gsl_rng_new(7, 0, 0, &rng) != GSL_STATUS_OK) return 2;
    if (gsl_graph_random_regular(5, 3, rng, &g) != GSL_STATUS_INFEASIBLE) return 3;
    if (gsl_last_error() == NULL) return 4;
    if (gsl_graph_random_regular(12, 2, rng, &g) != GSL_STATUS_OK) return 5;
    if (gsl_learn(g, 400, 1, 0, 0.0, GSL_NOISE_MODE_PAULI_INJECT, rng, &c) != GSL_STATUS_OK) return 6;
    if (gsl_candidates_is_success(c, g, &ok) != GSL_STATUS_OK || !ok) return 7;
    gsl_candidates_free(c);
    gsl_graph_free(g);
    gsl_rng_free(rng);
    puts("ok");
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/capi-<hash> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libgslearn_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
