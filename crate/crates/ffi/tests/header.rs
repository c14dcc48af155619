//! The generated header must compile as C and as C++, and the C smoke program must
//! type-check against it.

use std::path::Path;
use std::process::Command;

fn compile(compiler: &str, extra: &[&str]) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = Command::new(compiler)
        .args(extra)
        .args(["-fsyntax-only", "-Wall", "-Wextra", "-Werror", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/c/smoke.c"))
        .output()
        .unwrap_or_else(|e| panic!("running {compiler}: {e}"));
    assert!(out.status.success(), "{compiler} rejected the header:\n{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn header_is_current() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/quasicopy.h")).unwrap();
    for name in [
        "qc_config_from_json",
        "qc_config_free",
        "qc_config_dim",
        "qc_config_outcomes",
        "qc_reversal_probability",
        "qc_outcome_probabilities",
        "qc_posterior_given_success",
        "qc_run_trial",
        "qc_tradeoff_json",
        "qc_montecarlo",
        "qc_last_error_message",
        "qc_string_free",
        "qc_status_name",
        "QC_STATUS_BUFFER_TOO_SMALL",
        "QC_ENGINE_BOTH",
        "typedef struct QcConfig QcConfig",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    compile("cc", &["-std=c11"]);
}

#[test]
fn header_compiles_as_cpp() {
    compile("c++", &["-x", "c++", "-std=c++17"]);
}
