use std::path::Path;
use std::process::Command;

#[test]
fn header_declares_the_api() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/baseparam.h")).unwrap();
    for name in [
        "bp_last_error",
        "bp_model_load",
        "bp_model_from_json",
        "bp_model_bundled",
        "bp_model_set_gravity",
        "bp_model_free",
        "bp_analyze",
        "bp_analysis_nullspace",
        "bp_analysis_report_json",
        "bp_analysis_free",
        "bp_validate",
        "bp_string_free",
        "BP_STATUS_OK = 0",
        "typedef struct BpModel BpModel",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn c_example_compiles_against_header() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile::tempdir().unwrap();
    let status = match Command::new("cc")
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-c"])
        .arg(dir.join("examples/analyze.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg("-o")
        .arg(out.path().join("analyze.o"))
        .status()
    {
        Ok(s) => s,
        Err(e) => {
            eprintln!("skipped: no C compiler ({e})");
            return;
        }
    };
    assert!(status.success());
}
