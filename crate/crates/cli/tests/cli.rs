//! End-to-end tests of the `dworkmill` binary: exit codes, report
//! shapes, determinism, and config-file handling.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dworkmill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("dworkmill-test-{}-{}", std::process::id(), name));
    p
}

#[test]
fn instanton_table_has_the_known_first_number_and_passing_verdicts() {
    let out = run(&[
        "instantons",
        "--operator",
        "quintic",
        "--terms",
        "10",
        "--power",
        "3",
        "--kappa",
        "5",
        "--check-primes",
        "7,11",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let first_row = text
        .lines()
        .find(|l| l.starts_with("1\t"))
        .expect("row for r = 1");
    let cells: Vec<&str> = first_row.split('\t').collect();
    assert_eq!(cells[2], "2875", "a_1 column");
    assert_eq!(&cells[3..5], &["integral", "integral"]);
    assert!(text.contains("# prime 7: pass"));
    assert!(text.contains("# prime 11: pass"));
    assert!(text.contains("# status: pass"));
}

#[test]
fn identical_configurations_give_byte_identical_reports() {
    let args = [
        "instantons",
        "--operator",
        "quintic",
        "--terms",
        "6",
        "--power",
        "3",
        "--kappa",
        "5",
        "--check-primes",
        "7,11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn derived_operator_for_the_three_simplex_matches_the_builtin() {
    let out = run(&[
        "derive-pf",
        "--family",
        "simplicial",
        "--dim",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json report");
    let builtin = dworkmill::diffop::ThetaOperator::builtin("simplicial:3").unwrap();
    assert_eq!(v["operator"], builtin.to_json());
    assert_eq!(v["precision"], "exact-rational");
}

#[test]
fn even_primes_nonunit_powers_and_unknown_suites_are_config_errors() {
    let out = run(&[
        "instantons",
        "--operator",
        "quintic",
        "--terms",
        "3",
        "--power",
        "3",
        "--kappa",
        "5",
        "--check-primes",
        "6",
    ]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());

    let out = run(&[
        "instantons",
        "--operator",
        "quintic",
        "--terms",
        "3",
        "--power",
        "4",
        "--kappa",
        "5",
    ]);
    assert_eq!(code(&out), 2);

    let out = run(&["verify", "--suite", "everything"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());

    let out = run(&["frobenius-basis", "--terms", "4"]);
    assert_eq!(code(&out), 2, "missing selector is a config error");
}

#[test]
fn malformed_config_exits_2_without_partial_output() {
    let cfg = temp_path("bad.toml");
    let target = temp_path("bad-output.tsv");
    std::fs::write(&cfg, "primes = [7,\n").unwrap();
    let out = run(&[
        "check",
        "--operator",
        "quintic",
        "--terms",
        "4",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!target.exists(), "no partial output on config errors");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "parse error names the line: {}", err);
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn config_file_supplies_values_and_flags_override_them() {
    let cfg = temp_path("run.toml");
    std::fs::write(
        &cfg,
        "operator = \"quintic\"\nterms = 4\npower = 3\nkappa = 5\ncheck-primes = [7]\n",
    )
    .unwrap();
    let from_file = run(&["instantons", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&from_file), 0);
    let text = stdout(&from_file);
    assert!(text.lines().any(|l| l.starts_with("4\t")));
    assert!(!text.lines().any(|l| l.starts_with("5\t")));

    let overridden = run(&[
        "instantons",
        "--config",
        cfg.to_str().unwrap(),
        "--terms",
        "6",
    ]);
    assert_eq!(code(&overridden), 0);
    assert!(stdout(&overridden).lines().any(|l| l.starts_with("6\t")));
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn config_command_mismatch_is_rejected() {
    let cfg = temp_path("mismatch.toml");
    std::fs::write(&cfg, "command = \"mirror\"\noperator = \"quintic\"\nterms = 4\n").unwrap();
    let out = run(&["frobenius-basis", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn hasse_witt_json_reports_units_for_the_two_simplex() {
    let out = run(&[
        "hasse-witt",
        "--family",
        "simplicial",
        "--dim",
        "2",
        "--prime",
        "7",
        "--terms",
        "6",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json report");
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2, "one report per k = 1, 2");
    for rep in reports {
        assert!(rep["unit"].as_bool().unwrap());
        assert!(rep["block_product_matches"].as_bool().unwrap());
        for key in ["k", "size", "L_k", "det_valuation", "per_face_blocks"] {
            assert!(!rep[key].is_null(), "field {} present", key);
        }
    }
}

#[test]
fn frobenius_structure_json_passes_for_the_two_simplex() {
    let out = run(&[
        "frobenius-structure",
        "--family",
        "simplicial",
        "--dim",
        "2",
        "--prime",
        "7",
        "--precision",
        "2",
        "--terms",
        "8",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json report");
    assert_eq!(v["family"], "simplicial:2");
    assert_eq!(v["N"], 2);
    assert!(v["functional_equation"].as_bool().unwrap());
    assert_eq!(v["alpha_congruences"], "pass");
    assert_eq!(v["lambda_divisibility"], "pass");
    assert_eq!(v["alpha"].as_array().unwrap().len(), 2);
}

#[test]
fn direct_and_splitting_criteria_agree_for_the_quintic() {
    let out = run(&[
        "check",
        "--operator",
        "quintic",
        "--terms",
        "12",
        "--primes",
        "7",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json report");
    let prime = &v["primes"].as_array().unwrap()[0];
    assert!(prime["coefficientwise_agreement"].as_bool().unwrap());
    assert_eq!(v["status"], "pass");
}

#[test]
fn custom_family_file_drives_the_hasse_witt_report() {
    let fam = temp_path("square.json");
    std::fs::write(
        &fam,
        r#"{"g": [{"exp": [1, 1], "coeff": 1}, {"exp": [1, -1], "coeff": 1},
                 {"exp": [-1, 1], "coeff": 1}, {"exp": [-1, -1], "coeff": 1}],
            "facets": [[1, 0], [-1, 0], [0, 1], [0, -1]]}"#,
    )
    .unwrap();
    let out = run(&[
        "hasse-witt",
        "--family",
        fam.to_str().unwrap(),
        "--prime",
        "7",
        "--terms",
        "4",
    ]);
    let c = code(&out);
    assert!(c == 0 || c == 1, "raw custom report, got {}", c);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json report");
    assert_eq!(v["family"], "custom");
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
    std::fs::remove_file(&fam).ok();
}

#[test]
fn smoke_suite_passes() {
    let out = run(&["verify", "--suite", "smoke"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("# status: pass"));
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cells: Vec<&str> = line.split('\t').collect();
        assert_eq!(cells[1], "pass", "check {} passed", cells[0]);
    }
}

#[test]
fn reports_go_to_the_output_path_when_asked() {
    let target = temp_path("basis.tsv");
    let out = run(&[
        "frobenius-basis",
        "--operator",
        "quintic",
        "--terms",
        "3",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty(), "data goes to the file");
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.contains("# command: frobenius-basis"));
    assert!(text.lines().any(|l| l == "0\t0\t1"), "F_0 starts at 1");
    std::fs::remove_file(&target).ok();
}
