//! End-to-end tests of the `gavel` binary: exit codes, stdout shape, and
//! file outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
        .display()
        .to_string()
}

fn gavel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gavel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn validate_reports_counts_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let output = gavel(&[
        "validate",
        &fixture("kb/full.gkb"),
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    let stdout = stdout_of(&output);
    assert!(stdout.contains("statements: 14 (rules 5, preferences 3, facts 6)"));
    assert!(stdout.trim_end().ends_with("valid"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    assert_eq!(report["counts"]["rules"], 5);
    assert_eq!(report["counts"]["preferences"], 3);
    assert_eq!(report["counts"]["facts"], 6);
}

#[test]
fn validate_flags_parse_errors_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.gkb");
    std::fs::write(&path, "rule(r1(X), use(X), [is_sparse(X)])").unwrap();
    let output = gavel(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&output), 2);
    assert!(stderr_of(&output).contains("expected"));
}

#[test]
fn validate_flags_cross_file_duplicates_with_exit_three() {
    let output = gavel(&["validate", &fixture("kb/full.gkb"), &fixture("kb/full.gkb")]);
    assert_eq!(code(&output), 3);
    assert!(stdout_of(&output).contains("duplicate_label"));
}

#[test]
fn ground_prints_the_canonical_ground_program() {
    let output = gavel(&[
        "ground",
        &fixture("kb/full.gkb"),
        "--goal",
        "neg(use(X = lime))",
    ]);
    assert_eq!(code(&output), 0);
    let stdout = stdout_of(&output);
    assert_eq!(stdout.lines().count(), 14);
    assert!(stdout.contains("rule(r1(lime), use(lime), [is_sparse(lime)])."));
    assert!(stdout.contains("rule(pr1(lime), prefer(r2(lime), r1(lime)), [])."));
    // The binding restricts schema instances to lime; ground facts about
    // the other explainer are untouched.
    assert!(!stdout.contains("r1(counterfactual)"));
    assert!(stdout.contains("rule(f1, is_sparse(counterfactual), [])."));
}

#[test]
fn query_replays_the_lime_rejection() {
    let output = gavel(&[
        "query",
        &fixture("kb/curated.gkb"),
        "--goal",
        "neg(use(X = lime))",
        "--trace",
    ]);
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    let stdout = stdout_of(&output);
    assert!(
        stdout.trim_end().ends_with("position {r2(lime), r5(lime)}"),
        "unexpected tail: {stdout}"
    );
    assert!(stdout.contains("verdict: accepted (via r2(lime))"));
    assert!(stdout.contains("flip r1(lime) -> r2(lime) into r2(lime) -> r1(lime) (pr1(lime))"));
    // Piped output carries no colour codes.
    assert!(!stdout.contains('\x1b'));
}

#[test]
fn query_on_an_empty_kb_is_rejected_with_exit_one() {
    let output = gavel(&["query", &fixture("kb/empty.gkb"), "--goal", "use(lime)"]);
    assert_eq!(code(&output), 1);
    assert!(stdout_of(&output).contains("not accepted"));
}

#[test]
fn query_writes_dot_and_json_files() {
    let dir = tempfile::tempdir().unwrap();
    let dot_path = dir.path().join("out.dot");
    let json_path = dir.path().join("out.json");
    let output = gavel(&[
        "query",
        &fixture("kb/curated.gkb"),
        "--goal",
        "neg(use(X = lime))",
        "--dot",
        dot_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0);

    let dot = std::fs::read_to_string(dot_path).unwrap();
    assert!(dot.starts_with("digraph framework {"));
    assert!(dot.contains("\"r2(lime)\" [color=green];"));
    assert!(dot.contains("\"r3(lime)\" -> \"r2(lime)\" [style=dotted];"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["labelling"]["r2(lime)"], "IN");
    assert_eq!(report["verdicts"][0]["accepted"], true);
}

#[test]
fn malformed_goal_is_a_parse_error() {
    let output = gavel(&["query", &fixture("kb/full.gkb"), "--goal", "use(lime"]);
    assert_eq!(code(&output), 2);
}

#[test]
fn non_ground_goal_is_a_usage_error() {
    let output = gavel(&["query", &fixture("kb/full.gkb"), "--goal", "use(X)"]);
    assert_eq!(code(&output), 4);
    assert!(stderr_of(&output).contains("not ground"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(code(&gavel(&["frobnicate"])), 4);
    assert_eq!(code(&gavel(&["query", "--goal", "use(lime)"])), 4);
}

#[test]
fn help_exits_zero() {
    let output = gavel(&["--help"]);
    assert_eq!(code(&output), 0);
    assert!(stdout_of(&output).contains("Usage"));
}

#[test]
fn solve_af_accepts_the_flipped_example() {
    let output = gavel(&["solve-af", &fixture("af/example.af"), "--query", "r2"]);
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    let stdout = stdout_of(&output);
    assert!(stdout.contains("flip r1 -> r2 into r2 -> r1 (pref r2 r1)"));
    assert!(stdout.contains("position {r2, r5}"));
    assert!(stdout.trim_end().ends_with("argument r2: accepted"));

    let rejected = gavel(&["solve-af", &fixture("af/example.af"), "--query", "r1"]);
    assert_eq!(code(&rejected), 1);

    let unknown = gavel(&["solve-af", &fixture("af/example.af"), "--query", "zz"]);
    assert_eq!(code(&unknown), 4);
}

#[test]
fn select_on_the_curated_kb_chooses_counterfactual() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("selection.json");
    let output = gavel(&[
        "select",
        &fixture("kb/curated.gkb"),
        "--candidates",
        "lime,counterfactual",
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    let stdout = stdout_of(&output);
    assert!(stdout.contains("candidate counterfactual: recommended"));
    assert!(stdout.contains("candidate lime: rejected"));
    assert!(stdout.contains("neg(use(lime)): accepted (via r2(lime))"));
    assert!(stdout.trim_end().ends_with("chosen: counterfactual"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    assert_eq!(report["chosen"], "counterfactual");
    assert_eq!(report["fallback_used"], false);
    assert_eq!(report["inputs"]["candidates"][0], "lime");
    assert_eq!(report["verdicts"][0]["candidate"], "counterfactual");
    assert_eq!(report["verdicts"][0]["status"], "recommended");
}

#[test]
fn select_fallback_uses_the_default_and_exit_one() {
    let output = gavel(&[
        "select",
        &fixture("kb/empty.gkb"),
        "--candidates",
        "lime",
        "--stakeholder",
        &fixture("stakeholder/default_only.stakeholder.json"),
    ]);
    assert_eq!(code(&output), 1);
    let stdout = stdout_of(&output);
    assert!(stdout.contains("candidate lime: undecided"));
    assert!(stdout.contains("fallback: no candidate recommended; default explainer chosen"));
    assert!(stdout.trim_end().ends_with("chosen: lime"));
}

#[test]
fn select_from_profiles_and_stakeholder_model() {
    let output = gavel(&[
        "select",
        &fixture("kb/empty.gkb"),
        "--candidates",
        "lime,counterfactual",
        "--profiles",
        &fixture("profiles"),
        "--stakeholder",
        &fixture("stakeholder/agency.stakeholder.json"),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    // The compiled profiles match the single-file listing, where lime's
    // cheapness leaves its sparsity argument unopposed.
    assert!(stdout_of(&output).trim_end().ends_with("chosen: lime"));
}

#[test]
fn select_rejects_unknown_candidates_against_the_profile_registry() {
    let output = gavel(&[
        "select",
        &fixture("kb/empty.gkb"),
        "--candidates",
        "anchstr",
        "--profiles",
        &fixture("profiles"),
    ]);
    assert_eq!(code(&output), 4);
    let stderr = stderr_of(&output);
    assert!(stderr.contains("unknown candidate `anchstr`"));
    assert!(stderr.contains("counterfactual, lime, shap"));
}

#[test]
fn export_dot_handles_both_input_kinds() {
    let output = gavel(&["export-dot", &fixture("af/example.af")]);
    assert_eq!(code(&output), 0);
    assert!(stdout_of(&output).starts_with("digraph framework {"));

    let dir = tempfile::tempdir().unwrap();
    let out_path: PathBuf = dir.path().join("graph.dot");
    let output = gavel(&[
        "export-dot",
        &fixture("kb/curated.gkb"),
        "--goal",
        "use(X = counterfactual)",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0);
    let dot = std::fs::read_to_string(out_path).unwrap();
    assert!(dot.contains("\"r4(counterfactual)\" [color=green];"));

    let missing_goal = gavel(&["export-dot", &fixture("kb/curated.gkb")]);
    assert_eq!(code(&missing_goal), 4);
}

#[test]
fn timing_flag_adds_a_non_canonical_block() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("timed.json");
    let output = gavel(&[
        "query",
        &fixture("kb/curated.gkb"),
        "--goal",
        "neg(use(X = lime))",
        "--timing",
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0);
    assert!(stdout_of(&output).contains("timing: total "));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    assert!(report["timing"]["total_ms"].is_number());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "query",
        &fixture("kb/curated.gkb"),
        "--goal",
        "neg(use(X = lime))",
        "--trace",
    ];
    let first = gavel(&args);
    let second = gavel(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(code(&first), code(&second));
}
