//! End-to-end tests of the `qframe` binary: exit codes, printed
//! summaries, and byte-stable file round trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qframe_core::io::{
    load_frame_file, load_search_result, to_json_string, FrameFileJson, LoadedFrame,
    SearchResultJson,
};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qframe")
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qframe-cli-{}-{name}", std::process::id()));
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should spawn")
}

fn run_with_env(dir: &Path, args: &[&str], key: &str, value: &str) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env(key, value)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        stdout_of(out),
        stderr_of(out)
    );
}

const ZERO_STATE: &str = r#"{
  "dim": 2,
  "re": [[1.0, 0.0], [0.0, 0.0]],
  "im": [[0.0, 0.0], [0.0, 0.0]]
}
"#;

const IDENTITY_POVM: &str = r#"{
  "outcomes": [
    {
      "dim": 2,
      "re": [[1.0, 0.0], [0.0, 1.0]],
      "im": [[0.0, 0.0], [0.0, 0.0]]
    }
  ]
}
"#;

#[test]
fn build_wootters_qubit_reports_eigenvalues_and_round_trips() {
    let dir = workdir("build-wootters");
    let out = run_in(&dir, &["frame", "build", "--kind", "wootters", "--dim", "2"]);
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("-0.183013"), "stdout: {text}");
    assert!(text.contains("-0.366025"), "stdout: {text}");

    for (file, want_kind) in [
        ("wootters_d2_frame.json", "frame"),
        ("wootters_d2_dual.json", "dual"),
    ] {
        let path = dir.join(file);
        let on_disk = std::fs::read_to_string(&path).unwrap();
        let reemitted = match load_frame_file(&path).unwrap() {
            LoadedFrame::Frame(f) => {
                assert_eq!(want_kind, "frame");
                to_json_string(&FrameFileJson::from_frame(&f)).unwrap()
            }
            LoadedFrame::Dual(g) => {
                assert_eq!(want_kind, "dual");
                to_json_string(&FrameFileJson::from_dual(&g)).unwrap()
            }
        };
        assert_eq!(on_disk, reemitted, "{file} should round-trip byte for byte");
    }
}

#[test]
fn build_rejects_unsupported_dimension() {
    let dir = workdir("build-bad-dim");
    let out = run_in(&dir, &["frame", "build", "--kind", "wootters", "--dim", "4"]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("unsupported dimension"));

    let out = run_in(&dir, &["frame", "build", "--kind", "sic", "--dim", "3"]);
    assert_exit(&out, 2);

    let out = run_in(&dir, &["frame", "build", "--kind", "bogus", "--dim", "2"]);
    assert_exit(&out, 2);
}

#[test]
fn build_diagonal_warns_that_the_pair_is_not_dual() {
    let dir = workdir("build-diagonal");
    let out = run_in(&dir, &["frame", "build", "--kind", "diagonal", "--dim", "3"]);
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("warning"), "stdout: {text}");
    assert!(text.contains("1.000000"), "stdout: {text}");
}

#[test]
fn repr_ground_state_emits_half_half_zero_zero() {
    let dir = workdir("repr-state");
    assert_exit(
        &run_in(&dir, &["frame", "build", "--kind", "wootters", "--dim", "2"]),
        0,
    );
    std::fs::write(dir.join("zero.json"), ZERO_STATE).unwrap();
    let out = run_in(
        &dir,
        &[
            "repr",
            "--input",
            "zero.json",
            "--frame",
            "wootters_d2_frame.json",
        ],
    );
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("0.5,0.5,0,0"), "stdout: {text}");
    assert!(text.contains("\"in_unit_interval\": true"), "stdout: {text}");
}

#[test]
fn repr_identity_povm_has_unit_responses_everywhere() {
    let dir = workdir("repr-povm");
    assert_exit(
        &run_in(&dir, &["frame", "build", "--kind", "wootters", "--dim", "2"]),
        0,
    );
    std::fs::write(dir.join("identity_povm.json"), IDENTITY_POVM).unwrap();
    let out = run_in(
        &dir,
        &[
            "repr",
            "--input",
            "identity_povm.json",
            "--frame",
            "wootters_d2_dual.json",
        ],
    );
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("1,1,1,1"), "stdout: {}", stdout_of(&out));
}

#[test]
fn repr_reports_parse_errors_with_a_line_number() {
    let dir = workdir("repr-broken");
    assert_exit(
        &run_in(&dir, &["frame", "build", "--kind", "wootters", "--dim", "2"]),
        0,
    );
    std::fs::write(dir.join("broken.json"), "{\"dim\": 2,\n \"re\": [[1.0, 0.0],\n").unwrap();
    let out = run_in(
        &dir,
        &[
            "repr",
            "--input",
            "broken.json",
            "--frame",
            "wootters_d2_frame.json",
        ],
    );
    assert_exit(&out, 3);
    assert!(stderr_of(&out).contains("line 3"), "stderr: {}", stderr_of(&out));
}

#[test]
fn repr_rejects_a_state_paired_with_a_dual_file() {
    let dir = workdir("repr-kind-mismatch");
    assert_exit(
        &run_in(&dir, &["frame", "build", "--kind", "wootters", "--dim", "2"]),
        0,
    );
    std::fs::write(dir.join("zero.json"), ZERO_STATE).unwrap();
    let out = run_in(
        &dir,
        &[
            "repr",
            "--input",
            "zero.json",
            "--frame",
            "wootters_d2_dual.json",
        ],
    );
    assert_exit(&out, 3);
    assert!(stderr_of(&out).contains("requires kind"));
}

#[test]
fn witness_reports_the_negative_dual_premise_for_the_tetrahedral_pair() {
    let dir = workdir("witness-sic");
    assert_exit(&run_in(&dir, &["frame", "build", "--kind", "sic", "--dim", "2"]), 0);
    let out = run_in(
        &dir,
        &[
            "nogo",
            "witness",
            "--frame",
            "sic_d2_frame.json",
            "--dual",
            "sic_d2_dual.json",
        ],
    );
    assert_exit(&out, 0);
    assert!(
        stdout_of(&out).contains("dual not positive (min eigenvalue -1.000000)"),
        "stdout: {}",
        stdout_of(&out)
    );
}

#[test]
fn witness_appears_once_the_positivity_premise_is_waived() {
    let dir = workdir("witness-waived");
    assert_exit(&run_in(&dir, &["frame", "build", "--kind", "sic", "--dim", "2"]), 0);
    let out = run_in(
        &dir,
        &[
            "nogo",
            "witness",
            "--frame",
            "sic_d2_frame.json",
            "--dual",
            "sic_d2_dual.json",
            "--positivity-tol",
            "1.01",
        ],
    );
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("contradiction witness"), "stdout: {text}");
    assert_eq!(
        text.matches("proportionality residual 0.307405").count(),
        2,
        "stdout: {text}"
    );
}

#[test]
fn witness_search_fails_when_the_frame_matches_one_basis() {
    let dir = workdir("witness-none");
    assert_exit(
        &run_in(&dir, &["frame", "build", "--kind", "diagonal", "--dim", "3"]),
        0,
    );
    let out = run_in(
        &dir,
        &[
            "nogo",
            "witness",
            "--frame",
            "diagonal_d3_frame.json",
            "--dual",
            "diagonal_d3_dual.json",
            "--duality-tol",
            "2",
        ],
    );
    assert_exit(&out, 4);
    assert!(stderr_of(&out).contains("no proportionality witness"));
}

#[test]
fn audit_names_the_violated_clause() {
    let dir = workdir("audit");
    assert_exit(
        &run_in(&dir, &["frame", "build", "--kind", "diagonal", "--dim", "3"]),
        0,
    );
    assert_exit(
        &run_in(&dir, &["frame", "build", "--kind", "wootters", "--dim", "2"]),
        0,
    );
    let out = run_in(
        &dir,
        &[
            "nogo",
            "audit",
            "--frame",
            "diagonal_d3_frame.json",
            "--dual",
            "diagonal_d3_dual.json",
        ],
    );
    assert_exit(&out, 0);
    assert!(
        stdout_of(&out).contains("verdict (c): duality residual 1.000000"),
        "stdout: {}",
        stdout_of(&out)
    );
    let out = run_in(
        &dir,
        &[
            "nogo",
            "audit",
            "--frame",
            "wootters_d2_frame.json",
            "--dual",
            "wootters_d2_dual.json",
        ],
    );
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("verdict (a)(b)"));
}

#[test]
fn search_reports_every_restart_and_writes_a_loadable_result() {
    let dir = workdir("search");
    let out = run_in(
        &dir,
        &[
            "nogo", "search", "--dim", "2", "--ontic", "4", "--restarts", "2", "--iters",
            "50", "--seed", "3", "--output", "sr.json",
        ],
    );
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("restart 0:"), "stdout: {text}");
    assert!(text.contains("restart 1:"), "stdout: {text}");
    assert!(text.contains("trichotomy holds"), "stdout: {text}");
    assert!(!text.contains("COUNTEREXAMPLE"), "stdout: {text}");

    let path = dir.join("sr.json");
    let result = load_search_result(&path).unwrap();
    assert_eq!(result.restart_trace.len(), 2);
    let (neg, residual) = result.recompute_scalars().unwrap();
    assert!((neg - result.best_total_negativity).abs() < 1e-9);
    assert!((residual - result.duality_residual).abs() < 1e-9);

    let on_disk = std::fs::read_to_string(&path).unwrap();
    let reemitted = to_json_string(&SearchResultJson::from_result(&result)).unwrap();
    assert_eq!(on_disk, reemitted, "search result should round-trip byte for byte");
}

#[test]
fn search_seed_env_var_matches_the_flag() {
    let dir = workdir("search-env");
    let args_env = [
        "nogo", "search", "--dim", "2", "--ontic", "4", "--restarts", "1", "--iters", "30",
        "--output", "env.json",
    ];
    let out = run_with_env(&dir, &args_env, "QFRAME_SEED", "5");
    assert_exit(&out, 0);
    let args_flag = [
        "nogo", "search", "--dim", "2", "--ontic", "4", "--restarts", "1", "--iters", "30",
        "--seed", "5", "--output", "flag.json",
    ];
    assert_exit(&run_in(&dir, &args_flag), 0);
    let from_env = std::fs::read_to_string(dir.join("env.json")).unwrap();
    let from_flag = std::fs::read_to_string(dir.join("flag.json")).unwrap();
    assert_eq!(from_env, from_flag);
}

#[test]
fn demo_passes_by_default_and_fails_below_double_precision() {
    let dir = workdir("demo");
    let out = run_in(&dir, &["demo"]);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("all 7 stages passed"));

    let out = run_in(&dir, &["demo", "--tol", "1e-15"]);
    assert_exit(&out, 4);
    assert!(stdout_of(&out).contains("FAIL"), "stdout: {}", stdout_of(&out));

    let out = run_in(&dir, &["demo", "--tol=-1"]);
    assert_exit(&out, 3);
}

#[test]
fn demo_verdicts_do_not_depend_on_the_seed() {
    let dir = workdir("demo-seeds");
    for seed in 0..10u64 {
        let out = run_in(&dir, &["demo", "--seed", &seed.to_string()]);
        assert_exit(&out, 0);
        let text = stdout_of(&out);
        assert_eq!(
            text.matches(": pass (").count(),
            7,
            "seed {seed} stdout: {text}"
        );
    }
    let out = run_with_env(&dir, &["demo"], "QFRAME_SEED", "9");
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("seed 9"));
}
