//! End-to-end CLI behavior: exit codes, determinism, resume, and file
//! formats.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mtvaug"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_fixture_corpus(dir: &Path) -> (String, String, String) {
    let train = dir.join("train.tsv");
    let test = dir.join("test.tsv");
    let lexicon = dir.join("lexicon.tsv");
    let mut rows = String::new();
    for i in 0..24 {
        if i % 2 == 0 {
            rows.push_str(&format!("pos\tgood w{i} fine movie great plot w{}\n", i + 1));
        } else {
            rows.push_str(&format!("neg\tbad w{i} awful movie dull plot w{}\n", i + 1));
        }
    }
    std::fs::write(&train, &rows).unwrap();
    std::fs::write(&test, "pos\tgood fine story\nneg\tbad awful story\n").unwrap();
    std::fs::write(&lexicon, "good\tfine,nice\nbad\tawful,poor\nmovie\tfilm\n").unwrap();
    (
        train.to_string_lossy().into_owned(),
        test.to_string_lossy().into_owned(),
        lexicon.to_string_lossy().into_owned(),
    )
}

#[test]
fn help_exits_zero_for_every_subcommand() {
    for sub in ["augment", "train", "sweep", "report", "gen-synthetic"] {
        let out = bin().args([sub, "--help"]).output().unwrap();
        assert!(out.status.success(), "{sub} --help failed");
    }
    assert!(bin().arg("--help").output().unwrap().status.success());
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = bin().args(["train", "--definitely-not-a-flag", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gamma_out_of_range_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test, _) = write_fixture_corpus(dir.path());
    let out = bin()
        .args(["train", "--train", &train, "--test", &test, "--gamma-o", "1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("gamma_o"), "stderr: {stderr}");
}

#[test]
fn substitution_without_lexicon_reports_missing_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test, _) = write_fixture_corpus(dir.path());
    let out = bin()
        .args([
            "train", "--train", &train, "--test", &test, "--operator", "substitution",
            "--alpha", "0.1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing lexicon"), "stderr: {stderr}");
}

#[test]
fn missing_input_file_is_runtime_error() {
    let out = bin()
        .args(["train", "--train", "/nonexistent.tsv", "--test", "/nonexistent.tsv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn train_prints_four_decimal_accuracy_and_saves_model() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test, lexicon) = write_fixture_corpus(dir.path());
    let model_path = dir.path().join("model.bin");
    let out = run_ok(&[
        "train", "--train", &train, "--test", &test, "--lexicon", &lexicon,
        "--operator", "substitution", "--alpha", "0.2", "--gamma-o", "0.5",
        "--epochs", "5", "--dim", "512", "--seed", "3",
        "--model-out", model_path.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let line = stdout.lines().next().unwrap();
    assert!(line.starts_with("accuracy=0.") || line.starts_with("accuracy=1."), "{line}");
    let digits = line.trim_start_matches("accuracy=").split('.').nth(1).unwrap();
    assert_eq!(digits.len(), 4, "expected 4 decimals in {line}");
    assert!(model_path.exists());
}

#[test]
fn vanilla_and_gamma_one_invocations_print_identical_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test, lexicon) = write_fixture_corpus(dir.path());
    let base = [
        "train", "--train", &train, "--test", &test, "--epochs", "6", "--dim", "512",
        "--seed", "11",
    ];
    let vanilla = run_ok(&base);
    let mut with_op = base.to_vec();
    with_op.extend([
        "--lexicon", &lexicon, "--operator", "dropout", "--alpha", "0.4", "--gamma-o", "1",
    ]);
    let gamma_one = run_ok(&with_op);
    assert_eq!(vanilla.stdout, gamma_one.stdout);
}

#[test]
fn augment_writes_k_copies_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _, lexicon) = write_fixture_corpus(dir.path());
    let out_a = dir.path().join("aug_a.tsv");
    let out_b = dir.path().join("aug_b.tsv");
    let args = |out: &Path| {
        vec![
            "augment".to_string(),
            "--input".into(), train.clone(),
            "--lexicon".into(), lexicon.clone(),
            "--operator".into(), "substitution".into(),
            "--alpha".into(), "0.3".into(),
            "--copies".into(), "2".into(),
            "--seed".into(), "9".into(),
            "--output".into(), out.to_string_lossy().into_owned(),
        ]
    };
    run_ok(&args(&out_a).iter().map(String::as_str).collect::<Vec<_>>());
    run_ok(&args(&out_b).iter().map(String::as_str).collect::<Vec<_>>());
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same invocation must produce identical bytes");
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 24 * 2);
}

#[test]
fn augment_alpha_zero_preserves_normalized_text() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.tsv");
    std::fs::write(&input, "pos\tGood movie\nneg\tBad plot\n").unwrap();
    let output = dir.path().join("out.tsv");
    run_ok(&[
        "augment", "--input", input.to_str().unwrap(), "--operator", "shuffling",
        "--alpha", "0", "--output", output.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&output).unwrap();
    assert_eq!(text, "pos\tgood movie\nneg\tbad plot\n");
}

fn sweep_args(train: &str, test: &str, lexicon: &str, out: &str, jobs: &str) -> Vec<String> {
    [
        "sweep", "--train", train, "--test", test, "--lexicon", lexicon,
        "--operators", "substitution,dropout", "--alphas", "0.1,0.4", "--gammas", "0,0.5",
        "--seeds", "1,2", "--epochs", "3", "--dim", "512", "--learning-rate", "0.2",
        "--out", out, "--jobs", jobs,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn read_reports(dir: &Path) -> Vec<(String, Vec<u8>)> {
    ["runs.csv", "summary.json", "curves.csv", "heatmap.csv"]
        .iter()
        .map(|name| (name.to_string(), std::fs::read(dir.join(name)).unwrap()))
        .collect()
}

#[test]
fn sweep_outputs_are_jobs_independent_and_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test, lexicon) = write_fixture_corpus(dir.path());

    let out1 = dir.path().join("out1");
    let out2 = dir.path().join("out2");
    let a1 = sweep_args(&train, &test, &lexicon, out1.to_str().unwrap(), "1");
    let a2 = sweep_args(&train, &test, &lexicon, out2.to_str().unwrap(), "3");
    let out = run_ok(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    run_ok(&a2.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(read_reports(&out1), read_reports(&out2));

    // Progress lines have the documented shape.
    let stdout = String::from_utf8(out.stdout).unwrap();
    let cell_lines: Vec<&str> = stdout.lines().filter(|l| l.starts_with("cell ")).collect();
    // 2 ops x 2 alphas x 2 gammas + baseline.
    assert_eq!(cell_lines.len(), 9);
    assert!(cell_lines
        .iter()
        .any(|l| l.contains("operator=none") && l.contains("gamma_o=1")));
    for line in &cell_lines {
        assert!(line.contains("operator=") && line.contains("alpha=") && line.contains("mean_acc="));
    }

    // Truncate the journal to simulate an interrupted sweep, then resume.
    let runs_path = out1.join("runs.csv");
    let full = std::fs::read_to_string(&runs_path).unwrap();
    let truncated: String = full.lines().take(1 + 2 + 2 * 2).map(|l| format!("{l}\n")).collect();
    std::fs::write(&runs_path, truncated).unwrap();
    for name in ["summary.json", "curves.csv", "heatmap.csv"] {
        std::fs::remove_file(out1.join(name)).unwrap();
    }
    let resumed = run_ok(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    let resumed_stdout = String::from_utf8(resumed.stdout).unwrap();
    assert!(resumed_stdout.contains("resuming:"), "{resumed_stdout}");
    assert_eq!(read_reports(&out1), read_reports(&out2));
}

#[test]
fn sweep_reads_json_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test, lexicon) = write_fixture_corpus(dir.path());
    let out_flag = dir.path().join("out_flag");
    let out_cfg = dir.path().join("out_cfg");

    // Full flag run for reference.
    let reference = sweep_args(&train, &test, &lexicon, out_flag.to_str().unwrap(), "1");
    run_ok(&reference.iter().map(String::as_str).collect::<Vec<_>>());

    // Same settings via config file, except alphas, which the flag overrides.
    let config = serde_json::json!({
        "train": train,
        "test": test,
        "lexicon": lexicon,
        "operators": "substitution,dropout",
        "alphas": "0.9",
        "gammas": "0,0.5",
        "seeds": "1,2",
        "epochs": 3,
        "dim": 512,
        "learning-rate": 0.2,
        "out": out_cfg.to_str().unwrap(),
    });
    let config_path = dir.path().join("sweep.json");
    std::fs::write(&config_path, serde_json::to_string(&config).unwrap()).unwrap();
    run_ok(&[
        "sweep", "--config", config_path.to_str().unwrap(), "--alphas", "0.1,0.4",
    ]);
    assert_eq!(read_reports(&out_flag), read_reports(&out_cfg));
}

#[test]
fn report_regenerates_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test, lexicon) = write_fixture_corpus(dir.path());
    let out = dir.path().join("out");
    let args = sweep_args(&train, &test, &lexicon, out.to_str().unwrap(), "1");
    run_ok(&args.iter().map(String::as_str).collect::<Vec<_>>());

    let regen = dir.path().join("regen");
    run_ok(&[
        "report", "--runs", out.join("runs.csv").to_str().unwrap(),
        "--out", regen.to_str().unwrap(),
    ]);
    for name in ["summary.json", "curves.csv", "heatmap.csv"] {
        assert_eq!(
            std::fs::read(out.join(name)).unwrap(),
            std::fs::read(regen.join(name)).unwrap(),
            "{name} differs after regeneration"
        );
    }

    // Header mismatch is rejected.
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "wrong,header\n").unwrap();
    let out_err = bin()
        .args(["report", "--runs", bad.to_str().unwrap(), "--out", regen.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out_err.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out_err.stderr).contains("header"));

    // Baseline rows are required.
    let no_base = dir.path().join("no_base.csv");
    std::fs::write(
        &no_base,
        "operator,alpha,gamma_o,seed,accuracy,baseline_accuracy,boost_pp\nsubstitution,0.1,0,1,0.8,0.79,1\n",
    )
    .unwrap();
    let out_err = bin()
        .args(["report", "--runs", no_base.to_str().unwrap(), "--out", regen.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out_err.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out_err.stderr).contains("baseline"));
}

#[test]
fn gen_synthetic_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        run_ok(&[
            "gen-synthetic", "--out-dir", out.to_str().unwrap(),
            "--train-size", "50", "--test-size", "20",
        ]);
    }
    for name in ["train.tsv", "test.tsv", "lexicon.tsv"] {
        assert_eq!(
            std::fs::read(out_a.join(name)).unwrap(),
            std::fs::read(out_b.join(name)).unwrap()
        );
    }
    let train = std::fs::read_to_string(out_a.join("train.tsv")).unwrap();
    assert_eq!(train.lines().count(), 50);
}
