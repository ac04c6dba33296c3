//! Exercises the binary surface: exit codes, schemas, config precedence.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corpusbias"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run_in(dir, args);
    assert!(
        out.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn unknown_flag_exits_one_with_usage() {
    let out = bin().args(["weat", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Usage"), "stderr: {stderr}");
}

#[test]
fn missing_required_flag_exits_one_with_usage() {
    let out = bin().arg("train").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn help_and_version_exit_zero() {
    for args in [vec!["--help"], vec!["weat", "--help"], vec!["--version"]] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn unreadable_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["train", "--shard", "missing.txt", "--out", "v.glove"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_hyperparameters_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.txt"), "a b a b a b\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "train", "--shard", "s.txt", "--out", "v.glove", "--dim", "0",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn diverging_training_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.txt"), "a b a b c a b c a c\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "train", "--shard", "s.txt", "--out", "v.glove", "--dim", "4", "--window", "3",
            "--min-count", "1", "--iters", "60", "--learning-rate", "1e18", "--seed", "1",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
}

#[test]
fn weat_result_json_has_the_full_schema() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "synth", "--beta", "0.5", "--docs", "400", "--seed", "3", "--out", "c.txt",
            "--vocab", "80", "--doc-len-min", "8", "--doc-len-max", "16",
        ],
    );
    ok(
        dir.path(),
        &[
            "train", "--shard", "c.txt", "--out", "v.glove", "--dim", "8", "--window", "4",
            "--min-count", "2", "--iters", "2", "--seed", "3",
        ],
    );
    // marker sets double as word sets for synthetic corpora
    fs::create_dir(dir.path().join("sets")).unwrap();
    let write_set = |name: &str, prefix: &str, n: usize| {
        let body: String = (0..n).map(|i| format!("{prefix}{i:02}\n")).collect();
        fs::write(dir.path().join("sets").join(name), body).unwrap();
    };
    write_set("names_black.txt", "xmark", 8);
    write_set("names_white.txt", "ymark", 8);
    write_set("pleasant.txt", "aterm", 12);
    write_set("unpleasant.txt", "bterm", 12);
    ok(
        dir.path(),
        &[
            "weat", "--embeddings", "v.glove", "--sets", "sets", "--shuffles", "64",
            "--alpha", "0.05", "--seed", "5", "--out", "r.json",
        ],
    );
    let value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    for key in [
        "corpus",
        "observed",
        "normalized",
        "p_value",
        "significant",
        "alpha",
        "shuffles",
        "statistic",
        "direction",
        "resolved",
        "manifest",
        "randomized",
    ] {
        assert!(value.get(key).is_some(), "missing field {key}");
    }
    assert_eq!(value["randomized"].as_array().unwrap().len(), 64);
    assert_eq!(value["corpus"], "v");
    // the manifest reference names the sidecar file, which exists
    let manifest_name = value["manifest"].as_str().unwrap();
    assert!(dir.path().join(manifest_name).exists());
}

#[test]
fn config_file_fills_unset_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("conf"), "dim = 6\niters = 2\nwindow = 4\nmin-count = 2\nseed = 9\n").unwrap();
    ok(
        dir.path(),
        &[
            "synth", "--beta", "0", "--docs", "300", "--seed", "1", "--out", "c.txt",
            "--vocab", "60", "--doc-len-min", "8", "--doc-len-max", "12",
        ],
    );
    // dim comes from the config file
    ok(
        dir.path(),
        &["--config", "conf", "train", "--shard", "c.txt", "--out", "a.glove"],
    );
    // flag overrides the config file
    ok(
        dir.path(),
        &[
            "--config", "conf", "train", "--shard", "c.txt", "--out", "b.glove", "--dim", "3",
        ],
    );
    let meta_a: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("a.glove.manifest.json")).unwrap(),
    )
    .unwrap();
    let meta_b: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("b.glove.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta_a["config"]["dim"], "6");
    assert_eq!(meta_b["config"]["dim"], "3");
    assert_eq!(meta_a["seed"], 9);
}

#[test]
fn sweep_runs_specs_from_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("specs"),
        "# beta sweep\nbeta=0.0 docs=200 seed=1 vocab=60 doc-len-min=8 doc-len-max=12\nbeta=1.0 docs=200 seed=2 vocab=60 doc-len-min=8 doc-len-max=12\n",
    )
    .unwrap();
    let out = ok(
        dir.path(),
        &[
            "sweep", "--specs", "specs", "--out", "sweep.csv", "--dim", "8", "--window", "4",
            "--min-count", "2", "--iters", "3", "--shuffles", "50", "--seed", "4",
        ],
    );
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("beta,documents,seed,observed,normalized_statistic,p_value,status\n"));
    assert_eq!(csv.lines().count(), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("beta,documents"));
}

#[test]
fn ingest_rejects_unreadable_source_but_tolerates_bad_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["ingest", "--input", "missing.jsonl", "--out", "shards"],
    );
    assert_eq!(out.status.code(), Some(1));

    fs::write(
        dir.path().join("cases.jsonl"),
        r#"{"id":"a","decision_date":"1875","jurisdiction":"NY","text":"The court held."}
broken line
{"id":"b","decision_date":"1995-06-01","jurisdiction":"TX","text":"Judgments affirmed."}
"#,
    )
    .unwrap();
    let out = ok(
        dir.path(),
        &["ingest", "--input", "cases.jsonl", "--out", "shards"],
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("read 3 records"), "stdout: {stdout}");
    assert!(stdout.contains("malformed 1"));
    assert!(dir.path().join("shards/Northeast_1860-1889.txt").exists());
    assert!(dir.path().join("shards/South_1980-2009.txt").exists());
    let stats = fs::read_to_string(dir.path().join("shards/stats.csv")).unwrap();
    assert!(stats.starts_with("region,period,documents,tokens\n"));
}

#[test]
fn ingest_accepts_custom_region_and_period_files() {
    let dir = tempfile::tempdir().unwrap();
    // census map with one state moved, plus a two-interval scheme
    let mut map = String::new();
    for (codes, region) in [
        ("CT ME MA NH RI VT NJ NY PA", "Northeast"),
        ("DE FL GA MD NC SC VA DC WV AL KY MS TN AR LA OK TX", "South"),
        ("IL IN MI OH WI IA KS MN MO NE ND SD", "Midwest"),
        ("AZ CO ID MT NV NM UT WY AK CA HI OR WA", "West"),
        ("US", "Federal"),
    ] {
        for code in codes.split(' ') {
            map.push_str(&format!("{code} {region}\n"));
        }
    }
    fs::write(dir.path().join("regions.txt"), map).unwrap();
    fs::write(dir.path().join("periods.txt"), "1900 1950\n1950 2000\n").unwrap();
    fs::write(
        dir.path().join("cases.jsonl"),
        r#"{"id":"a","decision_date":"1940","jurisdiction":"CA","text":"water rights"}
{"id":"b","decision_date":"1960","jurisdiction":"CA","text":"land claims"}
"#,
    )
    .unwrap();
    ok(
        dir.path(),
        &[
            "ingest", "--input", "cases.jsonl", "--regions", "regions.txt",
            "--periods", "periods.txt", "--out", "shards",
        ],
    );
    assert!(dir.path().join("shards/West_1900-1949.txt").exists());
    assert!(dir.path().join("shards/West_1950-1999.txt").exists());
}

#[test]
fn weat_is_invalid_when_no_target_resolves() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "synth", "--beta", "0", "--docs", "300", "--seed", "2", "--out", "c.txt",
            "--vocab", "60", "--doc-len-min", "8", "--doc-len-max", "12",
        ],
    );
    ok(
        dir.path(),
        &[
            "train", "--shard", "c.txt", "--out", "v.glove", "--dim", "8", "--window", "4",
            "--min-count", "2", "--iters", "2", "--seed", "2",
        ],
    );
    // the builtin name sets cannot resolve against synthetic tokens
    let out = run_in(
        dir.path(),
        &["weat", "--embeddings", "v.glove", "--out", "r.json"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid"));
}

#[test]
fn full_pipeline_on_two_megabyte_corpus_finishes_in_time() {
    let started = std::time::Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    fs::create_dir(root.join("shards")).unwrap();
    fs::create_dir(root.join("results")).unwrap();
    // ~2 MB synthetic fixture corpus
    ok(root, &[
        "synth", "--beta", "0.7", "--docs", "13000", "--seed", "9",
        "--out", "shards/fixture.txt", "--doc-len-min", "15", "--doc-len-max", "30",
    ]);
    let size = fs::metadata(root.join("shards/fixture.txt")).unwrap().len();
    assert!(size > 1_800_000, "fixture only {size} bytes");
    ok(root, &[
        "train", "--shard", "shards/fixture.txt", "--out", "fixture.glove",
        "--dim", "32", "--window", "8", "--min-count", "10", "--iters", "8", "--seed", "9",
    ]);
    fs::create_dir(root.join("sets")).unwrap();
    let write_set = |name: &str, prefix: &str, n: usize| {
        let body: String = (0..n).map(|i| format!("{prefix}{i:02}\n")).collect();
        fs::write(root.join("sets").join(name), body).unwrap();
    };
    write_set("names_black.txt", "xmark", 8);
    write_set("names_white.txt", "ymark", 8);
    write_set("pleasant.txt", "aterm", 12);
    write_set("unpleasant.txt", "bterm", 12);
    let out = ok(root, &[
        "weat", "--embeddings", "fixture.glove", "--sets", "sets", "--shuffles", "1000",
        "--seed", "9", "--corpus", "South_1980-2009", "--out", "results/fixture.json",
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("significant"));
    ok(root, &["stats", "--shards", "shards", "--out", "results"]);
    ok(root, &["report", "--results", "results", "--out", "bundle"]);
    assert!(root.join("bundle/normalized_grid.csv").exists());
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "pipeline took {elapsed:?}, budget is five minutes"
    );
}

#[test]
fn report_on_empty_directory_emits_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("results")).unwrap();
    ok(
        dir.path(),
        &["report", "--results", "results", "--out", "bundle"],
    );
    let grid = fs::read_to_string(dir.path().join("bundle/significance_grid.csv")).unwrap();
    assert_eq!(grid, "period,Northeast,South,Midwest,West,Federal\n");
    let index = fs::read_to_string(dir.path().join("bundle/report_index.json")).unwrap();
    assert_eq!(index.trim(), "[]");
}
