use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nilink"));
    c.env("NILINK_LOG", "warn");
    c
}

fn mini(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/mini")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn sorted_lines(s: &str) -> Vec<&str> {
    let mut v: Vec<&str> = s.lines().collect();
    v.sort_unstable();
    v
}

#[test]
fn help_for_every_subcommand() {
    for sub in [
        "build-alias",
        "build-types",
        "make-dataset",
        "mask",
        "split",
        "stats",
        "create-session",
        "serve",
        "train",
        "eval",
        "ablate",
        "toy",
    ] {
        let text = ok(&[sub, "--help"]);
        assert!(text.contains("Usage:"), "{sub}");
    }
    ok(&["ablate", "nil", "--help"]);
    ok(&["ablate", "typing", "--help"]);
}

#[test]
fn stats_match_the_oracle() {
    let text = ok(&["stats", "--input", p(&mini("masked.jsonl"))]);
    assert_eq!(
        text,
        std::fs::read_to_string(mini("expected_stats.tsv")).unwrap()
    );
}

#[test]
fn alias_table_matches_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("alias.tsv");
    ok(&[
        "build-alias",
        "--corpus",
        p(&mini("corpus.txt")),
        "--out",
        p(&out),
    ]);
    let got = std::fs::read_to_string(&out).unwrap();
    let want = std::fs::read_to_string(mini("expected_alias.tsv")).unwrap();
    assert_eq!(sorted_lines(&got), sorted_lines(&want));
}

#[test]
fn make_dataset_and_mask_reproduce_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds.jsonl");
    let masked = dir.path().join("masked.jsonl");
    let corpus = mini("corpus.txt");
    ok(&[
        "make-dataset",
        "--corpus",
        p(&corpus),
        "--seeds",
        "10",
        "--seed",
        "0",
        "--out",
        p(&ds),
    ]);
    ok(&[
        "mask",
        "--input",
        p(&ds),
        "--mask-rate",
        "0.1",
        "--seed",
        "0",
        "--out",
        p(&masked),
    ]);
    assert_eq!(
        std::fs::read(&ds).unwrap(),
        std::fs::read(mini("dataset.jsonl")).unwrap()
    );
    assert_eq!(
        std::fs::read(&masked).unwrap(),
        std::fs::read(mini("masked.jsonl")).unwrap()
    );

    let alias = dir.path().join("alias.tsv");
    let again = dir.path().join("again.jsonl");
    ok(&["build-alias", "--corpus", p(&corpus), "--out", p(&alias)]);
    ok(&[
        "make-dataset",
        "--corpus",
        p(&corpus),
        "--alias-table",
        p(&alias),
        "--seeds",
        "10",
        "--out",
        p(&again),
    ]);
    assert_eq!(std::fs::read(&again).unwrap(), std::fs::read(&ds).unwrap());
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("nilink.toml");
    std::fs::write(&cfg, "seed = 0\nseeds = 10\n").unwrap();
    let ds = dir.path().join("ds.jsonl");
    ok(&[
        "--config",
        p(&cfg),
        "make-dataset",
        "--corpus",
        p(&mini("corpus.txt")),
        "--out",
        p(&ds),
    ]);
    assert_eq!(
        std::fs::read(&ds).unwrap(),
        std::fs::read(mini("dataset.jsonl")).unwrap()
    );

    std::fs::write(&cfg, "sedes = 10\n").unwrap();
    let out = run(&[
        "--config",
        p(&cfg),
        "stats",
        "--input",
        p(&mini("masked.jsonl")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn split_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "split",
        "--input",
        p(&mini("masked.jsonl")),
        "--split",
        "0.8,0.1,0.1",
        "--out-dir",
        p(dir.path()),
    ]);
    let count = |n: &str| {
        std::fs::read_to_string(dir.path().join(n))
            .unwrap()
            .lines()
            .count()
    };
    // validation and test take floor(0.1 * 71) = 7 each
    assert_eq!(
        (
            count("train.jsonl"),
            count("validation.jsonl"),
            count("test.jsonl")
        ),
        (57, 7, 7)
    );
    let out = run(&[
        "split",
        "--input",
        p(&mini("masked.jsonl")),
        "--split",
        "0.8,0.3,0.1",
        "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "split",
        "--input",
        p(&mini("masked.jsonl")),
        "--split",
        "0.8,x",
        "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn build_types_writes_type_lines() {
    let dir = tempfile::tempdir().unwrap();
    let types = dir.path().join("types.tsv");
    let lines = dir.path().join("lines.tsv");
    ok(&[
        "build-types",
        "--subclass-of",
        p(&mini("subclass_of.tsv")),
        "--instance-of",
        p(&mini("instance_of.tsv")),
        "--out",
        p(&types),
        "--lines",
        p(&lines),
    ]);
    let text = std::fs::read_to_string(&lines).unwrap();
    assert!(
        text.lines()
            .any(|l| l == "Amazon River\tRiver->BodyOfWater->Natural Place"),
        "{text}"
    );
}

#[test]
fn exit_codes() {
    let out = run(&["stats", "--input", "/no/such/file.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["stats"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "mask",
        "--input",
        p(&mini("masked.jsonl")),
        "--mask-rate",
        "1.5",
        "--out",
        "/tmp/x",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "not json\n").unwrap();
    let out = run(&["stats", "--input", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.jsonl:1"));
}

#[test]
fn toy_train_eval_round() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["toy", "--out-dir", p(d)]);
    let (train, test, types, ents) = (
        d.join("train.jsonl"),
        d.join("test.jsonl"),
        d.join("types.tsv"),
        d.join("entities.tsv"),
    );
    let model = d.join("model.ck");
    let log = d.join("log.tsv");
    ok(&[
        "train",
        "--train",
        p(&train),
        "--types",
        p(&types),
        "--entities",
        p(&ents),
        "--epochs",
        "2",
        "--out",
        p(&model),
        "--log",
        p(&log),
    ]);
    assert_eq!(std::fs::read_to_string(&log).unwrap().lines().count(), 2);
    let report = ok(&[
        "eval",
        "--model",
        p(&model),
        "--entries",
        p(&test),
        "--types",
        p(&types),
        "--entities",
        p(&ents),
        "--name",
        "cross",
    ]);
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "Model\tNon-NAC\tNAC\tOAC");
    assert!(lines[1].starts_with("cross\t"));
    let out = run(&["eval", "--model", p(&model), "--entries", p(&test)]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "train",
        "--train",
        p(&train),
        "--mode",
        "tri",
        "--out",
        p(&model),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn create_session_persists() {
    let dir = tempfile::tempdir().unwrap();
    let sessions = dir.path().join("sessions");
    let entries = mini("dataset.jsonl");
    let args = [
        "create-session",
        "--entries",
        p(&entries),
        "--id",
        "batch1",
        "--annotators",
        "a,b,c",
        "--expert",
        "x",
        "--sessions-dir",
        p(&sessions),
    ];
    ok(&args);
    assert!(sessions.join("batch1/session.json").exists());
    assert_eq!(run(&args).status.code(), Some(1));
    let mut two = args;
    two[4] = "batch2";
    two[6] = "a,b";
    assert_eq!(run(&two).status.code(), Some(1));
}
