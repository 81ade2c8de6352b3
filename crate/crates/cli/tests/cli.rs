use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_prosotok"));
    c.env_remove("PROSOTOK_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(args: &[&str]) {
    let o = run(args);
    assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Toy {
    dir: tempfile::TempDir,
}

impl Toy {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn new() -> Toy {
        let toy = Toy {
            dir: tempfile::tempdir().unwrap(),
        };
        let corpus = toy.path("corpus");
        ok(&[
            "toy-corpus",
            "--out-dir",
            s(&corpus),
            "--utterances-per-speaker",
            "12",
        ]);
        let manifest = corpus.join("manifest.jsonl");
        let cache = toy.path("f0");
        ok(&[
            "extract",
            "--manifest",
            s(&manifest),
            "--f0-cache",
            s(&cache),
        ]);
        ok(&[
            "features",
            "--manifest",
            s(&manifest),
            "--f0-cache",
            s(&cache),
            "--out",
            s(&toy.path("features.tsv")),
        ]);
        ok(&[
            "augment",
            "--seed",
            "7",
            "--in",
            s(&manifest),
            "--out",
            s(&toy.path("manifest.aug.jsonl")),
            "--features-in",
            s(&toy.path("features.tsv")),
            "--features-out",
            s(&toy.path("features.aug.tsv")),
        ]);
        ok(&[
            "fit",
            "--seed",
            "7",
            "--features",
            s(&toy.path("features.aug.tsv")),
            "--out",
            s(&toy.path("model.json")),
        ]);
        ok(&[
            "label",
            "--model",
            s(&toy.path("model.json")),
            "--manifest",
            s(&manifest),
            "--features",
            s(&toy.path("features.tsv")),
            "--out",
            s(&toy.path("tokens.jsonl")),
        ]);
        toy
    }

    fn manifest(&self) -> PathBuf {
        self.path("corpus").join("manifest.jsonl")
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["fit", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["transcribe"])), 1);
    // seed is required for fit unless PROSOTOK_SEED is set
    let o = run(&["fit", "--features", "f.tsv", "--out", "m.json"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn missing_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "fit",
        "--seed",
        "1",
        "--features",
        s(&dir.path().join("absent.tsv")),
        "--out",
        s(&dir.path().join("m.json")),
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("features.tsv");
    fs::write(&f, "not a header\n").unwrap();
    let o = run(&[
        "fit",
        "--seed",
        "1",
        "--features",
        s(&f),
        "--out",
        s(&dir.path().join("m.json")),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn full_pipeline() {
    let toy = Toy::new();

    // fitting again with the seed from the environment gives the same bytes
    let again = toy.path("model2.json");
    let o = bin()
        .env("PROSOTOK_SEED", "7")
        .args([
            "fit",
            "--features",
            s(&toy.path("features.aug.tsv")),
            "--out",
            s(&again),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read(toy.path("model.json")).unwrap(),
        fs::read(&again).unwrap()
    );

    // --seed wins over the environment
    let aug = |seed_flag: Option<&str>, env: Option<&str>, out: &str| {
        let mut c = bin();
        if let Some(e) = env {
            c.env("PROSOTOK_SEED", e);
        }
        c.args([
            "augment",
            "--in",
            s(&toy.manifest()),
            "--out",
            s(&toy.path(&format!("{out}.jsonl"))),
        ]);
        c.args([
            "--features-in",
            s(&toy.path("features.tsv")),
            "--features-out",
            s(&toy.path(out)),
        ]);
        if let Some(f) = seed_flag {
            c.args(["--seed", f]);
        }
        let o = c.output().unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        fs::read(toy.path(out)).unwrap()
    };
    let from_flag = aug(Some("8"), Some("7"), "flag.tsv");
    assert_eq!(from_flag, aug(Some("8"), None, "flag_only.tsv"));
    assert_eq!(
        aug(None, Some("7"), "env.tsv"),
        fs::read(toy.path("features.aug.tsv")).unwrap()
    );
    assert_ne!(from_flag, fs::read(toy.path("features.aug.tsv")).unwrap());

    let report = toy.path("report.tsv");
    ok(&[
        "report",
        "ascending",
        "--model",
        s(&toy.path("model.json")),
        "--manifest",
        s(&toy.manifest()),
        "--tokens",
        s(&toy.path("tokens.jsonl")),
        "--out",
        s(&report),
    ]);
    let text = fs::read_to_string(&report).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("cluster_id\tmean_f0_hz\tmean_dur_s"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            (c[1].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 15);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));

    // control: -3 on F0 and a fixed duration cluster
    let controlled = toy.path("controlled.jsonl");
    ok(&[
        "control",
        "--in",
        s(&toy.path("tokens.jsonl")),
        "--out",
        s(&controlled),
        "--f0-offset",
        "-3",
        "--fix-dur",
        "4",
    ]);
    let before = fs::read_to_string(toy.path("tokens.jsonl")).unwrap();
    let after = fs::read_to_string(&controlled).unwrap();
    assert_eq!(before.lines().count(), after.lines().count());
    assert!(after.lines().all(|l| l.contains("\"dur\":[4")));

    // adapt: new speaker name backed by an existing speaker's rows
    let adapted = toy.path("adapted.json");
    ok(&[
        "adapt",
        "--model",
        s(&toy.path("model.json")),
        "--speaker",
        "newcomer",
        "--source-speaker",
        "mid",
        "--features",
        s(&toy.path("features.tsv")),
        "--out",
        s(&adapted),
    ]);
    assert!(fs::read_to_string(&adapted)
        .unwrap()
        .contains("\"newcomer\""));
    let o = run(&[
        "adapt",
        "--model",
        s(&toy.path("model.json")),
        "--speaker",
        "mid",
        "--features",
        s(&toy.path("features.tsv")),
        "--out",
        s(&toy.path("clash.json")),
    ]);
    assert_eq!(code(&o), 1);

    // labelling as a speaker the model does not know
    let o = run(&[
        "label",
        "--model",
        s(&toy.path("model.json")),
        "--manifest",
        s(&toy.manifest()),
        "--features",
        s(&toy.path("features.tsv")),
        "--speaker",
        "nobody",
        "--out",
        s(&toy.path("nobody.jsonl")),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nobody"), "{}", stderr(&o));

    // labelling with the adapted speaker works without refitting
    ok(&[
        "label",
        "--model",
        s(&adapted),
        "--manifest",
        s(&toy.manifest()),
        "--features",
        s(&toy.path("features.tsv")),
        "--speaker",
        "newcomer",
        "--out",
        s(&toy.path("as_newcomer.jsonl")),
    ]);

    let selection = toy.path("selection.txt");
    let coverage = toy.path("coverage.tsv");
    ok(&[
        "select-corpus",
        "--manifest",
        s(&toy.manifest()),
        "--budget",
        "5",
        "--out",
        s(&selection),
        "--report",
        s(&coverage),
    ]);
    assert_eq!(fs::read_to_string(&selection).unwrap().lines().count(), 5);
    assert!(fs::read_to_string(&coverage)
        .unwrap()
        .starts_with("rank\tutterance_id\tnew_phones\tcovered\n"));
}

#[test]
fn control_rejects_offset_with_fixed_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let tokens = dir.path().join("t.jsonl");
    fs::write(&tokens, "{\"id\":\"u\",\"f0\":[1,2],\"dur\":[3,4]}\n").unwrap();
    let out = dir.path().join("o.jsonl");
    let o = run(&[
        "control",
        "--in",
        s(&tokens),
        "--out",
        s(&out),
        "--f0-offset",
        "2",
        "--fix-f0",
        "3",
    ]);
    assert_eq!(code(&o), 1);
    let o = run(&[
        "control",
        "--in",
        s(&tokens),
        "--out",
        s(&out),
        "--f0-offset",
        "12",
    ]);
    assert_eq!(code(&o), 1);
    ok(&[
        "control",
        "--in",
        s(&tokens),
        "--out",
        s(&out),
        "--f0-offset",
        "11",
        "--dur-offset",
        "-11",
    ]);
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "{\"id\":\"u\",\"f0\":[12,13],\"dur\":[0,0]}\n"
    );
}

#[test]
fn jobs_flag_gives_same_model() {
    let toy = Toy::new();
    let one = toy.path("one.json");
    ok(&[
        "--jobs",
        "1",
        "fit",
        "--seed",
        "7",
        "--features",
        s(&toy.path("features.aug.tsv")),
        "--out",
        s(&one),
    ]);
    assert_eq!(
        fs::read(toy.path("model.json")).unwrap(),
        fs::read(&one).unwrap()
    );
    assert_eq!(
        code(&run(&["--jobs", "0", "control", "--in", "a", "--out", "b"])),
        1
    );
}
