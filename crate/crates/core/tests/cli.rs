use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_speechseg"));
    c.env_remove("SPEECHSEG_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("oracle.jsonl"),
            "{\"audio_id\":\"a\",\"start\":1.0,\"end\":6.0}\n\
             {\"audio_id\":\"a\",\"start\":8.0,\"end\":19.5}\n\
             {\"audio_id\":\"b\",\"start\":0.5,\"end\":3.0}\n",
        )
        .unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Synthetic 45 s probabilities for the oracle file.
    fn probs(&self) -> PathBuf {
        let out = self.path("probs.jsonl");
        let o = run(&[
            "synth",
            "--segments",
            p(&self.path("oracle.jsonl")),
            "--audio-len",
            "45",
            "--out",
            p(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    }
}

#[test]
fn segment_recovers_synthetic_oracle() {
    let f = Fixture::new();
    let probs = f.probs();
    let out = f.path("segs.jsonl");
    let o = run(&[
        "segment",
        "--probs",
        p(&probs),
        "--max-len",
        "20",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let got: Vec<(String, f64, f64)> = text
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            let id = v["audio_id"].as_str().unwrap().to_string();
            (id, v["start"].as_f64().unwrap(), v["end"].as_f64().unwrap())
        })
        .collect();
    let oracle = [("a", 1.0, 6.0), ("a", 8.0, 19.5), ("b", 0.5, 3.0)];
    assert_eq!(got.len(), oracle.len(), "{text}");
    // within one stride of the oracle after the 0.06 s expansion
    for ((id, s, e), (oid, os, oe)) in got.iter().zip(oracle) {
        assert_eq!(id, oid);
        assert!((s - (os - 0.06)).abs() <= 0.04 + 1e-9, "{text}");
        assert!((e - (oe + 0.06)).abs() <= 0.04 + 1e-9, "{text}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(f.path("segs.jsonl.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "segment");
    assert_eq!(manifest["config"]["max_len"], 20.0);
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn fixed_45s_gives_three_segments() {
    let f = Fixture::new();
    let probs = f.probs();
    let o = run(&[
        "segment",
        "--probs",
        p(&probs),
        "--algorithm",
        "fixed",
        "--max-len",
        "20",
        "--format",
        "tsv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let a: Vec<&str> = text.lines().filter(|l| l.starts_with("a\t")).collect();
    assert_eq!(
        a,
        ["a\t0.000\t20.000", "a\t20.000\t40.000", "a\t40.000\t45.000"]
    );
}

#[test]
fn exit_codes() {
    let f = Fixture::new();
    let probs = f.probs();
    // usage errors
    assert_eq!(
        run(&["segment", "--probs", p(&probs)]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["segment", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&[
            "segment",
            "--probs",
            p(&probs),
            "--max-len",
            "20",
            "--algorithm",
            "nope"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(run(&[]).status.code(), Some(2));
    // runtime failures
    let o = run(&[
        "segment",
        "--probs",
        p(&f.path("missing.jsonl")),
        "--max-len",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.jsonl"));
    assert!(o.stdout.is_empty());
    let o = run(&["segment", "--probs", p(&probs), "--max-len", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    fs::write(
        f.path("bad.jsonl"),
        "{\"audio_id\":\"x\",\"stride_ms\":40,\"probs\":[1.5]}\n",
    )
    .unwrap();
    let o = run(&[
        "segment",
        "--probs",
        p(&f.path("bad.jsonl")),
        "--max-len",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let f = Fixture::new();
    let probs = f.probs();
    let again = f.path("probs2.jsonl");
    let o = run(&[
        "synth",
        "--segments",
        p(&f.path("oracle.jsonl")),
        "--audio-len",
        "45",
        "--out",
        p(&again),
        "--no-manifest",
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read(&probs).unwrap(), fs::read(&again).unwrap());
    assert!(!f.path("probs2.jsonl.manifest.json").exists());

    let run_segment = |workers: &str, out: &Path| {
        let o = bin()
            .env("SPEECHSEG_WORKERS", workers)
            .args([
                "segment",
                "--probs",
                p(&probs),
                "--max-len",
                "8",
                "--out",
                p(out),
            ])
            .args(["--trace", &format!("{}.trace", p(out))])
            .output()
            .unwrap();
        assert!(o.status.success());
        (
            fs::read(out).unwrap(),
            fs::read(format!("{}.trace", p(out))).unwrap(),
        )
    };
    let one = run_segment("1", &f.path("s1.jsonl"));
    let four = run_segment("4", &f.path("s4.jsonl"));
    assert_eq!(one, four);
    // the 11.5 s segment is over 8 s, so the trace has a split
    assert!(!one.1.is_empty());
}

#[test]
fn merge_reassembles_windows() {
    let f = Fixture::new();
    // 38 s in two windows of 500 frames
    let first = vec!["0.8"; 500].join(",");
    let second = vec!["0.4"; 500].join(",");
    fs::write(
        f.path("chunks.jsonl"),
        format!(
            "{{\"audio_id\":\"a\",\"stride_ms\":40,\"probs\":[{first}]}}\n\
             {{\"audio_id\":\"a\",\"stride_ms\":40,\"probs\":[{second}]}}\n"
        ),
    )
    .unwrap();
    let out = f.path("merged.jsonl");
    let o = run(&[
        "merge",
        "--chunks",
        p(&f.path("chunks.jsonl")),
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec: serde_json::Value =
        serde_json::from_str(fs::read_to_string(&out).unwrap().trim()).unwrap();
    let probs = rec["probs"].as_array().unwrap();
    assert_eq!(probs.len(), 950);
    assert_eq!(probs[449].as_f64(), Some(0.8));
    assert!((probs[475].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert_eq!(probs[500].as_f64(), Some(0.4));

    fs::write(
        f.path("mixed.jsonl"),
        format!(
            "{{\"audio_id\":\"a\",\"stride_ms\":40,\"probs\":[{first}]}}\n\
             {{\"audio_id\":\"a\",\"stride_ms\":20,\"probs\":[0.1]}}\n"
        ),
    )
    .unwrap();
    let o = run(&["merge", "--chunks", p(&f.path("mixed.jsonl"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stride"));
}

#[test]
fn labels_per_window() {
    let f = Fixture::new();
    let o = run(&[
        "labels",
        "--segments",
        p(&f.path("oracle.jsonl")),
        "--audio-len",
        "30",
        "--window",
        "20",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let recs: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    // two windows per audio
    assert_eq!(recs.len(), 4);
    let labels = recs[0]["labels"].as_array().unwrap();
    assert_eq!(labels.len(), 500);
    assert_eq!(labels[24], 0);
    assert_eq!(labels[25], 1);
    assert_eq!(recs[1]["valid"], 250);
    assert_eq!(run(&["labels", "--segments", "x"]).status.code(), Some(2));
}

#[test]
fn eval_commands() {
    let f = Fixture::new();
    let r = f.path("ref.txt");
    let h = f.path("hyp.txt");
    fs::write(&r, "hello , world .\nhow are you ?\n").unwrap();
    fs::write(&h, "hello , world .\nhow are you ?\n").unwrap();

    let o = run(&["eval", "wer", "--ref", p(&r), "--hyp", p(&r)]);
    assert_eq!(o.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["wer"], 0.0);

    let o = run(&[
        "eval",
        "punct-f1",
        "--ref",
        p(&r),
        "--hyp",
        p(&h),
        "--marks",
        ".?,",
    ]);
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["per_mark"].as_array().unwrap().len(), 3);
    assert_eq!(rep["macro_avg"]["f1"], 1.0);

    // one long hypothesis line realigned onto the two references
    let long = f.path("long.txt");
    fs::write(&long, "hello world how are you\n").unwrap();
    let o = run(&["eval", "resegment", "--ref", p(&r), "--hyp", p(&long)]);
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "hello world\nhow are you\n"
    );

    let punctuated = f.path("punct.txt");
    fs::write(&punctuated, "hello , world . how are you ?\n").unwrap();
    let o = run(&[
        "eval",
        "bleu",
        "--ref",
        p(&r),
        "--hyp",
        p(&punctuated),
        "--resegment",
    ]);
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((rep["score"].as_f64().unwrap() - 100.0).abs() < 1e-9);

    let out = f.path("wer.json");
    let o = run(&[
        "eval",
        "wer",
        "--ref",
        p(&r),
        "--hyp",
        p(&long),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lines"));
    assert_eq!(run(&["eval", "wer", "--ref", p(&r)]).status.code(), Some(2));
}

#[test]
fn sweep_with_external_scorer() {
    let f = Fixture::new();
    let probs = f.probs();
    // the metric is the number of segments produced
    let o = bin()
        .args(["sweep", "--probs", p(&probs), "--max-lens", "5,10,20"])
        .args(["--scorer-cmd", "wc -l < {}", "--objective", "minimize"])
        .args([
            "--workdir",
            p(&f.path("work")),
            "--out",
            p(&f.path("sweep.json")),
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("maxlen"), "{table}");
    let rep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(f.path("sweep.json")).unwrap()).unwrap();
    assert_eq!(rep["rows"].as_array().unwrap().len(), 3);
    assert_eq!(rep["best"]["point"]["maxlen_s"], 20.0);

    // external scorers need an explicit objective
    let o = run(&["sweep", "--probs", p(&probs), "--scorer-cmd", "echo 1 {}"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_with_builtin_wer() {
    let f = Fixture::new();
    let probs = f.probs();
    let hyp_dir = f.path("hyps");
    fs::create_dir(&hyp_dir).unwrap();
    fs::write(f.path("ref.txt"), "a b c\nd e\n").unwrap();
    fs::write(hyp_dir.join("maxlen_10_thr_0.5.txt"), "a b c d e").unwrap();
    fs::write(hyp_dir.join("maxlen_20_thr_0.5.txt"), "a x c d").unwrap();
    let o = bin()
        .args(["sweep", "--probs", p(&probs), "--max-lens", "10,20,30"])
        .args(["--scorer", "builtin-wer", "--ref", p(&f.path("ref.txt"))])
        .args(["--hyp-dir", p(&hyp_dir), "--out", p(&f.path("sweep.json"))])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(f.path("sweep.json")).unwrap()).unwrap();
    assert_eq!(rep["best"]["point"]["maxlen_s"], 10.0);
    assert_eq!(rep["best"]["metric"], 0.0);
    // missing hypothesis for maxlen 30 is reported, not fatal
    assert!(rep["rows"][2]["error"].is_string());
    assert!(String::from_utf8_lossy(&o.stderr).contains("maxlen_30"));
}

#[test]
fn stats_prints_json() {
    let f = Fixture::new();
    let o = run(&["stats", "--segments", p(&f.path("oracle.jsonl"))]);
    assert!(o.status.success());
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["count"], 3);
    assert_eq!(rep["total_s"], 19.0);
    assert_eq!(rep["max_s"], 11.5);
}
