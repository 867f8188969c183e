use std::path::Path;
use std::process::{Command, Output};

use svmspectra::backbone::{generate, BackboneSpec};
use svmspectra::experiment::io::parse_dataset;
use svmspectra::spectral::model_hash;
use svmspectra::svm::{load_model, load_model_file};

const BIN: &str = env!("CARGO_BIN_EXE_svmspectra");

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("SVMSPECTRA_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn generate_writes_the_dataset_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = run(&["generate", "--mu", "0.3", "--alpha", "0.7", "--n", "50", "--seed", "5"], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let text = read(&out.join("dataset.csv"));
    assert!(text.starts_with("x1,x2,label\n"));
    let parsed = parse_dataset(text.as_bytes()).unwrap();
    let direct = generate(&BackboneSpec::new(0.3, 0.7, 50, 5).unwrap()).unwrap();
    // 17 significant digits round-trip every f64
    assert_eq!(parsed.points, direct.points);
    assert_eq!(parsed.labels, direct.labels);
    assert!(out.join("generate.manifest.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    assert_eq!(code(&run(&["generate", "--alpha", "0.3"], &d.join("a"))), 2);
    assert_eq!(code(&run(&["generate", "--config", "/nonexistent/cfg.json"], &d.join("b"))), 2);
    std::fs::write(d.join("bad.json"), "{\"mu\": 0.2,\n \"colour\": 1}").unwrap();
    let o = run(&["generate", "--config", d.join("bad.json").to_str().unwrap()], &d.join("c"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(code(&run(&["bogus"], &d.join("d"))), 2);
    assert_eq!(code(&run(&["report"], &d.join("empty"))), 2);
    assert_eq!(code(&run(&["reduce", "--model", "/nonexistent.json"], &d.join("e"))), 2);

    // a single-class training set fails inside the trainer
    let o = run(&["covert", "--alpha", "0.95", "--n", "2", "--params", "1,1"], &d.join("f"));
    assert_eq!(code(&o), 3);
}

#[test]
fn config_file_values_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"mu": 0.6, "alpha": 0.8, "n": 30, "seed": 1}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&run(&["generate", "--config", cfg], &a)), 0);
    assert_eq!(code(&run(&["generate", "--config", cfg, "--seed", "2"], &b)), 0);
    let from_file = parse_dataset(read(&a.join("dataset.csv")).as_bytes()).unwrap();
    assert_eq!(from_file.points, generate(&BackboneSpec::new(0.6, 0.8, 30, 1).unwrap()).unwrap().points);
    let overridden = parse_dataset(read(&b.join("dataset.csv")).as_bytes()).unwrap();
    assert_eq!(overridden.points, generate(&BackboneSpec::new(0.6, 0.8, 30, 2).unwrap()).unwrap().points);
}

#[test]
fn covert_then_reduce_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c");
    let o = run(&["covert", "--mu", "0.4", "--n", "100", "--params", "3,1", "--seed", "4"], &c);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["model.json", "series.csv", "changes.csv", "sufficiency.csv", "localization.csv", "histogram.csv"] {
        assert!(c.join(f).exists(), "missing {f}");
    }
    let base = load_model(&std::fs::read(c.join("model.json")).unwrap()).unwrap();

    let r = dir.path().join("r");
    let model = c.join("model.json");
    let o = run(&["reduce", "--model", model.to_str().unwrap(), "--rank", "3"], &r);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let file = load_model_file(&std::fs::read(r.join("reduced.json")).unwrap()).unwrap();
    let meta = file.reduction.unwrap();
    assert_eq!(meta.rank, 3);
    assert_eq!(meta.retained_indices.len(), 3);
    assert_eq!(meta.base_hash, model_hash(&base));
    assert_eq!(file.model.n_support(), 3);

    let o = run(&["report"], &c);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("sufficiency_point"));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--axis", "combined", "--sizes", "40", "--trials", "2", "--grid-points", "3", "--params", "2,1"];
    let one = dir.path().join("one");
    let o = Command::new(BIN).args(args).arg("--out").arg(&one).env("SVMSPECTRA_THREADS", "1").output().unwrap();
    assert_eq!(code(&o), 0);
    let four = dir.path().join("four");
    let o = Command::new(BIN).args(args).arg("--out").arg(&four).arg("--threads").arg("4").output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(one.join("surface.csv")).unwrap(), std::fs::read(four.join("surface.csv")).unwrap());

    let manifest = |p: &Path| -> serde_json::Value {
        serde_json::from_str(&read(&p.join("sweep-combined.manifest.json"))).unwrap()
    };
    let (m1, m4) = (manifest(&one), manifest(&four));
    assert_eq!(m1["threads"], 1);
    assert_eq!(m4["threads"], 4);

    // the flag wins over the environment
    let both = dir.path().join("both");
    let o = Command::new(BIN)
        .args(args)
        .args(["--threads", "2", "--out"])
        .arg(&both)
        .env("SVMSPECTRA_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(manifest(&both)["threads"], 2);
}

#[test]
fn report_floats_use_nine_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    let args = ["sweep", "--axis", "overlap", "--sizes", "40", "--trials", "3", "--grid-points", "3", "--params", "2,1"];
    assert_eq!(code(&run(&args, &s)), 0);
    assert_eq!(code(&run(&["report"], &s)), 0);
    let summary = read(&s.join("summary.csv"));
    let mut lines = summary.lines();
    assert_eq!(lines.next().unwrap(), "axis,t,mu,alpha,n,trials,mean_f1,std_f1,mean_complexity");
    for line in lines {
        for field in line.split(',').skip(6) {
            let digits = field.trim_start_matches('-').replace('.', "");
            let significant = digits.trim_start_matches('0').trim_end_matches('0');
            assert!(significant.len() <= 9, "{field}");
        }
    }
}
