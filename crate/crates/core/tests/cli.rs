use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_entropy-kit");

fn run(dir: &Path, cmd: &str, config: &str, out: &str) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args([cmd, "--config", config, "--out", out])
        .env("ENTROPY_KIT_THREADS", "2")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SYNTH: &str = "seed = 3
[synth]
kind = chain_corpus
transition = 0.6 0.2 0.2; 0.2 0.6 0.2; 0.2 0.2 0.6
change_point = 300
change_transition = 0.1 0.8 0.1; 0.1 0.1 0.8; 0.8 0.1 0.1
length = 601
per_class = 12
step_seconds = 3600
";

const PIPELINE: &str = "seed = 3
[input]
kind = events
path = data/events.csv
[window]
bin_seconds = 3600
tw2 = 300
[features]
names = shannon, entropy_rate, duration_diff
[select]
k = 2
[eval]
model = logreg
repeats = 4
";

const NEEP: &str = "seed = 1
[input]
kind = events
path = data/events.csv
series = c00000
[window]
bin_seconds = 3600
[neep]
epochs = 3
";

const SIGNALS: &str = "seed = 5
[synth]
kind = signal_corpus
signal_a = sine frequency=0.05
signal_b = white
noise_a = 0.1
length = 120
per_class = 10
";

const SIGNAL_RUN: &str = "preset = ptbdb
seed = 5
[input]
path = sig/signals.csv
[eval]
epochs = 10
repeats = 3
hidden = 8
";

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().unwrap().is_file())
        .map(|e| {
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn full_run(dir: &Path, out: &str) {
    write(dir, "synth.ini", SYNTH);
    write(dir, "run.ini", PIPELINE);
    write(dir, "neep.ini", NEEP);
    write(dir, "sig.ini", SIGNALS);
    write(dir, "sigrun.ini", SIGNAL_RUN);
    for (cmd, cfg, o) in [
        ("synth", "synth.ini", "data"),
        ("synth", "sig.ini", "sig"),
        ("extract", "run.ini", out),
        ("select", "run.ini", out),
        ("eval", "run.ini", out),
        ("neep", "neep.ini", out),
        ("eval", "sigrun.ini", &format!("{out}/sig")),
    ] {
        let o = run(dir, cmd, cfg, o);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn every_command_is_bit_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    full_run(tmp.path(), "a");
    let data_a = files(&tmp.path().join("data"));
    full_run(tmp.path(), "b");
    assert_eq!(files(&tmp.path().join("data")), data_a);
    let a = files(&tmp.path().join("a"));
    let b = files(&tmp.path().join("b"));
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    for expected in [
        "features.csv",
        "selection_scores.csv",
        "selection_pearson.csv",
        "selection_rationale.txt",
        "eval_report.csv",
        "eval_repeats.csv",
        "eval_summary.txt",
        "neep_model.bin",
        "neep_curve.csv",
        "neep_summary.txt",
    ] {
        assert!(names.contains(&expected), "missing {expected}");
    }
    assert_eq!(a, b);
    assert_eq!(files(&tmp.path().join("a/sig")), files(&tmp.path().join("b/sig")));
}

#[test]
fn extract_writes_expected_columns() {
    let tmp = tempfile::tempdir().unwrap();
    full_run(tmp.path(), "o");
    let csv = fs::read_to_string(tmp.path().join("o/features.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "id,window_start,shannon,entropy_rate,duration_diff,label");
    // 600 bins, windows of 300: two rows per series, 24 series
    assert_eq!(csv.lines().count(), 1 + 48);
    let events = fs::read_to_string(tmp.path().join("data/events.csv")).unwrap();
    let stable = events.lines().filter(|l| l.ends_with(",stable")).count();
    let changed = events.lines().filter(|l| l.ends_with(",changed")).count();
    assert_eq!(stable, changed);
}

#[test]
fn signal_preset_columns() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "sig.ini", SIGNALS);
    write(
        tmp.path(),
        "x.ini",
        "preset = esrd\n[input]\npath = sig/signals.csv\n",
    );
    assert!(run(tmp.path(), "synth", "sig.ini", "sig").status.success());
    let o = run(tmp.path(), "extract", "x.ini", "o");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("o/features.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "id,window_start,IncrEn,ApEn,SlopEn,PhEn,label");
}

#[test]
fn cycle_chain_is_periodic() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "c.ini",
        "[synth]\nkind = chain\ntransition = 0 1 0; 0 0 1; 1 0 0\nlength = 30\nstep_seconds = 10\n",
    );
    assert!(run(tmp.path(), "synth", "c.ini", "o").status.success());
    let csv = fs::read_to_string(tmp.path().join("o/events.csv")).unwrap();
    let states: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(states.len(), 30);
    for k in 3..states.len() {
        assert_eq!(states[k], states[k - 3]);
    }
    assert_ne!(states[0], states[1]);
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn error_classes_have_distinct_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "empty.csv", "");
    write(d, "events.csv", "timestamp,state\n0,a\n60,b\n120,a\n");

    write(d, "bad.ini", "[input]\nkind = events\nbogus = 1\n");
    let o = run(d, "extract", "bad.ini", "o");
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    write(d, "missing.ini", "[input]\nkind = events\npath = nowhere.csv\n[window]\nbin_seconds = 60\ntw2 = 2\n");
    assert_eq!(code(&run(d, "extract", "missing.ini", "o")), 4);

    write(d, "empty.ini", "[input]\nkind = events\npath = empty.csv\n[window]\nbin_seconds = 60\ntw2 = 2\n");
    assert_eq!(code(&run(d, "extract", "empty.ini", "o")), 5);
    assert!(!d.join("o").exists());

    write(d, "feat.ini", "[input]\nkind = events\npath = events.csv\n[window]\nbin_seconds = 60\ntw2 = 2\n[features]\nnames = shannon, nonsense\n");
    assert_eq!(code(&run(d, "extract", "feat.ini", "o")), 6);

    write(d, "big.ini", "[input]\nkind = events\npath = events.csv\n[window]\nbin_seconds = 60\ntw2 = 50\n");
    assert_eq!(code(&run(d, "extract", "big.ini", "o")), 7);
    assert!(!d.join("o").exists());

    write(d, "div.ini", "[input]\nkind = events\npath = events.csv\n[window]\nbin_seconds = 60\n[neep]\nlr = 1e300\nepochs = 5\n");
    assert_eq!(code(&run(d, "neep", "div.ini", "o")), 8);

    write(d, "one.csv", "id,window_start,x,label\na,0,1.0,yes\nb,0,2.0,yes\n");
    write(d, "one.ini", "[input]\nkind = features\npath = one.csv\n");
    assert_eq!(code(&run(d, "eval", "one.ini", "o")), 9);

    write(d, "synth.ini", "[synth]\nkind = chain\ntransition = 0.5 0.6; 0.5 0.5\n");
    let o = run(d, "synth", "synth.ini", "o");
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = Command::new(BIN).arg("extract").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "c.ini", "seed = 1\n[synth]\nkind = chain\ntransition = 0.5 0.5; 0.5 0.5\nlength = 50\n");
    let gen = |seed: &str, out: &str| {
        let o = Command::new(BIN)
            .current_dir(d)
            .args(["synth", "--config", "c.ini", "--seed", seed, "--out", out])
            .output()
            .unwrap();
        assert!(o.status.success());
        fs::read(d.join(out).join("events.csv")).unwrap()
    };
    assert_eq!(gen("7", "a"), gen("7", "b"));
    assert_ne!(gen("7", "a"), gen("8", "c"));
}
