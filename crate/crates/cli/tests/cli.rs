use std::path::Path;
use std::process::{Command, Output};

fn tvsense(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvsense"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn synth_writes_fifteen_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvsense(
        &["synth", "--audio", "tv=5,laptop=5,conversation=5", "--seed", "7", "--out", "corpus/", "--duration", "1"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = lines(&dir.path().join("corpus/manifest.csv"));
    assert_eq!(manifest.len(), 15);
    let train = lines(&dir.path().join("corpus/train.csv"));
    let test = lines(&dir.path().join("corpus/test.csv"));
    assert_eq!(train.len() + test.len(), 15);
    assert!(train.iter().all(|l| !test.contains(l)));
}

#[test]
fn train_then_classify_emits_one_record_per_clip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(tvsense(&["synth", "--audio", "tv=4,laptop=3,conversation=3", "--seed", "3", "--out", "c", "--duration", "3"], d)
        .status
        .success());
    let out = tvsense(&["train", "--manifest", "c/train.csv", "--model", "m.svm"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = tvsense(&["classify", "--model", "m.svm", "--manifest", "c/test.csv"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let test = lines(&d.join("c/test.csv"));
    assert_eq!(stdout.lines().count(), test.len());
    for line in stdout.lines() {
        let rec = tvsense::DetectionRecord::from_json_line(line).unwrap();
        assert!(rec.acoustic.is_some() && rec.visual.is_none());
        assert!(rec.ground_truth.is_some());
    }
}

#[test]
fn detect_fuse_and_eval_compose() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(tvsense(&["synth", "--visual", "tv_screen=2,picture_frame=2", "--seed", "1", "--out", "c"], d)
        .status
        .success());
    let out = tvsense(&["detect-video", "--manifest", "c/visual.csv", "--out", "v.jsonl"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(lines(&d.join("v.jsonl")).len(), 4);
    let out = tvsense(&["eval", "--records", "v.jsonl", "--out", "m.csv"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = lines(&d.join("m.csv"));
    assert!(table[0].starts_with("modality,tp,fp,tn,fn"));
    assert!(table.iter().any(|l| l.starts_with("visual,2,0,2,0")), "{table:?}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvsense(&["train", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    assert_eq!(tvsense(&["--help"], dir.path()).status.code(), Some(0));

    let out = tvsense(&["classify", "--model", "missing.svm", "--input", "missing.wav"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
}
