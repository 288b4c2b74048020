use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn jaas() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/jaas")
}

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fspec-miner"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env("FSPEC_MINER_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn graams_from_listings(out: &Path) {
    let manifest = jaas().join("framework.toml");
    for l in ["listing1", "listing2"] {
        let unit = jaas().join(format!("{l}.mini"));
        let o = run(out, &["graam", path(&unit), "--framework", path(&manifest)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn two_listings_give_the_golden_specification() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    graams_from_listings(&g);
    let f = tmp.path().join("f");
    let o = run(&f, &["infer", path(&g)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let got = std::fs::read_to_string(f.join("fspec.json")).unwrap();
    let want = std::fs::read_to_string(jaas().join("golden_fspec.json")).unwrap();
    assert_eq!(got, want);
}

#[test]
fn validate_flags_subject_read_before_login() {
    let tmp = tempfile::tempdir().unwrap();
    let unit = jaas().join("wrong_order.mini");
    let manifest = jaas().join("framework.toml");
    let o = run(tmp.path(), &["validate", path(&unit), "--framework", path(&manifest)]);
    assert_eq!(o.status.code(), Some(1));
    let verdicts = std::fs::read_to_string(tmp.path().join("wrong_order.verdicts.json")).unwrap();
    assert!(verdicts.contains("reader_before_writer"));

    let ok = jaas().join("listing2.mini");
    let o = run(tmp.path(), &["validate", path(&ok), "--framework", path(&manifest)]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn infer_on_empty_directory_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let o = run(&tmp.path().join("out"), &["infer", path(&empty)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no GRAAMs found"));
}

#[test]
fn bad_arguments_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["eval", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(run(tmp.path(), &["synth", "--corpus", "nope"]).status.code(), Some(2));
}

#[test]
fn every_run_writes_a_manifest_with_input_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = jaas().join("framework.toml");
    let o = run(tmp.path(), &["ifd", "--framework", path(&manifest)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(tmp.path().join("ifd.manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let body = &v["body"];
    assert_eq!(v["schema_version"], 1);
    assert_eq!(body["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(body["seed"], 0);
    let inputs = body["inputs"].as_array().unwrap();
    assert!(inputs.iter().any(|i| i["path"].as_str().unwrap().ends_with("framework.toml")));
    assert!(inputs.iter().all(|i| i["sha256"].as_str().unwrap().len() == 64));
    let ifd = std::fs::read_to_string(tmp.path().join("jaas.ifd.json")).unwrap();
    assert!(!ifd.contains("created_at"));
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file() && !p.to_string_lossy().ends_with(".manifest.json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for i in 0..2 {
        let root = tmp.path().join(format!("run{i}"));
        let corpus = root.join("corpus");
        assert!(run(&corpus, &["synth", "--corpus", "miniauth", "--copies", "2", "--seed", "3"]).status.success());
        let res = root.join("res");
        assert!(run(&res, &["infer", path(&corpus), "--dot"]).status.success());
        assert!(run(&res, &["curve", path(&corpus)]).status.success());
        let o = run(&res, &["eval", "--mode", "swapped", "--corpus", path(&corpus), "--seed", "3", "--k", "3"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(artifacts(&res));
    }
    assert_eq!(outs[0].len(), 5);
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn recommend_points_at_the_missing_login() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    graams_from_listings(&g);
    assert!(run(&g, &["infer", path(&g)]).status.success());
    let unit = tmp.path().join("forgot.mini");
    let src = std::fs::read_to_string(jaas().join("listing2.mini")).unwrap();
    let without: String = src.lines().filter(|l| !l.contains(".login()")).collect::<Vec<_>>().join("\n");
    assert_ne!(src.lines().count(), without.lines().count());
    std::fs::write(&unit, without).unwrap();
    let manifest = jaas().join("framework.toml");
    let fspec = g.join("fspec.json");
    let o = run(tmp.path(), &["recommend", path(&unit), "--fspec", path(&fspec), "--framework", path(&manifest)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("#1 InsertApi"), "{stdout}");
    assert!(stdout.contains("insert LoginContext.login()"), "{stdout}");
}
