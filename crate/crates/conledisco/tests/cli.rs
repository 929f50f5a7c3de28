use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use conledisco::synth::{write_fixture, SynthSpec};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_conledisco"));
    c.env_remove("CONLEDISCO_CONFIG").env_remove("RUST_LOG");
    c
}

fn run(args: &[&str], config: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fixture(dir.path(), &SynthSpec::default()).unwrap();
    (dir, config)
}

fn append(config: &Path, line: &str) {
    let mut text = std::fs::read_to_string(config).unwrap();
    text.push_str(line);
    text.push('\n');
    std::fs::write(config, text).unwrap();
}

#[test]
fn run_all_succeeds_and_leaves_no_temp_files() {
    let (dir, config) = fixture();
    let o = run(&["run", "all"], &config);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    for f in [
        "lexicon.tsv",
        "eval-report.txt",
        "evidence.txt",
        "table1.tsv",
        "manifest.json",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    for entry in std::fs::read_dir(&out).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(!name.starts_with(".tmp"), "leftover {name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["stages"]["ingest"]["rows"]["pairs"], 2000);
    assert_eq!(manifest["stages"]["build"]["rows"]["lexicon_entries"], 5);
    assert_eq!(manifest["config"]["lexicon.min_freq"], "50");
    assert_eq!(manifest["inputs"].as_object().unwrap().len(), 8);
}

#[test]
fn eval_without_lexicon_names_build() {
    let (_dir, config) = fixture();
    assert!(run(&["ingest"], &config).status.success());
    let o = run(&["eval"], &config);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`build`"), "{}", stderr(&o));
}

#[test]
fn stages_require_their_predecessors() {
    let (_dir, config) = fixture();
    let o = run(&["align"], &config);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`ingest`"), "{}", stderr(&o));
    assert!(run(&["ingest"], &config).status.success());
    let o = run(&["run", "align"], &config);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`tag`"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_2() {
    let (_dir, config) = fixture();
    append(&config, "model1.iterations = 0");
    let o = run(&["ingest"], &config);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("iterations"), "{}", stderr(&o));

    let (_dir, config) = fixture();
    append(&config, "modle1 = 3");
    let o = run(&["ingest"], &config);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("model1"), "{}", stderr(&o));

    let o = bin().arg("ingest").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("CONLEDISCO_CONFIG"), "{}", stderr(&o));

    let o = run(&["run", "everything"], &config);
    assert_eq!(o.status.code(), Some(2));
    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_from_environment() {
    let (dir, config) = fixture();
    let o = bin().arg("ingest").env("CONLEDISCO_CONFIG", &config).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("out/corpus.src").is_file());
}

#[test]
fn limit_truncates_and_keeps_annotations_in_range() {
    let (dir, config) = fixture();
    let o = run(&["run", "tag", "--limit", "100"], &config);
    assert_eq!(o.status.code(), Some(2), "tag before ingest");
    assert!(run(&["ingest", "--limit", "100"], &config).status.success());
    let o = run(&["tag", "--limit", "100"], &config);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    assert_eq!(
        std::fs::read_to_string(out.join("corpus.src")).unwrap().lines().count(),
        100
    );
    let anns = std::fs::read_to_string(out.join("annotations.tsv")).unwrap();
    assert!(anns
        .lines()
        .all(|l| l.split('\t').next().unwrap().parse::<usize>().unwrap() < 100));
}

#[test]
fn output_and_seed_overrides() {
    let (dir, config) = fixture();
    let elsewhere = dir.path().join("elsewhere");
    let o = bin()
        .args(["run", "all", "--seed", "3", "--output"])
        .arg(&elsewhere)
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(elsewhere.join("evidence.txt").is_file());
    assert!(!dir.path().join("out").exists());
    let manifest = std::fs::read_to_string(elsewhere.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": \"3\""));
}

#[test]
fn report_table1() {
    let (_dir, config) = fixture();
    assert!(run(&["ingest"], &config).status.success());
    let o = run(&["report", "--table1"], &config);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        String::from_utf8_lossy(&o.stdout),
        "freq\t=0\t<50\t>=50\ttotal\n# DC\t1\t0\t4\t5\n"
    );
}

#[test]
fn heuristic_tagging_from_senses() {
    let (dir, config) = fixture();
    let text = std::fs::read_to_string(&config)
        .unwrap()
        .replace("tagging.annotations = annotations.tsv", "tagging.senses = senses.tsv");
    std::fs::write(&config, text).unwrap();
    std::fs::write(
        dir.path().join("senses.tsv"),
        "zonk\tREL_A\ndorp vang\tREL_C\nplim\tREL_B\nquell\tREL_D\n",
    )
    .unwrap();
    let o = run(&["run", "all"], &config);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lexicon = std::fs::read_to_string(dir.path().join("out/lexicon.tsv")).unwrap();
    assert!(lexicon.starts_with("blik tak\tREL_A\t0.900000\t90\t100\n"), "{lexicon}");
}

#[test]
fn runtime_errors_exit_1() {
    let (dir, config) = fixture();
    let mut fr = std::fs::read_to_string(dir.path().join("corpus.fr")).unwrap();
    fr.push_str("une de trop .\n");
    std::fs::write(dir.path().join("corpus.fr"), fr).unwrap();
    let o = run(&["ingest"], &config);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("line count mismatch 2000 vs 2001"),
        "{}",
        stderr(&o)
    );

    let (dir, config) = fixture();
    std::fs::write(dir.path().join("corpus.en"), b"ok\n\xff\xfe\n").unwrap();
    std::fs::write(dir.path().join("corpus.fr"), "ok\nok\n").unwrap();
    let o = run(&["ingest"], &config);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let (dir, config) = fixture();
    let mut anns = std::fs::read_to_string(dir.path().join("annotations.tsv")).unwrap();
    let first = anns.lines().next().unwrap().to_owned();
    anns.push_str(&first);
    anns.push('\n');
    std::fs::write(dir.path().join("annotations.tsv"), anns).unwrap();
    assert!(run(&["ingest"], &config).status.success());
    let o = run(&["tag"], &config);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("record 246"), "{}", stderr(&o));
}
