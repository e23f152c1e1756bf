use std::path::Path;
use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schema-forge"))
}

fn config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL_GA: &str = r#"
mode = "ga"
seed = 1
trials = 50
generations = 2
oracle = true
schemata = ["1**", "*01"]
theorems = ["exact-alpha", "holland-bound", "binomial-law"]

[ga]
n = 4
length = 3
p_c = "1/2"
p_m = "0"

[fitness]
kind = "one-max"

[census]
max_order = 2
"#;

#[test]
fn run_ga_writes_versioned_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "ga.toml", SMALL_GA);
    let out = dir.path().join("out");
    let status = cli().args(["run-ga", "--config"]).arg(&cfg).arg("--out").arg(&out).args(["--seed", "9", "--trials", "20"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    for name in ["trajectory.csv", "census.csv", "report.csv"] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        assert!(text.starts_with("# schema-forge v1\n"), "{name}");
    }
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("seed: 9") && summary.contains("trials: 20"), "{summary}");
    assert!(out.join("trajectory.svg").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad = config(dir.path(), "bad.toml", &SMALL_GA.replace("p_m = \"0\"", "p_m = \"0\"\ncrossover = 2"));
    let result = cli().arg("run-ga").arg("--config").arg(&bad).arg("--out").arg(&out).output().unwrap();
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("line"));

    let big = config(dir.path(), "big.toml", &SMALL_GA.replace("length = 3", "length = 9").replace("\"1**\", \"*01\"", "\"1********\""));
    let result = cli().arg("oracle").arg("--config").arg(&big).arg("--out").arg(&out).output().unwrap();
    assert_eq!(result.status.code(), Some(3));

    let gp = config(dir.path(), "gp.toml", &SMALL_GA.replace("mode = \"ga\"", "mode = \"gp\""));
    let result = cli().arg("run-ga").arg("--config").arg(&gp).arg("--out").arg(&out).output().unwrap();
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn census_oracle_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "ga.toml", SMALL_GA);
    let out = dir.path().join("out");
    for cmd in ["census", "oracle", "run-ga"] {
        let status = cli().arg(cmd).arg("--config").arg(&cfg).arg("--out").arg(&out).status().unwrap();
        assert_eq!(status.code(), Some(0), "{cmd}");
    }
    let oracle = std::fs::read_to_string(out.join("oracle.csv")).unwrap();
    assert!(oracle.lines().nth(1).unwrap().starts_with("genotype,probability"));

    let plot = format!(
        "[plot]\ninput = {:?}\nx = \"t\"\ny = [\"m\", \"expected\"]\nfilter_column = \"schema\"\nfilter_value = \"1**\"\n",
        out.join("trajectory.csv")
    );
    let plot_cfg = config(dir.path(), "plot.toml", &plot);
    let status = cli().arg("plot").arg("--config").arg(&plot_cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let svg = std::fs::read_to_string(out.join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));

    let missing = config(dir.path(), "missing.toml", &plot.replace("\"expected\"", "\"nope\""));
    let result = cli().arg("plot").arg("--config").arg(&missing).arg("--out").arg(&out).output().unwrap();
    assert_ne!(result.status.code(), Some(0));
}

#[test]
fn verify_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "verify.toml",
        "seed = 4\ntrials = 200\ntheorems = [\"exact-alpha\", \"gp-exact\"]\n[verify]\ninstances = 20\n",
    );
    let out = dir.path().join("out");
    let result = cli().arg("verify").arg("--config").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(result.status.code(), Some(0), "{}", String::from_utf8_lossy(&result.stderr));
    assert!(String::from_utf8_lossy(&result.stdout).contains("equality"));
}
