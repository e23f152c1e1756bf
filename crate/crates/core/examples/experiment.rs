//! Config-driven reference run: writes CSVs, an SVG plot and a summary.

use std::path::Path;

use schema_forge::harness::{run_experiment, ExperimentConfig};

const CONFIG: &str = r#"
mode = "ga"
seed = 5
trials = 300
generations = 4
schemata = ["11******", "*******1"]
theorems = ["exact-alpha", "holland-bound", "chebychev"]

[ga]
n = 30
length = 8
p_c = "0.6"
p_m = "1/50"

[fitness]
kind = "royal-road"
block = 2
"#;

fn main() -> schema_forge::Result<()> {
    let config = ExperimentConfig::from_toml(CONFIG)?;
    let out = std::env::temp_dir().join("schema-forge-example");
    let summary = run_experiment(&config, Path::new(&out))?;
    for f in &summary.files {
        println!("{}", f.display());
    }
    println!("{}", summary.report.counts());
    Ok(())
}
