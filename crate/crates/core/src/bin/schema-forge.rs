use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schema_forge::harness::{
    emit_plot, exit, exit_code, run_ga, run_gp, verify_theorems, write_census, write_oracle, ExperimentConfig, Mode,
    PlotSpec, RunSummary,
};
use schema_forge::{Error, Result};

#[derive(Parser)]
#[command(name = "schema-forge", version, about = "Schema-theorem experiments for GAs and GP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Follow a GA trajectory and check the tracked schemata every generation.
    RunGa(Common),
    /// Follow a GP trajectory and check the tracked schemata every generation.
    RunGp(Common),
    /// Run the configured theorem suites over random instances.
    Verify(Common),
    /// Write the exact one-offspring law of the initial population.
    Oracle(Common),
    /// Write a schema (GA) or shape (GP) census of the initial population.
    Census(Common),
    /// Render the `[plot]` section of the config as SVG.
    Plot(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `trials`.
    #[arg(long)]
    trials: Option<usize>,
}

impl Common {
    fn load(&self, mode: Option<Mode>) -> Result<(ExperimentConfig, PathBuf)> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(trials) = self.trials {
            if trials == 0 {
                return Err(Error::Config("--trials must be at least 1".into()));
            }
            config.trials = trials;
        }
        if let Some(mode) = mode {
            match config.mode {
                Some(m) if m != mode => {
                    return Err(Error::Config(format!("config is for mode {m:?}, not {mode:?}")));
                }
                _ => config.mode = Some(mode),
            }
        }
        let out = self.out.clone().unwrap_or_else(|| config.output_dir.clone());
        Ok((config, out))
    }
}

fn report_files(summary: &RunSummary) {
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
}

fn finish(summary: &RunSummary) -> i32 {
    report_files(summary);
    let counts = summary.report.counts();
    if !summary.report.rows.is_empty() {
        println!("{counts}");
    }
    if counts.failures() > 0 {
        eprintln!("{} verdict failure(s); see report.csv", counts.failures());
        exit::VERDICT
    } else {
        exit::OK
    }
}

fn plot(common: &Common) -> Result<i32> {
    let (config, out) = common.load(None)?;
    let section = config.plot.ok_or_else(|| Error::Config("missing `[plot]` section".into()))?;
    let filter = match (section.filter_column, section.filter_value) {
        (Some(c), Some(v)) => Some((c, v)),
        (None, None) => None,
        _ => return Err(Error::Config("`filter_column` and `filter_value` go together".into())),
    };
    let spec = PlotSpec {
        title: section.title.unwrap_or_else(|| format!("{} vs {}", section.y.join(", "), section.x)),
        x: section.x,
        y: section.y,
        filter,
    };
    let target = section.output.unwrap_or_else(|| Path::new("plot.svg").to_path_buf());
    let target = if target.is_absolute() { target } else { out.join(target) };
    std::fs::create_dir_all(&out)?;
    emit_plot(&section.input, &spec, &target)?;
    println!("wrote {}", target.display());
    Ok(exit::OK)
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::RunGa(c) => {
            let (config, out) = c.load(Some(Mode::Ga))?;
            Ok(finish(&run_ga(&config, &out)?))
        }
        Command::RunGp(c) => {
            let (config, out) = c.load(Some(Mode::Gp))?;
            Ok(finish(&run_gp(&config, &out)?))
        }
        Command::Verify(c) => {
            let (config, out) = c.load(None)?;
            let report = verify_theorems(&config)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join("report.csv");
            report.table().write(&path)?;
            Ok(finish(&RunSummary { files: vec![path], report }))
        }
        Command::Oracle(c) => {
            let (config, out) = c.load(None)?;
            Ok(finish(&write_oracle(&config, &out)?))
        }
        Command::Census(c) => {
            let (config, out) = c.load(None)?;
            Ok(finish(&write_census(&config, &out)?))
        }
        Command::Plot(c) => plot(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
