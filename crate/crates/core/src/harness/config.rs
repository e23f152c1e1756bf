//! TOML experiment configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ga::{BitString, FitnessFunction, GaConfig, MutationMode, Population};
use crate::gp::{GpConfig, GpFitness, GpPopulation, PointPolicy, PrimitiveSet, Tree};
use crate::gp_schema::GpSchema;
use crate::rational::{parse_rational, Rational};
use crate::schema::GaSchema;
use crate::selection::Selection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ga,
    Gp,
}

/// Predictions a run or verification can be asked to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    ExactAlpha,
    HollandBound,
    BinomialLaw,
    Chebychev,
    EffectiveFitness,
    GpExact,
    GpBound,
    CreationCorrection,
    SizeEvolution,
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ExactAlpha => "exact-alpha",
            Self::HollandBound => "holland-bound",
            Self::BinomialLaw => "binomial-law",
            Self::Chebychev => "chebychev",
            Self::EffectiveFitness => "effective-fitness",
            Self::GpExact => "gp-exact",
            Self::GpBound => "gp-bound",
            Self::CreationCorrection => "creation-correction",
            Self::SizeEvolution => "size-evolution",
        }
    }

    pub fn is_ga(&self) -> bool {
        matches!(
            self,
            Self::ExactAlpha | Self::HollandBound | Self::BinomialLaw | Self::Chebychev | Self::EffectiveFitness
        )
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_generations")]
    pub generations: usize,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub theorems: Vec<Theorem>,
    /// Tracked schemata in text form.
    #[serde(default)]
    pub schemata: Vec<String>,
    pub ga: Option<GaSection>,
    pub gp: Option<GpSection>,
    pub fitness: Option<FitnessSpec>,
    pub census: Option<CensusSection>,
    pub verify: Option<VerifySection>,
    pub plot: Option<PlotSection>,
}

fn default_trials() -> usize {
    100
}

fn default_generations() -> usize {
    10
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_k() -> Vec<f64> {
    vec![1.5, 2.0, 3.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaSection {
    pub n: usize,
    pub length: usize,
    #[serde(with = "crate::rational::serde_text")]
    pub p_c: Rational,
    #[serde(with = "crate::rational::serde_text")]
    pub p_m: Rational,
    #[serde(default)]
    pub mutation: MutationMode,
    #[serde(default = "proportional")]
    pub selection: Selection,
    /// Explicit initial population; random when absent.
    pub initial: Option<Vec<String>>,
}

fn proportional() -> Selection {
    Selection::Proportional
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveSpec {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpSection {
    pub n: usize,
    #[serde(with = "crate::rational::serde_text")]
    pub p_c: Rational,
    #[serde(with = "crate::rational::serde_text")]
    pub p_m: Rational,
    #[serde(default)]
    pub points: PointPolicy,
    #[serde(default = "proportional")]
    pub selection: Selection,
    #[serde(default = "default_depth")]
    pub max_depth: usize,
    /// Defaults to `+` and `*` (binary).
    pub functions: Option<Vec<PrimitiveSpec>>,
    /// Defaults to `x` and `y`.
    pub terminals: Option<Vec<String>>,
    pub initial: Option<Vec<String>>,
}

fn default_depth() -> usize {
    3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub program: String,
    pub value: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FitnessSpec {
    OneMax {
        offset: Option<String>,
    },
    Trap {
        block: usize,
        offset: Option<String>,
    },
    RoyalRoad {
        block: usize,
        offset: Option<String>,
    },
    Flat {
        value: Option<String>,
    },
    Table {
        values: Vec<String>,
    },
    Size,
    TargetMatch {
        target: String,
    },
    /// Cases are `[x, y, target]`; defaults to `x·x + y` on a 5×5 grid.
    Regression {
        cases: Option<Vec<[i64; 3]>>,
    },
    ProgramTable {
        entries: Vec<TableEntry>,
        default: String,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusSection {
    pub max_order: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_k")]
    pub k: Vec<f64>,
}

fn default_instances() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSection {
    pub input: PathBuf,
    pub x: String,
    pub y: Vec<String>,
    /// Keep only rows whose `filter_column` equals `filter_value`.
    pub filter_column: Option<String>,
    pub filter_value: Option<String>,
    pub title: Option<String>,
    pub output: Option<PathBuf>,
}

/// Everything a GA run needs, validated.
#[derive(Debug, Clone)]
pub struct GaSetup {
    pub population: Population,
    pub fitness: FitnessFunction,
    pub config: GaConfig,
    pub schemata: Vec<GaSchema>,
}

#[derive(Debug, Clone)]
pub struct GpSetup {
    pub population: GpPopulation,
    pub primitives: PrimitiveSet,
    pub fitness: GpFitness,
    pub config: GpConfig,
    pub max_depth: usize,
    pub schemata: Vec<GpSchema>,
}

fn rational_or(text: &Option<String>, fallback: i64) -> Result<Rational> {
    match text {
        Some(t) => parse_rational(t),
        None => Ok(crate::rational::int(fallback)),
    }
}

/// The default GP experiment, also shipped as `configs/gp_regression.toml`.
pub const DEFAULT_GP_CONFIG: &str = include_str!("../../configs/gp_regression.toml");

impl ExperimentConfig {
    pub fn default_gp() -> Self {
        Self::from_toml(DEFAULT_GP_CONFIG).expect("bundled config parses")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("`trials` must be at least 1".into()));
        }
        if let Some(mode) = self.mode {
            if let Some(bad) = self.theorems.iter().find(|t| t.is_ga() != (mode == Mode::Ga)) {
                return Err(Error::Config(format!("theorem `{}` does not apply to this mode", bad.name())));
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> Result<Mode> {
        self.mode.ok_or_else(|| Error::Config("missing key `mode` (\"ga\" or \"gp\")".into()))
    }

    pub fn ga_setup(&self) -> Result<GaSetup> {
        let section = self.ga.as_ref().ok_or_else(|| Error::Config("missing table `[ga]`".into()))?;
        let fitness = match self.fitness.as_ref().ok_or_else(|| Error::Config("missing table `[fitness]`".into()))? {
            FitnessSpec::OneMax { offset } => FitnessFunction::OneMax { offset: rational_or(offset, 1)? },
            FitnessSpec::Trap { block, offset } => FitnessFunction::Trap { block: *block, offset: rational_or(offset, 1)? },
            FitnessSpec::RoyalRoad { block, offset } => {
                FitnessFunction::RoyalRoad { block: *block, offset: rational_or(offset, 1)? }
            }
            FitnessSpec::Flat { value } => FitnessFunction::Flat { value: rational_or(value, 1)? },
            FitnessSpec::Table { values } => {
                FitnessFunction::table(values.iter().map(|v| parse_rational(v)).collect::<Result<_>>()?)?
            }
            other => return Err(Error::Config(format!("fitness `{}` is a GP fitness", fitness_kind(other)))),
        };
        fitness.check_length(section.length).map_err(config_error("fitness"))?;
        let population = match &section.initial {
            Some(strings) => {
                let members = strings.iter().map(|s| s.parse::<BitString>()).collect::<Result<Vec<_>>>()?;
                Population::new(members)?
            }
            None => Population::random(section.n, section.length, self.seed)?,
        };
        if population.string_len() != section.length {
            return Err(Error::Config(format!(
                "`ga.initial` strings have length {} but `ga.length` = {}",
                population.string_len(),
                section.length
            )));
        }
        let config = GaConfig {
            n: section.n,
            p_c: section.p_c.clone(),
            p_m: section.p_m.clone(),
            mutation: section.mutation,
            selection: section.selection.clone(),
            seed: self.seed,
        };
        crate::ga::check_setup(&population, &fitness, &config).map_err(config_error("ga"))?;
        let schemata = self
            .schemata
            .iter()
            .map(|s| {
                let h: GaSchema = s.parse().map_err(config_error("schemata"))?;
                if h.len() != section.length {
                    return Err(Error::Config(format!("schema `{s}` has length {} but `ga.length` = {}", h.len(), section.length)));
                }
                Ok(h)
            })
            .collect::<Result<_>>()?;
        Ok(GaSetup { population, fitness, config, schemata })
    }

    pub fn gp_setup(&self) -> Result<GpSetup> {
        let section = self.gp.as_ref().ok_or_else(|| Error::Config("missing table `[gp]`".into()))?;
        let primitives = match (&section.functions, &section.terminals) {
            (None, None) => PrimitiveSet::arithmetic(),
            (functions, terminals) => PrimitiveSet::new(
                functions
                    .clone()
                    .unwrap_or_default()
                    .into_iter()
                    .map(|p| (p.name, p.arity))
                    .collect(),
                terminals.clone().unwrap_or_default(),
            )
            .map_err(config_error("gp"))?,
        };
        let fitness = match self.fitness.as_ref().ok_or_else(|| Error::Config("missing table `[fitness]`".into()))? {
            FitnessSpec::Flat { value } => GpFitness::Flat { value: rational_or(value, 1)? },
            FitnessSpec::Size => GpFitness::Size,
            FitnessSpec::TargetMatch { target } => GpFitness::TargetMatch { target: target.parse()? },
            FitnessSpec::Regression { cases } => match cases {
                Some(cases) => GpFitness::Regression { cases: cases.iter().map(|c| (c[0], c[1], c[2])).collect() },
                None => GpFitness::quadratic_regression(),
            },
            FitnessSpec::ProgramTable { entries, default } => GpFitness::Table {
                entries: entries
                    .iter()
                    .map(|e| Ok((e.program.parse::<Tree>()?, parse_rational(&e.value)?)))
                    .collect::<Result<_>>()?,
                default: parse_rational(default)?,
            },
            other => return Err(Error::Config(format!("fitness `{}` is a GA fitness", fitness_kind(other)))),
        };
        let population = match &section.initial {
            Some(programs) => {
                GpPopulation::new(programs.iter().map(|p| p.parse()).collect::<Result<Vec<Tree>>>()?)?
            }
            None => GpPopulation::ramped(&primitives, section.n, section.max_depth, self.seed)?,
        };
        for member in population.members() {
            primitives.validate(member).map_err(config_error("gp.initial"))?;
        }
        let config = GpConfig {
            n: section.n,
            p_c: section.p_c.clone(),
            p_m: section.p_m.clone(),
            points: section.points,
            selection: section.selection.clone(),
            seed: self.seed,
        };
        config.validate().map_err(config_error("gp"))?;
        if population.size() != config.n {
            return Err(Error::Config(format!(
                "`gp.initial` has {} programs but `gp.n` = {}",
                population.size(),
                config.n
            )));
        }
        let schemata = self
            .schemata
            .iter()
            .map(|s| s.parse::<GpSchema>().map_err(config_error("schemata")))
            .collect::<Result<_>>()?;
        Ok(GpSetup { population, primitives, fitness, config, max_depth: section.max_depth, schemata })
    }
}

fn fitness_kind(spec: &FitnessSpec) -> &'static str {
    match spec {
        FitnessSpec::OneMax { .. } => "one-max",
        FitnessSpec::Trap { .. } => "trap",
        FitnessSpec::RoyalRoad { .. } => "royal-road",
        FitnessSpec::Flat { .. } => "flat",
        FitnessSpec::Table { .. } => "table",
        FitnessSpec::Size => "size",
        FitnessSpec::TargetMatch { .. } => "target-match",
        FitnessSpec::Regression { .. } => "regression",
        FitnessSpec::ProgramTable { .. } => "program-table",
    }
}

/// Wraps any error as a configuration error naming the offending key.
fn config_error(key: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Config(msg) => Error::Config(format!("`{key}`: {msg}")),
        other => Error::Config(format!("`{key}`: {other}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GA: &str = r#"
mode = "ga"
seed = 7
trials = 50
schemata = ["1***", "**01"]
theorems = ["exact-alpha", "holland-bound"]

[ga]
n = 6
length = 4
p_c = "1/2"
p_m = 0.01

[fitness]
kind = "one-max"
"#;

    #[test]
    fn parses_a_ga_config() {
        let c = ExperimentConfig::from_toml(GA).unwrap();
        let setup = c.ga_setup().unwrap();
        assert_eq!(setup.population.size(), 6);
        assert_eq!(setup.config.p_m, crate::rational::ratio(1, 100));
        assert_eq!(setup.schemata.len(), 2);
    }

    #[test]
    fn rejects_unknown_keys_with_a_line() {
        let text = GA.replace("p_c = \"1/2\"", "p_c = \"1/2\"\ncrossover = 3");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("line 12"), "{err}");
        assert!(err.contains("crossover"), "{err}");
        let text = GA.replace("kind = \"one-max\"", "kind = \"one-max\"\nblock = 2");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let text = GA.replace("\"1***\"", "\"1**\"");
        assert!(matches!(ExperimentConfig::from_toml(&text).unwrap().ga_setup(), Err(Error::Config(_))));
        let text = GA.replace("p_m = 0.01", "p_m = 2");
        assert!(matches!(ExperimentConfig::from_toml(&text).unwrap().ga_setup(), Err(Error::Config(_))));
        let text = GA.replace("\"holland-bound\"", "\"gp-bound\"");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn parses_a_gp_config() {
        let text = r#"
mode = "gp"
schemata = ["(+ = =)"]
[gp]
n = 3
p_c = 1
p_m = 0
initial = ["(+ x y)", "x", "(* x x)"]
[fitness]
kind = "size"
"#;
        let setup = ExperimentConfig::from_toml(text).unwrap().gp_setup().unwrap();
        assert_eq!(setup.population.size(), 3);
        assert_eq!(setup.primitives, PrimitiveSet::arithmetic());
    }
}
