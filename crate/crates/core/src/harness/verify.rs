//! Verdicts and verification suites over random small instances.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Theorem};
use super::{Table, VerdictCounts};
use crate::error::{Error, Result};
use crate::ga::{BitString, Breeder, FitnessFunction, GaConfig, Population};
use crate::ga_theorems::{adjusted_and_effective_fitness, chebychev_bounds, exact_alpha, holland_bound, next_count_distribution};
use crate::gp::{GpConfig, GpFitness, GpPopulation, PrimitiveSet, Tree};
use crate::gp_schema::{GpSchema, LowerBlockReading};
use crate::gp_theorems::{
    creation_correction, gp_schema_theorem_bound, macroscopic_alpha_gp, microscopic_alpha_gp, size_evolution,
};
use crate::oracle::{compose_count_law, oracle_alpha, oracle_alpha_gp, oracle_expected_mean_size, OracleCaps};
use crate::rational::{format_rational, from_usize, int, ratio, to_f64, Rational};
use crate::rng::{derive_seed, substream, StreamRng};
use crate::schema::{count_and_fitness, GaSchema};

/// Monte Carlo agreement band, in standard errors.
pub const MC_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Equality,
    Mismatch,
    BoundHolds,
    BoundViolated,
    Coverage,
    CoverageViolated,
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, Self::Mismatch | Self::BoundViolated | Self::CoverageViolated)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Equality => "equality",
            Self::Mismatch => "mismatch",
            Self::BoundHolds => "bound-holds",
            Self::BoundViolated => "bound-violated",
            Self::Coverage => "coverage",
            Self::CoverageViolated => "coverage-violated",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn exact_equality(predicted: &Rational, reference: &Rational) -> Verdict {
    if predicted == reference {
        Verdict::Equality
    } else {
        Verdict::Mismatch
    }
}

pub fn exact_bound(bound: &Rational, reference: &Rational) -> Verdict {
    if bound <= reference {
        Verdict::BoundHolds
    } else {
        Verdict::BoundViolated
    }
}

pub fn mc_agreement(predicted: f64, mean: f64, se: f64) -> Verdict {
    if (predicted - mean).abs() <= MC_SIGMAS * se + 1e-9 {
        Verdict::Equality
    } else {
        Verdict::Mismatch
    }
}

pub fn mc_bound(bound: f64, mean: f64, se: f64) -> Verdict {
    if bound <= mean + MC_SIGMAS * se + 1e-9 {
        Verdict::BoundHolds
    } else {
        Verdict::BoundViolated
    }
}

pub fn coverage(observed: f64, required: f64) -> Verdict {
    if observed >= required {
        Verdict::Coverage
    } else {
        Verdict::CoverageViolated
    }
}

/// One comparison. Numbers are written as exact rationals where exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub suite: String,
    pub instance: String,
    pub quantity: String,
    pub predicted: String,
    pub oracle: String,
    pub mc_mean: String,
    pub mc_se: String,
    pub tolerance: String,
    pub verdict: Verdict,
}

impl ReportRow {
    pub fn exact(suite: &str, instance: String, quantity: &str, predicted: &Rational, oracle: &Rational, verdict: Verdict) -> Self {
        Self {
            suite: suite.into(),
            instance,
            quantity: quantity.into(),
            predicted: format_rational(predicted),
            oracle: format_rational(oracle),
            mc_mean: String::new(),
            mc_se: String::new(),
            tolerance: "exact".into(),
            verdict,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PredictionReport {
    pub rows: Vec<ReportRow>,
}

impl PredictionReport {
    pub fn counts(&self) -> VerdictCounts {
        let mut counts = BTreeMap::new();
        for row in &self.rows {
            *counts.entry(row.verdict).or_insert(0) += 1;
        }
        VerdictCounts(counts)
    }

    pub fn failures(&self) -> usize {
        self.counts().failures()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "suite", "instance", "quantity", "predicted", "oracle", "mc_mean", "mc_se", "tolerance", "verdict",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.suite.clone(),
                r.instance.clone(),
                r.quantity.clone(),
                r.predicted.clone(),
                r.oracle.clone(),
                r.mc_mean.clone(),
                r.mc_se.clone(),
                r.tolerance.clone(),
                r.verdict.to_string(),
            ]);
        }
        t
    }
}

/// A random GA instance inside the oracle caps.
#[derive(Debug, Clone)]
pub struct GaInstance {
    pub population: Population,
    pub fitness: FitnessFunction,
    pub config: GaConfig,
    pub schema: GaSchema,
}

impl fmt::Display for GaInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.population.members().iter().map(|m| m.to_string()).collect();
        write!(
            f,
            "pop=[{}] H={} p_c={} p_m={}",
            members.join(" "),
            self.schema,
            self.config.p_c,
            self.config.p_m
        )
    }
}

/// `n ∈ 2..=5`, `len ∈ 2..=4`, table fitness in `1..=8`, `p_c ∈ {0, 1/2, 1}`.
pub fn random_ga_instance<R: Rng + ?Sized>(rng: &mut R, p_m_choices: &[Rational]) -> GaInstance {
    let n = rng.gen_range(2..=5);
    let len = rng.gen_range(2..=4);
    let members = (0..n).map(|_| BitString::random(len, rng).expect("len ≥ 2")).collect();
    let values = (0..1usize << len).map(|_| int(rng.gen_range(1..=8))).collect();
    let p_c = [int(0), ratio(1, 2), int(1)].choose(rng).expect("nonempty").clone();
    let p_m = p_m_choices.choose(rng).cloned().unwrap_or_else(Rational::zero);
    let schema = GaSchema::new(
        (0..len).map(|_| match rng.gen_range(0..3) {
            0 => None,
            1 => Some(false),
            _ => Some(true),
        })
        .collect(),
    )
    .expect("len ≥ 2");
    GaInstance {
        population: Population::new(members).expect("nonempty"),
        fitness: FitnessFunction::table(values).expect("power of two"),
        config: GaConfig::new(n, p_c, p_m, 0),
        schema,
    }
}

/// A random GP instance inside the oracle caps.
#[derive(Debug, Clone)]
pub struct GpInstance {
    pub population: GpPopulation,
    pub fitness: GpFitness,
    pub config: GpConfig,
    pub schema: GpSchema,
}

impl fmt::Display for GpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.population.members().iter().map(|m| m.to_string()).collect();
        write!(f, "pop=[{}] H={} p_c={}", members.join(" "), self.schema, self.config.p_c)
    }
}

/// Up to 4 programs of at most 7 nodes over `{+, *} × {x, y}`, drawn so
/// that shapes repeat often; table fitness in `1..=8`; `H` is a member or
/// random program with about half of its nodes turned to `=`.
pub fn random_gp_instance<R: Rng + ?Sized>(rng: &mut R, programs: &[Tree]) -> GpInstance {
    let n = rng.gen_range(1..=4);
    let anchor = programs.choose(rng).expect("nonempty").clone();
    let members: Vec<Tree> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.6) {
                let same: Vec<&Tree> = programs.iter().filter(|p| p.shape() == anchor.shape()).collect();
                (*same.choose(rng).expect("anchor itself")).clone()
            } else {
                programs.choose(rng).expect("nonempty").clone()
            }
        })
        .collect();
    let mut entries: Vec<(Tree, Rational)> = Vec::new();
    for m in &members {
        if !entries.iter().any(|(t, _)| t == m) {
            entries.push((m.clone(), int(rng.gen_range(1..=8))));
        }
    }
    let base = if rng.gen_bool(0.7) { members.choose(rng).expect("nonempty").clone() } else { programs.choose(rng).expect("nonempty").clone() };
    let schema = GpSchema::from_tree_with(&base, |_| rng.gen_bool(0.5));
    let p_c = [int(0), ratio(1, 2), int(1)].choose(rng).expect("nonempty").clone();
    GpInstance {
        population: GpPopulation::new(members).expect("nonempty"),
        fitness: GpFitness::Table { entries, default: int(1) },
        config: GpConfig::new(n, p_c, int(0), 0),
        schema,
    }
}

const SUITE_TAG: u64 = 0x5157_4954;

fn instance_rng(seed: u64, theorem: Theorem, i: usize) -> StreamRng {
    substream(seed, &[SUITE_TAG, theorem as u64, i as u64])
}

/// Runs every configured theorem suite and returns the report.
pub fn verify_theorems(config: &ExperimentConfig) -> Result<PredictionReport> {
    if config.theorems.is_empty() {
        return Err(Error::Config("`theorems` must list at least one suite".into()));
    }
    let section = config.verify.clone().unwrap_or(super::config::VerifySection { instances: 200, k: vec![1.5, 2.0, 3.0] });
    let caps = OracleCaps::default();
    let programs = PrimitiveSet::arithmetic().enumerate_programs(7);
    let mut report = PredictionReport::default();
    for &theorem in &config.theorems {
        let rows: Vec<Vec<ReportRow>> = (0..section.instances)
            .into_par_iter()
            .map(|i| -> Result<Vec<ReportRow>> {
                let mut rng = instance_rng(config.seed, theorem, i);
                match theorem {
                    Theorem::Chebychev => Ok(Vec::new()),
                    t if t.is_ga() => ga_rows(theorem, &mut rng, &caps, i),
                    _ => gp_rows(theorem, &mut rng, &programs, &caps, i),
                }
            })
            .collect::<Result<_>>()?;
        report.rows.extend(rows.into_iter().flatten());
        if theorem == Theorem::Chebychev {
            report.rows.extend(chebychev_rows(config, &section.k)?);
        }
    }
    Ok(report)
}

fn ga_rows<R: Rng + ?Sized>(theorem: Theorem, rng: &mut R, caps: &OracleCaps, i: usize) -> Result<Vec<ReportRow>> {
    let suite = theorem.name();
    let p_m_choices = match theorem {
        Theorem::HollandBound => vec![int(0), ratio(1, 10)],
        _ => vec![int(0)],
    };
    let inst = random_ga_instance(rng, &p_m_choices);
    let label = format!("{i}: {inst}");
    let (pop, f, cfg, h) = (&inst.population, &inst.fitness, &inst.config, &inst.schema);
    let oracle = oracle_alpha(h, pop, f, cfg, caps)?;
    let n = from_usize(pop.size());
    Ok(match theorem {
        Theorem::ExactAlpha => {
            let alpha = exact_alpha(h, pop, f, cfg)?.alpha;
            vec![ReportRow::exact(suite, label, "alpha", &alpha, &oracle, exact_equality(&alpha, &oracle))]
        }
        Theorem::HollandBound => {
            let bound = holland_bound(h, pop, f, cfg)?;
            let expected = &n * &oracle;
            vec![ReportRow::exact(suite, label, "E[m(H,t+1)]", &bound, &expected, exact_bound(&bound, &expected))]
        }
        Theorem::BinomialLaw => {
            let closed = next_count_distribution(&exact_alpha(h, pop, f, cfg)?.alpha, pop.size())?.pmf;
            let composed = compose_count_law(&oracle, pop.size());
            let verdict = if closed == composed { Verdict::Equality } else { Verdict::Mismatch };
            let tail = |law: &[Rational]| law.iter().skip(1).sum::<Rational>();
            vec![ReportRow::exact(suite, label, "Pr(m ≥ 1)", &tail(&closed), &tail(&composed), verdict)]
        }
        Theorem::EffectiveFitness => {
            let fe = adjusted_and_effective_fitness(h, pop, f, cfg)?;
            match fe.effective {
                None => Vec::new(),
                Some(effective) => {
                    let p = crate::ga_theorems::selection_probability(h, pop, f)?;
                    let fitness = count_and_fitness(h, pop, f)?.mean_fitness;
                    let lhs = effective * p;
                    let rhs = &oracle * fitness;
                    vec![ReportRow::exact(suite, label, "f_e·p(H)", &lhs, &rhs, exact_equality(&lhs, &rhs))]
                }
            }
        }
        _ => unreachable!("GA suites only"),
    })
}

fn gp_rows<R: Rng + ?Sized>(
    theorem: Theorem,
    rng: &mut R,
    programs: &[Tree],
    caps: &OracleCaps,
    i: usize,
) -> Result<Vec<ReportRow>> {
    let suite = theorem.name();
    let inst = random_gp_instance(rng, programs);
    let label = format!("{i}: {inst}");
    let (pop, f, cfg, h) = (&inst.population, &inst.fitness, &inst.config, &inst.schema);
    let oracle = oracle_alpha_gp(h, pop, f, cfg, caps)?;
    let reading = LowerBlockReading::SubtreeWildcard;
    Ok(match theorem {
        Theorem::GpExact => {
            let micro = microscopic_alpha_gp(h, pop, f, cfg, reading)?;
            let macro_ = macroscopic_alpha_gp(h, pop, f, cfg, reading)?;
            vec![
                ReportRow::exact(suite, label.clone(), "microscopic alpha", &micro, &oracle, exact_equality(&micro, &oracle)),
                ReportRow::exact(suite, label, "macroscopic alpha", &macro_, &oracle, exact_equality(&macro_, &oracle)),
            ]
        }
        Theorem::GpBound => {
            let bound = gp_schema_theorem_bound(h, pop, f, cfg)?.bound;
            let expected = from_usize(pop.size()) * &oracle;
            vec![ReportRow::exact(suite, label, "E[m(H,t+1)]", &bound, &expected, exact_bound(&bound, &expected))]
        }
        Theorem::CreationCorrection => {
            let cc = creation_correction(h, pop, f, cfg)?;
            vec![ReportRow::exact(suite, label, "alpha lower bound", &cc.lower_bound, &oracle, exact_bound(&cc.lower_bound, &oracle))]
        }
        Theorem::SizeEvolution => {
            let predicted = size_evolution(pop, f)?.by_program;
            let exact = oracle_expected_mean_size(pop, f, cfg, caps)?;
            vec![ReportRow::exact(suite, label, "E[mean size]", &predicted, &exact, exact_equality(&predicted, &exact))]
        }
        _ => unreachable!("GP suites only"),
    })
}

/// Empirical coverage of the two-sided interval over `trials` simulated
/// generations, on the configured GA (or a one-max default).
fn chebychev_rows(config: &ExperimentConfig, ks: &[f64]) -> Result<Vec<ReportRow>> {
    let (pop, f, cfg, schemata) = match &config.ga {
        Some(_) => {
            let s = config.ga_setup()?;
            (s.population, s.fitness, s.config, s.schemata)
        }
        None => {
            let pop = Population::random(50, 8, config.seed)?;
            let cfg = GaConfig::new(50, ratio(7, 10), ratio(1, 100), config.seed);
            (pop, FitnessFunction::one_max(), cfg, vec!["1*******".parse()?, "**11****".parse()?])
        }
    };
    let breeder = Breeder::new(&pop, &f, &cfg)?;
    let mut rows = Vec::new();
    for h in &schemata {
        let alpha = to_f64(&exact_alpha(h, &pop, &f, &cfg)?.alpha);
        let counts: Vec<usize> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let next = breeder.next_generation(derive_seed(config.seed, &[SUITE_TAG, trial as u64]));
                next.members().iter().filter(|m| h.matches(m).unwrap_or(false)).count()
            })
            .collect();
        for &k in ks {
            let b = chebychev_bounds(alpha, pop.size(), k)?;
            let covered = counts.iter().filter(|&&c| b.covers(c as f64)).count() as f64 / counts.len() as f64;
            rows.push(ReportRow {
                suite: Theorem::Chebychev.name().into(),
                instance: format!("H={h} k={k}"),
                quantity: "coverage".into(),
                predicted: super::fmt_f64(b.confidence),
                oracle: String::new(),
                mc_mean: super::fmt_f64(covered),
                mc_se: super::fmt_f64((covered * (1.0 - covered) / counts.len() as f64).sqrt()),
                tolerance: format!("≥ {}", super::fmt_f64(b.confidence)),
                verdict: coverage(covered, b.confidence),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        assert_eq!(exact_equality(&ratio(1, 2), &ratio(2, 4)), Verdict::Equality);
        assert_eq!(exact_bound(&int(2), &int(1)), Verdict::BoundViolated);
        assert_eq!(mc_agreement(1.0, 1.3, 0.1), Verdict::Equality);
        assert_eq!(mc_agreement(1.0, 1.5, 0.1), Verdict::Mismatch);
        assert_eq!(mc_bound(1.5, 1.0, 0.1), Verdict::BoundViolated);
        assert_eq!(coverage(0.8, 0.75), Verdict::Coverage);
        assert!(Verdict::CoverageViolated.is_failure());
    }

    #[test]
    fn random_instances_are_well_formed() {
        let programs = PrimitiveSet::arithmetic().enumerate_programs(7);
        let mut rng = substream(1, &[]);
        for _ in 0..200 {
            let g = random_gp_instance(&mut rng, &programs);
            assert!(g.population.size() <= 4);
            assert!(g.population.members().iter().all(|m| m.size() <= 7));
            let a = random_ga_instance(&mut rng, &[int(0)]);
            assert_eq!(a.schema.len(), a.population.string_len());
        }
    }

    #[test]
    fn small_verification_passes() {
        let text = r#"
seed = 3
trials = 400
theorems = ["exact-alpha", "holland-bound", "binomial-law", "effective-fitness", "chebychev"]
[verify]
instances = 20
"#;
        let config = ExperimentConfig::from_toml(text).unwrap();
        let report = verify_theorems(&config).unwrap();
        assert_eq!(report.failures(), 0, "{:?}", report.rows.iter().filter(|r| r.verdict.is_failure()).collect::<Vec<_>>());
        let text = r#"
theorems = ["gp-exact", "gp-bound", "creation-correction", "size-evolution"]
[verify]
instances = 20
"#;
        let report = verify_theorems(&ExperimentConfig::from_toml(text).unwrap()).unwrap();
        assert_eq!(report.failures(), 0);
        assert!(report.rows.len() >= 100);
    }
}
