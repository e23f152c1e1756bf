//! Reference runs: follow one seeded trajectory and, at every generation,
//! compare each tracked schema's predictions with the oracle (when asked)
//! and with Monte Carlo resamples of the next generation.

use std::path::{Path, PathBuf};

use num_traits::Zero;
use rayon::prelude::*;

use super::config::{ExperimentConfig, GaSetup, GpSetup, Mode, Theorem};
use super::plot::{emit_plot, PlotSpec};
use super::verify::{coverage, exact_bound, exact_equality, mc_agreement, mc_bound, PredictionReport, ReportRow, Verdict, MC_SIGMAS};
use super::{fmt_f64, Table};
use crate::error::Result;
use crate::ga::Breeder;
use crate::ga_theorems::{
    adjusted_and_effective_fitness, chebychev_bounds, exact_alpha, holland_bound, next_count_distribution,
    selection_probability,
};
use crate::gp::{run_gp as run_gp_engine, GpBreeder, GpGenerationStats, PointPolicy};
use crate::gp_schema::LowerBlockReading;
use crate::gp_theorems::{
    count_and_fitness_gp, creation_correction, gp_schema_theorem_bound, macroscopic_alpha_gp, microscopic_alpha_gp,
    selection_probability_gp, size_evolution, ShapeIndex,
};
use crate::oracle::{
    compose_count_law, enumerate_offspring_ga, enumerate_offspring_gp, oracle_alpha, oracle_alpha_gp,
    oracle_expected_mean_size, OracleCaps,
};
use crate::rational::{format_rational, from_usize, to_f64, Rational};
use crate::rng::derive_seed;
use crate::schema::{count_and_fitness, schema_census};

const TRIAL_TAG: u64 = 0x5452_4941;

/// Files written by a command and the verdicts it produced.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub report: PredictionReport,
}

impl RunSummary {
    fn write_table(&mut self, out: &Path, name: &str, table: &Table) -> Result<()> {
        let path = out.join(name);
        table.write(&path)?;
        self.files.push(path);
        Ok(())
    }

    fn write_summary(&mut self, out: &Path, config: &ExperimentConfig, mode: &str, conventions: &[String]) -> Result<()> {
        let counts = self.report.counts();
        let mut text = format!(
            "mode: {mode}\nseed: {}\ngenerations: {}\ntrials: {}\noracle: {}\nmonte-carlo tolerance: {MC_SIGMAS} standard errors\n",
            config.seed, config.generations, config.trials, config.oracle
        );
        text.push_str("conventions:\n");
        for c in conventions {
            text.push_str(&format!("  {c}\n"));
        }
        text.push_str("files:\n");
        for f in &self.files {
            text.push_str(&format!("  {}\n", f.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()));
        }
        text.push_str("verdicts:\n");
        for line in counts.to_string().lines() {
            text.push_str(&format!("  {line}\n"));
        }
        text.push_str(&format!("failures: {}\n", counts.failures()));
        let path = out.join("summary.txt");
        std::fs::write(&path, text)?;
        self.files.push(path);
        Ok(())
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

fn sample_variance(values: &[f64]) -> f64 {
    let (mean, _) = mean_and_se(values);
    if values.len() < 2 {
        return 0.0;
    }
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)
}

fn opt(value: Option<String>) -> String {
    value.unwrap_or_default()
}

fn mc_row(suite: Theorem, instance: String, quantity: &str, predicted: f64, mean: f64, se: f64, verdict: Verdict) -> ReportRow {
    ReportRow {
        suite: suite.name().into(),
        instance,
        quantity: quantity.into(),
        predicted: fmt_f64(predicted),
        oracle: String::new(),
        mc_mean: fmt_f64(mean),
        mc_se: fmt_f64(se),
        tolerance: format!("{MC_SIGMAS} se"),
        verdict,
    }
}

/// Runs the configured mode and writes its artifacts into `out`.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    match config.mode()? {
        Mode::Ga => run_ga(config, out),
        Mode::Gp => run_gp(config, out),
    }
}

pub fn run_ga(config: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    let GaSetup { population, fitness: f, config: cfg, schemata } = config.ga_setup()?;
    std::fs::create_dir_all(out)?;
    let caps = OracleCaps::default();
    let proportional = cfg.selection.is_proportional();
    let ks = config.verify.as_ref().map(|v| v.k.clone()).unwrap_or_else(|| vec![1.5, 2.0, 3.0]);
    let mut trajectory = Table::new(&[
        "t", "schema", "m", "f_H", "p_H", "holland", "alpha", "expected", "oracle_expected", "mc_mean", "mc_se",
        "cheb_lower", "cheb_upper",
    ]);
    let mut summary = RunSummary::default();
    let mut census = Table::new(&["t", "schema", "order", "instances", "mean_fitness"]);
    let mut pop = population;
    let n = pop.size();
    let generations = config.generations;
    for t in 0..generations {
        if let Some(c) = &config.census {
            if t == 0 {
                append_census(&mut census, &pop, &f, c.max_order)?;
            }
        }
        let breeder = Breeder::new(&pop, &f, &cfg)?;
        let counts: Vec<Vec<f64>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let next = breeder.next_generation(derive_seed(cfg.seed, &[TRIAL_TAG, trial as u64]));
                schemata
                    .iter()
                    .map(|h| next.members().iter().filter(|m| h.matches(m).unwrap_or(false)).count() as f64)
                    .collect()
            })
            .collect();
        for (hi, h) in schemata.iter().enumerate() {
            let label = format!("t={t} H={h}");
            let sc = count_and_fitness(h, &pop, &f)?;
            let p = selection_probability(h, &pop, &f)?;
            let holland = if proportional { Some(holland_bound(h, &pop, &f, &cfg)?) } else { None };
            let alpha = if proportional { Some(exact_alpha(h, &pop, &f, &cfg)?.alpha) } else { None };
            let oracle = if config.oracle { Some(oracle_alpha(h, &pop, &f, &cfg, &caps)?) } else { None };
            let samples: Vec<f64> = counts.iter().map(|row| row[hi]).collect();
            let (mc_mean, mc_se) = mean_and_se(&samples);
            let cheb = match &alpha {
                Some(a) => Some(chebychev_bounds(to_f64(a), n, 2.0)?),
                None => None,
            };
            let expected = alpha.as_ref().map(|a| from_usize(n) * a);
            trajectory.push(vec![
                t.to_string(),
                h.to_string(),
                sc.instances.to_string(),
                format_rational(&sc.mean_fitness),
                format_rational(&p),
                opt(holland.as_ref().map(format_rational)),
                opt(alpha.as_ref().map(format_rational)),
                opt(expected.as_ref().map(format_rational)),
                opt(oracle.as_ref().map(|o| format_rational(&(from_usize(n) * o)))),
                fmt_f64(mc_mean),
                fmt_f64(mc_se),
                opt(cheb.map(|b| fmt_f64(b.lower))),
                opt(cheb.map(|b| fmt_f64(b.upper))),
            ]);
            let (Some(alpha), Some(holland), Some(expected)) = (&alpha, &holland, &expected) else {
                continue;
            };
            for &theorem in &config.theorems {
                let rows = &mut summary.report.rows;
                match (theorem, &oracle) {
                    (Theorem::ExactAlpha, Some(o)) => {
                        rows.push(ReportRow::exact(theorem.name(), label.clone(), "alpha", alpha, o, exact_equality(alpha, o)))
                    }
                    (Theorem::ExactAlpha, None) => {
                        let e = to_f64(expected);
                        rows.push(mc_row(theorem, label.clone(), "E[m(H,t+1)]", e, mc_mean, mc_se, mc_agreement(e, mc_mean, mc_se)))
                    }
                    (Theorem::HollandBound, Some(o)) => {
                        let reference = from_usize(n) * o;
                        rows.push(ReportRow::exact(
                            theorem.name(),
                            label.clone(),
                            "E[m(H,t+1)]",
                            holland,
                            &reference,
                            exact_bound(holland, &reference),
                        ))
                    }
                    (Theorem::HollandBound, None) => {
                        let b = to_f64(holland);
                        rows.push(mc_row(theorem, label.clone(), "E[m(H,t+1)]", b, mc_mean, mc_se, mc_bound(b, mc_mean, mc_se)))
                    }
                    (Theorem::BinomialLaw, Some(o)) => {
                        let closed = next_count_distribution(alpha, n)?.pmf;
                        let composed = compose_count_law(o, n);
                        let verdict = if closed == composed { Verdict::Equality } else { Verdict::Mismatch };
                        rows.push(ReportRow::exact(theorem.name(), label.clone(), "Pr(m = 0)", &closed[0], &composed[0], verdict))
                    }
                    (Theorem::BinomialLaw, None) => {
                        let a = to_f64(alpha);
                        let var = n as f64 * a * (1.0 - a);
                        let observed = sample_variance(&samples);
                        let tol = MC_SIGMAS * var * (2.0 / (samples.len().max(2) as f64 - 1.0)).sqrt() + 1e-9;
                        let verdict = if (observed - var).abs() <= tol { Verdict::Equality } else { Verdict::Mismatch };
                        rows.push(ReportRow {
                            suite: theorem.name().into(),
                            instance: label.clone(),
                            quantity: "Var[m(H,t+1)]".into(),
                            predicted: fmt_f64(var),
                            oracle: String::new(),
                            mc_mean: fmt_f64(observed),
                            mc_se: String::new(),
                            tolerance: fmt_f64(tol),
                            verdict,
                        })
                    }
                    (Theorem::Chebychev, _) => {
                        for &k in &ks {
                            let b = chebychev_bounds(to_f64(alpha), n, k)?;
                            let covered = samples.iter().filter(|&&c| b.covers(c)).count() as f64 / samples.len() as f64;
                            rows.push(ReportRow {
                                suite: theorem.name().into(),
                                instance: format!("{label} k={k}"),
                                quantity: "coverage".into(),
                                predicted: fmt_f64(b.confidence),
                                oracle: String::new(),
                                mc_mean: fmt_f64(covered),
                                mc_se: String::new(),
                                tolerance: format!("≥ {}", fmt_f64(b.confidence)),
                                verdict: coverage(covered, b.confidence),
                            });
                        }
                    }
                    (Theorem::EffectiveFitness, _) => {
                        let fe = adjusted_and_effective_fitness(h, &pop, &f, &cfg)?;
                        if let (Some(a), Some(b)) = (&fe.effective, &fe.effective_from_cuts) {
                            rows.push(ReportRow::exact(theorem.name(), label.clone(), "f_e", b, a, exact_equality(b, a)));
                        }
                    }
                    _ => {}
                }
            }
        }
        pop = breeder.next_generation(cfg.seed);
    }
    if let Some(c) = &config.census {
        append_census(&mut census, &pop, &f, c.max_order)?;
        summary.write_table(out, "census.csv", &census)?;
    }
    summary.write_table(out, "trajectory.csv", &trajectory)?;
    summary.write_table(out, "report.csv", &summary.report.table())?;
    if let Some(first) = schemata.first() {
        let plot = out.join("trajectory.svg");
        let spec = PlotSpec {
            x: "t".into(),
            y: vec!["m".into(), "expected".into(), "holland".into(), "mc_mean".into()],
            filter: Some(("schema".into(), first.to_string())),
            title: format!("H = {first}"),
        };
        plot_rationals(&out.join("trajectory.csv"), &spec, &plot)?;
        summary.files.push(plot);
    }
    let conventions = [
        format!("mutation: {}", match cfg.mutation {
            crate::ga::MutationMode::PerBit => "per-bit",
            crate::ga::MutationMode::SingleBit => "single-bit",
        }),
        format!("crossover: one child per event, {} equally likely cuts", pop.string_len().saturating_sub(1)),
        "mean fitness: population mean".to_string(),
        format!("selection: {}", if proportional { "proportional" } else { "tournament (exact predictions skipped)" }),
    ];
    summary.write_summary(out, config, "ga", &conventions)?;
    Ok(summary)
}

fn append_census(table: &mut Table, pop: &crate::ga::Population, f: &crate::ga::FitnessFunction, max_order: usize) -> Result<()> {
    for row in schema_census(pop, f, max_order)? {
        table.push(vec![
            pop.generation().to_string(),
            row.schema.to_string(),
            row.schema.order().to_string(),
            row.instances.to_string(),
            format_rational(&row.mean_fitness),
        ]);
    }
    Ok(())
}

/// Plots a CSV whose cells may be exact rationals `p/q`.
fn plot_rationals(csv: &Path, spec: &PlotSpec, out: &Path) -> Result<()> {
    let mut table = Table::read(csv)?;
    for row in &mut table.rows {
        for cell in row.iter_mut() {
            if cell.contains('/') {
                if let Ok(r) = crate::rational::parse_rational(cell) {
                    *cell = fmt_f64(to_f64(&r));
                }
            }
        }
    }
    let svg = super::plot::render(&table, spec)?;
    std::fs::write(out, svg)?;
    Ok(())
}

pub fn run_gp(config: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    let GpSetup { population, primitives, fitness: f, config: cfg, schemata, .. } = config.gp_setup()?;
    std::fs::create_dir_all(out)?;
    let caps = OracleCaps::default();
    let exact_model = cfg.selection.is_proportional() && cfg.p_m.is_zero();
    let bound_model = cfg.selection.is_proportional() && cfg.points == PointPolicy::Links;
    let reading = LowerBlockReading::SubtreeWildcard;
    let mut trajectory = Table::new(&[
        "t", "schema", "m", "f_H", "p_H", "alpha", "expected", "bound", "oracle_expected", "mc_mean", "mc_se",
    ]);
    let mut stats = Table::new(&[
        "t", "mean_size", "predicted_next_mean_size", "mc_next_mean_size", "distinct_shapes", "disruption",
    ]);
    let mut summary = RunSummary::default();
    let mut pop = population;
    let n = pop.size();
    for t in 0..config.generations {
        let breeder = GpBreeder::new(&pop, &primitives, &f, &cfg)?;
        let samples: Vec<(Vec<f64>, f64)> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let (next, _) = breeder.next_generation(derive_seed(cfg.seed, &[TRIAL_TAG, trial as u64]));
                let counts = schemata.iter().map(|h| next.members().iter().filter(|m| h.matches(m)).count() as f64).collect();
                (counts, to_f64(&next.mean_size()))
            })
            .collect();
        let (next, events) = breeder.next_generation(cfg.seed);
        let crossed: Vec<_> = events.iter().filter(|e| e.point.is_some()).collect();
        let disruption = (!crossed.is_empty()).then(|| {
            crossed.iter().filter(|e| e.child.shape() != pop.members()[e.first_parent].shape()).count() as f64
                / crossed.len() as f64
        });
        let predicted_size = if exact_model { Some(size_evolution(&pop, &f)?.by_program) } else { None };
        let sizes: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let (size_mean, size_se) = mean_and_se(&sizes);
        stats.push(vec![
            t.to_string(),
            fmt_f64(to_f64(&pop.mean_size())),
            opt(predicted_size.as_ref().map(|s| fmt_f64(to_f64(s)))),
            fmt_f64(size_mean),
            pop.distinct_shapes().to_string(),
            opt(disruption.map(fmt_f64)),
        ]);
        let label_t = format!("t={t}");
        if config.theorems.contains(&Theorem::SizeEvolution) {
            if let Some(predicted) = &predicted_size {
                if config.oracle {
                    let exact = oracle_expected_mean_size(&pop, &f, &cfg, &caps)?;
                    summary.report.rows.push(ReportRow::exact(
                        Theorem::SizeEvolution.name(),
                        label_t.clone(),
                        "E[mean size]",
                        predicted,
                        &exact,
                        exact_equality(predicted, &exact),
                    ));
                } else {
                    let p = to_f64(predicted);
                    summary.report.rows.push(mc_row(
                        Theorem::SizeEvolution,
                        label_t.clone(),
                        "E[mean size]",
                        p,
                        size_mean,
                        size_se,
                        mc_agreement(p, size_mean, size_se),
                    ));
                }
            }
        }
        for (hi, h) in schemata.iter().enumerate() {
            let label = format!("t={t} H={h}");
            let (m, fitness) = count_and_fitness_gp(h, &pop, &f)?;
            let p = selection_probability_gp(h, &pop, &f)?;
            let alpha = if exact_model { Some(microscopic_alpha_gp(h, &pop, &f, &cfg, reading)?) } else { None };
            let bound = if bound_model { Some(gp_schema_theorem_bound(h, &pop, &f, &cfg)?.bound) } else { None };
            let oracle = if config.oracle && exact_model { Some(oracle_alpha_gp(h, &pop, &f, &cfg, &caps)?) } else { None };
            let counts: Vec<f64> = samples.iter().map(|s| s.0[hi]).collect();
            let (mc_mean, mc_se) = mean_and_se(&counts);
            let expected = alpha.as_ref().map(|a| from_usize(n) * a);
            trajectory.push(vec![
                t.to_string(),
                h.to_string(),
                m.to_string(),
                format_rational(&fitness),
                format_rational(&p),
                opt(alpha.as_ref().map(format_rational)),
                opt(expected.as_ref().map(format_rational)),
                opt(bound.as_ref().map(format_rational)),
                opt(oracle.as_ref().map(|o| format_rational(&(from_usize(n) * o)))),
                fmt_f64(mc_mean),
                fmt_f64(mc_se),
            ]);
            for &theorem in &config.theorems {
                let rows = &mut summary.report.rows;
                match theorem {
                    Theorem::GpExact => {
                        let Some(alpha) = &alpha else { continue };
                        let macro_ = macroscopic_alpha_gp(h, &pop, &f, &cfg, reading)?;
                        rows.push(ReportRow::exact(
                            theorem.name(),
                            label.clone(),
                            "macroscopic vs microscopic alpha",
                            &macro_,
                            alpha,
                            exact_equality(&macro_, alpha),
                        ));
                        match &oracle {
                            Some(o) => rows.push(ReportRow::exact(
                                theorem.name(),
                                label.clone(),
                                "alpha",
                                alpha,
                                o,
                                exact_equality(alpha, o),
                            )),
                            None => {
                                let e = to_f64(&(from_usize(n) * alpha));
                                rows.push(mc_row(theorem, label.clone(), "E[m(H,t+1)]", e, mc_mean, mc_se, mc_agreement(e, mc_mean, mc_se)))
                            }
                        }
                    }
                    Theorem::GpBound => {
                        let Some(bound) = &bound else { continue };
                        match (&oracle, &expected) {
                            (Some(o), _) => {
                                let reference = from_usize(n) * o;
                                rows.push(ReportRow::exact(theorem.name(), label.clone(), "E[m(H,t+1)]", bound, &reference, exact_bound(bound, &reference)))
                            }
                            (None, Some(e)) => {
                                rows.push(ReportRow::exact(theorem.name(), label.clone(), "E[m(H,t+1)]", bound, e, exact_bound(bound, e)))
                            }
                            (None, None) => {
                                let b = to_f64(bound);
                                rows.push(mc_row(theorem, label.clone(), "E[m(H,t+1)]", b, mc_mean, mc_se, mc_bound(b, mc_mean, mc_se)))
                            }
                        }
                    }
                    Theorem::CreationCorrection => {
                        let Some(alpha) = &alpha else { continue };
                        let cc = creation_correction(h, &pop, &f, &cfg)?;
                        rows.push(ReportRow::exact(theorem.name(), label.clone(), "alpha lower bound", &cc.lower_bound, alpha, exact_bound(&cc.lower_bound, alpha)));
                    }
                    _ => {}
                }
            }
        }
        pop = next;
    }
    summary.write_table(out, "gp_trajectory.csv", &trajectory)?;
    summary.write_table(out, "gp_stats.csv", &stats)?;
    summary.write_table(out, "report.csv", &summary.report.table())?;
    let plot = out.join("gp_stats.svg");
    let spec = PlotSpec {
        x: "t".into(),
        y: vec!["mean_size".into(), "predicted_next_mean_size".into(), "distinct_shapes".into()],
        filter: None,
        title: "program size and shape diversity".into(),
    };
    emit_plot(&out.join("gp_stats.csv"), &spec, &plot)?;
    summary.files.push(plot);
    let conventions = [
        format!("crossover points: {}", match cfg.points {
            PointPolicy::Links => "uniform over links of the common region",
            PointPolicy::AllNodes => "uniform over all common-region nodes",
        }),
        format!("lower building block: {}", reading.name()),
        format!("exact predictions: {}", if exact_model { "on" } else { "off (need proportional selection and p_m = 0)" }),
    ];
    summary.write_summary(out, config, "gp", &conventions)?;
    Ok(summary)
}

/// Census of the configured initial population (GA: schemata up to
/// `census.max_order`, default 2; GP: shapes).
pub fn write_census(config: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out)?;
    let mut summary = RunSummary::default();
    match config.mode()? {
        Mode::Ga => {
            let setup = config.ga_setup()?;
            let max_order = config.census.as_ref().map(|c| c.max_order).unwrap_or(2);
            let mut table = Table::new(&["t", "schema", "order", "instances", "mean_fitness"]);
            append_census(&mut table, &setup.population, &setup.fitness, max_order)?;
            summary.write_table(out, "census.csv", &table)?;
        }
        Mode::Gp => {
            let setup = config.gp_setup()?;
            let index = ShapeIndex::new(&setup.population, &setup.fitness)?;
            let mut table = Table::new(&["shape", "size", "distinct_programs", "instances", "selection_mass"]);
            for e in &index.shapes {
                let instances = setup.population.members().iter().filter(|m| m.shape() == e.shape).count();
                table.push(vec![
                    e.schema.to_string(),
                    e.size.to_string(),
                    e.programs.len().to_string(),
                    instances.to_string(),
                    format_rational(&e.mass),
                ]);
            }
            summary.write_table(out, "census.csv", &table)?;
        }
    }
    Ok(summary)
}

/// The exact one-offspring law of the configured initial population and
/// the transmission probability of every tracked schema.
pub fn write_oracle(config: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out)?;
    let caps = OracleCaps::default();
    let mut summary = RunSummary::default();
    let mut law = Table::new(&["genotype", "probability", "probability_f64"]);
    let mut alphas = Table::new(&["schema", "alpha", "expected_count"]);
    let push_law = |law: &mut Table, g: String, p: &Rational| law.push(vec![g, format_rational(p), fmt_f64(to_f64(p))]);
    match config.mode()? {
        Mode::Ga => {
            let s = config.ga_setup()?;
            let d = enumerate_offspring_ga(&s.population, &s.fitness, &s.config, &caps)?;
            d.support.iter().for_each(|(g, p)| push_law(&mut law, g.to_string(), p));
            for h in &s.schemata {
                let a = oracle_alpha(h, &s.population, &s.fitness, &s.config, &caps)?;
                alphas.push(vec![h.to_string(), format_rational(&a), format_rational(&(from_usize(s.population.size()) * &a))]);
            }
        }
        Mode::Gp => {
            let s = config.gp_setup()?;
            let d = enumerate_offspring_gp(&s.population, &s.fitness, &s.config, &caps)?;
            d.support.iter().for_each(|(g, p)| push_law(&mut law, g.to_string(), p));
            for h in &s.schemata {
                let a = d.mass_where(|t| h.matches(t));
                alphas.push(vec![h.to_string(), format_rational(&a), format_rational(&(from_usize(s.population.size()) * &a))]);
            }
        }
    }
    summary.write_table(out, "oracle.csv", &law)?;
    summary.write_table(out, "oracle_schemata.csv", &alphas)?;
    Ok(summary)
}

/// Per-generation statistics of `runs` independent GP runs (run `r` uses
/// master seed `derive_seed(seed, [r])`).
pub fn gp_seeded_runs(config: &ExperimentConfig, runs: usize) -> Result<Vec<Vec<GpGenerationStats>>> {
    (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut local = config.clone();
            local.seed = derive_seed(config.seed, &[r as u64]);
            let setup = local.gp_setup()?;
            let (_, stats) = run_gp_engine(&setup.population, &setup.primitives, &setup.fitness, &setup.config, config.generations)?;
            Ok(stats)
        })
        .collect()
}
