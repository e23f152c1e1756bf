use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use schema_forge::gp::{GpConfig, GpFitness, GpPopulation, PrimitiveSet, Tree};
use schema_forge::gp_schema::{GpSchema, LowerBlockReading};
use schema_forge::gp_theorems::{
    count_and_fitness_gp, effective_fitness_gp, gp_schema_theorem_bound, macroscopic_alpha_gp, microscopic_alpha_gp,
    selection_probability_gp,
};
use schema_forge::harness::{gp_seeded_runs, ExperimentConfig};
use schema_forge::oracle::{oracle_alpha_gp, OracleCaps};
use schema_forge::rational::{from_usize, int, pow, ratio};
use schema_forge::Rational;

struct Case {
    pop: GpPopulation,
    f: GpFitness,
    cfg: GpConfig,
    h: GpSchema,
}

fn random_case(rng: &mut StdRng, programs: &[Tree], same_shape: bool) -> Case {
    let count = rng.gen_range(1..=4);
    let base = programs.choose(rng).unwrap().clone();
    let pool: Vec<&Tree> =
        if same_shape { programs.iter().filter(|t| t.shape() == base.shape()).collect() } else { programs.iter().collect() };
    let trees: Vec<Tree> = (0..count).map(|_| (*pool.choose(rng).unwrap()).clone()).collect();
    let mut entries: Vec<(Tree, Rational)> = Vec::new();
    for t in &trees {
        if !entries.iter().any(|(u, _)| u == t) {
            entries.push((t.clone(), int(rng.gen_range(1..=8))));
        }
    }
    let p_c = [ratio(0, 1), ratio(1, 2), ratio(1, 1)].choose(rng).unwrap().clone();
    let template = if same_shape || rng.gen_bool(0.5) { trees.choose(rng).unwrap().clone() } else { base };
    Case {
        pop: GpPopulation::new(trees).unwrap(),
        f: GpFitness::Table { entries, default: int(1) },
        cfg: GpConfig::new(count, p_c, ratio(0, 1), 0),
        h: GpSchema::from_tree_with(&template, |_| rng.gen_bool(0.5)),
    }
}

#[test]
fn bound_never_exceeds_the_oracle_expectation() {
    let programs = PrimitiveSet::arithmetic().enumerate_programs(7);
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..300 {
        let c = random_case(&mut rng, &programs, false);
        let bound = gp_schema_theorem_bound(&c.h, &c.pop, &c.f, &c.cfg).unwrap().bound;
        let oracle = oracle_alpha_gp(&c.h, &c.pop, &c.f, &c.cfg, &OracleCaps::default()).unwrap();
        let expected = from_usize(c.pop.size()) * oracle;
        assert!(bound <= expected, "H = {}: bound {bound} > {expected}", c.h);
    }
}

#[test]
fn bound_reduces_to_the_fixed_length_form_on_one_shape() {
    // With every program of H's shape only the d/(N-1) term survives, as for bitstrings.
    let programs = PrimitiveSet::arithmetic().enumerate_programs(7);
    let mut rng = StdRng::seed_from_u64(32);
    let mut checked = 0;
    for _ in 0..300 {
        let c = random_case(&mut rng, &programs, true);
        if c.h.length() < 2 {
            continue;
        }
        let (m, fitness) = count_and_fitness_gp(&c.h, &c.pop, &c.f).unwrap();
        let p_h = selection_probability_gp(&c.h, &c.pop, &c.f).unwrap();
        let ratio_d = Rational::new(c.h.defining_length().into(), (c.h.length() - 1).into());
        let reduced = from_usize(m) * fitness / c.pop.mean_fitness(&c.f).unwrap()
            * pow(&(Rational::one() - &c.cfg.p_m), c.h.order())
            * (Rational::one() - &c.cfg.p_c * ratio_d * (Rational::one() - p_h));
        let bound = gp_schema_theorem_bound(&c.h, &c.pop, &c.f, &c.cfg).unwrap();
        assert_eq!(bound.bound, reduced.max(Rational::zero()), "H = {}", c.h);
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn only_the_subtree_wildcard_reading_is_exact() {
    let programs = PrimitiveSet::arithmetic().enumerate_programs(7);
    let mut rng = StdRng::seed_from_u64(33);
    let readings = [LowerBlockReading::SubtreeWildcard, LowerBlockReading::Literal, LowerBlockReading::LStyle];
    let mut mismatches = [0usize; 3];
    for _ in 0..300 {
        let c = random_case(&mut rng, &programs, false);
        let oracle = oracle_alpha_gp(&c.h, &c.pop, &c.f, &c.cfg, &OracleCaps::default()).unwrap();
        for (k, reading) in readings.iter().enumerate() {
            let micro = microscopic_alpha_gp(&c.h, &c.pop, &c.f, &c.cfg, *reading).unwrap();
            mismatches[k] += (micro != oracle) as usize;
        }
    }
    assert_eq!(mismatches[0], 0);
    assert!(mismatches[1] > 0 && mismatches[2] > 0, "{mismatches:?}");
}

#[test]
fn effective_fitness_identity() {
    let programs = PrimitiveSet::arithmetic().enumerate_programs(7);
    let mut rng = StdRng::seed_from_u64(34);
    for _ in 0..200 {
        let c = random_case(&mut rng, &programs, false);
        let p = selection_probability_gp(&c.h, &c.pop, &c.f).unwrap();
        let fe = effective_fitness_gp(&c.h, &c.pop, &c.f, &c.cfg).unwrap();
        match fe {
            None => assert!(p.is_zero()),
            Some(fe) => {
                let alpha = macroscopic_alpha_gp(&c.h, &c.pop, &c.f, &c.cfg, LowerBlockReading::default()).unwrap();
                let fitness = count_and_fitness_gp(&c.h, &c.pop, &c.f).unwrap().1;
                assert_eq!(fe * p, alpha * fitness, "H = {}", c.h);
            }
        }
    }
}

#[test]
fn shape_diversity_median_does_not_grow() {
    let runs = gp_seeded_runs(&ExperimentConfig::default_gp(), 30).unwrap();
    let generations = runs[0].len();
    let medians: Vec<usize> = (0..generations)
        .map(|g| {
            let mut v: Vec<usize> = runs.iter().map(|r| r[g].distinct_shapes).collect();
            v.sort();
            v[v.len() / 2]
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[1] <= w[0]), "{medians:?}");
}
