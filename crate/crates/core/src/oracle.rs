//! Exhaustive enumeration of the one-offspring distribution in exact
//! rational arithmetic. Used as ground truth for the closed-form
//! predictions on small instances.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ga::{one_point_crossover, BitString, FitnessFunction, GaConfig, MutationMode, Population};
use crate::gp::{common_region, one_point_crossover_gp, GpConfig, GpFitness, GpPopulation, Tree};
use crate::gp_schema::GpSchema;
use crate::rational::{from_usize, pow, Rational};
use crate::schema::GaSchema;

/// Size limits above which enumeration is refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_population: usize,
    pub max_string_len: usize,
    pub max_trees: usize,
    pub max_tree_nodes: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self { max_population: 6, max_string_len: 5, max_trees: 4, max_tree_nodes: 7 }
    }
}

/// Exact law of one offspring. Genotypes are unique and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffspringDistribution<G> {
    pub support: Vec<(G, Rational)>,
}

impl<G: Ord + Clone> OffspringDistribution<G> {
    fn from_map(map: BTreeMap<G, Rational>) -> Self {
        Self { support: map.into_iter().filter(|(_, p)| !p.is_zero()).collect() }
    }

    pub fn total(&self) -> Rational {
        self.support.iter().map(|(_, p)| p).sum()
    }

    pub fn probability_of(&self, g: &G) -> Rational {
        self.support.iter().find(|(x, _)| x == g).map(|(_, p)| p.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn mass_where(&self, pred: impl Fn(&G) -> bool) -> Rational {
        self.support.iter().filter(|(g, _)| pred(g)).map(|(_, p)| p).sum()
    }
}

fn selection_weights(fitness: Vec<Rational>) -> Result<Vec<Rational>> {
    let total: Rational = fitness.iter().sum();
    if total.is_zero() {
        return Err(Error::ZeroTotalFitness);
    }
    Ok(fitness.into_iter().map(|v| v / &total).collect())
}

fn check_ga_caps(pop: &Population, f: &FitnessFunction, cfg: &GaConfig, caps: &OracleCaps) -> Result<()> {
    crate::ga::check_setup(pop, f, cfg)?;
    if pop.size() > caps.max_population || pop.string_len() > caps.max_string_len {
        return Err(Error::CapExceeded(format!(
            "GA oracle limited to n ≤ {}, len ≤ {} (got n = {}, len = {})",
            caps.max_population,
            caps.max_string_len,
            pop.size(),
            pop.string_len()
        )));
    }
    if !cfg.selection.is_proportional() {
        return Err(Error::Unsupported("the oracle enumerates proportional selection only".into()));
    }
    Ok(())
}

/// Applies exact mutation to a pre-mutation distribution.
fn mutate_distribution(pre: BTreeMap<BitString, Rational>, cfg: &GaConfig) -> BTreeMap<BitString, Rational> {
    if cfg.p_m.is_zero() {
        return pre;
    }
    let mut out: BTreeMap<BitString, Rational> = BTreeMap::new();
    let keep = Rational::one() - &cfg.p_m;
    for (s, p) in pre {
        let len = s.len();
        match cfg.mutation {
            MutationMode::PerBit => {
                for pattern in 0u64..1 << len {
                    let flips = pattern.count_ones() as usize;
                    let weight = pow(&cfg.p_m, flips) * pow(&keep, len - flips);
                    let bits = s.bits().iter().enumerate().map(|(i, &b)| b ^ ((pattern >> i) & 1 == 1)).collect();
                    *out.entry(BitString::new(bits).expect("len ≥ 1")).or_insert_with(Rational::zero) += &p * weight;
                }
            }
            MutationMode::SingleBit => {
                *out.entry(s.clone()).or_insert_with(Rational::zero) += &p * &keep;
                let each = &p * &cfg.p_m / from_usize(len);
                for i in 0..len {
                    *out.entry(s.flipped(i)).or_insert_with(Rational::zero) += &each;
                }
            }
        }
    }
    out
}

/// Sums over every parent choice, parent pair, cut and mutation pattern.
pub fn enumerate_offspring_ga(
    pop: &Population,
    f: &FitnessFunction,
    cfg: &GaConfig,
    caps: &OracleCaps,
) -> Result<OffspringDistribution<BitString>> {
    check_ga_caps(pop, f, cfg, caps)?;
    let weights = selection_weights(pop.fitness_values(f)?)?;
    let members = pop.members();
    let len = pop.string_len();
    let mut pre: BTreeMap<BitString, Rational> = BTreeMap::new();
    let clone = Rational::one() - &cfg.p_c;
    for (a, wa) in members.iter().zip(&weights) {
        *pre.entry(a.clone()).or_insert_with(Rational::zero) += &clone * wa;
        if cfg.p_c.is_zero() {
            continue;
        }
        for (b, wb) in members.iter().zip(&weights) {
            let each = &cfg.p_c * wa * wb / from_usize(len - 1);
            for cut in 0..len - 1 {
                let (child, _) = one_point_crossover(a, b, cut)?;
                *pre.entry(child).or_insert_with(Rational::zero) += &each;
            }
        }
    }
    Ok(OffspringDistribution::from_map(mutate_distribution(pre, cfg)))
}

/// The same law computed in a different order: distinct genotypes are
/// merged first, cuts are the outer loop and each candidate child is
/// scored by scanning target strings.
pub fn enumerate_offspring_ga_by_target(
    pop: &Population,
    f: &FitnessFunction,
    cfg: &GaConfig,
    caps: &OracleCaps,
) -> Result<OffspringDistribution<BitString>> {
    check_ga_caps(pop, f, cfg, caps)?;
    let weights = selection_weights(pop.fitness_values(f)?)?;
    let mut merged: BTreeMap<&BitString, Rational> = BTreeMap::new();
    for (m, w) in pop.members().iter().zip(weights) {
        *merged.entry(m).or_insert_with(Rational::zero) += w;
    }
    let parents: Vec<(&BitString, Rational)> = merged.into_iter().rev().collect();
    let len = pop.string_len();
    let mut pre: BTreeMap<BitString, Rational> = BitString::enumerate(len).map(|s| (s, Rational::zero())).collect();
    if !cfg.p_c.is_zero() {
        for cut in (0..len - 1).rev() {
            for (b, wb) in &parents {
                for (a, wa) in &parents {
                    let child: Vec<bool> = (0..len).map(|i| if i <= cut { a.get(i) } else { b.get(i) }).collect();
                    let target = BitString::new(child)?;
                    *pre.get_mut(&target).expect("every string listed") += &cfg.p_c * wa * wb / from_usize(len - 1);
                }
            }
        }
    }
    for (a, wa) in &parents {
        *pre.get_mut(*a).expect("every string listed") += (Rational::one() - &cfg.p_c) * wa;
    }
    Ok(OffspringDistribution::from_map(mutate_distribution(pre, cfg)))
}

pub fn oracle_alpha(h: &GaSchema, pop: &Population, f: &FitnessFunction, cfg: &GaConfig, caps: &OracleCaps) -> Result<Rational> {
    if h.len() != pop.string_len() {
        return Err(Error::LengthMismatch { expected: pop.string_len(), found: h.len() });
    }
    Ok(enumerate_offspring_ga(pop, f, cfg, caps)?.mass_where(|s| h.matches(s).unwrap_or(false)))
}

/// Law of the number of successes among `n` independent offspring each
/// landing in the schema with probability `alpha`, built by convolving one
/// offspring at a time.
pub fn compose_count_law(alpha: &Rational, n: usize) -> Vec<Rational> {
    let miss = Rational::one() - alpha;
    let mut law = vec![Rational::one()];
    for _ in 0..n {
        let mut next = vec![Rational::zero(); law.len() + 1];
        for (k, p) in law.iter().enumerate() {
            next[k] += p * &miss;
            next[k + 1] += p * alpha;
        }
        law = next;
    }
    law
}

fn check_gp_caps(pop: &GpPopulation, cfg: &GpConfig, caps: &OracleCaps) -> Result<()> {
    cfg.validate()?;
    if pop.size() > caps.max_trees {
        return Err(Error::CapExceeded(format!("GP oracle limited to {} trees, got {}", caps.max_trees, pop.size())));
    }
    if let Some(big) = pop.members().iter().find(|t| t.size() > caps.max_tree_nodes) {
        return Err(Error::CapExceeded(format!(
            "GP oracle limited to {} nodes per tree, `{big}` has {}",
            caps.max_tree_nodes,
            big.size()
        )));
    }
    if !cfg.p_m.is_zero() {
        return Err(Error::Unsupported("the GP oracle enumerates p_m = 0 only".into()));
    }
    if !cfg.selection.is_proportional() {
        return Err(Error::Unsupported("the oracle enumerates proportional selection only".into()));
    }
    Ok(())
}

/// Sums over parent pairs (by population index) and the uniformly chosen
/// crossover point of the configured policy.
pub fn enumerate_offspring_gp(
    pop: &GpPopulation,
    f: &GpFitness,
    cfg: &GpConfig,
    caps: &OracleCaps,
) -> Result<OffspringDistribution<Tree>> {
    check_gp_caps(pop, cfg, caps)?;
    let weights = selection_weights(pop.fitness_values(f)?)?;
    let members = pop.members();
    let mut out: BTreeMap<Tree, Rational> = BTreeMap::new();
    let clone = Rational::one() - &cfg.p_c;
    for (a, wa) in members.iter().zip(&weights) {
        *out.entry(a.clone()).or_insert_with(Rational::zero) += &clone * wa;
        if cfg.p_c.is_zero() {
            continue;
        }
        for (b, wb) in members.iter().zip(&weights) {
            let weight = &cfg.p_c * wa * wb;
            let region = common_region(a, b);
            let points = cfg.points.points(&region);
            if points.is_empty() {
                *out.entry(a.clone()).or_insert_with(Rational::zero) += weight;
                continue;
            }
            let each = weight / from_usize(points.len());
            for point in points {
                let child = one_point_crossover_gp(a, b, point)?;
                *out.entry(child).or_insert_with(Rational::zero) += &each;
            }
        }
    }
    Ok(OffspringDistribution::from_map(out))
}

pub fn oracle_alpha_gp(h: &GpSchema, pop: &GpPopulation, f: &GpFitness, cfg: &GpConfig, caps: &OracleCaps) -> Result<Rational> {
    Ok(enumerate_offspring_gp(pop, f, cfg, caps)?.mass_where(|t| h.matches(t)))
}

/// `E[μ(t+1)]` from the enumerated offspring law.
pub fn oracle_expected_mean_size(pop: &GpPopulation, f: &GpFitness, cfg: &GpConfig, caps: &OracleCaps) -> Result<Rational> {
    Ok(enumerate_offspring_gp(pop, f, cfg, caps)?
        .support
        .iter()
        .map(|(t, p)| from_usize(t.size()) * p)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::Breeder;
    use crate::ga_theorems::selection_probability;
    use crate::rational::{int, ratio, to_f64};

    fn caps() -> OracleCaps {
        OracleCaps::default()
    }

    #[test]
    fn ga_trivial_cases() {
        let pop = Population::parse(&["011", "110", "001"]).unwrap();
        let f = FitnessFunction::one_max();
        let cfg = GaConfig::new(3, int(0), int(0), 0);
        let d = enumerate_offspring_ga(&pop, &f, &cfg, &caps()).unwrap();
        for (s, p) in &d.support {
            assert_eq!(*p, selection_probability(&GaSchema::from_string(s), &pop, &f).unwrap());
        }
        let twins = Population::parse(&["11", "11"]).unwrap();
        let d = enumerate_offspring_ga(&twins, &f, &GaConfig::new(2, ratio(1, 2), int(0), 0), &caps()).unwrap();
        assert_eq!(d.support, vec![("11".parse().unwrap(), int(1))]);
        let all: GaSchema = "***".parse().unwrap();
        let cfg = GaConfig::new(3, ratio(1, 2), ratio(1, 10), 0);
        assert_eq!(oracle_alpha(&all, &pop, &f, &cfg, &caps()).unwrap(), int(1));
    }

    #[test]
    fn ga_orderings_agree() {
        let pop = Population::parse(&["0110", "1011", "0001", "1111"]).unwrap();
        let f = FitnessFunction::trap(2);
        for mutation in [MutationMode::PerBit, MutationMode::SingleBit] {
            let cfg = GaConfig { mutation, ..GaConfig::new(4, ratio(2, 3), ratio(1, 7), 0) };
            let a = enumerate_offspring_ga(&pop, &f, &cfg, &caps()).unwrap();
            let b = enumerate_offspring_ga_by_target(&pop, &f, &cfg, &caps()).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.total(), int(1));
        }
    }

    #[test]
    fn ga_caps_refuse() {
        let pop = Population::random(7, 3, 1).unwrap();
        let cfg = GaConfig::new(7, int(0), int(0), 0);
        assert!(matches!(
            enumerate_offspring_ga(&pop, &FitnessFunction::one_max(), &cfg, &caps()),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn ga_matches_sampling() {
        let pop = Population::parse(&["00", "01", "11"]).unwrap();
        let f = FitnessFunction::one_max();
        let cfg = GaConfig::new(3, ratio(1, 2), int(0), 9);
        let exact = enumerate_offspring_ga(&pop, &f, &cfg, &caps()).unwrap();
        let breeder = Breeder::new(&pop, &f, &cfg).unwrap();
        let trials = 200_000;
        let mut counts: BTreeMap<BitString, usize> = BTreeMap::new();
        for i in 0..trials {
            *counts.entry(breeder.offspring_for(cfg.seed, i)).or_default() += 1;
        }
        for (s, p) in &exact.support {
            let p = to_f64(p);
            let observed = *counts.get(s).unwrap_or(&0) as f64 / trials as f64;
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((observed - p).abs() <= 4.0 * se, "{s}: {observed} vs {p}");
        }
    }

    #[test]
    fn count_law_is_binomial() {
        let law = compose_count_law(&ratio(2, 7), 5);
        let closed = crate::ga_theorems::next_count_distribution(&ratio(2, 7), 5).unwrap();
        assert_eq!(law, closed.pmf);
    }

    #[test]
    fn gp_trivial_cases() {
        let f = GpFitness::Size;
        let twins = GpPopulation::parse(&["(+ x y)", "(+ x y)"]).unwrap();
        let d = enumerate_offspring_gp(&twins, &f, &GpConfig::new(2, int(1), int(0), 0), &caps()).unwrap();
        assert_eq!(d.support, vec![("(+ x y)".parse().unwrap(), int(1))]);
        let pop = GpPopulation::parse(&["(+ x y)", "x", "(* x (+ y y))"]).unwrap();
        let d = enumerate_offspring_gp(&pop, &f, &GpConfig::new(3, int(0), int(0), 0), &caps()).unwrap();
        assert_eq!(d.probability_of(&"x".parse().unwrap()), ratio(1, 9));
        assert_eq!(oracle_expected_mean_size(&pop, &f, &GpConfig::new(3, int(1), int(0), 0), &caps()).unwrap(), ratio(35, 9));
    }

    #[test]
    fn gp_hand_table() {
        // Flat fitness, parents (+ x y) and (* (+ x x) y): region {root, 0, 1},
        // both links have equal arity at the root.
        let pop = GpPopulation::parse(&["(+ x y)", "(* (+ x x) y)"]).unwrap();
        let cfg = GpConfig::new(2, int(1), int(0), 0);
        let d = enumerate_offspring_gp(&pop, &GpFitness::flat(), &cfg, &caps()).unwrap();
        let expect = [
            ("(+ x y)", ratio(1, 4) + ratio(1, 8)),
            ("(+ (+ x x) y)", ratio(1, 8)),
            ("(* x y)", ratio(1, 8)),
            ("(* (+ x x) y)", ratio(1, 4) + ratio(1, 8)),
        ];
        assert_eq!(d.support.len(), expect.len());
        for (t, p) in expect {
            assert_eq!(d.probability_of(&t.parse().unwrap()), p, "{t}");
        }
    }
}
