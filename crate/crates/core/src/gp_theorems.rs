//! GP-side predictions: the schema-theorem lower bound, microscopic and
//! macroscopic exact transmission, the creation correction, effective
//! fitness, size evolution and program-level effective fitness.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gp::{
    common_region, one_point_crossover_gp, GpConfig, GpFitness, GpPopulation, NodePath, PointPolicy,
    PrimitiveSet, Shape, Tree,
};
use crate::gp_schema::{building_blocks, BuildingBlocks, GpSchema, LowerBlockReading, Pattern};
use crate::rational::{from_usize, pow, to_f64, Rational};
use crate::rng::substream;
use crate::selection::{Selection, Selector};

/// Distinct programs with their selection masses `p(h,t)`, sorted.
pub fn program_masses(pop: &GpPopulation, f: &GpFitness) -> Result<Vec<(Tree, Rational)>> {
    let fitness = pop.fitness_values(f)?;
    let total: Rational = fitness.iter().sum();
    if total.is_zero() {
        return Err(Error::ZeroTotalFitness);
    }
    let mut masses: BTreeMap<Tree, Rational> = BTreeMap::new();
    for (member, value) in pop.members().iter().zip(fitness) {
        *masses.entry(member.clone()).or_insert_with(Rational::zero) += value / &total;
    }
    Ok(masses.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeEntry {
    pub shape: Shape,
    /// `G_k` as an all-`=` schema.
    pub schema: GpSchema,
    /// `p(G_k, t)`.
    pub mass: Rational,
    /// `S(G_k)`.
    pub size: usize,
    pub programs: Vec<(Tree, Rational)>,
}

/// The shapes present in a population, each with its selection mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeIndex {
    pub shapes: Vec<ShapeEntry>,
}

impl ShapeIndex {
    pub fn new(pop: &GpPopulation, f: &GpFitness) -> Result<Self> {
        let mut grouped: BTreeMap<Shape, Vec<(Tree, Rational)>> = BTreeMap::new();
        for (tree, mass) in program_masses(pop, f)? {
            grouped.entry(tree.shape()).or_default().push((tree, mass));
        }
        let shapes = grouped
            .into_iter()
            .map(|(shape, programs)| ShapeEntry {
                schema: GpSchema::from_shape(&shape),
                mass: programs.iter().map(|(_, m)| m).sum(),
                size: shape.size(),
                shape,
                programs,
            })
            .collect();
        Ok(Self { shapes })
    }

    pub fn get(&self, shape: &Shape) -> Option<&ShapeEntry> {
        self.shapes.iter().find(|e| &e.shape == shape)
    }
}

impl ShapeEntry {
    /// `p(X ∩ G_k, t)`.
    fn mass_of(&self, pattern: &Pattern) -> Rational {
        self.programs.iter().filter(|(t, _)| pattern.matches(t)).map(|(_, m)| m).sum()
    }
}

fn require_exact_model(cfg: &GpConfig) -> Result<()> {
    if !cfg.selection.is_proportional() {
        return Err(Error::Unsupported("exact GP transmission needs proportional selection".into()));
    }
    if !cfg.p_m.is_zero() {
        return Err(Error::Unsupported("exact GP transmission is stated for p_m = 0".into()));
    }
    Ok(())
}

fn blocks_by_point(h: &GpSchema, reading: LowerBlockReading) -> Result<BTreeMap<NodePath, BuildingBlocks>> {
    h.paths().into_iter().map(|p| Ok((p.clone(), building_blocks(h, &p, reading)?))).collect()
}

/// `p(H,t)`.
pub fn selection_probability_gp(h: &GpSchema, pop: &GpPopulation, f: &GpFitness) -> Result<Rational> {
    Ok(program_masses(pop, f)?.iter().filter(|(t, _)| h.matches(t)).map(|(_, m)| m).sum())
}

/// `m(H,t)` and `f(H,t)` (0 when absent).
pub fn count_and_fitness_gp(h: &GpSchema, pop: &GpPopulation, f: &GpFitness) -> Result<(usize, Rational)> {
    let mut count = 0;
    let mut total = Rational::zero();
    for m in pop.members().iter().filter(|m| h.matches(m)) {
        count += 1;
        total += f.evaluate(m)?;
    }
    Ok((count, if count == 0 { total } else { total / from_usize(count) }))
}

/// Microscopic exact transmission probability: a sum over ordered pairs of
/// distinct programs `(h1, h2)` of `p(h1) p(h2)` times the fraction of
/// crossover points `i` for which `h1 ∈ U(H,i)` and `h2 ∈ L(H,i)`. A pair
/// with no admissible point contributes `δ(h1 ∈ H)`.
pub fn microscopic_alpha_gp(
    h: &GpSchema,
    pop: &GpPopulation,
    f: &GpFitness,
    cfg: &GpConfig,
    reading: LowerBlockReading,
) -> Result<Rational> {
    require_exact_model(cfg)?;
    let masses = program_masses(pop, f)?;
    let blocks = blocks_by_point(h, reading)?;
    let p_h: Rational = masses.iter().filter(|(t, _)| h.matches(t)).map(|(_, m)| m).sum();
    if cfg.p_c.is_zero() {
        return Ok(p_h);
    }
    let mut crossover = Rational::zero();
    for (h1, p1) in &masses {
        for (h2, p2) in &masses {
            let region = common_region(h1, h2);
            let points = cfg.points.points(&region);
            let weight = p1 * p2;
            if points.is_empty() {
                if h.matches(h1) {
                    crossover += weight;
                }
                continue;
            }
            let hits = points
                .iter()
                .filter(|i| blocks.get(*i).is_some_and(|b| b.upper.matches(h1) && b.lower.matches(h2)))
                .count();
            if hits > 0 {
                crossover += weight * Rational::new(hits.into(), points.len().into());
            }
        }
    }
    Ok((Rational::one() - &cfg.p_c) * p_h + &cfg.p_c * crossover)
}

/// The crossover term contributed by one pair of shapes.
fn shape_pair_term(
    h: &GpSchema,
    blocks: &BTreeMap<NodePath, BuildingBlocks>,
    first: &ShapeEntry,
    second: &ShapeEntry,
    points: PointPolicy,
) -> Rational {
    let region = common_region(first.schema.pattern(), second.schema.pattern());
    let candidates = points.points(&region);
    if candidates.is_empty() {
        return first.mass_of(h.pattern()) * &second.mass;
    }
    let mut sum = Rational::zero();
    for i in candidates {
        if let Some(b) = blocks.get(i) {
            let upper = first.mass_of(&b.upper);
            if !upper.is_zero() {
                sum += upper * second.mass_of(&b.lower);
            }
        }
    }
    sum / from_usize(candidates.len())
}

/// Macroscopic exact transmission probability: the same quantity grouped
/// by the pair of shapes `(G_j, G_k)` the parents belong to.
pub fn macroscopic_alpha_gp(
    h: &GpSchema,
    pop: &GpPopulation,
    f: &GpFitness,
    cfg: &GpConfig,
    reading: LowerBlockReading,
) -> Result<Rational> {
    require_exact_model(cfg)?;
    let index = ShapeIndex::new(pop, f)?;
    let blocks = blocks_by_point(h, reading)?;
    let p_h: Rational = index.shapes.iter().map(|e| e.mass_of(h.pattern())).sum();
    let mut crossover = Rational::zero();
    if !cfg.p_c.is_zero() {
        for first in &index.shapes {
            for second in &index.shapes {
                crossover += shape_pair_term(h, &blocks, first, second, cfg.points);
            }
        }
    }
    Ok((Rational::one() - &cfg.p_c) * p_h + &cfg.p_c * crossover)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreationCorrection {
    /// `(1 − p_c) p(H) + p_c · T(G(H), G(H))`.
    pub lower_bound: Rational,
    /// Exact α minus the lower bound; zero when every program has `H`'s shape.
    pub delta_alpha: Rational,
}

pub fn creation_correction(h: &GpSchema, pop: &GpPopulation, f: &GpFitness, cfg: &GpConfig) -> Result<CreationCorrection> {
    require_exact_model(cfg)?;
    let reading = LowerBlockReading::SubtreeWildcard;
    let index = ShapeIndex::new(pop, f)?;
    let blocks = blocks_by_point(h, reading)?;
    let p_h: Rational = index.shapes.iter().map(|e| e.mass_of(h.pattern())).sum();
    let own = index
        .get(&h.shape())
        .map(|g| shape_pair_term(h, &blocks, g, g, cfg.points))
        .unwrap_or_else(Rational::zero);
    let lower_bound = (Rational::one() - &cfg.p_c) * p_h + &cfg.p_c * own;
    let alpha = macroscopic_alpha_gp(h, pop, f, cfg, reading)?;
    Ok(CreationCorrection { delta_alpha: alpha - &lower_bound, lower_bound })
}

/// `f_e(H,t) = f(H,t) (1 − p_c (1 − Σ_{j,k} T_jk / p(H,t)))`; absent when
/// `p(H,t) = 0`.
pub fn effective_fitness_gp(h: &GpSchema, pop: &GpPopulation, f: &GpFitness, cfg: &GpConfig) -> Result<Option<Rational>> {
    require_exact_model(cfg)?;
    let index = ShapeIndex::new(pop, f)?;
    let blocks = blocks_by_point(h, LowerBlockReading::SubtreeWildcard)?;
    let p_h: Rational = index.shapes.iter().map(|e| e.mass_of(h.pattern())).sum();
    if p_h.is_zero() {
        return Ok(None);
    }
    let mut terms = Rational::zero();
    for first in &index.shapes {
        for second in &index.shapes {
            terms += shape_pair_term(h, &blocks, first, second, cfg.points);
        }
    }
    let (_, fitness) = count_and_fitness_gp(h, pop, f)?;
    Ok(Some(fitness * (Rational::one() - &cfg.p_c * (Rational::one() - terms / p_h))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpSchemaBound {
    /// Lower bound on `E[m(H,t+1)]`.
    pub bound: Rational,
    /// `Pr(child ∉ H | h1 ∈ H, h2 ∉ G(H), crossover)`; 0 when that event
    /// has probability 0.
    pub p_diff: Rational,
}

/// Lower bound on `E[m(H,t+1)]` under one-point crossover at links and
/// point mutation:
///
/// ```text
/// (m f(H)/f̄) (1 − p_m)^o {1 − p_c [p_diff (1 − p(G)) + d/(N − 1) (p(G) − p(H))]}
/// ```
///
/// with `G = G(H)`, `d` the defining length and `N` the node count of `H`
/// (the `d/(N − 1)` term is dropped when `N = 1`).
pub fn gp_schema_theorem_bound(h: &GpSchema, pop: &GpPopulation, f: &GpFitness, cfg: &GpConfig) -> Result<GpSchemaBound> {
    if !cfg.selection.is_proportional() {
        return Err(Error::Unsupported("the GP schema bound assumes proportional selection".into()));
    }
    if cfg.points != PointPolicy::Links {
        return Err(Error::Unsupported("the GP schema bound assumes crossover at links".into()));
    }
    let masses = program_masses(pop, f)?;
    let g = h.shape_schema();
    let p_h: Rational = masses.iter().filter(|(t, _)| h.matches(t)).map(|(_, m)| m).sum();
    let p_g: Rational = masses.iter().filter(|(t, _)| g.matches(t)).map(|(_, m)| m).sum();
    let mut disrupted = Rational::zero();
    for (h1, p1) in masses.iter().filter(|(t, _)| h.matches(t)) {
        for (h2, p2) in masses.iter().filter(|(t, _)| !g.matches(t)) {
            let region = common_region(h1, h2);
            let links = region.links();
            if links.is_empty() {
                continue;
            }
            let lost = links
                .iter()
                .filter(|i| !h.matches(&one_point_crossover_gp(h1, h2, i).expect("link of the region")))
                .count();
            disrupted += p1 * p2 * Rational::new(lost.into(), links.len().into());
        }
    }
    let outside = &p_h * (Rational::one() - &p_g);
    let p_diff = if outside.is_zero() { Rational::zero() } else { disrupted / outside };
    let n_nodes = h.length();
    let same_shape = if n_nodes > 1 {
        Rational::new(h.defining_length().into(), (n_nodes - 1).into()) * (&p_g - &p_h)
    } else {
        Rational::zero()
    };
    let loss = &cfg.p_c * (&p_diff * (Rational::one() - &p_g) + same_shape);
    let (count, fitness) = count_and_fitness_gp(h, pop, f)?;
    let selected = from_usize(count) * fitness / pop.mean_fitness(f)?;
    let mut bound = selected * pow(&(Rational::one() - &cfg.p_m), h.order()) * (Rational::one() - loss);
    if bound < Rational::zero() {
        bound = Rational::zero();
    }
    Ok(GpSchemaBound { bound, p_diff })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeEvolution {
    /// `Σ_h S(h) p(h,t)`.
    pub by_program: Rational,
    /// `Σ_k S(G_k) p(G_k,t)`.
    pub by_shape: Rational,
}

/// Expected mean size of the next generation under a symmetric
/// subtree-swapping crossover; it does not depend on `p_c`.
pub fn size_evolution(pop: &GpPopulation, f: &GpFitness) -> Result<SizeEvolution> {
    let by_program = program_masses(pop, f)?.iter().map(|(t, m)| from_usize(t.size()) * m).sum();
    let by_shape = ShapeIndex::new(pop, f)?.shapes.iter().map(|e| from_usize(e.size) * &e.mass).sum();
    Ok(SizeEvolution { by_program, by_shape })
}

/// Nodes whose relabelling to some other same-arity primitive changes the
/// program's fitness, in preorder.
pub fn active_nodes(program: &Tree, set: &PrimitiveSet, f: &GpFitness) -> Result<Vec<NodePath>> {
    let base = f.evaluate(program)?;
    let mut active = Vec::new();
    for path in program.paths() {
        let node = program.subtree(&path).expect("own path");
        for alternative in set.symbols_with_arity(node.arity()) {
            if alternative == node.symbol() {
                continue;
            }
            if f.evaluate(&program.relabel(&path, alternative)?)? != base {
                active.push(path.clone());
                break;
            }
        }
    }
    Ok(active)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgramEffectiveFitness {
    pub fitness: Rational,
    /// `C^a`: all nodes.
    pub total_nodes: usize,
    /// `C^e`: active nodes.
    pub active_nodes: usize,
    /// Estimated probability that crossover at an active point lowers fitness.
    pub p_disruption: f64,
    /// `f (1 − p_c (C^e / C^a) p_d)`.
    pub effective: f64,
}

impl ProgramEffectiveFitness {
    /// `P(t+1) ≈ P(t) f_e / f̄(t)`.
    pub fn predicted_share(&self, share: f64, mean_fitness: f64) -> f64 {
        share * self.effective / mean_fitness
    }
}

/// Estimates `f_e` for one program with `trials` sampled crossovers in
/// which `program` is the first parent and the point is an active link.
pub fn program_effective_fitness(
    program: &Tree,
    pop: &GpPopulation,
    set: &PrimitiveSet,
    f: &GpFitness,
    cfg: &GpConfig,
    trials: usize,
    seed: u64,
) -> Result<ProgramEffectiveFitness> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let fitness = f.evaluate(program)?;
    let active = active_nodes(program, set, f)?;
    let selector = Selector::new(&pop.fitness_values(f)?, &Selection::Proportional)?;
    let mut sampled = 0usize;
    let mut worse = 0usize;
    for trial in 0..trials {
        let mut rng = substream(seed, &[trial as u64]);
        let partner = &pop.members()[selector.pick(&mut rng)];
        let region = common_region(program, partner);
        let candidates: Vec<&NodePath> =
            cfg.points.points(&region).iter().filter(|p| active.binary_search(p).is_ok()).collect();
        if candidates.is_empty() {
            continue;
        }
        let point = candidates[rng.gen_range(0..candidates.len())];
        let child = one_point_crossover_gp(program, partner, point)?;
        sampled += 1;
        worse += (f.evaluate(&child)? < fitness) as usize;
    }
    let p_disruption = if sampled == 0 { 0.0 } else { worse as f64 / sampled as f64 };
    let total_nodes = program.size();
    let effective = to_f64(&fitness)
        * (1.0 - to_f64(&cfg.p_c) * (active.len() as f64 / total_nodes as f64) * p_disruption);
    Ok(ProgramEffectiveFitness { fitness, total_nodes, active_nodes: active.len(), p_disruption, effective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn h(s: &str) -> GpSchema {
        s.parse().unwrap()
    }

    fn cfg(n: usize, p_c: Rational) -> GpConfig {
        GpConfig::new(n, p_c, int(0), 0)
    }

    #[test]
    fn reductions() {
        let pop = GpPopulation::parse(&["(+ x y)", "(* x (+ y y))", "x"]).unwrap();
        let f = GpFitness::Size;
        let schema = h("(= x =)");
        let p = selection_probability_gp(&schema, &pop, &f).unwrap();
        assert_eq!(p, ratio(3, 9));
        for reading in [LowerBlockReading::SubtreeWildcard, LowerBlockReading::Literal] {
            assert_eq!(microscopic_alpha_gp(&schema, &pop, &f, &cfg(3, int(0)), reading).unwrap(), p);
        }
        assert_eq!(macroscopic_alpha_gp(&schema, &pop, &f, &cfg(3, int(0)), LowerBlockReading::default()).unwrap(), p);
        let c = creation_correction(&schema, &pop, &f, &cfg(3, int(0))).unwrap();
        assert_eq!(c.delta_alpha, int(0));
        assert_eq!(effective_fitness_gp(&schema, &pop, &f, &cfg(3, int(0))).unwrap(), Some(int(3)));
        let bound = gp_schema_theorem_bound(&schema, &pop, &f, &cfg(3, int(0))).unwrap();
        assert_eq!(bound.bound, int(1) * int(3) / pop.mean_fitness(&f).unwrap());
    }

    #[test]
    fn closure_inside_schema() {
        let pop = GpPopulation::parse(&["(+ x y)", "(+ x x)", "(+ x y)"]).unwrap();
        let f = GpFitness::TargetMatch { target: "(+ x y)".parse().unwrap() };
        let schema = h("(+ x =)");
        for p_c in [int(0), ratio(1, 2), int(1)] {
            let c = cfg(3, p_c);
            let reading = LowerBlockReading::default();
            assert_eq!(microscopic_alpha_gp(&schema, &pop, &f, &c, reading).unwrap(), int(1));
            assert_eq!(macroscopic_alpha_gp(&schema, &pop, &f, &c, reading).unwrap(), int(1));
            let fitness = count_and_fitness_gp(&schema, &pop, &f).unwrap().1;
            assert_eq!(effective_fitness_gp(&schema, &pop, &f, &c).unwrap(), Some(fitness));
            assert_eq!(creation_correction(&schema, &pop, &f, &c).unwrap().delta_alpha, int(0));
        }
    }

    #[test]
    fn micro_equals_macro_on_mixed_shapes() {
        let pop = GpPopulation::parse(&["(+ x y)", "(* (+ x y) x)", "(+ (* y y) y)", "y"]).unwrap();
        let f = GpFitness::Size;
        for text in ["(+ x =)", "(= (= x =) y)", "(* = =)", "y", "(+ (* = y) =)"] {
            let schema = h(text);
            for points in [PointPolicy::Links, PointPolicy::AllNodes] {
                let c = GpConfig { points, ..cfg(4, ratio(1, 2)) };
                let reading = LowerBlockReading::default();
                assert_eq!(
                    microscopic_alpha_gp(&schema, &pop, &f, &c, reading).unwrap(),
                    macroscopic_alpha_gp(&schema, &pop, &f, &c, reading).unwrap(),
                    "{text}"
                );
            }
            let cc = creation_correction(&schema, &pop, &f, &cfg(4, int(1))).unwrap();
            assert!(cc.delta_alpha >= int(0));
        }
    }

    #[test]
    fn effective_fitness_identity() {
        let pop = GpPopulation::parse(&["(+ x y)", "(* (+ x y) x)", "(+ y y)"]).unwrap();
        let f = GpFitness::Size;
        let schema = h("(+ = y)");
        let c = cfg(3, ratio(2, 3));
        let fe = effective_fitness_gp(&schema, &pop, &f, &c).unwrap().unwrap();
        let alpha = macroscopic_alpha_gp(&schema, &pop, &f, &c, LowerBlockReading::default()).unwrap();
        let p = selection_probability_gp(&schema, &pop, &f).unwrap();
        let fitness = count_and_fitness_gp(&schema, &pop, &f).unwrap().1;
        assert_eq!(fe * p, alpha * fitness);
        assert_eq!(effective_fitness_gp(&h("(* y y)"), &pop, &f, &c).unwrap(), None);
    }

    #[test]
    fn size_evolution_examples() {
        let flat = GpFitness::flat();
        let pop = GpPopulation::parse(&["(+ x y)", "(* (+ x y) x)", "y"]).unwrap();
        let s = size_evolution(&pop, &flat).unwrap();
        assert_eq!(s.by_program, pop.mean_size());
        assert_eq!(s.by_shape, s.by_program);
        let single = GpPopulation::parse(&["(* (+ x y) x)"]).unwrap();
        assert_eq!(size_evolution(&single, &GpFitness::Size).unwrap().by_program, int(5));
    }

    #[test]
    fn inert_subtree_is_inactive() {
        let set = PrimitiveSet::new(
            vec![("+".into(), 2), ("*".into(), 2)],
            vec!["x".into(), "y".into(), "0".into()],
        )
        .unwrap();
        let f = GpFitness::Regression { cases: vec![(1, 2, 1), (3, 5, 3), (-2, 7, -2)] };
        let program: Tree = "(+ x (* 0 (+ x y)))".parse().unwrap();
        let active = active_nodes(&program, &set, &f).unwrap();
        let inert: Vec<NodePath> = ["1.1", "1.1.0", "1.1.1"].iter().map(|s| s.parse().unwrap()).collect();
        assert!(inert.iter().all(|p| !active.contains(p)));
        assert_eq!(active.len(), program.size() - inert.len());
        let pop = GpPopulation::new(vec![program.clone(), "(+ y x)".parse().unwrap()]).unwrap();
        let c = GpConfig::new(2, int(1), int(0), 0);
        let pef = program_effective_fitness(&program, &pop, &set, &f, &c, 200, 4).unwrap();
        assert_eq!(pef.active_nodes, 4);
        assert!(pef.effective <= to_f64(&pef.fitness));
        let flat = program_effective_fitness(&program, &pop, &set, &GpFitness::flat(), &c, 50, 4).unwrap();
        assert_eq!((flat.p_disruption, flat.effective), (0.0, 1.0));
        let none = program_effective_fitness(&program, &pop, &set, &f, &GpConfig::new(2, int(0), int(0), 0), 50, 4).unwrap();
        assert_eq!(none.effective, to_f64(&none.fitness));
    }
}
