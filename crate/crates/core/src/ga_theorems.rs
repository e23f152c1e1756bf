//! GA-side predictions: Holland's bound, exact transmission probability,
//! adjusted and effective fitness, deception, the binomial law of the next
//! count and the Chebychev-based probabilistic bounds.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ga::{FitnessFunction, GaConfig, MutationMode, Population};
use crate::rational::{from_usize, pow, to_f64, Rational};
use crate::schema::{count_and_fitness, GaSchema};

/// Where a transmission probability came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Formula,
    Oracle,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionEstimate {
    pub alpha: Rational,
    /// `n · α`
    pub expected_count: Rational,
    /// `n · α · (1 − α)`
    pub variance: Rational,
    pub provenance: Provenance,
}

impl TransmissionEstimate {
    pub fn new(alpha: Rational, n: usize, provenance: Provenance) -> Self {
        let n = from_usize(n);
        let expected_count = &n * &alpha;
        let variance = &expected_count * (Rational::one() - &alpha);
        Self { alpha, expected_count, variance, provenance }
    }
}

/// Selection masses of one population, cached per schema.
struct SelectionMasses<'a> {
    pop: &'a Population,
    fitness: Vec<Rational>,
    total: Rational,
    cache: HashMap<GaSchema, Rational>,
}

impl<'a> SelectionMasses<'a> {
    fn new(pop: &'a Population, f: &FitnessFunction) -> Result<Self> {
        let fitness = pop.fitness_values(f)?;
        let total: Rational = fitness.iter().sum();
        if total.is_zero() {
            return Err(Error::ZeroTotalFitness);
        }
        Ok(Self { pop, fitness, total, cache: HashMap::new() })
    }

    fn mass(&mut self, h: &GaSchema) -> Rational {
        if let Some(v) = self.cache.get(h) {
            return v.clone();
        }
        let hit: Rational = self
            .pop
            .members()
            .iter()
            .zip(&self.fitness)
            .filter(|(m, _)| h.matches_unchecked(m))
            .map(|(_, v)| v)
            .sum();
        let value = hit / &self.total;
        self.cache.insert(h.clone(), value.clone());
        value
    }

    /// Crossover-and-selection part of α (no mutation).
    fn alpha_without_mutation(&mut self, h: &GaSchema, p_c: &Rational) -> Result<Rational> {
        let len = h.len();
        let p = self.mass(h);
        if p_c.is_zero() {
            return Ok(p);
        }
        if len < 2 {
            return Err(Error::Config("crossover needs strings of length at least 2".into()));
        }
        let mut channels = Rational::zero();
        for cut in 0..len - 1 {
            channels += self.mass(&h.left(cut)?) * self.mass(&h.right(cut)?);
        }
        Ok((Rational::one() - p_c) * p + p_c * channels / from_usize(len - 1))
    }
}

fn check_schema(h: &GaSchema, pop: &Population) -> Result<()> {
    if h.len() != pop.string_len() {
        return Err(Error::LengthMismatch { expected: pop.string_len(), found: h.len() });
    }
    Ok(())
}

fn require_proportional(cfg: &GaConfig) -> Result<()> {
    if !cfg.selection.is_proportional() {
        return Err(Error::Unsupported("closed-form transmission needs proportional selection".into()));
    }
    Ok(())
}

/// `p(H,t) = m(H,t) f(H,t) / (n f̄(t))`: the chance that one proportional
/// selection lands in `H`.
pub fn selection_probability(h: &GaSchema, pop: &Population, f: &FitnessFunction) -> Result<Rational> {
    check_schema(h, pop)?;
    Ok(SelectionMasses::new(pop, f)?.mass(h))
}

/// Holland's lower bound on `E[m(H,t+1)]`.
pub fn holland_bound(h: &GaSchema, pop: &Population, f: &FitnessFunction, cfg: &GaConfig) -> Result<Rational> {
    check_schema(h, pop)?;
    let count = count_and_fitness(h, pop, f)?;
    let mean = pop.mean_fitness(f)?;
    let survival_crossover = Rational::one() - &cfg.p_c * h.fragility()?;
    let survival_mutation = pow(&(Rational::one() - &cfg.p_m), h.order());
    let bound = &count.mean_fitness / mean * from_usize(count.instances) * survival_crossover * survival_mutation;
    Ok(if bound < Rational::zero() { Rational::zero() } else { bound })
}

/// Mutation-aware enumeration is exponential in the order.
const MAX_MUTATION_ORDER: usize = 20;

/// Exact probability that one offspring samples `H`.
///
/// Without mutation this is
/// `(1 − p_c) p(H) + p_c/(len−1) Σ_cuts p(L(H,k)) p(R(H,k))` over the
/// `len − 1` cut positions. Mutation is applied as an exact transition on
/// the fixed positions of `H`.
pub fn exact_alpha(h: &GaSchema, pop: &Population, f: &FitnessFunction, cfg: &GaConfig) -> Result<TransmissionEstimate> {
    check_schema(h, pop)?;
    require_proportional(cfg)?;
    let mut masses = SelectionMasses::new(pop, f)?;
    let alpha = if cfg.p_m.is_zero() {
        masses.alpha_without_mutation(h, &cfg.p_c)?
    } else {
        match cfg.mutation {
            MutationMode::PerBit => per_bit_alpha(h, &mut masses, cfg)?,
            MutationMode::SingleBit => single_bit_alpha(h, &mut masses, cfg)?,
        }
    };
    Ok(TransmissionEstimate::new(alpha, pop.size(), Provenance::Formula))
}

fn per_bit_alpha(h: &GaSchema, masses: &mut SelectionMasses, cfg: &GaConfig) -> Result<Rational> {
    let order = h.order();
    if order > MAX_MUTATION_ORDER {
        return Err(Error::CapExceeded(format!("mutation-aware alpha enumerates 2^{order} patterns")));
    }
    let target: Vec<bool> = h.fixed_positions().map(|i| h.symbols()[i].expect("fixed")).collect();
    let keep = Rational::one() - &cfg.p_m;
    let mut alpha = Rational::zero();
    for pattern in 0u32..1 << order {
        let values: Vec<bool> = (0..order).map(|j| (pattern >> j) & 1 == 1).collect();
        let flips = values.iter().zip(&target).filter(|(a, b)| a != b).count();
        let source = h.with_fixed_values(&values);
        let weight = pow(&cfg.p_m, flips) * pow(&keep, order - flips);
        alpha += weight * masses.alpha_without_mutation(&source, &cfg.p_c)?;
    }
    Ok(alpha)
}

fn single_bit_alpha(h: &GaSchema, masses: &mut SelectionMasses, cfg: &GaConfig) -> Result<Rational> {
    let len = h.len();
    let base = masses.alpha_without_mutation(h, &cfg.p_c)?;
    let mut flipped_sum = from_usize(len - h.order()) * &base;
    for pos in h.fixed_positions().collect::<Vec<_>>() {
        let mut symbols = h.symbols().to_vec();
        symbols[pos] = symbols[pos].map(|b| !b);
        flipped_sum += masses.alpha_without_mutation(&GaSchema::new(symbols)?, &cfg.p_c)?;
    }
    Ok((Rational::one() - &cfg.p_m) * base + &cfg.p_m * flipped_sum / from_usize(len))
}

/// The typeset variant that averages over `len` indices `0..len`, the last
/// of which is a no-op cut. Reported next to [`exact_alpha`] for comparison.
pub fn alpha_len_divisor_variant(h: &GaSchema, pop: &Population, f: &FitnessFunction, p_c: &Rational) -> Result<Rational> {
    check_schema(h, pop)?;
    let mut masses = SelectionMasses::new(pop, f)?;
    let len = h.len();
    let mut channels = Rational::zero();
    for i in 0..len {
        channels += masses.mass(&h.left(i)?) * masses.mass(&h.right(i)?);
    }
    Ok((Rational::one() - p_c) * masses.mass(h) + p_c * channels / from_usize(len))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaFitness {
    /// `f_a = f(H,t) (1 − p_c d(H)/(len−1) − p_m o(H))`
    pub adjusted: Rational,
    /// `f_e = α f(H,t) / p(H,t)`, with α excluding mutation; absent when `p(H,t) = 0`.
    pub effective: Option<Rational>,
    /// `f_e` assembled from the disruption sum over the cuts inside the
    /// defining length; equals `effective` whenever defined.
    pub effective_from_cuts: Option<Rational>,
}

pub fn adjusted_and_effective_fitness(
    h: &GaSchema,
    pop: &Population,
    f: &FitnessFunction,
    cfg: &GaConfig,
) -> Result<SchemaFitness> {
    check_schema(h, pop)?;
    require_proportional(cfg)?;
    let fitness = count_and_fitness(h, pop, f)?.mean_fitness;
    let adjusted = &fitness
        * (Rational::one() - &cfg.p_c * h.fragility()? - &cfg.p_m * from_usize(h.order()));
    let mut masses = SelectionMasses::new(pop, f)?;
    let p = masses.mass(h);
    if p.is_zero() {
        return Ok(SchemaFitness { adjusted, effective: None, effective_from_cuts: None });
    }
    let alpha = masses.alpha_without_mutation(h, &cfg.p_c)?;
    let effective = &alpha / &p * &fitness;
    let first = h.fixed_positions().next().unwrap_or(0);
    let last = h.fixed_positions().last().unwrap_or(0);
    let mut disruption = Rational::zero();
    for cut in first..last {
        disruption += Rational::one() - masses.mass(&h.left(cut)?) * masses.mass(&h.right(cut)?) / &p;
    }
    let effective_from_cuts = &fitness * (Rational::one() - &cfg.p_c * disruption / from_usize(h.len() - 1));
    Ok(SchemaFitness { adjusted, effective: Some(effective), effective_from_cuts: Some(effective_from_cuts) })
}

/// Which schemata a deception report ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeceptionScope {
    /// Every full string, as an order-`len` schema.
    Strings,
    /// Every schema of order `1..=max_order`. The all-wildcard schema is
    /// left out: it matches everything and would win trivially.
    Schemata { max_order: usize },
}

/// Largest string length a deception report will enumerate.
pub const DECEPTION_MAX_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeceptiveChannel {
    pub schema: GaSchema,
    pub cut: usize,
    pub p_left: Rational,
    pub p_right: Rational,
    pub p_schema: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeceptionReport {
    /// Maximisers of `f(H,t)`, sorted lexicographically.
    pub fitness_optima: Vec<GaSchema>,
    /// Maximisers of the operator-adjusted fitness, sorted lexicographically.
    pub adjusted_optima: Vec<GaSchema>,
    /// No maximiser of `f` also maximises `f_a`.
    pub deceptive: bool,
    /// Channels `(H, cut)` with `p(L) p(R) < p(H)`.
    pub channels: Vec<DeceptiveChannel>,
}

pub fn deception_report(
    pop: &Population,
    f: &FitnessFunction,
    cfg: &GaConfig,
    scope: DeceptionScope,
) -> Result<DeceptionReport> {
    let len = pop.string_len();
    if len > DECEPTION_MAX_LEN {
        return Err(Error::CapExceeded(format!(
            "deception report enumerates schemata of length {len} (max {DECEPTION_MAX_LEN})"
        )));
    }
    if len < 2 {
        return Err(Error::UndefinedFragility);
    }
    let mut candidates: Vec<GaSchema> = match scope {
        DeceptionScope::Strings => crate::ga::BitString::enumerate(len).map(|s| GaSchema::from_string(&s)).collect(),
        DeceptionScope::Schemata { max_order } => {
            GaSchema::enumerate(len).filter(|h| (1..=max_order).contains(&h.order())).collect()
        }
    };
    candidates.sort_by_key(|h| h.to_string());

    let mut masses = SelectionMasses::new(pop, f)?;
    let mut scored = Vec::with_capacity(candidates.len());
    let mut channels = Vec::new();
    for h in candidates {
        let fitness = count_and_fitness(&h, pop, f)?.mean_fitness;
        let adjusted = &fitness
            * (Rational::one() - &cfg.p_c * h.fragility()? - &cfg.p_m * from_usize(h.order()));
        let p = masses.mass(&h);
        for cut in 0..len - 1 {
            let p_left = masses.mass(&h.left(cut)?);
            let p_right = masses.mass(&h.right(cut)?);
            if &p_left * &p_right < p {
                channels.push(DeceptiveChannel { schema: h.clone(), cut, p_left, p_right, p_schema: p.clone() });
            }
        }
        scored.push((h, fitness, adjusted));
    }
    let optima = |pick: fn(&(GaSchema, Rational, Rational)) -> &Rational| -> Vec<GaSchema> {
        let best = scored.iter().map(pick).max().cloned().unwrap_or_default();
        scored.iter().filter(|e| pick(e) == &best).map(|e| e.0.clone()).collect()
    };
    let fitness_optima = optima(|e| &e.1);
    let adjusted_optima = optima(|e| &e.2);
    let deceptive = !fitness_optima.iter().any(|h| adjusted_optima.contains(h));
    Ok(DeceptionReport { fitness_optima, adjusted_optima, deceptive, channels })
}

/// The law of `m(H,t+1) ~ Binomial(n, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDistribution {
    pub n: usize,
    pub alpha: Rational,
    /// `pmf[k] = C(n,k) α^k (1−α)^(n−k)`
    pub pmf: Vec<Rational>,
}

impl CountDistribution {
    /// `Pr(m ≥ x)`.
    pub fn tail(&self, x: usize) -> Rational {
        self.pmf.iter().skip(x).sum()
    }

    pub fn mean(&self) -> Rational {
        from_usize(self.n) * &self.alpha
    }

    pub fn variance(&self) -> Rational {
        self.mean() * (Rational::one() - &self.alpha)
    }

    /// `√n · √(α / (1 − α))`; infinite when `α = 1`.
    pub fn signal_to_noise(&self) -> f64 {
        if self.alpha.is_one() {
            return f64::INFINITY;
        }
        let a = to_f64(&self.alpha);
        (self.n as f64).sqrt() * (a / (1.0 - a)).sqrt()
    }

    /// `(1 − α)^n`.
    pub fn extinction(&self) -> Rational {
        self.pmf[0].clone()
    }

    /// The `α > 4/n` survival heuristic.
    pub fn expected_to_survive(&self) -> bool {
        self.alpha > Rational::new(4.into(), self.n.into())
    }
}

pub fn next_count_distribution(alpha: &Rational, n: usize) -> Result<CountDistribution> {
    if !crate::rational::is_probability(alpha) {
        return Err(Error::Config(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let miss = Rational::one() - alpha;
    let hit_pows: Vec<Rational> = std::iter::successors(Some(Rational::one()), |p| Some(p * alpha)).take(n + 1).collect();
    let miss_pows: Vec<Rational> = std::iter::successors(Some(Rational::one()), |p| Some(p * &miss)).take(n + 1).collect();
    let mut coefficient = num_bigint::BigInt::one();
    let mut pmf = Vec::with_capacity(n + 1);
    for k in 0..=n {
        pmf.push(Rational::from_integer(coefficient.clone()) * &hit_pows[k] * &miss_pows[n - k]);
        coefficient = coefficient * (n - k) / (k + 1);
    }
    Ok(CountDistribution { n, alpha: alpha.clone(), pmf })
}

/// Probability that a schema with `initial` instances in a population of
/// `n` has gone extinct within `generations` steps when every step draws
/// `m' ~ Binomial(n, m/n)` (neutral selection, no disruption or creation).
pub fn neutral_extinction_probability(n: usize, initial: usize, generations: usize) -> f64 {
    let mut dist = vec![0.0; n + 1];
    dist[initial.min(n)] = 1.0;
    for _ in 0..generations {
        let mut next = vec![0.0; n + 1];
        for (m, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (k, p) in binomial_pmf_f64(n, m as f64 / n as f64).into_iter().enumerate() {
                next[k] += mass * p;
            }
        }
        dist = next;
    }
    dist[0]
}

fn binomial_pmf_f64(n: usize, p: f64) -> Vec<f64> {
    if p <= 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if p >= 1.0 {
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        return v;
    }
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let mut ln_choose = 0.0f64;
    (0..=n)
        .map(|k| {
            if k > 0 {
                ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            (ln_choose + k as f64 * ln_p + (n - k) as f64 * ln_q).exp()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebychevBounds {
    /// `nα − k√(nα(1−α))`
    pub lower: f64,
    /// `nα + k√(nα(1−α))`
    pub upper: f64,
    /// Same value as `lower`; `m(H,t+1)` exceeds it with at least `confidence`.
    pub one_sided_lower: f64,
    /// `1 − 1/k²`
    pub confidence: f64,
}

impl ChebychevBounds {
    pub fn covers(&self, count: f64) -> bool {
        self.lower <= count && count <= self.upper
    }
}

pub fn chebychev_bounds(alpha: f64, n: usize, k: f64) -> Result<ChebychevBounds> {
    if k <= 0.0 || !k.is_finite() {
        return Err(Error::Config(format!("k must be positive, got {k}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let mean = n as f64 * alpha;
    let spread = k * (mean * (1.0 - alpha)).sqrt();
    Ok(ChebychevBounds {
        lower: mean - spread,
        upper: mean + spread,
        one_sided_lower: mean - spread,
        confidence: 1.0 - 1.0 / (k * k),
    })
}

/// The smallest α for which the one-sided Chebychev bound guarantees more
/// than `x` instances:
/// `[n(k² + 2x) + k√(n²k² + 4nx(n − x))] / [2n(k² + n)]`.
pub fn alpha_tilde(k: f64, x: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    if k < 0.0 || !(0.0..=nf).contains(&x) || n == 0 {
        return Err(Error::Config(format!("alpha_tilde needs k ≥ 0 and 0 ≤ x ≤ n, got k = {k}, x = {x}, n = {n}")));
    }
    let k2 = k * k;
    let root = (nf * nf * k2 + 4.0 * nf * x * (nf - x)).sqrt();
    Ok((nf * (k2 + 2.0 * x) + k * root) / (2.0 * nf * (k2 + nf)))
}

/// Whether an α at or above `α̃(k, x, n)` has been reached.
pub fn conditional_event_holds(alpha: f64, k: f64, x: f64, n: usize) -> Result<bool> {
    Ok(alpha >= alpha_tilde(k, x, n)?)
}

/// `(1 − 1/k²)(Pr_L + Pr_R − 1)`, clamped to `[0, 1]`.
pub fn recursive_conditional_bound(prob_left: f64, prob_right: f64, k: f64) -> Result<f64> {
    if k <= 0.0 {
        return Err(Error::Config(format!("k must be positive, got {k}")));
    }
    for p in [prob_left, prob_right] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("probabilities must lie in [0, 1], got {p}")));
        }
    }
    Ok(((1.0 - 1.0 / (k * k)) * (prob_left + prob_right - 1.0)).clamp(0.0, 1.0))
}

/// Constants of the event `μ_i` for one channel with fixed fitness values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEvent {
    pub m_left: f64,
    pub m_right: f64,
    pub m_schema: f64,
    pub k: f64,
    pub n: usize,
    pub len: usize,
    pub mean_fitness: f64,
    pub left_fitness: f64,
    pub right_fitness: f64,
}

impl ChannelEvent {
    /// `M_L M_R > α̃(k, M_H, n) (len − 1) n² f̄² / (f(L) f(R))`.
    pub fn mu_holds(&self) -> Result<bool> {
        let n = self.n as f64;
        let threshold = alpha_tilde(self.k, self.m_schema, self.n)? * (self.len as f64 - 1.0) * n * n
            * self.mean_fitness
            * self.mean_fitness
            / (self.left_fitness * self.right_fitness);
        Ok(self.m_left * self.m_right > threshold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::BitString;
    use crate::rational::{int, ratio};

    fn h(s: &str) -> GaSchema {
        s.parse().unwrap()
    }

    fn cfg(n: usize, p_c: Rational, p_m: Rational) -> GaConfig {
        GaConfig::new(n, p_c, p_m, 0)
    }

    #[test]
    fn selection_probability_examples() {
        let pop = Population::parse(&["00", "11"]).unwrap();
        let f = FitnessFunction::one_max();
        assert_eq!(selection_probability(&h("1*"), &pop, &f).unwrap(), ratio(3, 4));
        assert_eq!(selection_probability(&h("**"), &pop, &f).unwrap(), int(1));
        assert_eq!(selection_probability(&h("10"), &pop, &f).unwrap(), int(0));
    }

    #[test]
    fn holland_bound_reductions() {
        let pop = Population::parse(&["001", "011", "111", "101"]).unwrap();
        let f = FitnessFunction::one_max();
        let schema = h("1*1");
        let c = count_and_fitness(&schema, &pop, &f).unwrap();
        let expected = &c.mean_fitness / pop.mean_fitness(&f).unwrap() * from_usize(c.instances);
        assert_eq!(holland_bound(&schema, &pop, &f, &cfg(4, int(0), int(0))).unwrap(), expected);
        let flat = FitnessFunction::flat();
        assert_eq!(holland_bound(&schema, &pop, &flat, &cfg(4, int(0), int(0))).unwrap(), int(2));
        // Maximal fragility under certain crossover.
        assert_eq!(holland_bound(&schema, &pop, &flat, &cfg(4, int(1), int(0))).unwrap(), int(0));
    }

    #[test]
    fn exact_alpha_reductions() {
        let pop = Population::parse(&["0011", "0110", "1111"]).unwrap();
        let f = FitnessFunction::one_max();
        let schema = h("0**1");
        let p = selection_probability(&schema, &pop, &f).unwrap();
        assert_eq!(exact_alpha(&schema, &pop, &f, &cfg(3, int(0), int(0))).unwrap().alpha, p);
        let all = exact_alpha(&h("****"), &pop, &f, &cfg(3, ratio(1, 2), int(0))).unwrap();
        assert_eq!(all.alpha, int(1));
        assert_eq!(all.expected_count, int(3));
        assert_eq!(all.variance, int(0));
    }

    #[test]
    fn len_divisor_variant_adds_a_noop_cut() {
        let pop = Population::parse(&["0011", "0110", "1111"]).unwrap();
        let f = FitnessFunction::one_max();
        let schema = h("0**1");
        let c = cfg(3, int(1), int(0));
        let ours = exact_alpha(&schema, &pop, &f, &c).unwrap().alpha;
        let theirs = alpha_len_divisor_variant(&schema, &pop, &f, &int(1)).unwrap();
        let p = selection_probability(&schema, &pop, &f).unwrap();
        // len·theirs = (len−1)·ours + p
        assert_eq!(int(4) * theirs, int(3) * ours + p);
    }

    #[test]
    fn adjusted_and_effective_examples() {
        let pop = Population::parse(&["0011", "0110", "1111", "1001"]).unwrap();
        let f = FitnessFunction::one_max();
        let schema = h("0*1*");
        let none = adjusted_and_effective_fitness(&schema, &pop, &f, &cfg(4, int(0), int(0))).unwrap();
        let fitness = count_and_fitness(&schema, &pop, &f).unwrap().mean_fitness;
        assert_eq!(none.adjusted, fitness);
        assert_eq!(none.effective, Some(fitness.clone()));
        let wide = h("1**1");
        let full = adjusted_and_effective_fitness(&wide, &pop, &f, &cfg(4, int(1), int(0))).unwrap();
        assert_eq!(full.adjusted, int(0));
        let c = cfg(4, ratio(2, 3), int(0));
        let both = adjusted_and_effective_fitness(&wide, &pop, &f, &c).unwrap();
        assert_eq!(both.effective, both.effective_from_cuts);
        let absent = adjusted_and_effective_fitness(&h("000*"), &pop, &f, &c).unwrap();
        assert_eq!(absent.effective, None);
    }

    #[test]
    fn flat_landscape_is_not_deceptive() {
        let pop = Population::new(BitString::enumerate(3).collect()).unwrap();
        let c = cfg(8, ratio(1, 2), ratio(1, 10));
        for scope in [DeceptionScope::Strings, DeceptionScope::Schemata { max_order: 3 }] {
            let report = deception_report(&pop, &FitnessFunction::flat(), &c, scope).unwrap();
            assert!(!report.deceptive);
            assert!(report.channels.is_empty());
        }
    }

    #[test]
    fn trap_is_deceptive_for_heavy_crossover() {
        let pop = Population::new(BitString::enumerate(3).collect()).unwrap();
        let c = cfg(8, ratio(3, 4), int(0));
        let report = deception_report(&pop, &FitnessFunction::trap(3), &c, DeceptionScope::Schemata { max_order: 3 }).unwrap();
        assert_eq!(report.fitness_optima, vec![h("111")]);
        assert!(report.deceptive);
        assert_eq!(report.adjusted_optima.len(), 6);
        assert!(report.adjusted_optima.iter().all(|s| s.order() == 1));
        let mild = cfg(8, ratio(1, 10), int(0));
        let report = deception_report(&pop, &FitnessFunction::trap(3), &mild, DeceptionScope::Schemata { max_order: 3 }).unwrap();
        assert!(!report.deceptive);
    }

    #[test]
    fn one_max_optimum_agrees() {
        let pop = Population::new(BitString::enumerate(3).collect()).unwrap();
        for p_c in [int(0), ratio(1, 4), ratio(1, 2), ratio(99, 100)] {
            let c = cfg(8, p_c.clone(), int(0));
            let report = deception_report(&pop, &FitnessFunction::one_max(), &c, DeceptionScope::Strings).unwrap();
            assert_eq!(report.fitness_optima, vec![h("111")]);
            assert_eq!(report.adjusted_optima, vec![h("111")]);
            assert!(!report.deceptive);
            // Short order-2 schemata overtake the optimum once p_c is large.
            if p_c.is_zero() {
                let report = deception_report(&pop, &FitnessFunction::one_max(), &c, DeceptionScope::Schemata { max_order: 3 }).unwrap();
                assert_eq!(report.adjusted_optima, vec![h("111")]);
            }
        }
    }

    #[test]
    fn binomial_law_examples() {
        let d = next_count_distribution(&ratio(1, 3), 5).unwrap();
        assert_eq!(d.pmf.iter().sum::<Rational>(), int(1));
        assert_eq!(d.tail(0), int(1));
        assert_eq!(d.mean(), ratio(5, 3));
        let half = next_count_distribution(&ratio(1, 2), 100).unwrap();
        assert!((half.signal_to_noise() - 10.0).abs() < 1e-12);
        let fresh = next_count_distribution(&ratio(1, 100), 100).unwrap();
        let ext = to_f64(&fresh.extinction());
        assert!((ext - 0.99f64.powi(100)).abs() < 1e-12);
        assert!((ext - 0.37).abs() < 0.02);
        assert!(!fresh.expected_to_survive());
        assert_eq!(next_count_distribution(&int(1), 4).unwrap().signal_to_noise(), f64::INFINITY);
        assert!(next_count_distribution(&ratio(3, 2), 4).is_err());
    }

    #[test]
    fn neutral_extinction() {
        assert!((neutral_extinction_probability(100, 1, 1) - 0.99f64.powi(100)).abs() < 1e-12);
        let two = neutral_extinction_probability(100, 1, 2);
        assert!(two > 0.5 && two < 0.56, "{two}");
    }

    #[test]
    fn chebychev_examples() {
        let b = chebychev_bounds(0.3, 50, 2.0).unwrap();
        assert_eq!(b.confidence, 0.75);
        for alpha in [0.0, 1.0] {
            let b = chebychev_bounds(alpha, 50, 2.0).unwrap();
            assert_eq!(b.lower, b.upper);
        }
        assert!(chebychev_bounds(0.3, 50, 0.0).is_err());
    }

    #[test]
    fn alpha_tilde_examples() {
        for n in [4usize, 10, 100] {
            for x in 0..=n {
                assert_eq!(alpha_tilde(0.0, x as f64, n).unwrap(), x as f64 / n as f64);
            }
        }
        assert_eq!(alpha_tilde(0.0, 10.0, 10).unwrap(), 1.0);
        assert!(alpha_tilde(1.0, 11.0, 10).is_err());
    }

    #[test]
    fn recursive_bound_examples() {
        assert!((recursive_conditional_bound(1.0, 1.0, 1e6).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(recursive_conditional_bound(0.4, 0.5, 2.0).unwrap(), 0.0);
        assert!((recursive_conditional_bound(0.9, 0.9, 2.0).unwrap() - 0.6).abs() < 1e-12);
        let event = ChannelEvent {
            m_left: 8.0,
            m_right: 8.0,
            m_schema: 0.0,
            k: 1.5,
            n: 20,
            len: 2,
            mean_fitness: 1.0,
            left_fitness: 1.0,
            right_fitness: 1.0,
        };
        assert!(event.mu_holds().unwrap());
        assert!(!ChannelEvent { m_left: 2.0, ..event }.mu_holds().unwrap());
    }
}
