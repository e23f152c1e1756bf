//! Generational genetic algorithm over fixed-length bitstrings.
//!
//! Offspring are produced independently: each one either clones a selected
//! parent (probability `1 - p_c`) or is the first child of a one-point
//! crossover between two selected parents at a uniformly chosen cut, and is
//! then mutated. Cuts sit after index `k` for `k` in `0..=len-2`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{from_usize, is_probability, to_f64, Rational};
use crate::rng::{substream, StreamRng};
use crate::selection::{Selection, Selector};

/// A fixed-length binary genotype. Position 0 is the leftmost character.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Config("bitstrings must have length at least 1".into()));
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![false; len])
    }

    /// The string whose big-endian value (position 0 most significant) is `value`.
    pub fn from_index(value: u64, len: usize) -> Result<Self> {
        Self::new((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect())
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..len).map(|_| rng.gen::<bool>()).collect())
    }

    /// Every string of the given length, in increasing big-endian order.
    pub fn enumerate(len: usize) -> impl Iterator<Item = BitString> {
        (0..1u64 << len).map(move |v| BitString::from_index(v, len).expect("len >= 1"))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn index(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn flipped(&self, i: usize) -> BitString {
        let mut bits = self.0.clone();
        bits[i] = !bits[i];
        BitString(bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid allele `{other}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

/// Built-in fitness catalog. Every entry is strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FitnessFunction {
    /// Number of ones plus `offset`.
    OneMax { offset: Rational },
    /// Concatenated deceptive traps of `block` bits: a block with `u` ones
    /// scores `block` when `u == block` and `block - 1 - u` otherwise;
    /// the block scores are summed and `offset` added.
    Trap { block: usize, offset: Rational },
    /// `block` for every all-ones block, plus `offset`.
    RoyalRoad { block: usize, offset: Rational },
    /// Constant `value`.
    Flat { value: Rational },
    /// Explicit table indexed by [`BitString::index`]; declares length
    /// `log2(values.len())`.
    Table { values: Vec<Rational> },
}

impl FitnessFunction {
    pub fn one_max() -> Self {
        Self::OneMax { offset: Rational::one() }
    }

    pub fn trap(block: usize) -> Self {
        Self::Trap { block, offset: Rational::one() }
    }

    pub fn royal_road(block: usize) -> Self {
        Self::RoyalRoad { block, offset: Rational::one() }
    }

    pub fn flat() -> Self {
        Self::Flat { value: Rational::one() }
    }

    pub fn table(values: Vec<Rational>) -> Result<Self> {
        if values.len() < 2 || !values.len().is_power_of_two() {
            return Err(Error::Config(format!(
                "fitness table needs 2^len entries, got {}",
                values.len()
            )));
        }
        Ok(Self::Table { values })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::OneMax { .. } => "one-max",
            Self::Trap { .. } => "binary-trap",
            Self::RoyalRoad { .. } => "royal-road",
            Self::Flat { .. } => "flat",
            Self::Table { .. } => "user-table",
        }
    }

    pub fn declared_length(&self) -> Option<usize> {
        match self {
            Self::Table { values } => Some(values.len().trailing_zeros() as usize),
            _ => None,
        }
    }

    /// Checks that strings of length `len` are valid inputs.
    pub fn check_length(&self, len: usize) -> Result<()> {
        if let Some(expected) = self.declared_length() {
            if expected != len {
                return Err(Error::LengthMismatch { expected, found: len });
            }
        }
        if let Self::Trap { block, .. } | Self::RoyalRoad { block, .. } = self {
            if *block == 0 || !len.is_multiple_of(*block) {
                return Err(Error::Config(format!(
                    "{} block size {block} does not divide string length {len}",
                    self.name()
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, s: &BitString) -> Result<Rational> {
        self.check_length(s.len())?;
        let value = match self {
            Self::OneMax { offset } => from_usize(s.count_ones()) + offset,
            Self::Trap { block, offset } => {
                let score: usize = s
                    .bits()
                    .chunks(*block)
                    .map(|chunk| {
                        let ones = chunk.iter().filter(|&&b| b).count();
                        if ones == *block {
                            *block
                        } else {
                            block - 1 - ones
                        }
                    })
                    .sum();
                from_usize(score) + offset
            }
            Self::RoyalRoad { block, offset } => {
                let full = s.bits().chunks(*block).filter(|c| c.iter().all(|&b| b)).count();
                from_usize(full * block) + offset
            }
            Self::Flat { value } => value.clone(),
            Self::Table { values } => values[s.index() as usize].clone(),
        };
        if !value.is_positive() {
            return Err(Error::NonPositiveFitness(value.to_string()));
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationMode {
    /// Each allele flips independently with probability `p_m`.
    #[default]
    PerBit,
    /// With probability `p_m`, exactly one uniformly chosen allele flips.
    SingleBit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaConfig {
    pub n: usize,
    pub p_c: Rational,
    pub p_m: Rational,
    pub mutation: MutationMode,
    pub selection: Selection,
    pub seed: u64,
}

impl GaConfig {
    /// Proportional selection, per-bit mutation.
    pub fn new(n: usize, p_c: Rational, p_m: Rational, seed: u64) -> Self {
        Self {
            n,
            p_c,
            p_m,
            mutation: MutationMode::PerBit,
            selection: Selection::Proportional,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("population size must be at least 2, got {}", self.n)));
        }
        for (name, p) in [("p_c", &self.p_c), ("p_m", &self.p_m)] {
            if !is_probability(p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        self.selection.validate(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    members: Vec<BitString>,
    generation: u64,
}

impl Population {
    pub fn new(members: Vec<BitString>) -> Result<Self> {
        Self::at_generation(members, 0)
    }

    pub fn at_generation(members: Vec<BitString>, generation: u64) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Config("population must not be empty".into()))?;
        let len = first.len();
        if let Some(bad) = members.iter().find(|m| m.len() != len) {
            return Err(Error::LengthMismatch { expected: len, found: bad.len() });
        }
        Ok(Self { members, generation })
    }

    pub fn parse(strings: &[&str]) -> Result<Self> {
        Self::new(strings.iter().map(|s| s.parse()).collect::<Result<_>>()?)
    }

    pub fn random(n: usize, len: usize, seed: u64) -> Result<Self> {
        let mut rng = substream(seed, &[u64::MAX]);
        Self::new((0..n).map(|_| BitString::random(len, &mut rng)).collect::<Result<_>>()?)
    }

    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn string_len(&self) -> usize {
        self.members[0].len()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn fitness_values(&self, f: &FitnessFunction) -> Result<Vec<Rational>> {
        self.members.iter().map(|m| f.evaluate(m)).collect()
    }

    /// Population mean fitness `f̄(t)`.
    pub fn mean_fitness(&self, f: &FitnessFunction) -> Result<Rational> {
        let total: Rational = self.fitness_values(f)?.into_iter().sum();
        Ok(total / from_usize(self.size()))
    }
}

/// Draws one parent.
pub fn select_parent<'a, R: Rng + ?Sized>(
    pop: &'a Population,
    f: &FitnessFunction,
    cfg: &GaConfig,
    rng: &mut R,
) -> Result<&'a BitString> {
    let selector = Selector::new(&pop.fitness_values(f)?, &cfg.selection)?;
    Ok(&pop.members[selector.pick(rng)])
}

/// Splits both parents after index `cut` and swaps the tails.
pub fn one_point_crossover(a: &BitString, b: &BitString, cut: usize) -> Result<(BitString, BitString)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), found: b.len() });
    }
    let len = a.len();
    if len < 2 || cut > len - 2 {
        return Err(Error::IndexOutOfRange {
            index: cut,
            valid: if len < 2 { "none".into() } else { format!("0..={}", len - 2) },
        });
    }
    let splice = |head: &BitString, tail: &BitString| {
        let mut bits = head.0[..=cut].to_vec();
        bits.extend_from_slice(&tail.0[cut + 1..]);
        BitString(bits)
    };
    Ok((splice(a, b), splice(b, a)))
}

pub fn mutate<R: Rng + ?Sized>(s: &BitString, cfg: &GaConfig, rng: &mut R) -> BitString {
    mutate_with(s, to_f64(&cfg.p_m), cfg.mutation, rng)
}

fn mutate_with<R: Rng + ?Sized>(s: &BitString, p_m: f64, mode: MutationMode, rng: &mut R) -> BitString {
    if p_m <= 0.0 {
        return s.clone();
    }
    match mode {
        MutationMode::PerBit => BitString(s.0.iter().map(|&b| b ^ (rng.gen::<f64>() < p_m)).collect()),
        MutationMode::SingleBit => {
            if rng.gen::<f64>() < p_m {
                s.flipped(rng.gen_range(0..s.len()))
            } else {
                s.clone()
            }
        }
    }
}

/// Validates the (population, fitness, config) triple before stepping.
pub fn check_setup(pop: &Population, f: &FitnessFunction, cfg: &GaConfig) -> Result<()> {
    cfg.validate()?;
    f.check_length(pop.string_len())?;
    if pop.size() != cfg.n {
        return Err(Error::Config(format!(
            "population has {} members but n = {}",
            pop.size(),
            cfg.n
        )));
    }
    if pop.string_len() < 2 && !cfg.p_c.is_zero() {
        return Err(Error::Config("crossover needs strings of length at least 2".into()));
    }
    Ok(())
}

/// Per-generation sampler: selection weights computed once, offspring drawn
/// on demand from caller-provided streams.
#[derive(Debug, Clone)]
pub struct Breeder<'a> {
    pop: &'a Population,
    selector: Selector,
    p_c: f64,
    p_m: f64,
    mutation: MutationMode,
}

impl<'a> Breeder<'a> {
    pub fn new(pop: &'a Population, f: &FitnessFunction, cfg: &GaConfig) -> Result<Self> {
        check_setup(pop, f, cfg)?;
        Ok(Self {
            pop,
            selector: Selector::new(&pop.fitness_values(f)?, &cfg.selection)?,
            p_c: to_f64(&cfg.p_c),
            p_m: to_f64(&cfg.p_m),
            mutation: cfg.mutation,
        })
    }

    pub fn offspring<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let members = &self.pop.members;
        let first = &members[self.selector.pick(rng)];
        let child = if rng.gen::<f64>() < self.p_c {
            let second = &members[self.selector.pick(rng)];
            let cut = rng.gen_range(0..first.len() - 1);
            one_point_crossover(first, second, cut).expect("validated lengths").0
        } else {
            first.clone()
        };
        mutate_with(&child, self.p_m, self.mutation, rng)
    }

    /// Offspring `index` of this generation under master seed `seed`.
    pub fn offspring_for(&self, seed: u64, index: usize) -> BitString {
        let mut rng: StreamRng = substream(seed, &[self.pop.generation, index as u64]);
        self.offspring(&mut rng)
    }

    pub fn next_generation(&self, seed: u64) -> Population {
        let members = (0..self.pop.size()).map(|i| self.offspring_for(seed, i)).collect();
        Population { members, generation: self.pop.generation + 1 }
    }
}

/// One generational step; a pure function of `(pop, f, cfg)` including `cfg.seed`.
pub fn next_generation(pop: &Population, f: &FitnessFunction, cfg: &GaConfig) -> Result<Population> {
    Ok(Breeder::new(pop, f, cfg)?.next_generation(cfg.seed))
}
