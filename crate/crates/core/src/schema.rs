//! Fixed-length schemata over `{0, 1, *}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ga::{BitString, FitnessFunction, Population};
use crate::rational::{from_usize, Rational};

/// Census tables larger than this are refused.
pub const CENSUS_CAP: usize = 1 << 22;

/// A schema; `None` marks a don't-care position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaSchema(Vec<Option<bool>>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `L(H, i)`: keeps positions `0..=i`.
    Left,
    /// `R(H, i)`: keeps positions `i+1..len`.
    Right,
}

impl GaSchema {
    pub fn new(symbols: Vec<Option<bool>>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Config("schemata must have length at least 1".into()));
        }
        Ok(Self(symbols))
    }

    pub fn all_wildcards(len: usize) -> Result<Self> {
        Self::new(vec![None; len])
    }

    /// The order-`len` schema matched only by `s`.
    pub fn from_string(s: &BitString) -> Self {
        Self(s.bits().iter().map(|&b| Some(b)).collect())
    }

    /// All `3^len` schemata of the given length.
    pub fn enumerate(len: usize) -> impl Iterator<Item = GaSchema> {
        let total = 3usize.pow(len as u32);
        (0..total).map(move |mut code| {
            let symbols = (0..len)
                .map(|_| {
                    let digit = code % 3;
                    code /= 3;
                    [None, Some(false), Some(true)][digit]
                })
                .collect();
            GaSchema(symbols)
        })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Option<bool>] {
        &self.0
    }

    pub fn fixed_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, s)| s.is_some()).map(|(i, _)| i)
    }

    pub fn order(&self) -> usize {
        self.fixed_positions().count()
    }

    /// Distance between the first and last fixed positions; 0 for order ≤ 1.
    pub fn defining_length(&self) -> usize {
        let first = self.fixed_positions().next();
        let last = self.fixed_positions().last();
        match (first, last) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    /// `d(H) / (len - 1)`.
    pub fn fragility(&self) -> Result<Rational> {
        if self.len() < 2 {
            return Err(Error::UndefinedFragility);
        }
        Ok(Rational::new(self.defining_length().into(), (self.len() - 1).into()))
    }

    pub fn matches(&self, s: &BitString) -> Result<bool> {
        if s.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: s.len() });
        }
        Ok(self.matches_unchecked(s))
    }

    pub(crate) fn matches_unchecked(&self, s: &BitString) -> bool {
        self.0.iter().zip(s.bits()).all(|(h, &b)| h.is_none_or(|v| v == b))
    }

    pub fn truncate(&self, i: usize, side: Side) -> Result<GaSchema> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, valid: format!("0..={}", self.len() - 1) });
        }
        let keep = |pos: usize| match side {
            Side::Left => pos <= i,
            Side::Right => pos > i,
        };
        Ok(GaSchema(
            self.0.iter().enumerate().map(|(pos, &s)| if keep(pos) { s } else { None }).collect(),
        ))
    }

    pub fn left(&self, i: usize) -> Result<GaSchema> {
        self.truncate(i, Side::Left)
    }

    pub fn right(&self, i: usize) -> Result<GaSchema> {
        self.truncate(i, Side::Right)
    }

    /// Same fixed positions, with the fixed values replaced by `values`.
    pub(crate) fn with_fixed_values(&self, values: &[bool]) -> GaSchema {
        let mut next = values.iter();
        GaSchema(self.0.iter().map(|s| s.map(|_| *next.next().expect("one value per fixed position"))).collect())
    }
}

impl fmt::Display for GaSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                None => "*",
                Some(false) => "0",
                Some(true) => "1",
            })?;
        }
        Ok(())
    }
}

impl FromStr for GaSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .map(|c| match c {
                '*' => Ok(None),
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                other => Err(Error::Parse(format!("invalid schema symbol `{other}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols)
    }
}

/// `(order, defining length, fragility)`.
pub fn schema_metrics(h: &GaSchema) -> Result<(usize, usize, Rational)> {
    Ok((h.order(), h.defining_length(), h.fragility()?))
}

/// `m(H,t)` and `f(H,t)`; the mean is 0 when there are no instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaCount {
    pub instances: usize,
    pub mean_fitness: Rational,
}

pub fn count_and_fitness(h: &GaSchema, pop: &Population, f: &FitnessFunction) -> Result<SchemaCount> {
    let mut instances = 0;
    let mut total = Rational::zero();
    for member in pop.members() {
        if h.matches(member)? {
            instances += 1;
            total += f.evaluate(member)?;
        }
    }
    let mean_fitness = if instances == 0 { Rational::zero() } else { total / from_usize(instances) };
    Ok(SchemaCount { instances, mean_fitness })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub schema: GaSchema,
    pub instances: usize,
    pub mean_fitness: Rational,
}

/// Number of schemata of order at most `max_order` over strings of length `len`.
pub fn census_table_bound(len: usize, max_order: usize) -> BigUint {
    (0..=max_order.min(len))
        .map(|o| binomial(len, o) << o)
        .sum()
}

/// Every schema of order ≤ `max_order` with at least one instance, sorted
/// by its text form.
pub fn schema_census(pop: &Population, f: &FitnessFunction, max_order: usize) -> Result<Vec<CensusRow>> {
    let len = pop.string_len();
    let bound = census_table_bound(len, max_order);
    if bound > BigUint::from(CENSUS_CAP) {
        return Err(Error::CapExceeded(format!(
            "census of order ≤ {max_order} over length {len} may need {bound} entries (cap {CENSUS_CAP}); lower max_order"
        )));
    }
    let mut table: BTreeMap<GaSchema, (usize, Rational)> = BTreeMap::new();
    for member in pop.members() {
        let fitness = f.evaluate(member)?;
        for positions in subsets_up_to(len, max_order) {
            let mut symbols = vec![None; len];
            for &p in &positions {
                symbols[p] = Some(member.get(p));
            }
            let entry = table.entry(GaSchema(symbols)).or_insert_with(|| (0, Rational::zero()));
            entry.0 += 1;
            entry.1 += &fitness;
        }
    }
    Ok(table
        .into_iter()
        .map(|(schema, (instances, total))| CensusRow {
            schema,
            instances,
            mean_fitness: total / from_usize(instances),
        })
        .collect())
}

fn subsets_up_to(len: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for pos in 0..len {
        let extended: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.len() < max_size)
            .map(|s| {
                let mut t = s.clone();
                t.push(pos);
                t
            })
            .collect();
        out.extend(extended);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicitParallelism {
    /// Highest order sampled at least `φ` times: `floor(log2(n / φ))`.
    pub theta: u32,
    /// `2^θ · C(len, θ)`.
    pub schema_count: BigUint,
    /// `schema_count ≥ n³`.
    pub holds: bool,
    /// Whether `(n, len)` lies in the regime `64 ≤ n ≤ 2^20`, `len ≥ 64`.
    pub in_guarantee_regime: bool,
}

pub fn implicit_parallelism(n: u64, len: usize, phi: u64) -> Result<ImplicitParallelism> {
    if phi == 0 || phi >= n {
        return Err(Error::Config(format!("φ must satisfy 0 < φ < n, got φ = {phi}, n = {n}")));
    }
    let mut theta = 0u32;
    while phi.checked_mul(1 << (theta + 1)).is_some_and(|v| v <= n) {
        theta += 1;
    }
    let schema_count = binomial(len, theta as usize) << theta;
    let cube = BigUint::from(n).pow(3);
    Ok(ImplicitParallelism {
        theta,
        holds: schema_count >= cube,
        schema_count,
        in_guarantee_regime: (64..=1 << 20).contains(&n) && len >= 64,
    })
}
