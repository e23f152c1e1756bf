//! Parent selection shared by the GA and GP engines.

use num_traits::Signed;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{ratio, to_f64, Rational};

/// Parent selection scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Selection {
    /// Pick member `A` with probability `f(A) / Σ f`.
    Proportional,
    /// Draw `size` members uniformly with replacement and knock them out
    /// pairwise; each pair goes to the fitter member with probability `bias`.
    Tournament {
        size: usize,
        #[serde(with = "crate::rational::serde_text")]
        bias: Rational,
    },
}

impl Selection {
    pub fn validate(&self, n: usize) -> Result<()> {
        if let Selection::Tournament { size, bias } = self {
            if *size < 2 {
                return Err(Error::Config(format!("tournament size must be at least 2, got {size}")));
            }
            if *size > n {
                return Err(Error::TournamentTooLarge { size: *size, n });
            }
            if *bias < ratio(1, 2) || *bias > ratio(1, 1) {
                return Err(Error::Config(format!(
                    "tournament bias must lie in [1/2, 1], got {bias}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_proportional(&self) -> bool {
        matches!(self, Selection::Proportional)
    }
}

/// A selection operator frozen against one generation's fitness values.
#[derive(Debug, Clone)]
pub struct Selector {
    fitness: Vec<f64>,
    cumulative: Vec<f64>,
    mode: Mode,
}

#[derive(Debug, Clone)]
enum Mode {
    Proportional,
    Tournament { size: usize, bias: f64 },
}

impl Selector {
    pub fn new(fitness: &[Rational], selection: &Selection) -> Result<Self> {
        if fitness.is_empty() {
            return Err(Error::ZeroTotalFitness);
        }
        if let Some(bad) = fitness.iter().find(|v| !v.is_positive()) {
            return Err(Error::NonPositiveFitness(bad.to_string()));
        }
        selection.validate(fitness.len())?;
        let values: Vec<f64> = fitness.iter().map(to_f64).collect();
        let mut running = 0.0;
        let cumulative = values
            .iter()
            .map(|v| {
                running += v;
                running
            })
            .collect();
        let mode = match selection {
            Selection::Proportional => Mode::Proportional,
            Selection::Tournament { size, bias } => Mode::Tournament { size: *size, bias: to_f64(bias) },
        };
        Ok(Self { fitness: values, cumulative, mode })
    }

    pub fn len(&self) -> usize {
        self.fitness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitness.is_empty()
    }

    /// Index of the selected member.
    pub fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self.mode {
            Mode::Proportional => {
                let total = *self.cumulative.last().expect("non-empty");
                let target = rng.gen::<f64>() * total;
                self.cumulative
                    .partition_point(|&c| c <= target)
                    .min(self.fitness.len() - 1)
            }
            Mode::Tournament { size, bias } => {
                let n = self.fitness.len();
                let mut winner = rng.gen_range(0..n);
                for _ in 1..size {
                    let challenger = rng.gen_range(0..n);
                    let (fitter, weaker) = if self.fitness[challenger] > self.fitness[winner] {
                        (challenger, winner)
                    } else {
                        (winner, challenger)
                    };
                    winner = if rng.gen::<f64>() < bias { fitter } else { weaker };
                }
                winner
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::rng::substream;

    #[test]
    fn rejects_non_positive_fitness() {
        let err = Selector::new(&[int(1), int(0)], &Selection::Proportional).unwrap_err();
        assert!(matches!(err, Error::NonPositiveFitness(_)));
        assert!(matches!(
            Selector::new(&[], &Selection::Proportional).unwrap_err(),
            Error::ZeroTotalFitness
        ));
    }

    #[test]
    fn rejects_oversized_tournament() {
        let sel = Selection::Tournament { size: 3, bias: int(1) };
        assert!(matches!(
            Selector::new(&[int(1), int(2)], &sel).unwrap_err(),
            Error::TournamentTooLarge { size: 3, n: 2 }
        ));
    }

    #[test]
    fn proportional_frequencies_track_fitness() {
        let selector = Selector::new(&[int(1), int(3)], &Selection::Proportional).unwrap();
        let mut rng = substream(11, &[]);
        let draws = 100_000;
        let hits = (0..draws).filter(|_| selector.pick(&mut rng) == 1).count();
        let p = 0.75;
        let freq = hits as f64 / draws as f64;
        assert!((freq - p).abs() <= 4.0 * (p * (1.0 - p) / draws as f64).sqrt(), "{freq}");
    }
}
