//! Schema-theorem toolkit for bit-string genetic algorithms and tree-based
//! genetic programming.
//!
//! The crate pairs a reference engine for each representation with the
//! predictions made about it: Holland's bound, exact transmission
//! probabilities, the binomial law of schema counts, probabilistic
//! (Chebychev) bounds, and the GP microscopic and macroscopic schema
//! theorems. An exhaustive [`oracle`] checks those predictions on small
//! instances, and [`harness`] turns them into reproducible experiments.

pub mod error;
pub mod ga;
pub mod ga_theorems;
pub mod gp;
pub mod gp_schema;
pub mod gp_theorems;
pub mod harness;
pub mod oracle;
pub mod rational;
pub mod rng;
pub mod schema;
pub mod selection;

pub use error::{Error, Result};
pub use rational::Rational;
