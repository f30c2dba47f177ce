//! EWL quantum extensions of 2×2 bimatrix games with finite SU(2) strategy sets.

#![allow(clippy::needless_range_loop)]

pub mod angle;
pub mod classes;
pub mod cli;
pub mod cyclotomic;
pub mod equivalence;
pub mod error;
pub mod invariance;
pub mod nash;
pub mod payoff;
pub mod scalar;
pub mod solver;
pub mod su2;

pub use angle::Angle;
pub use error::{Error, Result};
pub use payoff::{Bimatrix2, PayoffPair};
pub use scalar::{Mode, Rational, Scalar};
pub use su2::StrategyParams;
