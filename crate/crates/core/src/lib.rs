//! Energy-constrained mobile agents: packet delivery, convergecast and
//! broadcast on lines, trees and general graphs.

mod dyadic;
pub mod error;
pub mod generators;
pub mod hardness;
pub mod line;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod tree;

pub use error::{ModelError, SolveError};
pub use model::*;
pub use rational::{ParseRationalError, Rational};
