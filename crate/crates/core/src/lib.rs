//! Folding, immersions and subgroup presentations for one-relator groups
//! with torsion.

pub mod cli;
pub mod complex;
pub mod covers;
pub mod fold;
pub mod format;
pub mod harness;
pub mod orbi;
pub mod pipeline;
pub mod stacking;
pub mod words;

/// Stacking with exact rational heights.
pub type RationalStacking = stacking::Stacking<num_rational::Rational64>;
/// Stacking with floating-point heights; only their order matters.
pub type F64Stacking = stacking::Stacking<f64>;
