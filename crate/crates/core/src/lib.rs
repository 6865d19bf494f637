//! Sum-of-squares programming on top of a first-order conic solver.

pub mod poly;
pub mod conic;
pub mod compile;
pub mod chordal;
pub mod refine;
pub mod lifts;
