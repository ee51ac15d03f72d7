//! Disassembly sequence planning with a many-objective genetic algorithm.
//!
//! Products are described by relation matrices between parts (interference,
//! constraint, contact) plus per-part extraction motions. A sequence is a
//! permutation of the active parts; storage position 1 is the part removed
//! last. [`nsga3::run`] searches for sequences that satisfy the order,
//! motion and connection constraints while minimizing four objectives.

pub mod bench;
pub mod ccg;
pub mod cli;
pub mod constraints;
pub mod geomsim;
pub mod model;
pub mod nsga3;
pub mod objectives;
