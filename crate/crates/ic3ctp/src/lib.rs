//! IC3/PDR safety model checking for AIGER circuits, with lemma prediction
//! driven by counterexamples to propagation.

pub mod aiger;
pub mod certify;
pub mod engine;
pub mod frames;
pub mod logic;
pub mod prediction;
pub mod report;
pub mod sat;
pub mod transys;
