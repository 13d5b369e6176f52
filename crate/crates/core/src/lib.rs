//! A proof checker for a higher-order natural-deduction logic whose proofs
//! may carry their own lemmas and definitions.

pub mod kernel;
pub mod cli;
pub mod library;
pub mod syntax;
pub mod term;
pub mod transform;
