//! Exact maximum independent set for graphs of maximum degree three.
//!
//! The solver alternates an exhaustive reduction pass with a fixed table of
//! branching rules and can audit every branching against the measure drop
//! the rule is supposed to guarantee.

pub mod audit;
pub mod dimacs;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod patterns;
pub mod reducer;
pub mod rules;
pub mod solver;
pub mod structure;
