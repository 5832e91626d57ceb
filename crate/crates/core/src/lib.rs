//! Automatic tabulation of constraint model subexpressions.
//!
//! A model is parsed, instantiated against parameters into a flat model,
//! scanned for promising subexpressions, and those are replaced by
//! extensional table constraints. A small backtracking solver measures the
//! effect in search nodes.

pub mod ast;
pub mod table;
pub mod parser;
pub mod instantiate;
pub mod heuristics;
pub mod tabulate;
pub mod solver;
pub mod cli;
