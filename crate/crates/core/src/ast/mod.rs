//! Expression trees, variable domains and flat models.

mod domain;
mod expr;
pub mod interval;
mod model;
pub mod normal;
mod print;
pub mod simplify;

pub use domain::Domain;
pub use expr::{CmpOp, Expr, Term, VarName};
pub use model::{Assigned, DomainLookup, Model, Objective, Sense, Variable, WithVar};
pub use normal::{cache_key, canonicalize, normalize, CacheKey, Canonical};
pub use print::{prefix, TableNames};
pub use simplify::{is_total, simplify, simplify_constraint, simplify_int, simplify_map, simplify_with};

use std::collections::{HashMap, HashSet};

/// Variables of `e` in depth-first, left-first order, first occurrence kept.
pub fn scope(e: &Expr) -> Vec<VarName> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    e.visit_vars(&mut |v| {
        if seen.insert(v.clone()) {
            out.push(v.clone());
        }
    });
    out
}

/// Total number of AST nodes.
///
/// Every operator, constant and variable reference counts one. Sum
/// coefficients other than +1/-1 and a nonzero constant offset each count
/// as a constant node; every member of an `in` set counts as a constant.
/// The tuple list of a table and an all-constant element array each count
/// as one node.
pub fn count_nodes(e: &Expr) -> usize {
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Var(_) => 1,
        Expr::Sum(terms, offset) => {
            1 + terms
                .iter()
                .map(|t| count_nodes(&t.expr) + usize::from(t.coef.abs() != 1))
                .sum::<usize>()
                + usize::from(*offset != 0)
        }
        Expr::InSet(x, set) => 1 + count_nodes(x) + set.len(),
        Expr::Table(scope, _) => 2 + scope.iter().map(count_nodes).sum::<usize>(),
        Expr::Element(arr, idx) if arr.iter().all(|x| x.as_int().is_some()) => 2 + count_nodes(idx),
        _ => 1 + e.children().into_iter().map(count_nodes).sum::<usize>(),
    }
}

/// Occurrence count of every variable over the leaves of `e`.
pub fn count_occurrences(e: &Expr) -> HashMap<VarName, usize> {
    let mut counts = HashMap::new();
    e.visit_vars(&mut |v| *counts.entry(v.clone()).or_insert(0) += 1);
    counts
}
