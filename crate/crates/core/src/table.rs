//! Extensional tuple lists.

use std::fmt::Write as _;

/// Lexicographically sorted, duplicate-free list of tuples of one arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    arity: usize,
    tuples: Vec<Vec<i64>>,
}

impl Table {
    pub fn new(arity: usize, mut tuples: Vec<Vec<i64>>) -> Self {
        debug_assert!(tuples.iter().all(|t| t.len() == arity));
        tuples.sort_unstable();
        tuples.dedup();
        Table { arity, tuples }
    }

    /// Builds from tuples already in strictly increasing order.
    pub(crate) fn from_sorted(arity: usize, tuples: Vec<Vec<i64>>) -> Self {
        debug_assert!(tuples.windows(2).all(|w| w[0] < w[1]));
        Table { arity, tuples }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Vec<i64>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[i64]) -> bool {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    /// Table with columns rearranged: column `i` of the result is column
    /// `order[i]` of `self`.
    pub fn permute_columns(&self, order: &[usize]) -> Table {
        Table::new(
            order.len(),
            self.tuples
                .iter()
                .map(|t| order.iter().map(|&c| t[c]).collect())
                .collect(),
        )
    }

    /// `table <name> arity <r> tuples <t>` followed by one line per tuple.
    pub fn dump(&self, name: &str) -> String {
        let mut out = format!("table {name} arity {} tuples {}\n", self.arity, self.len());
        for t in &self.tuples {
            let row: Vec<String> = t.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}
