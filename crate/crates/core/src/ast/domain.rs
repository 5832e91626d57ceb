use std::fmt;

/// A finite set of integers, kept sorted ascending without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Domain {
    values: Vec<i64>,
}

impl Domain {
    pub fn new(mut values: Vec<i64>) -> Self {
        values.sort_unstable();
        values.dedup();
        Domain { values }
    }

    /// `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: i64, hi: i64) -> Self {
        Domain {
            values: if lo <= hi { (lo..=hi).collect() } else { Vec::new() },
        }
    }

    pub fn boolean() -> Self {
        Domain::range(0, 1)
    }

    pub fn singleton(v: i64) -> Self {
        Domain { values: vec![v] }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<i64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.values.last().copied()
    }

    pub fn contains(&self, v: i64) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    /// Position of `v` within the sorted value list.
    pub fn rank(&self, v: i64) -> Option<usize> {
        self.values.binary_search(&v).ok()
    }

    pub fn single_value(&self) -> Option<i64> {
        match self.values.as_slice() {
            [v] => Some(*v),
            _ => None,
        }
    }

    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|&v| v == 0 || v == 1)
    }

    pub fn retain(&mut self, f: impl FnMut(&i64) -> bool) -> bool {
        let before = self.values.len();
        self.values.retain(f);
        before != self.values.len()
    }

    pub fn remove(&mut self, v: i64) -> bool {
        match self.values.binary_search(&v) {
            Ok(i) => {
                self.values.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        Domain {
            values: self.values.iter().copied().filter(|v| other.contains(*v)).collect(),
        }
    }

    /// Maximal runs of consecutive values.
    pub fn intervals(&self) -> Vec<(i64, i64)> {
        let mut out: Vec<(i64, i64)> = Vec::new();
        for &v in &self.values {
            match out.last_mut() {
                Some((_, hi)) if *hi + 1 == v => *hi = v,
                _ => out.push((v, v)),
            }
        }
        out
    }
}

impl FromIterator<i64> for Domain {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        Domain::new(iter.into_iter().collect())
    }
}

impl fmt::Display for Domain {
    /// `int(1..3, 5)` style.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "int(")?;
        for (i, (lo, hi)) in self.intervals().into_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..{hi}")?;
            }
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_and_deduplicated() {
        let d = Domain::new(vec![3, 1, 3, 2]);
        assert_eq!(d.values(), &[1, 2, 3]);
        assert_eq!(d.rank(3), Some(2));
        assert_eq!(d.rank(7), None);
    }

    #[test]
    fn display_compresses_runs() {
        assert_eq!(Domain::new(vec![1, 2, 3, 5, 7, 8]).to_string(), "int(1..3, 5, 7..8)");
        assert_eq!(Domain::range(4, 3).to_string(), "int()");
    }
}
