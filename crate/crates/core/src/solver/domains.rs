use crate::ast::Domain;

/// Word layout of every variable's bitset inside one flat vector, so that a
/// search state is a single `Vec<u64>`.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    lo: Vec<i64>,
    off: Vec<usize>,
    words: Vec<usize>,
}

pub(crate) type State = Vec<u64>;

impl Layout {
    pub fn new(domains: &[&Domain]) -> (Layout, State) {
        let mut lo = Vec::new();
        let mut off = Vec::new();
        let mut words = Vec::new();
        let mut total = 0;
        for d in domains {
            let (a, b) = (Domain::min(d).unwrap_or(0), Domain::max(d).unwrap_or(0));
            let n = ((b - a) as usize) / 64 + 1;
            lo.push(a);
            off.push(total);
            words.push(n);
            total += n;
        }
        let layout = Layout { lo, off, words };
        let mut state = vec![0u64; total];
        for (i, d) in domains.iter().enumerate() {
            for &v in d.values() {
                let k = (v - layout.lo[i]) as usize;
                state[layout.off[i] + k / 64] |= 1 << (k % 64);
            }
        }
        (layout, state)
    }

    fn slice<'a>(&self, s: &'a [u64], i: usize) -> &'a [u64] {
        &s[self.off[i]..self.off[i] + self.words[i]]
    }

    pub fn is_empty(&self, s: &[u64], i: usize) -> bool {
        self.slice(s, i).iter().all(|&w| w == 0)
    }

    pub fn min(&self, s: &[u64], i: usize) -> Option<i64> {
        for (k, &w) in self.slice(s, i).iter().enumerate() {
            if w != 0 {
                return Some(self.lo[i] + (k * 64 + w.trailing_zeros() as usize) as i64);
            }
        }
        None
    }

    pub fn max(&self, s: &[u64], i: usize) -> Option<i64> {
        for (k, &w) in self.slice(s, i).iter().enumerate().rev() {
            if w != 0 {
                return Some(self.lo[i] + (k * 64 + 63 - w.leading_zeros() as usize) as i64);
            }
        }
        None
    }

    /// The value of a singleton domain.
    pub fn value(&self, s: &[u64], i: usize) -> Option<i64> {
        let lo = self.min(s, i)?;
        (self.max(s, i) == Some(lo)).then_some(lo)
    }

    pub fn contains(&self, s: &[u64], i: usize, v: i64) -> bool {
        let k = v.wrapping_sub(self.lo[i]);
        if k < 0 || k as usize >= self.words[i] * 64 {
            return false;
        }
        let k = k as usize;
        s[self.off[i] + k / 64] & (1 << (k % 64)) != 0
    }

    /// Returns whether the domain changed.
    pub fn remove(&self, s: &mut [u64], i: usize, v: i64) -> bool {
        if !self.contains(s, i, v) {
            return false;
        }
        let k = (v - self.lo[i]) as usize;
        s[self.off[i] + k / 64] &= !(1 << (k % 64));
        true
    }

    pub fn assign(&self, s: &mut [u64], i: usize, v: i64) {
        for w in &mut s[self.off[i]..self.off[i] + self.words[i]] {
            *w = 0;
        }
        let k = (v - self.lo[i]) as usize;
        s[self.off[i] + k / 64] |= 1 << (k % 64);
    }

    /// Keeps only values in `[lo, hi]`; returns whether the domain changed.
    pub fn clamp(&self, s: &mut [u64], i: usize, lo: i64, hi: i64) -> bool {
        let mut changed = false;
        for v in self.values(s, i) {
            if v < lo || v > hi {
                changed |= self.remove(s, i, v);
            }
        }
        changed
    }

    pub fn values(&self, s: &[u64], i: usize) -> Vec<i64> {
        let mut out = Vec::new();
        for (k, &w) in self.slice(s, i).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(self.lo[i] + (k * 64 + b) as i64);
                w &= w - 1;
            }
        }
        out
    }

    pub fn to_domain(&self, s: &[u64], i: usize) -> Domain {
        Domain::new(self.values(s, i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_ops() {
        let a = Domain::new(vec![-3, 0, 70]);
        let b = Domain::range(1, 4);
        let (l, mut s) = Layout::new(&[&a, &b]);
        assert_eq!(l.values(&s, 0), vec![-3, 0, 70]);
        assert_eq!(l.min(&s, 0), Some(-3));
        assert_eq!(l.max(&s, 0), Some(70));
        assert!(l.remove(&mut s, 0, 70));
        assert_eq!(l.max(&s, 0), Some(0));
        assert!(l.clamp(&mut s, 1, 2, 3));
        assert_eq!(l.values(&s, 1), vec![2, 3]);
        l.assign(&mut s, 1, 3);
        assert_eq!(l.value(&s, 1), Some(3));
        assert!(!l.contains(&s, 1, 100));
    }
}
