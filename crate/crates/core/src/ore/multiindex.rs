use std::cmp::Ordering;
use std::fmt;

/// Derivative multi-index `mu = (mu_1, ..., mu_n)`, trailing zeros trimmed.
///
/// The total order is the jet order used for leaders: first the order `|mu|`,
/// then the class (higher class is greater), then reverse-lexicographic.
/// Comparing at the first differing position with the smaller exponent
/// winning realises all three at once.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn from_exponents(mut e: Vec<u32>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        MultiIndex(e)
    }

    /// Build from a multiset of zero-based axes, e.g. `[0, 2]` is `d_13`.
    pub fn from_axes(axes: &[usize]) -> Self {
        let n = axes.iter().copied().max().map_or(0, |m| m + 1);
        let mut e = vec![0; n];
        for &a in axes {
            e[a] += 1;
        }
        MultiIndex::from_exponents(e)
    }

    pub fn unit(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        MultiIndex(e)
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Highest axis referenced plus one.
    pub fn span(&self) -> usize {
        self.0.len()
    }

    /// Zero-based class: smallest axis with a nonzero exponent.
    pub fn class(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }

    pub fn plus(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        if e.len() <= i {
            e.resize(i + 1, 0);
        }
        e[i] += 1;
        MultiIndex(e)
    }

    pub fn minus(&self, i: usize) -> Option<Self> {
        if self.get(i) == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(MultiIndex::from_exponents(e))
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        let n = self.0.len().max(other.0.len());
        MultiIndex((0..n).map(|i| self.get(i) + other.get(i)).collect())
    }

    pub fn le(&self, other: &MultiIndex) -> bool {
        (0..self.0.len()).all(|i| self.get(i) <= other.get(i))
    }

    pub fn sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.le(self) {
            return None;
        }
        Some(MultiIndex::from_exponents(
            (0..self.0.len()).map(|i| self.get(i) - other.get(i)).collect(),
        ))
    }

    /// Axes as a sorted multiset (zero-based).
    pub fn axes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                out.push(i);
            }
        }
        out
    }

    /// All multi-indices in `n` variables of exactly order `q`, ascending.
    pub fn all_of_order(n: usize, q: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if i + 1 == n {
                cur[i] = left;
                out.push(MultiIndex::from_exponents(cur.clone()));
                cur[i] = 0;
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        if n == 0 {
            if q == 0 {
                out.push(MultiIndex::zero());
            }
            return out;
        }
        rec(0, q, &mut cur, &mut out);
        out.sort();
        out
    }

    /// All multi-indices in `n` variables of order at most `q`.
    pub fn all_up_to(n: usize, q: u32) -> Vec<MultiIndex> {
        (0..=q).flat_map(|k| MultiIndex::all_of_order(n, k)).collect()
    }

    /// Subscript form with one-based axes, e.g. `13`; uses commas when `n >= 10`.
    pub fn subscript(&self) -> String {
        let axes = self.axes();
        if axes.iter().any(|&a| a >= 9) {
            axes.iter().map(|a| (a + 1).to_string()).collect::<Vec<_>>().join(",")
        } else {
            axes.iter().map(|a| (a + 1).to_string()).collect()
        }
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.order().cmp(&other.order());
        if d != Ordering::Equal {
            return d;
        }
        let n = self.0.len().max(other.0.len());
        for i in 0..n {
            let (a, b) = (self.get(i), other.get(i));
            if a != b {
                return b.cmp(&a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d[{}]", self.subscript())
    }
}

/// Binomial coefficient as u64.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_is_lowest_nonzero_axis() {
        assert_eq!(MultiIndex::from_axes(&[2, 2]).class(), Some(2));
        assert_eq!(MultiIndex::from_axes(&[1, 2]).class(), Some(1));
        assert_eq!(MultiIndex::from_axes(&[0, 2]).class(), Some(0));
        assert_eq!(MultiIndex::zero().class(), None);
    }

    #[test]
    fn jet_order_prefers_high_class() {
        let m = |a: &[usize]| MultiIndex::from_axes(a);
        let mut v = vec![m(&[0, 0]), m(&[0, 1]), m(&[2, 2]), m(&[1, 2]), m(&[1, 1]), m(&[0, 2])];
        v.sort();
        v.reverse();
        let s: Vec<String> = v.iter().map(|x| x.subscript()).collect();
        assert_eq!(s, ["33", "23", "22", "13", "12", "11"]);
    }

    #[test]
    fn counts_match_binomials() {
        for n in 1..5 {
            for q in 0..4 {
                assert_eq!(
                    MultiIndex::all_of_order(n, q).len() as u64,
                    binomial((n as u64) + (q as u64) - 1, q as u64)
                );
            }
        }
    }
}
