//! Exponent vectors `Q = (q_1, ..., q_N)`.

use std::cmp::Ordering;
use std::fmt;

use super::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex { exps }
    }

    pub fn zero(nvars: usize) -> Self {
        MultiIndex { exps: vec![0; nvars] }
    }

    /// `E_i`.
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        MultiIndex { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.exps[i]
    }

    /// `|Q|`.
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Degree restricted to the variables in `range`.
    pub fn partial_degree(&self, range: std::ops::Range<usize>) -> u32 {
        self.exps[range].iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex { exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect() }
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex { exps })
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn with(&self, i: usize, e: u32) -> MultiIndex {
        let mut exps = self.exps.clone();
        exps[i] = e;
        MultiIndex { exps }
    }

    pub fn inc(&self, i: usize) -> MultiIndex {
        let mut exps = self.exps.clone();
        exps[i] += 1;
        MultiIndex { exps }
    }

    pub fn dec(&self, i: usize) -> Option<MultiIndex> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[i] -= 1;
        Some(MultiIndex { exps })
    }

    /// `(Q, v) = Σ q_k v_k` over the first `v.len()` variables.
    pub fn dot(&self, v: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (q, x) in self.exps.iter().zip(v) {
            if *q != 0 {
                acc += &(x * &Scalar::from_int(*q as i64));
            }
        }
        acc
    }

    /// Splits into the first `n` exponents and the rest.
    pub fn split(&self, n: usize) -> (MultiIndex, MultiIndex) {
        (MultiIndex::new(self.exps[..n].to_vec()), MultiIndex::new(self.exps[n..].to_vec()))
    }

    pub fn concat(&self, tail: &MultiIndex) -> MultiIndex {
        let mut exps = self.exps.clone();
        exps.extend_from_slice(&tail.exps);
        MultiIndex { exps }
    }

    /// All exponent vectors over `nvars` variables with total degree exactly `deg`,
    /// in iteration order.
    pub fn of_degree(nvars: usize, deg: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; nvars];
        fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if n == 0 {
                if left == 0 {
                    out.push(MultiIndex::new(Vec::new()));
                }
                return;
            }
            if k == n - 1 {
                cur[k] = left;
                out.push(MultiIndex::new(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[k] = e;
                rec(k + 1, left - e, cur, out);
            }
            cur[k] = 0;
        }
        rec(0, deg, &mut cur, &mut out);
        out
    }

    /// All exponent vectors with `lo <= |Q| <= hi`.
    pub fn up_to_degree(nvars: usize, lo: u32, hi: u32) -> Vec<MultiIndex> {
        (lo..=hi).flat_map(|d| Self::of_degree(nvars, d)).collect()
    }

    /// Human form such as `x1^2*x3`, with 1-based variable names.
    pub fn pretty(&self) -> String {
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(k, e)| if *e == 1 { format!("x{}", k + 1) } else { format!("x{}^{}", k + 1, e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for MultiIndex {
    /// Graded order: total degree first, then lexicographic with `x1` ahead of `x2`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order() {
        let x1 = MultiIndex::unit(2, 0);
        let x2 = MultiIndex::unit(2, 1);
        let one = MultiIndex::zero(2);
        let x1sq = MultiIndex::new(vec![2, 0]);
        assert!(one < x1 && x1 < x2 && x2 < x1sq);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(MultiIndex::of_degree(3, 2).len(), 6);
        assert_eq!(MultiIndex::up_to_degree(2, 0, 3).len(), 10);
        let shell = MultiIndex::of_degree(3, 3);
        let mut sorted = shell.clone();
        sorted.sort();
        assert_eq!(shell, sorted);
    }

    #[test]
    fn dot_product() {
        let q = MultiIndex::new(vec![2, 1]);
        assert_eq!(q.dot(&[Scalar::from_int(2), Scalar::from_int(3)]), Scalar::from_int(7));
    }
}
