//! Degree sequences and their scalar functionals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::{Error, Result};

/// A degree vector `d_1..d_n` with entries in `1..=Δ`.
///
/// Vertices are indexed from 0 internally and printed 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    delta: u32,
}

impl DegreeSequence {
    /// Strict constructor: every entry must be at least 1.
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidDegrees("empty sequence".into()));
        }
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::InvalidDegrees(format!("vertex {} has degree 0", i + 1)));
        }
        Ok(Self::build(degrees))
    }

    /// Lenient constructor admitting zero entries (residual degree vectors).
    pub fn new_lenient(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidDegrees("empty sequence".into()));
        }
        Ok(Self::build(degrees))
    }

    /// Builds `n_j` copies of degree `j` for each `(j, n_j)`, in the given order.
    pub fn from_counts(counts: &[(u32, usize)]) -> Result<Self> {
        let mut v = Vec::new();
        for &(j, c) in counts {
            v.extend(std::iter::repeat_n(j, c));
        }
        Self::new(v)
    }

    fn build(degrees: Vec<u32>) -> Self {
        let delta = degrees.iter().copied().max().unwrap_or(0);
        DegreeSequence { degrees, delta }
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Maximum degree Δ.
    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn degree_sum(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }

    /// Number of edges `m = Σ d_i / 2` (rounded down for odd sums).
    pub fn m(&self) -> u64 {
        self.degree_sum() / 2
    }

    /// The map `j -> n_j`.
    pub fn degree_counts(&self) -> BTreeMap<u32, usize> {
        let mut c = BTreeMap::new();
        for &d in &self.degrees {
            *c.entry(d).or_insert(0) += 1;
        }
        c
    }

    /// `Σ_{j≤k} j·n_j`, the number of points in vertices of degree at most `k`.
    pub fn small_point_count(&self, k: u32) -> u64 {
        self.degrees.iter().filter(|&&d| d <= k).map(|&d| d as u64).sum()
    }

    /// Erdős–Gallai test. Odd degree sums give `false`.
    pub fn is_graphic(&self) -> bool {
        is_graphic(&self.degrees)
    }

    fn check_cut(&self, k: u32) -> Result<()> {
        if k < 1 || k >= self.delta {
            return Err(Error::CutOutOfRange { k, delta: self.delta });
        }
        Ok(())
    }

    /// `μ = (Σ_{j≤k} j n_j)² / (4m)`, exactly.
    pub fn mu(&self, k: u32) -> Result<BigRational> {
        self.check_cut(k)?;
        let s = BigInt::from(self.small_point_count(k));
        let two_sum = BigInt::from(2 * self.degree_sum());
        if self.degree_sum() == 0 {
            return Err(Error::InvalidDegrees("no edges".into()));
        }
        Ok(BigRational::new(&s * &s, two_sum))
    }

    /// True iff `Σ_{j≤k} n_j / n ∈ [ξ, 1−ξ]`.
    pub fn window_check(&self, k: u32, xi: &BigRational) -> bool {
        let small = self.degrees.iter().filter(|&&d| d <= k).count();
        let frac = BigRational::new(BigInt::from(small), BigInt::from(self.n()));
        let one = BigRational::from_integer(BigInt::from(1));
        &frac >= xi && frac <= one - xi
    }

    /// The same multiset sorted non-increasingly.
    pub fn sorted_desc(&self) -> DegreeSequence {
        let mut v = self.degrees.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Self::build(v)
    }
}

impl core::fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, d) in self.degrees.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Erdős–Gallai on a raw slice (zeros allowed).
pub fn is_graphic(degrees: &[u32]) -> bool {
    let sum: u64 = degrees.iter().map(|&d| d as u64).sum();
    if sum % 2 == 1 {
        return false;
    }
    let mut d: Vec<u64> = degrees.iter().map(|&x| x as u64).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let n = d.len();
    let mut left = 0u64;
    for k in 1..=n {
        left += d[k - 1];
        let right: u64 =
            (k as u64) * (k as u64 - 1) + d[k..].iter().map(|&x| x.min(k as u64)).sum::<u64>();
        if left > right {
            return false;
        }
    }
    true
}

/// All non-increasing degree vectors with entries in `1..=delta`, `n` entries
/// and even sum at most `2*max_m`, for every `n` in `1..=max_n`.
pub fn enumerate_sorted(max_n: usize, delta: u32, max_m: u64) -> Vec<DegreeSequence> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        out: &mut Vec<DegreeSequence>,
        cur: &mut Vec<u32>,
        max_n: usize,
        cap: u32,
        sum: u64,
        max_sum: u64,
    ) {
        if !cur.is_empty() && sum.is_multiple_of(2) && sum > 0 {
            out.push(DegreeSequence::build(cur.clone()));
        }
        if cur.len() == max_n {
            return;
        }
        for d in (1..=cap).rev() {
            if sum + d as u64 > max_sum {
                continue;
            }
            cur.push(d);
            rec(out, cur, max_n, d, sum + d as u64, max_sum);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, max_n, delta, 0, 2 * max_m);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn ds(v: &[u32]) -> DegreeSequence {
        DegreeSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn counts_examples() {
        assert_eq!(ds(&[2, 2, 2, 2]).degree_counts(), BTreeMap::from([(2, 4)]));
        assert_eq!(
            ds(&[2, 2, 2, 2, 2, 3, 3, 4]).degree_counts(),
            BTreeMap::from([(2, 5), (3, 2), (4, 1)])
        );
        assert_eq!(ds(&[1, 1]).degree_counts(), BTreeMap::from([(1, 2)]));
    }

    #[test]
    fn graphic_examples() {
        assert!(ds(&[2, 2, 2, 2]).is_graphic());
        assert!(!ds(&[1, 1, 1]).is_graphic());
        assert!(!ds(&[3, 3, 1, 1]).is_graphic());
    }

    #[test]
    fn mu_examples() {
        assert_eq!(ds(&[2, 2, 2, 2, 2, 3, 3, 4]).mu(2).unwrap(), ratio(5, 2));
        assert!(matches!(ds(&[1, 1]).mu(1), Err(Error::CutOutOfRange { .. })));
        let d = DegreeSequence::from_counts(&[(1, 1000), (7, 1000)]).unwrap();
        // (1000)^2 / (4 * 4000) = 62.5 = n/32
        assert_eq!(d.mu(1).unwrap(), ratio(125, 2));
    }

    #[test]
    fn window_examples() {
        let d = DegreeSequence::from_counts(&[(1, 50), (7, 50)]).unwrap();
        assert!(d.window_check(1, &ratio(1, 4)));
        let r = DegreeSequence::from_counts(&[(2, 100)]).unwrap();
        assert!(!r.window_check(1, &ratio(1, 10)));
        assert!(ds(&[2, 2, 2, 2, 2, 3, 3, 4]).window_check(2, &ratio(1, 4)));
    }

    #[test]
    fn zero_degrees() {
        assert!(DegreeSequence::new(vec![1, 0, 1]).is_err());
        assert!(DegreeSequence::new_lenient(vec![1, 0, 1]).is_ok());
    }

    #[test]
    fn enumeration_is_sorted_and_even() {
        let all = enumerate_sorted(4, 3, 4);
        assert!(all.iter().all(|d| d.degree_sum() % 2 == 0 && d.m() <= 4));
        assert!(all.contains(&ds(&[2, 2, 2, 2])));
        assert!(all.contains(&ds(&[3, 1])));
    }
}
