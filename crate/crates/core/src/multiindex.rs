//! Multi-indices, primitive exponent vectors and degree counting.
//!
//! All collections of multi-indices produced here are ordered graded
//! lexicographically: first by total degree, then lexicographically on the
//! entries (so `(0,1) < (1,0) < (0,2) < (1,1) < (2,0)`).

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector `(m_1, ..., m_n)` of nonnegative integers.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs at least one entry");
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex::new(vec![0; n])
    }

    /// Unit vector `e_j` (zero based).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex::new(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Total degree `|m|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `m!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&e| (1..=e).map(f64::from).product::<f64>())
            .product()
    }

    pub fn scaled(&self, l: u32) -> Self {
        MultiIndex(self.0.iter().map(|&e| e * l).collect())
    }

    pub fn plus(&self, other: &MultiIndex) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` when some entry would go negative.
    pub fn minus(&self, other: &MultiIndex) -> Option<Self> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Greatest common divisor of the entries with `gcd(0, a) = a`.
    pub fn gcd(&self) -> u32 {
        self.0.iter().fold(0, |g, &e| gcd(g, e))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex::new(v.to_vec())
    }
}

/// A nonzero multi-index whose entries are relatively prime.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MultiIndex", into = "MultiIndex")]
pub struct PrimitiveIndex(MultiIndex);

impl PrimitiveIndex {
    pub fn new(m: MultiIndex) -> Result<Self> {
        match m.gcd() {
            0 => Err(Error::ZeroMultiIndex),
            1 => Ok(PrimitiveIndex(m)),
            g => Err(Error::InvalidParameter(format!(
                "{m} is not primitive (gcd {g})"
            ))),
        }
    }

    pub fn as_index(&self) -> &MultiIndex {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn degree(&self) -> u32 {
        self.0.degree()
    }

    pub fn entries(&self) -> &[u32] {
        self.0.entries()
    }

    /// Whether `m = l·k` for some `l ≥ 1`; returns that `l`.
    pub fn multiple_of(&self, m: &MultiIndex) -> Option<u32> {
        if m.is_zero() || m.dim() != self.dim() {
            return None;
        }
        match primitive_factor(m) {
            Ok((k, l)) if &k == self => Some(l),
            _ => None,
        }
    }
}

impl TryFrom<MultiIndex> for PrimitiveIndex {
    type Error = Error;

    fn try_from(m: MultiIndex) -> Result<Self> {
        PrimitiveIndex::new(m)
    }
}

impl From<PrimitiveIndex> for MultiIndex {
    fn from(k: PrimitiveIndex) -> Self {
        k.0
    }
}

impl fmt::Debug for PrimitiveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for PrimitiveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

pub(crate) fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Splits `m ≠ 0` as `m = l·k` with `k` primitive and `l = gcd(m)`.
pub fn primitive_factor(m: &MultiIndex) -> Result<(PrimitiveIndex, u32)> {
    let l = m.gcd();
    if l == 0 {
        return Err(Error::ZeroMultiIndex);
    }
    let k = MultiIndex(m.0.iter().map(|&e| e / l).collect());
    Ok((PrimitiveIndex(k), l))
}

/// All multi-indices of dimension `n` with `|m| ≤ max_degree`, graded-lex.
pub fn enumerate_indices(n: usize, max_degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        out.extend(indices_of_degree(n, d));
    }
    out
}

/// All multi-indices of dimension `n` and degree exactly `d`, lexicographic.
pub fn indices_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill_degree(&mut cur, 0, d, &mut out);
    out
}

fn fill_degree(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for e in 0..=remaining {
        cur[pos] = e;
        fill_degree(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

/// Every primitive `k` with `|k| ≤ max_degree`, graded-lex.
pub fn enumerate_primitives(n: usize, max_degree: u32) -> Vec<PrimitiveIndex> {
    (1..=max_degree)
        .flat_map(|d| indices_of_degree(n, d))
        .filter(|m| m.gcd() == 1)
        .map(PrimitiveIndex)
        .collect()
}

/// Number of multi-indices of dimension `n` and degree `m`: `C(n+m-1, n-1)`.
pub fn count_degree(n: usize, m: u32) -> u64 {
    assert!(n >= 1);
    binomial(n as u64 + m as u64 - 1, n as u64 - 1)
}

pub(crate) fn binomial(top: u64, bottom: u64) -> u64 {
    let bottom = bottom.min(top - bottom);
    let mut acc: u64 = 1;
    for i in 0..bottom {
        acc = acc * (top - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi<const N: usize>(v: [u32; N]) -> MultiIndex {
        MultiIndex::from(v)
    }

    #[test]
    fn factor_examples() {
        assert_eq!(
            primitive_factor(&mi([2, 4])).unwrap(),
            (PrimitiveIndex::new(mi([1, 2])).unwrap(), 2)
        );
        assert_eq!(primitive_factor(&mi([3, 5])).unwrap().1, 1);
        let (k, l) = primitive_factor(&mi([0, 6])).unwrap();
        assert_eq!(k.entries(), &[0, 1]);
        assert_eq!(l, 6);
        assert_eq!(
            primitive_factor(&mi([0, 0])).unwrap_err().to_string(),
            "no primitive factorization of 0"
        );
    }

    #[test]
    fn graded_lex_order() {
        let all = enumerate_indices(2, 2);
        let expect = vec![
            mi([0, 0]),
            mi([0, 1]),
            mi([1, 0]),
            mi([0, 2]),
            mi([1, 1]),
            mi([2, 0]),
        ];
        assert_eq!(all, expect);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn primitives_small() {
        let p: Vec<Vec<u32>> = enumerate_primitives(2, 2)
            .iter()
            .map(|k| k.entries().to_vec())
            .collect();
        assert_eq!(p, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        let p: Vec<Vec<u32>> = enumerate_primitives(2, 3)
            .iter()
            .map(|k| k.entries().to_vec())
            .collect();
        assert_eq!(
            p,
            vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![1, 2], vec![2, 1]]
        );
        let p = enumerate_primitives(1, 5);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].entries(), &[1]);
    }

    #[test]
    fn counting() {
        assert_eq!(count_degree(2, 3), 4);
        assert_eq!(count_degree(3, 0), 1);
        // oracle: direct enumeration
        assert_eq!(count_degree(3, 4), indices_of_degree(3, 4).len() as u64);
        assert_eq!(count_degree(3, 4), 15);
    }

    #[test]
    fn primitive_rejects_non_primitive() {
        assert!(PrimitiveIndex::new(mi([2, 2])).is_err());
        assert!(PrimitiveIndex::new(mi([0, 0])).is_err());
        assert!(PrimitiveIndex::new(mi([0, 1])).is_ok());
    }

    #[test]
    fn multiple_of_detects_scaling() {
        let k = PrimitiveIndex::new(mi([1, 2])).unwrap();
        assert_eq!(k.multiple_of(&mi([3, 6])), Some(3));
        assert_eq!(k.multiple_of(&mi([2, 1])), None);
        assert_eq!(k.multiple_of(&mi([0, 0])), None);
    }

    #[test]
    fn json_is_plain_array() {
        let m = mi([1, 0, 3]);
        assert_eq!(serde_json::to_string(&m).unwrap(), "[1,0,3]");
        let k: PrimitiveIndex = serde_json::from_str("[2,3]").unwrap();
        assert_eq!(k.entries(), &[2, 3]);
        assert!(serde_json::from_str::<PrimitiveIndex>("[2,4]").is_err());
    }
}
