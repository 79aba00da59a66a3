//! Numerical semigroups generated by telescopic sequences and the Miura
//! monomial order on exponent vectors.
//!
//! A sequence `(a_1, ..., a_t)` with `gcd = 1` generates the semigroup
//! `<A_t> = a_1 N + ... + a_t N`. The weight map `psi(m) = sum a_i m_i` sends
//! exponent vectors onto it, and the order defined here picks one canonical
//! preimage `M(s)` for every semigroup element `s`. For telescopic sequences
//! those canonical preimages have a box-shaped closed form, which the rest of
//! the crate relies on.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("a sequence needs at least two entries, got {0}")]
    TooShort(usize),
    #[error("sequence entries must be positive (entry {index} is zero)")]
    ZeroEntry { index: usize },
    #[error("gcd \u{2260} 1 (gcd of the sequence is {0})")]
    GcdNotOne(u32),
    #[error("telescopic condition fails at index {index}")]
    NotTelescopic { index: usize },
    #[error("{0} is not an element of the semigroup")]
    NotInSemigroup(u64),
    #[error("exponent vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("gap sieve and genus formula disagree ({sieve} vs {formula})")]
    GenusMismatch { sieve: usize, formula: i64 },
}

/// A multi-index `(m_1, ..., m_t)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub SmallVec<[u32; 4]>);

impl ExponentVector {
    pub fn new(entries: &[u32]) -> Self {
        ExponentVector(SmallVec::from_slice(entries))
    }

    pub fn zero(len: usize) -> Self {
        ExponentVector(SmallVec::from_elem(0, len))
    }

    /// The unit vector `e_k` scaled by `scale` (0-based `k`).
    pub fn unit(len: usize, k: usize, scale: u32) -> Self {
        let mut v = Self::zero(len);
        v.0[k] = scale;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// `self - other` when every coordinate stays nonnegative.
    pub fn checked_sub(&self, other: &ExponentVector) -> Option<ExponentVector> {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<SmallVec<_>>>()
            .map(ExponentVector)
    }

    /// Shift the first coordinate by `delta`, failing below zero.
    pub fn shift_first(&self, delta: i64) -> Option<ExponentVector> {
        let first = i64::from(self.0[0]) + delta;
        if first < 0 {
            return None;
        }
        let mut v = self.clone();
        v.0[0] = first as u32;
        Some(v)
    }

    /// Comma-separated rendering, e.g. `1,0,2`.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_key(s: &str) -> Option<ExponentVector> {
        s.split(',')
            .map(|p| p.trim().parse::<u32>().ok())
            .collect::<Option<SmallVec<_>>>()
            .map(ExponentVector)
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

/// `psi(m) = sum_i a_i m_i`.
pub fn psi(weights: &[u32], m: &[u32]) -> u64 {
    weights
        .iter()
        .zip(m)
        .map(|(a, x)| u64::from(*a) * u64::from(*x))
        .sum()
}

/// The Miura order: by weight first; on a weight tie the vector whose first
/// differing coordinate is larger is the smaller one.
pub fn compare_with(weights: &[u32], m: &[u32], n: &[u32]) -> Ordering {
    psi(weights, m).cmp(&psi(weights, n)).then_with(|| {
        for (x, y) in m.iter().zip(n) {
            match x.cmp(y) {
                Ordering::Equal => continue,
                other => return other.reverse(),
            }
        }
        Ordering::Equal
    })
}

/// Every exponent vector `m` with `psi(m) = s`.
pub fn representations(weights: &[u32], s: u64) -> Vec<ExponentVector> {
    fn go(weights: &[u32], k: usize, rem: u64, cur: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
        if k == weights.len() {
            if rem == 0 {
                out.push(ExponentVector::new(cur));
            }
            return;
        }
        let a = u64::from(weights[k]);
        for m in 0..=rem / a {
            cur.push(m as u32);
            go(weights, k + 1, rem - m * a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(
        weights,
        0,
        s,
        &mut Vec::with_capacity(weights.len()),
        &mut out,
    );
    out
}

/// Representation of `target` over `gens` with each coefficient bounded by
/// `bound`, by exhaustive search.
fn bounded_representation(gens: &[u64], target: u64, bound: u64) -> Option<Vec<u64>> {
    fn go(gens: &[u64], k: usize, rem: u64, bound: u64, cur: &mut Vec<u64>) -> bool {
        if rem == 0 {
            cur.resize(gens.len(), 0);
            return true;
        }
        if k == gens.len() {
            return false;
        }
        let top = (rem / gens[k]).min(bound);
        for c in (0..=top).rev() {
            cur.push(c);
            if go(gens, k + 1, rem - c * gens[k], bound, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    go(gens, 0, target, bound, &mut cur).then_some(cur)
}

fn gcd_all(a: &[u32]) -> u32 {
    a.iter().fold(0u32, |g, x| g.gcd(x))
}

/// One entry of the Apery table of `<a_2, ..., a_t>` with respect to `a_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AperyEntry {
    pub residue: u32,
    pub b: u64,
    pub representative: ExponentVector,
}

/// A validated telescopic sequence with its cached gcd chain, gaps and genus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelescopicSequence {
    a: Vec<u32>,
    d: Vec<u32>,
    gaps: Vec<u64>,
    genus: u32,
}

/// Accept `a` iff it is telescopic, i.e. `gcd = 1` and every `a_i/d_i` is a
/// nonnegative combination of `a_1/d_{i-1}, ..., a_{i-1}/d_{i-1}`.
pub fn check_telescopic(a: &[u32]) -> Result<TelescopicSequence, SemigroupError> {
    if a.len() < 2 {
        return Err(SemigroupError::TooShort(a.len()));
    }
    if let Some(index) = a.iter().position(|&x| x == 0) {
        return Err(SemigroupError::ZeroEntry { index: index + 1 });
    }
    let g = gcd_all(a);
    if g != 1 {
        return Err(SemigroupError::GcdNotOne(g));
    }
    let d: Vec<u32> = (1..=a.len()).map(|i| gcd_all(&a[..i])).collect();
    for i in 1..a.len() {
        let target = u64::from(a[i] / d[i]);
        let gens: Vec<u64> = a[..i].iter().map(|x| u64::from(x / d[i - 1])).collect();
        if bounded_representation(&gens, target, target).is_none() {
            return Err(SemigroupError::NotTelescopic { index: i + 1 });
        }
    }

    let gaps = sieve_gaps(a);
    let formula = genus_formula(a, &d);
    if formula < 0 || gaps.len() as i64 != formula {
        return Err(SemigroupError::GenusMismatch {
            sieve: gaps.len(),
            formula,
        });
    }
    Ok(TelescopicSequence {
        a: a.to_vec(),
        d,
        genus: gaps.len() as u32,
        gaps,
    })
}

/// `g = ((1 - a_1) + sum_{i>=2} (d_{i-1}/d_i - 1) a_i) / 2`.
fn genus_formula(a: &[u32], d: &[u32]) -> i64 {
    let mut twice = 1 - i64::from(a[0]);
    for i in 1..a.len() {
        twice += (i64::from(d[i - 1] / d[i]) - 1) * i64::from(a[i]);
    }
    twice / 2
}

/// Gaps of `<a>` by sieving; stops once `a_1` consecutive members are seen.
fn sieve_gaps(a: &[u32]) -> Vec<u64> {
    let a1 = u64::from(a[0]);
    let mut limit = (a1 * u64::from(*a.last().unwrap())).max(2 * a1) as usize;
    loop {
        let mut member = vec![false; limit + 1];
        member[0] = true;
        for s in 1..=limit {
            member[s] = a
                .iter()
                .any(|&x| (x as usize) <= s && member[s - x as usize]);
        }
        let mut run = 0u64;
        let mut gaps = Vec::new();
        for (s, &m) in member.iter().enumerate() {
            if m {
                run += 1;
                if run == a1 {
                    return gaps;
                }
            } else {
                run = 0;
                gaps.push(s as u64);
            }
        }
        limit *= 2;
    }
}

impl TelescopicSequence {
    pub fn weights(&self) -> &[u32] {
        &self.a
    }

    /// `d_i = gcd(a_1, ..., a_i)`.
    pub fn gcd_chain(&self) -> &[u32] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// Sorted gap list `N \ <A_t>`.
    pub fn gaps(&self) -> &[u64] {
        &self.gaps
    }

    /// `d_{i-1}/d_i` for 0-based `i >= 1`: the exponent of the leading
    /// monomial of the `i`-th defining equation.
    pub fn step(&self, i: usize) -> u32 {
        self.d[i - 1] / self.d[i]
    }

    pub fn psi(&self, m: &ExponentVector) -> u64 {
        psi(&self.a, m.as_slice())
    }

    pub fn contains(&self, s: u64) -> bool {
        self.gaps.binary_search(&s).is_err()
    }

    pub fn compare(
        &self,
        m: &ExponentVector,
        n: &ExponentVector,
    ) -> Result<Ordering, SemigroupError> {
        self.check_len(m)?;
        self.check_len(n)?;
        Ok(compare_with(&self.a, m.as_slice(), n.as_slice()))
    }

    fn check_len(&self, m: &ExponentVector) -> Result<(), SemigroupError> {
        if m.len() != self.a.len() {
            return Err(SemigroupError::LengthMismatch {
                expected: self.a.len(),
                got: m.len(),
            });
        }
        Ok(())
    }

    /// `M(s)`: the order-minimal vector of weight `s`, found by enumerating
    /// every representation.
    pub fn min_representative(&self, s: u64) -> Result<ExponentVector, SemigroupError> {
        representations(&self.a, s)
            .into_iter()
            .min_by(|m, n| compare_with(&self.a, m.as_slice(), n.as_slice()))
            .ok_or(SemigroupError::NotInSemigroup(s))
    }

    /// Membership in `B(A_t)` via the box description
    /// `m_i <= d_{i-1}/d_i - 1` for `i >= 2`.
    pub fn in_basis(&self, m: &[u32]) -> bool {
        (1..self.a.len()).all(|i| m[i] < self.step(i))
    }

    /// `B(A_t)` restricted to weight `<= bound`, sorted by the Miura order.
    pub fn basis_b(&self, bound: u64) -> Vec<ExponentVector> {
        let t = self.a.len();
        let mut out = Vec::new();
        let mut cur = vec![0u32; t];
        fn go(
            seq: &TelescopicSequence,
            k: usize,
            used: u64,
            bound: u64,
            cur: &mut Vec<u32>,
            out: &mut Vec<ExponentVector>,
        ) {
            if k == cur.len() {
                out.push(ExponentVector::new(cur));
                return;
            }
            let a = u64::from(seq.a[k]);
            let cap = if k == 0 {
                u64::MAX
            } else {
                u64::from(seq.step(k) - 1)
            };
            let mut m = 0u64;
            while m <= cap && used + m * a <= bound {
                cur[k] = m as u32;
                go(seq, k + 1, used + m * a, bound, cur, out);
                m += 1;
            }
            cur[k] = 0;
        }
        go(self, 0, 0, bound, &mut cur, &mut out);
        out.sort_by(|m, n| compare_with(&self.a, m.as_slice(), n.as_slice()));
        out
    }

    /// `B(A_t)` from its definition `{M(s) : s in <A_t>, s <= bound}`.
    pub fn basis_b_generic(&self, bound: u64) -> Vec<ExponentVector> {
        (0..=bound)
            .filter(|&s| self.contains(s))
            .map(|s| self.min_representative(s).expect("semigroup element"))
            .collect()
    }

    /// `V(A_t) = {(d_{i-1}/d_i) e_i : 2 <= i <= t}`.
    pub fn generators_v(&self) -> Vec<ExponentVector> {
        (1..self.a.len())
            .map(|i| ExponentVector::unit(self.a.len(), i, self.step(i)))
            .collect()
    }

    /// Apery elements `b_r` of `a_2 N + ... + a_t N` modulo `a_1` together
    /// with their canonical representatives, which make up `T(A_t)`.
    pub fn apery_and_t(&self) -> Vec<AperyEntry> {
        let a1 = self.a[0] as usize;
        // shortest paths over residues mod a_1, edges +a_k for k >= 2
        let mut dist = vec![u64::MAX; a1];
        dist[0] = 0;
        let mut heap = BinaryHeap::new();
        heap.push(std::cmp::Reverse((0u64, 0usize)));
        while let Some(std::cmp::Reverse((dd, r))) = heap.pop() {
            if dd > dist[r] {
                continue;
            }
            for &ak in &self.a[1..] {
                let nr = (r + ak as usize) % a1;
                let nd = dd + u64::from(ak);
                if nd < dist[nr] {
                    dist[nr] = nd;
                    heap.push(std::cmp::Reverse((nd, nr)));
                }
            }
        }
        dist.into_iter()
            .enumerate()
            .map(|(r, b)| AperyEntry {
                residue: r as u32,
                b,
                representative: self
                    .min_representative(b)
                    .expect("Apery element is in the semigroup"),
            })
            .collect()
    }

    /// Partition `lambda_i = w_{g+1-i} - (g - i)` read off the gap sequence.
    pub fn gap_partition(&self) -> Vec<u64> {
        let g = self.gaps.len();
        (1..=g).map(|i| self.gaps[g - i] - (g - i) as u64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector::new(v)
    }

    #[test]
    fn telescopic_examples() {
        let s = check_telescopic(&[4, 6, 5]).unwrap();
        assert_eq!(s.gcd_chain(), &[4, 2, 1]);
        assert!(check_telescopic(&[2, 3]).is_ok());
        assert_eq!(
            check_telescopic(&[3, 4, 5]),
            Err(SemigroupError::NotTelescopic { index: 3 })
        );
        assert_eq!(check_telescopic(&[4, 6]), Err(SemigroupError::GcdNotOne(2)));
        assert_eq!(check_telescopic(&[4]), Err(SemigroupError::TooShort(1)));
        assert_eq!(
            check_telescopic(&[0, 1]),
            Err(SemigroupError::ZeroEntry { index: 1 })
        );
    }

    #[test]
    fn order_examples() {
        let s = check_telescopic(&[4, 6, 5]).unwrap();
        assert_eq!(
            s.compare(&ev(&[1, 1, 0]), &ev(&[0, 0, 2])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            s.compare(&ev(&[1, 1, 0]), &ev(&[1, 1, 0])).unwrap(),
            Ordering::Equal
        );
        assert_eq!(
            s.compare(&ev(&[0, 0, 0]), &ev(&[1, 0, 0])).unwrap(),
            Ordering::Less
        );
        assert!(s.compare(&ev(&[1, 0]), &ev(&[1, 0, 0])).is_err());
    }

    #[test]
    fn min_representative_examples() {
        let s = check_telescopic(&[4, 6, 5]).unwrap();
        assert_eq!(s.min_representative(10).unwrap(), ev(&[1, 1, 0]));
        assert_eq!(s.min_representative(0).unwrap(), ev(&[0, 0, 0]));
        assert_eq!(
            s.min_representative(7),
            Err(SemigroupError::NotInSemigroup(7))
        );
        let e = check_telescopic(&[2, 3]).unwrap();
        assert_eq!(e.min_representative(6).unwrap(), ev(&[3, 0]));
    }

    #[test]
    fn basis_examples() {
        let s = check_telescopic(&[4, 6, 5]).unwrap();
        assert_eq!(
            s.basis_b(6),
            vec![
                ev(&[0, 0, 0]),
                ev(&[1, 0, 0]),
                ev(&[0, 0, 1]),
                ev(&[0, 1, 0])
            ]
        );
        let e = check_telescopic(&[2, 3]).unwrap();
        assert_eq!(e.basis_b(0), vec![ev(&[0, 0])]);
        assert_eq!(
            e.basis_b(5),
            vec![
                ev(&[0, 0]),
                ev(&[1, 0]),
                ev(&[0, 1]),
                ev(&[2, 0]),
                ev(&[1, 1])
            ]
        );
    }

    #[test]
    fn v_examples() {
        let s = check_telescopic(&[4, 6, 5]).unwrap();
        assert_eq!(s.generators_v(), vec![ev(&[0, 2, 0]), ev(&[0, 0, 2])]);
        for (n, sv) in [(2u32, 3u32), (3, 7), (5, 2)] {
            let q = check_telescopic(&[n, sv]).unwrap();
            assert_eq!(q.generators_v(), vec![ev(&[0, n])]);
        }
    }

    #[test]
    fn apery_examples() {
        let s = check_telescopic(&[4, 6, 5]).unwrap();
        let tab = s.apery_and_t();
        assert_eq!(
            tab.iter().map(|e| e.b).collect::<Vec<_>>(),
            vec![0, 5, 6, 11]
        );
        let mut t: Vec<_> = tab.iter().map(|e| e.representative.clone()).collect();
        t.sort();
        assert_eq!(
            t,
            vec![
                ev(&[0, 0, 0]),
                ev(&[0, 0, 1]),
                ev(&[0, 1, 0]),
                ev(&[0, 1, 1])
            ]
        );

        let e = check_telescopic(&[2, 3]).unwrap().apery_and_t();
        assert_eq!(e.iter().map(|x| x.b).collect::<Vec<_>>(), vec![0, 3]);
        assert_eq!(e[1].representative, ev(&[0, 1]));

        let n = check_telescopic(&[2, 1]).unwrap().apery_and_t();
        assert_eq!(n.iter().map(|x| x.b).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(n[1].representative, ev(&[0, 1]));
    }

    #[test]
    fn gaps_and_partitions() {
        let e = check_telescopic(&[2, 3]).unwrap();
        assert_eq!((e.gaps(), e.genus()), (&[1u64][..], 1));
        assert_eq!(e.gap_partition(), vec![1]);
        let h = check_telescopic(&[2, 7]).unwrap();
        assert_eq!((h.gaps(), h.genus()), (&[1u64, 3, 5][..], 3));
        assert_eq!(h.gap_partition(), vec![3, 2, 1]);
        let s = check_telescopic(&[4, 6, 5]).unwrap();
        assert_eq!((s.gaps(), s.genus()), (&[1u64, 2, 3, 7][..], 4));
        let n = check_telescopic(&[2, 1]).unwrap();
        assert_eq!(n.genus(), 0);
        assert!(n.gap_partition().is_empty());
    }

    #[test]
    fn exponent_vector_helpers() {
        let m = ev(&[2, 0, 1]);
        assert_eq!(m.shift_first(-2).unwrap(), ev(&[0, 0, 1]));
        assert!(m.shift_first(-3).is_none());
        assert_eq!(ExponentVector::parse_key(&m.key()).unwrap(), m);
        assert_eq!(m.checked_sub(&ev(&[1, 0, 1])).unwrap(), ev(&[1, 0, 0]));
        assert!(m.checked_sub(&ev(&[0, 1, 0])).is_none());
    }
}
