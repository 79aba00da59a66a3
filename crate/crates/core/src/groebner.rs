//! A plain Buchberger implementation over `Q`, only as large as the
//! singularity test needs: a handful of generators in at most a few
//! variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermOrder {
    /// Graded reverse lexicographic.
    GrevLex,
    /// Lexicographic with variable 0 largest.
    Lex,
}

impl TermOrder {
    pub fn cmp(self, a: &[u16], b: &[u16]) -> Ordering {
        match self {
            TermOrder::Lex => a.cmp(b),
            TermOrder::GrevLex => {
                let da: u32 = a.iter().map(|&e| u32::from(e)).sum();
                let db: u32 = b.iter().map(|&e| u32::from(e)).sum();
                da.cmp(&db).then_with(|| {
                    for (x, y) in a.iter().zip(b).rev() {
                        if x != y {
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

/// A polynomial over `Q` with terms sorted descending in its term order.
#[derive(Debug, Clone, PartialEq)]
pub struct QPoly {
    pub terms: Vec<(Vec<u16>, Rational)>,
}

impl QPoly {
    pub fn from_map(map: BTreeMap<Vec<u16>, Rational>, order: TermOrder) -> QPoly {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        QPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0)
    }

    fn lead(&self) -> &(Vec<u16>, Rational) {
        &self.terms[0]
    }

    fn monic(mut self) -> QPoly {
        if let Some((_, c)) = self.terms.first() {
            let inv = c.recip();
            for t in &mut self.terms {
                t.1 *= &inv;
            }
        }
        self
    }

    /// `self - c * x^shift * other`.
    fn sub_multiple(&self, other: &QPoly, c: &Rational, shift: &[u16], order: TermOrder) -> QPoly {
        let mut map: BTreeMap<Vec<u16>, Rational> = self.terms.iter().cloned().collect();
        for (m, k) in &other.terms {
            let sm: Vec<u16> = m.iter().zip(shift).map(|(a, b)| a + b).collect();
            let e = map.entry(sm).or_insert_with(Rational::zero);
            *e -= k * c;
        }
        QPoly::from_map(map, order)
    }

    /// Largest power of variable `k` occurring.
    pub fn degree_in(&self, k: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m[k]).max().unwrap_or(0)
    }
}

fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u16], b: &[u16]) -> Vec<u16> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Full reduction of `f` modulo `basis`.
pub fn reduce(f: &QPoly, basis: &[QPoly], order: TermOrder) -> QPoly {
    let mut rest = f.clone();
    let mut out: BTreeMap<Vec<u16>, Rational> = BTreeMap::new();
    while let Some((m, c)) = rest.terms.first().cloned() {
        match basis.iter().find(|g| divides(&g.lead().0, &m)) {
            Some(g) => {
                let shift: Vec<u16> = m.iter().zip(&g.lead().0).map(|(a, b)| a - b).collect();
                let k = &c / &g.lead().1;
                rest = rest.sub_multiple(g, &k, &shift, order);
            }
            None => {
                out.insert(m, c);
                rest.terms.remove(0);
            }
        }
    }
    QPoly::from_map(out, order)
}

fn s_polynomial(f: &QPoly, g: &QPoly, order: TermOrder) -> QPoly {
    let l = lcm(&f.lead().0, &g.lead().0);
    let sf: Vec<u16> = l.iter().zip(&f.lead().0).map(|(a, b)| a - b).collect();
    let sg: Vec<u16> = l.iter().zip(&g.lead().0).map(|(a, b)| a - b).collect();
    let zero = QPoly { terms: Vec::new() };
    let a = zero.sub_multiple(f, &-f.lead().1.recip(), &sf, order);
    a.sub_multiple(g, &g.lead().1.recip(), &sg, order)
}

/// Reduced Groebner basis of `gens`, or `None` once more than `budget`
/// S-pairs have been reduced.
pub fn groebner_basis(gens: &[QPoly], order: TermOrder, budget: usize) -> Option<Vec<QPoly>> {
    let mut basis: Vec<QPoly> = Vec::new();
    for g in gens {
        let r = reduce(g, &basis, order);
        if !r.is_zero() {
            basis.push(r.monic());
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .collect();
    let mut spent = 0;
    while let Some((i, j)) = pairs.pop() {
        let (li, lj) = (&basis[i].lead().0, &basis[j].lead().0);
        if li.iter().zip(lj.iter()).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        spent += 1;
        if spent > budget {
            return None;
        }
        let r = reduce(&s_polynomial(&basis[i], &basis[j], order), &basis, order);
        if r.is_zero() {
            continue;
        }
        let r = r.monic();
        if r.is_constant() {
            return Some(vec![r]);
        }
        let n = basis.len();
        basis.push(r);
        pairs.extend((0..n).map(|i| (i, n)));
    }
    Some(interreduce(basis, order))
}

fn interreduce(basis: Vec<QPoly>, order: TermOrder) -> Vec<QPoly> {
    let mut minimal: Vec<QPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != i && divides(&h.lead().0, &g.lead().0) && (h.lead().0 != g.lead().0 || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<QPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        let head = QPoly {
            terms: vec![minimal[i].lead().clone()],
        };
        let tail = QPoly {
            terms: minimal[i].terms[1..].to_vec(),
        };
        let r = reduce(&tail, &others, order);
        let mut terms = head.terms;
        terms.extend(r.terms);
        out.push(QPoly { terms }.monic());
    }
    out.sort_by(|a, b| order.cmp(&a.lead().0, &b.lead().0));
    out
}

/// True when the ideal is the whole ring.
pub fn is_unit_ideal(basis: &[QPoly]) -> bool {
    basis
        .iter()
        .any(|g| g.is_constant() && !g.terms[0].1.is_zero())
        && !basis.is_empty()
}

pub fn constant_one(nvars: usize) -> QPoly {
    QPoly {
        terms: vec![(vec![0; nvars], Rational::one())],
    }
}
