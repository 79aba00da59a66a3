use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::{Rational, Ring};

/// A power product of curve parameters, stored sparsely as sorted
/// `(parameter index, exponent)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaMonomial(SmallVec<[(u16, u16); 4]>);

impl LambdaMonomial {
    pub fn one() -> Self {
        LambdaMonomial(SmallVec::new())
    }

    pub fn generator(index: usize) -> Self {
        let mut v = SmallVec::new();
        v.push((index as u16, 1));
        LambdaMonomial(v)
    }

    pub fn from_pairs(mut pairs: Vec<(u16, u16)>) -> Self {
        pairs.retain(|p| p.1 > 0);
        pairs.sort_unstable();
        let mut out: SmallVec<[(u16, u16); 4]> = SmallVec::new();
        for (i, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += e,
                _ => out.push((i, e)),
            }
        }
        LambdaMonomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(u16, u16)] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u16 {
        self.0
            .iter()
            .find(|p| usize::from(p.0) == index)
            .map_or(0, |p| p.1)
    }

    pub fn degree(&self, weights: &[u32]) -> u64 {
        self.0
            .iter()
            .map(|&(i, e)| u64::from(weights[usize::from(i)]) * u64::from(e))
            .sum()
    }

    pub fn mul(&self, other: &LambdaMonomial) -> LambdaMonomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LambdaMonomial(out)
    }
}

/// Degree profile of a graded polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Homogeneous(u64),
    Mixed { min: u64, max: u64 },
}

/// A polynomial in the curve parameters with rational coefficients. No zero
/// coefficients are ever stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LambdaPoly {
    terms: BTreeMap<LambdaMonomial, Rational>,
}

impl LambdaPoly {
    pub fn zero() -> Self {
        LambdaPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(LambdaMonomial::one(), c);
        p
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn generator(index: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(LambdaMonomial::generator(index), Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when the polynomial has no parameter dependence.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&LambdaMonomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LambdaMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: LambdaMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &LambdaPoly, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, k) in &other.terms {
            self.add_term(m.clone(), k * c);
        }
    }

    /// `self += a * b`.
    pub fn add_product(&mut self, a: &LambdaPoly, b: &LambdaPoly) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb), ca * cb);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> LambdaPoly {
        if c.is_zero() {
            return LambdaPoly::zero();
        }
        LambdaPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn homogeneity(&self, ring: &Ring) -> Homogeneity {
        let mut it = self.terms.keys().map(|m| m.degree(ring.lambda_weights()));
        let Some(first) = it.next() else {
            return Homogeneity::Zero;
        };
        let (min, max) = it.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d)));
        if min == max {
            Homogeneity::Homogeneous(min)
        } else {
            Homogeneity::Mixed { min, max }
        }
    }

    /// Replace every parameter with a `Some` value; others stay symbolic.
    pub fn substitute(&self, values: &[Option<Rational>]) -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut kept = Vec::new();
            for &(i, e) in m.pairs() {
                match values.get(usize::from(i)).and_then(|v| v.as_ref()) {
                    Some(v) => coeff *= num_traits::pow(v.clone(), usize::from(e)),
                    None => kept.push((i, e)),
                }
            }
            out.add_term(LambdaMonomial::from_pairs(kept), coeff);
        }
        out
    }

    /// Numeric value of a parameter-free polynomial.
    pub fn to_f64(&self) -> Option<f64> {
        self.as_constant().map(|c| rational_to_f64(&c))
    }

    pub fn abs_max_coefficient(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

pub(crate) fn rational_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl AddAssign<&LambdaPoly> for LambdaPoly {
    fn add_assign(&mut self, rhs: &LambdaPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&LambdaPoly> for LambdaPoly {
    fn sub_assign(&mut self, rhs: &LambdaPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        out.add_product(self, rhs);
        out
    }
}
