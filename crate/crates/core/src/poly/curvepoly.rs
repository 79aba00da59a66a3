use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use smallvec::{smallvec, SmallVec};

use super::lambda::Homogeneity;
use super::{LambdaPoly, PolyError, Rational, Ring};

/// Exponents of `X_1..X_t` followed by `Y_1..Y_t`.
pub type Monomial = SmallVec<[u16; 8]>;

/// A variable, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X(usize),
    Y(usize),
}

impl Var {
    fn slot(self, t: usize) -> usize {
        match self {
            Var::X(k) => k,
            Var::Y(k) => t + k,
        }
    }
}

/// Image of a variable under [`CurvePoly::substitute`].
#[derive(Debug, Clone, PartialEq)]
pub enum VarImage {
    Keep,
    Var(Var),
    Value(Rational),
}

/// A polynomial in `X, Y` with [`LambdaPoly`] coefficients, in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct CurvePoly {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, LambdaPoly>,
}

impl std::fmt::Debug for CurvePoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CurvePoly({})", self.to_text())
    }
}

impl CurvePoly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        CurvePoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, LambdaPoly::one())
    }

    pub fn constant(ring: &Arc<Ring>, c: LambdaPoly) -> Self {
        let mut p = Self::zero(ring);
        p.add_term(ring_unit(ring), &c);
        p
    }

    pub fn from_int(ring: &Arc<Ring>, c: i64) -> Self {
        Self::constant(ring, LambdaPoly::from_int(c))
    }

    pub fn var(ring: &Arc<Ring>, v: Var) -> Self {
        let mut m = ring_unit(ring);
        m[v.slot(ring.nvars())] = 1;
        let mut p = Self::zero(ring);
        p.add_term(m, &LambdaPoly::one());
        p
    }

    /// `coeff * X^x * Y^y`.
    pub fn term(ring: &Arc<Ring>, x: &[u32], y: &[u32], coeff: LambdaPoly) -> Self {
        let t = ring.nvars();
        let mut m = ring_unit(ring);
        for k in 0..t {
            m[k] = x.get(k).copied().unwrap_or(0) as u16;
            m[t + k] = y.get(k).copied().unwrap_or(0) as u16;
        }
        let mut p = Self::zero(ring);
        p.add_term(m, &coeff);
        p
    }

    pub fn from_terms(
        ring: &Arc<Ring>,
        terms: impl IntoIterator<Item = (Monomial, LambdaPoly)>,
    ) -> Self {
        let mut p = Self::zero(ring);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &LambdaPoly)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, LambdaPoly> {
        self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&LambdaPoly> {
        self.terms.get(m)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no `Y` variable occurs.
    pub fn is_x_only(&self) -> bool {
        let t = self.ring.nvars();
        self.terms.keys().all(|m| m[t..].iter().all(|&e| e == 0))
    }

    pub fn add_term(&mut self, m: Monomial, c: &LambdaPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other * mono` without building intermediates.
    pub fn add_scaled_shifted(&mut self, other: &CurvePoly, c: &LambdaPoly, mono: &Monomial) {
        for (m, k) in &other.terms {
            let shifted: Monomial = m.iter().zip(mono).map(|(a, b)| a + b).collect();
            let prod = c * k;
            self.add_term(shifted, &prod);
        }
    }

    fn same_ring(&self, other: &CurvePoly) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn checked_add(&self, other: &CurvePoly) -> Result<CurvePoly, PolyError> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &CurvePoly) -> Result<CurvePoly, PolyError> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &CurvePoly) -> Result<CurvePoly, PolyError> {
        self.same_ring(other)?;
        let mut acc: BTreeMap<Monomial, LambdaPoly> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                acc.entry(m).or_default().add_product(ca, cb);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(CurvePoly {
            ring: self.ring.clone(),
            terms: acc,
        })
    }

    pub fn mul_lambda(&self, c: &LambdaPoly) -> CurvePoly {
        let mut out = CurvePoly::zero(&self.ring);
        for (m, k) in &self.terms {
            out.add_term(m.clone(), &(k * c));
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> CurvePoly {
        if c.is_zero() {
            return CurvePoly::zero(&self.ring);
        }
        CurvePoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.scale(c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> CurvePoly {
        let mut out = CurvePoly::one(&self.ring);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn partial_derivative(&self, v: Var) -> CurvePoly {
        let slot = v.slot(self.ring.nvars());
        let mut out = CurvePoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m[slot];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm[slot] -= 1;
            out.add_term(dm, &c.scale(&Rational::from_integer(i64::from(e).into())));
        }
        out
    }

    /// Ring homomorphism sending each of the `2t` variables to its image.
    pub fn substitute(&self, images: &[VarImage]) -> CurvePoly {
        let t = self.ring.nvars();
        assert_eq!(images.len(), 2 * t, "one image per variable");
        let mut out = CurvePoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut nm = ring_unit(&self.ring);
            let mut scale = Rational::one();
            for (slot, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &images[slot] {
                    VarImage::Keep => nm[slot] += e,
                    VarImage::Var(v) => nm[v.slot(t)] += e,
                    VarImage::Value(q) => scale *= num_traits::pow(q.clone(), usize::from(e)),
                }
            }
            out.add_term(nm, &c.scale(&scale));
        }
        out
    }

    /// Exchange `X_k <-> Y_k` for every `k`.
    pub fn swap_xy(&self) -> CurvePoly {
        let t = self.ring.nvars();
        let images: Vec<VarImage> = (0..t)
            .map(|k| VarImage::Var(Var::Y(k)))
            .chain((0..t).map(|k| VarImage::Var(Var::X(k))))
            .collect();
        self.substitute(&images)
    }

    /// Rename `X_k -> Y_k` (the polynomial must not already contain `Y`).
    pub fn x_to_y(&self) -> CurvePoly {
        let t = self.ring.nvars();
        let images: Vec<VarImage> = (0..t)
            .map(|k| VarImage::Var(Var::Y(k)))
            .chain((0..t).map(|_| VarImage::Keep))
            .collect();
        self.substitute(&images)
    }

    /// Apply `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&LambdaPoly) -> LambdaPoly) -> CurvePoly {
        let mut out = CurvePoly::zero(&self.ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    /// Substitute concrete values for some parameters.
    pub fn substitute_lambda(&self, values: &[Option<Rational>]) -> CurvePoly {
        self.map_coefficients(|c| c.substitute(values))
    }

    /// Largest total weight (variables plus parameters) over all terms, and
    /// whether every term has that weight. `None` for the zero polynomial.
    pub fn weighted_degree(&self) -> (Option<u64>, bool) {
        let mut degrees = self.terms.iter().flat_map(|(m, c)| {
            let base = self.ring.monomial_degree(m);
            c.terms()
                .map(move |(lm, _)| base + lm.degree(self.ring.lambda_weights()))
                .collect::<Vec<_>>()
        });
        let Some(first) = degrees.next() else {
            return (None, true);
        };
        let (lo, hi) = degrees.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d)));
        (Some(hi), lo == hi)
    }

    pub fn homogeneity(&self) -> Homogeneity {
        match self.weighted_degree() {
            (None, _) => Homogeneity::Zero,
            (Some(d), true) => Homogeneity::Homogeneous(d),
            (Some(max), false) => {
                let min = self
                    .terms
                    .iter()
                    .flat_map(|(m, c)| {
                        let base = self.ring.monomial_degree(m);
                        c.terms()
                            .map(move |(lm, _)| base + lm.degree(self.ring.lambda_weights()))
                            .collect::<Vec<_>>()
                    })
                    .min()
                    .unwrap_or(0);
                Homogeneity::Mixed { min, max }
            }
        }
    }

    /// Exact quotient by `X_j - Y_j` (0-based `j`), by synthetic division in
    /// `X_j` with root `Y_j`.
    pub fn div_x_minus_y(&self, j: usize) -> Result<CurvePoly, PolyError> {
        let t = self.ring.nvars();
        let mut by_power: BTreeMap<u16, CurvePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let k = rest[j];
            rest[j] = 0;
            by_power
                .entry(k)
                .or_insert_with(|| CurvePoly::zero(&self.ring))
                .add_term(rest, c);
        }
        let Some(&top) = by_power.keys().next_back() else {
            return Ok(CurvePoly::zero(&self.ring));
        };
        let mut y_shift = ring_unit(&self.ring);
        y_shift[t + j] = 1;
        let unit = LambdaPoly::one();
        let mut quotient = CurvePoly::zero(&self.ring);
        // b_{k-1} = c_k + Y_j b_k
        let mut b = CurvePoly::zero(&self.ring);
        for k in (0..=top).rev() {
            let mut next = by_power
                .remove(&k)
                .unwrap_or_else(|| CurvePoly::zero(&self.ring));
            next.add_scaled_shifted(&b, &unit, &y_shift);
            if k == 0 {
                if !next.is_zero() {
                    return Err(PolyError::InexactDivision { var: j + 1 });
                }
                break;
            }
            let mut xk = ring_unit(&self.ring);
            xk[j] = k - 1;
            quotient.add_scaled_shifted(&next, &unit, &xk);
            b = next;
        }
        Ok(quotient)
    }
}

pub(crate) fn ring_unit(ring: &Ring) -> Monomial {
    smallvec![0; 2 * ring.nvars()]
}

impl Add for &CurvePoly {
    type Output = CurvePoly;
    fn add(self, rhs: &CurvePoly) -> CurvePoly {
        self.checked_add(rhs).expect("ring mismatch in addition")
    }
}

impl Sub for &CurvePoly {
    type Output = CurvePoly;
    fn sub(self, rhs: &CurvePoly) -> CurvePoly {
        self.checked_sub(rhs).expect("ring mismatch in subtraction")
    }
}

impl Mul for &CurvePoly {
    type Output = CurvePoly;
    fn mul(self, rhs: &CurvePoly) -> CurvePoly {
        self.checked_mul(rhs)
            .expect("ring mismatch in multiplication")
    }
}

impl Neg for &CurvePoly {
    type Output = CurvePoly;
    fn neg(self) -> CurvePoly {
        CurvePoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::check_telescopic;

    fn ring(a: &[u32]) -> Arc<Ring> {
        Ring::new(check_telescopic(a).unwrap())
    }

    #[test]
    fn cancellation_and_derivative() {
        let r = ring(&[2, 3]);
        let x1 = CurvePoly::var(&r, Var::X(0));
        let x2 = CurvePoly::var(&r, Var::X(1));
        let f = &x2.pow(2) - &x1.pow(3);
        assert_eq!(&f + &x1.pow(3), x2.pow(2));
        assert_eq!(
            f.partial_derivative(Var::X(1)),
            x2.scale(&Rational::from_integer(2.into()))
        );
    }

    #[test]
    fn swap_is_an_involution() {
        let r = ring(&[4, 6, 5]);
        let x1 = CurvePoly::var(&r, Var::X(0));
        let y3 = CurvePoly::var(&r, Var::Y(2));
        let p = &(&x1 * &y3) + &x1.pow(2).mul_lambda(&LambdaPoly::generator(3));
        assert_ne!(p.swap_xy(), p);
        assert_eq!(p.swap_xy().swap_xy(), p);
    }

    #[test]
    fn degrees() {
        let r = ring(&[2, 3]);
        let x2 = CurvePoly::var(&r, Var::X(1));
        assert_eq!(x2.pow(2).weighted_degree(), (Some(6), true));
        assert_eq!(CurvePoly::zero(&r).weighted_degree(), (None, true));
        let mixed = &x2 + &CurvePoly::one(&r);
        assert_eq!(mixed.homogeneity(), Homogeneity::Mixed { min: 0, max: 3 });
    }

    #[test]
    fn divided_difference_of_square() {
        let r = ring(&[2, 3]);
        let x2 = CurvePoly::var(&r, Var::X(1));
        let y2 = CurvePoly::var(&r, Var::Y(1));
        let num = &x2.pow(2) - &y2.pow(2);
        assert_eq!(num.div_x_minus_y(1).unwrap(), &x2 + &y2);
        let bad = &x2.pow(2) + &y2;
        assert_eq!(
            bad.div_x_minus_y(1),
            Err(PolyError::InexactDivision { var: 2 })
        );
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = CurvePoly::one(&ring(&[2, 3]));
        let b = CurvePoly::one(&ring(&[2, 5]));
        assert_eq!(a.checked_add(&b), Err(PolyError::RingMismatch));
        assert_eq!(a.checked_mul(&b), Err(PolyError::RingMismatch));
    }
}
