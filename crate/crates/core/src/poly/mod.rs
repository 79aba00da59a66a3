//! Exact polynomials in `X_1..X_t, Y_1..Y_t` whose coefficients are
//! polynomials in the curve parameters `lambda^{(i)}_{j_1..j_t}` over `Q`.
//!
//! Everything is graded: `deg X_k = deg Y_k = a_k` and
//! `deg lambda^{(i)}_j = a_i d_{i-1}/d_i - psi(j)`. A [`Ring`] fixes the
//! sequence and the list of admissible parameters; polynomials built over
//! different rings cannot be mixed.

mod curvepoly;
mod lambda;
mod matrix;
mod text;

use std::sync::Arc;

use thiserror::Error;

use crate::semigroup::{compare_with, ExponentVector, TelescopicSequence};

pub use curvepoly::{CurvePoly, Monomial, Var, VarImage};
pub(crate) use lambda::rational_to_f64;
pub use lambda::{Homogeneity, LambdaMonomial, LambdaPoly};
pub use matrix::{determinant, PolyMatrix};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operands live over different rings")]
    RingMismatch,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("division by X{var}-Y{var} left a nonzero remainder")]
    InexactDivision { var: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A curve parameter `lambda^{(i)}_{j_1..j_t}`: equation index `i` (1-based,
/// `2..=t`) and exponent `j` in `B(A_t)` with `psi(j) < a_i d_{i-1}/d_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaKey {
    pub equation: usize,
    pub exponent: ExponentVector,
}

impl LambdaKey {
    /// `l{i}_{j1,...,jt}`.
    pub fn name(&self) -> String {
        format!("l{}_{}", self.equation, self.exponent.key())
    }

    /// Parse the JSON key form `i:j1,...,jt`.
    pub fn parse_colon(s: &str) -> Option<LambdaKey> {
        let (eq, exp) = s.split_once(':')?;
        Some(LambdaKey {
            equation: eq.trim().parse().ok()?,
            exponent: ExponentVector::parse_key(exp)?,
        })
    }

    pub fn colon_key(&self) -> String {
        format!("{}:{}", self.equation, self.exponent.key())
    }
}

/// The grading and parameter universe shared by every polynomial of one
/// curve family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    seq: TelescopicSequence,
    keys: Vec<LambdaKey>,
    key_weights: Vec<u32>,
}

impl Ring {
    /// Build the universe of all admissible parameters for `seq`, listed per
    /// equation in descending Miura order of their exponents.
    pub fn new(seq: TelescopicSequence) -> Arc<Ring> {
        let t = seq.len();
        let mut keys = Vec::new();
        let mut key_weights = Vec::new();
        for i in 1..t {
            let top = u64::from(seq.weights()[i]) * u64::from(seq.step(i));
            let mut exps = seq.basis_b(top - 1);
            exps.reverse();
            for e in exps {
                key_weights.push((top - seq.psi(&e)) as u32);
                keys.push(LambdaKey {
                    equation: i + 1,
                    exponent: e,
                });
            }
        }
        Arc::new(Ring {
            seq,
            keys,
            key_weights,
        })
    }

    pub fn sequence(&self) -> &TelescopicSequence {
        &self.seq
    }

    /// Number of variables of each kind (`t`).
    pub fn nvars(&self) -> usize {
        self.seq.len()
    }

    pub fn weights(&self) -> &[u32] {
        self.seq.weights()
    }

    pub fn lambda_keys(&self) -> &[LambdaKey] {
        &self.keys
    }

    pub fn lambda_weights(&self) -> &[u32] {
        &self.key_weights
    }

    pub fn lambda_count(&self) -> usize {
        self.keys.len()
    }

    pub fn lambda_index(&self, key: &LambdaKey) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }

    pub fn lambda_index_by_name(&self, name: &str) -> Option<usize> {
        self.keys.iter().position(|k| k.name() == name)
    }

    /// Weighted degree of a monomial in the `X, Y` variables.
    pub fn monomial_degree(&self, m: &Monomial) -> u64 {
        let t = self.nvars();
        let a = self.weights();
        (0..t)
            .map(|k| u64::from(a[k]) * (u64::from(m[k]) + u64::from(m[t + k])))
            .sum()
    }

    pub fn lambda_degree(&self, m: &LambdaMonomial) -> u64 {
        m.degree(&self.key_weights)
    }

    /// Print order on `X, Y` monomials: heavier first, then descending Miura
    /// order on the `X` block, then on the `Y` block.
    pub(crate) fn print_order(&self, m: &Monomial, n: &Monomial) -> std::cmp::Ordering {
        let t = self.nvars();
        let a = self.weights();
        let to32 = |s: &[u16]| s.iter().map(|&e| u32::from(e)).collect::<Vec<_>>();
        self.monomial_degree(n)
            .cmp(&self.monomial_degree(m))
            .then_with(|| compare_with(a, &to32(&n[..t]), &to32(&m[..t])))
            .then_with(|| compare_with(a, &to32(&n[t..]), &to32(&m[t..])))
    }
}
