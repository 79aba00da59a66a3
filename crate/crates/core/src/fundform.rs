//! The symmetric bilinear form
//!
//! ```text
//! w(x, y) = d_y Omega(x, y) + sum c_{i;j} x^i y^j / (det G_1(x) det G_1(y)) dx_1 dy_1
//! ```
//!
//! Over the common denominator `(x_1 - y_1)^2 det G_1(x) det G_1(y)` the
//! numerator of `d_y Omega` has coefficients `q_{i;j}` on the basis
//! `x^i y^j`, `i, j in B(A_t)`. Symmetry of `w` is a linear system for the
//! `c_{i;j}` whose right-hand sides are differences of `q`'s; it splits into
//! small blocks that are solved exactly here.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::curve::CanonicalEquations;
use crate::differentials::{divided_difference_matrix, DifferentialBasis};
use crate::poly::{CurvePoly, Homogeneity, LambdaPoly, Monomial, PolyError, Rational, Var};
use crate::semigroup::{ExponentVector, TelescopicSequence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FundformError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("symmetry system has no solution in block {block} (inconsistent right-hand side)")]
    Unsatisfiable { block: String },
}

pub type PairKey = (ExponentVector, ExponentVector);

fn pair_text(k: &PairKey) -> String {
    format!("{}|{}", k.0.key(), k.1.key())
}

/// `q_{i;j}`, nonzero entries only.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    pub entries: BTreeMap<PairKey, LambdaPoly>,
}

/// `c_{i;j}`, nonzero entries only, plus how the solution was chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct CTable {
    pub entries: BTreeMap<PairKey, LambdaPoly>,
    /// Every unknown of the system (those allowed by the degree clause).
    pub unknowns: Vec<PairKey>,
    /// Unknowns left free by the system and set to zero.
    pub free: Vec<PairKey>,
}

impl CTable {
    pub fn get(&self, i: &ExponentVector, j: &ExponentVector) -> LambdaPoly {
        self.entries.get(&(i.clone(), j.clone())).cloned().unwrap_or_default()
    }

    pub fn zeroed(&self) -> CTable {
        CTable { entries: BTreeMap::new(), unknowns: self.unknowns.clone(), free: self.unknowns.clone() }
    }
}

pub const PIVOT_RULE: &str = "per block, unknowns ordered by ascending (psi(i), psi(j), lex); \
     reduced row echelon form takes the earliest pivot column; free unknowns are set to zero";

/// `sum_k (-1)^{k+1} (x_1 - y_1) d(det H)/dY_k (x, y) det G_k(y) + det G_1(y) det H(x, y)`,
/// reduced to `B(A_t)` in both variable blocks.
pub fn d_omega_numerator(eqs: &CanonicalEquations) -> Result<CurvePoly, FundformError> {
    let ring = eqs.ring();
    let t = ring.nvars();
    let det_h = divided_difference_matrix(eqs)?.det_h;
    let minors_y: Vec<CurvePoly> = eqs.jacobian_minors().iter().map(CurvePoly::x_to_y).collect();
    let diff = &CurvePoly::var(ring, Var::X(0)) - &CurvePoly::var(ring, Var::Y(0));
    let mut acc = &minors_y[0] * &det_h;
    for (k, minor) in minors_y.iter().enumerate().take(t) {
        let d = det_h.partial_derivative(Var::Y(k));
        if d.is_zero() {
            continue;
        }
        let term = &(&diff * &d) * minor;
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    Ok(eqs.normal_form(&acc))
}

fn split(m: &Monomial, t: usize) -> PairKey {
    (
        ExponentVector(m[..t].iter().map(|&e| u32::from(e)).collect()),
        ExponentVector(m[t..].iter().map(|&e| u32::from(e)).collect()),
    )
}

fn join(i: &ExponentVector, j: &ExponentVector) -> Monomial {
    i.as_slice().iter().chain(j.as_slice()).map(|&e| e as u16).collect()
}

/// Coefficients of the reduced numerator of `d_y Omega`.
pub fn expand_q(eqs: &CanonicalEquations) -> Result<QTable, FundformError> {
    let t = eqs.ring().nvars();
    let n = d_omega_numerator(eqs)?;
    Ok(QTable { entries: n.terms().map(|(m, c)| (split(m, t), c.clone())).collect() })
}

/// `2 sum_{k>=2} (d_{k-1}/d_k - 1) a_k`, the total weight of the numerator.
pub fn numerator_weight(seq: &TelescopicSequence) -> i64 {
    2 * (1..seq.len()).map(|k| i64::from(seq.weights()[k]) * i64::from(seq.step(k) - 1)).sum::<i64>()
}

/// Weight every nonzero `q_{i;j}` must have.
pub fn q_degree(seq: &TelescopicSequence, i: &ExponentVector, j: &ExponentVector) -> i64 {
    numerator_weight(seq) - seq.psi(i) as i64 - seq.psi(j) as i64
}

/// `2 sum_{k>=2} (d_{k-1}/d_k) a_k - sum_k (i_k + j_k + 2) a_k`.
pub fn c_degree(seq: &TelescopicSequence, i: &ExponentVector, j: &ExponentVector) -> i64 {
    let a = seq.weights();
    let top: i64 = 2 * (1..seq.len()).map(|k| i64::from(a[k]) * i64::from(seq.step(k))).sum::<i64>();
    top - (0..seq.len()).map(|k| i64::from(a[k]) * i64::from(i.0[k] + j.0[k] + 2)).sum::<i64>()
}

/// The `c` unknowns: `i` with `psi(i) <= 2g - 2`, any `j`, nonnegative degree.
pub fn c_unknowns(seq: &TelescopicSequence) -> Vec<PairKey> {
    let g = u64::from(seq.genus());
    if g == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in seq.basis_b(2 * g - 2) {
        let rest = (4 * g - 2).saturating_sub(seq.psi(&i));
        for j in seq.basis_b(rest) {
            if c_degree(seq, &i, &j) >= 0 {
                out.push((i.clone(), j));
            }
        }
    }
    out
}

fn tail_key(i: &ExponentVector, j: &ExponentVector) -> (Vec<u32>, Vec<u32>) {
    let a = i.as_slice()[1..].to_vec();
    let b = j.as_slice()[1..].to_vec();
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

type BlockKey = (u32, (Vec<u32>, Vec<u32>));

fn order_key(seq: &TelescopicSequence, k: &PairKey) -> (u64, u64, PairKey) {
    (seq.psi(&k.0), seq.psi(&k.1), k.clone())
}

/// Solve the symmetry system block by block (see [`PIVOT_RULE`]).
pub fn solve_c(q: &QTable, seq: &TelescopicSequence) -> Result<CTable, FundformError> {
    let unknowns = c_unknowns(seq);
    let unknown_set: BTreeSet<PairKey> = unknowns.iter().cloned().collect();
    let q_at = |i: &ExponentVector, j: &ExponentVector| q.entries.get(&(i.clone(), j.clone())).cloned().unwrap_or_default();

    // equations indexed by unordered pairs {I, J}, I != J
    let mut eq_pairs: BTreeSet<PairKey> = BTreeSet::new();
    let mut add_pair = |a: ExponentVector, b: ExponentVector| {
        if a != b {
            eq_pairs.insert(if a < b { (a, b) } else { (b, a) });
        }
    };
    for (i, j) in q.entries.keys() {
        add_pair(i.clone(), j.clone());
    }
    for (i, j) in &unknowns {
        add_pair(i.shift_first(2).unwrap(), j.clone());
        add_pair(i.shift_first(1).unwrap(), j.shift_first(1).unwrap());
        add_pair(i.clone(), j.shift_first(2).unwrap());
    }

    // row: coefficients on unknowns, right-hand side
    type Row = (BTreeMap<PairKey, Rational>, LambdaPoly);
    let mut blocks: BTreeMap<BlockKey, Vec<Row>> = BTreeMap::new();
    for (big_i, big_j) in &eq_pairs {
        let s = big_i.0[0] + big_j.0[0];
        if s < 2 {
            let rhs = &q_at(big_j, big_i) - &q_at(big_i, big_j);
            if !rhs.is_zero() {
                return Err(FundformError::Unsatisfiable { block: format!("{}|{}", big_i.key(), big_j.key()) });
            }
            continue;
        }
        let mut coeffs: BTreeMap<PairKey, Rational> = BTreeMap::new();
        let mut put = |i: Option<ExponentVector>, j: Option<ExponentVector>, c: i64| {
            if let (Some(i), Some(j)) = (i, j) {
                let k = (i, j);
                if unknown_set.contains(&k) {
                    let e = coeffs.entry(k).or_insert_with(Rational::zero);
                    *e += Rational::from_integer(c.into());
                }
            }
        };
        for (a, b, sign) in [(big_i, big_j, 1i64), (big_j, big_i, -1)] {
            put(a.shift_first(-2), Some(b.clone()), sign);
            put(a.shift_first(-1), b.shift_first(-1), -2 * sign);
            put(Some(a.clone()), b.shift_first(-2), sign);
        }
        coeffs.retain(|_, c| !c.is_zero());
        let rhs = &q_at(big_j, big_i) - &q_at(big_i, big_j);
        if coeffs.is_empty() {
            if !rhs.is_zero() {
                return Err(FundformError::Unsatisfiable { block: format!("{}|{}", big_i.key(), big_j.key()) });
            }
            continue;
        }
        let key: BlockKey = (s - 2, tail_key(big_i, big_j));
        blocks.entry(key).or_default().push((coeffs, rhs));
    }

    let mut entries = BTreeMap::new();
    let mut pivoted: BTreeSet<PairKey> = BTreeSet::new();
    for (key, mut rows) in blocks {
        let mut cols: Vec<PairKey> = rows.iter().flat_map(|r| r.0.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        cols.sort_by_key(|k| order_key(seq, k));
        let mut rank = 0;
        let mut pivots: Vec<(PairKey, usize)> = Vec::new();
        for col in &cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].0.get(col).is_some_and(|c| !c.is_zero())) else {
                continue;
            };
            rows.swap(rank, p);
            let inv = rows[rank].0[col].recip();
            let (pc, pr) = {
                let row = &mut rows[rank];
                for v in row.0.values_mut() {
                    *v *= &inv;
                }
                row.1 = row.1.scale(&inv);
                row.0.retain(|_, c| !c.is_zero());
                (row.0.clone(), row.1.clone())
            };
            for (r, row) in rows.iter_mut().enumerate() {
                if r == rank {
                    continue;
                }
                let Some(f) = row.0.get(col).cloned() else { continue };
                for (k, v) in &pc {
                    let e = row.0.entry(k.clone()).or_insert_with(Rational::zero);
                    *e -= &f * v;
                }
                row.0.retain(|_, c| !c.is_zero());
                row.1.add_scaled(&pr, &-f);
            }
            pivots.push((col.clone(), rank));
            rank += 1;
        }
        for row in &rows[rank..] {
            if !row.1.is_zero() {
                return Err(FundformError::Unsatisfiable { block: format!("{}:{:?}", key.0, key.1) });
            }
        }
        // free columns are zero, so each pivot equals its right-hand side
        for (col, r) in pivots {
            pivoted.insert(col.clone());
            if !rows[r].1.is_zero() {
                entries.insert(col, rows[r].1.clone());
            }
        }
    }
    let free = unknowns.iter().filter(|k| !pivoted.contains(*k)).cloned().collect();
    Ok(CTable { entries, unknowns, free })
}

/// `P(x, y) = N(x, y) + (x_1 - y_1)^2 sum c_{i;j} x^i y^j`, the numerator of
/// `w(x, y)` over the symmetric denominator, in normal form.
pub fn symmetric_numerator(eqs: &CanonicalEquations, c: &CTable) -> Result<CurvePoly, FundformError> {
    let ring = eqs.ring();
    let mut cpart = CurvePoly::zero(ring);
    for ((i, j), v) in &c.entries {
        cpart.add_term(join(i, j), v);
    }
    let diff = &CurvePoly::var(ring, Var::X(0)) - &CurvePoly::var(ring, Var::Y(0));
    let n = d_omega_numerator(eqs)?;
    Ok(eqs.normal_form(&(&n + &(&(&diff * &diff) * &cpart))))
}

/// `P(x, y) - P(y, x)` after reduction; zero iff `w` is symmetric.
pub fn symmetry_residual(eqs: &CanonicalEquations, c: &CTable) -> Result<CurvePoly, FundformError> {
    let p = symmetric_numerator(eqs, c)?;
    Ok(eqs.normal_form(&(&p - &p.swap_xy())))
}

pub fn symmetry_check(eqs: &CanonicalEquations, c: &CTable) -> Result<bool, FundformError> {
    Ok(symmetry_residual(eqs, c)?.is_zero())
}

/// `dr_i = sum_j c_{k_i;j} y^j dy_1 / det G_1(y)`, one per `du_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondKindBasis {
    pub entries: Vec<Vec<(ExponentVector, LambdaPoly)>>,
}

impl SecondKindBasis {
    /// Pole order at infinity of each `dr_i`: `max psi(j) - (2g - 2)`.
    pub fn pole_orders(&self, seq: &TelescopicSequence) -> Vec<Option<i64>> {
        let top = 2 * i64::from(seq.genus()) - 2;
        self.entries
            .iter()
            .map(|terms| terms.iter().map(|(j, _)| seq.psi(j) as i64 - top).max())
            .collect()
    }
}

pub fn build_dr(c: &CTable, basis: &DifferentialBasis) -> SecondKindBasis {
    SecondKindBasis {
        entries: basis
            .exponents()
            .map(|k| {
                c.entries
                    .iter()
                    .filter(|((i, _), _)| i == k)
                    .map(|((_, j), v)| (j.clone(), v.clone()))
                    .collect()
            })
            .collect(),
    }
}

/// A violated clause found by [`audit_c`].
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeViolation {
    pub key: PairKey,
    pub expected: i64,
    pub found: Homogeneity,
}

/// Every nonzero `c_{i;j}` must be homogeneous of degree `c_degree(i, j)`,
/// and `c_{i;j} = 0` when that degree is negative.
pub fn audit_c(c: &CTable, seq: &TelescopicSequence, ring: &crate::poly::Ring) -> Vec<DegreeViolation> {
    c.entries
        .iter()
        .filter_map(|(k, v)| {
            let expected = c_degree(seq, &k.0, &k.1);
            let found = v.homogeneity(ring);
            let ok = expected >= 0 && found == Homogeneity::Homogeneous(expected as u64);
            (!ok).then(|| DegreeViolation { key: k.clone(), expected, found })
        })
        .collect()
}

/// Same audit for `q` against `q_degree`.
pub fn audit_q(q: &QTable, seq: &TelescopicSequence, ring: &crate::poly::Ring) -> Vec<DegreeViolation> {
    q.entries
        .iter()
        .filter_map(|(k, v)| {
            let expected = q_degree(seq, &k.0, &k.1);
            let found = v.homogeneity(ring);
            let ok = expected >= 0 && found == Homogeneity::Homogeneous(expected as u64);
            (!ok).then(|| DegreeViolation { key: k.clone(), expected, found })
        })
        .collect()
}

/// Everything the symmetrization produces for one curve.
#[derive(Debug, Clone)]
pub struct FundamentalForm {
    pub q: QTable,
    pub c: CTable,
    pub dr: SecondKindBasis,
}

pub fn compute(eqs: &CanonicalEquations, basis: &DifferentialBasis) -> Result<FundamentalForm, FundformError> {
    let q = expand_q(eqs)?;
    let c = solve_c(&q, eqs.ring().sequence())?;
    let dr = build_dr(&c, basis);
    Ok(FundamentalForm { q, c, dr })
}

fn table_json(t: &BTreeMap<PairKey, LambdaPoly>, ring: &crate::poly::Ring) -> Value {
    let mut m = Map::new();
    for (k, v) in t {
        m.insert(pair_text(k), Value::String(v.to_text(ring)));
    }
    Value::Object(m)
}

impl FundamentalForm {
    pub fn to_json(&self, eqs: &CanonicalEquations, basis: &DifferentialBasis) -> Value {
        let ring = eqs.ring();
        let dr: Vec<Value> = basis
            .exponents()
            .zip(&self.dr.entries)
            .map(|(k, terms)| {
                let mut m = Map::new();
                for (j, v) in terms {
                    m.insert(j.key(), Value::String(v.to_text(ring)));
                }
                json!({ "du": k.key(), "terms": m })
            })
            .collect();
        json!({
            "q": table_json(&self.q.entries, ring),
            "c": table_json(&self.c.entries, ring),
            "dr": dr,
            "metadata": {
                "pivot_rule": PIVOT_RULE,
                "unknowns": self.c.unknowns.len(),
                "free_set_to_zero": self.c.free.iter().map(pair_text).collect::<Vec<_>>(),
            }
        })
    }
}

/// Parse a `"i1,...|j1,..."` key.
pub fn parse_pair_key(s: &str) -> Option<PairKey> {
    let (a, b) = s.split_once('|')?;
    Some((ExponentVector::parse_key(a)?, ExponentVector::parse_key(b)?))
}
