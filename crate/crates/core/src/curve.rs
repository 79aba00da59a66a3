//! Miura canonical equations of a telescopic curve, reduction to the monomial
//! basis `B(A_t)`, the pole order at infinity and an exact singularity test.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use serde_json::{Map, Value};
use smallvec::SmallVec;
use thiserror::Error;

use crate::groebner::{self, QPoly, TermOrder};
use crate::numeric::poly_roots;
use crate::poly::{
    determinant, CurvePoly, LambdaKey, LambdaPoly, Monomial, PolyError, PolyMatrix, Rational, Ring,
    Var,
};
use crate::semigroup::{check_telescopic, ExponentVector, SemigroupError, TelescopicSequence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("malformed curve spec at line {line}, column {column}: {msg}")]
    Json {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("invalid curve spec at `{path}`: {msg}")]
    Spec { path: String, msg: String },
    #[error("parameter {0} is not admissible for this sequence")]
    Inadmissible(String),
    #[error("parameter {0} is symbolic but a concrete value is required")]
    Symbolic(String),
    #[error("expected a polynomial in X only")]
    NotXOnly,
}

/// What an omitted parameter means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DefaultLambda {
    Zero,
    #[default]
    Symbolic,
}

impl FromStr for DefaultLambda {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "zero" => Ok(DefaultLambda::Zero),
            "symbolic" => Ok(DefaultLambda::Symbolic),
            other => Err(format!("expected \"zero\" or \"symbolic\", got {other:?}")),
        }
    }
}

/// A sequence together with values for some (or all) curve parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    ring: Arc<Ring>,
    values: Vec<Option<Rational>>,
}

impl CurveSpec {
    /// Every parameter symbolic.
    pub fn symbolic(seq: TelescopicSequence) -> CurveSpec {
        let ring = Ring::new(seq);
        let n = ring.lambda_count();
        CurveSpec {
            ring,
            values: vec![None; n],
        }
    }

    pub fn with_values(
        seq: TelescopicSequence,
        values: &BTreeMap<LambdaKey, Rational>,
        default: DefaultLambda,
    ) -> Result<CurveSpec, CurveError> {
        let ring = Ring::new(seq);
        let fill = match default {
            DefaultLambda::Zero => Some(Rational::zero()),
            DefaultLambda::Symbolic => None,
        };
        let mut out = vec![fill; ring.lambda_count()];
        for (k, v) in values {
            let idx = ring
                .lambda_index(k)
                .ok_or_else(|| CurveError::Inadmissible(k.name()))?;
            out[idx] = Some(v.clone());
        }
        Ok(CurveSpec { ring, values: out })
    }

    /// Parse `{"sequence": [...], "lambda": {"i:j1,...,jt": "p/q"}, "default_lambda": ...}`.
    pub fn from_json(text: &str) -> Result<CurveSpec, CurveError> {
        let v: Value = serde_json::from_str(text).map_err(|e| CurveError::Json {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        let spec_err = |path: &str, msg: &str| CurveError::Spec {
            path: path.to_string(),
            msg: msg.to_string(),
        };
        let obj = v
            .as_object()
            .ok_or_else(|| spec_err("$", "expected an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "sequence" | "lambda" | "default_lambda") {
                return Err(spec_err(key, "unknown field"));
            }
        }
        let seq_v = obj
            .get("sequence")
            .ok_or_else(|| spec_err("sequence", "missing field"))?;
        let seq: Vec<u32> = seq_v
            .as_array()
            .ok_or_else(|| spec_err("sequence", "expected an array of positive integers"))?
            .iter()
            .enumerate()
            .map(|(i, x)| {
                x.as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| {
                        spec_err(&format!("sequence[{i}]"), "expected a positive integer")
                    })
            })
            .collect::<Result<_, _>>()?;
        let seq = check_telescopic(&seq)?;
        let default = match obj.get("default_lambda") {
            None => DefaultLambda::Symbolic,
            Some(Value::String(s)) => s
                .parse()
                .map_err(|m: String| spec_err("default_lambda", &m))?,
            Some(_) => return Err(spec_err("default_lambda", "expected a string")),
        };
        let empty = Map::new();
        let lambda = match obj.get("lambda") {
            None => &empty,
            Some(Value::Object(m)) => m,
            Some(_) => return Err(spec_err("lambda", "expected an object")),
        };
        let mut values = BTreeMap::new();
        for (k, val) in lambda {
            let path = format!("lambda.{k}");
            let key = LambdaKey::parse_colon(k)
                .ok_or_else(|| spec_err(&path, "expected a key of the form i:j1,...,jt"))?;
            if key.exponent.len() != seq.len() {
                return Err(spec_err(
                    &path,
                    "exponent length differs from the sequence length",
                ));
            }
            let q = match val {
                Value::String(s) => Rational::from_str(s.trim())
                    .map_err(|_| spec_err(&path, "expected a rational p/q"))?,
                Value::Number(n) => match n.as_i64() {
                    Some(i) => Rational::from_integer(i.into()),
                    None => {
                        return Err(spec_err(
                            &path,
                            "non-integer numbers must be given as \"p/q\" strings",
                        ))
                    }
                },
                _ => return Err(spec_err(&path, "expected a rational p/q")),
            };
            values.insert(key, q);
        }
        CurveSpec::with_values(seq, &values, default)
    }

    pub fn to_json(&self) -> Value {
        let mut lambda = Map::new();
        for (k, v) in self.ring.lambda_keys().iter().zip(&self.values) {
            if let Some(q) = v {
                lambda.insert(k.colon_key(), Value::String(q.to_string()));
            }
        }
        serde_json::json!({
            "sequence": self.ring.weights(),
            "lambda": lambda,
            "default_lambda": "symbolic",
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn sequence(&self) -> &TelescopicSequence {
        self.ring.sequence()
    }

    /// Values aligned with [`Ring::lambda_keys`].
    pub fn values(&self) -> &[Option<Rational>] {
        &self.values
    }

    pub fn value(&self, key: &LambdaKey) -> Option<&Rational> {
        self.ring
            .lambda_index(key)
            .and_then(|i| self.values[i].as_ref())
    }

    pub fn is_concrete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// Value of the parameter with the given index, as an `f64`.
    pub fn value_f64(&self, index: usize) -> Result<f64, CurveError> {
        self.values[index]
            .as_ref()
            .map(crate::poly::rational_to_f64)
            .ok_or_else(|| CurveError::Symbolic(self.ring.lambda_keys()[index].name()))
    }
}

/// Per-equation rewrite data: `X_i^{s_i} -> tail_i = X_i^{s_i} - F_i`, the
/// tail stored on the `t` exponents of one variable block.
#[derive(Debug, Clone)]
struct Rule {
    var: usize,
    power: u16,
    tail: Vec<(SmallVec<[u16; 4]>, LambdaPoly)>,
}

/// `F_2, ..., F_t` of a curve spec, with the data needed to rewrite modulo
/// them.
#[derive(Debug, Clone)]
pub struct CanonicalEquations {
    spec: CurveSpec,
    polys: Vec<CurvePoly>,
    rules: Vec<Rule>,
}

/// `F_i = X_i^{d_{i-1}/d_i} - X^{M(a_i d_{i-1}/d_i)} - sum lambda X^j` for
/// `i = 2..t`, with known parameter values substituted.
pub fn build_equations(spec: &CurveSpec) -> CanonicalEquations {
    let ring = spec.ring();
    let seq = ring.sequence();
    let t = seq.len();
    let mut polys = Vec::new();
    let mut rules = Vec::new();
    for i in 1..t {
        let s = seq.step(i);
        let top = u64::from(seq.weights()[i]) * u64::from(s);
        let lead = ExponentVector::unit(t, i, s);
        let second = seq
            .min_representative(top)
            .expect("a_i d_{i-1}/d_i lies in the semigroup");
        let zeros = vec![0u32; t];
        let mut f = CurvePoly::term(ring, lead.as_slice(), &zeros, LambdaPoly::one());
        f.add_term(x_monomial(t, second.as_slice()), &LambdaPoly::from_int(-1));
        for (idx, key) in ring.lambda_keys().iter().enumerate() {
            if key.equation != i + 1 {
                continue;
            }
            let coeff = match &spec.values()[idx] {
                Some(v) => LambdaPoly::constant(-v.clone()),
                None => -&LambdaPoly::generator(idx),
            };
            f.add_term(x_monomial(t, key.exponent.as_slice()), &coeff);
        }
        let tail = f
            .terms()
            .filter(|(m, _)| m[..t] != *lead_u16(&lead).as_slice())
            .map(|(m, c)| (m[..t].iter().copied().collect(), -c))
            .collect();
        rules.push(Rule {
            var: i,
            power: s as u16,
            tail,
        });
        polys.push(f);
    }
    CanonicalEquations {
        spec: spec.clone(),
        polys,
        rules,
    }
}

fn lead_u16(e: &ExponentVector) -> SmallVec<[u16; 4]> {
    e.as_slice().iter().map(|&x| x as u16).collect()
}

fn x_monomial(t: usize, x: &[u32]) -> Monomial {
    let mut m: Monomial = SmallVec::from_elem(0, 2 * t);
    for (k, &e) in x.iter().enumerate() {
        m[k] = e as u16;
    }
    m
}

/// Outcome of [`CanonicalEquations::check_nonsingular`].
#[derive(Debug, Clone, PartialEq)]
pub enum Nonsingularity {
    Nonsingular,
    /// A common zero of the equations and all maximal minors exists; the
    /// witness is a numerically located such point when one was found.
    Singular {
        witness: Option<Vec<Complex64>>,
    },
    Inconclusive {
        reason: String,
    },
}

impl CanonicalEquations {
    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.spec.ring()
    }

    /// `F_2, ..., F_t`.
    pub fn equations(&self) -> &[CurvePoly] {
        &self.polys
    }

    /// Leading exponent `(d_{i-1}/d_i) e_i` of each `F_i`.
    pub fn leading_exponents(&self) -> Vec<ExponentVector> {
        self.ring().sequence().generators_v()
    }

    /// The `(t-1) x t` Jacobian `G = (dF_i/dX_j)`.
    pub fn jacobian(&self) -> PolyMatrix {
        let t = self.ring().nvars();
        PolyMatrix::new(
            self.polys
                .iter()
                .map(|f| (0..t).map(|j| f.partial_derivative(Var::X(j))).collect())
                .collect(),
        )
    }

    /// `det G_k` for `k = 1..t` (index `k-1`), `G_k` being `G` without column `k`.
    pub fn jacobian_minors(&self) -> Vec<CurvePoly> {
        let g = self.jacobian();
        let t = self.ring().nvars();
        (0..t)
            .map(|k| {
                determinant(&g.without_column(k), self.ring())
                    .expect("minor of a (t-1) x t matrix is square")
            })
            .collect()
    }

    pub fn det_g1(&self) -> CurvePoly {
        let g = self.jacobian();
        determinant(&g.without_column(0), self.ring()).expect("square")
    }

    /// Rules (0-based equation index) whose leading monomial divides the
    /// `X` block of `m`.
    pub fn reducible_rules(&self, m: &Monomial) -> Vec<usize> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| m[r.var] >= r.power)
            .map(|(i, _)| i)
            .collect()
    }

    /// One rewrite `X^{Z + V_i} -> X^Z tail_i` applied to the term of `p`
    /// at monomial `m` (in the `X` block).
    pub fn rewrite_step(&self, p: &CurvePoly, m: &Monomial, rule: usize) -> CurvePoly {
        let r = &self.rules[rule];
        let Some(c) = p.coefficient(m).cloned() else {
            return p.clone();
        };
        let mut out = p.clone();
        out.add_term(m.clone(), &-&c);
        let mut base = m.clone();
        base[r.var] -= r.power;
        for (tm, tc) in &r.tail {
            let mut nm = base.clone();
            for (k, e) in tm.iter().enumerate() {
                nm[k] += e;
            }
            out.add_term(nm, &(&c * tc));
        }
        out
    }

    /// Normal form on `B(A_t)` in both the `X` and the `Y` block, always
    /// rewriting the largest reducible monomial first.
    pub fn normal_form(&self, p: &CurvePoly) -> CurvePoly {
        let t = self.ring().nvars();
        let x = self.reduce_block(p, 0);
        if x.terms().all(|(m, _)| m[t..].iter().all(|&e| e == 0)) {
            return x;
        }
        self.reduce_block(&x, t)
    }

    fn reduce_block(&self, p: &CurvePoly, off: usize) -> CurvePoly {
        let ring = self.ring();
        let t = ring.nvars();
        let a = ring.weights();
        type Key = (u64, Reverse<SmallVec<[u16; 4]>>, SmallVec<[u16; 4]>);
        let split = |m: &Monomial| -> Key {
            let block: SmallVec<[u16; 4]> = m[off..off + t].iter().copied().collect();
            let other: SmallVec<[u16; 4]> = m[..off].iter().chain(&m[off + t..]).copied().collect();
            let w = block
                .iter()
                .zip(a)
                .map(|(e, w)| u64::from(*e) * u64::from(*w))
                .sum();
            (w, Reverse(block), other)
        };
        let join = |block: &[u16], other: &[u16]| -> Monomial {
            let mut m: Monomial = SmallVec::with_capacity(2 * t);
            m.extend_from_slice(&other[..off]);
            m.extend_from_slice(block);
            m.extend_from_slice(&other[off..]);
            m
        };
        let mut work: BTreeMap<Key, LambdaPoly> = BTreeMap::new();
        let push = |work: &mut BTreeMap<Key, LambdaPoly>, k: Key, c: LambdaPoly| {
            let e = work.entry(k).or_default();
            *e += &c;
        };
        for (m, c) in p.terms() {
            push(&mut work, split(m), c.clone());
        }
        let mut out = CurvePoly::zero(ring);
        while let Some((key, c)) = work.pop_last() {
            if c.is_zero() {
                continue;
            }
            let block = &key.1 .0;
            match self.rules.iter().find(|r| block[r.var] >= r.power) {
                None => out.add_term(join(block, &key.2), &c),
                Some(r) => {
                    let mut base = block.clone();
                    base[r.var] -= r.power;
                    for (tm, tc) in &r.tail {
                        let nb: SmallVec<[u16; 4]> =
                            base.iter().zip(tm).map(|(x, y)| x + y).collect();
                        let w = nb
                            .iter()
                            .zip(a)
                            .map(|(e, w)| u64::from(*e) * u64::from(*w))
                            .sum();
                        push(&mut work, (w, Reverse(nb), key.2.clone()), &c * tc);
                    }
                }
            }
        }
        out
    }

    /// `o(p)`: the largest weight in the support of the normal form of an
    /// `X`-only polynomial; `None` stands for minus infinity (`p = 0`).
    pub fn order_at_infinity(&self, p: &CurvePoly) -> Result<Option<u64>, CurveError> {
        if !p.is_x_only() {
            return Err(CurveError::NotXOnly);
        }
        let nf = self.normal_form(p);
        let t = self.ring().nvars();
        let a = self.ring().weights();
        Ok(nf
            .terms()
            .map(|(m, _)| (0..t).map(|k| u64::from(a[k]) * u64::from(m[k])).sum())
            .max())
    }

    /// `v_inf(p) = -o(p)`; `None` for `p = 0`.
    pub fn v_inf(&self, p: &CurvePoly) -> Result<Option<i64>, CurveError> {
        Ok(self.order_at_infinity(p)?.map(|o| -(o as i64)))
    }

    fn to_qpoly(&self, p: &CurvePoly, order: TermOrder) -> Result<QPoly, CurveError> {
        let t = self.ring().nvars();
        let mut map = BTreeMap::new();
        for (m, c) in p.terms() {
            let q = c.as_constant().ok_or_else(|| {
                let idx = c
                    .terms()
                    .find_map(|(lm, _)| lm.pairs().first().map(|p| usize::from(p.0)))
                    .unwrap_or(0);
                CurveError::Symbolic(self.ring().lambda_keys()[idx].name())
            })?;
            map.insert(m[..t].to_vec(), q);
        }
        Ok(QPoly::from_map(map, order))
    }

    /// Decide whether `F_2 = ... = F_t = 0` together with every maximal minor
    /// of `G` has a common affine zero. Exact: the ideal they generate is the
    /// unit ideal iff its reduced Groebner basis is `{1}`.
    pub fn check_nonsingular(&self) -> Result<Nonsingularity, CurveError> {
        self.check_nonsingular_with_budget(20_000)
    }

    pub fn check_nonsingular_with_budget(
        &self,
        budget: usize,
    ) -> Result<Nonsingularity, CurveError> {
        if let Some(i) = self.spec.values().iter().position(Option::is_none) {
            return Err(CurveError::Symbolic(self.ring().lambda_keys()[i].name()));
        }
        let gens_of = |order| -> Result<Vec<QPoly>, CurveError> {
            self.polys
                .iter()
                .chain(self.jacobian_minors().iter())
                .map(|p| self.to_qpoly(p, order))
                .collect()
        };
        let gens = gens_of(TermOrder::GrevLex)?;
        let Some(gb) = groebner::groebner_basis(&gens, TermOrder::GrevLex, budget) else {
            return Ok(Nonsingularity::Inconclusive {
                reason: format!("S-pair budget {budget} exceeded"),
            });
        };
        if groebner::is_unit_ideal(&gb) {
            return Ok(Nonsingularity::Nonsingular);
        }
        let lex_gens = gens_of(TermOrder::Lex)?;
        let witness = groebner::groebner_basis(&lex_gens, TermOrder::Lex, budget)
            .and_then(|lex| triangular_point(&lex, &lex_gens, self.ring().nvars()));
        Ok(Nonsingularity::Singular { witness })
    }
}

fn eval_q(p: &QPoly, x: &[Complex64]) -> Complex64 {
    p.terms
        .iter()
        .map(|(m, c)| {
            let mut v = Complex64::new(crate::poly::rational_to_f64(c), 0.0);
            for (k, &e) in m.iter().enumerate() {
                if e > 0 {
                    v *= x[k].powu(u32::from(e));
                }
            }
            v
        })
        .sum()
}

/// A numeric common zero of a lex Groebner basis, solved from the last
/// variable upward; checked against the original generators.
fn triangular_point(lex: &[QPoly], gens: &[QPoly], t: usize) -> Option<Vec<Complex64>> {
    fn go(
        k: usize,
        lex: &[QPoly],
        gens: &[QPoly],
        t: usize,
        point: &mut Vec<Complex64>,
    ) -> Option<Vec<Complex64>> {
        // point holds values of variables k+1..t-1 (stored at those indices)
        let stage: Vec<&QPoly> = lex
            .iter()
            .filter(|p| p.degree_in(k) > 0 && (0..k).all(|j| p.degree_in(j) == 0))
            .collect();
        let univariate = |p: &QPoly, point: &[Complex64]| -> Vec<Complex64> {
            let mut c = vec![Complex64::new(0.0, 0.0); usize::from(p.degree_in(k)) + 1];
            for (m, q) in &p.terms {
                let mut v = Complex64::new(crate::poly::rational_to_f64(q), 0.0);
                for j in k + 1..t {
                    if m[j] > 0 {
                        v *= point[j].powu(u32::from(m[j]));
                    }
                }
                c[usize::from(m[k])] += v;
            }
            c
        };
        let candidates: Vec<Complex64> = match stage
            .iter()
            .map(|p| univariate(p, point))
            .find(|c| c.iter().skip(1).any(|z| z.norm() > 1e-9))
        {
            Some(c) => poly_roots(&c),
            None => vec![Complex64::new(0.0, 0.0)],
        };
        for z in candidates {
            point[k] = z;
            let ok = stage.iter().all(|p| {
                let c = univariate(p, point);
                let (v, _) = crate::numeric::horner(&c, z);
                let scale: f64 =
                    c.iter().map(|x| x.norm()).sum::<f64>() * (1.0 + z.norm()).powi(c.len() as i32);
                v.norm() <= 1e-7 * scale.max(1.0)
            });
            if !ok {
                continue;
            }
            if k == 0 {
                let scale = 1.0 + point.iter().map(|x| x.norm()).fold(0.0, f64::max);
                if gens
                    .iter()
                    .all(|g| eval_q(g, point).norm() <= 1e-6 * scale.powi(8))
                {
                    return Some(point.clone());
                }
                continue;
            }
            if let Some(p) = go(k - 1, lex, gens, t, point) {
                return Some(p);
            }
        }
        None
    }
    let mut point = vec![Complex64::new(0.0, 0.0); t];
    go(t - 1, lex, gens, t, &mut point)
}
