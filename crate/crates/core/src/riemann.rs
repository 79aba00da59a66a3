//! Numerics for the hyperelliptic members `(2, 2g+1)`: branch points,
//! a symplectic homology basis, period matrices by quadrature, theta series
//! with half characteristics and the sigma function.
//!
//! Write `F = y^2 - p(x) y - r(x)` and `w = y - p/2`, so `w^2 = f = r + p^2/4`
//! and `det G_1 = 2w`. Every form `S(x) dx / w` is integrated over loops
//! around the segments joining consecutive branch points. On the segment
//! `x = e_a + (e_b - e_a)(1 - cos t)/2` the square-root singularities cancel
//! and the integrand becomes smooth in `t`.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::curve::{build_equations, CanonicalEquations, CurveError, CurveSpec};
use crate::differentials::{diagonal, divided_difference_matrix, holomorphic_basis, DifferentialBasis};
use crate::fundform::{self, audit_c, symmetry_check, FundformError, SecondKindBasis};
use crate::numeric::{horner, poly_roots};

pub type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiemannError {
    #[error("periods unsupported for {0}")]
    Unsupported(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Fundform(#[from] FundformError),
    #[error("branch points e{0} and e{1} coincide (distance {2:e}); the curve is singular")]
    Singular(usize, usize, f64),
    #[error("cycle geometry is degenerate: {0}")]
    Geometry(String),
    #[error("omega_1 is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),
    #[error("Im tau is not positive definite (smallest eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("theta truncation radius would exceed {0}")]
    ThetaRadius(usize),
}

fn padd(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len().max(b.len())];
    for (k, c) in a.iter().enumerate() {
        out[k] += c;
    }
    for (k, c) in b.iter().enumerate() {
        out[k] += c;
    }
    out
}

fn pmul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn pscale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|c| c * s).collect()
}

fn monomial(k: usize, c: Complex64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); k + 1];
    v[k] = c;
    v
}

/// `y^2 = p(x) y + r(x)` with concrete coefficients, lowest degree first.
#[derive(Debug, Clone)]
pub struct HyperellipticModel {
    pub genus: usize,
    pub p: Vec<Complex64>,
    pub r: Vec<Complex64>,
    /// `r + p^2/4`; monic of degree `2g + 1`.
    pub f: Vec<Complex64>,
}

impl HyperellipticModel {
    pub fn from_equations(eqs: &CanonicalEquations) -> Result<HyperellipticModel, RiemannError> {
        let seq = eqs.ring().sequence();
        let a = seq.weights();
        if a.len() != 2 || a[0] != 2 {
            let shown = a.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
            return Err(RiemannError::Unsupported(format!("({shown}): numerics need a_1 = 2 and t = 2")));
        }
        let spec = eqs.spec();
        for k in 0..spec.values().len() {
            spec.value_f64(k)?;
        }
        let genus = seq.genus() as usize;
        let mut p = vec![Complex64::new(0.0, 0.0); genus + 1];
        let mut r = vec![Complex64::new(0.0, 0.0); 2 * genus + 2];
        for (m, c) in eqs.equations()[0].terms() {
            let v = c.to_f64().expect("concrete coefficients");
            let (xe, ye) = (m[0] as usize, m[1] as usize);
            match ye {
                2 => {}
                1 => p[xe] -= v,
                _ => r[xe] -= v,
            }
        }
        let f = padd(&r, &pscale(&pmul(&p, &p), Complex64::new(0.25, 0.0)));
        Ok(HyperellipticModel { genus, p, r, f })
    }

    /// `S` with `(y^j / det G_1) dx = S dx / w + exact`. For `j_2 = 1`
    /// the part `x^{j_1} dx / 2` is exact and has no periods.
    fn odd_part(&self, j1: usize, j2: usize, c: Complex64) -> Vec<Complex64> {
        match j2 {
            0 => monomial(j1, c * 0.5),
            _ => pmul(&monomial(j1, c * 0.25), &self.p),
        }
    }
}

/// One segment `[a, b]` between consecutive branch points, with a branch of
/// `sqrt(prod_{m != a,b} (x - e_m))` that is analytic along it.
#[derive(Debug, Clone)]
struct Edge {
    a: Complex64,
    b: Complex64,
    /// `(e_m, rho_m, sqrt(rho_m))` with `(x - e_m) / rho_m` in the right half-plane.
    others: Vec<(Complex64, Complex64, Complex64)>,
}

impl Edge {
    fn new(points: &[Complex64], k: usize) -> Result<Edge, RiemannError> {
        let (a, b) = (points[k], points[k + 1]);
        let mut others = Vec::new();
        for (m, &e) in points.iter().enumerate() {
            if m == k || m == k + 1 {
                continue;
            }
            let (da, db) = (a - e, b - e);
            let mid = da / da.norm() + db / db.norm();
            if mid.norm() < 1e-9 {
                return Err(RiemannError::Geometry(format!("branch point e{m} lies on the segment e{k}-e{}", k + 1)));
            }
            let rho = mid / mid.norm();
            others.push((e, rho, rho.sqrt()));
        }
        Ok(Edge { a, b, others })
    }

    fn x(&self, t: f64) -> Complex64 {
        self.a + (self.b - self.a) * ((1.0 - t.cos()) / 2.0)
    }

    fn r(&self, t: f64) -> Complex64 {
        let x = self.x(t);
        self.others.iter().map(|(e, rho, sr)| sr * ((x - e) / rho).sqrt()).product()
    }

    /// Direction of `w` on this sheet as `t -> 0` or `t -> pi`.
    fn w_direction(&self, at_end: bool) -> Complex64 {
        let d = I * (self.b - self.a) * self.r(if at_end { PI } else { 0.0 });
        d / d.norm()
    }
}

/// Branch points, the oriented chain of segment cycles and the symplectic
/// basis built from it.
#[derive(Debug, Clone, Serialize)]
pub struct BranchData {
    #[serde(serialize_with = "ser_vec")]
    pub points: Vec<Complex64>,
    /// `gamma_k o gamma_{k+1}` for the unoriented chain.
    pub raw_signs: Vec<i32>,
    /// Orientation applied to each `gamma_k` so that consecutive intersections are `+1`.
    pub orientation: Vec<i32>,
    /// `alpha_i = gamma_{2i-1}`, `beta_i = gamma_{2i} + gamma_{2i+2} + ... + gamma_{2g}` as rows over the chain.
    pub basis: Vec<Vec<i32>>,
    /// Intersection matrix of `(alpha_1..alpha_g, beta_1..beta_g)`.
    pub intersection: Vec<Vec<i32>>,
    #[serde(skip)]
    edges: Vec<Edge>,
}

impl BranchData {
    pub fn is_symplectic(&self) -> bool {
        let g = self.points.len() / 2;
        (0..2 * g).all(|i| {
            (0..2 * g).all(|j| {
                let want = if j == i + g { 1 } else if i == j + g { -1 } else { 0 };
                self.intersection[i][j] == want
            })
        })
    }
}

pub fn branch_data(model: &HyperellipticModel) -> Result<BranchData, RiemannError> {
    let g = model.genus;
    if g == 0 {
        return Err(RiemannError::Unsupported("genus 0".into()));
    }
    let mut points = poly_roots(&model.f);
    points.sort_by(|u, v| u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)));
    let spread = points
        .iter()
        .flat_map(|u| points.iter().map(move |v| (u - v).norm()))
        .fold(0.0, f64::max)
        .max(1.0);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i] - points[j]).norm();
            if d < 1e-8 * spread {
                return Err(RiemannError::Singular(i + 1, j + 1, d));
            }
        }
    }
    let n = 2 * g;
    let edges = (0..n).map(|k| Edge::new(&points, k)).collect::<Result<Vec<_>, _>>()?;
    let fprime: Vec<Complex64> = model.f.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
    let mut raw = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let c = horner(&fprime, points[k + 1]).0.sqrt();
        let v1 = -edges[k].w_direction(true) / c;
        let v2 = edges[k + 1].w_direction(false) / c;
        let s = (v1.conj() * v2).im / (v1.norm() * v2.norm());
        if s.abs() < 1e-6 {
            return Err(RiemannError::Geometry(format!("cycles {} and {} meet tangentially", k + 1, k + 2)));
        }
        raw.push(if s > 0.0 { 1 } else { -1 });
    }
    let mut orientation = vec![1i32; n];
    for k in 0..n - 1 {
        orientation[k + 1] = orientation[k] * raw[k];
    }
    let mut chain = vec![vec![0i32; n]; n];
    for k in 0..n - 1 {
        let s = orientation[k] * orientation[k + 1] * raw[k];
        chain[k][k + 1] = s;
        chain[k + 1][k] = -s;
    }
    let mut basis = vec![vec![0i32; n]; n];
    for i in 0..g {
        basis[i][2 * i] = 1;
        for m in i..g {
            basis[g + i][2 * m + 1] = 1;
        }
    }
    let intersection = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).map(|k| (0..n).map(|l| basis[i][k] * chain[k][l] * basis[j][l]).sum::<i32>()).sum()
                })
                .collect()
        })
        .collect();
    Ok(BranchData { points, raw_signs: raw, orientation, basis, intersection, edges })
}

/// Adaptive Gauss-Legendre settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadConfig {
    /// Accept a panel when halving it changes the result by less than this
    /// (relative to `max(1, |value|)`).
    pub tol: f64,
    pub max_depth: u32,
    pub order: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: 1e-14, max_depth: 12, order: 24 }
    }
}

struct Quadrature<'a, F> {
    rule: Vec<(f64, f64)>,
    cfg: &'a QuadConfig,
    f: F,
    error: f64,
}

impl<F: FnMut(f64) -> Vec<Complex64>> Quadrature<'_, F> {
    fn panel(&mut self, a: f64, b: f64) -> Vec<Complex64> {
        let (h, m) = ((b - a) / 2.0, (a + b) / 2.0);
        let mut acc: Vec<Complex64> = Vec::new();
        for k in 0..self.rule.len() {
            let (x, w) = self.rule[k];
            let v = (self.f)(m + h * x);
            if acc.is_empty() {
                acc = vec![Complex64::new(0.0, 0.0); v.len()];
            }
            for (s, y) in acc.iter_mut().zip(v) {
                *s += y * (w * h);
            }
        }
        acc
    }

    fn adapt(&mut self, a: f64, b: f64, whole: Vec<Complex64>, depth: u32) -> Vec<Complex64> {
        let m = (a + b) / 2.0;
        let (l, r) = (self.panel(a, m), self.panel(m, b));
        let sum: Vec<Complex64> = l.iter().zip(&r).map(|(x, y)| x + y).collect();
        let diff = sum.iter().zip(&whole).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let scale = sum.iter().map(|x| x.norm()).fold(1.0, f64::max);
        if diff <= self.cfg.tol * scale || depth >= self.cfg.max_depth {
            self.error += diff;
            return sum;
        }
        let left = self.adapt(a, m, l, depth + 1);
        let right = self.adapt(m, b, r, depth + 1);
        left.iter().zip(&right).map(|(x, y)| x + y).collect()
    }
}

/// `int_a^b f`, componentwise, with the accumulated halving differences.
pub fn integrate(a: f64, b: f64, cfg: &QuadConfig, f: impl FnMut(f64) -> Vec<Complex64>) -> (Vec<Complex64>, f64) {
    let order = std::num::NonZeroUsize::new(cfg.order.max(2)).expect("nonzero");
    let rule = GaussLegendre::new(order).as_node_weight_pairs().to_vec();
    let mut q = Quadrature { rule, cfg, f, error: 0.0 };
    let whole = q.panel(a, b);
    let v = q.adapt(a, b, whole, 0);
    (v, q.error)
}

/// Half-integer theta characteristic, entries `0` or `1/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Characteristic {
    pub delta_prime: Vec<f64>,
    pub delta_dblprime: Vec<f64>,
}

impl Characteristic {
    pub fn zero(g: usize) -> Characteristic {
        Characteristic { delta_prime: vec![0.0; g], delta_dblprime: vec![0.0; g] }
    }

    pub fn is_odd(&self) -> bool {
        let s: f64 = self.delta_prime.iter().zip(&self.delta_dblprime).map(|(a, b)| 4.0 * a * b).sum();
        (s.round() as i64) % 2 != 0
    }

    /// All `2^{2g}` half characteristics.
    pub fn all(g: usize) -> Vec<Characteristic> {
        (0u32..1 << (2 * g))
            .map(|bits| Characteristic {
                delta_prime: (0..g).map(|k| f64::from((bits >> k) & 1) / 2.0).collect(),
                delta_dblprime: (0..g).map(|k| f64::from((bits >> (g + k)) & 1) / 2.0).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodData {
    #[serde(serialize_with = "ser_mat")]
    pub omega1: CMatrix,
    #[serde(serialize_with = "ser_mat")]
    pub omega2: CMatrix,
    #[serde(serialize_with = "ser_mat")]
    pub eta1: CMatrix,
    #[serde(serialize_with = "ser_mat")]
    pub eta2: CMatrix,
    #[serde(serialize_with = "ser_mat")]
    pub tau: CMatrix,
    /// Filled once a characteristic has been selected.
    pub characteristic: Option<Characteristic>,
    /// Sum of the halving differences over all panels and cycles.
    pub quad_error: f64,
    pub omega1_condition: f64,
}

impl PeriodData {
    pub fn genus(&self) -> usize {
        self.tau.nrows()
    }

    /// `M = ((omega1, omega2), (eta1, eta2))`.
    pub fn m(&self) -> CMatrix {
        let g = self.genus();
        let mut m = CMatrix::zeros(2 * g, 2 * g);
        m.view_mut((0, 0), (g, g)).copy_from(&self.omega1);
        m.view_mut((0, g), (g, g)).copy_from(&self.omega2);
        m.view_mut((g, 0), (g, g)).copy_from(&self.eta1);
        m.view_mut((g, g), (g, g)).copy_from(&self.eta2);
        m
    }

    /// `max |tM J M + (pi i / 2) J|`.
    pub fn legendre_residual(&self) -> f64 {
        let g = self.genus();
        let j = symplectic_j(g);
        let m = self.m();
        let r = m.transpose() * &j * &m + j * (I * (PI / 2.0));
        r.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn tau_asymmetry(&self) -> f64 {
        (&self.tau - self.tau.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the symmetric part of `Im tau`.
    pub fn im_tau_min_eigenvalue(&self) -> f64 {
        min_eig_im(&self.tau)
    }
}

fn symplectic_j(g: usize) -> CMatrix {
    let mut j = CMatrix::zeros(2 * g, 2 * g);
    for k in 0..g {
        j[(k, g + k)] = Complex64::new(1.0, 0.0);
        j[(g + k, k)] = Complex64::new(-1.0, 0.0);
    }
    j
}

fn min_eig_im(tau: &CMatrix) -> f64 {
    let g = tau.nrows();
    let im = DMatrix::<f64>::from_fn(g, g, |i, j| (tau[(i, j)].im + tau[(j, i)].im) / 2.0);
    SymmetricEigen::new(im).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// The `S` polynomials for `du_1..du_g` and `dr_1..dr_g`.
fn period_forms(
    model: &HyperellipticModel,
    basis: &DifferentialBasis,
    dr: &SecondKindBasis,
) -> Vec<Vec<Complex64>> {
    let mut forms: Vec<Vec<Complex64>> =
        basis.exponents().map(|k| model.odd_part(k.0[0] as usize, 0, Complex64::new(1.0, 0.0))).collect();
    for terms in &dr.entries {
        let mut s = Vec::new();
        for (j, c) in terms {
            let c = c.to_f64().expect("concrete c-table");
            s = padd(&s, &model.odd_part(j.0[0] as usize, j.0[1] as usize, Complex64::new(c, 0.0)));
        }
        forms.push(s);
    }
    forms
}

/// Everything needed for the numeric layer of one curve.
#[derive(Debug, Clone)]
pub struct HyperellipticPeriods {
    pub model: HyperellipticModel,
    pub branch: BranchData,
    pub periods: PeriodData,
}

pub fn period_matrices(eqs: &CanonicalEquations, cfg: &QuadConfig) -> Result<HyperellipticPeriods, RiemannError> {
    let model = HyperellipticModel::from_equations(eqs)?;
    let branch = branch_data(&model)?;
    let seq = eqs.ring().sequence();
    let basis = holomorphic_basis(seq);
    let ff = fundform::compute(eqs, &basis)?;
    let forms = period_forms(&model, &basis, &ff.dr);
    let g = model.genus;
    let n = 2 * g;
    // chain[k][form] = oriented integral over gamma_k
    let mut chain = Vec::with_capacity(n);
    let mut quad_error = 0.0;
    for (k, edge) in branch.edges.iter().enumerate() {
        let (v, err) = integrate(0.0, PI, cfg, |t| {
            let x = edge.x(t);
            let r = edge.r(t);
            forms.iter().map(|s| horner(s, x).0 / r).collect()
        });
        let s = -2.0 * I * f64::from(branch.orientation[k]);
        quad_error += 2.0 * err;
        chain.push(v.into_iter().map(|z| z * s).collect::<Vec<_>>());
    }
    let cycle = |row: &[i32], form: usize| -> Complex64 {
        row.iter().zip(&chain).map(|(&b, c)| c[form] * f64::from(b)).sum()
    };
    let half = |form_off: usize, cyc_off: usize, sign: f64| {
        CMatrix::from_fn(g, g, |i, j| cycle(&branch.basis[cyc_off + j], form_off + i) * (sign / 2.0))
    };
    let omega1 = half(0, 0, 1.0);
    let omega2 = half(0, g, 1.0);
    let eta1 = half(g, 0, -1.0);
    let eta2 = half(g, g, -1.0);
    let sv = omega1.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let omega1_condition = if smin == 0.0 { f64::INFINITY } else { smax / smin };
    if omega1_condition > 1e12 {
        return Err(RiemannError::IllConditioned(omega1_condition));
    }
    let tau = omega1.clone().try_inverse().ok_or(RiemannError::IllConditioned(f64::INFINITY))? * &omega2;
    let periods =
        PeriodData { omega1, omega2, eta1, eta2, tau, characteristic: None, quad_error, omega1_condition };
    Ok(HyperellipticPeriods { model, branch, periods })
}

/// Truncation control for the theta series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaParams {
    /// Target bound on the absolute truncation error.
    pub error: f64,
    pub max_radius: usize,
}

impl Default for ThetaParams {
    fn default() -> Self {
        ThetaParams { error: 1e-15, max_radius: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    /// `d theta / d z_k`.
    pub gradient: Vec<Complex64>,
    /// Summation over `|n|_inf <= radius`.
    pub radius: usize,
    /// Bound on the omitted terms (for value and each gradient entry).
    pub bound: f64,
}

/// Gaussian tail bound for `|n|_inf > radius`, where every term is at most
/// `(1 + 2 pi r) exp(-pi lam r^2 + 2 pi b r)` with `r = |n|_inf - 1/2`.
fn tail_bound(g: usize, lam: f64, b: f64, radius: usize) -> f64 {
    let mut total = 0.0;
    for k in radius + 1..radius + 100_000 {
        let r = k as f64 - 0.5;
        let count = 2.0 * g as f64 * ((2 * k + 1) as f64).powi(g as i32 - 1);
        let term = count * (1.0 + 2.0 * PI * r) * (-PI * lam * r * r + 2.0 * PI * b * r).exp();
        total += term;
        if r > b / lam + 1.0 && (term <= 1e-17 * total || term == 0.0) {
            break;
        }
    }
    total
}

pub fn theta(
    z: &[Complex64],
    tau: &CMatrix,
    ch: &Characteristic,
    params: &ThetaParams,
) -> Result<ThetaValue, RiemannError> {
    let g = z.len();
    let lam = min_eig_im(tau);
    if lam.is_nan() || lam <= 0.0 {
        return Err(RiemannError::NotPositive(lam));
    }
    let b = z.iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
    let mut radius = 1;
    let bound = loop {
        if radius as f64 - 0.5 >= b / lam {
            let t = tail_bound(g, lam, b, radius);
            if t <= params.error {
                break t;
            }
        }
        radius += 1;
        if radius > params.max_radius {
            return Err(RiemannError::ThetaRadius(params.max_radius));
        }
    };
    let shift: Vec<Complex64> = z.iter().zip(&ch.delta_dblprime).map(|(a, d)| a + d).collect();
    let mut n = vec![-(radius as i64); g];
    let mut value = Complex64::new(0.0, 0.0);
    let mut gradient = vec![Complex64::new(0.0, 0.0); g];
    loop {
        let v: Vec<f64> = n.iter().zip(&ch.delta_prime).map(|(k, d)| *k as f64 + d).collect();
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                quad += tau[(i, j)] * (v[i] * v[j]);
            }
        }
        let lin: Complex64 = v.iter().zip(&shift).map(|(a, s)| s * *a).sum();
        let term = (I * PI * quad + 2.0 * PI * I * lin).exp();
        value += term;
        for k in 0..g {
            gradient[k] += term * (2.0 * PI * I * v[k]);
        }
        let mut k = 0;
        loop {
            if k == g {
                return Ok(ThetaValue { value, gradient, radius, bound });
            }
            n[k] += 1;
            if n[k] > radius as i64 {
                n[k] = -(radius as i64);
                k += 1;
            } else {
                break;
            }
        }
    }
}

/// `sigma(u) = c exp(u^t eta1 omega1^{-1} u / 2) theta[delta]((2 omega1)^{-1} u, tau)`.
#[derive(Debug, Clone)]
pub struct SigmaFunction {
    pub periods: PeriodData,
    pub characteristic: Characteristic,
    pub c: Complex64,
    pub params: ThetaParams,
    /// How cleanly the characteristic was singled out: `|d sigma/d u_1 (0)| / |grad sigma(0)|`
    /// for the chosen one and the best rejected one (`g = 2` only).
    pub selection_score: Option<(f64, f64)>,
    half_inv: CMatrix,
    eta_omega_inv: CMatrix,
}

impl SigmaFunction {
    /// Select the characteristic and the constant `c`. For `g = 1` the odd
    /// characteristic with `sigma'(0) = 1`; for `g = 2` the odd
    /// characteristic whose gradient at `0` has no `u_1` component, `c = 1`.
    pub fn new(periods: &PeriodData, params: ThetaParams) -> Result<SigmaFunction, RiemannError> {
        let g = periods.genus();
        if g > 2 {
            return Err(RiemannError::Unsupported(format!("sigma characteristic search for genus {g} (only g <= 2)")));
        }
        let omega1_inv =
            periods.omega1.clone().try_inverse().ok_or(RiemannError::IllConditioned(f64::INFINITY))?;
        let half_inv = &omega1_inv * Complex64::new(0.5, 0.0);
        let eta_omega_inv = &periods.eta1 * &omega1_inv;
        let zero = vec![Complex64::new(0.0, 0.0); g];
        let grad_u = |ch: &Characteristic| -> Result<Vec<Complex64>, RiemannError> {
            let th = theta(&zero, &periods.tau, ch, &params)?;
            Ok((0..g).map(|j| (0..g).map(|k| th.gradient[k] * half_inv[(k, j)]).sum()).collect())
        };
        let mut scored = Vec::new();
        for ch in Characteristic::all(g).into_iter().filter(Characteristic::is_odd) {
            let gr = grad_u(&ch)?;
            let norm = gr.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let score = if g == 1 { 0.0 } else { gr[0].norm() / norm };
            scored.push((score, ch, gr));
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let runner_up = scored.get(1).map(|s| s.0);
        let (score, characteristic, gr) = scored.swap_remove(0);
        let c = if g == 1 { Complex64::new(1.0, 0.0) / gr[0] } else { Complex64::new(1.0, 0.0) };
        let mut periods = periods.clone();
        periods.characteristic = Some(characteristic.clone());
        Ok(SigmaFunction {
            periods,
            characteristic,
            c,
            params,
            selection_score: runner_up.map(|r| (score, r)),
            half_inv,
            eta_omega_inv,
        })
    }

    pub fn genus(&self) -> usize {
        self.periods.genus()
    }

    pub fn eval(&self, u: &[Complex64]) -> Result<Complex64, RiemannError> {
        let g = self.genus();
        let z: Vec<Complex64> = (0..g).map(|i| (0..g).map(|j| self.half_inv[(i, j)] * u[j]).sum()).collect();
        let mut q = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                q += u[i] * self.eta_omega_inv[(i, j)] * u[j];
            }
        }
        let th = theta(&z, &self.periods.tau, &self.characteristic, &self.params)?;
        Ok(self.c * (q / 2.0).exp() * th.value)
    }

    /// `2 omega1 m1 + 2 omega2 m2`.
    pub fn period(&self, m1: &[i64], m2: &[i64]) -> Vec<Complex64> {
        let p = &self.periods;
        (0..self.genus())
            .map(|i| {
                (0..self.genus())
                    .map(|j| p.omega1[(i, j)] * 2.0 * m1[j] as f64 + p.omega2[(i, j)] * 2.0 * m2[j] as f64)
                    .sum()
            })
            .collect()
    }

    /// The predicted ratio `sigma(u + 2 omega1 m1 + 2 omega2 m2) / sigma(u)`.
    pub fn quasi_factor(&self, u: &[Complex64], m1: &[i64], m2: &[i64]) -> Complex64 {
        let g = self.genus();
        let p = &self.periods;
        let ch = &self.characteristic;
        let dot = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| (x * y) as f64).sum::<f64>();
        let dotf = |a: &[f64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x * *y as f64).sum::<f64>();
        let phase = PI * (dot(m1, m2) + 2.0 * dotf(&ch.delta_prime, m1) - 2.0 * dotf(&ch.delta_dblprime, m2));
        let mut e = Complex64::new(0.0, 0.0);
        for (i, ui) in u.iter().enumerate().take(g) {
            let eta_m: Complex64 = (0..g)
                .map(|j| p.eta1[(i, j)] * 2.0 * m1[j] as f64 + p.eta2[(i, j)] * 2.0 * m2[j] as f64)
                .sum();
            let shift: Complex64 = ui
                + (0..g)
                    .map(|j| p.omega1[(i, j)] * m1[j] as f64 + p.omega2[(i, j)] * m2[j] as f64)
                    .sum::<Complex64>();
            e += eta_m * shift;
        }
        (I * phase + e).exp()
    }
}

/// Settings for [`verify_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Replaces every floating-point tolerance when set.
    pub tolerance: Option<f64>,
    pub theta: ThetaParams,
    pub quad: QuadConfig,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tolerance: None,
            theta: ThetaParams::default(),
            quad: QuadConfig::default(),
            samples: 64,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `residual < tolerance`.
    fn below(name: &str, residual: f64, tolerance: f64) -> Check {
        Check { name: name.into(), passed: residual < tolerance, residual, tolerance }
    }

    fn exact(name: &str, ok: bool) -> Check {
        Check { name: name.into(), passed: ok, residual: if ok { 0.0 } else { 1.0 }, tolerance: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub sequence: Vec<u32>,
    pub genus: u32,
    /// `None` when the numeric layer ran; otherwise why it did not.
    pub unsupported: Option<String>,
    pub checks: Vec<Check>,
    pub periods: Option<PeriodData>,
    pub branch: Option<BranchData>,
    pub sigma_constant: Option<[f64; 2]>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

fn symbolic_checks(eqs: &CanonicalEquations) -> Result<Vec<Check>, RiemannError> {
    let seq = eqs.ring().sequence();
    let n = divided_difference_matrix(eqs).map_err(FundformError::from)?;
    let basis = holomorphic_basis(seq);
    let ff = fundform::compute(eqs, &basis)?;
    // the degree clauses speak about lambda-polynomials, so audit the generic curve
    let generic = build_equations(&CurveSpec::symbolic(seq.clone()));
    let gc = fundform::compute(&generic, &basis)?.c;
    Ok(vec![
        Check::exact("det_h_diagonal_equals_det_g1", diagonal(&n.det_h) == eqs.det_g1()),
        Check::exact("fundamental_form_symmetric", symmetry_check(eqs, &ff.c)?),
        Check::exact("c_degree_clauses_symbolic", audit_c(&gc, seq, generic.ring()).is_empty()),
    ])
}

fn random_cell_point(rng: &mut ChaCha8Rng, s: &SigmaFunction) -> Vec<Complex64> {
    let g = s.genus();
    let p = &s.periods;
    let a: Vec<f64> = (0..g).map(|_| rng.random_range(-0.5..0.5)).collect();
    let b: Vec<f64> = (0..g).map(|_| rng.random_range(-0.5..0.5)).collect();
    (0..g)
        .map(|i| (0..g).map(|j| p.omega1[(i, j)] * 2.0 * a[j] + p.omega2[(i, j)] * 2.0 * b[j]).sum())
        .collect()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Run every check that applies to this curve. Symbolic identities always
/// run; the numeric layer only for `(2, 2g+1)` with concrete parameters.
pub fn verify_report(eqs: &CanonicalEquations, cfg: &VerifyConfig) -> Result<VerifyReport, RiemannError> {
    let seq = eqs.ring().sequence();
    let mut report = VerifyReport {
        sequence: seq.weights().to_vec(),
        genus: seq.genus(),
        unsupported: None,
        checks: symbolic_checks(eqs)?,
        periods: None,
        branch: None,
        sigma_constant: None,
    };
    let hp = match period_matrices(eqs, &cfg.quad) {
        Ok(hp) => hp,
        Err(RiemannError::Unsupported(msg)) => {
            let a1 = seq.weights()[0];
            report.unsupported = Some(if a1 != 2 {
                "periods unsupported (a_1≠2); symbolic checks only".to_string()
            } else {
                format!("periods unsupported ({msg}); symbolic checks only")
            });
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let g = hp.model.genus;
    let tol = |default: f64| cfg.tolerance.unwrap_or(default);
    let p = &hp.periods;
    let checks = &mut report.checks;
    checks.push(Check::exact("intersection_matrix_symplectic", hp.branch.is_symplectic()));
    checks.push(Check::below("quadrature_step_halving", p.quad_error, tol(1e-9)));
    checks.push(Check::below("tau_symmetric", p.tau_asymmetry(), tol(1e-10)));
    let lam = p.im_tau_min_eigenvalue();
    checks.push(Check { name: "im_tau_positive_definite".into(), passed: lam > 0.0, residual: lam, tolerance: 0.0 });
    checks.push(Check::below("legendre_relation", p.legendre_residual(), tol(if g == 1 { 1e-8 } else { 1e-6 })));
    report.branch = Some(hp.branch.clone());
    if g > 2 {
        report.periods = Some(hp.periods.clone());
        report.unsupported = Some(format!("sigma checks unsupported for genus {g} (only g <= 2)"));
        return Ok(report);
    }
    let sigma = SigmaFunction::new(&hp.periods, cfg.theta)?;
    let checks = &mut report.checks;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if let Some((chosen, runner_up)) = sigma.selection_score {
        checks.push(Check::below("characteristic_gradient_u1", chosen, tol(1e-6)));
        checks.push(Check {
            name: "characteristic_unique".into(),
            passed: runner_up > 1e-3,
            residual: runner_up,
            tolerance: 1e-3,
        });
    }
    let mut parity = 0.0f64;
    for _ in 0..20 {
        let u = random_cell_point(&mut rng, &sigma);
        let neg: Vec<Complex64> = u.iter().map(|z| -z).collect();
        let (a, b) = (sigma.eval(&u)?, sigma.eval(&neg)?);
        parity = parity.max((a + b).norm() / a.norm());
    }
    checks.push(Check::below("sigma_odd", parity, tol(1e-9)));
    if g == 1 {
        let mut worst = 0.0f64;
        for k in 0..8 {
            let u = Complex64::from_polar(1e-3, PI * k as f64 / 4.0 + 0.1);
            worst = worst.max((sigma.eval(&[u])? / u - 1.0).norm());
        }
        checks.push(Check::below("sigma_over_u_limit", worst, tol(1e-6)));
    }
    let mut shifts: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    for k in 0..g {
        for s in [1i64, -1] {
            let mut e = vec![0i64; g];
            e[k] = s;
            shifts.push((e.clone(), vec![0; g]));
            shifts.push((vec![0; g], e));
        }
    }
    while shifts.len() < cfg.samples.max(4 * g) {
        let m1: Vec<i64> = (0..g).map(|_| rng.random_range(-2..=2)).collect();
        let m2: Vec<i64> = (0..g).map(|_| rng.random_range(-2..=2)).collect();
        shifts.push((m1, m2));
    }
    let mut quasi = 0.0f64;
    for (m1, m2) in &shifts {
        let (u, base) = loop {
            let u = random_cell_point(&mut rng, &sigma);
            let base = sigma.eval(&u)?;
            if base.norm() > 1e-6 * sigma.c.norm() {
                break (u, base);
            }
        };
        let shift = sigma.period(m1, m2);
        let moved: Vec<Complex64> = u.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let lhs = sigma.eval(&moved)? / base;
        quasi = quasi.max(rel(lhs, sigma.quasi_factor(&u, m1, m2)));
    }
    checks.push(Check::below("quasi_periodicity", quasi, tol(1e-6)));
    report.sigma_constant = Some([sigma.c.re, sigma.c.im]);
    report.periods = Some(sigma.periods.clone());
    Ok(report)
}

fn ser_c(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn ser_vec<S: serde::Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ser_c))
}

fn ser_mat<S: serde::Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| ser_c(&m[(i, j)])).collect::<Vec<_>>()))
}

/// Matrices as nested `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> Value {
    json!((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| ser_c(&m[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>())
}
