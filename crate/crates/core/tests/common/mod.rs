//! Oracles shared by the oracle and acceptance targets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use telesigma::curve::{build_equations, CanonicalEquations, CurveSpec, DefaultLambda};
use telesigma::fundform::QTable;
use telesigma::poly::{CurvePoly, LambdaKey, LambdaPoly, Rational};
use telesigma::semigroup::{check_telescopic, ExponentVector};

pub fn symbolic(a: &[u32]) -> CanonicalEquations {
    build_equations(&CurveSpec::symbolic(check_telescopic(a).unwrap()))
}

pub fn random_x_poly(eqs: &CanonicalEquations, rng: &mut ChaCha8Rng, max_exp: u32) -> CurvePoly {
    let ring = eqs.ring();
    let t = ring.nvars();
    let y = vec![0u32; t];
    let mut p = CurvePoly::zero(ring);
    for _ in 0..rng.random_range(1..=5) {
        let x: Vec<u32> = (0..t).map(|_| rng.random_range(0..=max_exp)).collect();
        let mut c = LambdaPoly::from_int(rng.random_range(-5..=5));
        if ring.lambda_count() > 0 && rng.random_bool(0.5) {
            let g = LambdaPoly::generator(rng.random_range(0..ring.lambda_count()));
            c = &c + &g;
        }
        p = &p + &CurvePoly::term(ring, &x, &y, c);
    }
    p
}

/// Rewrite with a randomly chosen reducible monomial and rule until nothing
/// is reducible.
pub fn random_order_reduce(eqs: &CanonicalEquations, p: &CurvePoly, rng: &mut ChaCha8Rng) -> CurvePoly {
    let mut p = p.clone();
    loop {
        let options: Vec<_> = p
            .terms()
            .flat_map(|(m, _)| eqs.reducible_rules(m).into_iter().map(move |r| (m.clone(), r)))
            .collect();
        if options.is_empty() {
            return p;
        }
        let (m, r) = &options[rng.random_range(0..options.len())];
        p = eqs.rewrite_step(&p, m, *r);
    }
}

/// First sample (index, input) where the two reductions disagree.
pub fn confluence(a: &[u32], max_exp: u32, seed: u64, samples: usize) -> Result<(), String> {
    let eqs = symbolic(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..samples {
        let p = random_x_poly(&eqs, &mut rng, max_exp);
        let nf = eqs.normal_form(&p);
        let other = random_order_reduce(&eqs, &p, &mut rng);
        if nf != other {
            return Err(format!("{a:?} sample {k}: {}", p.to_text()));
        }
    }
    Ok(())
}

pub const CONFLUENCE_CASES: [(&[u32], u32, u64); 4] =
    [(&[2, 3], 6, 1), (&[2, 5], 6, 2), (&[3, 4], 5, 3), (&[4, 6, 5], 3, 4)];

/// `y^2 = x^3 + l x + m` with the remaining parameters of `(2,3)` set to zero.
pub fn weierstrass_spec(default: DefaultLambda, l: Option<Rational>, m: Option<Rational>) -> CurveSpec {
    let seq = check_telescopic(&[2, 3]).unwrap();
    let key = |e: [u32; 2]| LambdaKey { equation: 2, exponent: ExponentVector::new(&e) };
    let mut values = BTreeMap::new();
    for e in [[2u32, 0], [0, 1], [1, 1]] {
        values.insert(key(e), Rational::zero());
    }
    if let Some(l) = l {
        values.insert(key([1, 0]), l);
    }
    if let Some(m) = m {
        values.insert(key([0, 0]), m);
    }
    CurveSpec::with_values(seq, &values, default).unwrap()
}

// With Omega = (x2 + y2) / (2 x2 (x1 - y1)), differentiating in y along the
// curve (dy2/dy1 = (3 y1^2 + l) / (2 y2)) and clearing 2 x2 * 2 y2 * (x1 - y1)^2
// gives the numerator
//   (3 y1^2 + l)(x1 - y1) + 2 y2 (x2 + y2)
// and y2^2 = y1^3 + l y1 + m turns it into the table below.
pub fn weierstrass_q_by_hand(eqs: &CanonicalEquations) -> QTable {
    let ring = eqs.ring();
    let lp = |s: &str| LambdaPoly::parse(ring, s).unwrap();
    let key = |i: [u32; 2], j: [u32; 2]| (ExponentVector::new(&i), ExponentVector::new(&j));
    QTable {
        entries: [
            (key([1, 0], [2, 0]), lp("3")),
            (key([0, 0], [3, 0]), lp("-1")),
            (key([1, 0], [0, 0]), lp("l2_1,0")),
            (key([0, 0], [1, 0]), lp("l2_1,0")),
            (key([0, 1], [0, 1]), lp("2")),
            (key([0, 0], [0, 0]), lp("2*l2_0,0")),
        ]
        .into_iter()
        .collect(),
    }
}
