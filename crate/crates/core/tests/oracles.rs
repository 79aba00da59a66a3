mod common;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use telesigma::curve::{build_equations, DefaultLambda};
use telesigma::fundform::expand_q;
use telesigma::poly::Rational;
use telesigma::semigroup::ExponentVector;

use common::{confluence, weierstrass_q_by_hand, weierstrass_spec, CONFLUENCE_CASES};

#[test]
fn random_rewrite_order_agrees_with_normal_form() {
    for (a, max_exp, seed) in CONFLUENCE_CASES {
        confluence(a, max_exp, seed, 100).unwrap();
    }
}

#[test]
fn weierstrass_q_table_matches_hand_expansion() {
    let eqs = build_equations(&weierstrass_spec(DefaultLambda::Symbolic, None, None));
    assert_eq!(expand_q(&eqs).unwrap(), weierstrass_q_by_hand(&eqs));
}

/// Finite-difference `d/dy1` of Omega on a concrete Weierstrass curve against
/// the q-table from the library.
#[test]
fn weierstrass_q_table_matches_numeric_derivative() {
    let (l, m) = (-1.0, 0.5);
    let spec = weierstrass_spec(
        DefaultLambda::Zero,
        Some(Rational::from_integer((-1).into())),
        Some(Rational::new(1.into(), 2.into())),
    );
    let q = expand_q(&build_equations(&spec)).unwrap();

    let f = |x: Complex64| x * x * x + l * x + m;
    let omega = |x1: Complex64, x2: Complex64, y1: Complex64, y2: Complex64| (x2 + y2) / (2.0 * x2 * (x1 - y1));
    let eval = |i: &ExponentVector, v1: Complex64, v2: Complex64| v1.powu(i.0[0]) * v2.powu(i.0[1]);

    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let x1 = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let y1 = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let x2 = f(x1).sqrt();
        let y2 = f(y1).sqrt();
        let h = 1e-5;
        // y2 follows its own branch near y1
        let branch = |y: Complex64| {
            let s = f(y).sqrt();
            if (s - y2).norm() < (s + y2).norm() { s } else { -s }
        };
        let fd = (omega(x1, x2, y1 + h, branch(y1 + h)) - omega(x1, x2, y1 - h, branch(y1 - h))) / (2.0 * h);
        let num: Complex64 = q
            .entries
            .iter()
            .map(|((i, j), c)| c.to_f64().unwrap() * eval(i, x1, x2) * eval(j, y1, y2))
            .sum();
        let formula = num / (4.0 * x2 * y2 * (x1 - y1) * (x1 - y1));
        assert!((fd - formula).norm() < 1e-6 * (1.0 + formula.norm()), "{fd} vs {formula}");
    }
}
