use std::cmp::Ordering;
use std::sync::OnceLock;

use proptest::prelude::*;

use telesigma::curve::{build_equations, CanonicalEquations, CurveSpec};
use telesigma::poly::{CurvePoly, LambdaPoly, Rational};
use telesigma::semigroup::{check_telescopic, ExponentVector, TelescopicSequence};

const CURVES: [&[u32]; 4] = [&[2, 3], &[2, 5], &[3, 4], &[4, 6, 5]];

fn curves() -> &'static [CanonicalEquations] {
    static CELL: OnceLock<Vec<CanonicalEquations>> = OnceLock::new();
    CELL.get_or_init(|| {
        CURVES
            .iter()
            .map(|a| build_equations(&CurveSpec::symbolic(check_telescopic(a).unwrap())))
            .collect()
    })
}

/// Rejection-sample a telescopic sequence from a seed.
fn telescopic_from_seed(seed: u64) -> TelescopicSequence {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    loop {
        let t = rng.random_range(2..=4);
        let a: Vec<u32> = (0..t).map(|_| rng.random_range(2..=20)).collect();
        if let Ok(seq) = check_telescopic(&a) {
            return seq;
        }
    }
}

fn telescopic() -> impl Strategy<Value = TelescopicSequence> {
    any::<u64>().prop_map(telescopic_from_seed)
}

type RawTerm = (Vec<u32>, Vec<u32>, i64, Option<usize>);

fn raw_terms(x_only: bool, max_x: u32) -> impl Strategy<Value = Vec<RawTerm>> {
    let y = if x_only { Just(vec![0u32; 3]).boxed() } else { prop::collection::vec(0u32..3, 3).boxed() };
    prop::collection::vec((prop::collection::vec(0..=max_x, 3), y, -4i64..=4, prop::option::of(0usize..64)), 0..5)
}

fn build(eqs: &CanonicalEquations, raw: &[RawTerm]) -> CurvePoly {
    let ring = eqs.ring();
    let t = ring.nvars();
    let mut p = CurvePoly::zero(ring);
    for (x, y, c, l) in raw {
        let mut coeff = LambdaPoly::from_int(*c);
        if let Some(l) = l {
            coeff = &coeff * &LambdaPoly::generator(l % ring.lambda_count());
        }
        p = &p + &CurvePoly::term(ring, &x[..t], &y[..t], coeff);
    }
    p
}

/// The top-weight part, which is homogeneous.
fn leading_part(p: &CurvePoly) -> CurvePoly {
    let ring = p.ring();
    let Some(top) = p.weighted_degree().0 else {
        return p.clone();
    };
    let mut out = CurvePoly::zero(ring);
    for (m, c) in p.terms() {
        for (lm, q) in c.terms() {
            if ring.monomial_degree(m) + ring.lambda_degree(lm) == top {
                let mut single = LambdaPoly::zero();
                single.add_term(lm.clone(), q.clone());
                out.add_term(m.clone(), &single);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn generic_basis_matches_box(seq in telescopic()) {
        let bound = 2 * u64::from(seq.genus()) + 2 * u64::from(seq.weights()[0]);
        prop_assert_eq!(seq.basis_b(bound), seq.basis_b_generic(bound));
    }

    #[test]
    fn apery_table_has_a1_entries(seq in telescopic()) {
        let t = seq.apery_and_t();
        prop_assert_eq!(t.len(), seq.weights()[0] as usize);
        for e in &t {
            prop_assert_eq!(seq.psi(&e.representative), e.b);
            prop_assert_eq!(e.representative.as_slice()[0], 0);
        }
    }

    #[test]
    fn gaps_are_outside_the_semigroup(seq in telescopic()) {
        for &g in seq.gaps() {
            prop_assert!(seq.weights().iter().all(|&a| g % u64::from(a) != 0));
            prop_assert!(!seq.contains(g));
        }
        let partition = seq.gap_partition();
        prop_assert!(partition.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn miura_order_is_total_and_transitive(
        seq in telescopic(),
        raw in prop::collection::vec(prop::collection::vec(0u32..6, 4), 3),
    ) {
        let t = seq.len();
        let v: Vec<ExponentVector> = raw.iter().map(|r| ExponentVector::new(&r[..t])).collect();
        let cmp = |i: usize, j: usize| seq.compare(&v[i], &v[j]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(cmp(i, j), cmp(j, i).reverse());
                prop_assert_eq!(cmp(i, j) == Ordering::Equal, v[i] == v[j]);
                for k in 0..3 {
                    if cmp(i, j) != Ordering::Greater && cmp(j, k) != Ordering::Greater {
                        prop_assert_ne!(cmp(i, k), Ordering::Greater);
                    }
                }
                if seq.psi(&v[i]) < seq.psi(&v[j]) {
                    prop_assert_eq!(cmp(i, j), Ordering::Less);
                }
            }
        }
    }

    #[test]
    fn ring_axioms(k in 0usize..4, a in raw_terms(false, 3), b in raw_terms(false, 3), c in raw_terms(false, 3)) {
        let eqs = &curves()[k];
        let (p, q, r) = (build(eqs, &a), build(eqs, &b), build(eqs, &c));
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn weighted_degree_is_additive(k in 0usize..4, a in raw_terms(false, 3), b in raw_terms(false, 3)) {
        let eqs = &curves()[k];
        let (p, q) = (leading_part(&build(eqs, &a)), leading_part(&build(eqs, &b)));
        let (dp, hp) = p.weighted_degree();
        let (dq, hq) = q.weighted_degree();
        prop_assert!(hp && hq);
        if let (Some(dp), Some(dq)) = (dp, dq) {
            let (d, h) = (&p * &q).weighted_degree();
            prop_assert_eq!(d, Some(dp + dq));
            prop_assert!(h);
        }
    }

    #[test]
    fn text_round_trip(k in 0usize..4, a in raw_terms(false, 3)) {
        let eqs = &curves()[k];
        let p = build(eqs, &a);
        let text = p.to_text();
        let back = CurvePoly::parse(eqs.ring(), &text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn normal_form_idempotent_and_linear(
        k in 0usize..4,
        a in raw_terms(false, 2),
        b in raw_terms(false, 2),
        num in -3i64..=3,
        den in 1i64..=3,
    ) {
        let eqs = &curves()[k];
        let (p, q) = (build(eqs, &a), build(eqs, &b));
        let s = Rational::new(num.into(), den.into());
        let np = eqs.normal_form(&p);
        prop_assert_eq!(eqs.normal_form(&np), np.clone());
        let lhs = eqs.normal_form(&(&p + &q.scale(&s)));
        let rhs = &np + &eqs.normal_form(&q).scale(&s);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn order_at_infinity_is_a_valuation(k in 0usize..4, a in raw_terms(true, 2), b in raw_terms(true, 2)) {
        let eqs = &curves()[k];
        let (p, q) = (build(eqs, &a), build(eqs, &b));
        let o = |f: &CurvePoly| eqs.order_at_infinity(f).unwrap();
        match (o(&p), o(&q)) {
            (Some(op), Some(oq)) => {
                prop_assert_eq!(o(&(&p * &q)), Some(op + oq));
                if let Some(s) = o(&(&p + &q)) {
                    prop_assert!(s <= op.max(oq));
                }
            }
            _ => prop_assert_eq!(o(&(&p * &q)), None),
        }
    }
}
