use std::time::Instant;

use telesigma::curve::{build_equations, CurveSpec};
use telesigma::differentials::{det_h_degree_bound, diagonal, divided_difference_matrix, holomorphic_basis};
use telesigma::fundform::{audit_c, audit_q, compute, symmetry_check};
use telesigma::semigroup::check_telescopic;

fn run(a: &[u32]) {
    let t0 = Instant::now();
    let seq = check_telescopic(a).unwrap();
    let eqs = build_equations(&CurveSpec::symbolic(seq.clone()));
    let n = divided_difference_matrix(&eqs).unwrap();
    assert_eq!(diagonal(&n.det_h), eqs.det_g1(), "{a:?}");
    assert!(n.det_h.weighted_degree().0.unwrap() <= det_h_degree_bound(&seq));
    let basis = holomorphic_basis(&seq);
    let ff = compute(&eqs, &basis).unwrap();
    assert!(audit_q(&ff.q, &seq, eqs.ring()).is_empty(), "{a:?}");
    assert!(audit_c(&ff.c, &seq, eqs.ring()).is_empty(), "{a:?}");
    assert!(symmetry_check(&eqs, &ff.c).unwrap(), "{a:?}");
    assert_eq!(ff.dr.entries.len(), basis.len());
    eprintln!("{a:?}: q {} c {} in {:?}", ff.q.entries.len(), ff.c.entries.len(), t0.elapsed());
}

#[test]
fn cusp_family_symmetric() {
    run(&[2, 3]);
    run(&[2, 5]);
}

#[test]
fn trigonal_symmetric() {
    run(&[3, 4]);
}

#[test]
fn three_generator_symmetric() {
    run(&[4, 6, 5]);
}
