//! One PASS/FAIL line per acceptance criterion, with timings.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use telesigma::curve::{build_equations, CurveSpec, DefaultLambda};
use telesigma::differentials::{diagonal, divided_difference_matrix, holomorphic_basis};
use telesigma::fundform::{audit_c, compute, expand_q, symmetry_check};
use telesigma::poly::{CurvePoly, LambdaPoly};
use telesigma::riemann::{verify_report, VerifyConfig};
use telesigma::semigroup::{check_telescopic, ExponentVector, TelescopicSequence};

const IDENTITY_CURVES: [&[u32]; 4] = [&[2, 3], &[2, 5], &[3, 4], &[4, 6, 5]];

type Outcome = Result<(), String>;
type Criterion = (u32, fn() -> Outcome, Option<Duration>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `((1 - a_1) + sum_{i>=2} (d_{i-1}/d_i - 1) a_i) / 2`.
fn genus_by_formula(a: &[u32]) -> i64 {
    let d: Vec<u32> = (0..a.len()).map(|i| a[..=i].iter().fold(0, |g, &x| gcd(g, x))).collect();
    let mut twice = 1 - i64::from(a[0]);
    for i in 1..a.len() {
        twice += (i64::from(d[i - 1] / d[i]) - 1) * i64::from(a[i]);
    }
    twice / 2
}

/// Minimal vectors outside `B`, with `B` taken from its definition (each vector
/// that is the order-minimal representative of its own weight).
fn minimal_non_basis(seq: &TelescopicSequence) -> Vec<ExponentVector> {
    let t = seq.len();
    let caps: Vec<u32> = (0..t).map(|i| if i == 0 { 2 } else { seq.step(i) }).collect();
    let in_b = |m: &ExponentVector| seq.min_representative(seq.psi(m)).unwrap() == *m;
    let mut out = Vec::new();
    let mut cur = vec![0u32; t];
    loop {
        let m = ExponentVector::new(&cur);
        let preds_in_b = (0..t).filter(|&k| cur[k] > 0).all(|k| {
            let mut p = cur.clone();
            p[k] -= 1;
            in_b(&ExponentVector::new(&p))
        });
        if !in_b(&m) && preds_in_b {
            out.push(m);
        }
        let mut k = 0;
        loop {
            if k == t {
                out.sort();
                return out;
            }
            if cur[k] < caps[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = 0;
            k += 1;
        }
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11ce);
    let mut seen = BTreeSet::new();
    let mut draws = 0;
    while seen.len() < 200 {
        draws += 1;
        ensure(draws < 1_000_000, || "sampler stalled".into())?;
        let t = rng.random_range(2..=4);
        let a: Vec<u32> = (0..t).map(|_| rng.random_range(1..=20)).collect();
        let Ok(seq) = check_telescopic(&a) else { continue };
        if !seen.insert(a.clone()) {
            continue;
        }
        ensure(seq.gaps().len() as i64 == genus_by_formula(&a), || format!("{a:?}: genus"))?;
        ensure(seq.apery_and_t().len() == a[0] as usize, || format!("{a:?}: #T"))?;
        let mut v = seq.generators_v();
        v.sort();
        ensure(v == minimal_non_basis(&seq), || format!("{a:?}: V"))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let eqs = common::symbolic(&[4, 6, 5]);
    let text: Vec<String> = eqs.equations().iter().map(CurvePoly::to_text).collect();
    let f2 = "X2^2 - X1^3 - l2_0,1,1*X2*X3 - l2_1,1,0*X1*X2 - l2_1,0,1*X1*X3 - l2_2,0,0*X1^2 \
              - l2_0,1,0*X2 - l2_0,0,1*X3 - l2_1,0,0*X1 - l2_0,0,0";
    let f3 = "X3^2 - X1*X2 - l3_1,0,1*X1*X3 - l3_2,0,0*X1^2 - l3_0,1,0*X2 - l3_0,0,1*X3 - l3_1,0,0*X1 - l3_0,0,0";
    ensure(text == [f2, f3], || format!("(4,6,5) equations {text:?}"))?;
    let v = eqs.spec().sequence().generators_v();
    ensure(v == [ExponentVector::new(&[0, 2, 0]), ExponentVector::new(&[0, 0, 2])], || format!("V {v:?}"))?;

    for (n, s) in [(2u32, 3u32), (2, 5), (2, 7), (3, 4), (3, 5), (4, 5), (5, 7)] {
        let eqs = common::symbolic(&[n, s]);
        let ring = eqs.ring();
        let mut expected = &CurvePoly::term(ring, &[0, n], &[0, 0], LambdaPoly::one())
            - &CurvePoly::term(ring, &[s, 0], &[0, 0], LambdaPoly::one());
        for j2 in 0..n {
            for j1 in 0..s {
                if n * j1 + s * j2 < n * s {
                    let l = LambdaPoly::parse(ring, &format!("l2_{j1},{j2}")).unwrap();
                    expected = &expected - &CurvePoly::term(ring, &[j1, j2], &[0, 0], l);
                }
            }
        }
        ensure(eqs.equations() == [expected], || format!("({n},{s}) equation"))?;
        let v = eqs.spec().sequence().generators_v();
        ensure(v == [ExponentVector::new(&[0, n])], || format!("({n},{s}) V {v:?}"))?;
    }

    let spec = CurveSpec::from_json(r#"{"sequence":[2,3],"lambda":{"2:1,0":"-1"},"default_lambda":"zero"}"#)
        .map_err(|e| e.to_string())?;
    let text = build_equations(&spec).equations()[0].to_text();
    ensure(text == "X2^2 - X1^3 + X1", || text)
}

fn criterion_3() -> Outcome {
    for a in IDENTITY_CURVES {
        let eqs = common::symbolic(a);
        let n = divided_difference_matrix(&eqs).map_err(|e| e.to_string())?;
        ensure(diagonal(&n.det_h) == eqs.det_g1(), || format!("{a:?}: det H(X,X) != det G1"))?;
        let ff = compute(&eqs, &holomorphic_basis(eqs.spec().sequence())).map_err(|e| e.to_string())?;
        ensure(symmetry_check(&eqs, &ff.c).map_err(|e| e.to_string())?, || format!("{a:?}: not symmetric"))?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    for a in IDENTITY_CURVES {
        let eqs = common::symbolic(a);
        let seq = eqs.spec().sequence();
        let ff = compute(&eqs, &holomorphic_basis(seq)).map_err(|e| e.to_string())?;
        let bad = audit_c(&ff.c, seq, eqs.ring());
        ensure(bad.is_empty(), || format!("{a:?}: {} violations, first {:?}", bad.len(), bad[0]))?;
        ensure(!ff.c.entries.is_empty(), || format!("{a:?}: empty c-table"))?;
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let pinned: [(&str, &[(&str, f64)]); 2] = [
        (
            r#"{"sequence":[2,3],"lambda":{"2:1,0":"-1"},"default_lambda":"zero"}"#,
            &[
                ("tau_symmetric", 1e-10),
                ("legendre_relation", 1e-8),
                ("quasi_periodicity", 1e-6),
                ("sigma_odd", 1e-9),
                ("sigma_over_u_limit", 1e-6),
                ("im_tau_positive_definite", 0.0),
            ],
        ),
        (
            r#"{"sequence":[2,5],"lambda":{"2:1,0":"-1"},"default_lambda":"zero"}"#,
            &[
                ("tau_symmetric", 1e-10),
                ("legendre_relation", 1e-6),
                ("quasi_periodicity", 1e-6),
                ("im_tau_positive_definite", 0.0),
            ],
        ),
    ];
    let config = VerifyConfig { samples: 64, ..VerifyConfig::default() };
    for (json, required) in pinned {
        let eqs = build_equations(&CurveSpec::from_json(json).map_err(|e| e.to_string())?);
        let report = verify_report(&eqs, &config).map_err(|e| e.to_string())?;
        ensure(report.unsupported.is_none(), || format!("{json}: unsupported"))?;
        for c in &report.checks {
            ensure(c.passed, || format!("{json}: {c:?}"))?;
        }
        for (name, tol) in required {
            let c = report.checks.iter().find(|c| c.name == *name);
            let c = c.ok_or_else(|| format!("{json}: missing {name}"))?;
            ensure(c.tolerance == *tol, || format!("{json}: {name} tolerance {}", c.tolerance))?;
        }
        let im_tau = report.checks.iter().find(|c| c.name == "im_tau_positive_definite").unwrap();
        ensure(im_tau.residual > 0.0, || format!("{json}: smallest eigenvalue {}", im_tau.residual))?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    for (a, max_exp, seed) in common::CONFLUENCE_CASES {
        common::confluence(a, max_exp, seed, 100)?;
    }
    let eqs = build_equations(&common::weierstrass_spec(DefaultLambda::Symbolic, None, None));
    let q = expand_q(&eqs).map_err(|e| e.to_string())?;
    ensure(q == common::weierstrass_q_by_hand(&eqs), || format!("(2,3) q-table {:?}", q.entries))
}

fn main() {
    let criteria: [Criterion; 6] = [
        (1, criterion_1, Some(Duration::from_secs(10))),
        (2, criterion_2, None),
        (3, criterion_3, Some(Duration::from_secs(300))),
        (4, criterion_4, None),
        (5, criterion_5, Some(Duration::from_secs(120))),
        (6, criterion_6, None),
    ];
    let mut failed = 0;
    for (n, f, limit) in criteria {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = t0.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(()), Some(limit)) if elapsed > limit => Err(format!("over the {limit:?} limit")),
            (o, _) => o,
        };
        match outcome {
            Ok(()) => println!("criterion {n}: PASS ({:.2}s)", elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({:.2}s) {msg}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
