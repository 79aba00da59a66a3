use std::time::Instant;

use telesigma::curve::{build_equations, CurveSpec};
use telesigma::riemann::{verify_report, VerifyConfig};

fn report(json: &str) -> telesigma::riemann::VerifyReport {
    let eqs = build_equations(&CurveSpec::from_json(json).unwrap());
    verify_report(&eqs, &VerifyConfig::default()).unwrap()
}

#[test]
fn elliptic_report_passes() {
    let t0 = Instant::now();
    let r = report(r#"{"sequence":[2,3],"lambda":{"2:1,0":"-1"},"default_lambda":"zero"}"#);
    for c in &r.checks {
        eprintln!("{c:?}");
    }
    eprintln!("{:?}", t0.elapsed());
    assert!(r.unsupported.is_none());
    assert!(r.passed());
}

#[test]
fn genus_two_report_passes() {
    let t0 = Instant::now();
    let r = report(r#"{"sequence":[2,5],"lambda":{"2:1,0":"-1"},"default_lambda":"zero"}"#);
    for c in &r.checks {
        eprintln!("{c:?}");
    }
    eprintln!("{:?} {:?}", t0.elapsed(), r.periods.as_ref().map(|p| p.characteristic.clone()));
    assert!(r.unsupported.is_none());
    assert!(r.passed());
}

#[test]
fn three_generator_report_is_symbolic_only() {
    let r = report(r#"{"sequence":[4,6,5],"lambda":{"2:0,0,0":"1","3:0,0,0":"1"},"default_lambda":"zero"}"#);
    assert_eq!(r.unsupported.as_deref(), Some("periods unsupported (a_1≠2); symbolic checks only"));
    for c in &r.checks {
        eprintln!("{c:?}");
    }
    assert!(r.passed());
}
