//! The `telesigma` command line. Every subcommand prints deterministic JSON,
//! or a short text rendering with `--text`.
//!
//! Exit codes: 0 success, 1 validation failure, 2 unsupported scope.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::curve::{build_equations, CanonicalEquations, CurveError, CurveSpec, DefaultLambda, Nonsingularity};
use crate::differentials::{divided_difference_matrix, holomorphic_basis, omega_oneform};
use crate::fundform::{self, symmetry_check};
use crate::riemann::{self, period_matrices, QuadConfig, RiemannError, SigmaFunction, ThetaParams, VerifyConfig};
use crate::semigroup::{check_telescopic, ExponentVector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "telesigma", version, about = "Telescopic curves: equations, differentials, fundamental forms, periods, sigma")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gcd chain, genus, gaps, generators V, Apery table and gap partition.
    Semigroup(Common),
    /// Canonical equations, Jacobian minors and (for concrete curves) a singularity test.
    Equations(Common),
    /// Holomorphic basis, the matrix H and the one-form Omega.
    Diffbasis(Common),
    /// q-table, solved c-table and second-kind differentials.
    Fundform(Common),
    /// Period matrices of a hyperelliptic curve.
    Periods(Numeric),
    /// Evaluate sigma at a point.
    Sigma {
        #[command(flatten)]
        numeric: Numeric,
        /// Comma-separated complex coordinates, e.g. `0.1+0.2i,0.3`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Vec<Complex64>,
    },
    /// Run every applicable check and report residuals.
    Verify {
        #[command(flatten)]
        numeric: Numeric,
        /// Replaces every floating-point tolerance of the report.
        #[arg(long, env = "TELESIGMA_TOLERANCE")]
        tolerance: Option<f64>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// A comma-separated sequence such as `4,6,5`, or a curve spec JSON file.
    input: String,
    /// Meaning of parameters the input leaves out (`zero` or `symbolic`).
    #[arg(long, env = "TELESIGMA_DEFAULT_LAMBDA")]
    default_lambda: Option<DefaultLambda>,
    /// Human-readable output instead of JSON.
    #[arg(long)]
    text: bool,
    /// Write to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Numeric {
    #[command(flatten)]
    common: Common,
    /// Absolute truncation error target for theta sums.
    #[arg(long, env = "TELESIGMA_THETA_ERROR", default_value_t = 1e-15)]
    theta_error: f64,
    /// Maximum bisection depth of the adaptive quadrature.
    #[arg(long, env = "TELESIGMA_QUAD_DEPTH", default_value_t = 12)]
    quad_depth: u32,
}

impl Numeric {
    fn quad(&self) -> QuadConfig {
        QuadConfig { max_depth: self.quad_depth, ..QuadConfig::default() }
    }

    fn theta(&self) -> ThetaParams {
        ThetaParams { error: self.theta_error, ..ThetaParams::default() }
    }
}

/// Why a command stopped, mapped onto an exit code.
#[derive(Debug)]
enum Failure {
    Invalid(String),
    Unsupported(String),
}

impl From<CurveError> for Failure {
    fn from(e: CurveError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<RiemannError> for Failure {
    fn from(e: RiemannError) -> Self {
        match e {
            RiemannError::Unsupported(_) => Failure::Unsupported(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<fundform::FundformError> for Failure {
    fn from(e: fundform::FundformError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

/// Output plus the exit code it should end with.
struct Outcome {
    json: Value,
    text: String,
    code: i32,
}

fn load_spec(common: &Common, default_for_sequence: DefaultLambda) -> Result<CurveSpec, Failure> {
    let input = common.input.trim();
    let as_sequence: Option<Vec<u32>> =
        input.split(',').map(|s| s.trim().parse::<u32>().ok()).collect::<Option<Vec<_>>>();
    match as_sequence {
        Some(a) => {
            let seq = check_telescopic(&a).map_err(|e| Failure::Invalid(e.to_string()))?;
            let dl = common.default_lambda.unwrap_or(default_for_sequence);
            Ok(CurveSpec::with_values(seq, &Default::default(), dl)?)
        }
        None => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| Failure::Invalid(format!("cannot read {input}: {e}")))?;
            let text = match common.default_lambda {
                Some(dl) => with_default_lambda(&text, dl)?,
                None => text,
            };
            Ok(CurveSpec::from_json(&text)?)
        }
    }
}

/// The flag wins over a `default_lambda` given in the file.
fn with_default_lambda(text: &str, dl: DefaultLambda) -> Result<String, Failure> {
    let mut v: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(_) => return Ok(text.to_string()),
    };
    if let Some(obj) = v.as_object_mut() {
        let name = match dl {
            DefaultLambda::Zero => "zero",
            DefaultLambda::Symbolic => "symbolic",
        };
        obj.insert("default_lambda".into(), Value::String(name.into()));
    }
    Ok(v.to_string())
}

fn vec_text(v: &ExponentVector) -> String {
    format!("({})", v.key())
}

fn semigroup_cmd(common: &Common) -> Result<Outcome, Failure> {
    let spec = load_spec(common, DefaultLambda::Symbolic)?;
    let seq = spec.sequence();
    let v = seq.generators_v();
    let apery = seq.apery_and_t();
    let partition = seq.gap_partition();
    let join = |xs: &[String]| xs.join(",");
    let d: Vec<String> = seq.gcd_chain().iter().map(u32::to_string).collect();
    let gaps: Vec<String> = seq.gaps().iter().map(u64::to_string).collect();
    let vs: Vec<String> = v.iter().map(vec_text).collect();
    let text = format!(
        "a = ({})\nd = ({})\ng = {}\ngaps = {{{}}}\nV = {{{}}}\nT = {{{}}}\npartition = ({})\n",
        join(&seq.weights().iter().map(u32::to_string).collect::<Vec<_>>()),
        join(&d),
        seq.genus(),
        join(&gaps),
        join(&vs),
        join(&apery.iter().map(|e| vec_text(&e.representative)).collect::<Vec<_>>()),
        join(&partition.iter().map(u64::to_string).collect::<Vec<_>>()),
    );
    let json = json!({
        "sequence": seq.weights(),
        "d": seq.gcd_chain(),
        "genus": seq.genus(),
        "gaps": seq.gaps(),
        "V": v.iter().map(|e| e.as_slice().to_vec()).collect::<Vec<_>>(),
        "apery": apery.iter().map(|e| json!({
            "residue": e.residue,
            "b": e.b,
            "M": e.representative.as_slice(),
        })).collect::<Vec<_>>(),
        "partition": partition,
    });
    Ok(Outcome { json, text, code: EXIT_OK })
}

fn nonsingularity_json(eqs: &CanonicalEquations) -> Value {
    if !eqs.spec().is_concrete() {
        return Value::Null;
    }
    match eqs.check_nonsingular() {
        Ok(Nonsingularity::Nonsingular) => json!({"result": "nonsingular"}),
        Ok(Nonsingularity::Singular { witness }) => json!({
            "result": "singular",
            "witness": witness.map(|w| w.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
        }),
        Ok(Nonsingularity::Inconclusive { reason }) => json!({"result": "inconclusive", "reason": reason}),
        Err(e) => json!({"result": "error", "reason": e.to_string()}),
    }
}

fn equations_cmd(common: &Common) -> Result<Outcome, Failure> {
    let spec = load_spec(common, DefaultLambda::Symbolic)?;
    let eqs = build_equations(&spec);
    let texts: Vec<String> = eqs.equations().iter().map(|f| f.to_text()).collect();
    let minors: Vec<String> = eqs.jacobian_minors().iter().map(|m| m.to_text()).collect();
    let ns = nonsingularity_json(&eqs);
    let mut text = String::new();
    for (k, f) in texts.iter().enumerate() {
        text.push_str(&format!("F{} = {}\n", k + 2, f));
    }
    for (k, m) in minors.iter().enumerate() {
        text.push_str(&format!("det G{} = {}\n", k + 1, m));
    }
    if let Some(r) = ns.get("result") {
        text.push_str(&format!("nonsingular check: {}\n", r.as_str().unwrap_or("?")));
    }
    let json = json!({
        "spec": spec.to_json(),
        "equations": texts,
        "jacobian_minors": minors,
        "nonsingularity": ns,
    });
    let code = match ns.get("result").and_then(Value::as_str) {
        Some("singular") => EXIT_INVALID,
        _ => EXIT_OK,
    };
    Ok(Outcome { json, text, code })
}

fn diffbasis_cmd(common: &Common) -> Result<Outcome, Failure> {
    let spec = load_spec(common, DefaultLambda::Symbolic)?;
    let eqs = build_equations(&spec);
    let seq = spec.sequence();
    let basis = holomorphic_basis(seq);
    let n = divided_difference_matrix(&eqs).map_err(|e| Failure::Invalid(e.to_string()))?;
    let omega = omega_oneform(&eqs).map_err(|e| Failure::Invalid(e.to_string()))?;
    let h: Vec<Vec<String>> =
        (0..n.h.nrows()).map(|i| (0..n.h.ncols()).map(|j| n.h.get(i, j).to_text()).collect()).collect();
    let mut text = String::new();
    for (k, e) in basis.entries.iter().enumerate() {
        text.push_str(&format!(
            "du{} = x^({}) dx1 / det G1   vanishing order {}\n",
            k + 1,
            e.exponent.key(),
            e.vanishing_order
        ));
    }
    text.push_str(&format!("det G1 = {}\n", eqs.det_g1().to_text()));
    text.push_str(&format!("det H = {}\n", n.det_h.to_text()));
    text.push_str(&format!("Omega = {}\n", omega.to_text()));
    let json = json!({
        "basis": basis.entries.iter().map(|e| json!({
            "k": e.exponent.key(),
            "vanishing_order": e.vanishing_order,
        })).collect::<Vec<_>>(),
        "det_g1": eqs.det_g1().to_text(),
        "H": h,
        "det_h": n.det_h.to_text(),
        "omega": omega.to_text(),
    });
    Ok(Outcome { json, text, code: EXIT_OK })
}

fn fundform_cmd(common: &Common) -> Result<Outcome, Failure> {
    let spec = load_spec(common, DefaultLambda::Symbolic)?;
    let eqs = build_equations(&spec);
    let basis = holomorphic_basis(spec.sequence());
    let ff = fundform::compute(&eqs, &basis)?;
    let symmetric = symmetry_check(&eqs, &ff.c)?;
    let mut json = ff.to_json(&eqs, &basis);
    json["symmetric"] = Value::Bool(symmetric);
    let ring = eqs.ring();
    let mut text = String::new();
    for ((i, j), v) in &ff.c.entries {
        text.push_str(&format!("c[{}|{}] = {}\n", i.key(), j.key(), v.to_text(ring)));
    }
    for (k, (e, terms)) in basis.entries.iter().zip(&ff.dr.entries).enumerate() {
        let parts: Vec<String> =
            terms.iter().map(|(j, v)| format!("({}) y^({})", v.to_text(ring), j.key())).collect();
        let body = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        text.push_str(&format!("dr{} [du = x^({})] = ({}) dy1 / det G1(y)\n", k + 1, e.exponent.key(), body));
    }
    text.push_str(&format!("symmetric: {symmetric}\n"));
    Ok(Outcome { json, text, code: if symmetric { EXIT_OK } else { EXIT_INVALID } })
}

fn complex_text(z: Complex64) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    format!("{:.12}{}{:.12}i", z.re, if im.is_sign_negative() { "-" } else { "+" }, im.abs())
}

fn matrix_text(name: &str, m: &riemann::CMatrix) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_text(m[(i, j)])).collect::<Vec<_>>().join("  "))
        .collect();
    format!("{name} =\n  {}\n", rows.join("\n  "))
}

fn periods_cmd(numeric: &Numeric) -> Result<Outcome, Failure> {
    let spec = load_spec(&numeric.common, DefaultLambda::Zero)?;
    let eqs = build_equations(&spec);
    let hp = period_matrices(&eqs, &numeric.quad())?;
    let mut periods = hp.periods.clone();
    if periods.genus() <= 2 {
        periods = SigmaFunction::new(&periods, numeric.theta())?.periods;
    }
    let mut text = String::new();
    for (name, m) in [
        ("omega1", &periods.omega1),
        ("omega2", &periods.omega2),
        ("eta1", &periods.eta1),
        ("eta2", &periods.eta2),
        ("tau", &periods.tau),
    ] {
        text.push_str(&matrix_text(name, m));
    }
    if let Some(ch) = &periods.characteristic {
        text.push_str(&format!("delta' = {:?}\ndelta'' = {:?}\n", ch.delta_prime, ch.delta_dblprime));
    }
    text.push_str(&format!("legendre residual = {:e}\n", periods.legendre_residual()));
    let json = json!({
        "branch": serde_json::to_value(&hp.branch).expect("serializable"),
        "periods": serde_json::to_value(&periods).expect("serializable"),
        "legendre_residual": periods.legendre_residual(),
    });
    Ok(Outcome { json, text, code: EXIT_OK })
}

fn sigma_cmd(numeric: &Numeric, u: &[Complex64]) -> Result<Outcome, Failure> {
    let spec = load_spec(&numeric.common, DefaultLambda::Zero)?;
    let eqs = build_equations(&spec);
    let hp = period_matrices(&eqs, &numeric.quad())?;
    let sigma = SigmaFunction::new(&hp.periods, numeric.theta())?;
    if u.len() != sigma.genus() {
        return Err(Failure::Invalid(format!("--u needs {} coordinates, got {}", sigma.genus(), u.len())));
    }
    let value = sigma.eval(u)?;
    let text = format!("sigma({}) = {}\n", u.iter().map(|z| z.to_string()).collect::<Vec<_>>().join(", "), value);
    let json = json!({
        "u": u.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "sigma": [value.re, value.im],
        "c": [sigma.c.re, sigma.c.im],
        "characteristic": sigma.characteristic,
    });
    Ok(Outcome { json, text, code: EXIT_OK })
}

fn verify_cmd(numeric: &Numeric, tolerance: Option<f64>, samples: usize, seed: u64) -> Result<Outcome, Failure> {
    let spec = load_spec(&numeric.common, DefaultLambda::Zero)?;
    let eqs = build_equations(&spec);
    let cfg = VerifyConfig { tolerance, theta: numeric.theta(), quad: numeric.quad(), samples, seed };
    let report = riemann::verify_report(&eqs, &cfg)?;
    let mut text = String::new();
    for c in &report.checks {
        text.push_str(&format!(
            "{} {}  residual {:e}  tolerance {:e}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance
        ));
    }
    if let Some(msg) = &report.unsupported {
        text.push_str(msg);
        text.push('\n');
    }
    let code = if !report.passed() {
        EXIT_INVALID
    } else if report.unsupported.is_some() {
        EXIT_UNSUPPORTED
    } else {
        EXIT_OK
    };
    Ok(Outcome { json: report.to_json(), text, code })
}

fn emit(common: &Common, out: &Outcome) -> Result<(), Failure> {
    let mut body = if common.text {
        out.text.clone()
    } else {
        serde_json::to_string_pretty(&out.json).expect("serializable")
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &common.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(|e| Failure::Invalid(e.to_string()))
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (common, result) = match &cli.command {
        Command::Semigroup(c) => (c, semigroup_cmd(c)),
        Command::Equations(c) => (c, equations_cmd(c)),
        Command::Diffbasis(c) => (c, diffbasis_cmd(c)),
        Command::Fundform(c) => (c, fundform_cmd(c)),
        Command::Periods(n) => (&n.common, periods_cmd(n)),
        Command::Sigma { numeric, u } => (&numeric.common, sigma_cmd(numeric, u)),
        Command::Verify { numeric, tolerance, samples, seed } => {
            (&numeric.common, verify_cmd(numeric, *tolerance, *samples, *seed))
        }
    };
    let outcome = result.and_then(|out| emit(common, &out).map(|()| out.code));
    match outcome {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Unsupported(msg)) => {
            eprintln!("unsupported: {msg}");
            EXIT_UNSUPPORTED
        }
    }
}
