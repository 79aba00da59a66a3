//! Text form of polynomials.
//!
//! Terms are separated by ` + ` / ` - `, factors by `*`. A factor is a
//! rational `p/q`, a parameter `l{i}_{j1,...,jt}`, or a variable `X{k}` /
//! `Y{k}`, each optionally raised to `^e`. Terms are listed heaviest first
//! (see [`Ring::print_order`]) so printing a parsed string reproduces it.

use std::cmp::Ordering;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::curvepoly::ring_unit;
use super::{CurvePoly, LambdaMonomial, LambdaPoly, PolyError, Rational, Ring};

fn lambda_order(ring: &Ring, a: &LambdaMonomial, b: &LambdaMonomial) -> Ordering {
    let w = ring.lambda_weights();
    b.degree(w).cmp(&a.degree(w)).then_with(|| b.cmp(a))
}

fn power(name: &str, e: u32) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

fn push_term(out: &mut String, coeff: &Rational, factors: &[String]) {
    let negative = coeff.is_negative();
    if out.is_empty() {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    let mag = coeff.abs();
    let mut parts: Vec<String> = Vec::new();
    if !mag.is_one() || factors.is_empty() {
        parts.push(mag.to_string());
    }
    parts.extend(factors.iter().cloned());
    out.push_str(&parts.join("*"));
}

fn lambda_factors(ring: &Ring, m: &LambdaMonomial) -> Vec<String> {
    m.pairs()
        .iter()
        .map(|&(i, e)| power(&ring.lambda_keys()[usize::from(i)].name(), u32::from(e)))
        .collect()
}

impl LambdaPoly {
    pub fn to_text(&self, ring: &Ring) -> String {
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|a, b| lambda_order(ring, a.0, b.0));
        let mut out = String::new();
        for (m, c) in terms {
            push_term(&mut out, c, &lambda_factors(ring, m));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn parse(ring: &Arc<Ring>, s: &str) -> Result<LambdaPoly, PolyError> {
        let p = CurvePoly::parse(ring, s)?;
        if !p.terms().all(|(m, _)| m.iter().all(|&e| e == 0)) {
            return Err(PolyError::Parse {
                pos: 0,
                msg: "variables are not allowed in a parameter polynomial".into(),
            });
        }
        Ok(p.coefficient(&ring_unit(ring)).cloned().unwrap_or_default())
    }
}

impl CurvePoly {
    pub fn to_text(&self) -> String {
        let ring = self.ring();
        let t = ring.nvars();
        let mut monos: Vec<_> = self.terms().collect();
        monos.sort_by(|a, b| ring.print_order(a.0, b.0));
        let mut out = String::new();
        for (m, c) in monos {
            let mut vars = Vec::new();
            for k in 0..t {
                if m[k] > 0 {
                    vars.push(power(&format!("X{}", k + 1), u32::from(m[k])));
                }
            }
            for k in 0..t {
                if m[t + k] > 0 {
                    vars.push(power(&format!("Y{}", k + 1), u32::from(m[t + k])));
                }
            }
            let mut lterms: Vec<_> = c.terms().collect();
            lterms.sort_by(|a, b| lambda_order(ring, a.0, b.0));
            for (lm, q) in lterms {
                let mut factors = lambda_factors(ring, lm);
                factors.extend(vars.iter().cloned());
                push_term(&mut out, q, &factors);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn parse(ring: &Arc<Ring>, s: &str) -> Result<CurvePoly, PolyError> {
        let err = |pos: usize, msg: &str| PolyError::Parse {
            pos,
            msg: msg.to_string(),
        };
        let mut out = CurvePoly::zero(ring);
        if s.trim() == "0" {
            return Ok(out);
        }
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut sign = 1i32;
        let mut first = true;
        loop {
            while pos < bytes.len() && bytes[pos] == b' ' {
                pos += 1;
            }
            if pos >= bytes.len() {
                if first {
                    return Err(err(pos, "empty polynomial"));
                }
                return Err(err(pos, "dangling sign"));
            }
            if bytes[pos] == b'-' || bytes[pos] == b'+' {
                if bytes[pos] == b'-' {
                    sign = -sign;
                }
                pos += 1;
                continue;
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos] != b'+' && bytes[pos] != b'-' {
                pos += 1;
            }
            let term = s[start..pos].trim_end();
            parse_term(ring, term, start, sign, &mut out)?;
            first = false;
            sign = 1;
            if pos >= bytes.len() {
                break;
            }
        }
        Ok(out)
    }
}

fn parse_term(
    ring: &Arc<Ring>,
    term: &str,
    offset: usize,
    sign: i32,
    out: &mut CurvePoly,
) -> Result<(), PolyError> {
    let t = ring.nvars();
    let mut coeff = Rational::from_integer(sign.into());
    let mut mono = ring_unit(ring);
    let mut lpairs: Vec<(u16, u16)> = Vec::new();
    let mut at = offset;
    for factor in term.split('*') {
        let err = |msg: String| PolyError::Parse { pos: at, msg };
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (
                b,
                e.parse::<u32>()
                    .map_err(|_| err(format!("bad exponent in `{factor}`")))?,
            ),
            None => (factor, 1),
        };
        if base.is_empty() {
            return Err(err("empty factor".into()));
        }
        match base.as_bytes()[0] {
            b'l' => {
                let idx = ring
                    .lambda_index_by_name(base)
                    .ok_or_else(|| err(format!("unknown parameter `{base}`")))?;
                lpairs.push((idx as u16, exp as u16));
            }
            c @ (b'X' | b'Y') => {
                let k: usize = base[1..]
                    .parse()
                    .map_err(|_| err(format!("bad variable `{base}`")))?;
                if k == 0 || k > t {
                    return Err(err(format!("variable `{base}` out of range")));
                }
                let slot = if c == b'X' { k - 1 } else { t + k - 1 };
                mono[slot] += exp as u16;
            }
            _ => {
                let q = Rational::from_str(base)
                    .map_err(|_| err(format!("bad coefficient `{base}`")))?;
                if q.is_zero() {
                    return Err(err("zero coefficient".into()));
                }
                coeff *= num_traits::pow(q, exp as usize);
            }
        }
        at += factor.len() + 1;
    }
    let mut c = LambdaPoly::zero();
    c.add_term(LambdaMonomial::from_pairs(lpairs), coeff);
    out.add_term(mono, &c);
    Ok(())
}
