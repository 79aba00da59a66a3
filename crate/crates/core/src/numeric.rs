//! Small floating-point helpers shared by the singularity witness search and
//! the period layer.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Evaluate `sum c_k z^k` (coefficients lowest degree first) and its
/// derivative by Horner's rule.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of a univariate polynomial given lowest degree first.
/// Trailing zero coefficients are trimmed; companion-matrix eigenvalues are
/// polished by a few Newton steps.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() <= 1e-300 * scale) {
        c.pop();
    }
    let zeros = c.iter().take_while(|x| x.norm() <= 1e-300 * scale).count();
    let c = c.split_off(zeros);
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let n = c.len() - 1;
    if n == 0 {
        return roots;
    }
    let lead = c[n];
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let eig: Vec<Complex64> = match comp.try_schur(1e-15, 10_000).and_then(|s| s.eigenvalues()) {
        Some(e) => e.iter().copied().collect(),
        None => durand_kerner(&c),
    };
    roots.extend(eig.iter().map(|&z0| {
        let mut z = z0;
        for _ in 0..8 {
            let (p, dp) = horner(&c, z);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            z -= step;
            if step.norm() <= 1e-16 * z.norm().max(1.0) {
                break;
            }
        }
        z
    }));
    roots
}

/// Simultaneous iteration for all roots; the fallback when the companion
/// matrix resists the QR iteration.
fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let radius = 1.0 + monic[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let seed = Complex64::from_polar(0.4 * radius, 0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| seed.powu(k as u32 + 1) / seed.norm().powi(k as i32))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, _) = horner(&monic, z[i]);
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = p / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved <= 1e-15 * radius {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_x5_minus_x() {
        let mut c = vec![Complex64::new(0.0, 0.0); 6];
        c[1] = Complex64::new(-1.0, 0.0);
        c[5] = Complex64::new(1.0, 0.0);
        let mut r = poly_roots(&c);
        r.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let expect = [(-1.0, 0.0), (0.0, -1.0), (0.0, 0.0), (0.0, 1.0), (1.0, 0.0)];
        for (z, (re, im)) in r.iter().zip(expect) {
            assert!((z - Complex64::new(re, im)).norm() < 1e-12, "{z}");
        }
    }
}
