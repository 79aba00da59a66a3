//! Holomorphic differentials `x^k dx_1 / det G_1(x)` and the
//! divided-difference matrix `H(X, Y)` behind the one-form `Omega(x, y)`.

use serde::Serialize;

use crate::curve::CanonicalEquations;
use crate::poly::{determinant, CurvePoly, PolyError, PolyMatrix, Var, VarImage};
use crate::semigroup::{ExponentVector, TelescopicSequence};

/// One basis element `x^k dx_1 / det G_1(x)` together with its order of
/// vanishing at infinity, `2g - 2 - psi(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HolomorphicEntry {
    pub exponent: ExponentVector,
    pub vanishing_order: u64,
}

/// `du_1, ..., du_g` in that order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferentialBasis {
    pub entries: Vec<HolomorphicEntry>,
}

impl DifferentialBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn exponents(&self) -> impl Iterator<Item = &ExponentVector> {
        self.entries.iter().map(|e| &e.exponent)
    }
}

/// Exponents `k` in `B(A_t)` with `psi(k) <= 2g - 2`, by descending weight,
/// so that `du_g = dx_1 / det G_1` vanishes to order `2g - 2` at infinity.
pub fn holomorphic_basis(seq: &TelescopicSequence) -> DifferentialBasis {
    let g = u64::from(seq.genus());
    if g == 0 {
        return DifferentialBasis { entries: Vec::new() };
    }
    let top = 2 * g - 2;
    let mut ks = seq.basis_b(top);
    ks.reverse();
    DifferentialBasis {
        entries: ks
            .into_iter()
            .map(|k| {
                let w = seq.psi(&k);
                HolomorphicEntry { exponent: k, vanishing_order: top - w }
            })
            .collect(),
    }
}

/// `H = (h_ij)_{i,j = 2..t}` and its determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearFormNumerator {
    pub h: PolyMatrix,
    pub det_h: CurvePoly,
}

/// `h_ij = [F_i(Y_1..Y_{j-1}, X_j, ..) - F_i(Y_1..Y_j, X_{j+1}, ..)] / (X_j - Y_j)`.
pub fn divided_difference(eqs: &CanonicalEquations, i: usize, j: usize) -> Result<CurvePoly, PolyError> {
    let ring = eqs.ring();
    let t = ring.nvars();
    let f = &eqs.equations()[i - 2];
    let images: Vec<VarImage> = (0..t)
        .map(|k| if k + 1 < j { VarImage::Var(Var::Y(k)) } else { VarImage::Keep })
        .chain((0..t).map(|_| VarImage::Keep))
        .collect();
    let upper = f.substitute(&images);
    let mut lower_images = images;
    lower_images[j - 1] = VarImage::Var(Var::Y(j - 1));
    let lower = f.substitute(&lower_images);
    (&upper - &lower).div_x_minus_y(j - 1)
}

/// Assemble `H` for `i, j = 2..t` from exact divided differences.
pub fn divided_difference_matrix(eqs: &CanonicalEquations) -> Result<BilinearFormNumerator, PolyError> {
    let ring = eqs.ring();
    let t = ring.nvars();
    let rows = (2..=t)
        .map(|i| (2..=t).map(|j| divided_difference(eqs, i, j)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let h = PolyMatrix::new(rows);
    let det_h = determinant(&h, ring)?;
    Ok(BilinearFormNumerator { h, det_h })
}

/// `Omega(x, y) = det H(x, y) / ((x_1 - y_1) det G_1(x)) dx_1`, kept as its
/// unreduced numerator and denominator factors.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaForm {
    pub numerator: CurvePoly,
    pub det_g1_x: CurvePoly,
}

impl OmegaForm {
    pub fn to_text(&self) -> String {
        format!("({}) / ((X1 - Y1) * ({})) dX1", self.numerator.to_text(), self.det_g1_x.to_text())
    }
}

pub fn omega_oneform(eqs: &CanonicalEquations) -> Result<OmegaForm, PolyError> {
    let n = divided_difference_matrix(eqs)?;
    Ok(OmegaForm { numerator: n.det_h, det_g1_x: eqs.det_g1() })
}

/// Exponents `i` in `B(A_t)` with `psi(i) <= pole_bound`: the forms
/// `x^i dx_1 / det G_1(x)` holomorphic away from infinity.
pub fn second_kind_space_basis(seq: &TelescopicSequence, pole_bound: u64) -> Vec<ExponentVector> {
    seq.basis_b(pole_bound)
}

/// Bound `sum_{k>=2} a_k (d_{k-1}/d_k - 1)` on the weight of any
/// monomial in `det H`.
pub fn det_h_degree_bound(seq: &TelescopicSequence) -> u64 {
    (1..seq.len()).map(|k| u64::from(seq.weights()[k]) * u64::from(seq.step(k) - 1)).sum()
}

/// `det H(X, X)`, i.e. `Y_k -> X_k`.
pub fn diagonal(p: &CurvePoly) -> CurvePoly {
    let t = p.ring().nvars();
    let images: Vec<VarImage> =
        (0..t).map(|_| VarImage::Keep).chain((0..t).map(|k| VarImage::Var(Var::X(k)))).collect();
    p.substitute(&images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_equations, CurveSpec};
    use crate::semigroup::check_telescopic;

    fn symbolic(a: &[u32]) -> CanonicalEquations {
        build_equations(&CurveSpec::symbolic(check_telescopic(a).unwrap()))
    }

    #[test]
    fn basis_orders() {
        let ks = |a: &[u32]| {
            holomorphic_basis(&check_telescopic(a).unwrap()).entries.iter().map(|e| e.exponent.key()).collect::<Vec<_>>()
        };
        assert_eq!(ks(&[2, 3]), ["0,0"]);
        assert_eq!(ks(&[4, 6, 5]), ["0,1,0", "0,0,1", "1,0,0", "0,0,0"]);
        assert_eq!(ks(&[2, 7]), ["2,0", "1,0", "0,0"]);
        let b = holomorphic_basis(&check_telescopic(&[4, 6, 5]).unwrap());
        assert_eq!(b.entries.iter().map(|e| e.vanishing_order).collect::<Vec<_>>(), [0, 1, 2, 6]);
    }

    #[test]
    fn h_for_the_cusp_family() {
        let s = CurveSpec::with_values(
            check_telescopic(&[2, 3]).unwrap(),
            &Default::default(),
            crate::curve::DefaultLambda::Zero,
        )
        .unwrap();
        let eqs = build_equations(&s);
        let n = divided_difference_matrix(&eqs).unwrap();
        assert_eq!(n.det_h.to_text(), "X2 + Y2");
        let omega = omega_oneform(&eqs).unwrap();
        assert_eq!(omega.to_text(), "(X2 + Y2) / ((X1 - Y1) * (2*X2)) dX1");
    }

    #[test]
    fn diagonal_of_det_h_is_det_g1() {
        for a in [&[2u32, 3][..], &[2, 5], &[3, 4], &[4, 6, 5]] {
            let eqs = symbolic(a);
            let n = divided_difference_matrix(&eqs).unwrap();
            assert_eq!(diagonal(&n.det_h), eqs.det_g1(), "{a:?}");
            let (deg, homogeneous) = n.det_h.weighted_degree();
            assert!(homogeneous);
            assert_eq!(deg, Some(det_h_degree_bound(eqs.ring().sequence())));
        }
    }

    #[test]
    fn second_kind_space() {
        let keys = |a: &[u32], b| {
            second_kind_space_basis(&check_telescopic(a).unwrap(), b).iter().map(|e| e.key()).collect::<Vec<_>>()
        };
        assert_eq!(keys(&[2, 3], 2), ["0,0", "1,0"]);
        assert_eq!(keys(&[2, 3], 0), ["0,0"]);
        assert_eq!(keys(&[4, 6, 5], 10).len(), 7);
    }
}
