use std::sync::Arc;

use super::{CurvePoly, PolyError, Ring};

/// Dense row-major matrix of polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    pub rows: Vec<Vec<CurvePoly>>,
}

impl PolyMatrix {
    pub fn new(rows: Vec<Vec<CurvePoly>>) -> Self {
        PolyMatrix { rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn get(&self, i: usize, j: usize) -> &CurvePoly {
        &self.rows[i][j]
    }

    /// Drop column `k` (0-based).
    pub fn without_column(&self, k: usize) -> PolyMatrix {
        PolyMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .map(|(_, p)| p.clone())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn swap_rows(&self, a: usize, b: usize) -> PolyMatrix {
        let mut rows = self.rows.clone();
        rows.swap(a, b);
        PolyMatrix { rows }
    }

    pub fn map(&self, f: impl Fn(&CurvePoly) -> CurvePoly) -> PolyMatrix {
        PolyMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(&f).collect())
                .collect(),
        }
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &PolyMatrix, ring: &Arc<Ring>) -> Result<CurvePoly, PolyError> {
    let n = m.nrows();
    if m.rows.iter().any(|r| r.len() != n) {
        return Err(PolyError::NotSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    Ok(cofactor(&m.rows, ring))
}

fn cofactor(rows: &[Vec<CurvePoly>], ring: &Arc<Ring>) -> CurvePoly {
    match rows.len() {
        0 => CurvePoly::one(ring),
        1 => rows[0][0].clone(),
        2 => &(&rows[0][0] * &rows[1][1]) - &(&rows[0][1] * &rows[1][0]),
        n => {
            let mut acc = CurvePoly::zero(ring);
            for j in 0..n {
                if rows[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<CurvePoly>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = &rows[0][j] * &cofactor(&minor, ring);
                acc = if j % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            acc
        }
    }
}
