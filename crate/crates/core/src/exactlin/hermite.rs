use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntegerMatrix;

/// Column Hermite form: `reduced == m * transform`, transform unimodular.
/// The first `rank` columns of `reduced` are the canonical lattice basis:
/// lower echelon, pivots positive, entries left of a pivot reduced into [0, pivot).
#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    pub reduced: IntegerMatrix,
    pub transform: IntegerMatrix,
    /// (row, column) of each pivot, columns 0..rank in order.
    pub pivots: Vec<(usize, usize)>,
}

impl ColumnEchelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Saturated basis of the integer kernel of the original matrix.
    pub fn kernel_basis(&self) -> IntegerMatrix {
        let idx: Vec<usize> = (self.rank()..self.transform.cols()).collect();
        self.transform.select_cols(&idx)
    }

    /// Canonical basis of the column lattice.
    pub fn lattice_basis(&self) -> IntegerMatrix {
        let idx: Vec<usize> = (0..self.rank()).collect();
        self.reduced.select_cols(&idx)
    }

    /// y with `reduced * y == b`, supported on the pivot columns.
    pub fn solve_reduced(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        solve_echelon(&self.reduced, &self.pivots, b)
    }
}

pub fn column_hermite(m: &IntegerMatrix) -> ColumnEchelon {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut v = IntegerMatrix::identity(cols);
    let mut pivots = Vec::new();
    let mut c = 0;
    for i in 0..rows {
        if c == cols {
            break;
        }
        for j in c + 1..cols {
            if a.get(i, j).is_zero() {
                continue;
            }
            if a.get(i, c).is_zero() {
                a.swap_cols(c, j);
                v.swap_cols(c, j);
                continue;
            }
            let x = a.get(i, c).clone();
            let y = a.get(i, j).clone();
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let (xg, yg) = (&x / &g, &y / &g);
            // [s, -y/g; t, x/g] has determinant 1
            a.combine_cols(c, j, &s, &t, &-&yg, &xg);
            v.combine_cols(c, j, &s, &t, &-&yg, &xg);
        }
        if a.get(i, c).is_zero() {
            continue;
        }
        if a.get(i, c).is_negative() {
            a.negate_col(c);
            v.negate_col(c);
        }
        let piv = a.get(i, c).clone();
        for k in 0..c {
            let q = a.get(i, k).div_floor(&piv);
            if !q.is_zero() {
                a.add_col_multiple(k, c, &-&q);
                v.add_col_multiple(k, c, &-&q);
            }
        }
        pivots.push((i, c));
        c += 1;
    }
    ColumnEchelon { reduced: a, transform: v, pivots }
}

/// Forward substitution in a lower column echelon matrix.
pub(crate) fn solve_echelon(e: &IntegerMatrix, pivots: &[(usize, usize)], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut residual = b.to_vec();
    let mut y = vec![BigInt::zero(); e.cols()];
    let mut next = 0;
    for i in 0..e.rows() {
        if next < pivots.len() && pivots[next].0 == i {
            let c = pivots[next].1;
            let piv = e.get(i, c);
            let (q, r) = residual[i].div_rem(piv);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for k in i..e.rows() {
                    let x = e.get(k, c);
                    if !x.is_zero() {
                        residual[k] -= x * &q;
                    }
                }
            }
            y[c] = q;
            next += 1;
        } else if !residual[i].is_zero() {
            return None;
        }
    }
    Some(y)
}
