use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::IntegerMatrix;

/// `u * m * v == s` with `s` diagonal, nonnegative, d_1 | d_2 | ... and zeros last.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntegerMatrix,
    pub s: IntegerMatrix,
    pub v: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i).clone()).collect()
    }

    /// Nonzero diagonal entries, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().take(self.rank).collect()
    }
}

struct Work {
    a: IntegerMatrix,
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
    v: IntegerMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }
    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }
    fn add_row(&mut self, target: usize, src: usize, q: &BigInt) {
        self.a.add_row_multiple(target, src, q);
        self.u.add_row_multiple(target, src, q);
        self.u_inv.add_col_multiple(src, target, &-q);
    }
    fn add_col(&mut self, target: usize, src: usize, q: &BigInt) {
        self.a.add_col_multiple(target, src, q);
        self.v.add_col_multiple(target, src, q);
    }
    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }
}

/// Smith normal form. Pivot: smallest nonzero |entry| of the active block,
/// ties broken by lowest (row, column).
pub fn smith_normal_form(m: &IntegerMatrix) -> Smith {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.clone(),
        u: IntegerMatrix::identity(rows),
        u_inv: IntegerMatrix::identity(rows),
        v: IntegerMatrix::identity(cols),
    };
    let mut rank = 0;
    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = min_pivot(&w.a, t) else {
                return finish(w, rank);
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if w.a.get(i, t).is_zero() {
                    continue;
                }
                let q = w.a.get(i, t) / w.a.get(t, t);
                w.add_row(i, t, &-q);
                if !w.a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if w.a.get(t, j).is_zero() {
                    continue;
                }
                let q = w.a.get(t, j) / w.a.get(t, t);
                w.add_col(j, t, &-q);
                if !w.a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let piv = w.a.get(t, t).clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(w.a.get(i, j) % &piv).is_zero()));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a.get(t, t).is_negative() {
            w.negate_row(t);
        }
        rank += 1;
    }
    finish(w, rank)
}

fn min_pivot(a: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().map_or(true, |(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn finish(w: Work, rank: usize) -> Smith {
    Smith { u: w.u, s: w.a, v: w.v, u_inv: w.u_inv, rank }
}
