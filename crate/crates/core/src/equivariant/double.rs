use std::borrow::Cow;

use num_bigint::BigInt;

use super::action::EquivariantComplex;
use super::resolution::Resolution;
use crate::complexes::{cohomology, CochainComplex, GradedAbelianGroup, Window};
use crate::error::{Error, Result};
use crate::exactlin::IntegerMatrix;

/// First-quadrant-in-i double complex E^{i,j}, 0 ≤ i < columns, row_lo ≤ j ≤ row_hi.
/// Horizontal d : (i,j) -> (i+1,j), vertical d' : (i,j) -> (i,j+1), d d' = d' d.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    columns: usize,
    row_lo: i64,
    row_hi: i64,
    ranks: Vec<Vec<usize>>,
    horizontal: Vec<Vec<IntegerMatrix>>,
    vertical: Vec<Vec<IntegerMatrix>>,
    truncated: bool,
    margin: usize,
}

impl DoubleComplex {
    /// `horizontal[i][j - row_lo]` for i < columns - 1; `vertical[i][j - row_lo]` for j < row_hi.
    /// A truncated double complex is the quotient by the columns ≥ `columns`.
    pub fn new(
        row_lo: i64,
        ranks: Vec<Vec<usize>>,
        horizontal: Vec<Vec<IntegerMatrix>>,
        vertical: Vec<Vec<IntegerMatrix>>,
        truncated: bool,
        margin: usize,
    ) -> Result<Self> {
        let columns = ranks.len();
        let nrows = ranks.first().map_or(0, Vec::len);
        if ranks.iter().any(|r| r.len() != nrows) {
            return Err(Error::DimensionMismatch("ragged rank table".into()));
        }
        let dc = DoubleComplex {
            columns,
            row_lo,
            row_hi: row_lo + nrows as i64 - 1,
            ranks,
            horizontal,
            vertical,
            truncated,
            margin,
        };
        dc.validate()?;
        Ok(dc)
    }

    /// The single-row double complex with row 0 equal to c (degrees ≥ 0).
    pub fn from_row(c: &CochainComplex) -> Result<Self> {
        let Some((lo, hi)) = c.support() else {
            return DoubleComplex::new(0, vec![], vec![], vec![], false, 0);
        };
        if lo < 0 {
            return Err(Error::Precondition("row complexes must live in degrees ≥ 0".into()));
        }
        let ranks = (0..=hi).map(|i| vec![c.rank(i)]).collect();
        let horizontal = (0..hi).map(|i| vec![c.differential(i).into_owned()]).collect();
        let vertical = (0..=hi).map(|_| vec![]).collect();
        DoubleComplex::new(0, ranks, horizontal, vertical, false, 0)
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rows(&self) -> (i64, i64) {
        (self.row_lo, self.row_hi)
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn rank(&self, i: i64, j: i64) -> usize {
        if i < 0 || i as usize >= self.columns || j < self.row_lo || j > self.row_hi {
            return 0;
        }
        self.ranks[i as usize][(j - self.row_lo) as usize]
    }

    pub fn horizontal(&self, i: i64, j: i64) -> Cow<'_, IntegerMatrix> {
        if i >= 0 && j >= self.row_lo && j <= self.row_hi && (i as usize) + 1 < self.columns {
            if let Some(m) = self.horizontal.get(i as usize).and_then(|c| c.get((j - self.row_lo) as usize)) {
                return Cow::Borrowed(m);
            }
        }
        Cow::Owned(IntegerMatrix::zeros(self.rank(i + 1, j), self.rank(i, j)))
    }

    pub fn vertical(&self, i: i64, j: i64) -> Cow<'_, IntegerMatrix> {
        if i >= 0 && j >= self.row_lo && j < self.row_hi {
            if let Some(m) = self.vertical.get(i as usize).and_then(|c| c.get((j - self.row_lo) as usize)) {
                return Cow::Borrowed(m);
            }
        }
        Cow::Owned(IntegerMatrix::zeros(self.rank(i, j + 1), self.rank(i, j)))
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.columns as i64 {
            for j in self.row_lo..=self.row_hi {
                let h = self.horizontal(i, j);
                let v = self.vertical(i, j);
                if h.cols() != self.rank(i, j) || h.rows() != self.rank(i + 1, j) {
                    return Err(Error::DimensionMismatch(format!("horizontal map at ({}, {}) has wrong shape", i, j)));
                }
                if v.cols() != self.rank(i, j) || v.rows() != self.rank(i, j + 1) {
                    return Err(Error::DimensionMismatch(format!("vertical map at ({}, {}) has wrong shape", i, j)));
                }
                if !self.horizontal(i + 1, j).checked_mul(&h)?.is_zero() {
                    return Err(Error::Precondition(format!("d∘d ≠ 0 at ({}, {})", i, j)));
                }
                if !self.vertical(i, j + 1).checked_mul(&v)?.is_zero() {
                    return Err(Error::Precondition(format!("d'∘d' ≠ 0 at ({}, {})", i, j)));
                }
                let a = self.horizontal(i, j + 1).checked_mul(&v)?;
                let b = self.vertical(i + 1, j).checked_mul(&h)?;
                if a != b {
                    return Err(Error::Precondition(format!("d and d' do not commute at ({}, {})", i, j)));
                }
            }
        }
        Ok(())
    }

    /// Largest total degree whose cohomology is unaffected by the truncation.
    pub fn exact_through(&self) -> Option<i64> {
        self.truncated.then(|| self.columns as i64 - 1 + self.row_lo - 1)
    }
}

/// E_0^{i,j} = Hom_{C_p}(W_i, D^j) ≅ D^j; horizontal x ↦ (t-1)x from even
/// columns and x ↦ Nx from odd ones; vertical is the differential of D.
pub fn equivariant_hom_double_complex(w: &Resolution, d: &EquivariantComplex) -> Result<DoubleComplex> {
    if w.p != d.p {
        return Err(Error::Precondition(format!("resolution for p = {} but action of order {}", w.p, d.p)));
    }
    let Some((jlo, jhi)) = d.complex.support() else {
        return DoubleComplex::new(0, vec![], vec![], vec![], true, w.p as usize + 2);
    };
    let columns = w.length + 1;
    let rows: Vec<i64> = (jlo..=jhi).collect();
    let ranks = (0..columns).map(|_| rows.iter().map(|&j| d.complex.rank(j)).collect()).collect();
    let tm: Vec<IntegerMatrix> = rows.iter().map(|&j| d.group_ring_matrix(j, &w.boundary(1).coeffs)).collect();
    let nm: Vec<IntegerMatrix> = rows.iter().map(|&j| d.group_ring_matrix(j, &w.boundary(2).coeffs)).collect();
    let horizontal = (0..columns - 1).map(|i| if i % 2 == 0 { tm.clone() } else { nm.clone() }).collect();
    let vert: Vec<IntegerMatrix> = rows[..rows.len() - 1].iter().map(|&j| d.complex.differential(j).into_owned()).collect();
    let vertical = (0..columns).map(|_| vert.clone()).collect();
    DoubleComplex::new(jlo, ranks, horizontal, vertical, true, w.p as usize + 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub i: i64,
    pub j: i64,
    pub offset: usize,
    pub len: usize,
}

/// Tot^m = ⊕_{i+j=m} E^{i,j}, blocks ordered by i; d_tot = d + (-1)^i d'.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub complex: CochainComplex,
    pub double: DoubleComplex,
    pub window: Window,
    lo: i64,
    blocks: Vec<Vec<Block>>,
}

impl TotalComplex {
    pub fn blocks(&self, m: i64) -> &[Block] {
        if m < self.lo {
            return &[];
        }
        self.blocks.get((m - self.lo) as usize).map_or(&[], |v| v.as_slice())
    }

    pub fn block(&self, m: i64, i: i64) -> Option<Block> {
        self.blocks(m).iter().find(|b| b.i == i).copied()
    }

    pub fn dim(&self, m: i64) -> usize {
        self.complex.rank(m)
    }

    /// Vector of Tot^{i+j} supported on block (i, j).
    pub fn embed(&self, i: i64, j: i64, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let m = i + j;
        let b = self.block(m, i).ok_or_else(|| Error::Precondition(format!("no block at ({}, {})", i, j)))?;
        if b.len != x.len() {
            return Err(Error::DimensionMismatch(format!("block ({}, {}) has rank {}", i, j, b.len)));
        }
        let mut v = vec![BigInt::from(0); self.dim(m)];
        v[b.offset..b.offset + b.len].clone_from_slice(x);
        Ok(v)
    }

    /// Component of v ∈ Tot^m in column i.
    pub fn component(&self, m: i64, v: &[BigInt], i: i64) -> Vec<BigInt> {
        match self.block(m, i) {
            Some(b) => v[b.offset..b.offset + b.len].to_vec(),
            None => vec![],
        }
    }

    /// Largest total degree where the truncated complex agrees with the full one
    /// in degrees m-1, m, m+1 and m+2.
    pub fn pages_certified_through(&self) -> i64 {
        self.double.exact_through().map_or(i64::MAX, |e| e - 1)
    }

    pub fn cohomology(&self) -> Result<GradedAbelianGroup> {
        cohomology(&self.complex, self.window)
    }
}

/// Totalizes D; `safe_window` must stay `margin` degrees clear of the truncation.
pub fn totalize(dc: &DoubleComplex, safe_window: Window) -> Result<TotalComplex> {
    if dc.is_truncated() {
        let certified = dc.columns() as i64 - 1 + dc.rows().0 - dc.margin() as i64;
        if safe_window.hi > certified {
            return Err(Error::InsufficientPadding { requested: safe_window.hi, certified });
        }
    }
    let (row_lo, row_hi) = dc.rows();
    let cols = dc.columns() as i64;
    if cols == 0 || row_hi < row_lo {
        return Ok(TotalComplex {
            complex: CochainComplex::zero(),
            double: dc.clone(),
            window: safe_window,
            lo: 0,
            blocks: vec![],
        });
    }
    let (lo, hi) = (row_lo, cols - 1 + row_hi);
    let mut blocks = Vec::new();
    for m in lo..=hi {
        let mut off = 0;
        let mut v = Vec::new();
        for i in 0..cols {
            let j = m - i;
            if j < row_lo || j > row_hi {
                continue;
            }
            let len = dc.rank(i, j);
            v.push(Block { i, j, offset: off, len });
            off += len;
        }
        blocks.push(v);
    }
    let dim = |m: i64| blocks[(m - lo) as usize].iter().map(|b| b.len).sum::<usize>();
    let find = |m: i64, i: i64| blocks[(m - lo) as usize].iter().find(|b| b.i == i).copied();
    let mut diffs = Vec::new();
    for m in lo..hi {
        let mut d = IntegerMatrix::zeros(dim(m + 1), dim(m));
        for b in &blocks[(m - lo) as usize] {
            if b.len == 0 {
                continue;
            }
            if let Some(t) = find(m + 1, b.i + 1) {
                d.set_block(t.offset, b.offset, &dc.horizontal(b.i, b.j));
            }
            if let Some(t) = find(m + 1, b.i) {
                let v = dc.vertical(b.i, b.j);
                let v = if b.i % 2 == 0 { v.into_owned() } else { v.scaled(&BigInt::from(-1)) };
                d.set_block(t.offset, b.offset, &v);
            }
        }
        diffs.push(d);
    }
    let ranks = (lo..=hi).map(dim).collect();
    let mut complex = CochainComplex::new(lo, ranks, diffs, None)?;
    if let Some(e) = dc.exact_through() {
        complex = complex.with_reliable_through(e);
    }
    Ok(TotalComplex { complex, double: dc.clone(), window: safe_window, lo, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{build_cyclic_complex, direct_sum};
    use crate::equivariant::{cyclic_power, periodic_resolution};

    #[test]
    fn single_row_total_is_the_row() {
        let c = direct_sum(&[build_cyclic_complex(4, 2), build_cyclic_complex(0, 0)]);
        let dc = DoubleComplex::from_row(&c).unwrap();
        let t = totalize(&dc, Window::new(0, 3).unwrap()).unwrap();
        for m in 0..3 {
            assert_eq!(t.complex.differential(m).into_owned(), c.differential(m).into_owned());
        }
    }

    #[test]
    fn padding_is_enforced() {
        let d = cyclic_power(&build_cyclic_complex(3, 0), 3).unwrap();
        let w = periodic_resolution(3, 8).unwrap();
        let dc = equivariant_hom_double_complex(&w, &d).unwrap();
        // columns 0..=8, rows -3..=0: certified through 8 - 3 - 5 = 0
        assert!(totalize(&dc, Window::new(-3, 0).unwrap()).is_ok());
        assert!(matches!(
            totalize(&dc, Window::new(-3, 1).unwrap()),
            Err(Error::InsufficientPadding { requested: 1, certified: 0 })
        ));
    }

    #[test]
    fn longer_truncation_does_not_change_safe_cohomology() {
        let d = cyclic_power(&build_cyclic_complex(3, 1), 3).unwrap();
        let win = Window::new(-1, 6).unwrap();
        let mut prev = None;
        for len in [11, 12, 13] {
            let w = periodic_resolution(3, len).unwrap();
            let dc = equivariant_hom_double_complex(&w, &d).unwrap();
            let h = totalize(&dc, win).unwrap().cohomology().unwrap();
            if let Some(p) = prev {
                assert_eq!(p, h);
            }
            prev = Some(h);
        }
    }
}
