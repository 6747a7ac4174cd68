use std::str::FromStr;

use serde::Serialize;

use super::table::{IndexSet, PageTable};
use super::{g, is_power_of, is_prime};
use crate::error::{Error, Result};

/// Parity of the degree i in D(n, i); tables are stated for i = 0 (even) or
/// i = 1 (odd), rows in absolute degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(d: i64) -> Self {
        if d.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::Malformed(format!("parity must be even or odd, got {:?}", s))),
        }
    }
}

fn check(p: u64, n: u64, parity: Parity) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("p = {} is not a prime", p)));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    if p != 2 && parity == Parity::Odd {
        return Err(Error::Unsupported("for odd p, D(n, i) is D(n, 0) shifted by p·i; use the even table".into()));
    }
    Ok(())
}

fn copies(n: u64, k: u64) -> Vec<u64> {
    vec![n; k as usize]
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeIIPrediction {
    pub p: u64,
    pub n: u64,
    pub parity: Parity,
    pub e2: PageTable,
    pub e_infinity: PageTable,
    /// First page equal to E_∞.
    pub collapse_page: usize,
    /// Rows j whose E_2^{0,j} is a nonsplit extension of Z/p by (Z/n)^g.
    pub nonsplit_rows: Vec<i64>,
}

/// E_2 of the kind II sequence of Hom_{C_p}(W, D(n, i)), i = 0 or 1.
pub fn predict_type_ii_e2(p: u64, n: u64, parity: Parity) -> Result<TypeIIPrediction> {
    check(p, n, parity)?;
    let mut e2 = PageTable::default();
    let mut einf = PageTable::default();
    let divides = n % p == 0;
    let mut nonsplit_rows = Vec::new();
    let collapse_page;
    if p == 2 {
        let (corner, rows) = match parity {
            Parity::Even => ((0, 0), [(IndexSet::from(2, 2), 0), (IndexSet::from(1, 2), -2)]),
            Parity::Odd => ((0, 1), [(IndexSet::from(2, 2), 0), (IndexSet::from(1, 2), 2)]),
        };
        let corner_group = if parity == Parity::Even { 2 * n } else { n };
        e2.add(IndexSet::single(corner.0), IndexSet::single(corner.1), &[corner_group]);
        for (i, j) in rows {
            e2.add(i, IndexSet::single(j), &[2]);
        }
        if divides {
            collapse_page = 2;
            einf = e2.clone();
            if parity == Parity::Even {
                nonsplit_rows.push(0);
            }
        } else {
            collapse_page = 3;
            einf.add(IndexSet::single(corner.0), IndexSet::single(corner.1), &[n]);
        }
    } else {
        let pi = p as i64;
        for k in 0..=pi {
            let gk = g(p, k);
            let mut orders = copies(n, gk);
            if k % 2 == 0 && k <= pi - 3 {
                if divides {
                    orders.pop();
                    orders.push(p * n);
                    nonsplit_rows.push(-k);
                } else {
                    orders.push(p);
                }
            }
            e2.add(IndexSet::single(0), IndexSet::single(-k), &orders);
            einf.add(IndexSet::single(0), IndexSet::single(-k), &copies(n, gk));
        }
        e2.add(IndexSet::from(2, 2), IndexSet::single(0), &[p]);
        e2.add(IndexSet::from(2, 2), IndexSet::single(-pi), &[p]);
        if divides {
            collapse_page = 2;
            einf = e2.clone();
        } else {
            collapse_page = p as usize + 1;
        }
    }
    Ok(TypeIIPrediction { p, n, parity, e2, e_infinity: einf, collapse_page, nonsplit_rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeIPrediction {
    pub p: u64,
    pub n: u64,
    pub parity: Parity,
    pub e2: PageTable,
    pub e3: PageTable,
    /// Sources of the nonzero d_2: E_2^{i,j} -> E_2^{i+2,j-1}.
    pub d2_sources: Vec<(IndexSet, IndexSet)>,
    /// (kernel bidegree, quotient bidegree) of each nonsplit extension.
    pub nonsplit: Vec<((i64, i64), (i64, i64))>,
    pub collapse_page: usize,
}

/// E_2 and E_3 of the kind I sequence of Hom_{C_p}(W, D(n, i)), i = 0 or 1.
pub fn predict_type_i_pages(p: u64, n: u64, parity: Parity) -> Result<TypeIPrediction> {
    check(p, n, parity)?;
    let mut e2 = PageTable::default();
    let mut e3 = PageTable::default();
    let mut d2_sources = Vec::new();
    let mut nonsplit = Vec::new();
    let divides = n % p == 0;
    let one = IndexSet::single;
    if p == 2 {
        let top = if parity == Parity::Even { 0 } else { 1 };
        e2.add(one(0), one(top), &[n]);
        e3.add(one(0), one(top), &[n]);
        if divides {
            match parity {
                Parity::Even => {
                    e2.add(IndexSet::from(0, 1), one(-1), &[2]);
                    e2.add(IndexSet::from(1, 1), one(0), &[2]);
                    e3.add(IndexSet::range(0, 1, 1), one(-1), &[2]);
                    e3.add(IndexSet::from(2, 2), IndexSet::range(-1, 0, 1), &[2]);
                    d2_sources.push((IndexSet::from(1, 2), one(0)));
                    nonsplit.push(((1, -1), (0, 0)));
                }
                Parity::Odd => {
                    e2.add(IndexSet::from(0, 1), one(2), &[2]);
                    e2.add(IndexSet::from(1, 1), one(1), &[2]);
                    e3.add(IndexSet::from(1, 2), IndexSet::range(1, 2, 1), &[2]);
                    d2_sources.push((IndexSet::from(0, 2), one(2)));
                }
            }
        }
    } else {
        let pi = p as i64;
        for k in 0..pi {
            let j = -k;
            let mut orders = copies(n, g(p, k));
            e3.add(one(0), one(j), &orders);
            if divides && k % 2 == 1 && k < pi - 1 {
                orders.push(p);
            }
            e2.add(one(0), one(j), &orders);
        }
        if divides {
            e2.add(IndexSet::from(1, 1), IndexSet::range(1 - pi, 0, 1), &[p]);
            e3.add(IndexSet::from(2, 2), one(0), &[p]);
            e3.add(IndexSet::from(1, 2), one(1 - pi), &[p]);
            e3.add(one(1), IndexSet::range(2 - pi, -1, 2), &[p]);
            for j in (2 - pi)..=0 {
                let start = if j.rem_euclid(2) == 1 { 0 } else { 1 };
                d2_sources.push((IndexSet::from(start, 2), one(j)));
            }
            for k in (1..=pi - 2).step_by(2) {
                nonsplit.push(((1, -k), (0, 1 - k)));
            }
        }
    }
    let collapse_page = if divides { 3 } else { 2 };
    Ok(TypeIPrediction { p, n, parity, e2, e3, d2_sources, nonsplit, collapse_page })
}

/// The p-local E_2 of Hom_{Σ_p}(W, D'(n, i)), from the closed form, for any
/// prime p (column and row indices exchanged relative to the printed cases).
pub fn sigma_p_table(p: u64, n: u64, parity: Parity) -> Result<PageTable> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("p = {} is not a prime", p)));
    }
    if !is_power_of(n, p) {
        return Err(Error::Precondition(format!("n = {} is not a positive power of {}", n, p)));
    }
    let q = p as i64 - 1;
    let mut t = PageTable::default();
    let spacing = 2 * q as u64;
    match parity {
        Parity::Even => {
            t.add(IndexSet::single(0), IndexSet::single(0), &[p * n]);
            t.add(IndexSet::from(2 * q, spacing), IndexSet::single(0), &[p]);
            t.add(IndexSet::from(q, spacing), IndexSet::single(-(p as i64)), &[p]);
        }
        Parity::Odd => {
            t.add(IndexSet::single(0), IndexSet::single(1), &[n]);
            t.add(IndexSet::from(2 * q, spacing), IndexSet::single(0), &[p]);
            t.add(IndexSet::from(q, spacing), IndexSet::single(p as i64), &[p]);
        }
    }
    Ok(t)
}

/// E_2 (= E_∞) for the symmetric group on p letters; p = 2 uses the C_2 tables.
pub fn predict_sigma_p(p: u64, n: u64, parity: Parity) -> Result<PageTable> {
    if p == 2 {
        if !is_power_of(n, 2) {
            return Err(Error::Precondition(format!("n = {} is not a positive power of 2", n)));
        }
        return Ok(predict_type_ii_e2(2, n, parity)?.e2);
    }
    sigma_p_table(p, n, parity)
}
