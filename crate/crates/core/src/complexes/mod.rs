//! Cochain complexes of free abelian groups, graded abelian groups and
//! their cohomology.

mod complex;
mod graded;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub use complex::{
    build_cyclic_complex, cocycle_order, cohomology, complex_from_graded, direct_sum, induced_map_on_cohomology, tensor,
    tensor_indexed, ChainMap, CochainComplex, Cocycle, TensorIndex,
};
pub use graded::{Count, Family, GradedAbelianGroup};

/// Closed degree range `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self, Error> {
        if lo > hi {
            return Err(Error::Malformed(format!("empty window {}:{}", lo, hi)));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, m: i64) -> bool {
        self.lo <= m && m <= self.hi
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

impl FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let (a, b) = s.split_once(':').ok_or_else(|| Error::Malformed(format!("window {:?} is not lo:hi", s)))?;
        let lo = a.trim().parse().map_err(|_| Error::Malformed(format!("bad window start {:?}", a)))?;
        let hi = b.trim().parse().map_err(|_| Error::Malformed(format!("bad window end {:?}", b)))?;
        Window::new(lo, hi)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}
