use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complexes::Window;
use crate::error::{Error, Result};
use crate::exactlin::CyclicDecomposition;
use crate::spectral::SpectralSequencePage;

/// start, start + step, ... up to `end` (inclusive; `None` for no bound).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexSet {
    pub start: i64,
    pub end: Option<i64>,
    pub step: u64,
}

impl IndexSet {
    pub fn single(v: i64) -> Self {
        IndexSet { start: v, end: Some(v), step: 1 }
    }

    pub fn range(start: i64, end: i64, step: u64) -> Self {
        IndexSet { start, end: Some(end), step }
    }

    pub fn from(start: i64, step: u64) -> Self {
        IndexSet { start, end: None, step }
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.start && self.end.is_none_or(|e| x <= e) && (x - self.start) % self.step as i64 == 0
    }

    pub fn is_empty(&self) -> bool {
        self.end.is_some_and(|e| e < self.start)
    }

    /// Elements in [lo, hi].
    pub fn values_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        let hi = self.end.map_or(hi, |e| e.min(hi));
        let mut x = self.start;
        if x < lo {
            let k = (lo - x + self.step as i64 - 1) / self.step as i64;
            x += k * self.step as i64;
        }
        let mut out = Vec::new();
        while x <= hi {
            out.push(x);
            x += self.step as i64;
        }
        out
    }

    pub fn intersects(&self, other: &IndexSet) -> bool {
        if self.is_empty() || other.is_empty() {
            return false;
        }
        let lo = self.start.max(other.start);
        let hi = match (self.end, other.end) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => lo + (self.step * other.step) as i64,
        };
        // one period of the combined progression suffices
        let hi = hi.min(lo + (self.step * other.step) as i64);
        self.values_in(lo, hi).into_iter().any(|x| other.contains(x))
    }

    pub fn shifted(&self, by: i64) -> Self {
        IndexSet { start: self.start + by, end: self.end.map(|e| e + by), step: self.step }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.end {
            Some(e) if e == self.start => write!(f, "{}", self.start),
            Some(e) => write!(f, "{}:{}:{}", self.start, e, self.step),
            None => write!(f, "{}:inf:{}", self.start, self.step),
        }
    }
}

impl FromStr for IndexSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("index set {:?}: expected \"v\" or \"a:b:s\"", s));
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            [v] => Ok(IndexSet::single(v.parse().map_err(|_| bad())?)),
            [a, b, st] => {
                let start = a.parse().map_err(|_| bad())?;
                let step: u64 = st.parse().map_err(|_| bad())?;
                if step == 0 {
                    return Err(bad());
                }
                let end = if *b == "inf" { None } else { Some(b.parse().map_err(|_| bad())?) };
                Ok(IndexSet { start, end, step })
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Every (i, j) with i ∈ `i` and j ∈ `j` carries `group` (invariant factors).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub i: IndexSet,
    pub j: IndexSet,
    pub group: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageTable {
    pub patterns: Vec<Pattern>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellMismatch {
    pub i: i64,
    pub j: i64,
    pub expected: Vec<u64>,
    pub computed: String,
}

impl PageTable {
    /// Adds a pattern; trivial groups are dropped.
    pub fn add(&mut self, i: IndexSet, j: IndexSet, orders: &[u64]) {
        let group = CyclicDecomposition::from_u64(orders);
        if group.is_trivial() || i.is_empty() || j.is_empty() {
            return;
        }
        self.patterns.push(Pattern { i, j, group: group.to_u64().expect("small orders") });
    }

    pub fn validate(&self) -> Result<()> {
        for (a, p) in self.patterns.iter().enumerate() {
            for q in &self.patterns[a + 1..] {
                if p.i.intersects(&q.i) && p.j.intersects(&q.j) {
                    return Err(Error::Malformed(format!("patterns ({}, {}) and ({}, {}) overlap", p.i, p.j, q.i, q.j)));
                }
            }
        }
        Ok(())
    }

    pub fn group_at(&self, i: i64, j: i64) -> CyclicDecomposition {
        self.patterns
            .iter()
            .find(|p| p.i.contains(i) && p.j.contains(j))
            .map(|p| CyclicDecomposition::from_u64(&p.group))
            .unwrap_or_default()
    }

    pub fn shifted_rows(&self, by: i64) -> Self {
        PageTable { patterns: self.patterns.iter().map(|p| Pattern { i: p.i, j: p.j.shifted(by), group: p.group.clone() }).collect() }
    }

    /// Nonzero cells with i ≥ 0 and i + j in the window.
    pub fn cells_in(&self, w: Window) -> BTreeSet<(i64, i64)> {
        let mut out = BTreeSet::new();
        for p in &self.patterns {
            if p.j.end.is_some() {
                for j in p.j.values_in(i64::MIN / 4, i64::MAX / 4) {
                    for i in p.i.values_in((w.lo - j).max(0), w.hi - j) {
                        out.insert((i, j));
                    }
                }
            } else if p.i.end.is_some() {
                for i in p.i.values_in(0, i64::MAX / 4) {
                    for j in p.j.values_in(w.lo - i, w.hi - i) {
                        out.insert((i, j));
                    }
                }
            }
        }
        out
    }

    /// Cells of the window where the table and a computed page disagree.
    pub fn compare(&self, page: &SpectralSequencePage) -> Vec<CellMismatch> {
        let w = page.window;
        let mut cells = self.cells_in(w);
        cells.extend(page.entries.keys().copied());
        cells
            .into_iter()
            .filter(|&(i, j)| w.contains(i + j))
            .filter_map(|(i, j)| {
                let e = self.group_at(i, j);
                let c = page.group(i, j);
                (e != c).then(|| CellMismatch { i, j, expected: e.to_u64().unwrap_or_default(), computed: c.to_string() })
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: PageTable = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }
}

impl fmt::Display for PageTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.patterns {
            writeln!(f, "  i ∈ {:<12} j ∈ {:<12} {}", p.i.to_string(), p.j.to_string(), CyclicDecomposition::from_u64(&p.group))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_sets() {
        let s: IndexSet = "2:inf:2".parse().unwrap();
        assert!(s.contains(4) && !s.contains(3) && !s.contains(0));
        assert_eq!(s.to_string(), "2:inf:2");
        assert_eq!("-3".parse::<IndexSet>().unwrap(), IndexSet::single(-3));
        assert_eq!(IndexSet::range(-5, -1, 2).values_in(-10, 10), vec![-5, -3, -1]);
        assert!(!IndexSet::from(0, 2).intersects(&IndexSet::from(1, 2)));
        assert!(IndexSet::from(0, 2).intersects(&IndexSet::range(3, 6, 3)));
        assert!("1:2".parse::<IndexSet>().is_err());
        assert!("1:5:0".parse::<IndexSet>().is_err());
    }

    #[test]
    fn json_round_trip_and_overlap() {
        let mut t = PageTable::default();
        t.add(IndexSet::single(0), IndexSet::single(0), &[9]);
        t.add(IndexSet::from(2, 2), IndexSet::single(0), &[3]);
        t.add(IndexSet::single(5), IndexSet::single(5), &[1]);
        assert_eq!(t.patterns.len(), 2);
        let back = PageTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(t.to_json().contains("\"2:inf:2\""));
        t.patterns.push(Pattern { i: IndexSet::from(4, 4), j: IndexSet::single(0), group: vec![3] });
        assert!(t.validate().is_err());
    }
}
