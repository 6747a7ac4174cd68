use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactlin::{prime_power_parts, CyclicDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    pub fn is_infinite(self) -> bool {
        matches!(self, Count::Infinite)
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => s.serialize_u64(*n),
            Count::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Count::Finite(n)),
            Raw::S(s) if s == "inf" => Ok(Count::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("count must be an integer or \"inf\", got {:?}", s))),
        }
    }
}

/// `multiplicity` copies of Z/order in each of the degrees
/// first_degree, first_degree + period, ... (`count` of them). Order 0 is Z.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Family {
    pub first_degree: i64,
    pub period: u64,
    pub count: Count,
    pub order: u64,
    pub multiplicity: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl Family {
    pub fn single(degree: i64, order: u64, multiplicity: u64) -> Self {
        Family { first_degree: degree, period: 1, count: Count::Finite(1), order, multiplicity, provenance: None }
    }

    pub fn infinite(first_degree: i64, period: u64, order: u64, multiplicity: u64) -> Self {
        Family { first_degree, period, count: Count::Infinite, order, multiplicity, provenance: None }
    }

    pub fn tagged(mut self, tag: &str) -> Self {
        self.provenance = Some(tag.to_string());
        self
    }

    /// Does the family have a summand in degree m?
    pub fn hits(&self, m: i64) -> bool {
        if m < self.first_degree {
            return false;
        }
        let off = (m - self.first_degree) as u64;
        if off % self.period != 0 {
            return false;
        }
        match self.count {
            Count::Infinite => true,
            Count::Finite(c) => off / self.period < c,
        }
    }

    pub fn last_degree(&self) -> Option<i64> {
        match self.count {
            Count::Infinite => None,
            Count::Finite(c) => Some(self.first_degree + (c.saturating_sub(1) * self.period) as i64),
        }
    }

    /// Degrees hit inside [lo, hi].
    pub fn degrees_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        let mut out = Vec::new();
        let mut m = self.first_degree;
        let mut k = 0u64;
        while m <= hi {
            if let Count::Finite(c) = self.count {
                if k >= c {
                    break;
                }
            }
            if m >= lo {
                out.push(m);
            }
            m += self.period as i64;
            k += 1;
        }
        out
    }
}

/// Graded abelian group as a finite list of periodic families.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GradedAbelianGroup {
    pub families: Vec<Family>,
}

impl GradedAbelianGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_families(families: Vec<Family>) -> Result<Self> {
        let g = GradedAbelianGroup { families };
        g.validate()?;
        Ok(g.canonical())
    }

    /// One finite family per (degree, order).
    pub fn from_degree_map(map: &BTreeMap<i64, Vec<u64>>) -> Self {
        let mut fams = Vec::new();
        for (&m, orders) in map {
            for &o in orders {
                fams.push(Family::single(m, o, 1));
            }
        }
        GradedAbelianGroup { families: fams }.canonical()
    }

    pub fn validate(&self) -> Result<()> {
        for (k, f) in self.families.iter().enumerate() {
            if f.period == 0 {
                return Err(Error::Malformed(format!("family {} has period 0", k)));
            }
            if f.count == Count::Finite(0) {
                return Err(Error::Malformed(format!("family {} has count 0", k)));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: GradedAbelianGroup = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        g.validate()?;
        Ok(g.canonical())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn push(&mut self, f: Family) {
        self.families.push(f);
    }

    pub fn extend(&mut self, other: GradedAbelianGroup) {
        self.families.extend(other.families);
    }

    /// Drops trivial families, merges what can be merged, sorts.
    pub fn canonical(&self) -> Self {
        let mut cur = self.canonical_pass();
        loop {
            let next = cur.canonical_pass();
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    fn canonical_pass(&self) -> Self {
        let mut fams: Vec<Family> = self
            .families
            .iter()
            .filter(|f| f.order != 1 && f.multiplicity > 0)
            .cloned()
            .map(|mut f| {
                if f.count == Count::Finite(1) {
                    f.period = 1;
                }
                f
            })
            .collect();
        let key = |f: &Family| (f.first_degree, f.order, f.period, f.count, f.provenance.clone(), f.multiplicity);
        fams.sort_by_key(key);
        let mut merged: Vec<Family> = Vec::new();
        for f in fams {
            if let Some(last) = merged.last_mut() {
                if last.first_degree == f.first_degree
                    && last.order == f.order
                    && last.period == f.period
                    && last.count == f.count
                    && last.provenance == f.provenance
                {
                    last.multiplicity += f.multiplicity;
                    continue;
                }
            }
            merged.push(f);
        }
        // concatenate runs continuing an established period
        loop {
            let mut changed = false;
            'outer: for a in 0..merged.len() {
                let Count::Finite(ca) = merged[a].count else { continue };
                for b in 0..merged.len() {
                    if a == b {
                        continue;
                    }
                    let (fa, fb) = (&merged[a], &merged[b]);
                    let period = if ca >= 2 { fa.period } else if fb.count != Count::Finite(1) { fb.period } else { continue };
                    let fb_ok = fb.count == Count::Finite(1) || fb.period == period;
                    if fb_ok
                        && (ca >= 2 || fb.count != Count::Finite(1))
                        && fa.order == fb.order
                        && fa.multiplicity == fb.multiplicity
                        && fa.provenance == fb.provenance
                        && fb.first_degree == fa.first_degree + (ca * period) as i64
                    {
                        let count = match fb.count {
                            Count::Infinite => Count::Infinite,
                            Count::Finite(cb) => Count::Finite(ca + cb),
                        };
                        merged[a].count = count;
                        merged[a].period = period;
                        merged.remove(b);
                        changed = true;
                        break 'outer;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        merged.sort_by_key(key);
        GradedAbelianGroup { families: merged }
    }

    /// Orders of the cyclic summands in degree m (with multiplicity), sorted.
    pub fn orders_at(&self, m: i64) -> Vec<u64> {
        let mut out = Vec::new();
        for f in &self.families {
            if f.order != 1 && f.hits(m) {
                out.extend(std::iter::repeat(f.order).take(f.multiplicity as usize));
            }
        }
        out.sort();
        out
    }

    pub fn group_at(&self, m: i64) -> CyclicDecomposition {
        CyclicDecomposition::from_u64(&self.orders_at(m))
    }

    /// Nonzero degrees in [lo, hi] with their sorted summand orders.
    pub fn restrict(&self, lo: i64, hi: i64) -> BTreeMap<i64, Vec<u64>> {
        let mut out = BTreeMap::new();
        for m in lo..=hi {
            let o = self.orders_at(m);
            if !o.is_empty() {
                out.insert(m, o);
            }
        }
        out
    }

    /// Like `restrict`, with every order split into prime powers.
    pub fn primary_restrict(&self, lo: i64, hi: i64) -> BTreeMap<i64, Vec<u64>> {
        self.restrict(lo, hi)
            .into_iter()
            .map(|(m, orders)| {
                let mut split = Vec::new();
                for o in orders {
                    if o == 0 {
                        split.push(0);
                    } else {
                        split.extend(prime_power_parts(&BigInt::from(o)).iter().map(|x| u64::try_from(x).unwrap()));
                    }
                }
                split.sort();
                (m, split)
            })
            .collect()
    }

    /// Same group in every degree of [lo, hi], up to isomorphism.
    pub fn equal_on(&self, other: &GradedAbelianGroup, lo: i64, hi: i64) -> bool {
        self.primary_restrict(lo, hi) == other.primary_restrict(lo, hi)
    }

    /// Degrees of [lo, hi] where the two groups differ.
    pub fn differing_degrees(&self, other: &GradedAbelianGroup, lo: i64, hi: i64) -> Vec<i64> {
        let a = self.primary_restrict(lo, hi);
        let b = other.primary_restrict(lo, hi);
        (lo..=hi).filter(|m| a.get(m) != b.get(m)).collect()
    }

    /// Number of summands of order divisible by p in degree m.
    pub fn p_rank_at(&self, m: i64, p: u64) -> usize {
        self.primary_restrict(m, m).get(&m).map_or(0, |v| v.iter().filter(|&&o| o != 0 && o % p == 0).count())
    }

    pub fn is_zero(&self) -> bool {
        self.families.iter().all(|f| f.order == 1 || f.multiplicity == 0)
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.families.iter().filter(|f| f.order != 1 && f.multiplicity > 0).map(|f| f.first_degree).min()
    }

    /// Upper bound on nonzero degrees, `None` if some family is infinite.
    pub fn max_degree(&self) -> Option<i64> {
        let mut hi = i64::MIN;
        for f in self.families.iter().filter(|f| f.order != 1 && f.multiplicity > 0) {
            hi = hi.max(f.last_degree()?);
        }
        Some(hi)
    }

    pub fn shifted(&self, by: i64) -> Self {
        let mut g = self.clone();
        for f in &mut g.families {
            f.first_degree += by;
        }
        g
    }

    /// Every summand in degrees ≤ max_degree as (degree, order), in canonical
    /// family order with copies expanded.
    pub fn summands_up_to(&self, max_degree: i64) -> Vec<(i64, u64)> {
        let mut out = Vec::new();
        for f in self.canonical().families {
            let lo = f.first_degree;
            for m in f.degrees_in(lo, max_degree) {
                for _ in 0..f.multiplicity {
                    out.push((m, f.order));
                }
            }
        }
        out
    }
}

impl fmt::Display for GradedAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.families.is_empty() {
            return writeln!(f, "0");
        }
        for fam in &self.families {
            let grp = if fam.order == 0 { "Z".to_string() } else { format!("Z/{}", fam.order) };
            let grp = if fam.multiplicity > 1 { format!("({})^{}", grp, fam.multiplicity) } else { grp };
            let degs = match fam.count {
                Count::Finite(1) => format!("degree {}", fam.first_degree),
                Count::Finite(_) => format!(
                    "degrees {}, {}, ..., {}",
                    fam.first_degree,
                    fam.first_degree + fam.period as i64,
                    fam.last_degree().unwrap_or(fam.first_degree)
                ),
                Count::Infinite => {
                    format!("degrees {}, {}, ...", fam.first_degree, fam.first_degree + fam.period as i64)
                }
            };
            match &fam.provenance {
                Some(p) => writeln!(f, "{} in {} [{}]", grp, degs, p)?,
                None => writeln!(f, "{} in {}", grp, degs)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn json_round_trip_with_infinite_count() {
        let s = r#"{"families":[{"first_degree":2,"period":2,"count":"inf","order":9,"multiplicity":1},{"first_degree":0,"period":1,"count":1,"order":0,"multiplicity":1}]}"#;
        let g = GradedAbelianGroup::from_json(s).unwrap();
        assert_eq!(g.orders_at(0), vec![0]);
        assert_eq!(g.orders_at(6), vec![9]);
        assert!(g.orders_at(5).is_empty());
        let back = GradedAbelianGroup::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn bad_count_is_malformed() {
        let s = r#"{"families":[{"first_degree":0,"period":1,"count":"many","order":2,"multiplicity":1}]}"#;
        assert!(matches!(GradedAbelianGroup::from_json(s), Err(Error::Malformed(_))));
        let s = r#"{"families":[{"first_degree":0,"period":0,"count":2,"order":2,"multiplicity":1}]}"#;
        assert!(matches!(GradedAbelianGroup::from_json(s), Err(Error::Malformed(_))));
    }

    #[test]
    fn runs_merge() {
        let g = GradedAbelianGroup {
            families: vec![
                Family { first_degree: 2, period: 2, count: Count::Finite(2), order: 3, multiplicity: 1, provenance: None },
                Family::single(6, 3, 1),
                Family::infinite(8, 2, 3, 1),
                Family::single(1, 1, 4),
            ],
        }
        .canonical();
        assert_eq!(g.families, vec![Family::infinite(2, 2, 3, 1)]);
    }

    #[test]
    fn primary_comparison() {
        let a = GradedAbelianGroup::from_degree_map(&BTreeMap::from([(0, vec![6])]));
        let b = GradedAbelianGroup::from_degree_map(&BTreeMap::from([(0, vec![2, 3])]));
        assert!(a.equal_on(&b, -5, 5));
        assert_eq!(a.p_rank_at(0, 3), 1);
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent_and_preserves_groups(
            fams in proptest::collection::vec((-3i64..6, 1u64..4, 1u64..4, 0u64..5, 1u64..3, any::<bool>()), 0..6)
        ) {
            let g = GradedAbelianGroup {
                families: fams.into_iter().map(|(d, per, c, o, mult, inf)| Family {
                    first_degree: d, period: per,
                    count: if inf { Count::Infinite } else { Count::Finite(c) },
                    order: o, multiplicity: mult, provenance: None,
                }).collect(),
            };
            let c = g.canonical();
            prop_assert_eq!(c.canonical(), c.clone());
            prop_assert_eq!(g.restrict(-5, 30), c.restrict(-5, 30));
            let back = GradedAbelianGroup::from_json(&c.to_json()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
