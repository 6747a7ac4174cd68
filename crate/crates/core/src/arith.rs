//! Exponent and variety-dimension arithmetic for iterated wreath products.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::complexes::{Count, Family, GradedAbelianGroup};
use crate::error::{Error, Result};
use crate::formulas::{is_power_of, is_prime};

/// e and ee of positive-degree cohomology; 0 means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentPair {
    pub e: u64,
    pub ee: u64,
    /// Every summand of order e lies in odd degree and there are finitely many.
    pub p2_caveat: bool,
    /// When set, e is only known to be this value or `e`.
    pub e_lower: Option<u64>,
}

impl ExponentPair {
    pub fn new(e: u64, ee: u64) -> Self {
        ExponentPair { e, ee, p2_caveat: false, e_lower: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

impl Serialize for ExponentPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match self.e_lower {
            Some(l) => m.serialize_entry("e", &[l, self.e])?,
            None => m.serialize_entry("e", &self.e)?,
        }
        m.serialize_entry("ee", &self.ee)?;
        if self.p2_caveat || self.e_lower.is_some() {
            m.serialize_entry("p2_caveat", &true)?;
        }
        m.end()
    }
}

fn lcm_opt(acc: u64, o: u64) -> u64 {
    if acc == 0 || o == 0 {
        0
    } else {
        acc.lcm(&o)
    }
}

fn positive_part(f: &Family) -> Option<Family> {
    if f.order == 1 || f.multiplicity == 0 {
        return None;
    }
    if f.first_degree > 0 {
        return Some(f.clone());
    }
    let skip = ((-f.first_degree) as u64) / f.period + 1;
    let count = match f.count {
        Count::Infinite => Count::Infinite,
        Count::Finite(c) if c > skip => Count::Finite(c - skip),
        Count::Finite(_) => return None,
    };
    Some(Family { first_degree: f.first_degree + (skip * f.period) as i64, count, ..f.clone() })
}

/// e, ee and the caveat flag of a graded group given by families.
pub fn exponents_of_graded(h: &GradedAbelianGroup) -> ExponentPair {
    let pos: Vec<Family> = h.canonical().families.iter().filter_map(positive_part).collect();
    let e = pos.iter().fold(1, |a, f| lcm_opt(a, f.order));
    let ee = pos.iter().filter(|f| f.count.is_infinite()).fold(1, |a, f| lcm_opt(a, f.order));
    let top: Vec<&Family> = pos.iter().filter(|f| f.order == e).collect();
    let odd_only = |f: &&Family| f.first_degree % 2 != 0 && (f.period % 2 == 0 || f.count == Count::Finite(1));
    let p2_caveat = e > 1 && !top.is_empty() && top.iter().all(|f| !f.count.is_infinite() && odd_only(f));
    ExponentPair { e, ee, p2_caveat, e_lower: None }
}

fn is_p_power_or_one(n: u64, p: u64) -> bool {
    n == 1 || is_power_of(n, p)
}

/// Exponents of G ≀ C_p from those of a p-group G.
pub fn wreath_exponents(base: ExponentPair, p: u64) -> Result<ExponentPair> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("p = {} is not a prime", p)));
    }
    if !is_p_power_or_one(base.e, p) || !is_p_power_or_one(base.ee, p) {
        return Err(Error::Precondition(format!("e = {} and ee = {} must be powers of {}", base.e, base.ee, p)));
    }
    let mut out = ExponentPair::new(p * base.e, p * base.ee);
    let mut lower = base.e_lower.map(|l| p * l);
    if p == 2 && base.p2_caveat {
        lower = Some(lower.map_or(base.e, |l| l.min(base.e)));
    }
    out.e_lower = lower;
    Ok(out)
}

/// dim W_i for i = 0, 1, ...; trailing zeros dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionVector {
    pub dims: Vec<u64>,
}

impl DimensionVector {
    pub fn new(mut dims: Vec<u64>) -> Self {
        while dims.last() == Some(&0) {
            dims.pop();
        }
        DimensionVector { dims }
    }

    pub fn zero() -> Self {
        DimensionVector { dims: vec![] }
    }

    pub fn get(&self, i: usize) -> u64 {
        self.dims.get(i).copied().unwrap_or(0)
    }

    pub fn is_weakly_decreasing(&self) -> bool {
        self.dims.windows(2).all(|w| w[0] >= w[1])
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn dim_w_wreath(base: &DimensionVector, p: u64) -> DimensionVector {
    let len = base.dims.len() + 1;
    let dims = (0..len)
        .map(|i| {
            let prev = if i == 0 { 1 } else { base.get(i - 1) };
            (p * base.get(i)).max(prev)
        })
        .collect();
    DimensionVector::new(dims)
}

/// Σ_{j ≥ i+1} m_j p^{j-i-1} over the base-p digits m_j of m.
pub fn dim_w_symmetric(m: u64, p: u64, i: usize) -> u64 {
    let mut digits = Vec::new();
    let mut x = m;
    while x > 0 {
        digits.push(x % p);
        x /= p;
    }
    digits.iter().enumerate().skip(i + 1).map(|(j, &d)| d * p.pow((j - i - 1) as u32)).sum()
}

pub fn dim_vector_symmetric(m: u64, p: u64) -> DimensionVector {
    let n = (0..).take_while(|&k| p.pow(k) <= m.max(1)).count();
    DimensionVector::new((0..n).map(|i| dim_w_symmetric(m, p, i)).collect())
}

pub fn nu_p_che(dims: &DimensionVector) -> u64 {
    dims.dims.iter().sum()
}

/// Dimensions for the Sylow p-subgroup of the symmetric group on p^n letters.
pub fn sylow_dims(p: u64, n: u32) -> DimensionVector {
    (0..n).fold(DimensionVector::zero(), |d, _| dim_w_wreath(&d, p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerBase {
    /// Cyclic of the given order.
    Cyclic(u64),
    /// Elementary abelian: prime and rank.
    Elementary { p: u64, rank: u32 },
}

/// A base group followed by wreath products with cyclic groups of prime order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub base: TowerBase,
    pub steps: Vec<u64>,
}

impl FromStr for Tower {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Malformed(format!("tower {:?}: {}", s, msg));
        let mut parts = s.split("wr").map(str::trim);
        let base = parts.next().filter(|b| !b.is_empty()).ok_or_else(|| bad("missing base"))?;
        let base = if let Some(n) = base.strip_prefix("C:") {
            TowerBase::Cyclic(n.trim().parse().map_err(|_| bad("base C:<order>"))?)
        } else if let Some(rest) = base.strip_prefix("E:") {
            let (p, n) = rest.split_once('^').ok_or_else(|| bad("base E:<p>^<n>"))?;
            let p: u64 = p.trim().parse().map_err(|_| bad("base E:<p>^<n>"))?;
            let rank: u32 = n.trim().parse().map_err(|_| bad("base E:<p>^<n>"))?;
            if !is_prime(p) {
                return Err(bad("E:<p>^<n> needs p prime"));
            }
            TowerBase::Elementary { p, rank }
        } else {
            return Err(bad("base must be C:<order> or E:<p>^<n>"));
        };
        let mut steps = Vec::new();
        for st in parts {
            let q: u64 = st.strip_prefix("C_").and_then(|q| q.trim().parse().ok()).ok_or_else(|| bad("steps look like \"wr C_<p>\""))?;
            if !is_prime(q) {
                return Err(bad("wreath factors must have prime order"));
            }
            steps.push(q);
        }
        let t = Tower { base, steps };
        t.prime()?;
        Ok(t)
    }
}

impl Tower {
    /// The prime of the tower; every piece must be a p-group for one p.
    pub fn prime(&self) -> Result<Option<u64>> {
        let mut p = match self.base {
            TowerBase::Cyclic(0) => return Err(Error::Malformed("C:0 is not a finite group".into())),
            TowerBase::Cyclic(1) => None,
            TowerBase::Cyclic(n) => {
                let q = (2..=n).find(|q| n % q == 0).unwrap();
                if !is_power_of(n, q) {
                    return Err(Error::Malformed(format!("C:{} is not a p-group", n)));
                }
                Some(q)
            }
            TowerBase::Elementary { p, .. } => Some(p),
        };
        for &q in &self.steps {
            if p.is_some_and(|p| p != q) {
                return Err(Error::Malformed(format!("mixed primes {} and {}", p.unwrap(), q)));
            }
            p = Some(q);
        }
        Ok(p)
    }

    pub fn base_exponents(&self) -> ExponentPair {
        match self.base {
            TowerBase::Cyclic(n) => ExponentPair::new(n, n),
            TowerBase::Elementary { p, rank } => {
                if rank == 0 {
                    ExponentPair::new(1, 1)
                } else {
                    ExponentPair::new(p, p)
                }
            }
        }
    }

    pub fn exponents(&self) -> Result<ExponentPair> {
        self.steps.iter().try_fold(self.base_exponents(), |acc, &p| wreath_exponents(acc, p))
    }

    pub fn base_dims(&self) -> DimensionVector {
        match self.base {
            TowerBase::Cyclic(n) => {
                let r = match self.prime() {
                    Ok(Some(p)) if n > 1 => (0..).take_while(|&k| p.pow(k) < n).count(),
                    _ => 0,
                };
                DimensionVector::new(vec![1; r])
            }
            TowerBase::Elementary { rank, .. } => DimensionVector::new(vec![rank as u64]),
        }
    }

    pub fn dims(&self) -> DimensionVector {
        self.steps.iter().fold(self.base_dims(), |d, &p| dim_w_wreath(&d, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::Family;
    use crate::formulas::predict_wreath_cohomology;
    use proptest::prelude::*;

    fn cyclic_cohomology(n: u64) -> GradedAbelianGroup {
        GradedAbelianGroup::from_families(vec![Family::single(0, 0, 1), Family::infinite(2, 2, n, 1)]).unwrap()
    }

    #[test]
    fn exponents_of_simple_groups() {
        let c = exponents_of_graded(&cyclic_cohomology(9));
        assert_eq!((c.e, c.ee, c.p2_caveat), (9, 9, false));
        let finite = GradedAbelianGroup::from_families(vec![Family::single(0, 0, 1), Family::single(3, 4, 2)]).unwrap();
        let f = exponents_of_graded(&finite);
        assert_eq!((f.e, f.ee, f.p2_caveat), (4, 1, true));
        let free = GradedAbelianGroup::from_families(vec![Family::single(2, 0, 1)]).unwrap();
        assert_eq!(exponents_of_graded(&free).e, 0);
    }

    #[test]
    fn prediction_path_matches_formula_path() {
        for (p, n) in [(3u64, 9u64), (3, 3), (5, 5), (2, 4), (2, 2)] {
            let h = cyclic_cohomology(n);
            let pred = predict_wreath_cohomology(&h, p, 30).unwrap().result;
            let direct = exponents_of_graded(&pred);
            let formula = wreath_exponents(exponents_of_graded(&h), p).unwrap();
            assert_eq!((direct.e, direct.ee), (formula.e, formula.ee), "p={} n={}", p, n);
        }
    }

    #[test]
    fn towers() {
        let t: Tower = "C:9 wr C_3".parse().unwrap();
        assert_eq!(t.exponents().unwrap().to_json(), r#"{"e":27,"ee":27}"#);
        let sylow: Tower = "C:3 wr C_3 wr C_3 wr C_3".parse().unwrap();
        assert_eq!(sylow.exponents().unwrap().ee, 81);
        let e: Tower = "E:5^3".parse().unwrap();
        assert_eq!(e.exponents().unwrap(), ExponentPair::new(5, 5));
        assert_eq!(e.base_dims().dims, vec![3]);
        assert!("C:6".parse::<Tower>().is_err());
        assert!("C:9 wr C_2".parse::<Tower>().is_err());
        assert!("D:9".parse::<Tower>().is_err());
        assert!("C:9 wr C_4".parse::<Tower>().is_err());
    }

    #[test]
    fn caveat_is_reported_as_a_range() {
        let base = ExponentPair { e: 4, ee: 2, p2_caveat: true, e_lower: None };
        let w = wreath_exponents(base, 2).unwrap();
        assert_eq!(w.to_json(), r#"{"e":[4,8],"ee":4,"p2_caveat":true}"#);
        assert!(wreath_exponents(ExponentPair::new(6, 6), 2).is_err());
    }

    #[test]
    fn variety_fixtures() {
        for p in [2u64, 3, 5] {
            for n in 1..=4u64 {
                let v = dim_w_wreath(&DimensionVector::new(vec![n]), p);
                assert_eq!(v.dims, vec![p * n, n]);
                assert_eq!(nu_p_che(&v), p * n + n);
            }
        }
        for n in 1..=6u64 {
            let c = n * (n - 1) / 2;
            assert_eq!(nu_p_che(&DimensionVector::new(vec![c + 1, c])), n * n - n + 1);
        }
        assert_eq!(dim_w_wreath(&DimensionVector::zero(), 3).dims, vec![1]);
        assert_eq!(dim_w_symmetric(8, 2, 1), 2);
        assert_eq!(dim_w_symmetric(12, 2, 1), 3);
        assert_eq!(dim_w_symmetric(27, 3, 3), 0);
        assert_eq!(nu_p_che(&DimensionVector::zero()), 0);
        assert_eq!("C:8".parse::<Tower>().unwrap().base_dims().dims, vec![1, 1, 1]);
    }

    #[test]
    fn symmetric_agrees_with_iterated_wreath() {
        for p in [2u64, 3, 5] {
            for n in 0..=5u32 {
                let it = sylow_dims(p, n);
                for i in 0..=n as usize + 1 {
                    let expect = if i >= n as usize { 0 } else { p.pow(n - i as u32 - 1) };
                    assert_eq!(dim_w_symmetric(p.pow(n), p, i), expect);
                    assert_eq!(it.get(i), expect, "p={} n={} i={}", p, n, i);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn wreath_dims_decrease(p in prop::sample::select(vec![2u64, 3, 5]), mut v in prop::collection::vec(0u64..20, 0..6)) {
            v.sort_unstable_by(|a, b| b.cmp(a));
            let d = dim_w_wreath(&DimensionVector::new(v), p);
            prop_assert!(d.is_weakly_decreasing());
        }
    }
}
