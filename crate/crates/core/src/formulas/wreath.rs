use std::collections::BTreeMap;

use serde::Serialize;

use super::{binomial, g, gcd_all, is_prime, split_p_part};
use crate::complexes::{Count, Family, GradedAbelianGroup};
use crate::error::{Error, Result};

/// Additive structure of H^* Tot Hom_{C_p}(W, C^{⊗p}). Exact in degrees
/// ≤ max_degree; above that only the infinite families are kept.
#[derive(Clone, Debug, Serialize)]
pub struct WreathPrediction {
    pub p: u64,
    pub max_degree: i64,
    pub result: GradedAbelianGroup,
}

/// Splits every finite order into its p-part and prime-to-p part.
pub fn normalize(h: &GradedAbelianGroup, p: u64) -> GradedAbelianGroup {
    let mut out = GradedAbelianGroup::zero();
    for f in &h.families {
        if f.order == 1 || f.multiplicity == 0 {
            continue;
        }
        if f.order == 0 {
            out.push(f.clone());
            continue;
        }
        let (pp, m) = split_p_part(f.order, p);
        for o in [pp, m] {
            if o > 1 {
                out.push(Family { order: o, ..f.clone() });
            }
        }
    }
    out.canonical()
}

/// Subfamilies whose degrees all have the same parity.
fn parity_split(f: &Family) -> Vec<Family> {
    let single = matches!(f.count, Count::Finite(c) if c <= 1);
    if f.period % 2 == 0 || single {
        return vec![f.clone()];
    }
    let (a, b) = match f.count {
        Count::Infinite => (Count::Infinite, Count::Infinite),
        Count::Finite(c) => (Count::Finite(c.div_ceil(2)), Count::Finite(c / 2)),
    };
    let mut out = vec![Family { period: 2 * f.period, count: a, ..f.clone() }];
    if b != Count::Finite(0) {
        out.push(Family { first_degree: f.first_degree + f.period as i64, period: 2 * f.period, count: b, ..f.clone() });
    }
    out
}

/// Drops the summands of finite families above max_degree.
fn truncate(f: Family, max_degree: i64) -> Option<Family> {
    if f.order == 1 || f.multiplicity == 0 {
        return None;
    }
    match f.count {
        Count::Infinite => Some(f),
        Count::Finite(c) => {
            if f.first_degree > max_degree || c == 0 {
                return None;
            }
            let fit = ((max_degree - f.first_degree) as u64) / f.period + 1;
            Some(Family { count: Count::Finite(c.min(fit)), ..f })
        }
    }
}

struct Diagonal {
    /// (offset from p·d, order, copies)
    fixed: Vec<(i64, u64, u64)>,
    /// (offset from p·d, period, order) of infinite tails
    tails: Vec<(i64, u64, u64)>,
    tag: &'static str,
}

fn diagonal(p: u64, n: u64, even: bool) -> Diagonal {
    let pi = p as i64;
    if p == 2 {
        return match (n, even) {
            (0, true) => Diagonal { fixed: vec![(0, 0, 1)], tails: vec![(2, 2, 2)], tag: "integral-even" },
            (0, false) => Diagonal { fixed: vec![], tails: vec![(1, 2, 2)], tag: "integral-odd" },
            (n, true) if n % 2 == 1 => Diagonal { fixed: vec![(0, n, 1)], tails: vec![], tag: "odd-order-even-degree" },
            (n, false) if n % 2 == 1 => Diagonal { fixed: vec![(-1, n, 1)], tails: vec![], tag: "odd-order-odd-degree" },
            (n, true) => Diagonal { fixed: vec![(0, 2 * n, 1), (-1, 2, 1)], tails: vec![(1, 1, 2)], tag: "two-power-even-degree" },
            (n, false) => Diagonal { fixed: vec![(-1, n, 1)], tails: vec![(0, 1, 2)], tag: "two-power-odd-degree" },
        };
    }
    if n == 0 {
        return Diagonal { fixed: vec![(0, 0, 1)], tails: vec![(2, 2, p)], tag: "integral" };
    }
    if n % p != 0 {
        let fixed = (0..pi).map(|j| (-j, n, g(p, j))).collect();
        return Diagonal { fixed, tails: vec![], tag: "coprime" };
    }
    let mut fixed = Vec::new();
    for j in 0..pi {
        if j % 2 == 0 && j <= pi - 3 {
            fixed.push((-j, n, g(p, j) - 1));
            fixed.push((-j, p * n, 1));
        } else {
            fixed.push((-j, n, g(p, j)));
        }
    }
    Diagonal { fixed, tails: vec![(2, 2, p), (2 - pi, 2, p)], tag: "p-power" }
}

fn check_input(h: &GradedAbelianGroup, p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("p = {} is not a prime", p)));
    }
    h.validate()?;
    Ok(())
}

/// Contributions of the free C_p-orbits on p-tuples of summands.
fn free_orbits(instances: &[(i64, u64)], p: usize, max_degree: i64) -> BTreeMap<(i64, u64), u64> {
    let mut out = BTreeMap::new();
    let Some(dmin) = instances.iter().map(|x| x.0).min() else {
        return out;
    };
    let bound = max_degree + p as i64 - 1;
    let mut tuple = Vec::with_capacity(p);

    fn rec(
        inst: &[(i64, u64)],
        p: usize,
        dmin: i64,
        bound: i64,
        sum: i64,
        tuple: &mut Vec<usize>,
        out: &mut BTreeMap<(i64, u64), u64>,
        max_degree: i64,
    ) {
        if tuple.len() == p {
            if tuple.iter().all(|&x| x == tuple[0]) {
                return;
            }
            // keep the lexicographically least rotation
            for s in 1..p {
                let rot: Vec<usize> = tuple[s..].iter().chain(&tuple[..s]).copied().collect();
                if rot < *tuple {
                    return;
                }
            }
            let orders: Vec<u64> = tuple.iter().map(|&k| inst[k].1).collect();
            let r = orders.iter().filter(|&&o| o != 0).count() as u64;
            let gcd = gcd_all(&orders);
            if gcd == 1 {
                return;
            }
            if r == 0 {
                if sum <= max_degree {
                    *out.entry((sum, 0)).or_insert(0) += 1;
                }
                return;
            }
            for j in 0..r {
                let m = sum - j as i64;
                if m <= max_degree {
                    *out.entry((m, gcd)).or_insert(0) += binomial(r - 1, j);
                }
            }
            return;
        }
        let left = (p - tuple.len() - 1) as i64;
        let first = tuple.first().copied().unwrap_or(0);
        for k in first..inst.len() {
            let s = sum + inst[k].0;
            if s + left * dmin > bound {
                continue;
            }
            tuple.push(k);
            rec(inst, p, dmin, bound, s, tuple, out, max_degree);
            tuple.pop();
        }
    }

    rec(instances, p, dmin, bound, 0, &mut tuple, &mut out, max_degree);
    out
}

/// Closed-form H^* Tot Hom_{C_p}(W, C^{⊗p}) from a splitting of H^*(C).
pub fn predict_wreath_cohomology(h: &GradedAbelianGroup, p: u64, max_degree: i64) -> Result<WreathPrediction> {
    check_input(h, p)?;
    let h = normalize(h, p);
    let pi = p as i64;
    let mut families = Vec::new();
    for fam in &h.families {
        for sub in parity_split(fam) {
            let even = sub.first_degree.rem_euclid(2) == 0;
            let diag = diagonal(p, sub.order, even);
            for &(off, order, copies) in &diag.fixed {
                families.push(Family {
                    first_degree: pi * sub.first_degree + off,
                    period: p * sub.period,
                    count: sub.count,
                    order,
                    multiplicity: copies * sub.multiplicity,
                    provenance: Some(diag.tag.into()),
                });
            }
            for &(off, period, order) in &diag.tails {
                let lo = sub.first_degree;
                let hi = (max_degree - off).div_euclid(pi);
                for d in sub.degrees_in(lo, hi) {
                    families.push(Family::infinite(pi * d + off, period, order, sub.multiplicity).tagged(diag.tag));
                }
            }
        }
    }
    if let Some(dmin) = h.min_degree() {
        let bound = max_degree + pi - 1 - (pi - 1) * dmin;
        let instances = h.summands_up_to(bound);
        for ((m, order), copies) in free_orbits(&instances, p as usize, max_degree) {
            families.push(Family::single(m, order, copies).tagged("free-orbit"));
        }
    }
    let families: Vec<Family> = families.into_iter().filter_map(|f| truncate(f, max_degree)).collect();
    Ok(WreathPrediction { p, max_degree, result: GradedAbelianGroup { families }.canonical() })
}

/// Kernel of (α^*, β^*) for the cyclic group of order p.
pub fn detection_kernel(h: &GradedAbelianGroup, p: u64, max_degree: i64) -> Result<GradedAbelianGroup> {
    check_input(h, p)?;
    let pi = p as i64;
    let mut families = Vec::new();
    for fam in &h.families {
        if fam.order == 0 || fam.order % p != 0 || fam.multiplicity == 0 {
            continue;
        }
        if p == 2 {
            for sub in parity_split(fam) {
                if sub.first_degree.rem_euclid(2) == 0 {
                    families.push(Family { first_degree: 2 * sub.first_degree, period: 2 * sub.period, order: 2, ..sub });
                }
            }
        } else {
            for t in 0..(pi - 1) / 2 {
                families.push(Family { first_degree: pi * fam.first_degree - 2 * t, period: p * fam.period, order: p, ..fam.clone() });
            }
        }
    }
    let families = families.into_iter().filter_map(|f| truncate(f.tagged("detection"), max_degree)).collect();
    Ok(GradedAbelianGroup { families }.canonical())
}

/// Kernel of (α^*, β^*) for the symmetric group on p letters, p-locally.
pub fn detection_kernel_sigma_p(h: &GradedAbelianGroup, p: u64, max_degree: i64) -> Result<GradedAbelianGroup> {
    if p == 2 {
        return detection_kernel(h, 2, max_degree);
    }
    check_input(h, p)?;
    let mut families = Vec::new();
    for fam in &h.families {
        if fam.order == 0 || fam.order % p != 0 || fam.multiplicity == 0 {
            continue;
        }
        for sub in parity_split(fam) {
            if sub.first_degree.rem_euclid(2) == 0 {
                families.push(Family { first_degree: p as i64 * sub.first_degree, period: p * sub.period, order: p, ..sub });
            }
        }
    }
    let families = families.into_iter().filter_map(|f| truncate(f.tagged("detection"), max_degree)).collect();
    Ok(GradedAbelianGroup { families }.canonical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{Family, Window};
    use crate::equivariant::{bruteforce_cyclic, bruteforce_graded};
    use proptest::prelude::*;

    fn h(fams: Vec<Family>) -> GradedAbelianGroup {
        GradedAbelianGroup::from_families(fams).unwrap()
    }

    #[test]
    fn point() {
        let pred = predict_wreath_cohomology(&h(vec![Family::single(0, 0, 1)]), 3, 12).unwrap().result;
        let r = pred.restrict(0, 12);
        assert_eq!(r.get(&0), Some(&vec![0]));
        for m in [2, 4, 6, 8, 10, 12] {
            assert_eq!(r.get(&m), Some(&vec![3]));
        }
        assert_eq!(r.len(), 7);
    }

    #[test]
    fn cube_of_z9() {
        let pred = predict_wreath_cohomology(&h(vec![Family::single(0, 0, 1), Family::single(2, 9, 1)]), 3, 12).unwrap().result;
        let diag = GradedAbelianGroup { families: pred.families.iter().filter(|f| f.provenance.as_deref() == Some("p-power")).cloned().collect() };
        let r = diag.restrict(0, 12);
        assert_eq!(r.get(&4), Some(&vec![9]));
        assert_eq!(r.get(&6), Some(&vec![27]));
        for m in [5, 7, 8, 9, 10, 11, 12] {
            assert_eq!(r.get(&m), Some(&vec![3]), "degree {}", m);
        }
        let brute = bruteforce_cyclic(3, 9, 2, Window::new(2, 12).unwrap()).unwrap();
        assert!(brute.equal_on(&diag, 2, 12));
    }

    #[test]
    fn two_power_odd_degree() {
        let pred = predict_wreath_cohomology(&h(vec![Family::single(0, 0, 1), Family::single(1, 2, 1)]), 2, 8).unwrap().result;
        let g: Vec<&Family> = pred.families.iter().filter(|f| f.provenance.as_deref() == Some("two-power-odd-degree")).collect();
        let diag = GradedAbelianGroup { families: g.into_iter().cloned().collect() };
        assert_eq!(diag.restrict(0, 8), (1..=8).map(|m| (m, vec![2])).collect());
    }

    #[test]
    fn mixed_summands_against_bruteforce() {
        for (p, fams, hi) in [
            (2u64, vec![Family::single(0, 0, 1), Family::single(1, 2, 1), Family::single(2, 4, 1)], 6),
            (3, vec![Family::single(0, 0, 1), Family::single(1, 3, 1), Family::single(1, 2, 1)], 5),
            (3, vec![Family::single(1, 3, 2)], 5),
            (2, vec![Family::single(1, 0, 1), Family::single(1, 6, 1)], 5),
        ] {
            let hh = h(fams);
            let brute = bruteforce_graded(&hh, p, Window::new(0, hi).unwrap()).unwrap();
            let pred = predict_wreath_cohomology(&hh, p, hi).unwrap().result;
            assert!(brute.equal_on(&pred, 0, hi), "p={} {:?}\nbrute {:?}\npred {:?}", p, hh, brute.restrict(0, hi), pred.restrict(0, hi));
        }
    }

    #[test]
    fn infinite_input_family_stays_symbolic() {
        // H^*(C_9): Z in degree 0, Z/9 in every positive even degree
        let hh = h(vec![Family::single(0, 0, 1), Family::infinite(2, 2, 9, 1)]);
        let pred = predict_wreath_cohomology(&hh, 3, 10).unwrap().result;
        assert!(pred.families.iter().any(|f| f.order == 27 && f.count.is_infinite() && f.period == 6));
    }

    #[test]
    fn detection_patterns() {
        let k = detection_kernel(&h(vec![Family::single(2, 5, 1)]), 5, 20).unwrap();
        assert_eq!(k.restrict(0, 20), [(8, vec![5]), (10, vec![5])].into_iter().collect());
        let k = detection_kernel(&h(vec![Family::single(2, 4, 1)]), 2, 20).unwrap();
        assert_eq!(k.restrict(0, 20), [(4, vec![2])].into_iter().collect());
        assert!(detection_kernel(&h(vec![Family::single(2, 2, 1)]), 3, 20).unwrap().is_zero());
        let k = detection_kernel_sigma_p(&h(vec![Family::single(2, 9, 1), Family::single(3, 3, 1)]), 3, 20).unwrap();
        assert_eq!(k.restrict(0, 20), [(6, vec![3])].into_iter().collect());
    }

    proptest! {
        #[test]
        fn detection_degrees_follow_the_pattern(
            p in prop::sample::select(vec![2u64, 3, 5, 7]),
            summands in prop::collection::vec((0i64..6, prop::sample::select(vec![0u64, 2, 3, 4, 5, 9, 25, 49])), 0..6),
        ) {
            let hh = GradedAbelianGroup::from_families(summands.iter().map(|&(d, o)| Family::single(d, o, 1)).collect()).unwrap();
            let k = detection_kernel(&hh, p, 100).unwrap();
            let mut expect: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
            for &(d, o) in &summands {
                if o == 0 || o % p != 0 { continue; }
                let degrees: Vec<i64> = if p == 2 {
                    if d % 2 == 0 { vec![2 * d] } else { vec![] }
                } else {
                    (0..(p as i64 - 1) / 2).map(|t| p as i64 * d - 2 * t).collect()
                };
                for m in degrees { expect.entry(m).or_default().push(p); }
            }
            prop_assert_eq!(k.restrict(-100, 100), expect);
            for f in &k.families { prop_assert_eq!(f.order, p); }
        }
    }
}
