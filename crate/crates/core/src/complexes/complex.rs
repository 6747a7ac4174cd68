use std::borrow::Cow;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::graded::{Family, GradedAbelianGroup};
use super::Window;
use crate::error::{Error, Result};
use crate::exactlin::{kernel_basis, prime_power_parts, solve_in_lattice, IntegerMatrix, Subquotient};

/// Bounded cochain complex of free abelian groups.
/// `d^m : C^m -> C^{m+1}` is a rank(m+1) x rank(m) matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<IntegerMatrix>,
    labels: Vec<Vec<String>>,
    reliable_through: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    pub degree: i64,
    pub coefficients: Vec<BigInt>,
}

impl CochainComplex {
    pub fn zero() -> Self {
        CochainComplex { lo: 0, ranks: vec![], diffs: vec![], labels: vec![], reliable_through: None }
    }

    /// `diffs[k]` is d^{lo+k}; there must be one fewer differential than ranks.
    pub fn new(lo: i64, ranks: Vec<usize>, diffs: Vec<IntegerMatrix>, labels: Option<Vec<Vec<String>>>) -> Result<Self> {
        if diffs.len() + 1 != ranks.len().max(1) {
            return Err(Error::DimensionMismatch(format!(
                "{} differentials for {} degrees",
                diffs.len(),
                ranks.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.cols() != ranks[k] || d.rows() != ranks[k + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "d^{} is {}x{}, expected {}x{}",
                    lo + k as i64,
                    d.rows(),
                    d.cols(),
                    ranks[k + 1],
                    ranks[k]
                )));
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k].checked_mul(&diffs[k - 1])?.is_zero() {
                return Err(Error::Precondition(format!("d∘d ≠ 0 at degree {}", lo + k as i64 - 1)));
            }
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != ranks.len() || l.iter().zip(&ranks).any(|(a, &r)| a.len() != r) {
                    return Err(Error::DimensionMismatch("labels do not match ranks".into()));
                }
                l
            }
            None => ranks.iter().enumerate().map(|(k, &r)| (0..r).map(|i| format!("e{}_{}", lo + k as i64, i)).collect()).collect(),
        };
        Ok(CochainComplex { lo, ranks, diffs, labels, reliable_through: None })
    }

    /// Marks degrees above `m` as affected by truncation.
    pub fn with_reliable_through(mut self, m: i64) -> Self {
        self.reliable_through = Some(m);
        self
    }

    pub fn reliable_through(&self) -> Option<i64> {
        self.reliable_through
    }

    pub fn lowest_stored_degree(&self) -> i64 {
        self.lo
    }

    pub fn highest_stored_degree(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    /// Smallest and largest degree of nonzero rank.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.ranks.iter().position(|&r| r > 0)?;
        let last = self.ranks.iter().rposition(|&r| r > 0)?;
        Some((self.lo + first as i64, self.lo + last as i64))
    }

    pub fn rank(&self, m: i64) -> usize {
        if m < self.lo {
            return 0;
        }
        self.ranks.get((m - self.lo) as usize).copied().unwrap_or(0)
    }

    pub fn differential(&self, m: i64) -> Cow<'_, IntegerMatrix> {
        if m >= self.lo {
            if let Some(d) = self.diffs.get((m - self.lo) as usize) {
                return Cow::Borrowed(d);
            }
        }
        Cow::Owned(IntegerMatrix::zeros(self.rank(m + 1), self.rank(m)))
    }

    pub fn labels(&self, m: i64) -> &[String] {
        if m < self.lo {
            return &[];
        }
        self.labels.get((m - self.lo) as usize).map_or(&[], |v| v.as_slice())
    }

    /// Σ (-1)^m rank(m).
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().enumerate().map(|(k, &r)| if (self.lo + k as i64) % 2 == 0 { r as i64 } else { -(r as i64) }).sum()
    }

    /// H^m with generators and coordinates.
    pub fn cohomology_at(&self, m: i64) -> Result<Subquotient> {
        if let Some(rt) = self.reliable_through {
            if m > rt {
                return Err(Error::InsufficientPadding { requested: m, certified: rt });
            }
        }
        let z = kernel_basis(&self.differential(m));
        let b = self.differential(m - 1).into_owned();
        Subquotient::new(&z, &b)
    }

    pub fn is_cocycle(&self, z: &Cocycle) -> Result<bool> {
        if z.coefficients.len() != self.rank(z.degree) {
            return Err(Error::DimensionMismatch(format!(
                "cochain of length {} in degree {} of rank {}",
                z.coefficients.len(),
                z.degree,
                self.rank(z.degree)
            )));
        }
        Ok(self.differential(z.degree).mul_vec(&z.coefficients)?.iter().all(Zero::is_zero))
    }
}

/// C(n, i): Z in degree i if n = 0, else Z --n--> Z in degrees i-1, i.
pub fn build_cyclic_complex(n: u64, i: i64) -> CochainComplex {
    if n == 0 {
        return CochainComplex::new(i, vec![1], vec![], Some(vec![vec![format!("C(0,{})", i)]])).unwrap();
    }
    let d = IntegerMatrix::from_rows(&[vec![BigInt::from(n)]]).unwrap();
    CochainComplex::new(
        i - 1,
        vec![1, 1],
        vec![d],
        Some(vec![vec![format!("C({},{}).lower", n, i)], vec![format!("C({},{}).upper", n, i)]]),
    )
    .unwrap()
}

pub fn direct_sum(parts: &[CochainComplex]) -> CochainComplex {
    let supports: Vec<(i64, i64)> = parts.iter().filter_map(|p| p.support()).collect();
    if supports.is_empty() {
        return CochainComplex::zero();
    }
    let lo = supports.iter().map(|s| s.0).min().unwrap();
    let hi = supports.iter().map(|s| s.1).max().unwrap();
    let ranks: Vec<usize> = (lo..=hi).map(|m| parts.iter().map(|p| p.rank(m)).sum()).collect();
    let mut diffs = Vec::new();
    for m in lo..hi {
        let mut d = IntegerMatrix::zeros(ranks[(m + 1 - lo) as usize], ranks[(m - lo) as usize]);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            d.set_block(r0, c0, &p.differential(m));
            r0 += p.rank(m + 1);
            c0 += p.rank(m);
        }
        diffs.push(d);
    }
    let labels = (lo..=hi)
        .map(|m| {
            parts
                .iter()
                .enumerate()
                .flat_map(|(k, p)| p.labels(m).iter().map(move |l| format!("s{}:{}", k, l)))
                .collect()
        })
        .collect();
    CochainComplex::new(lo, ranks, diffs, Some(labels)).unwrap()
}

/// Basis element of a tensor product: (degree of left factor, left index, right index).
pub type TensorIndex = (i64, usize, usize);

/// A ⊗ B with d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy. The basis in each degree is
/// ordered by (left degree, left index, right index).
pub fn tensor(a: &CochainComplex, b: &CochainComplex) -> CochainComplex {
    tensor_indexed(a, b).0
}

pub fn tensor_indexed(a: &CochainComplex, b: &CochainComplex) -> (CochainComplex, Vec<Vec<TensorIndex>>) {
    let (Some((alo, ahi)), Some((blo, bhi))) = (a.support(), b.support()) else {
        return (CochainComplex::zero(), vec![]);
    };
    let (lo, hi) = (alo + blo, ahi + bhi);
    let mut bases: Vec<Vec<TensorIndex>> = Vec::new();
    let mut lookup: Vec<HashMap<TensorIndex, usize>> = Vec::new();
    for m in lo..=hi {
        let mut basis = Vec::new();
        for da in alo..=ahi {
            for li in 0..a.rank(da) {
                for ri in 0..b.rank(m - da) {
                    basis.push((da, li, ri));
                }
            }
        }
        lookup.push(basis.iter().enumerate().map(|(k, &t)| (t, k)).collect());
        bases.push(basis);
    }
    let mut diffs = Vec::new();
    for m in lo..hi {
        let src = &bases[(m - lo) as usize];
        let tgt = &lookup[(m + 1 - lo) as usize];
        let mut d = IntegerMatrix::zeros(bases[(m + 1 - lo) as usize].len(), src.len());
        for (col, &(da, li, ri)) in src.iter().enumerate() {
            let db = m - da;
            let dx = a.differential(da);
            for k in 0..dx.rows() {
                let c = dx.get(k, li);
                if !c.is_zero() {
                    *d.entry_mut(tgt[&(da + 1, k, ri)], col) += c;
                }
            }
            let dy = b.differential(db);
            let sign = if da.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
            for k in 0..dy.rows() {
                let c = dy.get(k, ri);
                if !c.is_zero() {
                    *d.entry_mut(tgt[&(da, li, k)], col) += c * &sign;
                }
            }
        }
        diffs.push(d);
    }
    let labels = bases
        .iter()
        .enumerate()
        .map(|(k, basis)| {
            let m = lo + k as i64;
            basis.iter().map(|&(da, li, ri)| format!("({}|{})", a.labels(da)[li], b.labels(m - da)[ri])).collect()
        })
        .collect();
    let ranks = bases.iter().map(Vec::len).collect();
    (CochainComplex::new(lo, ranks, diffs, Some(labels)).unwrap(), bases)
}

/// Cohomology in the degrees of `window`, one family per (degree, order).
pub fn cohomology(c: &CochainComplex, window: Window) -> Result<GradedAbelianGroup> {
    let mut fams = Vec::new();
    for m in window.lo..=window.hi {
        let h = c.cohomology_at(m)?;
        for o in h.decomposition().to_u64()? {
            fams.push(Family::single(m, o, 1));
        }
    }
    Ok(GradedAbelianGroup { families: fams }.canonical())
}

/// Order of the class of z in H^{deg z}; `None` for infinite order.
/// The finite answer is certified by lattice membership of the multiples.
pub fn cocycle_order(c: &CochainComplex, z: &Cocycle) -> Result<Option<BigInt>> {
    if !c.is_cocycle(z)? {
        return Err(Error::NotACocycle { degree: z.degree });
    }
    let h = c.cohomology_at(z.degree)?;
    let order = h.class_order(&z.coefficients)?;
    if let Some(k) = &order {
        let b = c.differential(z.degree - 1).into_owned();
        let mult = |k: &BigInt| z.coefficients.iter().map(|x| x * k).collect::<Vec<_>>();
        if solve_in_lattice(&b, &mult(k))?.is_none() {
            return Err(Error::Precondition("order certificate failed: multiple is not a coboundary".into()));
        }
        for q in prime_power_parts(k) {
            let prime = smallest_prime(&q);
            if solve_in_lattice(&b, &mult(&(k / &prime)))?.is_some() {
                return Err(Error::Precondition("order certificate failed: order is not minimal".into()));
            }
        }
    }
    Ok(order)
}

fn smallest_prime(q: &BigInt) -> BigInt {
    let mut p = BigInt::from(2);
    while (q % &p) != BigInt::zero() {
        p += 1;
    }
    p
}

/// Direct sum of C(order, degree) over the summands of h in degrees ≤ max_degree + 1,
/// together with the (degree, order) of each part.
pub fn complex_from_graded(h: &GradedAbelianGroup, max_degree: i64) -> Result<(CochainComplex, Vec<(i64, u64)>)> {
    h.validate()?;
    let summands = h.summands_up_to(max_degree + 1);
    let parts: Vec<CochainComplex> = summands.iter().map(|&(d, o)| build_cyclic_complex(o, d)).collect();
    Ok((direct_sum(&parts), summands))
}

/// Degreewise matrices of a chain map; missing degrees are zero.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub lo: i64,
    pub maps: Vec<IntegerMatrix>,
}

impl ChainMap {
    pub fn at(&self, m: i64, a: &CochainComplex, b: &CochainComplex) -> IntegerMatrix {
        if m >= self.lo {
            if let Some(f) = self.maps.get((m - self.lo) as usize) {
                return f.clone();
            }
        }
        IntegerMatrix::zeros(b.rank(m), a.rank(m))
    }

    pub fn check(&self, a: &CochainComplex, b: &CochainComplex) -> Result<()> {
        for (k, f) in self.maps.iter().enumerate() {
            let m = self.lo + k as i64;
            if f.rows() != b.rank(m) || f.cols() != a.rank(m) {
                return Err(Error::DimensionMismatch(format!("chain map component in degree {} has wrong shape", m)));
            }
        }
        let lo = [a.support(), b.support()].iter().flatten().map(|s| s.0).min().unwrap_or(0).min(self.lo) - 1;
        let hi = [a.support(), b.support()].iter().flatten().map(|s| s.1).max().unwrap_or(0).max(self.lo + self.maps.len() as i64);
        for m in lo..=hi {
            let left = self.at(m + 1, a, b).checked_mul(&a.differential(m))?;
            let right = b.differential(m).checked_mul(&self.at(m, a, b))?;
            if left != right {
                return Err(Error::NotAChainMap { degree: m });
            }
        }
        Ok(())
    }
}

/// Matrix of H^m(f) in the cyclic bases of H^m(A) and H^m(B); column k is
/// the image of the k-th generator, reduced mod the target orders.
pub fn induced_map_on_cohomology(f: &ChainMap, a: &CochainComplex, b: &CochainComplex, m: i64) -> Result<IntegerMatrix> {
    f.check(a, b)?;
    let ha = a.cohomology_at(m)?;
    let hb = b.cohomology_at(m)?;
    let fm = f.at(m, a, b);
    let mut out = IntegerMatrix::zeros(hb.factors().len(), ha.factors().len());
    for k in 0..ha.factors().len() {
        let img = fm.mul_vec(&ha.generator(k))?;
        for (i, c) in hb.coordinates(&img)?.into_iter().enumerate() {
            out.set(i, k, c);
        }
    }
    Ok(out)
}
