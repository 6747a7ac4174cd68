use std::collections::HashMap;

use num_bigint::BigInt;

use crate::complexes::{tensor_indexed, CochainComplex};
use crate::error::{Error, Result};
use crate::exactlin::IntegerMatrix;

/// t e_k = signs[k] e_{images[k]}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermutation {
    pub images: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        SignedPermutation { images: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// self ∘ other
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        let images = other.images.iter().map(|&k| self.images[k]).collect();
        let signs = other.images.iter().zip(&other.signs).map(|(&k, &s)| s * self.signs[k]).collect();
        SignedPermutation { images, signs }
    }

    pub fn power(&self, e: usize) -> SignedPermutation {
        let mut out = SignedPermutation::identity(self.len());
        for _ in 0..e {
            out = self.compose(&out);
        }
        out
    }

    pub fn matrix(&self) -> IntegerMatrix {
        let n = self.len();
        let mut m = IntegerMatrix::zeros(n, n);
        for k in 0..n {
            m.set(self.images[k], k, BigInt::from(self.signs[k]));
        }
        m
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::from(0); v.len()];
        for k in 0..v.len() {
            out[self.images[k]] += &v[k] * self.signs[k];
        }
        out
    }
}

/// Basis element of C^{⊗p}: one (degree, index) per tensor factor.
pub type FactorTuple = Vec<(i64, usize)>;

/// A complex with a C_p action by signed permutations commuting with d.
#[derive(Clone, Debug)]
pub struct EquivariantComplex {
    pub complex: CochainComplex,
    pub p: u64,
    actions: Vec<SignedPermutation>,
    tuples: Vec<Vec<FactorTuple>>,
}

impl EquivariantComplex {
    pub fn new(complex: CochainComplex, p: u64, actions: Vec<SignedPermutation>, tuples: Vec<Vec<FactorTuple>>) -> Result<Self> {
        let ec = EquivariantComplex { complex, p, actions, tuples };
        ec.validate()?;
        Ok(ec)
    }

    fn lo(&self) -> i64 {
        self.complex.lowest_stored_degree()
    }

    /// The generator's action in degree m.
    pub fn action(&self, m: i64) -> SignedPermutation {
        if m >= self.lo() {
            if let Some(a) = self.actions.get((m - self.lo()) as usize) {
                return a.clone();
            }
        }
        SignedPermutation::identity(self.complex.rank(m))
    }

    pub fn tuples(&self, m: i64) -> &[FactorTuple] {
        if m < self.lo() {
            return &[];
        }
        self.tuples.get((m - self.lo()) as usize).map_or(&[], |v| v.as_slice())
    }

    /// Matrix of Σ coeffs[k] t^k on degree m.
    pub fn group_ring_matrix(&self, m: i64, coeffs: &[BigInt]) -> IntegerMatrix {
        let n = self.complex.rank(m);
        let t = self.action(m);
        let mut out = IntegerMatrix::zeros(n, n);
        let mut tk = SignedPermutation::identity(n);
        for c in coeffs {
            if *c != BigInt::from(0) {
                for k in 0..n {
                    *out.entry_mut(tk.images[k], k) += c * tk.signs[k];
                }
            }
            tk = t.compose(&tk);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.lo(), self.complex.highest_stored_degree());
        if self.actions.len() != (hi - lo + 1).max(0) as usize || self.tuples.len() != self.actions.len() {
            return Err(Error::DimensionMismatch("one action per degree required".into()));
        }
        for m in lo..=hi {
            let t = self.action(m);
            if t.len() != self.complex.rank(m) {
                return Err(Error::DimensionMismatch(format!("action in degree {} has wrong size", m)));
            }
            if t.power(self.p as usize) != SignedPermutation::identity(t.len()) {
                return Err(Error::Precondition(format!("t^{} ≠ 1 in degree {}", self.p, m)));
            }
            let d = self.complex.differential(m);
            let lhs = self.action(m + 1).matrix().checked_mul(&d)?;
            let rhs = d.checked_mul(&t.matrix())?;
            if lhs != rhs {
                return Err(Error::Precondition(format!("action does not commute with d in degree {}", m)));
            }
        }
        Ok(())
    }

    /// Subcomplex spanned by the basis tuples accepted by `keep`; it must be
    /// closed under d and the action.
    pub fn restrict(&self, keep: impl Fn(&FactorTuple) -> bool) -> Result<EquivariantComplex> {
        let (lo, hi) = (self.lo(), self.complex.highest_stored_degree());
        if hi < lo {
            return Ok(self.clone());
        }
        let idx: Vec<Vec<usize>> = (lo..=hi).map(|m| (0..self.complex.rank(m)).filter(|&k| keep(&self.tuples(m)[k])).collect()).collect();
        let pos: Vec<HashMap<usize, usize>> = idx.iter().map(|v| v.iter().enumerate().map(|(a, &b)| (b, a)).collect()).collect();
        let mut diffs = Vec::new();
        for m in lo..hi {
            let k = (m - lo) as usize;
            let d = self.complex.differential(m);
            let full = d.select_cols(&idx[k]);
            let out_rows: Vec<usize> = (0..d.rows()).filter(|r| !pos[k + 1].contains_key(r)).collect();
            if !full.select_rows(&out_rows).is_zero() {
                return Err(Error::Precondition(format!("selection is not a subcomplex in degree {}", m)));
            }
            diffs.push(full.select_rows(&idx[k + 1]));
        }
        let mut actions = Vec::new();
        for m in lo..=hi {
            let k = (m - lo) as usize;
            let t = self.action(m);
            let mut images = Vec::new();
            let mut signs = Vec::new();
            for &b in &idx[k] {
                let img = *pos[k].get(&t.images[b]).ok_or_else(|| Error::Precondition("selection is not invariant".into()))?;
                images.push(img);
                signs.push(t.signs[b]);
            }
            actions.push(SignedPermutation { images, signs });
        }
        let ranks: Vec<usize> = idx.iter().map(Vec::len).collect();
        let tuples = (lo..=hi).map(|m| idx[(m - lo) as usize].iter().map(|&b| self.tuples(m)[b].clone()).collect()).collect();
        let complex = CochainComplex::new(lo, ranks, diffs, None)?;
        EquivariantComplex::new(complex, self.p, actions, tuples)
    }
}

/// C^{⊗p} with the generator moving the last factor to the front, with the
/// Koszul sign (-1)^{|x_p| (|x_1| + ... + |x_{p-1}|)}.
pub fn cyclic_power(c: &CochainComplex, p: u64) -> Result<EquivariantComplex> {
    if p < 2 || !crate::formulas::is_prime(p) {
        return Err(Error::Precondition(format!("p = {} is not a prime", p)));
    }
    let Some((lo, hi)) = c.support() else {
        return EquivariantComplex::new(CochainComplex::zero(), p, vec![], vec![]);
    };
    let mut power = c.clone();
    let mut tuples: Vec<Vec<FactorTuple>> = (lo..=hi).map(|m| (0..c.rank(m)).map(|k| vec![(m, k)]).collect()).collect();
    let mut plo = lo;
    for _ in 1..p {
        let (t, idx) = tensor_indexed(&power, c);
        let tlo = t.lowest_stored_degree();
        let new_tuples = idx
            .iter()
            .enumerate()
            .map(|(k, basis)| {
                let m = tlo + k as i64;
                basis
                    .iter()
                    .map(|&(da, li, ri)| {
                        let mut v = tuples[(da - plo) as usize][li].clone();
                        v.push((m - da, ri));
                        v
                    })
                    .collect()
            })
            .collect();
        power = t;
        tuples = new_tuples;
        plo = tlo;
    }
    let mut actions = Vec::new();
    for basis in &tuples {
        let lookup: HashMap<&FactorTuple, usize> = basis.iter().enumerate().map(|(k, t)| (t, k)).collect();
        let mut images = Vec::with_capacity(basis.len());
        let mut signs = Vec::with_capacity(basis.len());
        for t in basis {
            let last = *t.last().unwrap();
            let mut img = vec![last];
            img.extend_from_slice(&t[..t.len() - 1]);
            let rest: i64 = t[..t.len() - 1].iter().map(|x| x.0).sum();
            let sign = if (last.0 * rest).rem_euclid(2) == 0 { 1 } else { -1 };
            images.push(lookup[&img]);
            signs.push(sign);
        }
        actions.push(SignedPermutation { images, signs });
    }
    EquivariantComplex::new(power, p, actions, tuples)
}
