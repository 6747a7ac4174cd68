use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::hermite::{column_hermite, solve_echelon};
use super::smith::smith_normal_form;
use super::IntegerMatrix;
use crate::error::{Error, Result};

/// ⊕ Z/f_i. Finite factors first in divisibility order, then zeros (copies of Z).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CyclicDecomposition {
    pub factors: Vec<BigInt>,
}

impl CyclicDecomposition {
    pub fn trivial() -> Self {
        CyclicDecomposition { factors: vec![] }
    }

    /// Normalizes an arbitrary multiset of cyclic orders (0 = Z, 1 dropped).
    pub fn from_orders(orders: &[BigInt]) -> Self {
        let free = orders.iter().filter(|o| o.is_zero()).count();
        let finite: Vec<BigInt> = orders.iter().filter(|o| !o.is_zero()).map(|o| o.abs()).collect();
        let mut factors = invariant_factors(&finite);
        factors.extend(std::iter::repeat(BigInt::zero()).take(free));
        CyclicDecomposition { factors }
    }

    pub fn from_u64(orders: &[u64]) -> Self {
        Self::from_orders(&orders.iter().map(|&o| BigInt::from(o)).collect::<Vec<_>>())
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn free_rank(&self) -> usize {
        self.factors.iter().filter(|f| f.is_zero()).count()
    }

    /// Group order, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            return None;
        }
        Some(self.factors.iter().fold(BigInt::one(), |a, b| a * b))
    }

    /// Number of cyclic summands of the p-primary part.
    pub fn p_rank(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.factors.iter().filter(|f| !f.is_zero() && (*f % &p).is_zero()).count()
    }

    /// Exponent of the torsion; `None` if there is a free summand.
    pub fn exponent(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            return None;
        }
        Some(self.factors.iter().fold(BigInt::one(), |a, b| a.lcm(b)))
    }

    pub fn to_u64(&self) -> Result<Vec<u64>> {
        self.factors
            .iter()
            .map(|f| f.to_u64().ok_or_else(|| Error::Overflow(format!("cyclic order {} exceeds u64", f))))
            .collect()
    }

    /// Orders split into prime powers, sorted; 0 kept for Z.
    pub fn primary_orders(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        for f in &self.factors {
            if f.is_zero() {
                out.push(BigInt::zero());
            } else {
                out.extend(prime_power_parts(f));
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for CyclicDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.factors.iter().map(|x| if x.is_zero() { "Z".to_string() } else { format!("Z/{}", x) }).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Prime-power factorisation by trial division.
pub fn prime_power_parts(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut q = BigInt::from(2);
    while &q * &q <= n {
        if (&n % &q).is_zero() {
            let mut pk = BigInt::one();
            while (&n % &q).is_zero() {
                n /= &q;
                pk *= &q;
            }
            out.push(pk);
        }
        q += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

/// Invariant factors (dropping 1s) of ⊕ Z/o_i for positive orders.
pub fn invariant_factors(orders: &[BigInt]) -> Vec<BigInt> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<BigInt, Vec<BigInt>> = BTreeMap::new();
    for o in orders {
        for pp in prime_power_parts(o) {
            let p = smallest_prime_factor(&pp);
            by_prime.entry(p).or_default().push(pp);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![BigInt::one(); len];
    for (_, mut pps) in by_prime {
        pps.sort();
        let off = len - pps.len();
        for (k, pp) in pps.into_iter().enumerate() {
            out[off + k] *= pp;
        }
    }
    out
}

fn smallest_prime_factor(n: &BigInt) -> BigInt {
    let mut q = BigInt::from(2);
    while &q * &q <= *n {
        if (n % &q).is_zero() {
            return q;
        }
        q += 1;
    }
    n.clone()
}

pub fn kernel_basis(m: &IntegerMatrix) -> IntegerMatrix {
    column_hermite(m).kernel_basis()
}

/// Canonical (Hermite) basis of the lattice spanned by the columns.
pub fn image_basis(m: &IntegerMatrix) -> IntegerMatrix {
    column_hermite(m).lattice_basis()
}

pub fn same_lattice(a: &IntegerMatrix, b: &IntegerMatrix) -> bool {
    a.rows() == b.rows() && image_basis(a) == image_basis(b)
}

/// Some integer x with m x = b, if one exists.
pub fn solve_in_lattice(m: &IntegerMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows()
        )));
    }
    let h = column_hermite(m);
    Ok(h.solve_reduced(b).map(|y| h.transform.mul_vec(&y).expect("shapes agree")))
}

/// Rank over F_p by Gaussian elimination; independent of the integer routines.
pub fn mod_p_rank(m: &IntegerMatrix, p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect())
        .collect();
    let cols = m.cols();
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, r);
        let inv = mod_inverse(a[rank][c], p);
        for k in 0..cols {
            a[rank][k] = a[rank][k] * inv % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..cols {
                    a[r][k] = (a[r][k] + p * p - f * a[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// span(ker) / span(img) with explicit generators and a coordinate map.
#[derive(Clone, Debug)]
pub struct Subquotient {
    ambient: usize,
    basis: IntegerMatrix,
    pivots: Vec<(usize, usize)>,
    transform: IntegerMatrix,
    kept: Vec<usize>,
    decomposition: CyclicDecomposition,
    generators: IntegerMatrix,
}

impl Subquotient {
    /// Columns of `ker_gens` span K, columns of `img_gens` span I ⊆ K.
    pub fn new(ker_gens: &IntegerMatrix, img_gens: &IntegerMatrix) -> Result<Self> {
        if ker_gens.rows() != img_gens.rows() {
            return Err(Error::DimensionMismatch(format!(
                "kernel vectors live in Z^{} but image vectors in Z^{}",
                ker_gens.rows(),
                img_gens.rows()
            )));
        }
        let ambient = ker_gens.rows();
        let h = column_hermite(ker_gens);
        let basis = h.lattice_basis();
        let pivots: Vec<(usize, usize)> = h.pivots.clone();
        let k = basis.cols();
        let mut rel = IntegerMatrix::zeros(k, img_gens.cols());
        for j in 0..img_gens.cols() {
            let col = img_gens.column(j);
            let y = solve_echelon(&basis, &pivots, &col).ok_or_else(|| {
                Error::Precondition(format!("image generator {} is not in the kernel lattice", j))
            })?;
            for (i, x) in y.into_iter().enumerate() {
                rel.set(i, j, x);
            }
        }
        let s = smith_normal_form(&rel);
        let diag = s.diagonal();
        let mut kept = Vec::new();
        let mut factors = Vec::new();
        for i in 0..k {
            let f = if i < s.rank { diag[i].clone() } else { BigInt::zero() };
            if !f.is_one() {
                kept.push(i);
                factors.push(f);
            }
        }
        let generators = basis.checked_mul(&s.u_inv)?.select_cols(&kept);
        Ok(Subquotient {
            ambient,
            basis,
            pivots,
            transform: s.u,
            kept,
            decomposition: CyclicDecomposition { factors },
            generators,
        })
    }

    pub fn decomposition(&self) -> &CyclicDecomposition {
        &self.decomposition
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.decomposition.factors
    }

    /// Ambient representatives, one column per cyclic factor.
    pub fn generators(&self) -> &IntegerMatrix {
        &self.generators
    }

    pub fn generator(&self, k: usize) -> Vec<BigInt> {
        self.generators.column(k)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn is_trivial(&self) -> bool {
        self.decomposition.is_trivial()
    }

    /// Coordinates of z in the cyclic factors, reduced mod each finite order.
    pub fn coordinates(&self, z: &[BigInt]) -> Result<Vec<BigInt>> {
        if z.len() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in Z^{}",
                z.len(),
                self.ambient
            )));
        }
        let c = solve_echelon(&self.basis, &self.pivots, z)
            .ok_or_else(|| Error::Precondition("vector is not in the kernel lattice".into()))?;
        let c2 = self.transform.mul_vec(&c)?;
        Ok(self
            .kept
            .iter()
            .zip(&self.decomposition.factors)
            .map(|(&i, f)| if f.is_zero() { c2[i].clone() } else { c2[i].mod_floor(f) })
            .collect())
    }

    /// Order of the class of z; `None` if infinite.
    pub fn class_order(&self, z: &[BigInt]) -> Result<Option<BigInt>> {
        let c = self.coordinates(z)?;
        let mut ord = BigInt::one();
        for (x, f) in c.iter().zip(self.factors()) {
            if x.is_zero() {
                continue;
            }
            if f.is_zero() {
                return Ok(None);
            }
            ord = ord.lcm(&(f / f.gcd(x)));
        }
        Ok(Some(ord))
    }
}

/// Cyclic decomposition of span(ker) / span(img).
pub fn subquotient_decomposition(ker_gens: &IntegerMatrix, img_gens: &IntegerMatrix) -> Result<CyclicDecomposition> {
    Ok(Subquotient::new(ker_gens, img_gens)?.decomposition.clone())
}

/// Kernel of a homomorphism ⊕Z/a_j -> ⊕Z/b_i given by integer matrix f,
/// as a subquotient of Z^k.
pub fn kernel_of_cyclic_map(f: &IntegerMatrix, source: &[BigInt], target: &[BigInt]) -> Result<Subquotient> {
    let k = source.len();
    let l = target.len();
    if f.rows() != l || f.cols() != k {
        return Err(Error::DimensionMismatch("map shape does not match groups".into()));
    }
    let big = f.hstack(&diag(target))?;
    let ker = kernel_basis(&big);
    let idx: Vec<usize> = (0..k).collect();
    let ker_src = ker.select_rows(&idx);
    Subquotient::new(&ker_src.hstack(&diag(source))?, &diag(source))
}

/// Homology at the middle of A --g--> B --f--> C for cyclic groups.
pub fn homology_of_cyclic_maps(
    g: &IntegerMatrix,
    a: &[BigInt],
    b: &[BigInt],
    f: &IntegerMatrix,
    c: &[BigInt],
) -> Result<CyclicDecomposition> {
    let k = b.len();
    if g.rows() != k || g.cols() != a.len() || f.cols() != k || f.rows() != c.len() {
        return Err(Error::DimensionMismatch("maps do not compose".into()));
    }
    let big = f.hstack(&diag(c))?;
    let ker = kernel_basis(&big);
    let idx: Vec<usize> = (0..k).collect();
    let ker_b = ker.select_rows(&idx).hstack(&diag(b))?;
    let img = g.hstack(&diag(b))?;
    subquotient_decomposition(&ker_b, &img)
}

fn diag(v: &[BigInt]) -> IntegerMatrix {
    let mut m = IntegerMatrix::zeros(v.len(), v.len());
    for (i, x) in v.iter().enumerate() {
        m.set(i, i, x.clone());
    }
    m
}
