use num_bigint::BigInt;
use num_traits::Zero;

use super::action::SignedPermutation;
use crate::error::{Error, Result};
use crate::exactlin::{kernel_basis, subquotient_decomposition, CyclicDecomposition, IntegerMatrix};

/// Σ coeffs[k] t^k in Z[C_p].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElement {
    pub coeffs: Vec<BigInt>,
}

impl GroupRingElement {
    pub fn t_minus_one(p: u64) -> Self {
        let mut c = vec![BigInt::zero(); p as usize];
        c[0] = BigInt::from(-1);
        c[1 % p as usize] += 1;
        GroupRingElement { coeffs: c }
    }

    pub fn norm(p: u64) -> Self {
        GroupRingElement { coeffs: vec![BigInt::from(1); p as usize] }
    }

    pub fn mul(&self, other: &GroupRingElement) -> GroupRingElement {
        let p = self.coeffs.len();
        let mut c = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[(i + j) % p] += a * b;
            }
        }
        GroupRingElement { coeffs: c }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Multiplication on the regular module Z[C_p] in the basis 1, t, ..., t^{p-1}.
    pub fn regular_matrix(&self) -> IntegerMatrix {
        let p = self.coeffs.len();
        let mut m = IntegerMatrix::zeros(p, p);
        for k in 0..p {
            for (j, a) in self.coeffs.iter().enumerate() {
                *m.entry_mut((k + j) % p, k) += a;
            }
        }
        m
    }
}

/// 0 <- W_0 <- W_1 <- ... <- W_length, each W_i = Z[C_p] w_i, with
/// ∂ w_i = (t - 1) w_{i-1} for i odd and N w_{i-1} for i even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub p: u64,
    pub length: usize,
}

pub fn periodic_resolution(p: u64, length: usize) -> Result<Resolution> {
    if p < 2 || !crate::formulas::is_prime(p) {
        return Err(Error::Precondition(format!("p = {} is not a prime", p)));
    }
    Ok(Resolution { p, length })
}

impl Resolution {
    /// ∂ : W_i -> W_{i-1}, for 1 ≤ i ≤ length.
    pub fn boundary(&self, i: usize) -> GroupRingElement {
        if i % 2 == 1 {
            GroupRingElement::t_minus_one(self.p)
        } else {
            GroupRingElement::norm(self.p)
        }
    }

    /// Consecutive boundaries compose to zero, and the augmented complex is
    /// exact through W_{length-1}.
    pub fn check(&self) -> Result<()> {
        for i in 2..=self.length {
            if !self.boundary(i - 1).mul(&self.boundary(i)).is_zero() {
                return Err(Error::Precondition(format!("∂∂ ≠ 0 at W_{}", i)));
            }
        }
        let p = self.p as usize;
        let eps = IntegerMatrix::from_rows(&[vec![1i64; p]])?;
        for i in 0..self.length {
            let out = if i == 0 { eps.clone() } else { self.boundary(i).regular_matrix() };
            let inc = self.boundary(i + 1).regular_matrix();
            let h = subquotient_decomposition(&kernel_basis(&out), &inc)?;
            if !h.is_trivial() {
                return Err(Error::Precondition(format!("resolution not exact at W_{}", i)));
            }
        }
        Ok(())
    }
}

/// H^i(C_p; M) for M = Z^n with the generator acting by `t`.
pub fn cp_cohomology(p: u64, t: &SignedPermutation, i: usize) -> Result<CyclicDecomposition> {
    if t.power(p as usize) != SignedPermutation::identity(t.len()) {
        return Err(Error::Precondition(format!("action does not have order dividing {}", p)));
    }
    let n = t.len();
    let tm = t.matrix().checked_sub(&IntegerMatrix::identity(n))?;
    let mut norm = IntegerMatrix::zeros(n, n);
    let mut tk = SignedPermutation::identity(n);
    for _ in 0..p {
        norm = norm.checked_add(&tk.matrix())?;
        tk = t.compose(&tk);
    }
    let (out, inc) = if i == 0 {
        (tm, IntegerMatrix::zeros(n, 0))
    } else if i % 2 == 1 {
        (norm, tm)
    } else {
        (tm, norm)
    };
    subquotient_decomposition(&kernel_basis(&out), &inc)
}
