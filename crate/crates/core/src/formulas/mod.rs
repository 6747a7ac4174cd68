//! Closed-form predictions: multiplicities, page tables, wreath cohomology
//! and detection kernels.

mod pages;
mod table;
mod wreath;

pub use pages::{predict_sigma_p, predict_type_i_pages, predict_type_ii_e2, sigma_p_table, Parity, TypeIPrediction, TypeIIPrediction};
pub use table::{CellMismatch, IndexSet, PageTable, Pattern};
pub use wreath::{detection_kernel, detection_kernel_sigma_p, normalize, predict_wreath_cohomology, WreathPrediction};

use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// n = p^k with k ≥ 1.
pub fn is_power_of(n: u64, p: u64) -> bool {
    if n < p || p < 2 {
        return false;
    }
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    m == 1
}

/// Splits n ≥ 1 as (p-part, prime-to-p part).
pub fn split_p_part(n: u64, p: u64) -> (u64, u64) {
    let mut pp = 1;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        pp *= p;
    }
    (pp, m)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        0
    } else {
        num_integer::binomial(n as u128, k as u128) as u64
    }
}

/// gcd with the convention gcd(0, n) = n.
pub fn gcd_all(orders: &[u64]) -> u64 {
    orders.iter().fold(0u64, |a, &b| a.gcd(&b))
}

/// (1/p)((p-1)(-1)^j + C(p-1, j)) on 0 ≤ j ≤ p-1, zero elsewhere.
pub fn g(p: u64, j: i64) -> u64 {
    if j < 0 || j as u64 >= p {
        return 0;
    }
    let sign: i128 = if j % 2 == 0 { 1 } else { -1 };
    let v = (p as i128 - 1) * sign + binomial(p - 1, j as u64) as i128;
    (v / p as i128) as u64
}

/// Rank of the invariants of D(1,0) in degree -j.
pub fn f(p: u64, j: i64) -> u64 {
    if j == 0 || j == p as i64 {
        1
    } else if j > 0 && (j as u64) < p {
        binomial(p, j as u64) / p
    } else {
        0
    }
}
