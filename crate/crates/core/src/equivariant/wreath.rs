use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::action::{cyclic_power, EquivariantComplex};
use super::double::{equivariant_hom_double_complex, totalize, DoubleComplex, TotalComplex};
use super::resolution::{periodic_resolution, Resolution};
use crate::complexes::{
    build_cyclic_complex, cocycle_order, complex_from_graded, ChainMap, CochainComplex, Cocycle, GradedAbelianGroup, Window,
};
use crate::error::{Error, Result};
use crate::exactlin::IntegerMatrix;

/// Everything needed to compute H^*(Tot Hom_{C_p}(W, C^{⊗p})) on a window.
#[derive(Clone, Debug)]
pub struct WreathModel {
    pub base: CochainComplex,
    pub power: EquivariantComplex,
    pub resolution: Resolution,
    pub double: DoubleComplex,
    pub total: TotalComplex,
}

impl WreathModel {
    /// Chooses the resolution length so that `window` is certified.
    pub fn build(base: CochainComplex, p: u64, window: Window) -> Result<Self> {
        let power = cyclic_power(&base, p)?;
        let jlo = power.complex.support().map_or(window.lo, |s| s.0);
        let length = (window.hi - jlo + p as i64 + 2).max(1) as usize;
        Self::with_length(base, power, length, window)
    }

    fn with_length(base: CochainComplex, power: EquivariantComplex, length: usize, window: Window) -> Result<Self> {
        let resolution = periodic_resolution(power.p, length)?;
        let double = equivariant_hom_double_complex(&resolution, &power)?;
        let total = totalize(&double, window)?;
        Ok(WreathModel { base, power, resolution, double, total })
    }

    pub fn p(&self) -> u64 {
        self.power.p
    }

    pub fn cohomology(&self) -> Result<GradedAbelianGroup> {
        self.total.cohomology()
    }

    /// The cocycle c ⊗ ... ⊗ c placed in column 0.
    pub fn wreath_class_cocycle(&self, c: &Cocycle) -> Result<Cocycle> {
        if !self.base.is_cocycle(c)? {
            return Err(Error::NotACocycle { degree: c.degree });
        }
        let p = self.p();
        if p == 2 && c.degree.rem_euclid(2) == 1 {
            return Err(Error::Precondition(
                "for p = 2 the generator acts by -1 on c⊗c when c has odd degree, so c⊗c is not invariant".into(),
            ));
        }
        let m = p as i64 * c.degree;
        let x: Vec<BigInt> = self
            .power
            .tuples(m)
            .iter()
            .map(|t| {
                if t.iter().all(|&(d, _)| d == c.degree) {
                    t.iter().fold(BigInt::one(), |acc, &(_, k)| acc * &c.coefficients[k])
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        let v = self.total.embed(0, m, &x)?;
        let z = Cocycle { degree: m, coefficients: v };
        if !self.total.complex.is_cocycle(&z)? {
            return Err(Error::NotACocycle { degree: m });
        }
        Ok(z)
    }

    /// Order of the class of c ⊗ ... ⊗ c; `None` for infinite order.
    pub fn wreath_class_order(&self, c: &Cocycle) -> Result<Option<BigInt>> {
        let z = self.wreath_class_cocycle(c)?;
        if !self.total.window.contains(z.degree) {
            return Err(Error::Precondition(format!("degree {} lies outside the certified window", z.degree)));
        }
        cocycle_order(&self.total.complex, &z)
    }

    /// Projection of Tot onto column 0, a chain map Tot -> C^{⊗p} inducing
    /// restriction to the trivial subgroup.
    pub fn column_zero_projection(&self) -> ChainMap {
        let tot = &self.total;
        let d = &self.power.complex;
        let lo = tot.complex.lowest_stored_degree();
        let hi = tot.complex.highest_stored_degree();
        let maps = (lo..=hi)
            .map(|m| {
                let mut f = IntegerMatrix::zeros(d.rank(m), tot.dim(m));
                if let Some(b) = tot.block(m, 0) {
                    for k in 0..b.len {
                        f.set(k, b.offset + k, BigInt::one());
                    }
                }
                f
            })
            .collect();
        ChainMap { lo, maps }
    }
}

/// H^* of Tot Hom_{C_p}(W, C(n, d)^{⊗p}) on the window.
pub fn bruteforce_cyclic(p: u64, n: u64, d: i64, window: Window) -> Result<GradedAbelianGroup> {
    WreathModel::build(build_cyclic_complex(n, d), p, window)?.cohomology()
}

/// H^* of Tot Hom_{C_p}(W, C'^{⊗p}) with C' the minimal model of h, on the window.
pub fn bruteforce_graded(h: &GradedAbelianGroup, p: u64, window: Window) -> Result<GradedAbelianGroup> {
    let dmin = h.min_degree().unwrap_or(0);
    // a summand above this degree only feeds total degrees > window.hi + 1
    let bound = window.hi + 1 - (p as i64 - 1) * (dmin - 1);
    let (c, _) = complex_from_graded(h, bound)?;
    if c.support().is_none() {
        return Ok(GradedAbelianGroup::zero());
    }
    WreathModel::build(c, p, window)?.cohomology()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(lo: i64, hi: i64) -> Window {
        Window::new(lo, hi).unwrap()
    }

    #[test]
    fn cube_of_z9_in_degree_two() {
        // Z/9 in 4, Z/27 in 6, Z/3 in 5,7,9,... and 8,10,...
        let h = bruteforce_cyclic(3, 9, 2, w(2, 12)).unwrap();
        let r = h.restrict(2, 12);
        assert_eq!(r.get(&4), Some(&vec![9]));
        assert_eq!(r.get(&6), Some(&vec![27]));
        for m in [5, 7, 8, 9, 10, 11, 12] {
            assert_eq!(r.get(&m), Some(&vec![3]), "degree {}", m);
        }
        assert_eq!(r.get(&3), None);
    }

    #[test]
    fn wreath_class_of_degree_zero_generator() {
        for (p, n, expect) in [(3u64, 9u64, 27u64), (2, 2, 4), (3, 2, 2), (5, 5, 25)] {
            let model = WreathModel::build(build_cyclic_complex(n, 0), p, w(-(p as i64), 2)).unwrap();
            let c = Cocycle { degree: 0, coefficients: vec![BigInt::one()] };
            assert_eq!(model.wreath_class_order(&c).unwrap(), Some(BigInt::from(expect)), "p={} n={}", p, n);
        }
    }

    #[test]
    fn odd_degree_square_rejected() {
        let model = WreathModel::build(build_cyclic_complex(4, 1), 2, w(0, 3)).unwrap();
        let c = Cocycle { degree: 1, coefficients: vec![BigInt::one()] };
        assert!(matches!(model.wreath_class_cocycle(&c), Err(Error::Precondition(_))));
        let odd_p = WreathModel::build(build_cyclic_complex(4, 1), 3, w(0, 4)).unwrap();
        assert_eq!(odd_p.wreath_class_order(&c).unwrap(), Some(BigInt::from(4)));
    }

    #[test]
    fn non_cocycle_rejected() {
        let model = WreathModel::build(build_cyclic_complex(4, 1), 3, w(0, 4)).unwrap();
        let c = Cocycle { degree: 0, coefficients: vec![BigInt::one()] };
        assert!(matches!(model.wreath_class_cocycle(&c), Err(Error::NotACocycle { degree: 0 })));
    }

    #[test]
    fn projection_is_a_chain_map() {
        let model = WreathModel::build(build_cyclic_complex(3, 1), 3, w(0, 6)).unwrap();
        model.column_zero_projection().check(&model.total.complex, &model.power.complex).unwrap();
    }
}
