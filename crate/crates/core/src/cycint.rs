//! Exact cyclotomic integers in `Z[ζ_e]` for `e ∈ {l², 2l²}`.
//!
//! Values are stored in the power basis `ζ^0, …, ζ^{φ(e)-1}` with `φ(e) = l(l-1)`.
//! Higher powers are folded back with the cyclotomic relation
//!
//! - `e = l²`:  `ζ^{l(l-1)} = -(1 + ζ^l + ζ^{2l} + … + ζ^{l(l-2)})`
//! - `e = 2l²`: `ζ^{l(l-1)} = -1 + ζ^l - ζ^{2l} + … + ζ^{l(l-2)}`
//!
//! Coefficients are `i64` with checked arithmetic; overflow is an error.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{gcd, is_prime, modulo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycIntError {
    #[error("e = {0} is not of the form l² or 2l² with l an odd prime")]
    BadOrder(u32),
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("embedding index {m} is not coprime to e = {e}")]
    NotCoprime { m: i64, e: u32 },
    #[error("coefficient overflow")]
    Overflow,
}

/// A validated order `e = l²` or `e = 2l²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CycOrder {
    l: u32,
    e: u32,
}

impl CycOrder {
    pub fn new(e: u32) -> Result<Self, CycIntError> {
        let odd_part = if e.is_multiple_of(2) { e / 2 } else { e };
        let l = (odd_part as f64).sqrt().round() as u32;
        if l * l != odd_part || l < 3 || !is_prime(l as u64) {
            return Err(CycIntError::BadOrder(e));
        }
        Ok(Self { l, e })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// `φ(e) = l(l-1)`, the length of the coefficient vector.
    pub fn phi(&self) -> usize {
        (self.l * (self.l - 1)) as usize
    }

    fn alternating(&self) -> bool {
        self.e.is_multiple_of(2)
    }

    /// Fold a vector indexed by exponent `0..e` down to canonical length `φ(e)`.
    fn reduce(&self, mut work: Vec<i64>) -> Result<Vec<i64>, CycIntError> {
        debug_assert_eq!(work.len(), self.e as usize);
        let phi = self.phi();
        let l = self.l as usize;
        // ζ^d = ζ^{d-φ} · ζ^φ and every replacement exponent d-φ+jl is at most d-l,
        // so one descending pass suffices.
        for d in (phi..work.len()).rev() {
            let c = work[d];
            if c == 0 {
                continue;
            }
            work[d] = 0;
            let base = d - phi;
            for j in 0..l - 1 {
                let sign = if self.alternating() && j % 2 == 1 { 1 } else { -1 };
                let idx = base + j * l;
                work[idx] = c
                    .checked_mul(sign)
                    .and_then(|t| work[idx].checked_add(t))
                    .ok_or(CycIntError::Overflow)?;
            }
        }
        work.truncate(phi);
        Ok(work)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    order: CycOrder,
    coeffs: Vec<i64>,
}

impl CycInt {
    pub fn zero(order: CycOrder) -> Self {
        Self {
            order,
            coeffs: vec![0; order.phi()],
        }
    }

    pub fn constant(c: i64, order: CycOrder) -> Self {
        let mut x = Self::zero(order);
        x.coeffs[0] = c;
        x
    }

    /// `c·ζ_e^d` in canonical form; `d` may be any integer.
    pub fn monomial(c: i64, d: i64, e: u32) -> Result<Self, CycIntError> {
        let order = CycOrder::new(e)?;
        let mut work = vec![0i64; e as usize];
        work[modulo(d, e) as usize] = c;
        Ok(Self {
            order,
            coeffs: order.reduce(work)?,
        })
    }

    /// `Σ_d counts[d]·ζ^d` for a vector indexed by exponent `0..e`.
    pub fn from_power_counts(order: CycOrder, counts: Vec<i64>) -> Result<Self, CycIntError> {
        assert_eq!(counts.len(), order.e as usize, "one count per exponent");
        Ok(Self {
            order,
            coeffs: order.reduce(counts)?,
        })
    }

    pub fn order(&self) -> CycOrder {
        self.order
    }

    pub fn e(&self) -> u32 {
        self.order.e
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The integer value when `self` lies in `Z`.
    pub fn as_constant(&self) -> Option<i64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then(|| self.coeffs[0])
    }

    fn same_order(&self, other: &Self) -> Result<(), CycIntError> {
        if self.order != other.order {
            return Err(CycIntError::OrderMismatch(self.e(), other.e()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CycIntError> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_add(*b).ok_or(CycIntError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    pub fn negate(&self) -> Result<Self, CycIntError> {
        self.scale(-1)
    }

    pub fn scale(&self, c: i64) -> Result<Self, CycIntError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.checked_mul(c).ok_or(CycIntError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    /// Image under `ζ_e ↦ exp(2πi·m/e)`.
    pub fn embed_complex(&self, m: i64) -> Result<Complex64, CycIntError> {
        let e = self.e();
        if gcd(m.unsigned_abs(), e as u64) != 1 {
            return Err(CycIntError::NotCoprime { m, e });
        }
        let step = 2.0 * PI / e as f64;
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(t, &c)| {
                let angle = step * ((m.rem_euclid(e as i64) * t as i64) % e as i64) as f64;
                Complex64::from_polar(c as f64, angle)
            })
            .sum())
    }
}

impl Serialize for CycInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CycInt", 3)?;
        s.serialize_field("e", &self.e())?;
        s.serialize_field("basis", &format!("zeta^0..zeta^{}", self.order.phi() - 1))?;
        s.serialize_field("coeffs", &self.coeffs)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn coeff_map(x: &CycInt) -> Vec<(usize, i64)> {
        x.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(t, &c)| (t, c))
            .collect()
    }

    #[test]
    fn order_validation() {
        assert_eq!(CycOrder::new(9).unwrap().phi(), 6);
        assert_eq!(CycOrder::new(50).unwrap().l(), 5);
        assert_eq!(CycOrder::new(338).unwrap().phi(), 156);
        for bad in [4, 8, 12, 16, 36, 81, 10] {
            assert_eq!(CycOrder::new(bad), Err(CycIntError::BadOrder(bad)));
        }
    }

    #[test]
    fn monomial_examples() {
        assert_eq!(coeff_map(&CycInt::monomial(1, 3, 9).unwrap()), vec![(3, 1)]);
        assert_eq!(coeff_map(&CycInt::monomial(1, 6, 9).unwrap()), vec![(0, -1), (3, -1)]);
        assert_eq!(coeff_map(&CycInt::monomial(1, 6, 18).unwrap()), vec![(0, -1), (3, 1)]);
        assert_eq!(coeff_map(&CycInt::monomial(2, -4, 9).unwrap()), vec![(5, 2)]);
        assert_eq!(CycInt::monomial(1, 0, 12), Err(CycIntError::BadOrder(12)));
    }

    #[test]
    fn add_negate_scale() {
        let z6 = CycInt::monomial(1, 6, 9).unwrap();
        let one_plus_z3 = CycInt::constant(1, z6.order())
            .add(&CycInt::monomial(1, 3, 9).unwrap())
            .unwrap();
        assert!(z6.add(&one_plus_z3).unwrap().is_zero());
        let x = CycInt::monomial(5, 7, 9).unwrap();
        assert_eq!(x.add(&CycInt::zero(x.order())).unwrap(), x);
        assert_eq!(x.negate().unwrap().scale(-1).unwrap(), x);
        let y = CycInt::monomial(1, 1, 18).unwrap();
        assert_eq!(x.add(&y), Err(CycIntError::OrderMismatch(9, 18)));
        let big = CycInt::constant(i64::MAX, x.order());
        assert_eq!(big.add(&big), Err(CycIntError::Overflow));
    }

    #[test]
    fn embedding_examples() {
        let order = CycOrder::new(9).unwrap();
        let x = CycInt::from_power_counts(order, vec![1, 0, 0, 1, 0, 0, 1, 0, 0]).unwrap();
        assert!(x.is_zero());
        assert!(x.embed_complex(1).unwrap().norm() < 1e-12);
        let c = CycInt::constant(-7, order);
        for m in [1, 2, 4, 5, 7, 8] {
            let z = c.embed_complex(m).unwrap();
            assert!((z.re + 7.0).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
        let z = CycInt::monomial(1, 1, 18).unwrap().embed_complex(1).unwrap();
        assert!((z - Complex64::from_polar(1.0, PI / 9.0)).norm() < 1e-12);
        assert_eq!(c.embed_complex(3), Err(CycIntError::NotCoprime { m: 3, e: 9 }));
    }

    #[test]
    fn vanishing_sums() {
        for l in [3u32, 5, 7, 11, 13] {
            let e = l * l;
            let mut acc = CycInt::zero(CycOrder::new(e).unwrap());
            for j in 0..l {
                acc = acc.add(&CycInt::monomial(1, (j * l) as i64, e).unwrap()).unwrap();
            }
            assert!(acc.is_zero(), "Φ_{e}");
            let e2 = 2 * e;
            let mut acc = CycInt::zero(CycOrder::new(e2).unwrap());
            for j in 0..l {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                acc = acc.add(&CycInt::monomial(sign, (j * l) as i64, e2).unwrap()).unwrap();
            }
            assert!(acc.is_zero(), "Φ_{e2}");
        }
    }

    #[test]
    fn alternating_replacement_for_odd_order_is_wrong() {
        // ζ_9^6 written with 1 - ζ^3 instead of -(1 + ζ^3) does not embed to ζ_9^6.
        let order = CycOrder::new(9).unwrap();
        let wrong = CycInt::from_power_counts(order, vec![1, 0, 0, -1, 0, 0, 0, 0, 0]).unwrap();
        let target = Complex64::from_polar(1.0, 2.0 * PI * 6.0 / 9.0);
        assert!((wrong.embed_complex(1).unwrap() - target).norm() > 0.5);
        let right = CycInt::monomial(1, 6, 9).unwrap();
        assert!((right.embed_complex(1).unwrap() - target).norm() < 1e-12);
    }

    #[test]
    fn json_form() {
        let x = CycInt::monomial(2, 5, 9).unwrap();
        assert_eq!(
            serde_json::to_string(&x).unwrap(),
            r#"{"e":9,"basis":"zeta^0..zeta^5","coeffs":[0,0,0,0,0,2]}"#
        );
    }

    fn order_strategy() -> impl Strategy<Value = u32> {
        prop::sample::select(vec![9u32, 18, 25, 50, 49, 98])
    }

    proptest! {
        #[test]
        fn canonical_form_embeds_like_the_raw_sum(
            e in order_strategy(),
            terms in prop::collection::vec((-20i64..20, -500i64..500), 1..30),
        ) {
            let order = CycOrder::new(e).unwrap();
            let mut acc = CycInt::zero(order);
            for &(c, d) in &terms {
                acc = acc.add(&CycInt::monomial(c, d, e).unwrap()).unwrap();
            }
            for m in (1..e as i64).filter(|&m| gcd(m as u64, e as u64) == 1) {
                let raw: Complex64 = terms
                    .iter()
                    .map(|&(c, d)| Complex64::from_polar(c as f64, 2.0 * PI * (m * d) as f64 / e as f64))
                    .sum();
                prop_assert!((acc.embed_complex(m).unwrap() - raw).norm() < 1e-9);
            }
        }

        #[test]
        fn monomial_is_periodic(e in order_strategy(), c in -50i64..50, d in -1000i64..1000) {
            prop_assert_eq!(
                CycInt::monomial(c, d, e).unwrap(),
                CycInt::monomial(c, d.rem_euclid(e as i64), e).unwrap()
            );
            prop_assert_eq!(
                CycInt::monomial(c, d + e as i64, e).unwrap(),
                CycInt::monomial(c, d, e).unwrap()
            );
        }

        #[test]
        fn zero_embeds_to_zero_only_for_zero_coeffs(
            e in order_strategy(),
            terms in prop::collection::vec((-3i64..4, 0i64..200), 0..8),
        ) {
            // canonical uniqueness: a vector vanishing at every embedding is the zero vector
            let order = CycOrder::new(e).unwrap();
            let mut acc = CycInt::zero(order);
            for &(c, d) in &terms {
                acc = acc.add(&CycInt::monomial(c, d, e).unwrap()).unwrap();
            }
            let vanishes = (1..e as i64)
                .filter(|&m| gcd(m as u64, e as u64) == 1)
                .all(|m| acc.embed_complex(m).unwrap().norm() < 1e-9);
            prop_assert_eq!(vanishes, acc.is_zero());
        }
    }
}
