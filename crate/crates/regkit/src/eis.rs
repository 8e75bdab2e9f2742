//! The quadratic extension `Z_p[nu]`, `nu^2 + nu + 1 = 0`.
//!
//! Elements are stored as formal pairs `a + b*nu` over [`PadicNum`], for every
//! prime `p >= 5`. When `p = 1 mod 3` the ring splits as `Z_p x Z_p`; the
//! formal representation is kept anyway so that one code path serves both
//! congruence classes, and [`EisNum::embed`] specialises `nu` to its canonical
//! Hensel lift when a plain `Z_p` view is wanted.

use crate::err::RegError;
use crate::padic::PadicNum;
use num_rational::BigRational;
use std::fmt;

#[derive(Clone, PartialEq)]
pub struct EisNum {
    pub a: PadicNum,
    pub b: PadicNum,
}

impl EisNum {
    pub fn new(a: PadicNum, b: PadicNum) -> Self {
        assert_eq!(a.prime(), b.prime(), "mixed primes in Eisenstein pair");
        EisNum { a, b }
    }

    pub fn prime(&self) -> u64 {
        self.a.prime()
    }

    pub fn zero(p: u64) -> Self {
        EisNum::new(PadicNum::zero(p), PadicNum::zero(p))
    }

    pub fn from_padic(a: PadicNum) -> Self {
        let p = a.prime();
        EisNum::new(a, PadicNum::zero(p))
    }

    pub fn from_i64_pair(p: u64, a: i64, b: i64, prec: i64) -> Self {
        EisNum::new(PadicNum::from_i64(p, a, prec), PadicNum::from_i64(p, b, prec))
    }

    pub fn from_rational_pair(
        p: u64,
        a: &BigRational,
        b: &BigRational,
        prec: i64,
    ) -> Result<Self, RegError> {
        Ok(EisNum::new(
            PadicNum::from_rational(p, a, prec)?,
            PadicNum::from_rational(p, b, prec)?,
        ))
    }

    /// `sqrt(-3) := 1 + 2 nu`, the square root fixed throughout the crate.
    pub fn sqrt_m3(p: u64, prec: i64) -> Self {
        EisNum::from_i64_pair(p, 1, 2, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Reported precision: the coarser of the two components.
    pub fn precision(&self) -> i64 {
        self.a.precision().min(self.b.precision())
    }

    /// Valuation lower bound: min of the component valuations.
    pub fn valuation(&self) -> Option<i64> {
        match (self.a.valuation(), self.b.valuation()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) => Some(x.min(self.b.precision())),
            (None, Some(y)) => Some(y.min(self.a.precision())),
            (None, None) => None,
        }
    }

    /// The `nu`-component (zero for elements of `Z_p`).
    pub fn nu_component(&self) -> &PadicNum {
        &self.b
    }

    /// A unit of the ring: the norm has valuation exactly zero.
    pub fn is_unit(&self) -> bool {
        self.norm().valuation() == Some(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        EisNum::new(self.a.add(&o.a), self.b.add(&o.b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        EisNum::new(self.a.sub(&o.a), self.b.sub(&o.b))
    }

    pub fn neg(&self) -> Self {
        EisNum::new(self.a.neg(), self.b.neg())
    }

    /// `(a + b nu)(c + d nu) = ac - bd + (ad + bc - bd) nu`.
    pub fn mul(&self, o: &Self) -> Self {
        let ac = self.a.mul(&o.a);
        let bd = self.b.mul(&o.b);
        let ad = self.a.mul(&o.b);
        let bc = self.b.mul(&o.a);
        EisNum::new(ac.sub(&bd), ad.add(&bc).sub(&bd))
    }

    pub fn mul_padic(&self, s: &PadicNum) -> Self {
        EisNum::new(self.a.mul(s), self.b.mul(s))
    }

    pub fn mul_exact_i64(&self, nn: i64) -> Self {
        EisNum::new(self.a.mul_exact_i64(nn), self.b.mul_exact_i64(nn))
    }

    pub fn div_exact_i64(&self, nn: i64) -> Self {
        EisNum::new(self.a.div_exact_i64(nn), self.b.div_exact_i64(nn))
    }

    pub fn mul_p_pow(&self, k: i64) -> Self {
        EisNum::new(self.a.mul_p_pow(k), self.b.mul_p_pow(k))
    }

    /// Galois conjugation `nu -> nu^2 = -1 - nu`: `(a, b) -> (a - b, -b)`.
    pub fn conj(&self) -> Self {
        EisNum::new(self.a.sub(&self.b), self.b.neg())
    }

    /// Norm `N(a + b nu) = a^2 - a b + b^2`.
    pub fn norm(&self) -> PadicNum {
        self.a
            .mul(&self.a)
            .sub(&self.a.mul(&self.b))
            .add(&self.b.mul(&self.b))
    }

    /// Coefficientwise Witt-vector Frobenius: `nu -> nu^p`, the identity for
    /// `p = 1 mod 3` and conjugation for `p = 2 mod 3`.
    pub fn frobenius(&self) -> Self {
        if self.prime() % 3 == 1 {
            self.clone()
        } else {
            self.conj()
        }
    }

    /// Inverse `conj / norm`. Only elements of unit norm are invertible in
    /// the integral ring; anything divisible by p (or a zero divisor of the
    /// split ring) is rejected.
    pub fn inv(&self) -> Result<Self, RegError> {
        let n = self.norm();
        if n.valuation() != Some(0) {
            return Err(RegError::Domain(
                "non-invertible Eisenstein element: norm is not a unit".into(),
            ));
        }
        let ninv = n.inv()?;
        Ok(self.conj().mul_padic(&ninv))
    }

    pub fn div(&self, o: &Self) -> Result<Self, RegError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow_i64(&self, e: i64) -> Result<Self, RegError> {
        if e == 0 {
            let p = self.prime();
            return Ok(EisNum::from_i64_pair(p, 1, 0, self.precision().max(1)));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc: Option<EisNum> = None;
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc.unwrap())
    }

    /// Specialise `nu` to a concrete root of `x^2+x+1` in `Z_p`.
    pub fn embed(&self, nu: &PadicNum) -> PadicNum {
        self.a.add(&self.b.mul(nu))
    }

    pub fn eq_mod(&self, o: &Self, k: i64) -> bool {
        self.a.eq_mod(&o.a, k) && self.b.eq_mod(&o.b, k)
    }

    pub fn reduce_prec(&self, n: i64) -> Self {
        EisNum::new(self.a.reduce_prec(n), self.b.reduce_prec(n))
    }
}

impl fmt::Debug for EisNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})*nu", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::canonical_nu;
    use num_bigint::BigUint;

    #[test]
    fn nu_satisfies_its_polynomial() {
        let p = 5;
        let nu = EisNum::from_i64_pair(p, 0, 1, 6);
        let probe = nu.mul(&nu).add(&nu).add(&EisNum::from_i64_pair(p, 1, 0, 6));
        assert!(probe.is_zero());
    }

    #[test]
    fn sqrt_m3_squares_to_minus_three() {
        for p in [5u64, 7, 13] {
            let r = EisNum::sqrt_m3(p, 8);
            let sq = r.mul(&r);
            assert!(sq.eq_mod(&EisNum::from_i64_pair(p, -3, 0, 8), 8));
        }
    }

    #[test]
    fn frobenius_examples_and_involution() {
        // p = 5 = 2 mod 3: nu -> nu^2 = -1 - nu, i.e. (0,1) -> (-1,-1)
        let nu = EisNum::from_i64_pair(5, 0, 1, 4);
        let f = nu.frobenius();
        assert!(f.eq_mod(&EisNum::from_i64_pair(5, -1, -1, 4), 4));
        // applying it twice is the identity
        assert!(f.frobenius().eq_mod(&nu, 4));
        // p = 7 = 1 mod 3: identity
        let nu7 = EisNum::from_i64_pair(7, 0, 1, 4);
        assert!(nu7.frobenius().eq_mod(&nu7, 4));
    }

    #[test]
    fn frobenius_is_a_ring_map() {
        let x = EisNum::from_i64_pair(5, 3, 4, 6);
        let y = EisNum::from_i64_pair(5, -2, 9, 6);
        assert!(x
            .mul(&y)
            .frobenius()
            .eq_mod(&x.frobenius().mul(&y.frobenius()), 6));
        assert!(x
            .add(&y)
            .frobenius()
            .eq_mod(&x.frobenius().add(&y.frobenius()), 6));
    }

    #[test]
    fn norm_and_inverse() {
        let x = EisNum::from_i64_pair(7, 2, 5, 6);
        // N = 4 - 10 + 25 = 19
        assert_eq!(x.norm().value_mod(6), BigUint::from(19u32));
        let i = x.inv().unwrap();
        let prod = x.mul(&i);
        assert!(prod.eq_mod(&EisNum::from_i64_pair(7, 1, 0, 5), 5));
    }

    #[test]
    fn non_unit_norm_is_rejected() {
        // nu - nu_bar = 2nu + 1 = sqrt(-3): norm 3, a unit for p >= 5,
        // but p*x has norm p^2 * N(x): not invertible
        let x = EisNum::from_i64_pair(7, 7, 14, 6);
        assert!(x.inv().is_err());
        // and in the split ring a zero divisor: (nu - r) with r the Z_p root
        let nu_val = canonical_nu(7, 6).unwrap();
        let x = EisNum::new(nu_val.neg(), PadicNum::from_i64(7, 1, 6));
        assert!(x.norm().is_zero());
        assert!(x.inv().is_err());
    }

    #[test]
    fn embedding_respects_products_when_split() {
        let nu_val = canonical_nu(13, 8).unwrap();
        let x = EisNum::from_i64_pair(13, 4, 7, 8);
        let y = EisNum::from_i64_pair(13, -3, 2, 8);
        let lhs = x.mul(&y).embed(&nu_val);
        let rhs = x.embed(&nu_val).mul(&y.embed(&nu_val));
        assert!(lhs.eq_mod(&rhs, 8));
    }

    #[test]
    fn conjugation_fixes_rationals_and_negates_sqrt_m3() {
        let r = EisNum::from_i64_pair(5, 9, 0, 6);
        assert!(r.conj().eq_mod(&r, 6));
        let s = EisNum::sqrt_m3(5, 6);
        assert!(s.conj().eq_mod(&s.neg(), 6));
    }
}
