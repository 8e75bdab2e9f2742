//! Ring objects for generic series code.
//!
//! Following the ring-object pattern (operations live on a ring value, not on
//! the element type), so that the same series engine runs over exact
//! rationals, `Z_p`, and `Z_p[nu]`.

use crate::eis::EisNum;
use crate::err::RegError;
use crate::padic::PadicNum;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;

pub trait Ring: Clone + Debug {
    type Elem: Clone + Debug + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, RegError>;
    /// Zero at the element's reported precision (exact test over `Q`).
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Scale by an exact nonzero integer.
    fn mul_exact_i64(&self, a: &Self::Elem, n: i64) -> Self::Elem;
    /// Divide by an exact nonzero integer, tracking precision over `Z_p`.
    fn div_exact_i64(&self, a: &Self::Elem, n: i64) -> Self::Elem;
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem, RegError>;

    fn eq_elem(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }
    fn from_ratio(&self, num: i64, den: i64) -> Self::Elem {
        self.from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
            .expect("ratio must reduce in this ring")
    }
}

/// Rings of p-adic flavour: carry a prime, a working precision cap, a
/// coefficientwise Frobenius and precision inspection.
pub trait PadicLike: Ring {
    fn prime(&self) -> u64;
    /// Default absolute precision given to newly constructed elements.
    fn cap(&self) -> i64;
    fn with_cap(&self, cap: i64) -> Self;
    /// Witt-vector Frobenius on coefficients (identity on `Z_p`).
    fn frobenius_elem(&self, a: &Self::Elem) -> Self::Elem;
    /// Absolute precision of an element.
    fn precision_of(&self, a: &Self::Elem) -> i64;
    /// Valuation lower bound; `None` when indistinguishable from zero.
    fn valuation_of(&self, a: &Self::Elem) -> Option<i64>;
    fn mul_p_pow(&self, a: &Self::Elem, k: i64) -> Self::Elem;
    fn reduce_prec(&self, a: &Self::Elem, n: i64) -> Self::Elem;
    fn eq_mod(&self, a: &Self::Elem, b: &Self::Elem, k: i64) -> bool;
}

/// Exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalRing;

impl Ring for RationalRing {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational, RegError> {
        if a.is_zero() {
            Err(RegError::Domain("inverse of zero rational".into()))
        } else {
            Ok(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn mul_exact_i64(&self, a: &BigRational, n: i64) -> BigRational {
        a * BigRational::from(BigInt::from(n))
    }
    fn div_exact_i64(&self, a: &BigRational, n: i64) -> BigRational {
        assert!(n != 0);
        a / BigRational::from(BigInt::from(n))
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational, RegError> {
        Ok(q.clone())
    }
}

/// `Z_p` (and its fraction field via negative valuations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicRing {
    pub p: u64,
    pub prec: i64,
}

impl PadicRing {
    pub fn new(p: u64, prec: i64) -> Self {
        assert!(p >= 5, "primes below 5 are outside the supported range");
        assert!(prec >= 1);
        PadicRing { p, prec }
    }
}

impl Ring for PadicRing {
    type Elem = PadicNum;

    fn zero(&self) -> PadicNum {
        PadicNum::zero(self.p)
    }
    fn one(&self) -> PadicNum {
        PadicNum::from_i64(self.p, 1, self.prec)
    }
    fn from_i64(&self, n: i64) -> PadicNum {
        PadicNum::from_i64(self.p, n, self.prec)
    }
    fn add(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        a.add(b)
    }
    fn sub(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        a.sub(b)
    }
    fn mul(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        a.mul(b)
    }
    fn neg(&self, a: &PadicNum) -> PadicNum {
        a.neg()
    }
    fn inv(&self, a: &PadicNum) -> Result<PadicNum, RegError> {
        a.inv()
    }
    fn is_zero(&self, a: &PadicNum) -> bool {
        a.is_zero()
    }
    fn mul_exact_i64(&self, a: &PadicNum, n: i64) -> PadicNum {
        a.mul_exact_i64(n)
    }
    fn div_exact_i64(&self, a: &PadicNum, n: i64) -> PadicNum {
        a.div_exact_i64(n)
    }
    fn from_rational(&self, q: &BigRational) -> Result<PadicNum, RegError> {
        PadicNum::from_rational(self.p, q, self.prec)
    }
}

impl PadicLike for PadicRing {
    fn prime(&self) -> u64 {
        self.p
    }
    fn cap(&self) -> i64 {
        self.prec
    }
    fn with_cap(&self, cap: i64) -> Self {
        PadicRing::new(self.p, cap)
    }
    fn frobenius_elem(&self, a: &PadicNum) -> PadicNum {
        a.clone()
    }
    fn precision_of(&self, a: &PadicNum) -> i64 {
        a.precision()
    }
    fn valuation_of(&self, a: &PadicNum) -> Option<i64> {
        a.valuation()
    }
    fn mul_p_pow(&self, a: &PadicNum, k: i64) -> PadicNum {
        a.mul_p_pow(k)
    }
    fn reduce_prec(&self, a: &PadicNum, n: i64) -> PadicNum {
        a.reduce_prec(n)
    }
    fn eq_mod(&self, a: &PadicNum, b: &PadicNum, k: i64) -> bool {
        a.eq_mod(b, k)
    }
}

/// `Z_p[nu]` with `nu^2 + nu + 1 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisRing {
    pub p: u64,
    pub prec: i64,
}

impl EisRing {
    pub fn new(p: u64, prec: i64) -> Self {
        assert!(p >= 5, "primes below 5 are outside the supported range");
        assert!(prec >= 1);
        EisRing { p, prec }
    }

    pub fn sqrt_m3(&self) -> EisNum {
        EisNum::sqrt_m3(self.p, self.prec)
    }

    pub fn nu(&self) -> EisNum {
        EisNum::from_i64_pair(self.p, 0, 1, self.prec)
    }
}

impl Ring for EisRing {
    type Elem = EisNum;

    fn zero(&self) -> EisNum {
        EisNum::zero(self.p)
    }
    fn one(&self) -> EisNum {
        EisNum::from_i64_pair(self.p, 1, 0, self.prec)
    }
    fn from_i64(&self, n: i64) -> EisNum {
        EisNum::from_i64_pair(self.p, n, 0, self.prec)
    }
    fn add(&self, a: &EisNum, b: &EisNum) -> EisNum {
        a.add(b)
    }
    fn sub(&self, a: &EisNum, b: &EisNum) -> EisNum {
        a.sub(b)
    }
    fn mul(&self, a: &EisNum, b: &EisNum) -> EisNum {
        a.mul(b)
    }
    fn neg(&self, a: &EisNum) -> EisNum {
        a.neg()
    }
    fn inv(&self, a: &EisNum) -> Result<EisNum, RegError> {
        a.inv()
    }
    fn is_zero(&self, a: &EisNum) -> bool {
        a.is_zero()
    }
    fn mul_exact_i64(&self, a: &EisNum, n: i64) -> EisNum {
        a.mul_exact_i64(n)
    }
    fn div_exact_i64(&self, a: &EisNum, n: i64) -> EisNum {
        a.div_exact_i64(n)
    }
    fn from_rational(&self, q: &BigRational) -> Result<EisNum, RegError> {
        Ok(EisNum::from_padic(PadicNum::from_rational(self.p, q, self.prec)?))
    }
}

impl PadicLike for EisRing {
    fn prime(&self) -> u64 {
        self.p
    }
    fn cap(&self) -> i64 {
        self.prec
    }
    fn with_cap(&self, cap: i64) -> Self {
        EisRing::new(self.p, cap)
    }
    fn frobenius_elem(&self, a: &EisNum) -> EisNum {
        a.frobenius()
    }
    fn precision_of(&self, a: &EisNum) -> i64 {
        a.precision()
    }
    fn valuation_of(&self, a: &EisNum) -> Option<i64> {
        a.valuation()
    }
    fn mul_p_pow(&self, a: &EisNum, k: i64) -> EisNum {
        a.mul_p_pow(k)
    }
    fn reduce_prec(&self, a: &EisNum, n: i64) -> EisNum {
        a.reduce_prec(n)
    }
    fn eq_mod(&self, a: &EisNum, b: &EisNum, k: i64) -> bool {
        a.eq_mod(b, k)
    }
}

/// p-adic valuation of a rational (for ledger predictions in tests).
pub fn rational_vp(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let bp = BigInt::from(p);
    let mut v = 0i64;
    let mut num = q.numer().abs();
    let mut den = q.denom().abs();
    while (&num % &bp).is_zero() {
        num /= &bp;
        v += 1;
    }
    while (&den % &bp).is_zero() {
        den /= &bp;
        v -= 1;
    }
    Some(v)
}
