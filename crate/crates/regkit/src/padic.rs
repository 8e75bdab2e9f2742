//! Capped-precision p-adic numbers.
//!
//! A nonzero [`PadicNum`] is `unit * p^v + O(p^prec)` with `0 <= unit < p^(prec-v)`
//! and `p` not dividing `unit`; `prec` is the guaranteed absolute precision.
//! Zero comes in two flavours: *exact* zero (known to infinite precision) and
//! zero *to precision N* (`O(p^N)`, valuation merely bounded below by `N`).
//! Arithmetic follows interval rules: addition keeps the smaller absolute
//! precision, multiplication adds valuations and combines relative precisions.

use crate::err::RegError;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

/// Absolute-precision sentinel for exactly known values (only exact zero).
pub const PREC_EXACT: i64 = i64::MAX / 4;

#[derive(Clone, PartialEq, Eq)]
pub struct PadicNum {
    p: u64,
    /// Guaranteed absolute precision: the value is known modulo `p^prec`.
    prec: i64,
    /// `Some((v, unit))` with `v < prec`, `unit` reduced mod `p^(prec-v)`,
    /// coprime to `p`. `None` means the value is `O(p^prec)`.
    repr: Option<(i64, BigUint)>,
}

fn pow_p(p: u64, k: i64) -> BigUint {
    assert!(k >= 0, "negative power of p requested");
    BigUint::from(p).pow(k as u32)
}

impl PadicNum {
    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Exact zero.
    pub fn zero(p: u64) -> Self {
        PadicNum { p, prec: PREC_EXACT, repr: None }
    }

    /// Zero to absolute precision `prec`: the interval `O(p^prec)`.
    pub fn zero_to_prec(p: u64, prec: i64) -> Self {
        PadicNum { p, prec, repr: None }
    }

    /// Build from a signed integer value and an absolute precision.
    pub fn from_bigint(p: u64, value: &BigInt, prec: i64) -> Self {
        Self::normalize(p, value.clone(), prec)
    }

    pub fn from_i64(p: u64, value: i64, prec: i64) -> Self {
        Self::from_bigint(p, &BigInt::from(value), prec)
    }

    /// Build from a rational with `p`-integral reduction handled through the
    /// valuation: the result has absolute precision `prec`.
    pub fn from_rational(p: u64, q: &BigRational, prec: i64) -> Result<Self, RegError> {
        if q.is_zero() {
            return Ok(Self::zero(p));
        }
        let bp = BigInt::from(p);
        let (mut num, mut den) = (q.numer().clone(), q.denom().clone());
        let mut v: i64 = 0;
        while (&num % &bp).is_zero() {
            num /= &bp;
            v += 1;
        }
        while (&den % &bp).is_zero() {
            den /= &bp;
            v -= 1;
        }
        if v >= prec {
            return Ok(Self::zero_to_prec(p, prec));
        }
        let m = pow_p(p, prec - v);
        let den_u = den.mod_floor(&BigInt::from(m.clone())).to_biguint().unwrap();
        let den_inv = modinv(&den_u, &m).ok_or_else(|| {
            RegError::Domain(format!("denominator {den} not invertible mod {p}^{}", prec - v))
        })?;
        let num_u = num.mod_floor(&BigInt::from(m.clone())).to_biguint().unwrap();
        let unit = num_u * den_inv % &m;
        Ok(PadicNum { p, prec, repr: Some((v, unit)) })
    }

    fn normalize(p: u64, value: BigInt, prec: i64) -> Self {
        if prec <= 0 {
            // Nothing is known below absolute precision 0 for integers; keep
            // the interval honest.
            return PadicNum { p, prec, repr: None };
        }
        let m = pow_p(p, prec);
        let mut val = value.mod_floor(&BigInt::from(m)).to_biguint().unwrap();
        if val.is_zero() {
            return PadicNum { p, prec, repr: None };
        }
        let bp = BigUint::from(p);
        let mut v: i64 = 0;
        while (&val % &bp).is_zero() {
            val /= &bp;
            v += 1;
        }
        PadicNum { p, prec, repr: Some((v, val)) }
    }

    /// Absolute precision exponent.
    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// `Some(v)` when the valuation is pinned down; `None` when the value is
    /// indistinguishable from zero (valuation at least `prec`).
    pub fn valuation(&self) -> Option<i64> {
        self.repr.as_ref().map(|(v, _)| *v)
    }

    /// Zero at the reported precision (covers both zero flavours).
    pub fn is_zero(&self) -> bool {
        self.repr.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.repr.is_none() && self.prec == PREC_EXACT
    }

    /// The unit part reduced mod `p^(prec-v)`, when nonzero.
    pub fn unit(&self) -> Option<&BigUint> {
        self.repr.as_ref().map(|(_, u)| u)
    }

    /// Value as an integer mod `p^k`; requires `v >= 0` and `k <= prec`.
    pub fn value_mod(&self, k: i64) -> BigUint {
        assert!(k <= self.prec, "requested digits beyond guaranteed precision");
        match &self.repr {
            None => BigUint::zero(),
            Some((v, u)) => {
                assert!(*v >= 0, "negative valuation has no integer reduction");
                if *v >= k {
                    BigUint::zero()
                } else {
                    u % pow_p(self.p, k - v) * pow_p(self.p, *v)
                }
            }
        }
    }

    /// Cap the absolute precision at `n` (a no-op when already coarser).
    pub fn reduce_prec(&self, n: i64) -> Self {
        if self.prec <= n {
            return self.clone();
        }
        match &self.repr {
            None => PadicNum { p: self.p, prec: n, repr: None },
            Some((v, u)) => {
                if *v >= n {
                    PadicNum { p: self.p, prec: n, repr: None }
                } else {
                    let unit = u % pow_p(self.p, n - v);
                    PadicNum { p: self.p, prec: n, repr: Some((*v, unit)) }
                }
            }
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed primes in p-adic arithmetic");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let prec = self.prec.min(other.prec);
        if prec == PREC_EXACT {
            // both exact zeros
            return Self::zero(self.p);
        }
        let a = self.reduce_prec(prec);
        let b = other.reduce_prec(prec);
        if a.repr.is_none() && b.repr.is_none() {
            // sum of two zeros-to-precision; no modulus needed (precisions
            // near the exactness sentinel would not even be representable)
            return PadicNum { p: self.p, prec, repr: None };
        }
        // negative valuations: work at the scale of the smaller valuation
        let base = a
            .repr
            .iter()
            .chain(b.repr.iter())
            .map(|(v, _)| *v)
            .min()
            .unwrap_or(0)
            .min(0);
        let m = pow_p(self.p, prec - base);
        let va = a.repr.map(|(v, u)| u * pow_p(self.p, v - base) % &m).unwrap_or_default();
        let vb = b.repr.map(|(v, u)| u * pow_p(self.p, v - base) % &m).unwrap_or_default();
        Self::normalize(self.p, BigInt::from(va + vb), prec - base).mul_p_pow(base)
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            None => self.clone(),
            Some((v, u)) => {
                let m = pow_p(self.p, self.prec - v);
                PadicNum { p: self.p, prec: self.prec, repr: Some((*v, &m - u)) }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        match (&self.repr, &other.repr) {
            (None, None) => {
                if self.is_exact_zero() || other.is_exact_zero() {
                    Self::zero(self.p)
                } else {
                    PadicNum {
                        p: self.p,
                        prec: (self.prec + other.prec).min(PREC_EXACT),
                        repr: None,
                    }
                }
            }
            (None, Some((v, _))) => {
                if self.is_exact_zero() {
                    Self::zero(self.p)
                } else {
                    PadicNum { p: self.p, prec: (self.prec + v).min(PREC_EXACT), repr: None }
                }
            }
            (Some((v, _)), None) => {
                if other.is_exact_zero() {
                    Self::zero(self.p)
                } else {
                    PadicNum { p: self.p, prec: (other.prec + v).min(PREC_EXACT), repr: None }
                }
            }
            (Some((va, ua)), Some((vb, ub))) => {
                let v = va + vb;
                let prec = (va + other.prec).min(vb + self.prec);
                let unit = ua * ub % pow_p(self.p, prec - v);
                PadicNum { p: self.p, prec, repr: Some((v, unit)) }
            }
        }
    }

    /// Multiplicative inverse; fails when the value cannot be certified
    /// nonzero at its precision.
    pub fn inv(&self) -> Result<Self, RegError> {
        match &self.repr {
            None => Err(RegError::Domain(format!(
                "inverse of a value indistinguishable from zero (O({}^{}))",
                self.p, self.prec
            ))),
            Some((v, u)) => {
                let rel = self.prec - v; // relative precision carries over
                let m = pow_p(self.p, rel);
                let unit = modinv(u, &m).expect("unit is coprime to p");
                Ok(PadicNum { p: self.p, prec: rel - v, repr: Some((-v, unit)) })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self, RegError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Multiply by an exact nonzero integer (no precision cap from the scalar).
    pub fn mul_exact_i64(&self, n: i64) -> Self {
        assert!(n != 0, "exact scale by zero loses the interval; use mul");
        let (k, m) = split_p(self.p, n);
        match &self.repr {
            None => PadicNum {
                p: self.p,
                prec: (self.prec + k).min(PREC_EXACT),
                repr: None,
            },
            Some((v, u)) => {
                let prec = (self.prec + k).min(PREC_EXACT);
                let v2 = v + k;
                let md = pow_p(self.p, prec - v2);
                let mm = BigInt::from(m).mod_floor(&BigInt::from(md.clone())).to_biguint().unwrap();
                PadicNum { p: self.p, prec, repr: Some((v2, u * mm % md)) }
            }
        }
    }

    /// Divide by an exact nonzero integer, tracking the precision drop from
    /// any `p`-part of the divisor.
    pub fn div_exact_i64(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero");
        let (k, m) = split_p(self.p, n);
        match &self.repr {
            None => PadicNum { p: self.p, prec: self.prec - k, repr: None },
            Some((v, u)) => {
                let prec = self.prec - k;
                let v2 = v - k;
                let md = pow_p(self.p, prec - v2);
                let mm = BigInt::from(m).mod_floor(&BigInt::from(md.clone())).to_biguint().unwrap();
                let minv = modinv(&mm, &md).expect("p-free part is invertible");
                PadicNum { p: self.p, prec, repr: Some((v2, u * minv % md)) }
            }
        }
    }

    /// Exact rescale by `p^k` (k may be negative).
    pub fn mul_p_pow(&self, k: i64) -> Self {
        match &self.repr {
            None => PadicNum { p: self.p, prec: (self.prec + k).min(PREC_EXACT), repr: None },
            Some((v, u)) => PadicNum {
                p: self.p,
                prec: (self.prec + k).min(PREC_EXACT),
                repr: Some((v + k, u.clone())),
            },
        }
    }

    pub fn pow_i64(&self, e: i64) -> Result<Self, RegError> {
        if e == 0 {
            // prec: a unit to relative precision r has a^0 = 1 exactly
            return Ok(PadicNum::from_i64(self.p, 1, self.prec.max(1)));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc: Option<PadicNum> = None;
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

    /// Equal modulo `p^k` (both sides must carry at least `k` digits).
    pub fn eq_mod(&self, other: &Self, k: i64) -> bool {
        let d = self.sub(other);
        if d.prec < k {
            return false;
        }
        match d.valuation() {
            None => true,
            Some(v) => v >= k,
        }
    }

    /// Decimal digits of the unit part ("0" for zero).
    pub fn unit_string(&self) -> String {
        match &self.repr {
            None => "0".to_string(),
            Some((_, u)) => u.to_string(),
        }
    }
}

impl fmt::Debug for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            None => {
                if self.prec == PREC_EXACT {
                    write!(f, "0 (exact, p={})", self.p)
                } else {
                    write!(f, "O({}^{})", self.p, self.prec)
                }
            }
            Some((v, u)) => write!(f, "{}*{}^{} + O({}^{})", u, self.p, v, self.p, self.prec),
        }
    }
}

impl fmt::Display for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `n = p^k * m` with `p` not dividing `m`; returns `(k, m)`.
fn split_p(p: u64, n: i64) -> (i64, i64) {
    let mut k = 0;
    let mut m = n;
    while m % (p as i64) == 0 {
        m /= p as i64;
        k += 1;
    }
    (k, m)
}

/// Inverse of `a` mod `m` by extended Euclid; `None` when not coprime.
pub fn modinv(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let e = BigInt::from(a.clone()).extended_gcd(&BigInt::from(m.clone()));
    if !e.gcd.is_one() {
        return None;
    }
    let mi = BigInt::from(m.clone());
    Some(e.x.mod_floor(&mi).to_biguint().unwrap())
}

/// p-adic logarithm of a 1-unit: `log(u) = sum_{n>=1} (-1)^(n+1) (u-1)^n / n`.
///
/// Requires `u = 1 mod p`. The reported precision is the precision of `u`;
/// the dropped tail is provably smaller.
pub fn padic_log(u: &PadicNum) -> Result<PadicNum, RegError> {
    let p = u.prime();
    let n_abs = u.precision();
    let x = u.sub(&PadicNum::from_i64(p, 1, n_abs));
    match x.valuation() {
        None => return Ok(PadicNum::zero_to_prec(p, n_abs)),
        Some(v) if v >= 1 => {}
        _ => {
            return Err(RegError::Domain(format!(
                "padic_log needs a 1-unit; argument is not 1 mod {p}"
            )))
        }
    }
    let v = x.valuation().unwrap();
    let mut acc = PadicNum::zero_to_prec(p, n_abs);
    let mut xn = PadicNum::from_i64(p, 1, n_abs + v);
    let mut n: i64 = 0;
    loop {
        n += 1;
        // term valuation lower bound: n*v - v_p(n) >= n*v - log_p(n)
        let vp_bound = ilog_floor(p, n.unsigned_abs());
        if n * v - vp_bound >= n_abs && n > 1 {
            break;
        }
        xn = xn.mul(&x);
        let term = xn.div_exact_i64(n);
        acc = if n % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
    }
    Ok(acc.reduce_prec(n_abs))
}

fn ilog_floor(p: u64, n: u64) -> i64 {
    let mut k = 0;
    let mut m = p;
    while m <= n {
        k += 1;
        m = m.saturating_mul(p);
    }
    k
}

/// Lift a simple root of an integer polynomial by Newton iteration with
/// doubling precision. `f` lists coefficients from the constant term up.
/// Requires `f(r0) = 0 mod p` and `f'(r0)` a unit mod `p`.
pub fn hensel_root(f: &[BigInt], r0: u64, p: u64, prec: i64) -> Result<PadicNum, RegError> {
    if prec < 1 {
        return Err(RegError::BadConfig("hensel_root needs precision >= 1".into()));
    }
    let bp = BigInt::from(p);
    let eval = |coeffs: &[BigInt], x: &BigInt, m: &BigInt| -> BigInt {
        let mut acc = BigInt::zero();
        for c in coeffs.iter().rev() {
            acc = (acc * x + c).mod_floor(m);
        }
        acc
    };
    let deriv: Vec<BigInt> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let x0 = BigInt::from(r0);
    if !eval(f, &x0, &bp).is_zero() {
        return Err(RegError::Domain(format!("{r0} is not a root mod {p}")));
    }
    if eval(&deriv, &x0, &bp).is_zero() {
        return Err(RegError::Domain(format!(
            "no unique lift: derivative vanishes at {r0} mod {p}"
        )));
    }
    let target = pow_p(p, prec);
    let mut modulus = bp.clone();
    let mut x = x0;
    while modulus < BigInt::from(target.clone()) {
        modulus = (&modulus * &modulus).min(BigInt::from(target.clone()));
        let fx = eval(f, &x, &modulus);
        let fpx = eval(&deriv, &x, &modulus);
        let fpx_u = fpx.mod_floor(&modulus).to_biguint().unwrap();
        let inv = modinv(&fpx_u, &modulus.to_biguint().unwrap())
            .expect("derivative stays a unit along the lift");
        x = (x - fx * BigInt::from(inv)).mod_floor(&modulus);
    }
    Ok(PadicNum::from_bigint(p, &x, prec))
}

/// Canonical root of `x^2 + x + 1` in `Z_p` for `p = 1 mod 3`: the Hensel
/// lift of the smallest residue `r` in `{2, ..., p-2}` with `r^2+r+1 = 0`.
pub fn canonical_nu(p: u64, prec: i64) -> Result<PadicNum, RegError> {
    if p % 3 != 1 {
        return Err(RegError::BadConfig(format!(
            "x^2+x+1 has no root in Z_{p}: {p} is not 1 mod 3"
        )));
    }
    let r0 = (2..p - 1)
        .find(|r| (r * r + r + 1) % p == 0)
        .expect("a split prime has a root");
    hensel_root(
        &[BigInt::one(), BigInt::one(), BigInt::one()],
        r0,
        p,
        prec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(p: u64, v: i64, prec: i64) -> PadicNum {
        PadicNum::from_i64(p, v, prec)
    }

    #[test]
    fn normalization_and_valuation() {
        let x = n(5, 50, 4);
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.unit().unwrap(), &BigUint::from(2u32));
        assert_eq!(x.precision(), 4);
        assert_eq!(x.value_mod(4), BigUint::from(50u32));
    }

    #[test]
    fn zero_flavours_are_distinguished() {
        let exact = PadicNum::zero(5);
        let approx = PadicNum::zero_to_prec(5, 3);
        assert!(exact.is_exact_zero());
        assert!(!approx.is_exact_zero());
        assert!(approx.is_zero());
        // exact zero annihilates, approximate zero only bounds
        let u = n(5, 7, 6);
        assert!(exact.mul(&u).is_exact_zero());
        let m = approx.mul(&u);
        assert_eq!(m.precision(), 3);
        assert!(m.is_zero());
    }

    #[test]
    fn addition_minimum_precision_and_cancellation() {
        let a = n(7, 10, 5);
        let b = n(7, 4, 3);
        let s = a.add(&b);
        assert_eq!(s.precision(), 3);
        assert_eq!(s.value_mod(3), BigUint::from(14u32));
        // cancellation raises valuation but cannot exceed the precision cap
        let c = n(7, 49, 4).sub(&n(7, 49, 4));
        assert!(c.is_zero());
        assert_eq!(c.precision(), 4);
    }

    #[test]
    fn multiplication_interval_rule() {
        // (u5^1 + O(5^4)) * (u5^2 + O(5^3)): v=3, prec = min(1+3, 2+4) = 4
        let a = n(5, 5, 4);
        let b = n(5, 50, 3);
        let m = a.mul(&b);
        assert_eq!(m.valuation(), Some(3));
        assert_eq!(m.precision(), 4);
    }

    #[test]
    fn inverse_keeps_relative_precision() {
        let a = n(5, 50, 5); // v=2, rel prec 3
        let i = a.inv().unwrap();
        assert_eq!(i.valuation(), Some(-2));
        assert_eq!(i.precision(), 1); // -2 + 3
        let prod = a.mul(&i);
        assert!(prod.eq_mod(&n(5, 1, 1), 1));
    }

    #[test]
    fn exact_integer_scaling() {
        let a = n(5, 2, 4);
        let b = a.mul_exact_i64(25); // gains two digits of absolute precision
        assert_eq!(b.precision(), 6);
        assert_eq!(b.valuation(), Some(2));
        let c = b.div_exact_i64(25);
        assert_eq!(c.precision(), 4);
        assert!(c.eq_mod(&a, 4));
    }

    #[test]
    fn from_rational_reduces_denominators() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let x = PadicNum::from_rational(5, &q, 3).unwrap();
        // 1/3 mod 125 = 42
        assert_eq!(x.value_mod(3), BigUint::from(42u32));
        let y = PadicNum::from_rational(5, &BigRational::new(BigInt::from(-30), BigInt::from(31)), 8)
            .unwrap();
        assert_eq!(y.value_mod(8), BigUint::from(327620u32));
    }

    #[test]
    fn log_of_six_mod_125() {
        // frozen by an independent partial-sum oracle
        let u = n(5, 6, 3);
        let l = padic_log(&u).unwrap();
        assert_eq!(l.value_mod(3), BigUint::from(55u32));
        let l8 = padic_log(&n(5, 6, 8)).unwrap();
        assert_eq!(l8.value_mod(8), BigUint::from(329_930u32));
    }

    #[test]
    fn log_additivity_on_units() {
        // log(36) = 2 log(6)
        let l36 = padic_log(&n(5, 36, 3)).unwrap();
        assert_eq!(l36.value_mod(3), BigUint::from(110u32));
        let l6 = padic_log(&n(5, 6, 8)).unwrap();
        let l36b = padic_log(&n(5, 36, 8)).unwrap();
        assert!(l36b.eq_mod(&l6.mul_exact_i64(2), 8));
        // and on a product of independent units
        let a = n(7, 8, 9);
        let b = n(7, 50, 9);
        let lab = padic_log(&a.mul(&b)).unwrap();
        assert!(lab.eq_mod(&padic_log(&a).unwrap().add(&padic_log(&b).unwrap()), 8));
    }

    #[test]
    fn log_rejects_non_one_units() {
        assert!(padic_log(&n(5, 2, 4)).is_err());
    }

    #[test]
    fn log_precision_ledger_drops_by_vp_n() {
        // x = u - 1 has valuation 1; the p-th term x^p/p costs one digit but
        // the sum's reported precision is still the input precision because
        // the dropped tail is below it.
        let u = n(5, 1 + 5, 7);
        let l = padic_log(&u).unwrap();
        assert_eq!(l.precision(), 7);
        assert_eq!(l.valuation(), Some(1));
    }

    #[test]
    fn hensel_lift_of_cube_root_unity() {
        let f = [BigInt::from(1), BigInt::from(1), BigInt::from(1)];
        let r = hensel_root(&f, 2, 7, 2).unwrap();
        assert_eq!(r.value_mod(2), BigUint::from(30u32));
        // full canonical lift, frozen by the oracle
        let nu = canonical_nu(7, 9).unwrap();
        assert_eq!(nu.value_mod(9), BigUint::from(25_447_151u64));
        let nu13 = canonical_nu(13, 9).unwrap();
        assert_eq!(nu13.value_mod(9), BigUint::from(6_797_110_518u64));
        // it really is a root
        let probe = nu.mul(&nu).add(&nu).add(&n(7, 1, 9));
        assert!(probe.is_zero());
    }

    #[test]
    fn hensel_rejects_non_roots_and_double_roots() {
        let f = [BigInt::from(1), BigInt::from(1), BigInt::from(1)];
        assert!(hensel_root(&f, 3, 7, 4).is_err());
        // x^2 mod 2-adic style double root: f = x^2, root 0 mod 5
        let g = [BigInt::from(0), BigInt::from(0), BigInt::from(1)];
        assert!(hensel_root(&g, 0, 5, 4).is_err());
    }

    #[test]
    fn canonical_nu_refuses_inert_primes() {
        assert!(canonical_nu(5, 4).is_err());
    }

    #[test]
    fn pow_and_eq_mod() {
        let a = n(7, 3, 6);
        let a4 = a.pow_i64(4).unwrap();
        assert_eq!(a4.value_mod(6), BigUint::from(81u32));
        let am2 = a.pow_i64(-2).unwrap();
        assert!(am2.mul(&a.mul(&a)).eq_mod(&n(7, 1, 5), 5));
    }
}
