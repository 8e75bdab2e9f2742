//! Truncated Laurent series over a [`Ring`], with per-coefficient precision
//! inherited from the coefficient type, plus the semilinear substitution
//! `t -> c * t^p` used by Frobenius structures.
//!
//! A series stores every exponent from `-pole` up to (excluding) `trunc`.
//! Operations compute the truncation of the result honestly: a product of
//! series known mod `t^M1`, `t^M2` with poles `m1`, `m2` is only known mod
//! `t^min(M1 - m2, M2 - m1)`, and so on.

use crate::err::RegError;
use crate::ring::{PadicLike, Ring};
use num_rational::BigRational;

#[derive(Clone)]
pub struct TSeries<R: Ring> {
    ring: R,
    /// Coefficients for exponents `-pole, -pole+1, ..., trunc-1`. A negative
    /// pole records a known positive valuation: exponents below `-pole` are
    /// exactly zero.
    coeffs: Vec<R::Elem>,
    pole: i64,
    trunc: i64,
}

impl<R: Ring> std::fmt::Debug for TSeries<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TSeries[pole {}, mod t^{}:", self.pole, self.trunc)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !self.ring.is_zero(c) {
                write!(f, " ({:?})*t^{}", c, i as i64 - self.pole)?;
            }
        }
        write!(f, "]")
    }
}

impl<R: Ring> TSeries<R> {
    /// Series from coefficients starting at exponent `lo`, truncated at `trunc`.
    pub fn from_coeffs(ring: R, lo: i64, coeffs: Vec<R::Elem>, trunc: i64) -> Self {
        assert_eq!(coeffs.len() as i64, trunc - lo, "coefficient count mismatch");
        TSeries { ring, coeffs, pole: -lo, trunc }
    }

    pub fn zero(ring: R, trunc: i64) -> Self {
        let trunc = trunc.max(0);
        let coeffs = vec![ring.zero(); trunc as usize];
        TSeries { ring, coeffs, pole: 0, trunc }
    }

    pub fn one(ring: R, trunc: i64) -> Self {
        let mut s = Self::zero(ring, trunc);
        if trunc > 0 {
            s.coeffs[0] = s.ring.one();
        }
        s
    }

    pub fn monomial(ring: R, coeff: R::Elem, exp: i64, trunc: i64) -> Self {
        assert!(exp < trunc, "monomial exponent beyond truncation");
        let mut coeffs = vec![ring.zero(); (trunc - exp) as usize];
        coeffs[0] = coeff;
        Self::from_coeffs(ring, exp, coeffs, trunc)
    }

    /// `t` itself.
    pub fn var(ring: R, trunc: i64) -> Self {
        let one = ring.one();
        Self::monomial(ring, one, 1, trunc)
    }

    pub fn from_rationals(ring: R, lo: i64, vals: &[BigRational], trunc: i64) -> Result<Self, RegError> {
        let coeffs = vals
            .iter()
            .map(|q| ring.from_rational(q))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_coeffs(ring, lo, coeffs, trunc))
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn pole_order(&self) -> i64 {
        self.pole
    }

    /// Lowest stored exponent.
    pub fn lo(&self) -> i64 {
        -self.pole
    }

    /// Coefficient of `t^e`; exact zero below the stored range, panic at or
    /// above the truncation (those digits were never computed).
    pub fn coeff(&self, e: i64) -> R::Elem {
        assert!(e < self.trunc, "coefficient t^{e} is beyond the truncation t^{}", self.trunc);
        if e < -self.pole {
            self.ring.zero()
        } else {
            self.coeffs[(e + self.pole) as usize].clone()
        }
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    /// First exponent with a coefficient that is nonzero at its precision.
    pub fn leading_exponent(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !self.ring.is_zero(c))
            .map(|i| i as i64 - self.pole)
    }

    pub fn is_zero_series(&self) -> bool {
        self.leading_exponent().is_none()
    }

    /// Drop leading coefficients that are zero at their reported precision,
    /// tightening the pole/valuation claim.
    pub fn trimmed(&self) -> Self {
        let lead = self.leading_exponent().unwrap_or(self.trunc);
        if lead <= -self.pole {
            return self.clone();
        }
        let coeffs = ((lead + self.pole) as usize..self.coeffs.len())
            .map(|i| self.coeffs[i].clone())
            .collect();
        TSeries { ring: self.ring.clone(), coeffs, pole: -lead, trunc: self.trunc }
    }

    /// Restrict the truncation (dropping known high-order coefficients).
    pub fn truncate_to(&self, m: i64) -> Self {
        assert!(m <= self.trunc, "cannot extend a truncated series");
        let m = m.max(-self.pole);
        TSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs[..(m + self.pole) as usize].to_vec(),
            pole: self.pole,
            trunc: m,
        }
    }

    /// Restrict, or extend with exact zeros, to truncation `m`. Extending is
    /// only sound for polynomials known in full; the caller asserts that.
    pub fn truncate_pad(&self, m: i64) -> Self {
        if m <= self.trunc {
            return self.truncate_to(m);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize_with((m + self.pole) as usize, || self.ring.zero());
        TSeries { ring: self.ring.clone(), coeffs, pole: self.pole, trunc: m }
    }

    pub fn map_coeffs<R2: Ring>(&self, ring2: R2, f: impl Fn(&R::Elem) -> R2::Elem) -> TSeries<R2> {
        TSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
            ring: ring2,
            pole: self.pole,
            trunc: self.trunc,
        }
    }

    fn binop(&self, other: &Self, f: impl Fn(&R, &R::Elem, &R::Elem) -> R::Elem) -> Self {
        let pole = self.pole.max(other.pole);
        let trunc = self.trunc.min(other.trunc);
        let mut coeffs = Vec::with_capacity(((trunc + pole).max(0)) as usize);
        for e in -pole..trunc {
            let a = if e < -self.pole { self.ring.zero() } else { self.coeff(e) };
            let b = if e < -other.pole { other.ring.zero() } else { other.coeff(e) };
            coeffs.push(f(&self.ring, &a, &b));
        }
        TSeries { ring: self.ring.clone(), coeffs, pole, trunc }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binop(other, |r, a, b| r.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binop(other, |r, a, b| r.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        TSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| self.ring.neg(c)).collect(),
            pole: self.pole,
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        TSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| self.ring.mul(c, s)).collect(),
            pole: self.pole,
            trunc: self.trunc,
        }
    }

    pub fn scale_i64(&self, n: i64) -> Self {
        if n == 0 {
            return Self::zero(self.ring.clone(), self.trunc);
        }
        TSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| self.ring.mul_exact_i64(c, n)).collect(),
            pole: self.pole,
            trunc: self.trunc,
        }
    }

    pub fn div_exact_i64(&self, n: i64) -> Self {
        assert!(n != 0);
        TSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| self.ring.div_exact_i64(c, n)).collect(),
            pole: self.pole,
            trunc: self.trunc,
        }
    }

    /// Multiply by `t^k` (exact reindexing).
    pub fn shift(&self, k: i64) -> Self {
        TSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.clone(),
            pole: self.pole - k,
            trunc: self.trunc + k,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        // unknown tail of one factor meets the head of the other: certified
        // exponents satisfy e < min(M1 - m2, M2 - m1)
        let pole = self.pole + other.pole;
        let trunc = (self.trunc - other.pole).min(other.trunc - self.pole).max(-pole);
        let lo = -(pole);
        let n = ((trunc - lo).max(0)) as usize;
        let mut coeffs = vec![self.ring.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(a) {
                continue;
            }
            let ea = i as i64 - self.pole;
            for (j, b) in other.coeffs.iter().enumerate() {
                let eb = j as i64 - other.pole;
                let e = ea + eb;
                if e >= trunc {
                    break;
                }
                let idx = (e - lo) as usize;
                coeffs[idx] = self.ring.add(&coeffs[idx], &self.ring.mul(a, b));
            }
        }
        TSeries { ring: self.ring.clone(), coeffs, pole, trunc }
    }

    /// Inverse of a series whose leading coefficient is a unit. Coefficients
    /// below the leading exponent must be zero at their reported precision.
    pub fn inv(&self) -> Result<Self, RegError> {
        let lead = self
            .leading_exponent()
            .ok_or_else(|| RegError::Domain("inverse of a zero series".into()))?;
        let c = self.coeff(lead);
        let cinv = self.ring.inv(&c).map_err(|_| {
            RegError::Domain("series inverse needs an invertible leading coefficient".into())
        })?;
        // u = t^(-lead) * self is a unit power series known mod t^(M - lead)
        let m = self.trunc - lead;
        let u = self.shift(-lead).truncate_to(m);
        // recurrence: x_0 = c^{-1}; x_e = -c^{-1} sum_{j=1..e} u_j x_{e-j}
        let mut x = vec![cinv.clone()];
        for e in 1..m {
            let mut acc = self.ring.zero();
            for j in 1..=e {
                let uj = u.coeff(j);
                if self.ring.is_zero(&uj) {
                    continue;
                }
                acc = self.ring.add(&acc, &self.ring.mul(&uj, &x[(e - j) as usize]));
            }
            x.push(self.ring.neg(&self.ring.mul(&cinv, &acc)));
        }
        Ok(TSeries::from_coeffs(self.ring.clone(), 0, x, m).shift(-lead))
    }

    pub fn div(&self, other: &Self) -> Result<Self, RegError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn derivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = i as i64 - self.pole;
            // a constant differentiates to an exact zero, regardless of its
            // own precision interval
            coeffs.push(if e == 0 { self.ring.zero() } else { self.ring.mul_exact_i64(c, e) });
        }
        if self.pole == 0 {
            // the e = 0 slot died; keep the series pole-free
            if !coeffs.is_empty() {
                coeffs.remove(0);
            }
            TSeries { ring: self.ring.clone(), coeffs, pole: 0, trunc: (self.trunc - 1).max(0) }
        } else {
            TSeries { ring: self.ring.clone(), coeffs, pole: self.pole + 1, trunc: self.trunc - 1 }
        }
    }

    /// Antiderivative with zero constant term. Fails on a residue term
    /// (`t^{-1}` coefficient) that is not zero at its reported precision.
    pub fn integrate(&self) -> Result<Self, RegError> {
        if -self.pole <= -1 && -1 < self.trunc {
            let res = self.coeff(-1);
            if !self.ring.is_zero(&res) {
                return Err(RegError::Domain(
                    "integrate: nonzero residue (t^-1 coefficient)".into(),
                ));
            }
        }
        let lo = -self.pole;
        let mut coeffs = Vec::new();
        let new_lo = lo + 1;
        for e in lo..self.trunc {
            if e == -1 {
                // the residue slot maps to the constant term, fixed to zero
                coeffs.push(self.ring.zero());
                continue;
            }
            let c = self.coeff(e);
            coeffs.push(self.ring.div_exact_i64(&c, e + 1));
        }
        Ok(TSeries::from_coeffs(self.ring.clone(), new_lo, coeffs, self.trunc + 1))
    }

    pub fn pow_i64(&self, e: i64) -> Result<Self, RegError> {
        if e == 0 {
            return Ok(Self::one(self.ring.clone(), self.trunc));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc: Option<Self> = None;
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match &acc {
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

    /// Compose `self(g)` where `g` has valuation at least 1. Laurent heads
    /// are handled through `g^{-1}`.
    pub fn compose(&self, g: &Self) -> Result<Self, RegError> {
        // the pole bookkeeping below trusts the stored pole order, so shed
        // heads that are zero at their reported precision first
        let f = self.trimmed();
        let w = match g.leading_exponent() {
            Some(w) if w >= 1 => w,
            _ => {
                return Err(RegError::Domain(
                    "compose: inner series must have valuation >= 1".into(),
                ))
            }
        };
        let m_inner = g.trunc;
        let m = if f.pole > 0 {
            (w * f.trunc).min(m_inner - w * (f.pole + 1))
        } else {
            (w * f.trunc).min(m_inner)
        };
        if m <= 0 {
            return Err(RegError::PrecisionExhausted(
                "compose: truncations leave no certified coefficients".into(),
            ));
        }
        let gt = g.truncate_to(m.min(g.trunc));
        // nonnegative part by Horner from the top
        let mut acc = TSeries::zero(f.ring.clone(), m);
        for e in (0..f.trunc).rev() {
            acc = acc.mul(&gt).truncate_to(m.min(acc.trunc));
            let c = TSeries::monomial(f.ring.clone(), f.coeff(e), 0, acc.trunc);
            acc = acc.add(&c);
        }
        // negative part by Horner in 1/g (inverted at full inner truncation)
        if f.pole > 0 {
            let ginv = g.inv()?;
            let mut neg = TSeries::zero(f.ring.clone(), m + w * (f.pole + 1));
            let mut k = f.pole;
            while k >= 1 {
                let c = f.coeff(-k);
                let term = TSeries::monomial(f.ring.clone(), c, 0, neg.trunc);
                neg = neg.add(&term);
                neg = neg.mul(&ginv);
                k -= 1;
            }
            acc = acc.add(&neg);
        }
        Ok(acc.truncate_to(m.min(acc.trunc)))
    }

    /// Compositional inverse of a series `c1*t + ...` with `c1` a unit:
    /// returns `r` with `self(r(t)) = t`. Newton iteration with doubling
    /// working truncation.
    pub fn reversion(&self) -> Result<Self, RegError> {
        let f = self.trimmed();
        match f.leading_exponent() {
            Some(1) => {}
            _ => {
                return Err(RegError::Domain(
                    "reversion needs a series of exact valuation 1".into(),
                ))
            }
        }
        let c1 = f.coeff(1);
        let c1inv = f.ring.inv(&c1)?;
        let m = f.trunc;
        let fp = f.derivative();
        let mut r = TSeries::monomial(f.ring.clone(), c1inv, 1, 2.min(m));
        let mut cur: i64 = 2;
        while cur < m {
            cur = (cur * 2).min(m);
            let ft = f.truncate_to(cur.min(f.trunc));
            let fpt = fp.truncate_to((cur - 1).max(1).min(fp.trunc));
            let rext = r.extend_assuming_zero(cur);
            let num = ft.compose(&rext)?.sub(&TSeries::var(f.ring.clone(), cur));
            // the residual vanishes to the already-correct order; trimming
            // lets the quotient keep the full working truncation
            let corr = num.trimmed().div(&fpt.compose(&rext)?)?;
            r = rext.sub(&corr.truncate_to(cur.min(corr.trunc))).truncate_to(cur);
        }
        Ok(r)
    }

    /// Extend the truncation, asserting (by construction) that the new
    /// coefficients are zero. Only for Newton-style iterations where the
    /// caller knows the tail is refined later.
    fn extend_assuming_zero(&self, m: i64) -> Self {
        if m <= self.trunc {
            return self.truncate_to(m);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize((m + self.pole) as usize, self.ring.zero());
        TSeries { ring: self.ring.clone(), coeffs, pole: self.pole, trunc: m }
    }

    /// Logarithmic derivative of `t^k * u` with `u` a unit series: returns
    /// `(k, k/t + u'/u)` as a Laurent series.
    pub fn log_deriv(&self) -> Result<(i64, Self), RegError> {
        let k = self
            .leading_exponent()
            .ok_or_else(|| RegError::Domain("log_deriv of a zero series".into()))?;
        let u = self.shift(-k).truncate_to(self.trunc - k);
        let du = u.derivative();
        let main = du.div(&u)?;
        let kt = TSeries::monomial(self.ring.clone(), self.ring.from_i64(k), -1, main.trunc);
        Ok((k, main.add(&kt)))
    }

    pub fn eq_series(&self, other: &Self) -> bool {
        let lo = (-self.pole).min(-other.pole);
        let hi = self.trunc.min(other.trunc);
        for e in lo..hi {
            let a = if e < -self.pole { self.ring.zero() } else { self.coeff(e) };
            let b = if e < -other.pole { other.ring.zero() } else { other.coeff(e) };
            if !self.ring.eq_elem(&a, &b) {
                return false;
            }
        }
        true
    }
}

impl<R: PadicLike> TSeries<R> {
    /// Per-coefficient guaranteed absolute precision, indexed from the pole.
    pub fn prec_ledger(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| self.ring.precision_of(c)).collect()
    }

    /// The minimum guaranteed precision across stored coefficients.
    pub fn min_precision(&self) -> i64 {
        self.prec_ledger().into_iter().min().unwrap_or(i64::MAX)
    }

    /// Exact rescale of every coefficient by `p^k` (`k` may be negative).
    pub fn mul_p_pow_all(&self, k: i64) -> Self {
        TSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| self.ring.mul_p_pow(c, k)).collect(),
            pole: self.pole,
            trunc: self.trunc,
        }
    }

    /// Cap every coefficient's precision (for audits that recompute at a
    /// higher cap and compare).
    pub fn reduce_prec(&self, n: i64) -> Self {
        TSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| self.ring.reduce_prec(c, n)).collect(),
            pole: self.pole,
            trunc: self.trunc,
        }
    }

    /// Equality mod `p^k` on exponents `< upto` (both series must reach `upto`).
    pub fn eq_mod(&self, other: &Self, k: i64, upto: i64) -> bool {
        assert!(self.trunc >= upto && other.trunc >= upto, "comparison beyond truncation");
        let lo = (-self.pole).min(-other.pole);
        for e in lo..upto {
            let a = if e < -self.pole { self.ring.zero() } else { self.coeff(e) };
            let b = if e < -other.pole { other.ring.zero() } else { other.coeff(e) };
            if !self.ring.eq_mod(&a, &b, k) {
                return false;
            }
        }
        true
    }

    /// Largest `k` such that the series is `0 mod p^k` up to `upto` (capped
    /// by per-coefficient precision).
    pub fn zero_to_depth(&self, upto: i64) -> i64 {
        let mut depth = i64::MAX;
        for e in -self.pole..upto.min(self.trunc) {
            let c = self.coeff(e);
            let d = match self.ring.valuation_of(&c) {
                None => self.ring.precision_of(&c),
                Some(v) => v,
            };
            depth = depth.min(d);
        }
        depth
    }
}

/// Map a series over exact rationals into a p-adic flavoured ring.
pub fn reduce_rational_series<R: Ring>(
    ring: &R,
    s: &TSeries<crate::ring::RationalRing>,
) -> Result<TSeries<R>, RegError> {
    let coeffs = s
        .coeffs()
        .iter()
        .map(|q| ring.from_rational(q))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TSeries::from_coeffs(ring.clone(), s.lo(), coeffs, s.trunc()))
}

/// The Frobenius datum `sigma(t) = c * t^p` with `c` a unit congruent to 1
/// mod p, acting on coefficients by the Witt Frobenius.
#[derive(Clone, Debug)]
pub struct FrobeniusSpec<R: PadicLike> {
    ring: R,
    c: R::Elem,
}

impl<R: PadicLike> FrobeniusSpec<R> {
    pub fn new(ring: R, c: R::Elem) -> Result<Self, RegError> {
        if ring.valuation_of(&c) != Some(0) {
            return Err(RegError::BadConfig("sigma twist c must be a p-adic unit".into()));
        }
        let cm1 = ring.sub(&c, &ring.one());
        match ring.valuation_of(&cm1) {
            None => {}
            Some(v) if v >= 1 => {}
            _ => {
                return Err(RegError::BadConfig(
                    "sigma twist c must be congruent to 1 mod p".into(),
                ))
            }
        }
        Ok(FrobeniusSpec { ring, c })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn c(&self) -> &R::Elem {
        &self.c
    }

    pub fn prime(&self) -> u64 {
        self.ring.prime()
    }

    fn c_pow(&self, e: i64) -> Result<R::Elem, RegError> {
        let mut acc = self.ring.one();
        let base = if e < 0 { self.ring.inv(&self.c)? } else { self.c.clone() };
        for _ in 0..e.unsigned_abs() {
            acc = self.ring.mul(&acc, &base);
        }
        Ok(acc)
    }

    /// `f^sigma`: Frobenius on coefficients, then `t^e -> c^e t^(p e)`.
    /// Exponents landing at or beyond the input truncation are dropped; the
    /// result keeps the input truncation (a valid, conservative claim).
    pub fn substitute(&self, f: &TSeries<R>) -> Result<TSeries<R>, RegError> {
        let p = self.ring.prime() as i64;
        let m = f.trunc();
        let mut out = TSeries::zero(self.ring.clone(), m);
        for e in f.lo()..m {
            let pe = p * e;
            if pe >= m {
                if e >= 0 {
                    break;
                } else {
                    continue;
                }
            }
            let c = f.coeff(e);
            if self.ring.is_zero(&c) && self.ring.precision_of(&c) >= self.ring.cap() {
                continue;
            }
            let mapped = self.ring.mul(&self.ring.frobenius_elem(&c), &self.c_pow(e)?);
            let mono = TSeries::monomial(self.ring.clone(), mapped, pe, m);
            out = out.add(&mono);
        }
        Ok(out)
    }

    /// Pullback of the 1-form `a(t) dt`: returns the coefficient series of
    /// `sigma^*(a dt) = a^sigma(t) * c * p * t^(p-1) dt`.
    pub fn substitute_form(&self, a: &TSeries<R>) -> Result<TSeries<R>, RegError> {
        let p = self.ring.prime() as i64;
        let sub = self.substitute(a)?;
        let scaled = sub.scale(&self.c).scale_i64(p);
        Ok(scaled.shift(p - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{EisRing, PadicRing, RationalRing};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn qring() -> RationalRing {
        RationalRing
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qs(lo: i64, vals: &[(i64, i64)], trunc: i64) -> TSeries<RationalRing> {
        let v: Vec<BigRational> = vals.iter().map(|(n, d)| rat(*n, *d)).collect();
        TSeries::from_coeffs(qring(), lo, v, trunc)
    }

    #[test]
    fn mul_truncation_accounts_for_poles() {
        // f = 1/t + 1 known mod t^3, g = t known mod t^4
        let f = qs(-1, &[(1, 1), (1, 1), (0, 1), (0, 1)], 3);
        let g = qs(1, &[(1, 1), (0, 1), (0, 1)], 4);
        let h = f.mul(&g);
        // known exponents: e < min(3 + 0, 4 - 1) = 3
        assert_eq!(h.trunc(), 3);
        assert_eq!(h.coeff(0), rat(1, 1));
        assert_eq!(h.coeff(1), rat(1, 1));
    }

    #[test]
    fn inverse_of_laurent_unit() {
        // f = t^2 (1 - t) => 1/f = t^{-2} (1 + t + t^2 + ...)
        let f = qs(2, &[(1, 1), (-1, 1), (0, 1), (0, 1)], 6);
        let i = f.inv().unwrap();
        assert_eq!(i.coeff(-2), rat(1, 1));
        assert_eq!(i.coeff(-1), rat(1, 1));
        assert_eq!(i.coeff(0), rat(1, 1));
        assert!(f.mul(&i).eq_series(&TSeries::one(qring(), 3)));
    }

    #[test]
    fn derivative_then_integrate_is_identity_on_zero_constant() {
        let f = qs(0, &[(0, 1), (3, 1), (5, 2), (-7, 3)], 4);
        let g = f.derivative().integrate().unwrap();
        assert!(g.eq_series(&f));
    }

    #[test]
    fn integrate_rejects_residue() {
        let f = qs(-1, &[(2, 1), (1, 1)], 1);
        assert!(f.integrate().is_err());
    }

    #[test]
    fn integrate_tracks_padic_precision_loss() {
        let ring = PadicRing::new(5, 8);
        // t^4 with unit coefficient: integrating divides by 5 at exponent 5
        let f = TSeries::monomial(ring.clone(), ring.from_i64(3), 4, 6);
        let g = f.integrate().unwrap();
        let led = g.prec_ledger();
        // coefficient of t^5 lost one digit
        assert_eq!(led[(5 - g.lo()) as usize], 7);
        assert_eq!(g.coeff(5), ring.div_exact_i64(&ring.from_i64(3), 5));
    }

    #[test]
    fn compose_and_reversion_roundtrip() {
        // f = t + t^2, reversion r: f(r(t)) = t
        let f = qs(1, &[(1, 1), (1, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)], 8);
        let r = f.reversion().unwrap();
        let frt = f.compose(&r).unwrap();
        assert!(frt.eq_series(&TSeries::var(qring(), frt.trunc())));
        // catalan-flavoured check: r = t - t^2 + 2t^3 - 5t^4 + ...
        assert_eq!(r.coeff(2), rat(-1, 1));
        assert_eq!(r.coeff(3), rat(2, 1));
        assert_eq!(r.coeff(4), rat(-5, 1));
    }

    #[test]
    fn compose_handles_laurent_heads() {
        // f = 1/t, g = t + t^2: f(g) = 1/(t+t^2) = t^{-1}(1 - t + t^2 - ...)
        let f = qs(-1, &[(1, 1), (0, 1), (0, 1), (0, 1), (0, 1)], 4);
        let g = qs(1, &[(1, 1), (1, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)], 8);
        let h = f.compose(&g).unwrap();
        assert_eq!(h.coeff(-1), rat(1, 1));
        assert_eq!(h.coeff(0), rat(-1, 1));
        assert_eq!(h.coeff(1), rat(1, 1));
    }

    #[test]
    fn log_deriv_splits_pole_part() {
        // f = t^2 (1 + t): f'/f = 2/t + 1/(1+t)
        let f = qs(2, &[(1, 1), (1, 1), (0, 1), (0, 1)], 6);
        let (k, ld) = f.log_deriv().unwrap();
        assert_eq!(k, 2);
        assert_eq!(ld.coeff(-1), rat(2, 1));
        assert_eq!(ld.coeff(0), rat(1, 1));
        assert_eq!(ld.coeff(1), rat(-1, 1));
    }

    #[test]
    fn sigma_substitution_on_monomials() {
        let ring = PadicRing::new(5, 6);
        let c = ring.from_i64(6); // 6 = 1 mod 5
        let sig = FrobeniusSpec::new(ring.clone(), c).unwrap();
        // f = 3 t^2 mod t^30: f^sigma = 3 * 6^2 * t^10
        let f = TSeries::monomial(ring.clone(), ring.from_i64(3), 2, 30);
        let fs = sig.substitute(&f).unwrap();
        assert!(ring.eq_mod(&fs.coeff(10), &ring.from_i64(108), 6));
        assert_eq!(fs.trunc(), 30);
        // t^7 maps beyond the truncation and is dropped
        let g = TSeries::monomial(ring.clone(), ring.from_i64(1), 7, 30);
        let gs = sig.substitute(&g).unwrap();
        assert!(gs.is_zero_series());
    }

    #[test]
    fn sigma_substitution_is_multiplicative() {
        let ring = EisRing::new(7, 6);
        let c = ring.from_i64(8);
        let sig = FrobeniusSpec::new(ring.clone(), c).unwrap();
        let f = TSeries::from_coeffs(
            ring.clone(),
            0,
            (0..40).map(|i| ring.from_i64_pair_t(i % 5 - 2, (i * i) % 3)).collect(),
            40,
        );
        let g = TSeries::from_coeffs(
            ring.clone(),
            0,
            (0..40).map(|i| ring.from_i64_pair_t((i + 1) % 4, i % 7 - 3)).collect(),
            40,
        );
        let lhs = sig.substitute(&f.mul(&g)).unwrap();
        let rhs = sig.substitute(&f).unwrap().mul(&sig.substitute(&g).unwrap());
        assert!(lhs.eq_mod(&rhs, 6, lhs.trunc().min(rhs.trunc())));
    }

    #[test]
    fn sigma_form_pullback() {
        // sigma^*(dt/t) = p dt/t for c = 1
        let ring = PadicRing::new(7, 8);
        let sig = FrobeniusSpec::new(ring.clone(), ring.one()).unwrap();
        let a = TSeries::monomial(ring.clone(), ring.one(), -1, 20); // 1/t
        let fa = sig.substitute_form(&a).unwrap();
        assert!(ring.eq_mod(&fa.coeff(-1), &ring.from_i64(7), 8));
        for e in 0..10 {
            assert!(ring.is_zero(&fa.coeff(e)));
        }
    }

    #[test]
    fn rational_reduction_respects_denominators() {
        let ring = PadicRing::new(7, 5);
        let s = qs(0, &[(1, 3), (5, 243 * 9), (0, 1)], 3);
        let r = reduce_rational_series(&ring, &s).unwrap();
        assert!(ring
            .eq_mod(&ring.mul_exact_i64(&r.coeff(0), 3), &ring.one(), 5));
    }

    // small helper so the multiplicativity test can build Eis coefficients
    trait PairBuild {
        fn from_i64_pair_t(&self, a: i64, b: i64) -> crate::eis::EisNum;
    }
    impl PairBuild for EisRing {
        fn from_i64_pair_t(&self, a: i64, b: i64) -> crate::eis::EisNum {
            crate::eis::EisNum::from_i64_pair(self.p, a, b, self.prec)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn log_deriv_is_additive(
            a in prop::collection::vec(-6i64..7, 6),
            b in prop::collection::vec(-6i64..7, 6),
            ka in 0i64..3,
            kb in 0i64..3,
        ) {
            let m = 9;
            let mut fa = vec![rat(1, 1)];
            fa.extend(a.iter().map(|x| rat(*x, 1)));
            fa.resize((m - ka) as usize, rat(0, 1));
            let mut fb = vec![rat(1, 1)];
            fb.extend(b.iter().map(|x| rat(*x, 1)));
            fb.resize((m - kb) as usize, rat(0, 1));
            let f = TSeries::from_coeffs(qring(), ka, fa, m);
            let g = TSeries::from_coeffs(qring(), kb, fb, m);
            let (kf, lf) = f.log_deriv().unwrap();
            let (kg, lg) = g.log_deriv().unwrap();
            let (kfg, lfg) = f.mul(&g).log_deriv().unwrap();
            prop_assert_eq!(kf + kg, kfg);
            let sum = lf.add(&lg);
            prop_assert!(lfg.eq_series(&sum));
        }

        #[test]
        fn mul_is_associative_and_distributive(
            a in prop::collection::vec(-5i64..6, 7),
            b in prop::collection::vec(-5i64..6, 7),
            c in prop::collection::vec(-5i64..6, 7),
        ) {
            let m = 7;
            let f = TSeries::from_coeffs(qring(), 0, a.iter().map(|x| rat(*x, 1)).collect(), m);
            let g = TSeries::from_coeffs(qring(), 0, b.iter().map(|x| rat(*x, 1)).collect(), m);
            let h = TSeries::from_coeffs(qring(), 0, c.iter().map(|x| rat(*x, 1)).collect(), m);
            prop_assert!(f.mul(&g).mul(&h).eq_series(&f.mul(&g.mul(&h))));
            prop_assert!(f.mul(&g.add(&h)).eq_series(&f.mul(&g).add(&f.mul(&h))));
        }
    }
}

