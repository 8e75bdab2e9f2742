//! Validated run configuration. The serialized form doubles as the cache
//! key payload, so only computation-relevant fields live here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use regkit::jsonrep::rational_json;
use regkit::RegError;
use serde::Serialize;

#[derive(Serialize, Clone, Debug)]
pub struct RunConfig {
    pub subcommand: String,
    pub p: u64,
    pub n: i64,
    pub m: i64,
    pub c: String,
    pub s: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrupt: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_only: Option<bool>,
}

impl RunConfig {
    /// Validate the shared invariants and canonicalize `c`.
    pub fn new(
        subcommand: &str,
        p: u64,
        n: i64,
        m: i64,
        c_text: &str,
        s: u32,
    ) -> Result<(Self, BigRational), RegError> {
        if p < 5 || !is_prime(p) {
            return Err(RegError::BadConfig(format!("p = {p} must be a prime at least 5")));
        }
        if n < 2 {
            return Err(RegError::BadConfig(format!(
                "coefficient precision {n} is too small; need at least 2 digits"
            )));
        }
        if m < 4 {
            return Err(RegError::BadConfig(format!(
                "series truncation {m} is too small; need at least 4 terms"
            )));
        }
        if s == 0 {
            return Err(RegError::BadConfig("evaluation depth s must be at least 1".into()));
        }
        let c = parse_rational(c_text)?;
        check_twist(&c, p)?;
        let cfg = RunConfig {
            subcommand: subcommand.to_string(),
            p,
            n,
            m,
            c: rational_json(&c),
            s,
            a: None,
            r: None,
            z: None,
            corrupt: None,
            family_only: None,
        };
        Ok((cfg, c))
    }
}

/// Parse "NUM" or "NUM/DEN" with arbitrary-size integers.
pub fn parse_rational(text: &str) -> Result<BigRational, RegError> {
    let bad = || RegError::BadConfig(format!("cannot parse '{text}' as a rational number"));
    let mut parts = text.splitn(2, '/');
    let num: BigInt = parts.next().unwrap().trim().parse().map_err(|_| bad())?;
    let den: BigInt = match parts.next() {
        None => BigInt::one(),
        Some(d) => d.trim().parse().map_err(|_| bad())?,
    };
    if den.is_zero() {
        return Err(RegError::BadConfig(format!("'{text}' has a zero denominator")));
    }
    Ok(BigRational::new(num, den))
}

/// The twist must be a p-adic unit congruent to 1.
fn check_twist(c: &BigRational, p: u64) -> Result<(), RegError> {
    let pp = BigInt::from(p);
    if (c.numer() % &pp).is_zero() || (c.denom() % &pp).is_zero() {
        return Err(RegError::BadConfig(format!(
            "c = {} is not a unit at p = {p}",
            rational_json(c)
        )));
    }
    if !((c.numer() - c.denom()) % &pp).is_zero() {
        return Err(RegError::BadConfig(format!(
            "c = {} does not reduce to 1 mod {p}",
            rational_json(c)
        )));
    }
    Ok(())
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_invariants() {
        assert!(RunConfig::new("check", 7, 8, 24, "1", 6).is_ok());
        assert!(RunConfig::new("check", 6, 8, 24, "1", 6).is_err());
        assert!(RunConfig::new("check", 3, 8, 24, "1", 6).is_err());
        assert!(RunConfig::new("check", 7, 1, 24, "1", 6).is_err());
        assert!(RunConfig::new("check", 7, 8, 3, "1", 6).is_err());
        // 8 = 1 mod 7 is fine, 2 is not, and 7/1 is not a unit
        assert!(RunConfig::new("check", 7, 8, 24, "8", 6).is_ok());
        assert!(RunConfig::new("check", 7, 8, 24, "2", 6).is_err());
        assert!(RunConfig::new("check", 7, 8, 24, "7", 6).is_err());
        assert!(RunConfig::new("check", 7, 8, 24, "15/8", 6).is_ok());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
