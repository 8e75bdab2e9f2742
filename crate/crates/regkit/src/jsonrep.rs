//! JSON encodings for the values the command-line tools emit. Key order is
//! fixed by struct declaration order and unit parts are decimal strings, so
//! equal inputs serialize to byte-identical output.

use crate::eis::EisNum;
use crate::padic::{PadicNum, PREC_EXACT};
use crate::ring::{EisRing, PadicRing, RationalRing};
use crate::series::TSeries;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

/// p-adic number as `{"v", "u", "prec"}`. Nulls mark exact data: an exact
/// zero has no valuation, an exact value has unbounded precision.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PadicJson {
    pub v: Option<i64>,
    pub u: String,
    pub prec: Option<i64>,
}

/// Quadratic-extension element as its two coordinates.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EisJson {
    pub a: PadicJson,
    pub b: PadicJson,
}

/// Laurent series with a per-coefficient precision ledger (null entries are
/// exact coefficients).
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SeriesJson<C> {
    pub pole: i64,
    pub coeffs: Vec<C>,
    pub trunc: i64,
    pub prec_ledger: Vec<Option<i64>>,
}

/// One named check with its verdict.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AuditJson {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl AuditJson {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        AuditJson { name: name.to_string(), pass, detail }
    }
}

/// Top-level report layout shared by every subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct ReportJson<C, D> {
    pub config: C,
    pub audits: Vec<AuditJson>,
    pub data: D,
}

impl<C, D> ReportJson<C, D> {
    pub fn all_pass(&self) -> bool {
        self.audits.iter().all(|a| a.pass)
    }
}

fn finite_prec(k: i64) -> Option<i64> {
    (k != PREC_EXACT).then_some(k)
}

pub fn padic_json(x: &PadicNum) -> PadicJson {
    PadicJson {
        v: x.valuation(),
        u: x.unit_string(),
        prec: finite_prec(x.precision()),
    }
}

pub fn eis_json(x: &EisNum) -> EisJson {
    EisJson { a: padic_json(&x.a), b: padic_json(&x.b) }
}

pub fn padic_series_json(s: &TSeries<PadicRing>) -> SeriesJson<PadicJson> {
    SeriesJson {
        pole: s.pole_order(),
        coeffs: s.coeffs().iter().map(padic_json).collect(),
        trunc: s.trunc(),
        prec_ledger: s.coeffs().iter().map(|c| finite_prec(c.precision())).collect(),
    }
}

pub fn eis_series_json(s: &TSeries<EisRing>) -> SeriesJson<EisJson> {
    SeriesJson {
        pole: s.pole_order(),
        coeffs: s.coeffs().iter().map(eis_json).collect(),
        trunc: s.trunc(),
        prec_ledger: s.coeffs().iter().map(|c| finite_prec(c.precision())).collect(),
    }
}

/// Exact rational as "num" or "num/den".
pub fn rational_json(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_series_json(s: &TSeries<RationalRing>) -> SeriesJson<String> {
    SeriesJson {
        pole: s.pole_order(),
        coeffs: s.coeffs().iter().map(rational_json).collect(),
        trunc: s.trunc(),
        prec_ledger: vec![None; s.coeffs().len()],
    }
}

/// Serialize with a trailing newline; the compact form has a single fixed
/// encoding, the pretty form is for reading.
pub fn to_json_string<T: Serialize>(value: &T, pretty: bool) -> String {
    let mut out = if pretty {
        serde_json::to_string_pretty(value).expect("serialization cannot fail")
    } else {
        serde_json::to_string(value).expect("serialization cannot fail")
    };
    out.push('\n');
    out
}
