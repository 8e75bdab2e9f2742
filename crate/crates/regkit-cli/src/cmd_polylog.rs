//! The polylog subcommand: evaluate at a point, audit stabilization, and,
//! where an exact answer exists, compare against it.

use crate::config::{parse_rational, RunConfig};
use crate::report::eis_zero_depth;
use num_rational::BigRational;
use num_traits::{One, Zero};
use regkit::eis::EisNum;
use regkit::jsonrep::{eis_json, rational_json, to_json_string, AuditJson, EisJson, ReportJson};
use regkit::ring::EisRing;
use regkit::special::polylog_eval;
use regkit::RegError;
use serde::Serialize;

/// Point argument: an exact rational, or a power of the cube root of unity.
pub enum PointSpec {
    Rational(BigRational),
    Nu { square: bool, negated: bool },
}

pub fn parse_point(text: &str) -> Result<PointSpec, RegError> {
    match text.trim() {
        "nu" => Ok(PointSpec::Nu { square: false, negated: false }),
        "-nu" => Ok(PointSpec::Nu { square: false, negated: true }),
        "nu2" => Ok(PointSpec::Nu { square: true, negated: false }),
        "-nu2" => Ok(PointSpec::Nu { square: true, negated: true }),
        other => Ok(PointSpec::Rational(parse_rational(other)?)),
    }
}

fn embed(spec: &PointSpec, p: u64, prec: i64) -> Result<EisNum, RegError> {
    match spec {
        PointSpec::Rational(q) => {
            EisNum::from_rational_pair(p, q, &BigRational::zero(), prec)
        }
        PointSpec::Nu { square, negated } => {
            let ring = EisRing::new(p, prec);
            let mut z = ring.nu();
            if *square {
                z = z.conj();
            }
            if *negated {
                z = z.neg();
            }
            Ok(z)
        }
    }
}

fn rat_pow(z: &BigRational, e: u64) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= z;
    }
    acc
}

#[derive(Serialize)]
struct PolylogData {
    value: EisJson,
    margin: i64,
    claimed_precision: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<String>,
    snapshots: Vec<EisJson>,
}

pub fn run(cfg: &RunConfig, spec: &PointSpec, pretty: bool) -> Result<(String, bool), RegError> {
    let r = cfg.r.expect("polylog config carries r");
    let z = embed(spec, cfg.p, cfg.n)?;
    let eval = polylog_eval(r, &z, cfg.s)?;
    let claim = eval.value.precision();

    let mut audits = vec![AuditJson::new(
        "stabilization",
        eval.margin <= 2,
        format!(
            "partial sums stabilized with margin {}; value claims {claim} digits",
            eval.margin
        ),
    )];

    let mut closed_form = None;
    if r == 0 {
        if let PointSpec::Rational(q) = spec {
            // sum over n prime to p of z^n = z/(1-z) - z^p/(1-z^p), exactly
            let one = BigRational::one();
            let zp = rat_pow(q, cfg.p);
            let w = q / (&one - q) - &zp / (&one - &zp);
            let expect = EisNum::from_rational_pair(cfg.p, &w, &BigRational::zero(), claim)?;
            audits.push(AuditJson::new(
                "closed-form",
                eval.value.eq_mod(&expect, claim),
                format!("limit agrees with {} to {claim} digits", rational_json(&w)),
            ));
            closed_form = Some(rational_json(&w));
        }
    }

    if r >= 1 {
        if let PointSpec::Nu { .. } = spec {
            // the conjugate point gives the inverse argument; the two values
            // must cancel
            let other = polylog_eval(r, &z.conj(), cfg.s)?;
            let sum = eval.value.add(&other.value);
            let depth = eis_zero_depth(&sum);
            let floor = cfg.s as i64 - 2;
            audits.push(AuditJson::new(
                "inversion",
                depth >= floor,
                format!("value plus conjugate-point value vanishes mod p^{depth}; required p^{floor}"),
            ));
        }
    }

    let data = PolylogData {
        value: eis_json(&eval.value),
        margin: eval.margin,
        claimed_precision: claim,
        closed_form,
        snapshots: eval.snapshots.iter().map(eis_json).collect(),
    };

    let report = ReportJson { config: cfg.clone(), audits, data };
    let all_pass = report.all_pass();
    Ok((to_json_string(&report, pretty), all_pass))
}
