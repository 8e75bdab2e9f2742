//! The regulator subcommand: solve the two boundary-value problems, audit
//! the solution, and emit the full series data.

use crate::config::RunConfig;
use crate::report::{depth_audit, depth_json, depth_text, ledger_floor, EXACT_DEPTH};
use num_rational::BigRational;
use regkit::family::family_data;
use regkit::jsonrep::{
    eis_json, eis_series_json, to_json_string, AuditJson, EisJson, ReportJson, SeriesJson,
};
use regkit::regulator::{conjugation_defect, evaluate_at_unit_point, regulator_for, SignConvention};
use regkit::ring::EisRing;
use regkit::series::TSeries;
use regkit::RegError;
use serde::Serialize;

#[derive(Serialize)]
struct Depths {
    e1_boundary: Option<i64>,
    e2_residue: Option<i64>,
    ode_e1: Option<i64>,
    ode_e2: Option<i64>,
    parity: Option<i64>,
    conjugation: Option<i64>,
}

#[derive(Serialize)]
struct RegulatorData {
    sign: String,
    e2_boundary: EisJson,
    e2_boundary_margin: i64,
    depths: Depths,
    e1: SeriesJson<EisJson>,
    e2: SeriesJson<EisJson>,
    eps1: SeriesJson<EisJson>,
    eps2: SeriesJson<EisJson>,
}

/// Reject output whose ledger ran dry: every emitted coefficient must carry
/// at least one guaranteed digit.
fn first_unusable(name: &str, s: &TSeries<EisRing>) -> Option<String> {
    for e in s.lo()..s.trunc() {
        let c = s.coeff(e);
        if c.precision() <= 0 {
            return Some(format!(
                "the t^{e} coefficient of {name} carries no guaranteed digits"
            ));
        }
    }
    None
}

pub fn run(
    cfg: &RunConfig,
    c: &BigRational,
    a: Option<&BigRational>,
    pretty: bool,
) -> Result<(String, bool), RegError> {
    if let Some(a) = a {
        // records the induced twist in the refusal message
        evaluate_at_unit_point(cfg.p, cfg.n, a)?;
        return Err(RegError::Unsupported(
            "evaluation at a unit point is not available".into(),
        ));
    }

    let fam = family_data(cfg.p, c, cfg.m, cfg.n)?;
    let result = regulator_for(&fam, cfg.s, SignConvention::Corollary)?;

    for (name, series) in [
        ("E1", &result.e1),
        ("E2", &result.e2),
        ("eps1", &result.eps1),
        ("eps2", &result.eps2),
    ] {
        if let Some(msg) = first_unusable(name, series) {
            return Err(RegError::PrecisionExhausted(msg));
        }
    }

    let floor = ledger_floor(cfg.p, cfg.n, cfg.m);
    let upto = result.eps2.trunc().min(cfg.m - 2);
    let boundary_prec = result.e2_zero.precision();
    let defect = conjugation_defect(&fam, cfg.s, upto)?;

    let audits = vec![
        AuditJson::new(
            "e1-boundary",
            result.e1_zero_depth >= EXACT_DEPTH,
            format!("E1(0) is zero to depth {}", depth_text(result.e1_zero_depth)),
        ),
        AuditJson::new(
            "e2-residue",
            result.residue_depth >= EXACT_DEPTH,
            format!(
                "the t^-1 slot of the E2 equation is zero to depth {}",
                depth_text(result.residue_depth)
            ),
        ),
        depth_audit("ode-residual-e1", result.ode_depth_e1, floor, upto),
        depth_audit("ode-residual-e2", result.ode_depth_e2, floor, upto),
        AuditJson::new(
            "parity",
            result.parity_depth >= boundary_prec,
            format!(
                "nu-components vanish mod p^{}; boundary value carries {boundary_prec} digits",
                depth_text(result.parity_depth)
            ),
        ),
        AuditJson::new(
            "conjugation",
            defect >= boundary_prec,
            format!(
                "nu -> nu^2 fixes eps and negates E mod p^{}; boundary value carries \
                 {boundary_prec} digits",
                depth_text(defect)
            ),
        ),
    ];

    let data = RegulatorData {
        sign: result.sign.as_str().to_string(),
        e2_boundary: eis_json(&result.e2_zero),
        e2_boundary_margin: result.e2_zero_margin,
        depths: Depths {
            e1_boundary: depth_json(result.e1_zero_depth),
            e2_residue: depth_json(result.residue_depth),
            ode_e1: depth_json(result.ode_depth_e1),
            ode_e2: depth_json(result.ode_depth_e2),
            parity: depth_json(result.parity_depth),
            conjugation: depth_json(defect),
        },
        e1: eis_series_json(&result.e1),
        e2: eis_series_json(&result.e2),
        eps1: eis_series_json(&result.eps1),
        eps2: eis_series_json(&result.eps2),
    };

    let report = ReportJson { config: cfg.clone(), audits, data };
    let all_pass = report.all_pass();
    Ok((to_json_string(&report, pretty), all_pass))
}
