//! Depth bookkeeping shared by the subcommand audits.

use regkit::eis::EisNum;
use regkit::jsonrep::AuditJson;
use regkit::padic::PREC_EXACT;

/// Depths at or above this read as "exact" (identically zero residuals
/// report i64::MAX or the exactness sentinel).
pub const EXACT_DEPTH: i64 = PREC_EXACT / 2;

pub fn depth_text(d: i64) -> String {
    if d >= EXACT_DEPTH {
        "exact".into()
    } else {
        d.to_string()
    }
}

/// JSON form of a depth; null means exact.
pub fn depth_json(d: i64) -> Option<i64> {
    (d < EXACT_DEPTH).then_some(d)
}

/// Standard audit for "this residual vanishes p-adically deep enough".
pub fn depth_audit(name: &str, depth: i64, floor: i64, upto: i64) -> AuditJson {
    AuditJson::new(
        name,
        depth >= floor,
        format!(
            "residual vanishes mod p^{} through t^{upto}; required p^{floor}",
            depth_text(depth)
        ),
    )
}

/// Guaranteed digits after one series-integration pass: N minus the largest
/// power of p fitting under the truncation.
pub fn ledger_floor(p: u64, n: i64, m: i64) -> i64 {
    let mut debits = 0i64;
    let mut pk = p as i64;
    while pk <= m {
        debits += 1;
        pk = pk.saturating_mul(p as i64);
    }
    n - debits
}

/// How deep an element is indistinguishable from zero: its valuation when a
/// nonzero digit is visible, otherwise its precision.
pub fn eis_zero_depth(x: &EisNum) -> i64 {
    match x.valuation() {
        Some(v) => v,
        None => x.precision(),
    }
}
