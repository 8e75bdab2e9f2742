//! The check subcommand: one self-test sweep over every module at the
//! configured parameters, reported as a flat audit list. `--corrupt`
//! deliberately breaks one Frobenius entry to demonstrate that the checker
//! localizes the damage; `--family-only` trims the sweep for quick runs.

use crate::cmd_family::family_audits;
use crate::config::RunConfig;
use crate::report::{depth_text, eis_zero_depth, ledger_floor, EXACT_DEPTH};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use regkit::curve::{
    dlog_reduce, handled_places, tame_symbol, torsion_symbol_pair, CurveFunction, TRat,
};
use regkit::eis::EisNum;
use regkit::family::family_data;
use regkit::filfmic::{make_log, make_log_matrix, make_polylog, make_tate, FilFMICObject};
use regkit::jsonrep::{to_json_string, AuditJson, ReportJson};
use regkit::padic::PadicNum;
use regkit::regulator::{regulator_for, SignConvention};
use regkit::ring::{EisRing, PadicRing, Ring};
use regkit::series::{FrobeniusSpec, TSeries};
use regkit::special::{polylog_eval, polylog_series, polylog_xform};
use regkit::RegError;
use serde::Serialize;

#[derive(Serialize)]
struct CheckData {
    suites: Vec<String>,
    corrupt: bool,
}

fn depth_check(name: &str, depth: i64, floor: i64, upto: i64) -> AuditJson {
    AuditJson::new(
        name,
        depth >= floor,
        format!(
            "residual vanishes mod p^{} through t^{upto}; required p^{floor}",
            depth_text(depth)
        ),
    )
}

fn curve_suite(audits: &mut Vec<AuditJson>) -> Result<(), RegError> {
    let (h1, h2) = torsion_symbol_pair();

    let mut trio = true;
    for place in handled_places() {
        trio &= tame_symbol(&h1, &h2, place)?.is_one();
    }
    audits.push(AuditJson::new(
        "curve:tame-trio",
        trio,
        "the tame symbols of the pair are 1 at all three supported places".into(),
    ));

    let (even, odd) = dlog_reduce(&h1, &h2)?;
    let expect = TRat::from_i64(3).div(&TRat::var().sub(&TRat::one()))?;
    audits.push(AuditJson::new(
        "curve:symbol-reduction",
        even == expect && odd.is_zero(),
        format!("the symbol reduces to ({even}) dx/y + ({odd}) x dx/y, exactly"),
    ));

    let (re, ro) = dlog_reduce(&h2, &h1)?;
    audits.push(AuditJson::new(
        "curve:antisymmetry",
        re == even.neg() && ro == odd.neg(),
        "swapping the pair negates both reduced coordinates".into(),
    ));

    let mut steinberg = true;
    let third = BigRational::new(BigInt::from(-1), BigInt::from(3));
    let t2 = TRat::var().mul(&TRat::var());
    let samples = [t2, TRat::var().mul(&TRat::from_rational(&third))];
    for u in samples {
        let f = CurveFunction::constant(u.clone());
        let g = CurveFunction::constant(TRat::one().sub(&u));
        let (se, so) = dlog_reduce(&f, &g)?;
        steinberg &= se.is_zero() && so.is_zero();
    }
    audits.push(AuditJson::new(
        "curve:steinberg",
        steinberg,
        "pairs (f, 1-f) from the base field reduce to zero".into(),
    ));
    Ok(())
}

fn special_suite(cfg: &RunConfig, audits: &mut Vec<AuditJson>) -> Result<(), RegError> {
    let p = cfg.p;

    // r = 0 telescopes to z/(1-z) - z^p/(1-z^p); z = 2 keeps every
    // 1 - z^{p^k} a unit by Fermat
    let s0 = cfg.s.min(4);
    let two = BigRational::from_integer(2.into());
    let ze = EisNum::from_rational_pair(p, &two, &BigRational::zero(), cfg.n)?;
    let ev = polylog_eval(0, &ze, s0)?;
    let zp = BigRational::from_integer(BigInt::from(2).pow(p as u32));
    let one = BigRational::from_integer(1.into());
    let w = &two / (&one - &two) - &zp / (&one - &zp);
    let we = EisNum::from_rational_pair(p, &w, &BigRational::zero(), cfg.n)?;
    let claim = ev.value.precision();
    audits.push(AuditJson::new(
        "special:closed-form-r0",
        ev.value.eq_mod(&we, claim),
        format!("the depth-{s0} limit at z = 2 matches the rational closed form to {claim} digits"),
    ));

    // dilogarithm at z = -nu stabilizes with margin <= 2
    let er = EisRing::new(p, cfg.n);
    let znu = er.nu().neg();
    let s = cfg.s.min(6).max(3);
    let ev2 = polylog_eval(2, &znu, s)?;
    let mut stab = true;
    for k in 2..=s as usize {
        let d = ev2.snapshots[k - 1].sub(&ev2.snapshots[k - 2]);
        stab &= eis_zero_depth(&d) >= k as i64 - 2;
    }
    audits.push(AuditJson::new(
        "special:stabilization",
        stab,
        format!(
            "partial sums S_2..S_{s} at z = -nu agree with their predecessors mod p^(k-2); \
             measured margin {}",
            ev2.margin
        ),
    ));

    // overconvergent x-form vanishes at x = 0 and x = 1
    let ring8 = PadicRing::new(p, 8);
    for r in [1i64, 2] {
        let xf = polylog_xform(&ring8, r, 40)?;
        let depth = xf.divisibility_depth();
        let floor = xf.achieved_prec();
        audits.push(AuditJson::new(
            &format!("special:xform-divisibility-r{r}"),
            depth >= floor,
            format!(
                "values at x = 0, 1 vanish mod p^{}; the x^40 window certifies p^{floor}",
                depth_text(depth)
            ),
        ));
    }

    // substituting x = 1/(1-z) recovers the z-series
    let mz = cfg.m.min(30);
    let xf = polylog_xform(&ring8, 2, 40)?;
    let xz = TSeries::one(ring8.clone(), mz)
        .sub(&TSeries::var(ring8.clone(), mz))
        .inv()?;
    let via = xf.eval_at_series(&xz);
    let direct = polylog_series(&ring8, p, 2, mz)?;
    let k = xf.achieved_prec().min(via.min_precision()).min(4);
    audits.push(AuditJson::new(
        "special:xform-substitution",
        via.eq_mod(&direct, k, mz),
        format!("the x-route dilogarithm matches the z-series mod p^{k} through z^{mz}"),
    ));
    Ok(())
}

fn filfmic_suite(
    cfg: &RunConfig,
    c: &BigRational,
    audits: &mut Vec<AuditJson>,
) -> Result<(), RegError> {
    let ring = PadicRing::new(cfg.p, cfg.n);
    let cp = PadicNum::from_rational(cfg.p, c, cfg.n)?;
    let sigma = FrobeniusSpec::new(ring.clone(), cp)?;
    let m = cfg.m;
    let upto = m - 2;

    let mut tate_ok = true;
    for r in -2..=2 {
        let obj = make_tate(&sigma, r, m);
        tate_ok &= obj.horizontality_depth(upto)? >= EXACT_DEPTH;
        tate_ok &= obj.check_transversality().is_ok();
    }
    audits.push(AuditJson::new(
        "filfmic:tate",
        tate_ok,
        "twists r = -2..2 are exactly horizontal and transversal".into(),
    ));

    let one = TSeries::one(ring.clone(), m);
    let t = TSeries::var(ring.clone(), m);
    let units = [
        one.add(&t),
        one.add(&t.scale_i64(3)).add(&TSeries::monomial(ring.clone(), ring.from_i64(1), 3, m)),
        one.scale_i64(2).add(&t),
    ];
    for (i, f) in units.iter().enumerate() {
        let obj = make_log(&sigma, f)?;
        let depth = obj.horizontality_depth(upto.min(obj.frob()[1][0].trunc()))?;
        audits.push(depth_check(&format!("filfmic:log-{i}"), depth, cfg.n - 2, upto));
    }

    // the polylog object wants the plain sigma(T) = T^p
    let sig1 = FrobeniusSpec::new(ring.clone(), ring.one())?;
    let pol = make_polylog(&sig1, 2, m)?;
    let pol_depth = pol.horizontality_depth(upto)?;
    audits.push(depth_check("filfmic:polylog", pol_depth, cfg.n - 2, upto));
    audits.push(AuditJson::new(
        "filfmic:polylog-transversality",
        pol.check_transversality().is_ok(),
        "the connection lowers the polylog filtration by exactly one step".into(),
    ));

    // the off-diagonal variant Phi(e-2j) = p^-j e0 must be rejected
    let mut frob = pol.frob().to_vec();
    for j in 1..3 {
        frob[0][j] = frob[j][j].clone();
        frob[j][j] = TSeries::zero(ring.clone(), frob[0][j].trunc());
    }
    let alt = FilFMICObject::from_parts(
        sig1.clone(),
        pol.basis().to_vec(),
        pol.conn().to_vec(),
        frob,
        pol.jumps().to_vec(),
    )?;
    let alt_depth = alt.horizontality_depth(upto)?;
    audits.push(AuditJson::new(
        "filfmic:polylog-variant-rejected",
        alt_depth < cfg.n - 2,
        format!(
            "the off-diagonal Frobenius variant is horizontal only mod p^{}",
            depth_text(alt_depth)
        ),
    ));

    let q12 = one.sub(&t);
    let qmat = vec![
        vec![one.add(&t), q12.clone()],
        vec![q12, one.add(&t.mul(&t))],
    ];
    let lm = make_log_matrix(&sigma, &qmat)?;
    let lm_depth = lm.horizontality_depth(upto)?;
    audits.push(depth_check("filfmic:log-matrix", lm_depth, cfg.n - 2, upto));
    audits.push(AuditJson::new(
        "filfmic:log-matrix-transversality",
        lm.check_transversality().is_ok(),
        "the rank-4 object respects its filtration jumps".into(),
    ));
    Ok(())
}

fn regulator_suite(
    cfg: &RunConfig,
    c: &BigRational,
    audits: &mut Vec<AuditJson>,
) -> Result<(), RegError> {
    let fam = family_data(cfg.p, c, cfg.m, cfg.n)?;
    let result = regulator_for(&fam, cfg.s, SignConvention::Corollary)?;
    let floor = ledger_floor(cfg.p, cfg.n, cfg.m);
    let upto = result.eps2.trunc().min(cfg.m - 2);

    audits.push(AuditJson::new(
        "regulator:e1-boundary",
        result.e1_zero_depth >= EXACT_DEPTH,
        format!("E1(0) is zero to depth {}", depth_text(result.e1_zero_depth)),
    ));
    audits.push(AuditJson::new(
        "regulator:e2-residue",
        result.residue_depth >= EXACT_DEPTH,
        format!(
            "the t^-1 slot of the E2 equation is zero to depth {}",
            depth_text(result.residue_depth)
        ),
    ));
    audits.push(depth_check("regulator:ode-e1", result.ode_depth_e1, floor, upto));
    audits.push(depth_check("regulator:ode-e2", result.ode_depth_e2, floor, upto));
    let boundary_prec = result.e2_zero.precision();
    audits.push(AuditJson::new(
        "regulator:parity",
        result.parity_depth >= boundary_prec,
        format!(
            "nu-components vanish mod p^{}; boundary value carries {boundary_prec} digits",
            depth_text(result.parity_depth)
        ),
    ));
    Ok(())
}

pub fn run(
    cfg: &RunConfig,
    c: &BigRational,
    corrupt: bool,
    family_only: bool,
    pretty: bool,
) -> Result<(String, bool), RegError> {
    let mut audits = Vec::new();
    let mut suites = vec!["family".to_string()];

    let fam = family_data(cfg.p, c, cfg.m, cfg.n)?;
    let (fam_audits, _) = family_audits(&fam, cfg.m - 2, cfg.n - 1, corrupt)?;
    for mut a in fam_audits {
        a.name = format!("family:{}", a.name);
        audits.push(a);
    }

    if !family_only {
        suites.extend(["curve", "special", "filfmic", "regulator"].map(String::from));
        curve_suite(&mut audits)?;
        special_suite(cfg, &mut audits)?;
        filfmic_suite(cfg, c, &mut audits)?;
        regulator_suite(cfg, c, &mut audits)?;
    }

    let data = CheckData { suites, corrupt };
    let report = ReportJson { config: cfg.clone(), audits, data };
    let all_pass = report.all_pass();
    Ok((to_json_string(&report, pretty), all_pass))
}
