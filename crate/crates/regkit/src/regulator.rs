//! Boundary-value problems for the regulator coefficients of the symbol
//! `{h1, h2}` on the family: the series `E1`, `E2` in the normalised basis,
//! the output pair `eps1`, `eps2` in the algebraic basis, and the degenerate
//! `n = 0` symbol map.
//!
//! The two first-order equations are
//!
//! ```text
//! dE1/dt = -3 ( F/(t-1) - p^{-1} sigma*(F/(t-1) dt)/dt ),       E1(0) = 0
//! dE2/dt = -E1 q'/q - 3 tau p^{-1} sigma*(F/(t-1) dt)/dt,       E2(0) = -9 ln_2(-nu)
//! ```
//!
//! `E1(0) = 0` is forced by the vanishing residue of the second equation;
//! `E2(0)` comes from the dilogarithm at the sixth root of unity `-nu`,
//! evaluated by the truncation-limit formula.

use num_rational::BigRational;

use crate::eis::EisNum;
use crate::err::RegError;
use crate::family::{family_data, FamilyData};
use crate::padic::{PadicNum, PREC_EXACT};
use crate::ring::{EisRing, PadicLike, PadicRing, Ring};
use crate::series::{FrobeniusSpec, TSeries};
use crate::special::{polylog_eval, polylog_xform, PolylogEval};

/// The paper-facing sign of the regulator: the corollary convention reports
/// `-eps1 omega - eps2 eta`, the introduction convention the negative of
/// that. Both are carried; nothing is silently chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignConvention {
    Corollary,
    Intro,
}

impl SignConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            SignConvention::Corollary => "corollary-sign",
            SignConvention::Intro => "intro-sign",
        }
    }
}

/// Everything the pipeline produces for one `(p, c, M, N, s)`: the solved
/// series, the boundary-value record, and the audit depths.
pub struct RegulatorResult {
    pub p: u64,
    pub c: BigRational,
    pub m: i64,
    pub n: i64,
    /// Truncation depth `p^s` used for the dilogarithm limit.
    pub s: u32,
    pub e1: TSeries<EisRing>,
    pub e2: TSeries<EisRing>,
    pub eps1: TSeries<EisRing>,
    pub eps2: TSeries<EisRing>,
    /// `E2(0) = -9 ln_2(-nu)` and the stabilization margin measured while
    /// evaluating it.
    pub e2_zero: EisNum,
    pub e2_zero_margin: i64,
    /// Depth to which `E1(0)` vanishes (exact zero reports the cap).
    pub e1_zero_depth: i64,
    /// Depth to which the `1/t` residue of the E2 right-hand side vanishes.
    pub residue_depth: i64,
    /// Depths to which the solved series satisfy their equations.
    pub ode_depth_e1: i64,
    pub ode_depth_e2: i64,
    /// Depth to which the `nu`-components of `eps1`, `eps2` vanish.
    pub parity_depth: i64,
    pub sign: SignConvention,
}

impl RegulatorResult {
    /// The coefficient pair of the regulator on `(omega, eta)` under the
    /// chosen convention: corollary-sign is `(-eps1, -eps2)`, intro-sign
    /// `(eps1, eps2)`.
    pub fn regulator_pair(&self) -> (TSeries<EisRing>, TSeries<EisRing>) {
        match self.sign {
            SignConvention::Corollary => (self.eps1.neg(), self.eps2.neg()),
            SignConvention::Intro => (self.eps1.clone(), self.eps2.clone()),
        }
    }
}

/// `F/(t-1)` and its semilinear pull `p^{-1} sigma*(g dt)/dt`; the right-hand
/// sides of both equations are built from this pair.
fn ode_ingredients(
    fam: &FamilyData,
    f: &TSeries<EisRing>,
) -> Result<(TSeries<EisRing>, TSeries<EisRing>), RegError> {
    let ring = fam.ring().clone();
    let m = f.trunc();
    let t = TSeries::var(ring.clone(), m);
    let g = f.div(&t.sub(&TSeries::one(ring, m)))?;
    let pulled = fam.sigma().substitute_form(&g)?.mul_p_pow_all(-1);
    Ok((g, pulled))
}

fn e1_rhs(fam: &FamilyData, f: &TSeries<EisRing>) -> Result<TSeries<EisRing>, RegError> {
    let (g, pulled) = ode_ingredients(fam, f)?;
    Ok(g.sub(&pulled).scale_i64(-3))
}

/// Solve the E1 equation with `E1(0) = 0`.
pub fn solve_e1(fam: &FamilyData) -> Result<TSeries<EisRing>, RegError> {
    solve_e1_with(fam, fam.f_series())
}

fn solve_e1_with(fam: &FamilyData, f: &TSeries<EisRing>) -> Result<TSeries<EisRing>, RegError> {
    e1_rhs(fam, f)?.integrate()
}

/// `E2(0) = -9 ln_2(z)` at `z = -nu` (or its conjugate), with the
/// stabilization record of the limit evaluation.
fn e2_boundary(fam: &FamilyData, s: u32, conjugate: bool) -> Result<(EisNum, PolylogEval), RegError> {
    let mut z = fam.ring().nu().neg();
    if conjugate {
        z = z.conj();
    }
    let eval = polylog_eval(2, &z, s)?;
    Ok((eval.value.mul_exact_i64(-9), eval))
}

/// Right-hand side of the E2 equation. The product `E1 * q'/q` is formed as
/// Laurent series; since `E1(0) = 0` exactly, the `1/t` pole cancels and the
/// result is regular.
fn e2_rhs(
    fam: &FamilyData,
    f: &TSeries<EisRing>,
    e1: &TSeries<EisRing>,
) -> Result<TSeries<EisRing>, RegError> {
    let (_, pulled) = ode_ingredients(fam, f)?;
    let dlq = fam.dlog_q_reduced()?;
    let tau = fam
        .tau()
        .map_coeffs(fam.ring().clone(), |x| EisNum::from_padic(x.clone()));
    let trunc = pulled.trunc().min(tau.trunc());
    let sigma_term = tau
        .truncate_to(trunc)
        .mul(&pulled.truncate_to(trunc))
        .scale_i64(-3);
    Ok(e1.mul(&dlq).neg().add(&sigma_term))
}

/// Solve the E2 equation on top of a solved `E1`, with the boundary value
/// evaluated at truncation depth `p^s`. Returns the series together with the
/// stabilization record of the limit.
pub fn solve_e2(
    fam: &FamilyData,
    e1: &TSeries<EisRing>,
    s: u32,
) -> Result<(TSeries<EisRing>, PolylogEval), RegError> {
    let rhs = e2_rhs(fam, fam.f_series(), e1)?;
    let (e2_zero, eval) = e2_boundary(fam, s, false)?;
    let tail = rhs.integrate()?;
    let e2 = tail.add(&TSeries::monomial(
        fam.ring().clone(),
        e2_zero,
        0,
        tail.trunc(),
    ));
    Ok((e2, eval))
}

/// Zero-depth of a single ring element: its valuation if nonzero, otherwise
/// its precision (the cap at which it is indistinguishable from zero).
fn elem_zero_depth(x: &EisNum) -> i64 {
    match x.valuation() {
        Some(v) => v,
        None if x.a.is_exact_zero() && x.b.is_exact_zero() => PREC_EXACT,
        None => x.precision(),
    }
}

/// `eps1 = E1/F + 4(1-t)(F+3tF') E2`, `eps2 = F E2`.
fn epsilons_with(
    f: &TSeries<EisRing>,
    e1: &TSeries<EisRing>,
    e2: &TSeries<EisRing>,
) -> Result<(TSeries<EisRing>, TSeries<EisRing>), RegError> {
    let ring = f.ring().clone();
    let m = f.trunc();
    let one = TSeries::one(ring.clone(), m);
    let t = TSeries::var(ring, m);
    let upper = one
        .sub(&t)
        .mul(&f.add(&t.mul(&f.derivative()).scale_i64(3)))
        .scale_i64(4);
    let eps1 = e1.mul(&f.inv()?).add(&upper.mul(e2));
    let eps2 = f.mul(e2);
    Ok((eps1, eps2))
}

/// Assemble `eps1`, `eps2` from solved `E1`, `E2` for the family's own `F`.
pub fn epsilons(
    fam: &FamilyData,
    e1: &TSeries<EisRing>,
    e2: &TSeries<EisRing>,
) -> Result<(TSeries<EisRing>, TSeries<EisRing>), RegError> {
    epsilons_with(fam.f_series(), e1, e2)
}

struct Pipeline {
    e1: TSeries<EisRing>,
    e2: TSeries<EisRing>,
    eps1: TSeries<EisRing>,
    eps2: TSeries<EisRing>,
    e2_zero: EisNum,
    eval: PolylogEval,
    residue_depth: i64,
}

/// One full solve. `conjugate` runs the whole pipeline through the
/// nontrivial Galois automorphism `nu -> nu^2`: `F`, the boundary value, and
/// every derived series are conjugated coherently.
fn run_pipeline(fam: &FamilyData, s: u32, conjugate: bool) -> Result<Pipeline, RegError> {
    let f = if conjugate {
        fam.f_series().map_coeffs(fam.ring().clone(), |x| x.conj())
    } else {
        fam.f_series().clone()
    };
    let e1 = solve_e1_with(fam, &f)?;
    let rhs2 = e2_rhs(fam, &f, &e1)?;
    let residue_depth = elem_zero_depth(&rhs2.coeff(-1));
    let (e2_zero, eval) = e2_boundary(fam, s, conjugate)?;
    let tail = rhs2.integrate()?;
    let e2 = tail.add(&TSeries::monomial(
        fam.ring().clone(),
        e2_zero.clone(),
        0,
        tail.trunc(),
    ));
    let (eps1, eps2) = epsilons_with(&f, &e1, &e2)?;
    Ok(Pipeline { e1, e2, eps1, eps2, e2_zero, eval, residue_depth })
}

/// Minimum zero-depth of the `nu`-components over both epsilon series.
fn parity_depth(zp: &PadicRing, eps1: &TSeries<EisRing>, eps2: &TSeries<EisRing>, upto: i64) -> i64 {
    let d1 = eps1
        .map_coeffs(zp.clone(), |x| x.b.clone())
        .zero_to_depth(upto.min(eps1.trunc()));
    let d2 = eps2
        .map_coeffs(zp.clone(), |x| x.b.clone())
        .zero_to_depth(upto.min(eps2.trunc()));
    d1.min(d2)
}

/// Full solve with audits, for a family already built.
pub fn regulator_for(
    fam: &FamilyData,
    s: u32,
    sign: SignConvention,
) -> Result<RegulatorResult, RegError> {
    let run = run_pipeline(fam, s, false)?;
    let upto = run.eps2.trunc().min(fam.trunc() - 2);

    let ode_depth_e1 = run
        .e1
        .derivative()
        .sub(&e1_rhs(fam, fam.f_series())?)
        .zero_to_depth(upto);
    let ode_depth_e2 = run
        .e2
        .derivative()
        .sub(&e2_rhs(fam, fam.f_series(), &run.e1)?)
        .zero_to_depth(upto);
    let parity = parity_depth(fam.zp_ring(), &run.eps1, &run.eps2, upto);

    Ok(RegulatorResult {
        p: fam.prime(),
        c: fam.twist().clone(),
        m: fam.trunc(),
        n: fam.target_precision(),
        s,
        e1_zero_depth: elem_zero_depth(&run.e1.coeff(0)),
        residue_depth: run.residue_depth,
        ode_depth_e1,
        ode_depth_e2,
        parity_depth: parity,
        e1: run.e1,
        e2: run.e2,
        eps1: run.eps1,
        eps2: run.eps2,
        e2_zero: run.e2_zero,
        e2_zero_margin: run.eval.margin,
        sign,
    })
}

/// Build the family and solve; the cache makes repeated calls cheap.
pub fn regulator_output(
    p: u64,
    c: &BigRational,
    m: i64,
    n: i64,
    s: u32,
    sign: SignConvention,
) -> Result<RegulatorResult, RegError> {
    let fam = family_data(p, c, m, n)?;
    regulator_for(&fam, s, sign)
}

/// Depths to which the conjugated pipeline reproduces the expected parity:
/// `E1`, `E2` negate; `eps1`, `eps2` are fixed. Returns the minimum
/// agreement depth over the four comparisons, checking exponents `< upto`.
pub fn conjugation_defect(fam: &FamilyData, s: u32, upto: i64) -> Result<i64, RegError> {
    let plain = run_pipeline(fam, s, false)?;
    let conj = run_pipeline(fam, s, true)?;
    let lim = upto
        .min(plain.eps1.trunc())
        .min(conj.eps1.trunc())
        .min(plain.e2.trunc());
    let mut depth = i64::MAX;
    for (a, b) in [
        (&plain.e1.neg(), &conj.e1),
        (&plain.e2.neg(), &conj.e2),
        (&plain.eps1, &conj.eps1),
        (&plain.eps2, &conj.eps2),
    ] {
        depth = depth.min(a.sub(b).zero_to_depth(lim));
    }
    Ok(depth)
}

/// Independent check of the boundary value: the overconvergent x-form of the
/// dilogarithm evaluated at `x = 1/(1 - z) = -nu` must agree with the limit
/// evaluation. Returns `(agreement_depth, claimed_digits)`.
pub fn e2_boundary_cross_check(fam: &FamilyData, s: u32) -> Result<(i64, i64), RegError> {
    let (snap, eval) = e2_boundary(fam, s, false)?;
    let claim = eval.value.precision();
    let p = fam.prime() as i64;
    // degree large enough that the dropped tail is below the claim
    let degree = (p - 1) * (claim + 4);
    let ring = PadicRing::new(fam.prime(), claim + 4);
    let xform = polylog_xform(&ring, 2, degree)?;
    let x = fam.ring().nu().neg();
    let other = xform.eval_at_unit(&x)?.mul_exact_i64(-9);
    let depth = elem_zero_depth(&snap.sub(&other));
    Ok((depth, claim))
}

/// The `n = 0` symbol map: a unit function `h` goes to the pair
/// `(dh/h, log_sigma(h))`.
pub fn symbol_reg_n0<R: PadicLike>(
    h: &TSeries<R>,
    sigma: &FrobeniusSpec<R>,
) -> Result<(TSeries<R>, TSeries<R>), RegError> {
    let ring = h.ring().clone();
    if h.leading_exponent() != Some(0) || ring.valuation_of(&h.coeff(0)) != Some(0) {
        return Err(RegError::Domain(
            "the degenerate symbol map needs a unit function".into(),
        ));
    }
    let (_, dlog) = h.log_deriv()?;
    let ls = crate::special::log_sigma(h, sigma)?;
    Ok((dlog, ls))
}

/// The Frobenius twist `c = a^{1-p}` induced on the fiber at a unit point
/// `a` (requires `a` a p-adic unit with `a - 1` also a unit).
pub fn unit_point_twist(p: u64, prec: i64, a: &BigRational) -> Result<PadicNum, RegError> {
    let av = PadicNum::from_rational(p, a, prec)?;
    if av.valuation() != Some(0) {
        return Err(RegError::BadConfig(format!("a = {a} is not a unit at p = {p}")));
    }
    let shifted = av.sub(&PadicNum::from_i64(p, 1, prec));
    if !matches!(shifted.valuation(), Some(0)) {
        return Err(RegError::BadConfig(format!(
            "a = {a} reduces to 1 mod {p}, where the fiber degenerates"
        )));
    }
    av.pow_i64(1 - p as i64)
}

/// Evaluation of the regulator series at a unit point is out of scope: the
/// solved series converge for `|t| < 1` only, and continuation to `|a| = 1`
/// requires Dwork-congruence machinery this crate does not implement. The
/// refusal records the induced twist.
pub fn evaluate_at_unit_point(p: u64, prec: i64, a: &BigRational) -> Result<(), RegError> {
    let c = unit_point_twist(p, prec, a)?;
    Err(RegError::Unsupported(format!(
        "evaluation at t = {a} with |a| = 1 needs Dwork-congruence continuation, \
         which is outside this implementation; the induced twist is \
         c = a^(1-p) = {} mod {p}^{prec}",
        c.value_mod(prec)
    )))
}
