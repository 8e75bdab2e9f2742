//! The elliptic family `y^2 = x^3 + (3x + 4(1-t))^2` over the base punctured
//! at `t = 0, 1`: Gauss-Manin connection in the algebraic basis
//! `(omega, eta) = (dx/y, x dx/y)`, the normalised basis `(w-hat, eta-hat)`,
//! the period ratio `tau`, and the Frobenius matrix in both bases.
//!
//! Matrix convention throughout: a structure matrix `M` acts on the basis by
//! `T(b_j) = sum_i M[i][j] b_i`, and a basis change `(w-hat, eta-hat) =
//! (omega, eta) * P` stores the new basis in the columns of `P`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::eis::EisNum;
use crate::err::RegError;
use crate::filfmic::FilFMICObject;
use crate::padic::{padic_log, PadicNum};
use crate::ring::{EisRing, PadicLike, PadicRing, RationalRing, Ring};
use crate::series::{reduce_rational_series, FrobeniusSpec, TSeries};
use crate::special::{hypergeometric_f, log_sigma, tate_period};

/// A 2x2 matrix of truncated series, row-major.
pub type Mat2<R> = [[TSeries<R>; 2]; 2];

/// Extra p-adic headroom carried internally so that results survive the one
/// digit `log_sigma` debits and still meet the requested precision.
const PREC_BUFFER: i64 = 2;

fn mat_mul2<R: Ring>(a: &Mat2<R>, b: &Mat2<R>) -> Mat2<R> {
    let entry = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

fn mat_add2<R: Ring>(a: &Mat2<R>, b: &Mat2<R>) -> Mat2<R> {
    [
        [a[0][0].add(&b[0][0]), a[0][1].add(&b[0][1])],
        [a[1][0].add(&b[1][0]), a[1][1].add(&b[1][1])],
    ]
}

/// Adjugate of a 2x2 matrix; equals the inverse when the determinant is 1.
fn mat_adj2<R: Ring>(m: &Mat2<R>) -> Mat2<R> {
    [
        [m[1][1].clone(), m[0][1].neg()],
        [m[1][0].neg(), m[0][0].clone()],
    ]
}

fn mat_derivative2<R: Ring>(m: &Mat2<R>) -> Mat2<R> {
    [
        [m[0][0].derivative(), m[0][1].derivative()],
        [m[1][0].derivative(), m[1][1].derivative()],
    ]
}

fn mat_map2<R: Ring, S: Ring>(
    m: &Mat2<R>,
    mut f: impl FnMut(&TSeries<R>) -> Result<TSeries<S>, RegError>,
) -> Result<Mat2<S>, RegError> {
    Ok([
        [f(&m[0][0])?, f(&m[0][1])?],
        [f(&m[1][0])?, f(&m[1][1])?],
    ])
}

/// Gauss-Manin connection of the family in the basis `(omega, eta)`, as the
/// matrix of `d/dt` (the `dt` is implicit):
///
/// ```text
/// nabla(omega) = -(1/3t) omega + (1/(12(t^2-t))) eta
/// nabla(eta)   =  (4/3t) omega + (1/3t) eta
/// ```
///
/// Entries are exact rational Laurent series of pole order 1, truncation
/// at least `m`.
pub fn gm_matrix(m: i64) -> Mat2<RationalRing> {
    let ring = RationalRing;
    let mm = m + 3;
    let t = TSeries::var(ring.clone(), mm);
    let inv_t = TSeries::monomial(ring.clone(), BigRational::one(), -1, mm);
    // 1/(12(t^2 - t)); the inverse has pole order 1 and all coefficients -1/12
    let down = t.mul(&t).sub(&t).inv().expect("t^2 - t has an invertible unit part").div_exact_i64(12);
    [
        [
            inv_t.div_exact_i64(-3).truncate_to(m),
            inv_t.scale(&ring.from_ratio(4, 3)).truncate_to(m),
        ],
        [down.truncate_to(m), inv_t.div_exact_i64(3).truncate_to(m)],
    ]
}

/// `dlog q = q'/q = 1/t + q0'/q0` as an exact rational Laurent series,
/// truncation `m - 1`. Derived from the Tate period, independently of the
/// hypergeometric route `dq/q = dt/(12(t^2-t)F^2)`.
pub fn dlog_q_rational(m: i64) -> TSeries<RationalRing> {
    let ring = RationalRing;
    let (_, q0) = tate_period(m + 2);
    let tail = q0.derivative().div(&q0).expect("q0 is a unit series");
    TSeries::monomial(ring, BigRational::one(), -1, tail.trunc())
        .add(&tail)
        .truncate_to(m - 1)
}

/// Everything computed once per `(p, c, M, N)`: the family's series data and
/// both Frobenius presentations. Built by [`FamilyData::new`] and shared
/// read-only; see [`family_data`] for the cached entry point.
pub struct FamilyData {
    p: u64,
    c: BigRational,
    m: i64,
    n: i64,
    ring: EisRing,
    zp: PadicRing,
    sigma: FrobeniusSpec<EisRing>,
    sigma_zp: FrobeniusSpec<PadicRing>,
    f: TSeries<EisRing>,
    q: TSeries<RationalRing>,
    q0: TSeries<RationalRing>,
    dlog_q: TSeries<RationalRing>,
    gm: Mat2<RationalRing>,
    hat_transition: Mat2<EisRing>,
    hat_connection: Mat2<EisRing>,
    tau: TSeries<PadicRing>,
    frobenius_hat: Mat2<EisRing>,
    frobenius_algebraic: Mat2<EisRing>,
}

impl FamilyData {
    /// Build the family data at t-truncation `m`, target precision `p^n`,
    /// for the Frobenius lift `sigma(t) = c t^p`.
    pub fn new(p: u64, c: &BigRational, m: i64, n: i64) -> Result<Self, RegError> {
        if m < 4 {
            return Err(RegError::BadConfig("family data needs truncation at least 4".into()));
        }
        if n < 1 {
            return Err(RegError::BadConfig("family data needs positive precision".into()));
        }
        let cap = n + PREC_BUFFER;
        let ring = EisRing::new(p, cap);
        let zp = PadicRing::new(p, cap);
        let c_zp = PadicNum::from_rational(p, c, cap)?;
        let sigma = FrobeniusSpec::new(ring.clone(), EisNum::from_padic(c_zp.clone()))?;
        let sigma_zp = FrobeniusSpec::new(zp.clone(), c_zp.clone())?;

        let f = hypergeometric_f(&ring, m)?;
        let (q, q0) = tate_period(m);
        let dlog_q = dlog_q_rational(m);
        let gm = gm_matrix(m);

        let hat_transition = Self::build_hat_transition(&ring, &f, m);
        let hat_connection = Self::build_hat_connection(&ring, &gm, &hat_transition)?;
        let tau = Self::build_tau(&zp, &sigma_zp, &q0, &c_zp)?;
        let frobenius_hat = Self::build_frobenius_hat(&ring, &tau);
        let frobenius_algebraic =
            Self::build_frobenius_algebraic(&sigma, &hat_transition, &frobenius_hat)?;

        Ok(FamilyData {
            p,
            c: c.clone(),
            m,
            n,
            ring,
            zp,
            sigma,
            sigma_zp,
            f,
            q,
            q0,
            dlog_q,
            gm,
            hat_transition,
            hat_connection,
            tau,
            frobenius_hat,
            frobenius_algebraic,
        })
    }

    /// `P = [[1/F, 4(1-t)(F+3tF')], [0, F]]`, the columns expressing
    /// `(w-hat, eta-hat)` in terms of `(omega, eta)`. `det P = 1`.
    fn build_hat_transition(ring: &EisRing, f: &TSeries<EisRing>, m: i64) -> Mat2<EisRing> {
        let one = TSeries::one(ring.clone(), m);
        let t = TSeries::var(ring.clone(), m);
        let fp = f.derivative();
        let upper = one
            .sub(&t)
            .mul(&f.add(&t.mul(&fp).scale_i64(3)))
            .scale_i64(4);
        let finv = f.inv().expect("F is a unit series");
        [
            [finv.truncate_to(m - 1), upper.truncate_to(m - 1)],
            [TSeries::zero(ring.clone(), m - 1), f.truncate_to(m - 1)],
        ]
    }

    /// The connection matrix in the hat basis, computed (not assumed) as
    /// `P^{-1} (dP/dt + A P)`. Identically `[[0,0],[dlog q, 0]]`; the
    /// residual entries vanish only to working precision.
    fn build_hat_connection(
        ring: &EisRing,
        gm: &Mat2<RationalRing>,
        p_mat: &Mat2<EisRing>,
    ) -> Result<Mat2<EisRing>, RegError> {
        let a = mat_map2(gm, |s| reduce_rational_series(ring, s))?;
        let inner = mat_add2(&mat_derivative2(p_mat), &mat_mul2(&a, p_mat));
        Ok(mat_mul2(&mat_adj2(p_mat), &inner))
    }

    /// `tau = -(1/p) log(27^{p-1} c) + (1/p) log(q0^p / q0^sigma)`; the
    /// second summand is `log_sigma(q0)` since `q0` is a unit series.
    fn build_tau(
        zp: &PadicRing,
        sigma_zp: &FrobeniusSpec<PadicRing>,
        q0: &TSeries<RationalRing>,
        c_zp: &PadicNum,
    ) -> Result<TSeries<PadicRing>, RegError> {
        let p = zp.prime();
        let q0_zp = reduce_rational_series(zp, q0)?;
        let tail = log_sigma(&q0_zp, sigma_zp)?;
        let pow27 = BigRational::from(BigInt::from(27)).pow((p - 1) as i32);
        let arg = PadicNum::from_rational(p, &pow27, zp.cap())?.mul(c_zp);
        let constant = padic_log(&arg)?.div_exact_i64(-(p as i64));
        let head = TSeries::monomial(zp.clone(), constant, 0, tail.trunc());
        Ok(head.add(&tail))
    }

    /// `[[p, 0], [-p tau, 1]]`: Phi(w-hat) = p w-hat - p tau eta-hat,
    /// Phi(eta-hat) = eta-hat.
    fn build_frobenius_hat(ring: &EisRing, tau: &TSeries<PadicRing>) -> Mat2<EisRing> {
        let trunc = tau.trunc();
        let tau_eis = tau.map_coeffs(ring.clone(), |x| EisNum::from_padic(x.clone()));
        let p = ring.prime() as i64;
        [
            [
                TSeries::monomial(ring.clone(), ring.from_i64(p), 0, trunc),
                TSeries::zero(ring.clone(), trunc),
            ],
            [tau_eis.mul_p_pow_all(1).neg(), TSeries::one(ring.clone(), trunc)],
        ]
    }

    /// Frobenius in the algebraic basis: `Phi_alg = P Phi_hat sigma*(P)^{-1}`,
    /// using `det P = 1` so that `sigma*(P)^{-1}` is the adjugate.
    fn build_frobenius_algebraic(
        sigma: &FrobeniusSpec<EisRing>,
        p_mat: &Mat2<EisRing>,
        frob_hat: &Mat2<EisRing>,
    ) -> Result<Mat2<EisRing>, RegError> {
        let p_sigma = mat_map2(p_mat, |s| sigma.substitute(s))?;
        Ok(mat_mul2(p_mat, &mat_mul2(frob_hat, &mat_adj2(&p_sigma))))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn twist(&self) -> &BigRational {
        &self.c
    }

    pub fn trunc(&self) -> i64 {
        self.m
    }

    pub fn target_precision(&self) -> i64 {
        self.n
    }

    pub fn ring(&self) -> &EisRing {
        &self.ring
    }

    pub fn zp_ring(&self) -> &PadicRing {
        &self.zp
    }

    pub fn sigma(&self) -> &FrobeniusSpec<EisRing> {
        &self.sigma
    }

    pub fn sigma_zp(&self) -> &FrobeniusSpec<PadicRing> {
        &self.sigma_zp
    }

    /// The normalised hypergeometric solution `F` with `2 sqrt(-3) F(0) = 1`.
    pub fn f_series(&self) -> &TSeries<EisRing> {
        &self.f
    }

    /// The Tate period `q(t)`, exact over the rationals.
    pub fn q_series(&self) -> &TSeries<RationalRing> {
        &self.q
    }

    /// The unit factor `q0 = 27 q / t`.
    pub fn q0_series(&self) -> &TSeries<RationalRing> {
        &self.q0
    }

    pub fn dlog_q(&self) -> &TSeries<RationalRing> {
        &self.dlog_q
    }

    pub fn gm(&self) -> &Mat2<RationalRing> {
        &self.gm
    }

    pub fn hat_transition(&self) -> &Mat2<EisRing> {
        &self.hat_transition
    }

    pub fn hat_connection(&self) -> &Mat2<EisRing> {
        &self.hat_connection
    }

    pub fn tau(&self) -> &TSeries<PadicRing> {
        &self.tau
    }

    pub fn frobenius_hat(&self) -> &Mat2<EisRing> {
        &self.frobenius_hat
    }

    pub fn frobenius_algebraic(&self) -> &Mat2<EisRing> {
        &self.frobenius_algebraic
    }

    /// First exponent whose `tau` coefficient is not in `Z_p`, or the
    /// truncation if every coefficient is integral.
    pub fn tau_integral_to(&self) -> i64 {
        for e in 0..self.tau.trunc() {
            match self.zp.valuation_of(&self.tau.coeff(e)) {
                Some(v) if v < 0 => return e,
                _ => {}
            }
        }
        self.tau.trunc()
    }

    /// `dlog q` reduced into the working ring, pole order 1.
    pub fn dlog_q_reduced(&self) -> Result<TSeries<EisRing>, RegError> {
        reduce_rational_series(&self.ring, &self.dlog_q)
    }

    /// The hat-basis object with its structural connection
    /// `[[0,0],[dlog q,0]]` and Frobenius `[[p,0],[-p tau,1]]`, filtration
    /// jumps `(1, 0)`. Horizontality of this object is equivalent to the
    /// identity `p dlog q - p dtau = sigma*(dlog q)`.
    pub fn hat_object(&self) -> Result<FilFMICObject<EisRing>, RegError> {
        let trunc = self.frobenius_hat[1][0].trunc().min(self.m - 1);
        let zero = TSeries::zero(self.ring.clone(), trunc);
        let dlq = self.dlog_q_reduced()?.truncate_to(trunc);
        FilFMICObject::from_parts(
            self.sigma.clone(),
            vec!["w-hat".into(), "eta-hat".into()],
            vec![vec![zero.clone(), zero.clone()], vec![dlq, zero.clone()]],
            vec![
                vec![
                    self.frobenius_hat[0][0].truncate_to(trunc),
                    self.frobenius_hat[0][1].truncate_to(trunc),
                ],
                vec![
                    self.frobenius_hat[1][0].truncate_to(trunc),
                    self.frobenius_hat[1][1].truncate_to(trunc),
                ],
            ],
            vec![1, 0],
        )
    }

    /// The same object in the algebraic basis `(omega, eta)`: Gauss-Manin
    /// connection and the conjugated Frobenius.
    pub fn algebraic_object(&self) -> Result<FilFMICObject<EisRing>, RegError> {
        let trunc = self
            .frobenius_algebraic
            .iter()
            .flatten()
            .map(|s| s.trunc())
            .min()
            .unwrap();
        let a = mat_map2(&self.gm, |s| {
            Ok(reduce_rational_series(&self.ring, s)?.truncate_to(trunc))
        })?;
        let phi = mat_map2(&self.frobenius_algebraic, |s| Ok(s.truncate_to(trunc)))?;
        let to_rows = |m: Mat2<EisRing>| {
            let [[a00, a01], [a10, a11]] = m;
            vec![vec![a00, a01], vec![a10, a11]]
        };
        FilFMICObject::from_parts(
            self.sigma.clone(),
            vec!["omega".into(), "eta".into()],
            to_rows(a),
            to_rows(phi),
            vec![1, 0],
        )
    }

    /// Depth to which `p dlog q - p dtau - sigma*(dlog q)` vanishes, checking
    /// exponents up to `upto`. This is the scalar form of hat-basis
    /// horizontality.
    pub fn frobenius_identity_depth(&self, upto: i64) -> Result<i64, RegError> {
        let p = self.p as i64;
        let dlq = self.dlog_q_reduced()?;
        let dtau = self
            .tau
            .map_coeffs(self.ring.clone(), |x| EisNum::from_padic(x.clone()))
            .derivative();
        let lhs = dlq.scale_i64(p).sub(&dtau.scale_i64(p));
        let rhs = self.sigma.substitute_form(&dlq)?;
        Ok(lhs.sub(&rhs).zero_to_depth(upto))
    }

    /// Minimum over the entries of `Phi_alg` of the depth to which the
    /// `nu`-component vanishes; the algebraic Frobenius is Galois-stable.
    pub fn algebraic_nu_depth(&self, upto: i64) -> i64 {
        let mut depth = i64::MAX;
        for row in &self.frobenius_algebraic {
            for entry in row {
                let nu_part = entry.map_coeffs(self.zp.clone(), |x| x.b.clone());
                depth = depth.min(nu_part.zero_to_depth(upto.min(entry.trunc())));
            }
        }
        depth
    }

    /// Depth to which `det Phi_alg / p` is the constant series 1.
    pub fn algebraic_det_unit_depth(&self, upto: i64) -> i64 {
        let m = &self.frobenius_algebraic;
        let det = m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]));
        let unit = det.mul_p_pow_all(-1);
        unit.sub(&TSeries::one(self.ring.clone(), unit.trunc()))
            .zero_to_depth(upto.min(unit.trunc()))
    }
}

type FamilyKey = (u64, String, i64, i64);

static FAMILY_CACHE: OnceLock<Mutex<HashMap<FamilyKey, Arc<FamilyData>>>> = OnceLock::new();

/// Cached access to [`FamilyData`], keyed by `(p, c, M, N)`.
pub fn family_data(p: u64, c: &BigRational, m: i64, n: i64) -> Result<Arc<FamilyData>, RegError> {
    let key = (p, c.to_string(), m, n);
    let cache = FAMILY_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let built = Arc::new(FamilyData::new(p, c, m, n)?);
    cache.lock().unwrap().insert(key, built.clone());
    Ok(built)
}
