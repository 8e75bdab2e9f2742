//! Filtered Frobenius modules with connection over a one-parameter base.
//!
//! An object carries a connection matrix, a Frobenius matrix, and filtration
//! jumps for a chosen basis. The two structure matrices are tied together by
//! a horizontality identity, and the filtration by Griffiths transversality;
//! both are checkable to a certified (p-adic, t-adic) depth, which is what
//! the audit layer consumes.

use crate::err::RegError;
use crate::ring::PadicLike;
use crate::series::{FrobeniusSpec, TSeries};
use crate::special::{log_sigma, polylog_series};

/// Module data over the base ring of truncated series: for basis (e_j),
/// `nabla(e_j) = sum_i conn[i][j] dt (x) e_i` and
/// `frob(e_j) = sum_i frob[i][j] e_i`.
/// `jumps[i]` is the largest filtration step containing `e_i`.
#[derive(Clone)]
pub struct FilFMICObject<R: PadicLike> {
    sigma: FrobeniusSpec<R>,
    basis: Vec<String>,
    conn: Vec<Vec<TSeries<R>>>,
    frob: Vec<Vec<TSeries<R>>>,
    jumps: Vec<i64>,
}

fn mat_mul<R: PadicLike>(a: &[Vec<TSeries<R>>], b: &[Vec<TSeries<R>>]) -> Vec<Vec<TSeries<R>>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = a[i][0].mul(&b[0][j]);
                    for l in 1..k {
                        acc = acc.add(&a[i][l].mul(&b[l][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

impl<R: PadicLike> FilFMICObject<R> {
    /// Assemble an object from raw matrices (column convention as above).
    pub fn from_parts(
        sigma: FrobeniusSpec<R>,
        basis: Vec<String>,
        conn: Vec<Vec<TSeries<R>>>,
        frob: Vec<Vec<TSeries<R>>>,
        jumps: Vec<i64>,
    ) -> Result<Self, RegError> {
        let n = basis.len();
        if n == 0 {
            return Err(RegError::BadConfig("empty basis".into()));
        }
        for m in [&conn, &frob] {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(RegError::BadConfig("structure matrix shape mismatch".into()));
            }
        }
        if jumps.len() != n {
            return Err(RegError::BadConfig("one filtration jump per basis element".into()));
        }
        Ok(FilFMICObject { sigma, basis, conn, frob, jumps })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn sigma(&self) -> &FrobeniusSpec<R> {
        &self.sigma
    }

    pub fn conn(&self) -> &[Vec<TSeries<R>>] {
        &self.conn
    }

    pub fn frob(&self) -> &[Vec<TSeries<R>>] {
        &self.frob
    }

    pub fn jumps(&self) -> &[i64] {
        &self.jumps
    }

    /// The horizontality defect d(Phi) + A Phi - Phi sigma*(A), as a matrix
    /// of series (coefficients of dt).
    pub fn residual(&self) -> Result<Vec<Vec<TSeries<R>>>, RegError> {
        let n = self.rank();
        let mut pulled = Vec::with_capacity(n);
        for row in &self.conn {
            let mut out = Vec::with_capacity(n);
            for entry in row {
                out.push(self.sigma.substitute_form(entry)?);
            }
            pulled.push(out);
        }
        let a_phi = mat_mul(&self.conn, &self.frob);
        let phi_sa = mat_mul(&self.frob, &pulled);
        let mut res = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(self.frob[i][j].derivative().add(&a_phi[i][j]).sub(&phi_sa[i][j]));
            }
            res.push(row);
        }
        Ok(res)
    }

    /// Largest k such that the horizontality defect vanishes mod p^k on all
    /// exponents < `upto`. Errors if any entry is not certified out to `upto`.
    pub fn horizontality_depth(&self, upto: i64) -> Result<i64, RegError> {
        let res = self.residual()?;
        let mut depth = i64::MAX;
        for row in &res {
            for entry in row {
                if entry.trunc() < upto {
                    return Err(RegError::PrecisionExhausted(format!(
                        "horizontality certified only to t^{}, wanted t^{}",
                        entry.trunc(),
                        upto
                    )));
                }
                depth = depth.min(entry.zero_to_depth(upto));
            }
        }
        Ok(depth)
    }

    /// Griffiths transversality on the chosen basis: a nonzero connection
    /// entry from level n_j may land at worst one filtration step down.
    pub fn check_transversality(&self) -> Result<(), RegError> {
        for (i, row) in self.conn.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                if !entry.is_zero_series() && self.jumps[i] < self.jumps[j] - 1 {
                    return Err(RegError::AuditFailure(format!(
                        "connection moves {} (level {}) to {} (level {})",
                        self.basis[j], self.jumps[j], self.basis[i], self.jumps[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Tensor product: Frobenii multiply, connections add, jumps add.
    pub fn tensor(&self, other: &Self) -> Result<Self, RegError> {
        let ring = self.sigma.ring();
        if !ring.eq_mod(self.sigma.c(), other.sigma.c(), ring.cap()) {
            return Err(RegError::BadConfig("tensor factors over different Frobenii".into()));
        }
        let (ra, rb) = (self.rank(), other.rank());
        let n = ra * rb;
        let trunc_a = self.frob[0][0].trunc();
        let trunc_b = other.frob[0][0].trunc();
        let trunc = trunc_a.min(trunc_b);
        let zero = TSeries::zero(ring.clone(), trunc);
        let mut basis = Vec::with_capacity(n);
        let mut jumps = Vec::with_capacity(n);
        for i in 0..ra {
            for k in 0..rb {
                basis.push(format!("{}*{}", self.basis[i], other.basis[k]));
                jumps.push(self.jumps[i] + other.jumps[k]);
            }
        }
        let mut frob = vec![vec![zero.clone(); n]; n];
        let mut conn = vec![vec![zero.clone(); n]; n];
        for i in 0..ra {
            for k in 0..rb {
                for i2 in 0..ra {
                    for k2 in 0..rb {
                        let (r, c) = (i * rb + k, i2 * rb + k2);
                        frob[r][c] = self.frob[i][i2].mul(&other.frob[k][k2]);
                        if k == k2 {
                            conn[r][c] = conn[r][c].add(&self.conn[i][i2]);
                        }
                        if i == i2 {
                            conn[r][c] = conn[r][c].add(&other.conn[k][k2]);
                        }
                    }
                }
            }
        }
        FilFMICObject::from_parts(self.sigma.clone(), basis, conn, frob, jumps)
    }

    /// Twist by the r-th power of the cyclotomic object: Frobenius scales by
    /// p^{-r}, every jump drops by r, connection unchanged.
    pub fn twist(&self, r: i64) -> Self {
        FilFMICObject {
            sigma: self.sigma.clone(),
            basis: self.basis.clone(),
            conn: self.conn.clone(),
            frob: self
                .frob
                .iter()
                .map(|row| row.iter().map(|e| e.mul_p_pow_all(-r)).collect())
                .collect(),
            jumps: self.jumps.iter().map(|n| n - r).collect(),
        }
    }
}

/// Rank-one cyclotomic object: Frobenius p^{-r}, flat connection, jump -r.
pub fn make_tate<R: PadicLike>(sigma: &FrobeniusSpec<R>, r: i64, trunc: i64) -> FilFMICObject<R> {
    let ring = sigma.ring().clone();
    let phi = TSeries::monomial(ring.clone(), ring.mul_p_pow(&ring.one(), -r), 0, trunc);
    FilFMICObject {
        sigma: sigma.clone(),
        basis: vec!["e".into()],
        conn: vec![vec![TSeries::zero(ring, trunc)]],
        frob: vec![vec![phi]],
        jumps: vec![-r],
    }
}

/// Rank-two extension attached to an invertible function f: the Frobenius
/// sends e0 to e0 - log_sigma(f) e-2, and the connection sends e0 to
/// dlog(f) (x) e-2.
pub fn make_log<R: PadicLike>(
    sigma: &FrobeniusSpec<R>,
    f: &TSeries<R>,
) -> Result<FilFMICObject<R>, RegError> {
    let ring = sigma.ring().clone();
    let ls = log_sigma(f, sigma)?;
    let (_, dlog) = f.log_deriv()?;
    let trunc = ls.trunc().min(dlog.trunc());
    let zero = TSeries::zero(ring.clone(), trunc);
    let one = TSeries::one(ring.clone(), trunc);
    let pinv = TSeries::monomial(ring.clone(), ring.mul_p_pow(&ring.one(), -1), 0, trunc);
    FilFMICObject::from_parts(
        sigma.clone(),
        vec!["e0".into(), "e-2".into()],
        vec![vec![zero.clone(), zero.clone()], vec![dlog.truncate_to(trunc), zero.clone()]],
        vec![vec![one, zero], vec![ls.truncate_to(trunc).neg(), pinv]],
        vec![0, -1],
    )
}

/// The rank n+1 polylogarithm object in the coordinate T of the base, for
/// the Frobenius with sigma(T) = T^p (c = 1 is required). Basis
/// e0, e-2, ..., e-2n; the Frobenius column of e0 carries the
/// polylogarithm series, the rest is diagonal p^{-j}, and the connection is
/// the standard two-step ladder with e-2n-2 read as zero.
pub fn make_polylog<R: PadicLike>(
    sigma: &FrobeniusSpec<R>,
    n: usize,
    trunc: i64,
) -> Result<FilFMICObject<R>, RegError> {
    let ring = sigma.ring().clone();
    if !ring.eq_mod(sigma.c(), &ring.one(), ring.cap()) {
        return Err(RegError::BadConfig(
            "polylog object needs the Frobenius with sigma(T) = T^p".into(),
        ));
    }
    if n == 0 {
        return Err(RegError::BadConfig("polylog object needs n >= 1".into()));
    }
    let p = ring.prime();
    let rank = n + 1;
    let zero = TSeries::zero(ring.clone(), trunc);
    let mut conn = vec![vec![zero.clone(); rank]; rank];
    let mut frob = vec![vec![zero.clone(); rank]; rank];
    // 1/(T-1) = -1/(1-T) is a unit series; 1/T is the monomial pole
    let t = TSeries::var(ring.clone(), trunc);
    let tm1 = t.sub(&TSeries::one(ring.clone(), trunc));
    conn[1][0] = tm1.inv()?;
    for j in 1..n {
        conn[j + 1][j] = TSeries::monomial(ring.clone(), ring.one(), -1, trunc);
    }
    frob[0][0] = TSeries::one(ring.clone(), trunc);
    for j in 1..=n {
        let lnj = polylog_series(&ring, p, j as i64, trunc)?;
        frob[j][0] = if j % 2 == 0 { lnj.neg() } else { lnj };
        frob[j][j] = TSeries::monomial(
            ring.clone(),
            ring.mul_p_pow(&ring.one(), -(j as i64)),
            0,
            trunc,
        );
    }
    let basis = (0..rank).map(|j| format!("e{}", -2 * (j as i64))).collect();
    let jumps = (0..rank).map(|j| -(j as i64)).collect();
    FilFMICObject::from_parts(sigma.clone(), basis, conn, frob, jumps)
}

/// Rank 2g object attached to a symmetric matrix of invertible functions:
/// nabla(e_i) = sum_j dlog(q_ij) (x) f_j, Phi(e_i) = e_i - sum_j
/// log_sigma(q_ij) f_j, Phi(f_j) = p^{-1} f_j; the f-block is flat.
pub fn make_log_matrix<R: PadicLike>(
    sigma: &FrobeniusSpec<R>,
    q: &[Vec<TSeries<R>>],
) -> Result<FilFMICObject<R>, RegError> {
    let g = q.len();
    if g == 0 || q.iter().any(|row| row.len() != g) {
        return Err(RegError::BadConfig("square matrix of functions required".into()));
    }
    let ring = sigma.ring().clone();
    for i in 0..g {
        for j in 0..i {
            if !q[i][j].eq_mod(&q[j][i], ring.cap(), q[i][j].trunc().min(q[j][i].trunc())) {
                return Err(RegError::BadConfig("matrix of functions must be symmetric".into()));
            }
        }
    }
    let mut dlogs = Vec::with_capacity(g);
    let mut logs = Vec::with_capacity(g);
    let mut trunc = i64::MAX;
    for i in 0..g {
        let mut drow = Vec::with_capacity(g);
        let mut lrow = Vec::with_capacity(g);
        for j in 0..g {
            let (_, dlog) = q[i][j].log_deriv()?;
            let ls = log_sigma(&q[i][j], sigma)?;
            trunc = trunc.min(dlog.trunc()).min(ls.trunc());
            drow.push(dlog);
            lrow.push(ls);
        }
        dlogs.push(drow);
        logs.push(lrow);
    }
    let rank = 2 * g;
    let zero = TSeries::zero(ring.clone(), trunc);
    let mut conn = vec![vec![zero.clone(); rank]; rank];
    let mut frob = vec![vec![zero.clone(); rank]; rank];
    for i in 0..g {
        frob[i][i] = TSeries::one(ring.clone(), trunc);
        frob[g + i][g + i] =
            TSeries::monomial(ring.clone(), ring.mul_p_pow(&ring.one(), -1), 0, trunc);
        for j in 0..g {
            conn[g + j][i] = dlogs[i][j].truncate_to(trunc);
            frob[g + j][i] = logs[i][j].truncate_to(trunc).neg();
        }
    }
    let mut basis: Vec<String> = (1..=g).map(|i| format!("e{}", i)).collect();
    basis.extend((1..=g).map(|i| format!("f{}", i)));
    let mut jumps = vec![0i64; g];
    jumps.extend(vec![-1i64; g]);
    FilFMICObject::from_parts(sigma.clone(), basis, conn, frob, jumps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{EisRing, PadicRing, Ring};

    fn sig_c1(p: u64, prec: i64) -> FrobeniusSpec<PadicRing> {
        let ring = PadicRing::new(p, prec);
        FrobeniusSpec::new(ring.clone(), ring.one()).unwrap()
    }

    #[test]
    fn tate_objects_are_horizontal_and_transversal() {
        let sig = sig_c1(5, 8);
        for r in -2..=2 {
            let obj = make_tate(&sig, r, 20);
            let depth = obj.horizontality_depth(18).unwrap();
            assert!(depth >= crate::padic::PREC_EXACT, "depth {}", depth);
            obj.check_transversality().unwrap();
            assert_eq!(obj.jumps(), &[-r]);
        }
    }

    #[test]
    fn log_object_is_horizontal() {
        let sig = sig_c1(7, 8);
        let ring = sig.ring().clone();
        let m = 40;
        let one = TSeries::one(ring.clone(), m);
        let t = TSeries::var(ring.clone(), m);
        // a unit with nontrivial tail and a monomial-headed function
        for f in [
            one.add(&t.scale_i64(3)).add(&t.pow_i64(2).unwrap().scale_i64(7)),
            t.mul(&one.sub(&t)),
        ] {
            let obj = make_log(&sig, &f).unwrap();
            let depth = obj.horizontality_depth(30).unwrap();
            assert!(depth >= 6, "depth {}", depth);
            obj.check_transversality().unwrap();
        }
    }

    #[test]
    fn log_object_ignores_sign_of_function() {
        let sig = sig_c1(5, 8);
        let ring = sig.ring().clone();
        let m = 24;
        let f = TSeries::one(ring.clone(), m).add(&TSeries::var(ring.clone(), m).scale_i64(2));
        let a = make_log(&sig, &f).unwrap();
        let b = make_log(&sig, &f.neg()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(a.frob()[i][j].eq_mod(&b.frob()[i][j], 7, 20));
                assert!(a.conn()[i][j].eq_mod(&b.conn()[i][j], 7, 20));
            }
        }
    }

    #[test]
    fn polylog_object_is_horizontal_and_matches_log_at_depth_one() {
        let sig = sig_c1(7, 8);
        let ring = sig.ring().clone();
        let m = 40;
        for n in 1..=3usize {
            let obj = make_polylog(&sig, n, m).unwrap();
            let depth = obj.horizontality_depth(m - 2).unwrap();
            assert!(depth >= 6, "n={} depth {}", n, depth);
            obj.check_transversality().unwrap();
        }
        // depth one agrees with the log object of 1 - T
        let pol1 = make_polylog(&sig, 1, m).unwrap();
        let f = TSeries::one(ring.clone(), m).sub(&TSeries::var(ring.clone(), m));
        let log1mt = make_log(&sig, &f).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    pol1.frob()[i][j].eq_mod(&log1mt.frob()[i][j], 7, 30),
                    "frob {} {}",
                    i,
                    j
                );
                assert!(pol1.conn()[i][j].eq_mod(&log1mt.conn()[i][j], 7, 30));
            }
        }
    }

    #[test]
    fn published_offdiagonal_variant_is_not_horizontal() {
        // the same object with Phi(e-2j) = p^{-j} e0 instead of the diagonal
        let sig = sig_c1(7, 8);
        let good = make_polylog(&sig, 2, 30).unwrap();
        let ring = sig.ring().clone();
        let mut frob = good.frob().to_vec();
        for j in 1..3 {
            frob[0][j] = frob[j][j].clone();
            frob[j][j] = TSeries::zero(ring.clone(), frob[0][j].trunc());
        }
        let alt = FilFMICObject::from_parts(
            sig.clone(),
            good.basis().to_vec(),
            good.conn().to_vec(),
            frob,
            good.jumps().to_vec(),
        )
        .unwrap();
        let depth = alt.horizontality_depth(28).unwrap();
        assert!(depth <= 0, "variant unexpectedly horizontal to depth {}", depth);
    }

    #[test]
    fn log_matrix_object_is_horizontal_over_eisenstein_ring() {
        let ring = EisRing::new(7, 8);
        let c = ring.from_i64(8);
        let sig = FrobeniusSpec::new(ring.clone(), c).unwrap();
        let m = 36;
        let one = TSeries::one(ring.clone(), m);
        let t = TSeries::var(ring.clone(), m);
        let q11 = t.mul(&one.add(&t.scale_i64(2)));
        let q12 = one.sub(&t.scale_i64(3));
        let q22 = one.add(&t.pow_i64(2).unwrap().scale_i64(5));
        let q = vec![vec![q11, q12.clone()], vec![q12, q22]];
        let obj = make_log_matrix(&sig, &q).unwrap();
        assert_eq!(obj.rank(), 4);
        let depth = obj.horizontality_depth(28).unwrap();
        assert!(depth >= 6, "depth {}", depth);
        obj.check_transversality().unwrap();
    }

    #[test]
    fn log_matrix_rejects_asymmetric_input() {
        let sig = sig_c1(5, 6);
        let ring = sig.ring().clone();
        let m = 12;
        let one = TSeries::one(ring.clone(), m);
        let t = TSeries::var(ring.clone(), m);
        let q = vec![
            vec![one.clone(), one.add(&t)],
            vec![one.sub(&t), one.clone()],
        ];
        assert!(make_log_matrix(&sig, &q).is_err());
    }

    #[test]
    fn twist_agrees_with_tensoring_by_tate() {
        let sig = sig_c1(5, 8);
        let ring = sig.ring().clone();
        let m = 24;
        let f = TSeries::one(ring.clone(), m).add(&TSeries::var(ring.clone(), m).scale_i64(4));
        let log = make_log(&sig, &f).unwrap();
        let tate = make_tate(&sig, 1, log.frob()[0][0].trunc());
        let a = log.twist(1);
        let b = log.tensor(&tate).unwrap();
        assert_eq!(a.jumps(), b.jumps());
        for i in 0..2 {
            for j in 0..2 {
                assert!(a.frob()[i][j].eq_mod(&b.frob()[i][j], 6, 20));
                assert!(a.conn()[i][j].eq_mod(&b.conn()[i][j], 6, 20));
            }
        }
        let depth = a.horizontality_depth(20).unwrap();
        assert!(depth >= 6);
    }

    #[test]
    fn tensor_preserves_horizontality() {
        let sig = sig_c1(5, 8);
        let ring = sig.ring().clone();
        let m = 30;
        let one = TSeries::one(ring.clone(), m);
        let t = TSeries::var(ring.clone(), m);
        let a = make_log(&sig, &one.add(&t.scale_i64(5))).unwrap();
        let b = make_log(&sig, &one.sub(&t)).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.rank(), 4);
        let depth = ab.horizontality_depth(20).unwrap();
        assert!(depth >= 5, "depth {}", depth);
        ab.check_transversality().unwrap();
    }

    #[test]
    fn transversality_flags_bad_jumps() {
        let sig = sig_c1(5, 8);
        let ring = sig.ring().clone();
        let m = 16;
        let f = TSeries::one(ring.clone(), m).add(&TSeries::var(ring.clone(), m));
        let log = make_log(&sig, &f).unwrap();
        let bad = FilFMICObject::from_parts(
            sig.clone(),
            log.basis().to_vec(),
            log.conn().to_vec(),
            log.frob().to_vec(),
            vec![2, 0],
        )
        .unwrap();
        assert!(bad.check_transversality().is_err());
    }

    #[test]
    fn corruption_is_detected() {
        // bumping one Frobenius entry by p^6 must show up at depth 6
        let sig = sig_c1(7, 10);
        let ring = sig.ring().clone();
        let m = 30;
        let f = TSeries::one(ring.clone(), m).sub(&TSeries::var(ring.clone(), m));
        let log = make_log(&sig, &f).unwrap();
        let mut frob = log.frob().to_vec();
        let bump = TSeries::monomial(ring.clone(), ring.mul_p_pow(&ring.one(), 6), 2, frob[1][0].trunc());
        frob[1][0] = frob[1][0].add(&bump);
        let bad = FilFMICObject::from_parts(
            sig.clone(),
            log.basis().to_vec(),
            log.conn().to_vec(),
            frob,
            log.jumps().to_vec(),
        )
        .unwrap();
        let good_depth = log.horizontality_depth(24).unwrap();
        let bad_depth = bad.horizontality_depth(24).unwrap();
        assert!(good_depth >= 8, "good {}", good_depth);
        assert!(bad_depth <= 6, "bad {}", bad_depth);
    }
}
