//! Orbit decision for effective 3-forms on `R^6` and normal-form reductions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::invariants::{classify_2form_dim4, q_form, PfaffianType, QReport, QuadForm};
use crate::linalg::{dot, Mat};
use crate::multilinear::{
    basis_vector, interior, interior_basis, pullback, KForm, Vector,
};
use crate::normal_forms::{det_constant, representative_from_coefficient};
use crate::scalar::Scalar;
use crate::symplectic::{
    bot, is_effective, is_symplectic, j_matrix, omega_pair, recursive_split, symplectic_defect,
    symplectic_inverse, Split,
};
use crate::witness::{solve_conjugacy, SolverOptions};

/// Recovered orbit parameter (`gamma` for family 1, `nu` for families 2 and 3).
/// The parameter is determined by its sixth power; `value` is present when the
/// sixth root is representable in the scalar mode.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitParameter<S> {
    pub sixth_power: S,
    pub value: Option<S>,
    pub approx: f64,
}

impl<S: Scalar> OrbitParameter<S> {
    fn from_sixth_power(p6: S) -> Self {
        let p6 = p6.abs();
        let approx = p6.to_f64().powf(1.0 / 6.0);
        OrbitParameter {
            value: p6.nth_root(6),
            sixth_power: p6,
            approx,
        }
    }

    /// The coefficient that enters the representative: `gamma` for family 1
    /// and `nu^2` for families 2 and 3, as a float.
    pub fn coefficient_f64(&self, family: u8) -> f64 {
        let p6 = self.sixth_power.to_f64();
        if family == 1 {
            p6.powf(1.0 / 6.0)
        } else {
            p6.cbrt()
        }
    }

    /// The representative coefficient in exact form when representable.
    pub fn coefficient(&self, family: u8) -> Option<S> {
        if family == 1 {
            self.value.clone()
        } else {
            self.sixth_power.nth_root(3)
        }
    }
}

/// A symplectic map `F` with `pullback(F, representative) = input`.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness<S> {
    /// Produced by a constructive reduction in the input's scalar mode.
    Constructive(Mat<S>),
    /// Produced in floating point (elliptic chain or numerical search).
    Numerical {
        map: Mat<f64>,
        residual: f64,
        defect: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitLabel<S> {
    pub family: u8,
    pub parameter: Option<OrbitParameter<S>>,
    pub witness: Option<Witness<S>>,
}

/// Classification together with the invariants it was read from.
#[derive(Clone, Debug)]
pub struct Classification<S> {
    pub label: OrbitLabel<S>,
    pub q: QuadForm<S>,
    pub report: QReport<S>,
}

fn check_shape<S: Scalar>(w: &KForm<S>) -> Result<()> {
    if w.dim() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            found: w.dim(),
        });
    }
    if w.degree() != 3 {
        return Err(Error::DegreeOutOfRange { degree: w.degree() });
    }
    Ok(())
}

pub fn classify_full<S: Scalar>(w: &KForm<S>) -> Result<Classification<S>> {
    check_shape(w)?;
    let q = q_form(w)?;
    let report = q.report();
    let family = if w.is_zero() {
        9
    } else {
        match (report.rank, report.signature) {
            (0, _) => 8,
            (1, (1, 0, _)) => 6,
            (1, (0, 1, _)) => 7,
            (3, (2, 1, _)) => 4,
            (3, (0, 3, _)) => 5,
            (6, (3, 3, _)) => 1,
            (6, (4, 2, _)) => 2,
            (6, (0, 6, _)) => 3,
            (rank, signature) => return Err(Error::Unclassifiable { rank, signature }),
        }
    };
    let parameter = det_constant(family).map(|(n, d)| {
        OrbitParameter::from_sixth_power(report.det.clone() / S::from_ratio(n, d))
    });
    Ok(Classification {
        label: OrbitLabel {
            family,
            parameter,
            witness: None,
        },
        q,
        report,
    })
}

/// Orbit of an effective 3-form.
pub fn classify<S: Scalar>(w: &KForm<S>) -> Result<OrbitLabel<S>> {
    classify_full(w).map(|c| c.label)
}

/// Matrix of `X -> i_X w` over the lexicographic blade basis.
fn contraction_matrix<S: Scalar>(w: &KForm<S>) -> Mat<S> {
    let cols: Vec<Vec<S>> = (1..=w.dim()).map(|i| interior_basis(i, w).to_dense()).collect();
    Mat::from_cols(&cols)
}

/// A nonzero `A` with `i_A w = 0`, if one exists.
pub fn find_kernel_vector<S: Scalar>(w: &KForm<S>) -> Option<Vector<S>> {
    contraction_matrix(w).nullspace().into_iter().next()
}

/// Reduction for `q_w = 0`, `w != 0`: a symplectic `F` with
/// `pullback(F, e1*^e2*^e3*) = w`.
pub fn reduce_q_zero<S: Scalar>(w: &KForm<S>) -> Result<Mat<S>> {
    check_shape(w)?;
    if !is_effective(w)? {
        return Err(Error::NotEffective(bot(w)?.to_string()));
    }
    if w.is_zero() {
        return Err(Error::Precondition("form is zero".into()));
    }
    if *w == representative_from_coefficient::<S>(8, None)? {
        return Ok(Mat::identity(6));
    }
    if !q_form(w)?.is_zero() {
        return Err(Error::Precondition("q_w is not zero".into()));
    }
    let scale = w.max_abs();
    let a = find_kernel_vector(w)
        .ok_or_else(|| Error::Precondition("no kernel vector".into()))?;
    let k = (1..=6)
        .find(|&k| !omega_pair(&a, &basis_vector(6, k)).negligible(scale))
        .expect("nonzero vector pairs with some basis vector");
    let s = omega_pair(&a, &basis_vector(6, k));
    let b: Vector<S> = basis_vector::<S>(6, k).into_iter().map(|x| x / s.clone()).collect();
    let split = recursive_split(w, &a, &b)?;
    let (_, kind) = classify_2form_dim4(&split.omega1)?;
    if kind != PfaffianType::Parabolic {
        return Err(Error::Precondition("factor 2-form is not parabolic".into()));
    }
    // omega1 = (1/c) (i_{e_i} omega1) ^ (i_{e_j} omega1) with c = omega1(e_i, e_j).
    let (blade, c) = split
        .omega1
        .terms()
        .max_by(|x, y| {
            x.1.to_f64()
                .abs()
                .partial_cmp(&y.1.to_f64().abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(b, c)| (b, c.clone()))
        .ok_or_else(|| Error::Precondition("factor 2-form vanishes".into()))?;
    let idx = blade.indices();
    let alpha = interior_basis(idx[0], &split.omega1).scale(&(S::one() / c));
    let beta = interior_basis(idx[1], &split.omega1);
    // Back to V: lift from W, then undo the adapted basis.
    let p_inv = symplectic_inverse(&split.basis);
    let lift = |f: &KForm<S>| -> Result<KForm<S>> {
        let mut cov = vec![S::zero(); 6];
        for (b, x) in f.terms() {
            let j = b.indices()[0];
            cov[if j < 3 { j } else { j + 1 }] = x.clone();
        }
        pullback(&p_inv, &KForm::covector(&cov))
    };
    let theta = [
        lift(&alpha)?,
        lift(&beta)?,
        pullback(&p_inv, &KForm::term(6, &[4], S::one())?)?,
    ];
    let rows_t: Vec<Vector<S>> = theta.iter().map(|t| t.to_dense()).collect();
    let j = j_matrix::<S>(3);
    let pair = |x: &[S], y: &[S]| dot(x, &j.mul_vec(y));
    for a in 0..3 {
        for b in a + 1..3 {
            if !pair(&rows_t[a], &rows_t[b]).negligible(scale) {
                return Err(Error::Precondition("factors are not isotropic".into()));
            }
        }
    }
    // Complete to rows r with r_k^T J r_l = J_kl.
    let sys = Mat::from_rows(rows_t.iter().map(|r| j.transpose().mul_vec(r)).collect());
    let mut phis = Vec::new();
    for l in 0..3 {
        let rhs: Vec<S> = (0..3).map(|k| if k == l { S::one() } else { S::zero() }).collect();
        let p = sys
            .solve(&rhs)
            .ok_or_else(|| Error::Precondition("factors are dependent".into()))?;
        phis.push(p);
    }
    let m: Vec<Vec<S>> = (0..3)
        .map(|a| (0..3).map(|b| pair(&phis[a], &phis[b])).collect())
        .collect();
    let half = S::from_ratio(1, 2);
    let phis: Vec<Vector<S>> = (0..3)
        .map(|a| {
            let mut v = phis[a].clone();
            for (k, t) in rows_t.iter().enumerate() {
                let cak = -(m[a][k].clone() * half.clone());
                for (vi, ti) in v.iter_mut().zip(t) {
                    *vi = vi.clone() + cak.clone() * ti.clone();
                }
            }
            v
        })
        .collect();
    let mut rows = rows_t;
    rows.extend(phis);
    let f = Mat::from_rows(rows);
    if !is_symplectic(&f) {
        return Err(Error::NotSymplectic);
    }
    let image = pullback(&f, &KForm::term(6, &[1, 2, 3], S::one())?)?;
    let ok = if S::EXACT {
        image == *w
    } else {
        image.distance(w) <= 1e-9 * scale.max(1.0)
    };
    if !ok {
        return Err(Error::Precondition("reconstruction failed".into()));
    }
    Ok(f)
}

/// Output of [`split_q_nonzero`]: `w = omega1 ^ a + omega2 ^ b` with `q_w(A, B) = 0`.
#[derive(Clone, Debug)]
pub struct QSplit<S> {
    pub a: Vector<S>,
    pub b: Vector<S>,
    pub split: Split<S>,
}

/// Candidate directions for `A`: basis vectors, `e_i +- f_j`, then seeded random vectors.
pub fn a_candidates<S: Scalar>(seed: u64, random: usize) -> Vec<Vector<S>> {
    let mut out: Vec<Vector<S>> = (1..=6).map(|i| basis_vector(6, i)).collect();
    for i in 1..=3 {
        for jj in 4..=6 {
            for sign in [1, -1] {
                let mut v = basis_vector::<S>(6, i);
                v[jj - 1] = S::from_i64(sign);
                out.push(v);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        out.push((0..6).map(|_| S::from_i64(rng.random_range(-3..=3))).collect());
    }
    out
}

/// The split for a chosen `A` with `q_w(A) != 0`.
pub fn split_q_nonzero_at<S: Scalar>(w: &KForm<S>, q: &QuadForm<S>, a: &[S]) -> Result<QSplit<S>> {
    let scale = w.max_abs().powi(2);
    let qa = q.eval(a);
    if qa.negligible(scale) {
        return Err(Error::Precondition("q_w(A) = 0".into()));
    }
    let wa = interior(a, w)?;
    let kernel = contraction_matrix(&wa).nullspace();
    if kernel.len() != 2 {
        return Err(Error::Precondition(format!(
            "ker(i_A w) has dimension {}, expected 2",
            kernel.len()
        )));
    }
    let c = kernel
        .iter()
        .max_by(|x, y| {
            omega_pair(a, x)
                .to_f64()
                .abs()
                .partial_cmp(&omega_pair(a, y).to_f64().abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("two vectors");
    let s = omega_pair(a, c);
    if s.negligible(1.0) {
        return Err(Error::Precondition("ker(i_A w) is isotropic".into()));
    }
    let b0: Vector<S> = c.iter().map(|x| x.clone() / s.clone()).collect();
    let t = -(q.polar(a, &b0) / qa);
    let b: Vector<S> = b0
        .iter()
        .zip(a)
        .map(|(x, y)| x.clone() + t.clone() * y.clone())
        .collect();
    let split = recursive_split(w, a, &b)?;
    Ok(QSplit {
        a: a.to_vec(),
        b,
        split,
    })
}

/// Split along the first candidate `A` with `q_w(A) != 0`.
pub fn split_q_nonzero<S: Scalar>(w: &KForm<S>, seed: u64) -> Result<QSplit<S>> {
    check_shape(w)?;
    let q = q_form(w)?;
    if q.is_zero() {
        return Err(Error::Precondition("q_w = 0".into()));
    }
    let scale = w.max_abs().powi(2);
    let a = a_candidates::<S>(seed, 32)
        .into_iter()
        .find(|a| !q.eval(a).negligible(scale))
        .ok_or_else(|| Error::Precondition("no direction with q_w(A) != 0".into()))?;
    split_q_nonzero_at(w, &q, &a)
}

/// Result of the elliptic/elliptic reduction.
#[derive(Clone, Debug)]
pub struct EllipticReduction {
    pub family: u8,
    /// `nu^2` of the reached normal form.
    pub nu_squared: f64,
    /// `F` with `pullback(F, representative) = input`.
    pub map: Mat<f64>,
    pub residual: f64,
    pub defect: f64,
}

type M4 = [[f64; 4]; 4];

fn form_to_m4(w: &KForm<f64>) -> M4 {
    let mut m = [[0.0; 4]; 4];
    for (b, c) in w.terms() {
        let idx = b.indices();
        m[idx[0] - 1][idx[1] - 1] = *c;
        m[idx[1] - 1][idx[0] - 1] = -*c;
    }
    m
}

fn pf4(m: &M4) -> f64 {
    m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2]
}

fn to_mat(m: &M4) -> Mat<f64> {
    Mat::from_fn(4, 4, |i, j| m[i][j])
}

/// Elliptic/elliptic reduction along one direction `A`; fails with
/// [`Error::CaseMismatch`] when the pair is not elliptic/elliptic.
pub fn reduce_elliptic_elliptic_at(w: &KForm<f64>, q: &QuadForm<f64>, a: &[f64]) -> Result<EllipticReduction> {
    let first = split_q_nonzero_at(w, q, a)?;
    // Swap the roles so that sigma is the nondegenerate component.
    let a2 = first.b.clone();
    let b2: Vector<f64> = first.a.iter().map(|x| -x).collect();
    let split = recursive_split(w, &a2, &b2)?;
    let sigma = form_to_m4(&split.omega1);
    let tau = form_to_m4(&split.omega2);
    let omw: M4 = [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ];
    let ps = pf4(&sigma);
    if ps.abs() <= 1e-12 {
        return Err(Error::CaseMismatch("sigma is degenerate".into()));
    }
    let pt = pf4(&tau) / ps;
    let po = pf4(&omw) / ps;
    if !(pt > 0.0 && po > 0.0) {
        return Err(Error::CaseMismatch(format!(
            "relative Pfaffians ({pt:.3e}, {po:.3e}) are not both positive"
        )));
    }
    let sig = to_mat(&sigma);
    let sig_inv = sig
        .inverse()
        .ok_or_else(|| Error::CaseMismatch("sigma is singular".into()))?;
    // tau(u, v) = sigma(K u, v).
    let k = to_mat(&tau).mul(&sig_inv).transpose();
    let k2 = k.mul(&k);
    let lam = (-k2[(0, 0)]).sqrt();
    if !(lam > 0.0) || k2.add(&Mat::identity(4).scale(&(lam * lam))).max_abs() > 1e-8 * (1.0 + lam * lam) {
        return Err(Error::CaseMismatch("K^2 is not a negative multiple of the identity".into()));
    }
    let a1 = vec![1.0, 0.0, 0.0, 0.0];
    let a2v: Vec<f64> = k.mul_vec(&a1).iter().map(|x| -x / lam).collect();
    let sys = Mat::from_rows(vec![sig.transpose().mul_vec(&a1), sig.transpose().mul_vec(&a2v)]);
    let b1 = sys
        .solve(&[1.0, 0.0])
        .ok_or_else(|| Error::CaseMismatch("cannot complete sigma-basis".into()))?;
    let b2v: Vec<f64> = k.mul_vec(&b1).iter().map(|x| x / lam).collect();
    let mut bs = Mat::from_cols(&[a1, a2v, b1, b2v]);
    let om = to_mat(&omw);
    let pqrs = |bs: &Mat<f64>| {
        let o = bs.transpose().mul(&om).mul(bs);
        (o[(2, 3)], o[(0, 1)], o[(1, 2)], o[(0, 2)])
    };
    let shear_a = |t: f64| {
        let mut m = Mat::identity(4);
        m[(0, 3)] = t;
        m[(1, 2)] = t;
        m
    };
    let shear_b = |t: f64| {
        let mut m = Mat::identity(4);
        m[(0, 2)] = t;
        m[(1, 3)] = -t;
        m
    };
    let (_, q0, r0, _) = pqrs(&bs);
    bs = bs.mul(&shear_b(r0 / q0));
    let (_, q1, _, s1) = pqrs(&bs);
    bs = bs.mul(&shear_a(-s1 / q1));
    let (p2, q2, _, _) = pqrs(&bs);
    if !(-p2 / q2 > 0.0) {
        return Err(Error::CaseMismatch("pq >= 0 after shearing".into()));
    }
    let et = (-p2 / q2).powf(0.25);
    bs = bs.mul(&Mat::diag(&[et, et, 1.0 / et, 1.0 / et]));
    let (mu, _, _, _) = pqrs(&bs);
    let c = |i: usize| bs.col(i);
    let wb = Mat::from_cols(&[
        c(0),
        c(2),
        c(1).iter().map(|x| -x / mu).collect(),
        c(3).iter().map(|x| x / mu).collect(),
    ]);
    let p = &split.basis;
    let pw = Mat::from_cols(&[p.col(1), p.col(2), p.col(4), p.col(5)]);
    let wv = pw.mul(&wb);
    let f = Mat::from_cols(&[p.col(0), wv.col(0), wv.col(1), p.col(3), wv.col(2), wv.col(3)]);
    let image = pullback(&f, w)?;
    let k126 = image.coeff(&[1, 2, 6]);
    let (swap, family) = if k126 > 0.0 { (false, 3u8) } else { (true, 2u8) };
    let perm = if swap {
        let mut m = Mat::zeros(6, 6);
        for (i, pi) in [1usize, 0, 2].into_iter().enumerate() {
            m[(pi, i)] = 1.0;
            m[(pi + 3, i + 3)] = 1.0;
        }
        m
    } else {
        Mat::identity(6)
    };
    let g = f.mul(&perm);
    let image = pullback(&g, w)?;
    let kk = |idx: &[usize]| image.coeff(idx);
    let (s126, s135, s234, s456) = if family == 3 {
        (1.0, -1.0, 1.0, -1.0)
    } else {
        (1.0, 1.0, 1.0, 1.0)
    };
    let u = s126 / kk(&[1, 2, 6]);
    let v = s135 / kk(&[1, 3, 5]);
    let z = s234 / kk(&[2, 3, 4]);
    let (x1s, x2s, x3s) = (u * v, u * z, v * z);
    if !(x1s > 0.0 && x2s > 0.0 && x3s > 0.0) {
        return Err(Error::CaseMismatch("final scaling is not positive".into()));
    }
    let (x1, x2, x3) = (x1s.sqrt(), x2s.sqrt(), x3s.sqrt());
    let nu_squared = s456 * kk(&[4, 5, 6]) / (x1 * x2 * x3);
    if !(nu_squared > 1e-12 * w.max_abs().powi(2)) {
        return Err(Error::CaseMismatch("nu^2 is not positive".into()));
    }
    let total = g.mul(&Mat::diag(&[x1, x2, x3, 1.0 / x1, 1.0 / x2, 1.0 / x3]));
    let map = symplectic_inverse(&total);
    let rep = representative_from_coefficient(family, Some(&nu_squared))?;
    let residual = pullback(&map, &rep)?.distance(w);
    let defect = symplectic_defect(&map);
    if !(residual <= 1e-6 * w.max_abs().max(1.0)) {
        return Err(Error::CaseMismatch(format!("reduction does not verify (residual {residual:.3e})")));
    }
    Ok(EllipticReduction {
        family,
        nu_squared,
        map,
        residual,
        defect,
    })
}

/// Elliptic/elliptic reduction, trying the candidate directions in order.
pub fn reduce_elliptic_elliptic<S: Scalar>(w: &KForm<S>, seed: u64) -> Result<EllipticReduction> {
    check_shape(w)?;
    let wf = w.map(|x| x.to_f64());
    let q = q_form(&wf)?;
    let scale = wf.max_abs().powi(2);
    let mut last = Error::CaseMismatch("no direction with q_w(A) != 0".into());
    for a in a_candidates::<f64>(seed, 32) {
        if q.eval(&a).negligible(scale) {
            continue;
        }
        match reduce_elliptic_elliptic_at(&wf, &q, &a) {
            Ok(r) => return Ok(r),
            Err(e) => last = e,
        }
    }
    Err(match last {
        Error::CaseMismatch(m) => Error::CaseMismatch(m),
        other => Error::CaseMismatch(other.to_string()),
    })
}

/// Label with witness, or the label alone with the reason the witness failed.
#[derive(Clone, Debug)]
pub struct Reduction<S> {
    pub label: OrbitLabel<S>,
    pub failure: Option<String>,
}

/// Classify and attach a witness map.
pub fn reduce<S: Scalar>(w: &KForm<S>, opts: &SolverOptions) -> Result<Reduction<S>> {
    let mut label = classify(w)?;
    let family = label.family;
    match family {
        9 => {
            label.witness = Some(Witness::Constructive(Mat::identity(6)));
            return Ok(Reduction {
                label,
                failure: None,
            });
        }
        8 => {
            let f = reduce_q_zero(w)?;
            label.witness = Some(Witness::Constructive(f));
            return Ok(Reduction {
                label,
                failure: None,
            });
        }
        _ => {}
    }
    let tol = 1e-8 * w.max_abs().max(1.0);
    if family == 2 || family == 3 {
        if let Ok(r) = reduce_elliptic_elliptic(w, opts.seed) {
            let expected = label
                .parameter
                .as_ref()
                .map(|p| p.coefficient_f64(family))
                .unwrap_or(0.0);
            let agrees = r.family == family && (r.nu_squared - expected).abs() <= 1e-6 * expected.max(1.0);
            if agrees && r.residual < tol && r.defect < 1e-10 {
                label.witness = Some(Witness::Numerical {
                    map: r.map,
                    residual: r.residual,
                    defect: r.defect,
                });
                return Ok(Reduction {
                    label,
                    failure: None,
                });
            }
        }
    }
    let coefficient = label.parameter.as_ref().map(|p| p.coefficient_f64(family));
    let rep = representative_from_coefficient::<f64>(family, coefficient.as_ref())?;
    let src = w.map(|x| x.to_f64());
    let result = solve_conjugacy(&src, &rep, opts)?;
    if result.converged {
        label.witness = Some(Witness::Numerical {
            map: result.map,
            residual: result.residual,
            defect: result.defect,
        });
        Ok(Reduction {
            label,
            failure: None,
        })
    } else {
        Ok(Reduction {
            label,
            failure: Some(format!(
                "witness search did not converge (best residual {:.3e})",
                result.residual
            )),
        })
    }
}

