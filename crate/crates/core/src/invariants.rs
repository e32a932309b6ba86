//! Pfaffian in dimension 4, the quadratic form `q_w` of a 3-form in dimension 6,
//! and the characteristic polynomial of `i_X w`.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_signature, Mat};
use crate::multilinear::{basis_vector, interior, interior_basis, wedge, KForm, Vector};
use crate::scalar::Scalar;
use crate::symplectic::{bot, is_effective, omega};

/// Pf(w) defined by `w ^ w = Pf(w) Omega ^ Omega` for a 2-form on `R^4`.
pub fn pfaffian<S: Scalar>(w: &KForm<S>) -> Result<S> {
    if w.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: w.dim(),
        });
    }
    if w.degree() != 2 {
        return Err(Error::DegreeOutOfRange { degree: w.degree() });
    }
    let ww = wedge(w, w)?.coeff(&[1, 2, 3, 4]);
    let o = omega::<S>(2);
    let oo = wedge(&o, &o)?.coeff(&[1, 2, 3, 4]);
    Ok(ww / oo)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfaffianType {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

pub fn classify_2form_dim4<S: Scalar>(w: &KForm<S>) -> Result<(S, PfaffianType)> {
    let pf = pfaffian(w)?;
    let kind = if pf.negligible(w.max_abs().powi(2)) {
        PfaffianType::Parabolic
    } else if pf.is_positive() {
        PfaffianType::Elliptic
    } else {
        PfaffianType::Hyperbolic
    };
    Ok((pf, kind))
}

/// Symmetric matrix of a quadratic form, `q(X) = X^T Q X`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm<S> {
    pub matrix: Mat<S>,
}

/// Rank, Sylvester signature `(p, m, z)` and determinant of a quadratic form.
#[derive(Clone, Debug, PartialEq)]
pub struct QReport<S> {
    pub rank: usize,
    pub signature: (usize, usize, usize),
    pub det: S,
}

impl<S: Scalar> QuadForm<S> {
    pub fn eval(&self, x: &[S]) -> S {
        crate::linalg::dot(x, &self.matrix.mul_vec(x))
    }

    pub fn polar(&self, x: &[S], y: &[S]) -> S {
        crate::linalg::dot(x, &self.matrix.mul_vec(y))
    }

    pub fn is_zero(&self) -> bool {
        if S::EXACT {
            self.matrix.is_zero()
        } else {
            self.matrix.max_abs() <= crate::scalar::FLOAT_EPS
        }
    }

    pub fn report(&self) -> QReport<S> {
        q_report(self)
    }
}

pub fn q_report<S: Scalar>(q: &QuadForm<S>) -> QReport<S> {
    let signature = symmetric_signature(&q.matrix);
    QReport {
        rank: signature.0 + signature.1,
        signature,
        det: q.matrix.det(),
    }
}

/// `-1/4 bot^2(a ^ b)` for two 2-forms, as a scalar.
fn polar_value<S: Scalar>(a: &KForm<S>, b: &KForm<S>) -> Result<S> {
    let v = bot(&bot(&wedge(a, b)?)?)?.scalar_part();
    Ok(-v / S::from_i64(4))
}

/// `q_w(X) = -1/4 bot^2 (i_X w)^2`, polarized on basis vectors.
pub fn q_form<S: Scalar>(w: &KForm<S>) -> Result<QuadForm<S>> {
    if w.dim() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            found: w.dim(),
        });
    }
    if w.degree() != 3 {
        return Err(Error::DegreeOutOfRange { degree: w.degree() });
    }
    if !is_effective(w)? {
        return Err(Error::NotEffective(bot(w)?.to_string()));
    }
    Ok(q_form_unchecked(w))
}

pub(crate) fn q_form_unchecked<S: Scalar>(w: &KForm<S>) -> QuadForm<S> {
    let contractions: Vec<KForm<S>> = (1..=6).map(|i| interior_basis(i, w)).collect();
    let mut m = Mat::zeros(6, 6);
    for i in 0..6 {
        for j in i..6 {
            let v = polar_value(&contractions[i], &contractions[j]).expect("same shape");
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    QuadForm { matrix: m }
}

/// Cubic `c3 l^3 + c2 l^2 + c1 l + c0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicPoly<S> {
    pub c3: S,
    pub c2: S,
    pub c1: S,
    pub c0: S,
}

impl<S: Scalar> CubicPoly<S> {
    pub fn eval(&self, l: &S) -> S {
        ((self.c3.clone() * l.clone() + self.c2.clone()) * l.clone() + self.c1.clone()) * l.clone()
            + self.c0.clone()
    }
}

/// `P(l) = (i_X w - l Omega)^3 / Omega^3`.
pub fn char_poly<S: Scalar>(w: &KForm<S>, x: &[S]) -> Result<CubicPoly<S>> {
    if w.dim() != 6 || x.len() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            found: w.dim().min(x.len()),
        });
    }
    let top = [1, 2, 3, 4, 5, 6];
    let a = interior(x, w)?;
    let o = omega::<S>(3);
    let a2 = wedge(&a, &a)?;
    let o2 = wedge(&o, &o)?;
    let o3 = wedge(&o2, &o)?.coeff(&top);
    let a3 = wedge(&a2, &a)?.coeff(&top);
    let a2o = wedge(&a2, &o)?.coeff(&top);
    let ao2 = wedge(&a, &o2)?.coeff(&top);
    let three = S::from_i64(3);
    Ok(CubicPoly {
        c3: -S::one(),
        c2: three.clone() * ao2 / o3.clone(),
        c1: -(three * a2o) / o3.clone(),
        c0: a3 / o3,
    })
}

/// Convenience: `q_w` evaluated at a basis vector.
pub fn q_at_basis<S: Scalar>(q: &QuadForm<S>, i: usize) -> S {
    let e: Vector<S> = basis_vector(6, i);
    q.eval(&e)
}
