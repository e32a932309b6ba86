//! The standard symplectic structure on `R^{2n}` and the operators built on it.

use crate::error::{Error, Result};
use crate::linalg::{axpy, Mat};
use crate::multilinear::{
    basis_vector, blades, interior, interior_basis, pullback, wedge, Blade, KForm, LinearMap,
    Vector,
};
use crate::scalar::Scalar;

/// Half-dimension of a form's ambient space.
pub fn half_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: dim + dim % 2,
            found: dim,
        });
    }
    Ok(dim / 2)
}

/// `Omega = sum_i e_i* ^ f_i*`.
pub fn omega<S: Scalar>(n: usize) -> KForm<S> {
    let mut w = KForm::zero(2 * n, 2);
    for i in 1..=n {
        w.add_term(Blade::from_sorted(&[i, n + i]), S::one());
    }
    w
}

/// Matrix of `Omega`: `Omega(x, y) = x^T J y`.
pub fn j_matrix<S: Scalar>(n: usize) -> Mat<S> {
    Mat::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            S::one()
        } else if i == j + n {
            -S::one()
        } else {
            S::zero()
        }
    })
}

pub fn omega_pair<S: Scalar>(x: &[S], y: &[S]) -> S {
    let n = x.len() / 2;
    let mut acc = S::zero();
    for i in 0..n {
        acc = acc + x[i].clone() * y[n + i].clone() - x[n + i].clone() * y[i].clone();
    }
    acc
}

/// `Gamma(X) = i_X Omega`, so `Gamma(e_i) = f_i*` and `Gamma(f_i) = -e_i*`.
pub fn gamma<S: Scalar>(x: &[S]) -> Result<KForm<S>> {
    let n = half_dim(x.len())?;
    interior(x, &omega(n))
}

pub fn gamma_inv<S: Scalar>(a: &KForm<S>) -> Result<Vector<S>> {
    if a.degree() != 1 {
        return Err(Error::DegreeOutOfRange { degree: a.degree() });
    }
    let n = half_dim(a.dim())?;
    let c = a.to_dense();
    let mut x = vec![S::zero(); 2 * n];
    for i in 0..n {
        x[i] = c[n + i].clone();
        x[n + i] = -c[i].clone();
    }
    Ok(x)
}

/// `top(w) = w ^ Omega`.
pub fn top<S: Scalar>(w: &KForm<S>) -> Result<KForm<S>> {
    let n = half_dim(w.dim())?;
    wedge(w, &omega(n))
}

/// `bot(w) = i_{X_Omega} w = sum_i i_{f_i} i_{e_i} w`. Degrees below 2 give zero.
pub fn bot<S: Scalar>(w: &KForm<S>) -> Result<KForm<S>> {
    let n = half_dim(w.dim())?;
    if w.degree() < 2 {
        return Ok(KForm::zero(w.dim(), 0));
    }
    let mut out = KForm::zero(w.dim(), w.degree() - 2);
    for i in 1..=n {
        out = out.add(&interior_basis(n + i, &interior_basis(i, w)))?;
    }
    Ok(out)
}

/// `[bot, top] w = bot(top w) - top(bot w)`.
pub fn bot_top_commutator<S: Scalar>(w: &KForm<S>) -> Result<KForm<S>> {
    let bt = bot(&top(w)?)?;
    if w.degree() < 2 {
        return Ok(bt);
    }
    bt.sub(&top(&bot(w)?)?)
}

pub fn is_effective<S: Scalar>(w: &KForm<S>) -> Result<bool> {
    let n = half_dim(w.dim())?;
    let b = bot(w)?;
    let eff = if S::EXACT {
        b.is_zero()
    } else {
        b.max_abs() <= crate::scalar::FLOAT_EPS * w.max_abs().max(1.0)
    };
    if w.degree() == n && S::EXACT {
        debug_assert_eq!(eff, top(w)?.is_zero());
    }
    Ok(eff)
}

/// Matrix of `bot` from degree `k` to `k-2` over the lexicographic blade bases.
pub fn bot_matrix<S: Scalar>(dim: usize, k: usize) -> Result<Mat<S>> {
    let src = blades(dim, k);
    let dst = blades(dim, k.saturating_sub(2));
    let mut m = Mat::zeros(dst.len(), src.len());
    for (c, b) in src.iter().enumerate() {
        let mut w = KForm::<S>::zero(dim, k);
        w.add_term(*b, S::one());
        let image = bot(&w)?;
        for (r, d) in dst.iter().enumerate() {
            m[(r, c)] = image.coeff_blade(*d);
        }
    }
    Ok(m)
}

/// Hodge–Lepage components `w = sum_i top^i(w_i)` with each `w_i` effective.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveDecomposition<S> {
    pub components: Vec<KForm<S>>,
}

impl<S: Scalar> EffectiveDecomposition<S> {
    pub fn reassemble(&self) -> Result<KForm<S>> {
        let first = &self.components[0];
        let mut total = first.clone();
        for (i, c) in self.components.iter().enumerate().skip(1) {
            let mut t = c.clone();
            for _ in 0..i {
                t = top(&t)?;
            }
            total = total.add(&t)?;
        }
        Ok(total)
    }
}

/// Decompose a form of degree `k <= n` into effective components.
pub fn effective_decompose<S: Scalar>(w: &KForm<S>) -> Result<EffectiveDecomposition<S>> {
    let dim = w.dim();
    let n = half_dim(dim)?;
    let k = w.degree();
    if k > n {
        return Err(Error::DegreeOutOfRange { degree: k });
    }
    let parts = k / 2 + 1;
    let spaces: Vec<Vec<Blade>> = (0..parts).map(|i| blades(dim, k - 2 * i)).collect();
    let offsets: Vec<usize> = spaces
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.len();
            Some(o)
        })
        .collect();
    let unknowns: usize = spaces.iter().map(Vec::len).sum();
    let target = blades(dim, k);
    let mut rows: Vec<Vec<S>> = Vec::new();
    let mut rhs: Vec<S> = Vec::new();

    // Reassembly equations.
    let mut reassembly = vec![vec![S::zero(); unknowns]; target.len()];
    for (i, space) in spaces.iter().enumerate() {
        for (c, b) in space.iter().enumerate() {
            let mut t = KForm::<S>::zero(dim, k - 2 * i);
            t.add_term(*b, S::one());
            for _ in 0..i {
                t = top(&t)?;
            }
            for (r, tb) in target.iter().enumerate() {
                reassembly[r][offsets[i] + c] = t.coeff_blade(*tb);
            }
        }
    }
    for (r, tb) in target.iter().enumerate() {
        rows.push(reassembly[r].clone());
        rhs.push(w.coeff_blade(*tb));
    }
    // Effectiveness of each component.
    for (i, space) in spaces.iter().enumerate() {
        let deg = k - 2 * i;
        if deg < 2 {
            continue;
        }
        let m = bot_matrix::<S>(dim, deg)?;
        for r in 0..m.rows() {
            let mut row = vec![S::zero(); unknowns];
            for c in 0..space.len() {
                row[offsets[i] + c] = m[(r, c)].clone();
            }
            rows.push(row);
            rhs.push(S::zero());
        }
    }
    let sys = Mat::from_rows(rows);
    let x = sys
        .solve(&rhs)
        .ok_or_else(|| Error::Precondition("decomposition system is inconsistent".into()))?;
    let components = spaces
        .iter()
        .enumerate()
        .map(|(i, s)| KForm::from_dense(dim, k - 2 * i, &x[offsets[i]..offsets[i] + s.len()]))
        .collect();
    Ok(EffectiveDecomposition { components })
}

/// Project `x` onto the skew-orthogonal complement of a pair with `Omega(u, v) = 1`.
fn project_out<S: Scalar>(x: &[S], u: &[S], v: &[S]) -> Vector<S> {
    let xv = omega_pair(x, v);
    let xu = omega_pair(x, u);
    let t = axpy(&-xv, u, x);
    axpy(&xu, v, &t)
}

/// Complete `(A, B)` with `Omega(A, B) = 1` to a symplectic basis
/// `[A, u_1.., B, v_1..]` (as matrix columns) by symplectic Gram–Schmidt.
pub fn adapted_basis<S: Scalar>(a: &[S], b: &[S]) -> Result<LinearMap<S>> {
    let dim = a.len();
    let n = half_dim(dim)?;
    let scale = a
        .iter()
        .chain(b)
        .map(|x| x.to_f64().abs())
        .fold(1.0, f64::max);
    let mut pool: Vec<Vector<S>> = (1..=dim)
        .map(|i| project_out(&basis_vector(dim, i), a, b))
        .collect();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    while us.len() + 1 < n {
        let nonzero = |v: &Vector<S>| v.iter().any(|x| !x.negligible(scale));
        let pos = pool
            .iter()
            .position(|u| nonzero(u) && pool.iter().any(|v| !omega_pair(u, v).negligible(scale)))
            .ok_or_else(|| Error::Precondition("complement is degenerate".into()))?;
        let u = pool.remove(pos);
        let (k, _) = pool
            .iter()
            .enumerate()
            .filter(|(_, v)| !omega_pair(&u, v).negligible(scale))
            .max_by(|x, y| {
                omega_pair(&u, x.1)
                    .to_f64()
                    .abs()
                    .partial_cmp(&omega_pair(&u, y.1).to_f64().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("checked above");
        let v = pool.remove(k);
        let v: Vector<S> = {
            let c = S::one() / omega_pair(&u, &v);
            v.iter().map(|x| x.clone() * c.clone()).collect()
        };
        pool = pool.iter().map(|x| project_out(x, &u, &v)).collect();
        us.push(u);
        vs.push(v);
    }
    let mut cols = vec![a.to_vec()];
    cols.extend(us);
    cols.push(b.to_vec());
    cols.extend(vs);
    Ok(Mat::from_cols(&cols))
}

/// Symplectic defect `max |F^T J F - J|`.
pub fn symplectic_defect<S: Scalar>(f: &Mat<S>) -> f64 {
    let n = f.rows() / 2;
    let j = j_matrix::<S>(n);
    f.transpose().mul(&j).mul(f).sub(&j).max_abs()
}

pub fn is_symplectic<S: Scalar>(f: &Mat<S>) -> bool {
    if !f.is_square() || !f.rows().is_multiple_of(2) {
        return false;
    }
    let n = f.rows() / 2;
    let j = j_matrix::<S>(n);
    let d = f.transpose().mul(&j).mul(f).sub(&j);
    if S::EXACT {
        d.is_zero()
    } else {
        d.max_abs() <= 1e-10
    }
}

/// Inverse of a symplectic matrix, `F^{-1} = -J F^T J`.
pub fn symplectic_inverse<S: Scalar>(f: &Mat<S>) -> Mat<S> {
    let n = f.rows() / 2;
    let j = j_matrix::<S>(n);
    j.mul(&f.transpose()).mul(&j).scale(&-S::one())
}

/// Components of the splitting relative to a pair `(A, B)` with `Omega(A, B) = 1`:
/// `w = w0 ^ (a ^ b - Omega') + w1 ^ a + w2 ^ b`, `a = Gamma(A)`, `b = Gamma(B)`.
/// The three forms live on `W` in the symplectic coordinates given by the
/// middle columns of `basis`.
#[derive(Clone, Debug)]
pub struct Split<S> {
    pub basis: LinearMap<S>,
    pub omega0: KForm<S>,
    pub omega1: KForm<S>,
    pub omega2: KForm<S>,
}

impl<S: Scalar> Split<S> {
    /// Rebuild the original form from the components.
    pub fn reassemble(&self) -> Result<KForm<S>> {
        let dim = self.basis.rows();
        let n = dim / 2;
        let lift = |w: &KForm<S>| lift_from_w(w, n);
        let a = KForm::term(dim, &[n + 1], S::one())?;
        let b = KForm::term(dim, &[1], -S::one())?;
        let omega_w = lift(&omega::<S>(n - 1));
        let ab = wedge(&a, &b)?.sub(&omega_w)?;
        let w0 = wedge(&lift(&self.omega0), &ab)?;
        let w1 = wedge(&lift(&self.omega1), &a)?;
        let w2 = wedge(&lift(&self.omega2), &b)?;
        let in_basis = w0.add(&w1)?.add(&w2)?;
        pullback(&symplectic_inverse(&self.basis), &in_basis)
    }
}

/// Index of the `W` coordinate `j` (1-based on `R^{2n-2}`) inside `R^{2n}`.
fn w_index(j: usize, n: usize) -> usize {
    if j < n {
        j + 1
    } else {
        j + 2
    }
}

fn lift_from_w<S: Scalar>(w: &KForm<S>, n: usize) -> KForm<S> {
    let mut out = KForm::zero(2 * n, w.degree());
    for (b, c) in w.terms() {
        let idx: Vec<usize> = b.indices().into_iter().map(|j| w_index(j, n)).collect();
        out.add_term(Blade::from_sorted(&idx), c.clone());
    }
    out
}

/// Restrict a form in adapted coordinates to the `W` indices, dropping any
/// term that involves index 1 or `n + 1`.
fn restrict_to_w<S: Scalar>(w: &KForm<S>, n: usize) -> KForm<S> {
    let mut out = KForm::zero(2 * n - 2, w.degree());
    for (b, c) in w.terms() {
        if b.contains(1) || b.contains(n + 1) {
            continue;
        }
        let idx: Vec<usize> = b
            .indices()
            .into_iter()
            .map(|i| if i <= n { i - 1 } else { i - 2 })
            .collect();
        out.add_term(Blade::from_sorted(&idx), c.clone());
    }
    out
}

/// Split an effective degree-`n` form along `(A, B)`.
pub fn recursive_split<S: Scalar>(w: &KForm<S>, a: &[S], b: &[S]) -> Result<Split<S>> {
    let n = half_dim(w.dim())?;
    if w.degree() != n {
        return Err(Error::DegreeOutOfRange { degree: w.degree() });
    }
    let ab = omega_pair(a, b);
    if !(ab.clone() - S::one()).negligible(1.0) {
        return Err(Error::Precondition(format!("Omega(A, B) = {ab}, expected 1")));
    }
    if !is_effective(w)? {
        return Err(Error::NotEffective(bot(w)?.to_string()));
    }
    let basis = adapted_basis(a, b)?;
    let wp = pullback(&basis, w)?;
    let e1 = interior_basis(1, &wp);
    let f1 = interior_basis(n + 1, &wp);
    // Terms with both e1* and f1* are e1*^f1*^w0.
    // Contracting the last factor of chi^f1* or psi^e1* costs (-1)^(n-1).
    let omega0 = restrict_to_w(&interior_basis(n + 1, &e1), n);
    let (omega1, omega2) = if n % 2 == 1 {
        (restrict_to_w(&f1, n), restrict_to_w(&e1, n).neg())
    } else {
        (restrict_to_w(&f1, n).neg(), restrict_to_w(&e1, n))
    };
    Ok(Split {
        basis,
        omega0,
        omega1,
        omega2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn gamma_on_basis() {
        let e1 = basis_vector::<Q>(6, 1);
        let f1 = basis_vector::<Q>(6, 4);
        assert_eq!(gamma(&e1).unwrap(), KForm::term(6, &[4], q(1)).unwrap());
        assert_eq!(gamma(&f1).unwrap(), KForm::term(6, &[1], q(-1)).unwrap());
        let f2 = KForm::term(6, &[5], q(1)).unwrap();
        assert_eq!(gamma_inv(&f2).unwrap(), basis_vector::<Q>(6, 2));
    }

    #[test]
    fn top_and_bot_basics() {
        let one = KForm::constant(6, q(1));
        assert_eq!(top(&one).unwrap(), omega::<Q>(3));
        assert!(!top(&omega::<Q>(3)).unwrap().is_zero());
        let five = KForm::term(6, &[1, 2, 3, 4, 5], q(1)).unwrap();
        assert!(top(&five).unwrap().is_zero());
        assert_eq!(bot(&omega::<Q>(3)).unwrap().scalar_part(), q(3));
        assert!(bot(&KForm::term(6, &[1, 2], q(1)).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn effectiveness_examples() {
        assert!(is_effective(&KForm::term(6, &[1, 2, 3], q(1)).unwrap()).unwrap());
        assert!(!is_effective(&omega::<Q>(3)).unwrap());
    }

    #[test]
    fn decomposition_examples() {
        let d = effective_decompose(&omega::<Q>(3)).unwrap();
        assert!(d.components[0].is_zero());
        assert_eq!(d.components[1].scalar_part(), q(1));
        let e1 = KForm::term(6, &[1], q(1)).unwrap();
        let w = wedge(&e1, &omega::<Q>(3)).unwrap();
        let d = effective_decompose(&w).unwrap();
        assert!(d.components[0].is_zero());
        assert_eq!(d.components[1], e1);
        assert_eq!(d.reassemble().unwrap(), w);
    }

    #[test]
    fn adapted_basis_is_symplectic() {
        let a = vec![q(1), q(2), q(0), q(1), q(0), q(3)];
        let mut b = basis_vector::<Q>(6, 4);
        let s = omega_pair(&a, &b);
        b = b.iter().map(|x| x.clone() / s.clone()).collect();
        let p = adapted_basis(&a, &b).unwrap();
        assert!(is_symplectic(&p));
        assert_eq!(p.col(0), a);
        assert_eq!(p.col(3), b);
    }
}
