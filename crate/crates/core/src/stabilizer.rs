//! Stabilizer subalgebras of `sp(2n)`, their first prolongation and Killing data.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_signature, Mat};
use crate::multilinear::{lie_derivative_linear, KForm};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::symplectic::{half_dim, j_matrix};

/// Basis of `sp(2n)`: `[[B, 0], [0, -B^T]]`, then `[[0, S], [0, 0]]`,
/// then `[[0, 0], [S, 0]]` with `S` running over symmetric unit matrices.
pub fn sp_basis_n<S: Scalar>(n: usize) -> Vec<Mat<S>> {
    let dim = 2 * n;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut m = Mat::zeros(dim, dim);
            m[(i, j)] = S::one();
            m[(n + j, n + i)] = -S::one();
            out.push(m);
        }
    }
    for (ro, co) in [(0, n), (n, 0)] {
        for i in 0..n {
            for j in i..n {
                let mut m = Mat::zeros(dim, dim);
                m[(ro + i, co + j)] = S::one();
                m[(ro + j, co + i)] = S::one();
                out.push(m);
            }
        }
    }
    out
}

/// The 21 basis matrices of `sp(6)`.
pub fn sp_basis<S: Scalar>() -> Vec<Mat<S>> {
    sp_basis_n(3)
}

/// `X^T J + J X = 0`.
pub fn is_in_sp<S: Scalar>(x: &Mat<S>) -> bool {
    if !x.is_square() || !x.rows().is_multiple_of(2) {
        return false;
    }
    let j = j_matrix::<S>(x.rows() / 2);
    let d = x.transpose().mul(&j).add(&j.mul(x));
    if S::EXACT {
        d.is_zero()
    } else {
        d.max_abs() <= crate::scalar::FLOAT_EPS * x.max_abs().max(1.0)
    }
}

/// A Lie subalgebra of `sp(2n)` with a canonical (reduced echelon) basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subalgebra<S> {
    pub size: usize,
    pub basis: Vec<Mat<S>>,
    /// Flattened matrix positions of the echelon pivots.
    pivots: Vec<usize>,
    /// `[X_i, X_j] = sum_k c[i][j][k] X_k`.
    pub structure_constants: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> Subalgebra<S> {
    /// The subalgebra spanned by `mats`, which must lie in `sp` and close under brackets.
    pub fn from_span(size: usize, mats: &[Mat<S>]) -> Result<Self> {
        if let Some(bad) = mats.iter().position(|m| !is_in_sp(m) || m.rows() != size) {
            return Err(Error::NotInSp(format!("generator {bad}")));
        }
        let flat = Mat::from_rows(mats.iter().map(|m| m.entries().to_vec()).collect());
        let (basis, pivots) = if mats.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            let r = flat.rref();
            let basis = (0..r.pivots.len())
                .map(|i| Mat::from_fn(size, size, |a, b| r.mat[(i, a * size + b)].clone()))
                .collect();
            (basis, r.pivots)
        };
        let mut alg = Subalgebra {
            size,
            basis,
            pivots,
            structure_constants: Vec::new(),
        };
        let d = alg.dim();
        let mut c = vec![vec![vec![S::zero(); d]; d]; d];
        for i in 0..d {
            for j in 0..d {
                let br = alg.basis[i].bracket(&alg.basis[j]);
                c[i][j] = alg
                    .coordinates(&br)
                    .ok_or_else(|| Error::Precondition("span is not closed under brackets".into()))?;
            }
        }
        alg.structure_constants = c;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `x` in the basis, or `None` when `x` is not in the span.
    pub fn coordinates(&self, x: &Mat<S>) -> Option<Vec<S>> {
        let flat = x.entries();
        let coords: Vec<S> = self.pivots.iter().map(|&p| flat[p].clone()).collect();
        let mut rebuilt = Mat::zeros(self.size, self.size);
        for (b, c) in self.basis.iter().zip(&coords) {
            rebuilt = rebuilt.add(&b.scale(c));
        }
        let diff = rebuilt.sub(x);
        let ok = if S::EXACT {
            diff.is_zero()
        } else {
            diff.max_abs() <= 1e-8 * x.max_abs().max(1.0)
        };
        ok.then_some(coords)
    }

    pub fn contains(&self, x: &Mat<S>) -> bool {
        self.coordinates(x).is_some()
    }

    /// `F^{-1} X F` for every basis element.
    pub fn conjugate(&self, f: &Mat<S>) -> Result<Self> {
        let inv = f
            .inverse()
            .ok_or_else(|| Error::Precondition("conjugating map is singular".into()))?;
        let mats: Vec<Mat<S>> = self.basis.iter().map(|x| inv.mul(x).mul(f)).collect();
        Self::from_span(self.size, &mats)
    }
}

/// `J_w = {X in sp : L_X w = 0}`.
pub fn stabilizer<S: Scalar>(w: &KForm<S>) -> Result<Subalgebra<S>> {
    let n = half_dim(w.dim())?;
    let basis = sp_basis_n::<S>(n);
    let images: Vec<Vec<S>> = basis
        .iter()
        .map(|x| lie_derivative_linear(x, w).map(|l| l.to_dense()))
        .collect::<Result<_>>()?;
    let m = Mat::from_cols(&images);
    let kernel = m.nullspace();
    let mats: Vec<Mat<S>> = kernel
        .iter()
        .map(|c| {
            basis
                .iter()
                .zip(c)
                .fold(Mat::zeros(2 * n, 2 * n), |acc, (b, x)| acc.add(&b.scale(x)))
        })
        .collect();
    Subalgebra::from_span(2 * n, &mats)
}

/// First prolongation `(V ⊗ S^2 V*) ∩ (J ⊗ V*)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Prolongation<S> {
    pub dim: usize,
    /// Elements `T[i][k][l]`, flattened as `i*d*d + k*d + l`, symmetric in `(k, l)`.
    pub basis: Vec<Vec<S>>,
}

pub fn prolongation<S: Scalar>(j: &Subalgebra<S>) -> Result<Prolongation<S>> {
    if let Some(bad) = j.basis.iter().position(|x| !is_in_sp(x)) {
        return Err(Error::NotInSp(format!("basis element {bad}")));
    }
    let d = j.size;
    let m = j.dim();
    // Unknown t[a*d + k]: T(e_k) = sum_a t[a][k] X_a.
    let mut rows = Vec::new();
    for i in 0..d {
        for k in 0..d {
            for l in k + 1..d {
                let mut row = vec![S::zero(); m * d];
                for (a, x) in j.basis.iter().enumerate() {
                    row[a * d + k] = row[a * d + k].clone() + x[(i, l)].clone();
                    row[a * d + l] = row[a * d + l].clone() - x[(i, k)].clone();
                }
                rows.push(row);
            }
        }
    }
    if m == 0 {
        return Ok(Prolongation {
            dim: 0,
            basis: Vec::new(),
        });
    }
    let kernel = Mat::from_rows(rows).nullspace();
    let basis = kernel
        .iter()
        .map(|t| {
            let mut out = vec![S::zero(); d * d * d];
            for i in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut acc = S::zero();
                        for (a, x) in j.basis.iter().enumerate() {
                            acc = acc + t[a * d + k].clone() * x[(i, l)].clone();
                        }
                        out[i * d * d + k * d + l] = acc;
                    }
                }
            }
            out
        })
        .collect::<Vec<_>>();
    Ok(Prolongation {
        dim: basis.len(),
        basis,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KillingReport<S> {
    pub form: Mat<S>,
    pub signature: (usize, usize, usize),
    pub radical_dim: usize,
}

impl<S> KillingReport<S> {
    pub fn is_nondegenerate(&self) -> bool {
        self.radical_dim == 0
    }
}

/// Killing form `K(X, Y) = tr(ad_X ad_Y)` on the basis.
pub fn killing_report<S: Scalar>(j: &Subalgebra<S>) -> KillingReport<S> {
    let d = j.dim();
    let c = &j.structure_constants;
    // (ad_a)[k][b] = c[a][b][k].
    let form = Mat::from_fn(d, d, |a, b| {
        let mut acc = S::zero();
        for x in 0..d {
            for k in 0..d {
                acc = acc + c[a][x][k].clone() * c[b][k][x].clone();
            }
        }
        acc
    });
    let signature = symmetric_signature(&form);
    KillingReport {
        radical_dim: signature.2,
        signature,
        form,
    }
}

/// Linear Hamiltonian field of a quadratic `h = q^T H q`, with `i_{X_h} Omega = dh`:
/// `X_h = 2 J H`.
pub fn quadratic_to_hamiltonian<S: Scalar>(h: &Poly<S>) -> Result<Mat<S>> {
    let d = h.nvars();
    let n = half_dim(d)?;
    if !h.is_homogeneous(2) {
        return Err(Error::DegreeOutOfRange {
            degree: h.total_degree().unwrap_or(0) as usize,
        });
    }
    let two = S::from_i64(2);
    let mut hm = Mat::zeros(d, d);
    for (e, c) in h.terms() {
        let idx: Vec<usize> = (0..d).filter(|&i| e[i] > 0).collect();
        if idx.len() == 1 {
            hm[(idx[0], idx[0])] = c.clone();
        } else {
            hm[(idx[0], idx[1])] = c.clone() / two.clone();
            hm[(idx[1], idx[0])] = c.clone() / two.clone();
        }
    }
    Ok(j_matrix::<S>(n).mul(&hm).scale(&two))
}

/// Inverse of [`quadratic_to_hamiltonian`].
pub fn hamiltonian_to_quadratic<S: Scalar>(x: &Mat<S>) -> Result<Poly<S>> {
    if !is_in_sp(x) {
        return Err(Error::NotInSp("matrix".into()));
    }
    let d = x.rows();
    let n = d / 2;
    let hm = j_matrix::<S>(n).mul(x).scale(&S::from_ratio(-1, 2));
    let mut p = Poly::zero(d);
    for i in 0..d {
        for k in i..d {
            let mut e = vec![0; d];
            e[i] += 1;
            e[k] += 1;
            let c = if i == k {
                hm[(i, i)].clone()
            } else {
                hm[(i, k)].clone() * S::from_i64(2)
            };
            p.add_term(e, c);
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn sp_basis_is_a_basis() {
        let b = sp_basis::<Q>();
        assert_eq!(b.len(), 21);
        assert!(b.iter().all(is_in_sp));
        let flat = Mat::from_rows(b.iter().map(|m| m.entries().to_vec()).collect());
        assert_eq!(flat.rank(), 21);
    }

    #[test]
    fn zero_form_stabilizer_is_everything() {
        let s = stabilizer(&KForm::<Q>::zero(6, 3)).unwrap();
        assert_eq!(s.dim(), 21);
    }

    #[test]
    fn hamiltonian_of_x1_y1() {
        let mut e = vec![0; 6];
        e[0] = 1;
        e[3] = 1;
        let h = Poly::monomial(6, e, Q::from_i64(1));
        let x = quadratic_to_hamiltonian(&h).unwrap();
        let mut expected = Mat::zeros(6, 6);
        expected[(0, 0)] = Q::from_i64(1);
        expected[(3, 3)] = Q::from_i64(-1);
        assert_eq!(x, expected);
        assert_eq!(hamiltonian_to_quadratic(&x).unwrap(), h);
        assert!(quadratic_to_hamiltonian(&Poly::<Q>::zero(6)).unwrap().is_zero());
    }

    #[test]
    fn abelian_killing_form_vanishes() {
        let mut x = Mat::<Q>::zeros(6, 6);
        x[(0, 3)] = Q::from_i64(1);
        let j = Subalgebra::from_span(6, &[x]).unwrap();
        let k = killing_report(&j);
        assert!(k.form.is_zero());
        assert_eq!(k.radical_dim, 1);
    }
}
