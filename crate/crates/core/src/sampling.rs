//! Seeded random generators for rational symplectic maps and forms.

use rand::Rng;

use crate::linalg::Mat;
use crate::multilinear::{blades, KForm};
use crate::scalar::{Rational, Scalar};
use crate::symplectic::bot_matrix;

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let n = rng.random_range(-3i64..=3);
    let d = rng.random_range(1i64..=2);
    Rational::from_ratio(n, d)
}

fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    const CHOICES: [(i64, i64); 8] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2), (3, 2), (2, 3)];
    let (n, d) = CHOICES[rng.random_range(0..CHOICES.len())];
    Rational::from_ratio(n, d)
}

/// One random generator of `Sp(2n)` over the rationals: a symmetric shear
/// (upper or lower) or a block `diag(B, B^{-T})`.
pub fn random_sp_factor<R: Rng>(rng: &mut R, n: usize) -> Mat<Rational> {
    let dim = 2 * n;
    let mut m = Mat::<Rational>::identity(dim);
    match rng.random_range(0..3) {
        0 | 1 => {
            let (ro, co) = if rng.random_bool(0.5) { (0, n) } else { (n, 0) };
            for i in 0..n {
                for j in i..n {
                    let s = small_rational(rng);
                    m[(ro + i, co + j)] = s.clone();
                    m[(ro + j, co + i)] = s;
                }
            }
        }
        _ => {
            let mut b = Mat::<Rational>::identity(n);
            for i in 0..n {
                b[(i, i)] = nonzero_rational(rng);
            }
            if n > 1 {
                let i = rng.random_range(0..n);
                let j = (i + 1 + rng.random_range(0..n - 1)) % n;
                b[(i, j)] = small_rational(rng);
            }
            let bit = b.inverse().expect("triangular with nonzero diagonal").transpose();
            for r in 0..n {
                for c in 0..n {
                    m[(r, c)] = b[(r, c)].clone();
                    m[(n + r, n + c)] = bit[(r, c)].clone();
                }
            }
        }
    }
    m
}

/// Product of `factors` random generators.
pub fn random_rational_sp<R: Rng>(rng: &mut R, n: usize, factors: usize) -> Mat<Rational> {
    (0..factors).fold(Mat::identity(2 * n), |acc, _| acc.mul(&random_sp_factor(rng, n)))
}

/// Random form with integer coefficients in `[-range, range]`, each blade kept with probability `density`.
pub fn random_form<S: Scalar, R: Rng>(rng: &mut R, dim: usize, degree: usize, range: i64, density: f64) -> KForm<S> {
    let coeffs: Vec<S> = blades(dim, degree)
        .iter()
        .map(|_| {
            if rng.random_bool(density) {
                S::from_i64(rng.random_range(-range..=range))
            } else {
                S::zero()
            }
        })
        .collect();
    KForm::from_dense(dim, degree, &coeffs)
}

/// Basis of the effective forms of a given degree (kernel of `bot`).
pub fn effective_basis<S: Scalar>(dim: usize, degree: usize) -> Vec<KForm<S>> {
    let m = bot_matrix::<S>(dim, degree).expect("even dimension");
    if degree < 2 {
        return (0..blades(dim, degree).len())
            .map(|i| {
                let mut v = vec![S::zero(); blades(dim, degree).len()];
                v[i] = S::one();
                KForm::from_dense(dim, degree, &v)
            })
            .collect();
    }
    m.nullspace()
        .into_iter()
        .map(|v| KForm::from_dense(dim, degree, &v))
        .collect()
}

/// Random effective form: integer combination of [`effective_basis`].
pub fn random_effective_form<S: Scalar, R: Rng>(rng: &mut R, basis: &[KForm<S>], range: i64) -> KForm<S> {
    let (dim, degree) = (basis[0].dim(), basis[0].degree());
    basis.iter().fold(KForm::zero(dim, degree), |acc, b| {
        acc.add(&b.scale(&S::from_i64(rng.random_range(-range..=range))))
            .expect("same shape")
    })
}
