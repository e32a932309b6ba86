#![allow(dead_code)]

use effective_forms::multilinear::{blades, KForm};
use effective_forms::sampling::random_rational_sp;
use effective_forms::{Mat, Rational, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Q = Rational;

pub fn q(n: i64) -> Q {
    Q::from_i64(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

pub fn form(dim: usize, terms: &[(&[usize], i64)]) -> KForm<Q> {
    let mut w = KForm::zero(dim, terms.first().map_or(0, |t| t.0.len()));
    for (idx, c) in terms {
        w = w.add(&KForm::term(dim, idx, q(*c)).unwrap()).unwrap();
    }
    w
}

pub fn binom(n: usize, k: usize) -> usize {
    blades(n, k).len()
}

/// Sparse-ish integer form of the given degree.
pub fn arb_form(dim: usize, degree: usize) -> impl Strategy<Value = KForm<Q>> {
    prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], binom(dim, degree))
        .prop_map(move |v| KForm::from_dense(dim, degree, &v.into_iter().map(q).collect::<Vec<_>>()))
}

pub fn arb_form_any_degree(dim: usize) -> impl Strategy<Value = KForm<Q>> {
    (0..=dim).prop_flat_map(move |k| arb_form(dim, k))
}

pub fn arb_vector(dim: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(-3i64..=3, dim).prop_map(|v| v.into_iter().map(q).collect())
}

pub fn arb_matrix(dim: usize) -> impl Strategy<Value = Mat<Q>> {
    prop::collection::vec(-2i64..=2, dim * dim)
        .prop_map(move |v| Mat::from_fn(dim, dim, |i, j| q(v[i * dim + j])))
}

/// Random rational symplectic map on `R^{2n}`, reproducible from the seed.
pub fn arb_sp(n: usize) -> impl Strategy<Value = Mat<Q>> {
    any::<u64>().prop_map(move |s| random_rational_sp(&mut ChaCha8Rng::seed_from_u64(s), n, 4))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer combination of the effective basis.
pub fn arb_effective(dim: usize, degree: usize) -> impl Strategy<Value = KForm<Q>> {
    let basis = effective_forms::sampling::effective_basis::<Q>(dim, degree);
    prop::collection::vec(-3i64..=3, basis.len()).prop_map(move |c| {
        basis.iter().zip(c).fold(KForm::zero(dim, degree), |acc, (b, c)| acc.add(&b.scale(&q(c))).unwrap())
    })
}
