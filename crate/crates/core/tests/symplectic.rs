mod common;

use common::*;
use effective_forms::invariants::{pfaffian, q_form};
use effective_forms::multilinear::*;
use effective_forms::normal_forms::representative;
use effective_forms::sampling::effective_basis;
use effective_forms::symplectic::*;
use effective_forms::Mat;
use proptest::prelude::*;

fn omega_sq_coeff() -> Q {
    let o = omega::<Q>(2);
    wedge(&o, &o).unwrap().coeff(&[1, 2, 3, 4])
}

#[test]
fn gamma_examples() {
    assert_eq!(gamma(&basis_vector::<Q>(6, 1)).unwrap(), form(6, &[(&[4], 1)]));
    assert_eq!(gamma(&basis_vector::<Q>(6, 4)).unwrap(), form(6, &[(&[1], -1)]));
    assert_eq!(gamma_inv(&form(6, &[(&[5], 1)])).unwrap(), basis_vector::<Q>(6, 2));
}

#[test]
fn omega_pairing_on_basis() {
    for i in 1..=6 {
        for j in 1..=6 {
            let v = omega_pair(&basis_vector::<Q>(6, i), &basis_vector::<Q>(6, j));
            let expected = match (i, j) {
                (i, j) if i <= 3 && j == i + 3 => q(1),
                (i, j) if j <= 3 && i == j + 3 => q(-1),
                _ => q(0),
            };
            assert_eq!(v, expected, "Omega(b{i}, b{j})");
        }
    }
}

#[test]
fn top_examples() {
    let one = KForm::constant(6, q(1));
    assert_eq!(top(&one).unwrap(), omega(3));
    let oo = top(&omega::<Q>(3)).unwrap();
    assert_eq!(oo, wedge(&omega(3), &omega(3)).unwrap());
    assert!(!oo.is_zero());
    assert!(top(&form(6, &[(&[1, 2, 3, 4, 5], 1)])).unwrap().is_zero());
}

#[test]
fn bot_examples() {
    assert_eq!(bot(&omega::<Q>(3)).unwrap(), KForm::constant(6, q(3)));
    assert!(bot(&form(6, &[(&[1, 2], 1)])).unwrap().is_zero());
    assert!(bot(&form(6, &[(&[1, 2, 3], 1)])).unwrap().is_zero());
}

#[test]
fn effectiveness_examples() {
    assert!(is_effective(&form(6, &[(&[1, 2, 3], 1)])).unwrap());
    assert!(!is_effective(&omega::<Q>(3)).unwrap());
    assert!(is_effective(&representative::<Q>(4, None).unwrap()).unwrap());
}

#[test]
fn bot_is_injective_above_middle_degree() {
    for k in 4..=6 {
        let m = bot_matrix::<Q>(6, k).unwrap();
        assert_eq!(m.rank(), m.cols(), "degree {k}");
    }
}

#[test]
fn effective_three_forms_have_dimension_fourteen() {
    let m = bot_matrix::<Q>(6, 3).unwrap();
    assert_eq!(m.cols() - m.rank(), 14);
    assert_eq!(effective_basis::<Q>(6, 3).len(), 14);
    assert_eq!(effective_basis::<Q>(6, 2).len(), 14);
}

#[test]
fn decomposition_examples() {
    let w = form(6, &[(&[1, 2, 3], 1)]);
    let d = effective_decompose(&w).unwrap();
    assert_eq!(d.components[0], w);
    assert!(d.components[1].is_zero());

    let d = effective_decompose(&omega::<Q>(3)).unwrap();
    assert!(d.components[0].is_zero());
    assert_eq!(d.components[1], KForm::constant(6, q(1)));

    let e1 = form(6, &[(&[1], 1)]);
    let d = effective_decompose(&wedge(&e1, &omega(3)).unwrap()).unwrap();
    assert!(d.components[0].is_zero());
    assert_eq!(d.components[1], e1);
}

#[test]
fn decomposition_rejects_high_degree() {
    assert!(effective_decompose(&form(6, &[(&[1, 2, 3, 4], 1)])).is_err());
}

#[test]
fn split_examples() {
    let w = form(6, &[(&[1, 2, 3], 1)]);
    let (a, b) = (basis_vector::<Q>(6, 1), basis_vector::<Q>(6, 4));
    let s = recursive_split(&w, &a, &b).unwrap();
    assert_eq!(s.reassemble().unwrap(), w);
    assert!(s.omega0.is_zero());

    let s = recursive_split(&KForm::<Q>::zero(6, 3), &a, &b).unwrap();
    assert!(s.omega0.is_zero() && s.omega1.is_zero() && s.omega2.is_zero());

    let w4 = representative::<Q>(4, None).unwrap();
    let s = recursive_split(&w4, &a, &b).unwrap();
    let qf = q_form(&w4).unwrap();
    assert_eq!(qf.eval(&a), -pfaffian(&s.omega2).unwrap());
    assert_eq!(qf.eval(&b), -pfaffian(&s.omega1).unwrap());
    let c12 = wedge(&s.omega1, &s.omega2).unwrap().coeff(&[1, 2, 3, 4]) / omega_sq_coeff();
    assert_eq!(qf.polar(&a, &b), c12);
}

#[test]
fn split_requires_normalized_pair() {
    let w = form(6, &[(&[1, 2, 3], 1)]);
    let a = basis_vector::<Q>(6, 1);
    assert!(recursive_split(&w, &a, &basis_vector(6, 2)).is_err());
    assert!(recursive_split(&omega::<Q>(3).scale(&q(0)), &a, &basis_vector(6, 4)).is_err());
}

#[test]
fn adapted_basis_is_symplectic() {
    let a = vec![q(1), q(2), q(0), q(0), q(1), q(-1)];
    let mut b = basis_vector::<Q>(6, 4);
    let ab = omega_pair(&a, &b);
    b.iter_mut().for_each(|x| *x = x.clone() / ab.clone());
    let f = adapted_basis(&a, &b).unwrap();
    assert!(is_symplectic(&f));
    assert_eq!(f.col(0), a);
    assert_eq!(f.col(3), b);
    assert_eq!(symplectic_inverse(&f).mul(&f), Mat::identity(6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn commutator_scales_by_degree(w in arb_form_any_degree(6)) {
        let k = w.degree() as i64;
        prop_assert_eq!(bot_top_commutator(&w).unwrap(), w.scale(&q(3 - k)));
    }

    #[test]
    fn commutator_scales_by_degree_dim4(w in arb_form_any_degree(4)) {
        let k = w.degree() as i64;
        prop_assert_eq!(bot_top_commutator(&w).unwrap(), w.scale(&q(2 - k)));
    }

    #[test]
    fn gamma_round_trip(x in arb_vector(6)) {
        prop_assert_eq!(gamma_inv(&gamma(&x).unwrap()).unwrap(), x.clone());
        let y = basis_vector::<Q>(6, 2);
        prop_assert_eq!(evaluate(&gamma(&x).unwrap(), std::slice::from_ref(&y)).unwrap(), omega_pair(&x, &y));
    }

    #[test]
    fn symplectic_maps_preserve_omega(f in arb_sp(3)) {
        prop_assert!(is_symplectic(&f));
        prop_assert_eq!(pullback(&f, &omega(3)).unwrap(), omega(3));
        prop_assert_eq!(symplectic_inverse(&f).mul(&f), Mat::identity(6));
    }

    #[test]
    fn decomposition_reassembles_and_is_unique(k in 0usize..=3, seed in any::<u64>()) {
        use effective_forms::sampling::random_form;
        let w = random_form::<Q, _>(&mut rng(seed), 6, k, 4, 0.6);
        let d = effective_decompose(&w).unwrap();
        prop_assert_eq!(d.reassemble().unwrap(), w);
        for c in &d.components {
            prop_assert!(is_effective(c).unwrap());
        }
        prop_assert_eq!(effective_decompose(&d.reassemble().unwrap()).unwrap(), d);
    }

    #[test]
    fn decomposition_recovers_planted_components(w0 in arb_effective(6, 3), w1 in arb_form(6, 1)) {
        let w = w0.add(&top(&w1).unwrap()).unwrap();
        let d = effective_decompose(&w).unwrap();
        prop_assert_eq!(&d.components[0], &w0);
        prop_assert_eq!(&d.components[1], &w1);
    }

    #[test]
    fn split_reproduces_q(w in arb_effective(6, 3), a in arb_vector(6)) {
        prop_assume!(a.iter().any(|x| *x != q(0)));
        let qf = q_form(&w).unwrap();
        let b0 = if a[..3].iter().any(|x| *x != q(0)) {
            let i = a[..3].iter().position(|x| *x != q(0)).unwrap();
            basis_vector::<Q>(6, i + 4)
        } else {
            let i = a[3..].iter().position(|x| *x != q(0)).unwrap();
            basis_vector::<Q>(6, i + 1)
        };
        let ab = omega_pair(&a, &b0);
        let b: Vec<Q> = b0.iter().map(|x| x.clone() / ab.clone()).collect();
        let s = recursive_split(&w, &a, &b).unwrap();
        prop_assert_eq!(s.reassemble().unwrap(), w.clone());
        let p2 = pfaffian(&s.omega2).unwrap();
        prop_assert_eq!(qf.eval(&a), -p2.clone());
        prop_assert_eq!(qf.eval(&b), -pfaffian(&s.omega1).unwrap());
        let c12 = wedge(&s.omega1, &s.omega2).unwrap().coeff(&[1, 2, 3, 4]) / omega_sq_coeff();
        prop_assert_eq!(qf.polar(&a, &b), c12);
        // q(A) = 0 exactly when w2 is degenerate on W.
        prop_assert_eq!(qf.eval(&a) == q(0), p2 == q(0));
    }
}
