//! Orbit representatives of effective 3-forms on `R^6` (families 1 to 9).

use crate::error::{Error, Result};
use crate::multilinear::KForm;
use crate::scalar::Scalar;

/// Terms as written with factors in the order `f_i* ^ e_j* ^ e_k*`.
type Terms = &'static [(&'static [usize], i64)];

const ROW1: Terms = &[(&[1, 2, 3], 1)];
const ROW2: Terms = &[(&[4, 2, 3], 1), (&[5, 1, 3], 1), (&[6, 1, 2], 1)];
const ROW3: Terms = &[(&[4, 2, 3], 1), (&[5, 1, 3], -1), (&[6, 1, 2], 1)];
const ROW6: Terms = &[(&[6, 1, 2], 1), (&[5, 1, 3], 1)];
const ROW7: Terms = &[(&[6, 1, 2], 1), (&[5, 1, 3], -1)];

/// Sign of the `f1*^f2*^f3*` term for the parametrized rows.
fn parameter_sign(family: u8) -> i64 {
    match family {
        3 => -1,
        _ => 1,
    }
}

fn from_terms<S: Scalar>(terms: Terms) -> KForm<S> {
    let mut w = KForm::zero(6, 3);
    for (idx, c) in terms {
        let t = KForm::term(6, idx, S::from_i64(*c)).expect("valid indices");
        w = w.add(&t).expect("same shape");
    }
    w
}

/// The representative of `family`, where `coefficient` is the coefficient
/// carried by the parameter: `gamma` for family 1 and `nu^2` for families 2 and 3.
pub fn representative_from_coefficient<S: Scalar>(family: u8, coefficient: Option<&S>) -> Result<KForm<S>> {
    let base = match family {
        1 => ROW1,
        2 | 4 => ROW2,
        3 | 5 => ROW3,
        6 => ROW6,
        7 => ROW7,
        8 => ROW1,
        9 => return Ok(KForm::zero(6, 3)),
        _ => return Err(Error::Precondition(format!("no family {family}"))),
    };
    let mut w = from_terms::<S>(base);
    match (family, coefficient) {
        (1..=3, Some(c)) => {
            if c.is_zero() {
                return Err(Error::Precondition("orbit parameter must be nonzero".into()));
            }
            let t = KForm::term(6, &[4, 5, 6], c.clone() * S::from_i64(parameter_sign(family)))?;
            w = w.add(&t)?;
        }
        (1..=3, None) => {
            return Err(Error::Precondition(format!("family {family} needs a parameter")))
        }
        (_, Some(_)) => {
            return Err(Error::Precondition(format!("family {family} takes no parameter")))
        }
        _ => {}
    }
    Ok(w)
}

/// The representative with its natural parameter: `gamma` for family 1, `nu` for 2 and 3.
pub fn representative<S: Scalar>(family: u8, parameter: Option<&S>) -> Result<KForm<S>> {
    match (family, parameter) {
        (2 | 3, Some(nu)) => representative_from_coefficient(family, Some(&(nu.clone() * nu.clone()))),
        _ => representative_from_coefficient(family, parameter),
    }
}

/// The representative with the parametrized term removed.
pub fn parameter_free_part<S: Scalar>(family: u8) -> Result<KForm<S>> {
    match family {
        1 => Ok(from_terms(ROW1)),
        2 => Ok(from_terms(ROW2)),
        3 => Ok(from_terms(ROW3)),
        _ => representative_from_coefficient(family, None),
    }
}

/// The term multiplied by the parameter coefficient (zero for unparametrized rows).
pub fn parameter_term<S: Scalar>(family: u8) -> KForm<S> {
    match family {
        1..=3 => KForm::term(6, &[4, 5, 6], S::from_i64(parameter_sign(family))).expect("valid"),
        _ => KForm::zero(6, 3),
    }
}

/// `det q_w = c * p^6` on the representatives, with `p = gamma` (family 1) or `nu`.
/// Returns `c` as a ratio `(num, den)`.
pub fn det_constant(family: u8) -> Option<(i64, i64)> {
    match family {
        1 => Some((-1, 64)),
        2 | 3 => Some((1, 1)),
        _ => None,
    }
}

/// Expected `(rank, signature)` of `q_w` per family.
pub fn expected_signature(family: u8) -> Option<(usize, (usize, usize, usize))> {
    Some(match family {
        1 => (6, (3, 3, 0)),
        2 => (6, (4, 2, 0)),
        3 => (6, (0, 6, 0)),
        4 => (3, (2, 1, 3)),
        5 => (3, (0, 3, 3)),
        6 => (1, (1, 0, 5)),
        7 => (1, (0, 1, 5)),
        8 | 9 => (0, (0, 0, 6)),
        _ => return None,
    })
}

pub fn has_parameter(family: u8) -> bool {
    (1..=3).contains(&family)
}
