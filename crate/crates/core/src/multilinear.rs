//! Exterior algebra on `R^dim` with constant coefficients.
//!
//! A [`KForm`] stores coefficients on strictly increasing index tuples
//! (1-based). Index `i` refers to the dual basis covector of the i-th basis
//! vector; in dimension `2n` indices `1..=n` are `e_i` and `n+1..=2n` are `f_i`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Vectors are coordinate lists in the `(e_1..e_n, f_1..f_n)` basis.
pub type Vector<S> = Vec<S>;
/// Linear maps act on vectors by left multiplication.
pub type LinearMap<S> = Mat<S>;

/// A set of basis indices, stored as a bit mask (bit `i-1` for index `i`).
/// Ordered lexicographically on the sorted index tuple.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Blade(pub u32);

impl Blade {
    pub fn from_sorted(idx: &[usize]) -> Blade {
        Blade(idx.iter().fold(0, |m, &i| m | 1 << (i - 1)))
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> (i - 1) & 1 == 1
    }

    /// Number of indices in the blade strictly below `i`.
    fn count_below(self, i: usize) -> u32 {
        (self.0 & ((1u32 << (i - 1)) - 1)).count_ones()
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(&other.indices())
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sign of `e_a ∧ e_b` relative to the sorted blade, or 0 when they overlap.
fn wedge_sign(a: Blade, b: Blade) -> i32 {
    if a.0 & b.0 != 0 {
        return 0;
    }
    let mut swaps = 0;
    for j in b.indices() {
        swaps += (a.0 >> j).count_ones();
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All blades of a given grade in lexicographic order.
pub fn blades(dim: usize, grade: usize) -> Vec<Blade> {
    fn rec(start: usize, dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Blade>) {
        if left == 0 {
            out.push(Blade::from_sorted(cur));
            return;
        }
        for i in start..=dim {
            cur.push(i);
            rec(i + 1, dim, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if grade <= dim {
        rec(1, dim, grade, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct KForm<S> {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Blade, S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        KForm {
            dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: S) -> Self {
        let mut w = Self::zero(dim, 0);
        w.add_term(Blade(0), c);
        w
    }

    /// The form `coef * dx_{i1} ∧ ... ∧ dx_{ik}` for indices in any order.
    /// Repeated indices give the zero form; out-of-range indices are an error.
    pub fn term(dim: usize, idx: &[usize], coef: S) -> Result<Self> {
        if idx.iter().any(|&i| i == 0 || i > dim) || dim > 32 {
            return Err(Error::InvalidIndex(idx.to_vec()));
        }
        let mut w = Self::zero(dim, idx.len());
        let mut sorted = idx.to_vec();
        let sign = permutation_sign(&mut sorted);
        if sign != 0 {
            let c = if sign > 0 { coef } else { -coef };
            w.add_term(Blade::from_sorted(&sorted), c);
        }
        Ok(w)
    }

    /// Build from `(strictly increasing indices, coefficient)` pairs.
    pub fn from_terms<'a, I>(dim: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], S)>,
    {
        let mut w = Self::zero(dim, degree);
        for (idx, c) in terms {
            let increasing = idx.windows(2).all(|p| p[0] < p[1]);
            if idx.len() != degree
                || !increasing
                || idx.iter().any(|&i| i == 0 || i > dim)
                || dim > 32
            {
                return Err(Error::InvalidIndex(idx.to_vec()));
            }
            w.add_term(Blade::from_sorted(idx), c);
        }
        Ok(w)
    }

    /// A 1-form from its coefficient list.
    pub fn covector(coeffs: &[S]) -> Self {
        let mut w = Self::zero(coeffs.len(), 1);
        for (i, c) in coeffs.iter().enumerate() {
            w.add_term(Blade(1 << i), c.clone());
        }
        w
    }

    pub(crate) fn add_term(&mut self, b: Blade, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.remove(&b) {
            Some(old) => {
                let v = old + c;
                if !v.is_zero() {
                    self.coeffs.insert(b, v);
                }
            }
            None => {
                self.coeffs.insert(b, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient on a strictly increasing index tuple.
    pub fn coeff(&self, idx: &[usize]) -> S {
        self.coeffs
            .get(&Blade::from_sorted(idx))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    pub fn coeff_blade(&self, b: Blade) -> S {
        self.coeffs.get(&b).cloned().unwrap_or_else(S::zero)
    }

    /// Nonzero terms in lexicographic order of index tuples.
    pub fn terms(&self) -> impl Iterator<Item = (Blade, &S)> {
        self.coeffs.iter().map(|(b, c)| (*b, c))
    }

    /// Dense coefficient vector over [`blades`]`(dim, degree)`.
    pub fn to_dense(&self) -> Vec<S> {
        blades(self.dim, self.degree)
            .into_iter()
            .map(|b| self.coeff_blade(b))
            .collect()
    }

    pub fn from_dense(dim: usize, degree: usize, v: &[S]) -> Self {
        let mut w = Self::zero(dim, degree);
        for (b, c) in blades(dim, degree).into_iter().zip(v) {
            w.add_term(b, c.clone());
        }
        w
    }

    /// Scalar value of a 0-form.
    pub fn scalar_part(&self) -> S {
        if self.degree == 0 {
            self.coeff_blade(Blade(0))
        } else {
            S::zero()
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeOutOfRange {
                degree: other.degree,
            });
        }
        let mut w = self.clone();
        for (b, c) in &other.coeffs {
            w.add_term(*b, c.clone());
        }
        Ok(w)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut w = Self::zero(self.dim, self.degree);
        for (b, x) in &self.coeffs {
            w.add_term(*b, x.clone() * c.clone());
        }
        w
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        let mut w = KForm::zero(self.dim, self.degree);
        for (b, x) in &self.coeffs {
            w.add_term(*b, f(x));
        }
        w
    }

    /// Largest coefficient magnitude, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Max-norm distance to another form of the same shape, as `f64`.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for b in self.coeffs.keys().chain(other.coeffs.keys()) {
            let x = (self.coeff_blade(*b) - other.coeff_blade(*b)).to_f64().abs();
            d = d.max(x);
        }
        d
    }
}

/// Sort in place and return the sign of the sorting permutation (0 on repeats).
pub fn permutation_sign(v: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            match v[j].cmp(&v[j + 1]) {
                Ordering::Greater => {
                    v.swap(j, j + 1);
                    sign = -sign;
                }
                Ordering::Equal => return 0,
                Ordering::Less => {}
            }
        }
    }
    if v.windows(2).any(|p| p[0] == p[1]) {
        0
    } else {
        sign
    }
}

/// Exterior product.
pub fn wedge<S: Scalar>(a: &KForm<S>, b: &KForm<S>) -> Result<KForm<S>> {
    a.check_same(b)?;
    let mut w = KForm::zero(a.dim, a.degree + b.degree);
    if a.degree + b.degree > a.dim {
        return Ok(w);
    }
    for (ba, ca) in &a.coeffs {
        for (bb, cb) in &b.coeffs {
            match wedge_sign(*ba, *bb) {
                0 => {}
                1 => w.add_term(Blade(ba.0 | bb.0), ca.clone() * cb.clone()),
                _ => w.add_term(Blade(ba.0 | bb.0), -(ca.clone() * cb.clone())),
            }
        }
    }
    Ok(w)
}

/// Interior product `i_X w`, contracting the first slot.
pub fn interior<S: Scalar>(x: &[S], w: &KForm<S>) -> Result<KForm<S>> {
    if x.len() != w.dim {
        return Err(Error::DimensionMismatch {
            expected: w.dim,
            found: x.len(),
        });
    }
    if w.degree == 0 {
        return Err(Error::DegreeOutOfRange { degree: 0 });
    }
    let mut out = KForm::zero(w.dim, w.degree - 1);
    for (b, c) in &w.coeffs {
        for i in b.indices() {
            let xi = &x[i - 1];
            if xi.is_zero() {
                continue;
            }
            let v = xi.clone() * c.clone();
            let rest = Blade(b.0 & !(1 << (i - 1)));
            if b.count_below(i) % 2 == 0 {
                out.add_term(rest, v);
            } else {
                out.add_term(rest, -v);
            }
        }
    }
    Ok(out)
}

/// Interior product with a basis vector (1-based index).
pub fn interior_basis<S: Scalar>(i: usize, w: &KForm<S>) -> KForm<S> {
    let mut out = KForm::zero(w.dim, w.degree.saturating_sub(1));
    for (b, c) in &w.coeffs {
        if !b.contains(i) {
            continue;
        }
        let rest = Blade(b.0 & !(1 << (i - 1)));
        if b.count_below(i) % 2 == 0 {
            out.add_term(rest, c.clone());
        } else {
            out.add_term(rest, -c.clone());
        }
    }
    out
}

fn check_map<S: Scalar>(f: &LinearMap<S>, dim: usize) -> Result<()> {
    if !f.is_square() || f.rows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: f.rows(),
        });
    }
    Ok(())
}

/// Pullback `(F*w)(v_1..v_k) = w(F v_1, ..., F v_k)`.
pub fn pullback<S: Scalar>(f: &LinearMap<S>, w: &KForm<S>) -> Result<KForm<S>> {
    check_map(f, w.dim)?;
    // F* dx_i is the i-th row of F.
    let rows: Vec<KForm<S>> = (0..w.dim).map(|i| KForm::covector(&f.row(i))).collect();
    let mut out = KForm::zero(w.dim, w.degree);
    for (b, c) in &w.coeffs {
        let mut acc = KForm::constant(w.dim, c.clone());
        for i in b.indices() {
            acc = wedge(&acc, &rows[i - 1])?;
            if acc.is_zero() {
                break;
            }
        }
        for (bb, cc) in acc.coeffs {
            out.add_term(bb, cc);
        }
    }
    Ok(out)
}

/// Lie derivative along the linear field `q -> A q`:
/// `(L_A w)(v_1..v_k) = sum_i w(v_1, .., A v_i, .., v_k)`.
///
/// With this convention `L_{BA - AB} = L_A L_B - L_B L_A`.
pub fn lie_derivative_linear<S: Scalar>(a: &LinearMap<S>, w: &KForm<S>) -> Result<KForm<S>> {
    check_map(a, w.dim)?;
    let mut out = KForm::zero(w.dim, w.degree);
    for (b, c) in &w.coeffs {
        let idx = b.indices();
        for (pos, &i) in idx.iter().enumerate() {
            // dx_i is replaced by sum_j A_ij dx_j in slot `pos`.
            for j in 1..=w.dim {
                let aij = &a[(i - 1, j - 1)];
                if aij.is_zero() || (j != i && b.contains(j)) {
                    continue;
                }
                let mut seq = idx.clone();
                seq[pos] = j;
                let sign = permutation_sign(&mut seq);
                let v = aij.clone() * c.clone();
                let target = Blade::from_sorted(&seq);
                if sign > 0 {
                    out.add_term(target, v);
                } else {
                    out.add_term(target, -v);
                }
            }
        }
    }
    Ok(out)
}

/// Evaluate a k-form on k vectors.
pub fn evaluate<S: Scalar>(w: &KForm<S>, vectors: &[Vector<S>]) -> Result<S> {
    if vectors.len() != w.degree {
        return Err(Error::DegreeOutOfRange { degree: w.degree });
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != w.dim) {
        return Err(Error::DimensionMismatch {
            expected: w.dim,
            found: v.len(),
        });
    }
    let mut total = S::zero();
    for (b, c) in &w.coeffs {
        let idx = b.indices();
        let k = idx.len();
        let m = Mat::from_fn(k, k, |r, s| vectors[s][idx[r] - 1].clone());
        total = total + c.clone() * if k == 0 { S::one() } else { m.det() };
    }
    Ok(total)
}

/// Standard basis vector `e_i` (1-based) of `R^dim`.
pub fn basis_vector<S: Scalar>(dim: usize, i: usize) -> Vector<S> {
    (1..=dim)
        .map(|j| if j == i { S::one() } else { S::zero() })
        .collect()
}

impl<S: Scalar> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let n = self.dim / 2;
        let name = |i: usize| {
            if self.dim.is_multiple_of(2) && i > n {
                format!("f{}", i - n)
            } else {
                format!("e{}", i)
            }
        };
        let mut first = true;
        for (b, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let names: Vec<String> = b.indices().into_iter().map(name).collect();
            if names.is_empty() {
                write!(f, "{}", c)?;
            } else {
                write!(f, "({})*{}", c, names.join("^"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn t(idx: &[usize], c: i64) -> KForm<Q> {
        KForm::term(6, idx, Q::from_i64(c)).unwrap()
    }

    #[test]
    fn wedge_of_basis_covectors() {
        assert_eq!(wedge(&t(&[1], 1), &t(&[2], 1)).unwrap(), t(&[1, 2], 1));
        assert_eq!(wedge(&t(&[2], 1), &t(&[1], 1)).unwrap(), t(&[1, 2], -1));
        // (e1^f1)^(e2^f2) sorts [1,4,2,5] with one transposition.
        let w = wedge(&t(&[1, 4], 1), &t(&[2, 5], 1)).unwrap();
        assert_eq!(w.coeff(&[1, 2, 4, 5]), Q::from_i64(-1));
    }

    #[test]
    fn interior_on_volume_of_e() {
        let w = t(&[1, 2, 3], 1);
        let e = |i| basis_vector::<Q>(6, i);
        assert_eq!(interior(&e(1), &w).unwrap(), t(&[2, 3], 1));
        assert!(interior(&e(4), &w).unwrap().is_zero());
        assert_eq!(interior(&e(2), &w).unwrap(), t(&[1, 3], -1));
        assert!(interior(&e(1), &KForm::<Q>::constant(6, Q::from_i64(1))).is_err());
    }

    #[test]
    fn pullback_examples() {
        let w = t(&[1, 2, 3], 1);
        assert_eq!(pullback(&Mat::identity(6), &w).unwrap(), w);
        let c = Q::from_i64(5);
        let d = Mat::diag(&[
            c.clone(),
            Q::from_i64(1),
            Q::from_i64(1),
            Q::from_i64(1) / c.clone(),
            Q::from_i64(1),
            Q::from_i64(1),
        ]);
        assert_eq!(pullback(&d, &w).unwrap(), w.scale(&c));
    }

    #[test]
    fn lie_derivative_examples() {
        let w = t(&[1, 2, 3], 1).add(&t(&[4, 5, 6], 2)).unwrap();
        assert!(lie_derivative_linear(&Mat::zeros(6, 6), &w).unwrap().is_zero());
        let three = lie_derivative_linear(&Mat::identity(6), &w).unwrap();
        assert_eq!(three, w.scale(&Q::from_i64(3)));
        // E12 sends e2 to e1.
        let mut e12 = Mat::zeros(6, 6);
        e12[(0, 1)] = Q::from_i64(1);
        let l = lie_derivative_linear(&e12, &t(&[1, 2, 3], 1)).unwrap();
        assert_eq!(l.coeff(&[1, 2, 3]), Q::from_i64(0));
    }

    #[test]
    fn evaluate_matches_coefficients() {
        let w = t(&[1, 4], 3).add(&t(&[2, 5], -1)).unwrap();
        let v = evaluate(&w, &[basis_vector(6, 1), basis_vector(6, 4)]).unwrap();
        assert_eq!(v, Q::from_i64(3));
        let v = evaluate(&w, &[basis_vector(6, 5), basis_vector(6, 2)]).unwrap();
        assert_eq!(v, Q::from_i64(1));
    }

    #[test]
    fn blade_order_is_lexicographic() {
        let b = blades(6, 3);
        assert_eq!(b.len(), 20);
        assert_eq!(b[0].indices(), vec![1, 2, 3]);
        assert_eq!(b[1].indices(), vec![1, 2, 4]);
        assert_eq!(b[19].indices(), vec![4, 5, 6]);
        let mut sorted = b.clone();
        sorted.sort();
        assert_eq!(sorted, b);
    }
}
