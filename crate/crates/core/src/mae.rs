//! Monge–Ampère operators of effective 3-forms on `T*R^3 = R^6` and the
//! jet conditions for local equivalence.

use std::collections::BTreeMap;

use crate::classify::{classify, OrbitLabel};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::multilinear::{blades, Blade, KForm};
use crate::normal_forms::{parameter_free_part, parameter_term};
use crate::poly::{monomials, Poly};
use crate::scalar::Scalar;
use crate::stabilizer::quadratic_to_hamiltonian;
use crate::symplectic::{bot, is_effective};

/// Variable names of a [`HessPoly`], in storage order.
pub const HESS_VARS: [&str; 6] = ["h11", "h12", "h13", "h22", "h23", "h33"];

/// Index of `h_ij` (0-based `i, j`) among [`HESS_VARS`].
pub fn hess_var(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// Polynomial in the entries of a symmetric 3x3 Hessian.
#[derive(Clone, Debug, PartialEq)]
pub struct HessPoly<S>(pub Poly<S>);

impl<S: Scalar> HessPoly<S> {
    pub fn constant(c: S) -> Self {
        HessPoly(Poly::constant(6, c))
    }

    pub fn entry(i: usize, j: usize) -> Self {
        HessPoly(Poly::var(6, hess_var(i, j)))
    }

    /// `s1 h11 + s2 h22 + s3 h33`.
    pub fn signed_trace(signs: [i64; 3]) -> Self {
        let mut p = Poly::zero(6);
        for (i, s) in signs.iter().enumerate() {
            p = p.add(&Poly::var(6, hess_var(i, i)).scale(&S::from_i64(*s)));
        }
        HessPoly(p)
    }

    /// Determinant of the symmetric Hessian.
    pub fn hess() -> Self {
        let h = |i, j| Poly::<S>::var(6, hess_var(i, j));
        HessPoly(det3_poly(&|i, j| h(i, j)))
    }

    pub fn add(&self, other: &Self) -> Self {
        HessPoly(self.0.add(&other.0))
    }

    pub fn scale(&self, c: &S) -> Self {
        HessPoly(self.0.scale(c))
    }

    /// Evaluate at a symmetric 3x3 matrix.
    pub fn eval(&self, h: &Mat<S>) -> S {
        let x: Vec<S> = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
            .iter()
            .map(|&(i, j)| h[(i, j)].clone())
            .collect();
        self.0.eval(&x)
    }

    pub fn render(&self) -> String {
        self.0.render(&HESS_VARS)
    }
}

fn det3_poly<S: Scalar>(m: &dyn Fn(usize, usize) -> Poly<S>) -> Poly<S> {
    let minor = |a: usize, b: usize, c: usize, d: usize| m(1, a).mul(&m(2, b)).sub(&m(1, c).mul(&m(2, d)));
    m(0, 0)
        .mul(&minor(1, 2, 2, 1))
        .sub(&m(0, 1).mul(&minor(0, 2, 2, 0)))
        .add(&m(0, 2).mul(&minor(0, 1, 1, 0)))
}

fn check_effective_3form<S: Scalar>(w: &KForm<S>) -> Result<()> {
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
    Ok(())
}

/// The coefficient of `dq1^dq2^dq3` in the pullback of `w` to the graph of
/// `p = grad h`, whose tangent frame is `d/dq_k + sum_j h_kj d/dp_j`.
pub fn pde_from_form<S: Scalar>(w: &KForm<S>) -> Result<HessPoly<S>> {
    check_effective_3form(w)?;
    Ok(pde_unchecked(w))
}

fn pde_unchecked<S: Scalar>(w: &KForm<S>) -> HessPoly<S> {
    // frame[k][r]: component r of the k-th tangent vector.
    let frame = |k: usize, r: usize| -> Poly<S> {
        if r < 3 {
            if r == k {
                Poly::constant(6, S::one())
            } else {
                Poly::zero(6)
            }
        } else {
            Poly::var(6, hess_var(k, r - 3))
        }
    };
    let mut total = Poly::zero(6);
    for (b, c) in w.terms() {
        let idx = b.indices();
        let det = det3_poly(&|r, k| frame(k, idx[r] - 1));
        total = total.add(&det.scale(c));
    }
    HessPoly(total)
}

/// Value of the Monge–Ampère operator at a Hessian `h`.
pub fn eval_mae<S: Scalar>(w: &KForm<S>, h: &Mat<S>) -> Result<S> {
    if h.rows() != 3 || !h.is_symmetric() {
        return Err(Error::Precondition("Hessian must be a symmetric 3x3 matrix".into()));
    }
    Ok(pde_from_form(w)?.eval(h))
}

/// PDE of an orbit as `base + parameter * parametric`, where the parameter is
/// `gamma` (family 1), `nu^2` (families 2, 3) or absent.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalPde<S> {
    pub family: u8,
    pub base: HessPoly<S>,
    pub parametric: HessPoly<S>,
    pub parameter: Option<&'static str>,
}

impl<S: Scalar> CanonicalPde<S> {
    pub fn at(&self, coefficient: &S) -> HessPoly<S> {
        self.base.add(&self.parametric.scale(coefficient))
    }

    pub fn render(&self) -> String {
        match self.parameter {
            None => self.base.render(),
            Some(p) => format!("{} + {}*({})", self.base.render(), p, self.parametric.render()),
        }
    }
}

/// The PDEs of families 1 to 5, obtained from their representatives.
pub fn canonical_pdes<S: Scalar>() -> Vec<CanonicalPde<S>> {
    (1..=5u8)
        .map(|family| CanonicalPde {
            family,
            base: pde_unchecked(&parameter_free_part::<S>(family).expect("known family")),
            parametric: pde_unchecked(&parameter_term::<S>(family)),
            parameter: match family {
                1 => Some("gamma"),
                2 | 3 => Some("nu^2"),
                _ => None,
            },
        })
        .collect()
}

/// Hamiltonian field of a homogeneous polynomial on `R^6` with `i_{X_h} Omega = dh`:
/// `X^{e_i} = dh/dy_i`, `X^{f_i} = -dh/dx_i`.
pub fn hamiltonian_field_poly<S: Scalar>(h: &Poly<S>) -> Result<Vec<Poly<S>>> {
    if h.nvars() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            found: h.nvars(),
        });
    }
    let degree = h.total_degree().unwrap_or(3);
    if !(2..=4).contains(&degree) || !h.is_homogeneous(degree) {
        return Err(Error::DegreeOutOfRange {
            degree: degree as usize,
        });
    }
    if degree == 2 && !h.is_zero() {
        let m = quadratic_to_hamiltonian(h)?;
        return Ok((0..6)
            .map(|i| {
                (0..6).fold(Poly::zero(6), |acc, j| {
                    acc.add(&Poly::var(6, j).scale(&m[(i, j)]))
                })
            })
            .collect());
    }
    let mut field = Vec::with_capacity(6);
    for i in 0..3 {
        field.push(h.derivative(3 + i));
    }
    for i in 0..3 {
        field.push(h.derivative(i).neg());
    }
    Ok(field)
}

/// A differential form on `R^6` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyForm<S> {
    degree: usize,
    coeffs: BTreeMap<Blade, Poly<S>>,
}

impl<S: Scalar> PolyForm<S> {
    pub fn zero(degree: usize) -> Self {
        PolyForm {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_kform(w: &KForm<S>) -> Self {
        let mut f = Self::zero(w.degree());
        for (b, c) in w.terms() {
            f.add_term(b, Poly::constant(6, c.clone()));
        }
        f
    }

    /// Build from `(increasing indices, polynomial)` pairs.
    pub fn from_terms(degree: usize, terms: Vec<(Vec<usize>, Poly<S>)>) -> Result<Self> {
        let mut f = Self::zero(degree);
        for (idx, p) in terms {
            let increasing = idx.windows(2).all(|w| w[0] < w[1]);
            if idx.len() != degree || !increasing || idx.iter().any(|&i| i == 0 || i > 6) || p.nvars() != 6 {
                return Err(Error::InvalidIndex(idx));
            }
            f.add_term(Blade::from_sorted(&idx), p);
        }
        Ok(f)
    }

    fn add_term(&mut self, b: Blade, p: Poly<S>) {
        if p.is_zero() {
            return;
        }
        let v = match self.coeffs.remove(&b) {
            Some(old) => old.add(&p),
            None => p,
        };
        if !v.is_zero() {
            self.coeffs.insert(b, v);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &Poly<S>)> {
        self.coeffs.iter().map(|(b, p)| (*b, p))
    }

    pub fn coeff(&self, idx: &[usize]) -> Poly<S> {
        self.coeffs
            .get(&Blade::from_sorted(idx))
            .cloned()
            .unwrap_or_else(|| Poly::zero(6))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut f = self.clone();
        for (b, p) in &other.coeffs {
            f.add_term(*b, p.clone());
        }
        f
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut f = Self::zero(self.degree);
        for (b, p) in &self.coeffs {
            f.add_term(*b, p.scale(c));
        }
        f
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut f = Self::zero(self.degree);
        for (b, p) in &self.coeffs {
            f.add_term(*b, p.homogeneous_part(d));
        }
        f
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.coeffs.values().all(|p| p.is_homogeneous(d))
    }

    /// Value at a point, as a constant-coefficient form.
    pub fn at(&self, q: &[S]) -> KForm<S> {
        let mut w = KForm::zero(6, self.degree);
        for (b, p) in &self.coeffs {
            w.add_term(*b, p.eval(q));
        }
        w
    }

    /// Interior product with a polynomial vector field.
    pub fn interior(&self, x: &[Poly<S>]) -> Self {
        let mut f = Self::zero(self.degree.saturating_sub(1));
        for (b, p) in &self.coeffs {
            for (pos, i) in b.indices().into_iter().enumerate() {
                if x[i - 1].is_zero() {
                    continue;
                }
                let rest = Blade(b.0 & !(1 << (i - 1)));
                let t = x[i - 1].mul(p);
                f.add_term(rest, if pos % 2 == 0 { t } else { t.neg() });
            }
        }
        f
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let mut f = Self::zero(self.degree + 1);
        for (b, p) in &self.coeffs {
            for j in 1..=6 {
                if b.contains(j) {
                    continue;
                }
                let dp = p.derivative(j - 1);
                if dp.is_zero() {
                    continue;
                }
                let below = (b.0 & ((1u32 << (j - 1)) - 1)).count_ones();
                let target = Blade(b.0 | 1 << (j - 1));
                f.add_term(target, if below.is_multiple_of(2) { dp } else { dp.neg() });
            }
        }
        f
    }

    /// Lie derivative by Cartan's formula `L_X = d i_X + i_X d`.
    pub fn lie(&self, x: &[Poly<S>]) -> Self {
        self.interior(x).d().add(&self.d().interior(x))
    }

    /// Coefficient vector over `blades(6, degree) x monomials(6, d)`.
    fn flatten(&self, d: u32) -> Vec<S> {
        let monos = monomials(6, d);
        let mut out = Vec::new();
        for b in blades(6, self.degree) {
            let p = self.coeffs.get(&b);
            for m in &monos {
                out.push(p.map_or_else(S::zero, |p| p.coeff(m)));
            }
        }
        out
    }
}

/// The 2-jet `w0 + w1 + w2` of a 3-form at a base point; `w_k` has coefficients
/// homogeneous of degree `k` in coordinates centered at the base point.
#[derive(Clone, Debug, PartialEq)]
pub struct JetForm<S> {
    pub omega0: KForm<S>,
    pub omega1: PolyForm<S>,
    pub omega2: PolyForm<S>,
    pub base_point: Vec<S>,
}

impl<S: Scalar> JetForm<S> {
    pub fn new(omega0: KForm<S>, omega1: PolyForm<S>, omega2: PolyForm<S>, base_point: Vec<S>) -> Result<Self> {
        check_effective_3form(&omega0)?;
        if omega1.degree() != 3 || omega2.degree() != 3 {
            return Err(Error::DegreeOutOfRange {
                degree: omega1.degree().max(omega2.degree()),
            });
        }
        if !omega1.is_homogeneous(1) || !omega2.is_homogeneous(2) {
            return Err(Error::Precondition("graded pieces must be homogeneous of degree 1 and 2".into()));
        }
        if base_point.len() != 6 {
            return Err(Error::DimensionMismatch {
                expected: 6,
                found: base_point.len(),
            });
        }
        Ok(JetForm {
            omega0,
            omega1,
            omega2,
            base_point,
        })
    }

    /// Split a polynomial 3-form of degree at most 2 into its graded pieces.
    pub fn from_poly_form(w: &PolyForm<S>, base_point: Vec<S>) -> Result<Self> {
        let zero = vec![S::zero(); 6];
        let omega0 = w.homogeneous_part(0).at(&zero);
        Self::new(omega0, w.homogeneous_part(1), w.homogeneous_part(2), base_point)
    }

    /// The form at the base point, which is `omega0`.
    pub fn at_base(&self) -> KForm<S> {
        self.omega0.clone()
    }
}

#[derive(Clone, Debug)]
pub struct FlatnessReport<S> {
    pub orbit_at_base: OrbitLabel<S>,
    /// Certificate `h` in `S^3` with `L_{X_h} w0 = w1`.
    pub sigma1: Option<Poly<S>>,
    /// Certificate `k` in `S^4` with `L_{X_k} w0 = 2 w2 - L_{X_h} w1`.
    pub sigma2: Option<Poly<S>>,
    /// Dimension of `{h in S^3 : L_{X_h} w0 = 0}`.
    pub sigma1_kernel_dim: usize,
    /// When the kernel is nonzero: whether the second condition gave the same
    /// answer for a second choice of `h`.
    pub sigma2_h_independent: Option<bool>,
    /// The base orbit is one of families 1 to 5.
    pub orbit_gate: bool,
    pub conclusion: bool,
}

impl<S> FlatnessReport<S> {
    pub fn sigma1_solvable(&self) -> bool {
        self.sigma1.is_some()
    }

    pub fn sigma2_solvable(&self) -> bool {
        self.sigma2.is_some()
    }
}

fn poly_from_coords<S: Scalar>(monos: &[Vec<u32>], coords: &[S]) -> Poly<S> {
    let mut p = Poly::zero(6);
    for (m, c) in monos.iter().zip(coords) {
        p.add_term(m.clone(), c.clone());
    }
    p
}

/// Matrix of `h -> L_{X_h} w0` from homogeneous degree `d` polynomials to
/// 3-forms with degree `d - 2` coefficients.
fn lie_matrix<S: Scalar>(w0: &PolyForm<S>, d: u32) -> Result<(Mat<S>, Vec<Vec<u32>>)> {
    let monos = monomials(6, d);
    let cols = monos
        .iter()
        .map(|m| {
            let h = Poly::monomial(6, m.clone(), S::one());
            let x = hamiltonian_field_poly(&h)?;
            Ok(w0.lie(&x).flatten(d - 2))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Mat::from_cols(&cols), monos))
}

/// Decide the two jet conditions at the base point.
pub fn check_jet_conditions<S: Scalar>(jf: &JetForm<S>) -> Result<FlatnessReport<S>> {
    check_effective_3form(&jf.omega0)?;
    let orbit = classify(&jf.omega0)?;
    let orbit_gate = (1..=5).contains(&orbit.family);
    let w0 = PolyForm::from_kform(&jf.omega0);
    let (m3, monos3) = lie_matrix(&w0, 3)?;
    let kernel = m3.nullspace();
    let sigma1 = m3
        .solve(&jf.omega1.flatten(1))
        .map(|c| poly_from_coords(&monos3, &c));
    let (m4, monos4) = lie_matrix(&w0, 4)?;
    let solve2 = |h: &Poly<S>| -> Result<Option<Poly<S>>> {
        let xh = hamiltonian_field_poly(h)?;
        let rhs = jf
            .omega2
            .scale(&S::from_i64(2))
            .sub(&jf.omega1.lie(&xh))
            .homogeneous_part(2);
        Ok(m4.solve(&rhs.flatten(2)).map(|c| poly_from_coords(&monos4, &c)))
    };
    let (sigma2, independent) = match &sigma1 {
        Some(h) => {
            let k = solve2(h)?;
            let independent = match kernel.first() {
                Some(v) => {
                    let h2 = h.add(&poly_from_coords(&monos3, v));
                    Some(solve2(&h2)?.is_some() == k.is_some())
                }
                None => None,
            };
            (k, independent)
        }
        None => (None, None),
    };
    let conclusion = orbit_gate && sigma1.is_some() && sigma2.is_some();
    Ok(FlatnessReport {
        orbit_at_base: orbit,
        sigma1,
        sigma2,
        sigma1_kernel_dim: kernel.len(),
        sigma2_h_independent: independent,
        orbit_gate,
        conclusion,
    })
}

/// Forward construction of a jet from `w0`, a cubic `h` and a quartic `k`:
/// `w1 = L_{X_h} w0`, `w2 = (L_{X_h} w1 + L_{X_k} w0) / 2`.
pub fn jet_from_generators<S: Scalar>(w0: &KForm<S>, h: &Poly<S>, k: &Poly<S>) -> Result<JetForm<S>> {
    let p0 = PolyForm::from_kform(w0);
    let xh = hamiltonian_field_poly(h)?;
    let xk = hamiltonian_field_poly(k)?;
    let w1 = p0.lie(&xh);
    let w2 = w1.lie(&xh).add(&p0.lie(&xk)).scale(&S::from_ratio(1, 2));
    JetForm::new(w0.clone(), w1, w2, vec![S::zero(); 6])
}
