//! Fiberwise Lefschetz algebra of a constant symplectic form: wedge with Ω,
//! insertion of Ω⁻¹, primitive subspaces, projections and the two
//! decompositions of `Λ^k`. Also the conformally symplectic chart models.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::{int, Coefficient, Poly, Rational, Ring};
use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, MultiIndex, PolyVectorField};
use crate::linalg::DenseMatrix;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(n, k)` with `C(n, k) = 0` for negative `k`.
pub fn binom(n: usize, k: i64) -> usize {
    if k < 0 {
        0
    } else {
        binomial(n, k as usize)
    }
}

/// Dimension of the primitive subspace `Λ^j_0` of a `2n`-dimensional
/// symplectic vector space.
pub fn primitive_dim(n: usize, j: usize) -> usize {
    let j = j as i64;
    if j <= n as i64 {
        binom(2 * n, j) - binom(2 * n, j - 2)
    } else {
        binom(2 * n, j) - binom(2 * n, j + 2)
    }
}

#[derive(Clone, Debug)]
struct DegreeData {
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
    l: DenseMatrix,
    lambda: DenseMatrix,
    primitive: Vec<Vec<Rational>>,
    complement: Vec<Vec<Rational>>,
    /// rows: primitive coordinates then complement coordinates
    split: DenseMatrix,
    projector: DenseMatrix,
}

/// Lefschetz operators of a constant nondegenerate 2-form on `ℝ^{2n}`.
#[derive(Clone, Debug)]
pub struct SymplecticFiber {
    n: usize,
    omega: DenseMatrix,
    pi: DenseMatrix,
    degrees: Vec<DegreeData>,
    middle_inverse: DenseMatrix,
}

impl SymplecticFiber {
    /// From the Gram matrix `W_ij = ω(e_i, e_j)`.
    pub fn new(omega: &DenseMatrix) -> Result<Self> {
        let m = omega.rows();
        if m != omega.cols() || !m.is_multiple_of(2) || m < 2 {
            return Err(Error::Config("symplectic matrix must be square of even size".into()));
        }
        if !omega.add(&omega.transpose()).is_zero() {
            return Err(Error::Config("symplectic matrix must be antisymmetric".into()));
        }
        let inv = omega.inverse().ok_or_else(|| Error::Config("2-form is degenerate".into()))?;
        let pi = inv.transpose();
        let n = m / 2;

        let omega_form = constant_two_form(m, Ring::Poly, omega);
        let pi_entries = (0..m)
            .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
            .filter(|&(a, b)| !pi.get(a, b).is_zero())
            .map(|(a, b)| (MultiIndex::new(&[a, b]).unwrap(), pi.get(a, b).clone()));
        let bivector = PolyVectorField::constant_bivector(m, Ring::Poly, pi_entries)?;

        let indices: Vec<Vec<MultiIndex>> = (0..=m).map(|j| MultiIndex::all(m, j)).collect();
        let position: Vec<HashMap<MultiIndex, usize>> =
            indices.iter().map(|ix| ix.iter().enumerate().map(|(i, x)| (*x, i)).collect()).collect();
        let coords = |form: &DifferentialForm, j: usize| -> Vec<Rational> {
            let mut v = vec![Rational::zero(); indices[j].len()];
            for (idx, c) in form.terms() {
                v[position[j][idx]] = c.constant_value().expect("constant form");
            }
            v
        };
        let basis_form = |idx: MultiIndex| DifferentialForm::monomial(idx, Coefficient::one(Ring::Poly, m)).unwrap();

        let mut ls = Vec::new();
        let mut lambdas = Vec::new();
        for j in 0..=m {
            let tgt_l = (j + 2).min(m + 1);
            let mut l = DenseMatrix::zeros(if j + 2 <= m { indices[j + 2].len() } else { 0 }, indices[j].len());
            let mut lam = DenseMatrix::zeros(if j >= 2 { indices[j - 2].len() } else { 0 }, indices[j].len());
            for (c, idx) in indices[j].iter().enumerate() {
                let e = basis_form(*idx);
                if j + 2 <= m {
                    let w = omega_form.wedge(&e)?;
                    for (r, v) in coords(&w, tgt_l).into_iter().enumerate() {
                        l.set(r, c, v);
                    }
                }
                if j >= 2 {
                    let w = e.interior_product(&bivector)?;
                    for (r, v) in coords(&w, j - 2).into_iter().enumerate() {
                        lam.set(r, c, v);
                    }
                }
            }
            ls.push(l);
            lambdas.push(lam);
        }

        let mut degrees = Vec::new();
        for j in 0..=m {
            let primitive = if j <= n { lambdas[j].nullspace() } else { ls[j].nullspace() };
            let complement: Vec<Vec<Rational>> = if j <= n {
                if j >= 2 {
                    (0..ls[j - 2].cols()).map(|c| ls[j - 2].column(c)).collect()
                } else {
                    Vec::new()
                }
            } else if j + 2 <= m {
                (0..lambdas[j + 2].cols()).map(|c| lambdas[j + 2].column(c)).collect()
            } else {
                Vec::new()
            };
            let dim = indices[j].len();
            let all: Vec<Vec<Rational>> = primitive.iter().chain(complement.iter()).cloned().collect();
            if all.len() != dim {
                return Err(Error::Internal(format!("decomposition of Λ^{j} has {} vectors for dimension {dim}", all.len())));
            }
            let b = DenseMatrix::from_columns(dim, &all);
            let split = b
                .inverse()
                .ok_or_else(|| Error::Internal(format!("decomposition of Λ^{j} is not direct")))?;
            let r = primitive.len();
            let mut keep = DenseMatrix::zeros(dim, dim);
            for i in 0..r {
                keep.set(i, i, Rational::one());
            }
            let projector = b.mul(&keep).mul(&split);
            degrees.push(DegreeData {
                indices: indices[j].clone(),
                position: position[j].clone(),
                l: ls[j].clone(),
                lambda: lambdas[j].clone(),
                primitive,
                complement,
                split,
                projector,
            });
        }
        let middle_inverse = degrees[n - 1]
            .l
            .inverse()
            .ok_or_else(|| Error::Internal("wedge with ω is not bijective in the middle degree".into()))?;
        Ok(SymplecticFiber { n, omega: omega.clone(), pi, degrees, middle_inverse })
    }

    /// The standard form `Σ dx_i ∧ dy_i` in coordinates `(x1, y1, …, xn, yn)`.
    pub fn standard(n: usize) -> Self {
        Self::new(&standard_matrix(n)).expect("standard symplectic form")
    }

    /// From a constant 2-form on `2n` coordinates (trailing axes ignored).
    pub fn from_form(form: &DifferentialForm, axes: usize) -> Result<Self> {
        Self::new(&gram_matrix(form, axes)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn axes(&self) -> usize {
        2 * self.n
    }

    pub fn omega_matrix(&self) -> &DenseMatrix {
        &self.omega
    }

    /// Coefficients `π_ab` (a < b) of Ω⁻¹ = Σ π_ab ∂_a ∧ ∂_b.
    pub fn pi_matrix(&self) -> &DenseMatrix {
        &self.pi
    }

    pub fn indices(&self, j: usize) -> &[MultiIndex] {
        &self.degrees[j].indices
    }

    pub fn dim(&self, j: usize) -> usize {
        self.degrees.get(j).map(|d| d.indices.len()).unwrap_or(0)
    }

    /// `L = ω∧ : Λ^j → Λ^{j+2}`.
    pub fn l_matrix(&self, j: usize) -> &DenseMatrix {
        &self.degrees[j].l
    }

    /// `Λ = i_{Ω⁻¹} : Λ^j → Λ^{j-2}`.
    pub fn lambda_matrix(&self, j: usize) -> &DenseMatrix {
        &self.degrees[j].lambda
    }

    /// Basis of `Λ^j_0` (kernel of Λ for `j ≤ n`, of L for `j > n`).
    pub fn primitive_basis(&self, j: usize) -> &[Vec<Rational>] {
        &self.degrees[j].primitive
    }

    /// Complement of `Λ^j_0` used by the projection: `im L` for `j ≤ n`,
    /// `im Λ` for `j > n`.
    pub fn complement_basis(&self, j: usize) -> &[Vec<Rational>] {
        &self.degrees[j].complement
    }

    /// Projection `Π₀` onto `Λ^j_0` along the complement.
    pub fn projector(&self, j: usize) -> &DenseMatrix {
        &self.degrees[j].projector
    }

    /// Inverse of `L : Λ^{n-1} → Λ^{n+1}`.
    pub fn middle_inverse(&self) -> &DenseMatrix {
        &self.middle_inverse
    }

    /// Coordinates of `v ∈ Λ^j` in the basis (primitive, complement).
    pub fn split_coords(&self, j: usize, v: &[Rational]) -> Vec<Rational> {
        self.degrees[j].split.mul_vec(v)
    }

    /// Applies a constant fiber matrix `Λ^src → Λ^dst` to a form whose
    /// indices only involve the first `2n` axes.
    pub fn apply(&self, m: &DenseMatrix, src: usize, dst: usize, form: &DifferentialForm) -> Result<DifferentialForm> {
        if form.degree() != src {
            return Err(Error::BasisMismatch(format!("expected a {src}-form, got degree {}", form.degree())));
        }
        let mut terms: Vec<(MultiIndex, Coefficient)> = Vec::new();
        if dst > self.axes() || dst > form.nvars() {
            return Ok(DifferentialForm::zero(form.nvars(), form.ring(), dst.min(form.nvars())));
        }
        let tgt = &self.degrees[dst].indices;
        for (idx, c) in form.terms() {
            let col = *self.degrees[src].position.get(idx).ok_or_else(|| {
                Error::BasisMismatch(format!("{idx} involves a direction outside the symplectic fiber"))
            })?;
            for (r, t) in tgt.iter().enumerate() {
                let a = m.get(r, col);
                if !a.is_zero() {
                    terms.push((*t, c.scale(a)));
                }
            }
        }
        DifferentialForm::from_terms(form.nvars(), form.ring(), dst, terms)
    }

    pub fn wedge_omega(&self, form: &DifferentialForm) -> Result<DifferentialForm> {
        let j = form.degree();
        if j + 2 > self.axes() {
            return Ok(DifferentialForm::zero(form.nvars(), form.ring(), (j + 2).min(form.nvars())));
        }
        self.apply(self.l_matrix(j), j, j + 2, form)
    }

    pub fn contract_inverse(&self, form: &DifferentialForm) -> Result<DifferentialForm> {
        let j = form.degree();
        if j < 2 {
            return Err(Error::DegreeUnderflow { form: j, vector: 2 });
        }
        self.apply(self.lambda_matrix(j), j, j - 2, form)
    }

    pub fn project(&self, form: &DifferentialForm) -> Result<DifferentialForm> {
        let j = form.degree();
        self.apply(self.projector(j), j, j, form)
    }

    /// Solves `ω ∧ x = form` for a form of degree `n + 1`.
    pub fn solve_middle(&self, form: &DifferentialForm) -> Result<DifferentialForm> {
        if form.degree() != self.n + 1 {
            return Err(Error::BasisMismatch(format!("middle solve needs an {}-form", self.n + 1)));
        }
        self.apply(&self.middle_inverse, self.n + 1, self.n - 1, form)
    }

    pub fn is_primitive(&self, form: &DifferentialForm) -> Result<bool> {
        Ok(self.project(form)? == *form)
    }

    /// Matrix of the commutator `[L, Λ]` on `Λ^j`.
    pub fn commutator(&self, j: usize) -> DenseMatrix {
        let d = self.dim(j);
        let mut out = DenseMatrix::zeros(d, d);
        if j >= 2 {
            out = out.add(&self.l_matrix(j - 2).mul(self.lambda_matrix(j)));
        }
        if j + 2 <= self.axes() {
            out = out.sub(&self.lambda_matrix(j + 2).mul(self.l_matrix(j)));
        }
        out
    }
}

/// `Σ dx_i ∧ dy_i` as a Gram matrix.
pub fn standard_matrix(n: usize) -> DenseMatrix {
    let mut w = DenseMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        w.set(2 * i, 2 * i + 1, int(1));
        w.set(2 * i + 1, 2 * i, int(-1));
    }
    w
}

/// Gram matrix of a constant 2-form restricted to the first `axes` axes.
pub fn gram_matrix(form: &DifferentialForm, axes: usize) -> Result<DenseMatrix> {
    if form.degree() != 2 {
        return Err(Error::BasisMismatch("a 2-form is required".into()));
    }
    let mut w = DenseMatrix::zeros(axes, axes);
    for (idx, c) in form.terms() {
        let ax = idx.axes();
        if ax[1] >= axes {
            return Err(Error::BasisMismatch(format!("{idx} leaves the first {axes} axes")));
        }
        let v = c
            .constant_value()
            .ok_or_else(|| Error::Unsupported("2-form with non-constant coefficients".into()))?;
        w.set(ax[0], ax[1], v.clone());
        w.set(ax[1], ax[0], -v);
    }
    Ok(w)
}

/// Constant 2-form with Gram matrix `w` on a chart with `nvars` coordinates.
pub fn constant_two_form(nvars: usize, ring: Ring, w: &DenseMatrix) -> DifferentialForm {
    let m = w.rows();
    let entries = (0..m)
        .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
        .map(|(a, b)| (MultiIndex::new(&[a, b]).unwrap(), w.get(a, b).clone()));
    DifferentialForm::constant(nvars, ring, 2, entries).expect("2-form fits the chart")
}

// ---------------------------------------------------------------------------
// Conformally symplectic charts
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsModel {
    Affine,
    Torus,
}

impl std::fmt::Display for CsModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CsModel::Affine => write!(f, "affine"),
            CsModel::Torus => write!(f, "torus"),
        }
    }
}

/// A cs chart: coordinates `(x1, y1, …, xn, yn)`, a closed nondegenerate
/// constant 2-form ω spanning ℓ, and on the affine model a potential β with
/// `dβ = ω`. The formal generator `s` of ℓ is the parallel section ω.
#[derive(Clone, Debug)]
pub struct CsChart {
    n: usize,
    model: CsModel,
    ring: Ring,
    omega: DifferentialForm,
    beta: Option<DifferentialForm>,
    bivector: PolyVectorField,
    fiber: Arc<SymplecticFiber>,
}

impl CsChart {
    /// Affine model with potential `β = Σ x_i dy_i`.
    pub fn affine(n: usize) -> Result<Self> {
        let m = 2 * n;
        let terms = (0..n).map(|i| {
            (MultiIndex::single(2 * i + 1), Coefficient::from(Poly::var(m, 2 * i).expect("axis")))
        });
        Self::affine_with_beta(n, DifferentialForm::from_terms(m, Ring::Poly, 1, terms)?)
    }

    /// Affine model with a polynomial potential whose differential is constant.
    pub fn affine_with_beta(n: usize, beta: DifferentialForm) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("n must be at least 2".into()));
        }
        if beta.nvars() != 2 * n || beta.degree() != 1 || beta.ring() != Ring::Poly {
            return Err(Error::Config(format!("β must be a polynomial 1-form on {} coordinates", 2 * n)));
        }
        let omega = beta.exterior_derivative();
        let fiber = SymplecticFiber::from_form(&omega, 2 * n)
            .map_err(|e| Error::NotCsPotential(format!("dβ is not a constant nondegenerate form ({e})")))?;
        Self::build(n, CsModel::Affine, Ring::Poly, Some(beta), fiber)
    }

    /// Flat torus with the standard form.
    pub fn torus(n: usize) -> Result<Self> {
        Self::torus_with_omega(n, &standard_matrix(n))
    }

    pub fn torus_with_omega(n: usize, w: &DenseMatrix) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("n must be at least 2".into()));
        }
        Self::build(n, CsModel::Torus, Ring::Trig, None, SymplecticFiber::new(w)?)
    }

    fn build(n: usize, model: CsModel, ring: Ring, beta: Option<DifferentialForm>, fiber: SymplecticFiber) -> Result<Self> {
        let m = 2 * n;
        let omega = constant_two_form(m, ring, fiber.omega_matrix());
        let pi = fiber.pi_matrix();
        let entries = (0..m)
            .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
            .filter(|&(a, b)| !pi.get(a, b).is_zero())
            .map(|(a, b)| (MultiIndex::new(&[a, b]).unwrap(), pi.get(a, b).clone()));
        let bivector = PolyVectorField::constant_bivector(m, ring, entries)?;
        Ok(CsChart { n, model, ring, omega, beta, bivector, fiber: Arc::new(fiber) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        2 * self.n
    }

    pub fn model(&self) -> CsModel {
        self.model
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn omega(&self) -> &DifferentialForm {
        &self.omega
    }

    pub fn beta(&self) -> Option<&DifferentialForm> {
        self.beta.as_ref()
    }

    /// Ω⁻¹ as a bivector on this chart's ring.
    pub fn inverse_bivector(&self) -> &PolyVectorField {
        &self.bivector
    }

    pub fn fiber(&self) -> &Arc<SymplecticFiber> {
        &self.fiber
    }

    pub fn var_weights(&self) -> Vec<u32> {
        vec![1; self.nvars()]
    }
}

/// A form tensored with `ℓ^p` (negative `p` for powers of ℓ*).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedForm {
    pub base: DifferentialForm,
    pub ell_power: i32,
}

impl TwistedForm {
    pub fn new(base: DifferentialForm, ell_power: i32) -> Self {
        TwistedForm { base, ell_power }
    }

    pub fn plain(base: DifferentialForm) -> Self {
        TwistedForm { base, ell_power: 0 }
    }

    pub fn degree(&self) -> usize {
        self.base.degree()
    }
}

/// `L(φ ⊗ ℓ^p) = (ω ∧ φ) ⊗ ℓ^{p-1}`.
pub fn lefschetz_l(chart: &CsChart, phi: &TwistedForm) -> Result<TwistedForm> {
    Ok(TwistedForm::new(chart.omega().wedge(&phi.base)?, phi.ell_power - 1))
}

/// `Λ(φ ⊗ ℓ^p) = (i_{Ω⁻¹} φ) ⊗ ℓ^{p+1}`.
pub fn lefschetz_lambda(chart: &CsChart, phi: &TwistedForm) -> Result<TwistedForm> {
    if phi.degree() < 2 {
        return Err(Error::DegreeUnderflow { form: phi.degree(), vector: 2 });
    }
    Ok(TwistedForm::new(phi.base.interior_product(chart.inverse_bivector())?, phi.ell_power + 1))
}

/// Component in `Λ^k_0`, by the exact decomposition solve.
pub fn primitive_projection(chart: &CsChart, phi: &TwistedForm) -> Result<TwistedForm> {
    Ok(TwistedForm::new(chart.fiber().project(&phi.base)?, phi.ell_power))
}

/// Primitive components `φ_i` with `φ = Σ L^i φ_i` (`k ≤ n`, `φ_i ⊗ ℓ^i`) or
/// `φ = Σ Λ^i φ_i` (`k > n`, `φ_i ⊗ ℓ^{-i}`).
pub fn full_decomposition(chart: &CsChart, phi: &TwistedForm) -> Result<Vec<TwistedForm>> {
    let fiber = chart.fiber();
    let n = chart.n();
    let mut out = Vec::new();
    let mut rest = phi.base.clone();
    let mut i = 0i32;
    loop {
        let k = rest.degree();
        let p0 = fiber.project(&rest)?;
        out.push(TwistedForm::new(p0.clone(), phi.ell_power + if k <= n { i } else { -i }));
        let rem = &rest - &p0;
        let next = if phi.base.degree() <= n {
            if k < 2 {
                break;
            }
            // rem = L ρ with ρ in Λ^{k-2}
            solve_fiber(fiber, fiber.l_matrix(k - 2), k - 2, k, &rem)?
        } else {
            if k + 2 > 2 * n {
                break;
            }
            solve_fiber(fiber, fiber.lambda_matrix(k + 2), k + 2, k, &rem)?
        };
        rest = next;
        i += 1;
    }
    Ok(out)
}

/// Reassembles the output of [`full_decomposition`].
pub fn reassemble_decomposition(chart: &CsChart, parts: &[TwistedForm], k: usize) -> Result<DifferentialForm> {
    let fiber = chart.fiber();
    let mut acc: Option<DifferentialForm> = None;
    for (i, p) in parts.iter().enumerate().rev() {
        let mut cur = p.base.clone();
        if let Some(a) = acc {
            cur = &cur + &a;
        }
        acc = Some(if i == 0 {
            cur
        } else if k <= chart.n() {
            fiber.wedge_omega(&cur)?
        } else {
            fiber.contract_inverse(&cur)?
        });
    }
    acc.ok_or_else(|| Error::Internal("empty decomposition".into()))
}

/// Solves `m x = rhs` fiberwise for each scalar coefficient; `m` must be
/// injective and `rhs` in its image.
fn solve_fiber(fiber: &SymplecticFiber, m: &DenseMatrix, src: usize, dst: usize, rhs: &DifferentialForm) -> Result<DifferentialForm> {
    // left inverse of an injective matrix: (mᵀm)⁻¹mᵀ
    let mt = m.transpose();
    let gram = mt.mul(m).inverse().ok_or_else(|| Error::Internal("fiber map is not injective".into()))?;
    let left = gram.mul(&mt);
    let x = fiber.apply(&left, dst, src, rhs)?;
    let back = fiber.apply(m, src, dst, &x)?;
    if back != *rhs {
        return Err(Error::Internal("remainder is not in the image of the Lefschetz map".into()));
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LefschetzRow {
    pub k: usize,
    pub dim: usize,
    pub primitive: usize,
    /// `(degree of primitive piece, power of ℓ, dimension)`.
    pub summands: Vec<(usize, i32, usize)>,
    pub rank_l: usize,
    pub rank_lambda: usize,
    pub l_injective: bool,
    pub l_surjective: bool,
    pub lambda_injective: bool,
    pub lambda_surjective: bool,
    /// `[L, Λ]` on this fiber, when it is a scalar.
    #[serde(serialize_with = "ser_opt_rational")]
    pub commutator: Option<Rational>,
}

fn ser_opt_rational<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Dimension and rank table of the Lefschetz decomposition, by exact rank.
pub fn lefschetz_table(fiber: &SymplecticFiber) -> Vec<LefschetzRow> {
    let n = fiber.n();
    (0..=2 * n)
        .map(|k| {
            let l = fiber.l_matrix(k);
            let lam = fiber.lambda_matrix(k);
            let rank_l = l.rank();
            let rank_lambda = lam.rank();
            let summands = if k <= n {
                (0..=k / 2).map(|i| (k - 2 * i, i as i32, fiber.primitive_basis(k - 2 * i).len())).collect()
            } else {
                (0..).take_while(|i| k + 2 * i <= 2 * n).map(|i| (k + 2 * i, -(i as i32), fiber.primitive_basis(k + 2 * i).len())).collect()
            };
            LefschetzRow {
                k,
                dim: fiber.dim(k),
                primitive: fiber.primitive_basis(k).len(),
                summands,
                rank_l,
                rank_lambda,
                l_injective: rank_l == l.cols(),
                l_surjective: rank_l == l.rows(),
                lambda_injective: rank_lambda == lam.cols(),
                lambda_surjective: rank_lambda == lam.rows(),
                commutator: fiber.commutator(k).scalar_value(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::rat;

    fn chart() -> CsChart {
        CsChart::affine(2).unwrap()
    }

    fn c(v: Rational) -> Coefficient {
        Coefficient::constant(Ring::Poly, 4, v)
    }

    fn e(axes: &[usize], v: Rational) -> DifferentialForm {
        DifferentialForm::monomial(MultiIndex::new(axes).unwrap(), c(v)).unwrap()
    }

    #[test]
    fn lefschetz_l_examples() {
        let ch = chart();
        let one = TwistedForm::plain(DifferentialForm::scalar(c(int(1))));
        let l1 = lefschetz_l(&ch, &one).unwrap();
        assert_eq!(l1.base, *ch.omega());
        assert_eq!(l1.ell_power, -1);
        let dx1dx2 = TwistedForm::plain(e(&[0, 2], int(1)));
        assert!(lefschetz_l(&ch, &dx1dx2).unwrap().base.is_zero());
        let f = ch.fiber();
        assert_eq!(f.l_matrix(1).rank(), 4);
    }

    #[test]
    fn lefschetz_lambda_examples() {
        let ch = chart();
        let w = lefschetz_lambda(&ch, &TwistedForm::plain(ch.omega().clone())).unwrap();
        assert_eq!(w.base, DifferentialForm::scalar(c(int(2))));
        assert_eq!(w.ell_power, 1);
        assert!(lefschetz_lambda(&ch, &TwistedForm::plain(e(&[0, 2], int(1)))).unwrap().base.is_zero());
        let prim = &e(&[0, 1], int(1)) - &e(&[2, 3], int(1));
        assert!(lefschetz_lambda(&ch, &TwistedForm::plain(prim)).unwrap().base.is_zero());
        assert!(matches!(
            lefschetz_lambda(&ch, &TwistedForm::plain(e(&[0], int(1)))),
            Err(Error::DegreeUnderflow { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let ch = chart();
        let p = primitive_projection(&ch, &TwistedForm::plain(e(&[0, 1], int(1)))).unwrap();
        assert_eq!(p.base, &e(&[0, 1], rat(1, 2)) - &e(&[2, 3], rat(1, 2)));
        assert!(primitive_projection(&ch, &TwistedForm::plain(ch.omega().clone())).unwrap().base.is_zero());
        let q = TwistedForm::plain(e(&[0, 2], int(3)));
        assert_eq!(primitive_projection(&ch, &q).unwrap(), q);
    }

    #[test]
    fn decomposition_examples() {
        let ch = chart();
        let parts = full_decomposition(&ch, &TwistedForm::plain(e(&[0, 1], int(1)))).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].base, &e(&[0, 1], rat(1, 2)) - &e(&[2, 3], rat(1, 2)));
        assert_eq!(parts[1].base, DifferentialForm::scalar(c(rat(1, 2))));
        assert_eq!(parts[1].ell_power, 1);
        assert_eq!(reassemble_decomposition(&ch, &parts, 2).unwrap(), e(&[0, 1], int(1)));
        // k > n
        let top = e(&[0, 1, 2], int(1));
        let parts = full_decomposition(&ch, &TwistedForm::plain(top.clone())).unwrap();
        assert_eq!(reassemble_decomposition(&ch, &parts, 3).unwrap(), top);
    }

    #[test]
    fn primitive_dimensions() {
        for n in 2..=3 {
            let f = SymplecticFiber::standard(n);
            for j in 0..=2 * n {
                assert_eq!(f.primitive_basis(j).len(), primitive_dim(n, j), "n={n} j={j}");
            }
        }
        // C(6,3) = dim Λ³₀ + dim Λ¹₀ = 14 + 6
        assert_eq!(primitive_dim(3, 3) + primitive_dim(3, 1), 20);
        assert_eq!((0..=4).map(|j| primitive_dim(2, j)).collect::<Vec<_>>(), vec![1, 4, 5, 4, 1]);
    }

    #[test]
    fn projectors_are_idempotent() {
        let f = SymplecticFiber::standard(3);
        for j in 0..=6 {
            let p = f.projector(j);
            assert_eq!(p.mul(p), *p);
        }
    }
}
