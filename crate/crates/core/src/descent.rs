//! Push-down of the Rumin complex to a cs chart, the intrinsic
//! Rumin–Seshadri operators, the total complex and the spectral-sequence
//! oracle built from it.
//!
//! ℓ is represented by the parallel generator `s = ω`; an ℓ-valued form is a
//! [`TwistedForm`] and `𝛀 ∧ (ψ ⊗ s) = ω ∧ ψ`. For a Reeb field `ξ = λ∂t` the
//! section `σ_ξ` of ℓ* takes the value `λ` on `s`.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::Rational;
use crate::contact::ContactChart;
use crate::error::{Error, Result};
use crate::forms::DifferentialForm;
use crate::grading::Truncation;
use crate::lefschetz::{CsChart, CsModel, TwistedForm};
use crate::linalg::DenseMatrix;
use crate::operator::OperatorMatrix;
use crate::rumin::{coordinate_multipliers, operator_order, rumin_operator};
use crate::sections::{Fiber, SectionSpace, Twist};

/// Rows of the table of isomorphisms onto `ker L_ξ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsoRow {
    /// `Γ(Λ^k H*) ≅ Ω^k(M)`, `φ ↦ q*φ|_H`.
    Horizontal,
    /// `Γ(Λ^k_0 H*) ≅ Ω^k_0(M)`.
    HorizontalPrimitive,
    /// `Γ(Λ^k H* ⊗ Q*) ≅ Ω^k(M)` (or `Ω^k(M, ℓ)` via `σ_ξ`), `φ ↦ α ∧ q*φ`.
    Vertical,
    /// `Γ(Λ^k_0 H* ⊗ Q*) ≅ Ω^k_0(M)` (or `Ω^k_0(M, ℓ)`).
    VerticalPrimitive,
    /// `Ω^k(M_#) ≅ Ω^k(M) ⊕ Ω^{k−1}(M)`, `(φ₁, φ₂) ↦ q*φ₁ + α ∧ q*φ₂`.
    Full,
}

impl IsoRow {
    pub const ALL: [IsoRow; 5] =
        [IsoRow::Horizontal, IsoRow::HorizontalPrimitive, IsoRow::Vertical, IsoRow::VerticalPrimitive, IsoRow::Full];
}

fn check_pair(contact: &ContactChart, cs: &CsChart) -> Result<()> {
    if cs.model() != CsModel::Affine || contact.n() != cs.n() {
        return Err(Error::ChartMismatch("descent needs an affine cs chart of the same dimension".into()));
    }
    if contact.dbeta() != contact.pull_up(cs.omega())? {
        return Err(Error::ChartMismatch("dβ of the contact chart is not ω".into()));
    }
    Ok(())
}

/// `σ_ξ` applied to an ℓ-valued form (power 1), identity on plain forms.
pub fn sigma_xi(contact: &ContactChart, phi: &TwistedForm) -> Result<DifferentialForm> {
    match phi.ell_power {
        0 => Ok(phi.base.clone()),
        1 => Ok(phi.base.scale(contact.xi_scale())),
        p => Err(Error::Unsupported(format!("σ_ξ on ℓ^{p}-valued forms"))),
    }
}

fn primitive_at(cs: &CsChart, phi: &DifferentialForm, ell: i32) -> Result<bool> {
    let fiber = cs.fiber();
    let k = phi.degree();
    // Λ-kernel for plain forms of degree ≤ n and L-kernel otherwise
    if ell == 0 && k <= cs.n() {
        Ok(fiber.project(phi)? == *phi)
    } else if k + 2 > 2 * cs.n() {
        Ok(true)
    } else {
        Ok(fiber.wedge_omega(phi)?.is_zero())
    }
}

/// The isomorphism of `row` from base objects to t-independent objects on the
/// contact chart. `Full` takes `[φ₁, φ₂]`; the other rows take one form.
pub fn iso_up(contact: &ContactChart, cs: &CsChart, row: IsoRow, parts: &[TwistedForm]) -> Result<DifferentialForm> {
    let want = if row == IsoRow::Full { 2 } else { 1 };
    if parts.len() != want {
        return Err(Error::BasisMismatch(format!("row {row:?} takes {want} form(s)")));
    }
    let out = match row {
        IsoRow::Horizontal | IsoRow::HorizontalPrimitive => {
            let p = &parts[0];
            if p.ell_power != 0 {
                return Err(Error::BasisMismatch("horizontal rows take plain forms".into()));
            }
            if row == IsoRow::HorizontalPrimitive && !primitive_at(cs, &p.base, 0)? {
                return Err(Error::NotPrimitive(format!("{}", p.base)));
            }
            contact.pull_up(&p.base)?
        }
        IsoRow::Vertical | IsoRow::VerticalPrimitive => {
            let p = &parts[0];
            if row == IsoRow::VerticalPrimitive && !primitive_at(cs, &p.base, p.ell_power)? {
                return Err(Error::NotPrimitive(format!("{}", p.base)));
            }
            contact.alpha_xi().wedge(&contact.pull_up(&sigma_xi(contact, p)?)?)?
        }
        IsoRow::Full => {
            if parts.iter().any(|p| p.ell_power != 0) {
                return Err(Error::BasisMismatch("the full row takes plain forms".into()));
            }
            let a = contact.pull_up(&parts[0].base)?;
            let b = contact.alpha_xi().wedge(&contact.pull_up(&parts[1].base)?)?;
            &a + &b
        }
    };
    if !out.lie_derivative(contact.xi())?.is_zero() {
        return Err(Error::Internal("iso_up image is not Reeb invariant".into()));
    }
    Ok(out)
}

/// Two-sided inverse of [`iso_up`]; `ell_power` selects the ℓ-valued
/// variant of the vertical rows.
pub fn iso_down(contact: &ContactChart, cs: &CsChart, row: IsoRow, psi: &DifferentialForm, ell_power: i32) -> Result<Vec<TwistedForm>> {
    let lie = psi.lie_derivative(contact.xi())?;
    if let Some((idx, c)) = lie.terms().iter().next() {
        return Err(Error::NotReebInvariant(format!("({c}) at {idx}")));
    }
    let (h, a) = contact.split(psi);
    match row {
        IsoRow::Horizontal | IsoRow::HorizontalPrimitive => {
            if !a.is_zero() {
                return Err(Error::BasisMismatch("horizontal sections are represented by dt-free forms".into()));
            }
            let phi = contact.push_down(&h)?;
            if row == IsoRow::HorizontalPrimitive && !primitive_at(cs, &phi, 0)? {
                return Err(Error::NotPrimitive(format!("{phi}")));
            }
            Ok(vec![TwistedForm::plain(phi)])
        }
        IsoRow::Vertical | IsoRow::VerticalPrimitive => {
            if !h.is_zero() {
                return Err(Error::BasisMismatch("form does not vanish on H".into()));
            }
            let mut phi = contact.push_down(&a)?;
            match ell_power {
                0 => {}
                1 => phi = phi.scale(&(Rational::one() / contact.xi_scale())),
                p => return Err(Error::Unsupported(format!("σ_ξ on ℓ^{p}-valued forms"))),
            }
            if row == IsoRow::VerticalPrimitive && !primitive_at(cs, &phi, ell_power)? {
                return Err(Error::NotPrimitive(format!("{phi}")));
            }
            Ok(vec![TwistedForm::new(phi, ell_power)])
        }
        IsoRow::Full => Ok(vec![TwistedForm::plain(contact.push_down(&h)?), TwistedForm::plain(contact.push_down(&a)?)]),
    }
}

/// Element of `𝓗^i`: a primitive form for `i ≤ n`, an ℓ-valued primitive
/// `(i−1)`-form for `i > n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescendedClass {
    pub degree: usize,
    pub payload: TwistedForm,
}

impl DescendedClass {
    pub fn new(cs: &CsChart, degree: usize, payload: TwistedForm) -> Result<Self> {
        let n = cs.n();
        let (pd, ell) = if degree <= n { (degree, 0) } else { (degree - 1, 1) };
        if payload.degree() != pd || payload.ell_power != ell {
            return Err(Error::BasisMismatch(format!("payload does not belong to 𝓗^{degree}")));
        }
        if !primitive_at(cs, &payload.base, ell)? {
            return Err(Error::NotPrimitive(format!("{}", payload.base)));
        }
        Ok(DescendedClass { degree, payload })
    }
}

/// Fiber of `𝓗^i` on the cs chart.
pub fn rs_fiber(cs: &CsChart, i: usize) -> Result<Arc<Fiber>> {
    let n = cs.n();
    if i > 2 * n + 1 {
        return Err(Error::Config(format!("𝓗^{i} does not exist for n = {n}")));
    }
    let f = cs.fiber();
    let (deg, twist) = if i <= n { (i, Twist::Plain) } else { (i - 1, Twist::Ell(1)) };
    Ok(Arc::new(Fiber::new(format!("RS{i}"), 2 * n, deg, twist, f.primitive_basis(deg))?))
}

pub fn rs_space(cs: &CsChart, i: usize, truncation: &Truncation) -> Result<SectionSpace> {
    if truncation.ring() != cs.ring() {
        return Err(Error::RingMismatch(format!("the {} model needs a {} truncation", cs.model(), cs.ring())));
    }
    SectionSpace::single(format!("RS{i}"), cs.nvars(), cs.var_weights(), rs_fiber(cs, i)?, truncation)
}

/// `D_i` of the descended complex on a payload, through the contact chart.
pub fn descend_apply(contact: &ContactChart, cs: &CsChart, i: usize, payload: &DifferentialForm) -> Result<DifferentialForm> {
    let n = cs.n();
    let (row_in, ell_in) = if i <= n { (IsoRow::HorizontalPrimitive, 0) } else { (IsoRow::VerticalPrimitive, 1) };
    let up = iso_up(contact, cs, row_in, &[TwistedForm::new(payload.clone(), ell_in)])?;
    let up_payload = if i <= n { up } else { contact.split(&up).1 };
    let out = rumin_operator(contact, i, &up_payload)?;
    let (row_out, ell_out) = if i < n { (IsoRow::HorizontalPrimitive, 0) } else { (IsoRow::VerticalPrimitive, 1) };
    let out_form = if i < n { out } else { contact.alpha_xi().wedge(&out)? };
    Ok(iso_down(contact, cs, row_out, &out_form, ell_out)?.remove(0).base)
}

pub fn descend_rumin(contact: &ContactChart, cs: &CsChart, i: usize, truncation: &Truncation) -> Result<OperatorMatrix> {
    check_pair(contact, cs)?;
    let src = rs_space(cs, i, truncation)?;
    let tgt = rs_space(cs, i + 1, truncation)?;
    OperatorMatrix::assemble_single(format!("D{i}"), &src, &tgt, |s| descend_apply(contact, cs, i, s))
}

/// `d^∇(φ ⊗ s^p) = dφ ⊗ s^p`.
pub fn nabla_twisted_d(psi: &TwistedForm) -> TwistedForm {
    TwistedForm::new(psi.base.exterior_derivative(), psi.ell_power)
}

/// `𝛀 ∧ ψ`: lowers the ℓ-power by one.
pub fn wedge_big_omega(cs: &CsChart, psi: &TwistedForm) -> Result<TwistedForm> {
    Ok(TwistedForm::new(cs.omega().wedge(&psi.base)?, psi.ell_power - 1))
}

/// Plain form represented by `ψ ⊗ s^p`, `p ≥ 0`.
pub fn untwist(cs: &CsChart, psi: &TwistedForm) -> Result<DifferentialForm> {
    if psi.ell_power < 0 {
        return Err(Error::Unsupported("untwisting powers of ℓ*".into()));
    }
    let mut out = psi.base.clone();
    for _ in 0..psi.ell_power {
        out = cs.omega().wedge(&out)?;
    }
    Ok(out)
}

/// `D` of the intrinsic complex on a payload: `Π₀ d` below the middle,
/// `d ∘ (𝛀∧)⁻¹ ∘ d` in the middle and `−d^∇` above.
pub fn rs_apply(cs: &CsChart, i: usize, payload: &DifferentialForm) -> Result<DifferentialForm> {
    let n = cs.n();
    let fiber = cs.fiber();
    let d = payload.exterior_derivative();
    if i < n {
        fiber.project(&d)
    } else if i == n {
        let psi = fiber.solve_middle(&d)?;
        Ok(psi.exterior_derivative())
    } else {
        Ok(-&d)
    }
}

pub fn rs_operator(cs: &CsChart, i: usize, truncation: &Truncation) -> Result<OperatorMatrix> {
    let src = rs_space(cs, i, truncation)?;
    let tgt = rs_space(cs, i + 1, truncation)?;
    OperatorMatrix::assemble_single(format!("D{i}"), &src, &tgt, |s| rs_apply(cs, i, s))
}

pub fn rs_complex(cs: &CsChart, truncation: &Truncation) -> Result<Vec<OperatorMatrix>> {
    (0..=2 * cs.n()).map(|i| rs_operator(cs, i, truncation)).collect()
}

/// Orders of `D_0, …, D_{2n}`, tested as in [`crate::rumin::rumin_orders`].
pub fn rs_orders(cs: &CsChart) -> Result<Vec<usize>> {
    if cs.model() != CsModel::Affine {
        return Err(Error::Unsupported("order tests use coordinate multipliers of the affine chart".into()));
    }
    let mult = coordinate_multipliers(cs.nvars());
    (0..=2 * cs.n())
        .map(|i| {
            let tr = Truncation::weight(rs_fiber(cs, i)?.weight() + 1);
            let space = rs_space(cs, i, &tr)?;
            let sections: Vec<DifferentialForm> = (0..space.dim()).map(|j| space.element_single(j)).collect();
            operator_order(|s| rs_apply(cs, i, s), &sections, &mult, 3)
        })
        .collect()
}

/// Comparison of the three constructions of `D_i` in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckRow {
    pub degree: usize,
    pub shape: (usize, usize),
    pub nnz: usize,
    pub descend_equals_rs: bool,
    pub fallback_equals_rs: bool,
    /// `(row, column, rs entry, other entry)` of the first disagreement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<(usize, usize, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crosscheck {
    pub n: usize,
    pub truncation: Truncation,
    pub rows: Vec<CrosscheckRow>,
}

impl Crosscheck {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.descend_equals_rs && r.fallback_equals_rs)
    }
}

/// `descend_rumin`, `rs_operator` and `ss_fallback` on one truncation.
pub fn crosscheck(contact: &ContactChart, cs: &CsChart, truncation: &Truncation) -> Result<Crosscheck> {
    let ss = ss_fallback(cs, truncation)?;
    let rows = (0..=2 * cs.n())
        .map(|i| {
            let rs = rs_operator(cs, i, truncation)?;
            let de = descend_rumin(contact, cs, i, truncation)?;
            let d1 = rs.first_difference(&de)?;
            let d2 = rs.first_difference(&ss[i])?;
            Ok(CrosscheckRow {
                degree: i,
                shape: (rs.nrows(), rs.ncols()),
                nnz: rs.nnz(),
                descend_equals_rs: d1.is_none(),
                fallback_equals_rs: d2.is_none(),
                counterexample: d1.or(d2).map(|(r, c, a, b)| (r, c, a.to_string(), b.to_string())),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Crosscheck { n: cs.n(), truncation: truncation.clone(), rows })
}

/// `(φ, ψ ⊗ s) ∈ Ω^k(M) ⊕ Ω^{k−1}(M, ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalElement {
    pub phi: DifferentialForm,
    pub psi: TwistedForm,
}

impl TotalElement {
    /// At `k = 0` the ψ slot holds a zero 0-form placeholder.
    pub fn new(phi: DifferentialForm, psi: DifferentialForm) -> Result<Self> {
        let placeholder = phi.degree() == 0 && psi.degree() == 0 && psi.is_zero();
        if phi.degree() != psi.degree() + 1 && !placeholder {
            return Err(Error::BasisMismatch("ψ must have degree one less than φ".into()));
        }
        Ok(TotalElement { phi, psi: TwistedForm::new(psi, 1) })
    }

    pub fn degree(&self) -> usize {
        self.phi.degree()
    }
}

/// `D̃(φ, ψ) = (dφ + 𝛀∧ψ, −d^∇ψ)`.
pub fn total_differential(cs: &CsChart, e: &TotalElement) -> Result<TotalElement> {
    let mut phi = e.phi.exterior_derivative();
    if e.phi.degree() == 0 {
        let psi = DifferentialForm::zero(phi.nvars(), phi.ring(), 0);
        return Ok(TotalElement { phi, psi: TwistedForm::new(psi, 1) });
    }
    phi = &phi + &untwist(cs, &wedge_big_omega(cs, &e.psi)?)?;
    let psi = -&nabla_twisted_d(&e.psi).base;
    Ok(TotalElement { phi, psi: TwistedForm::new(psi, 1) })
}

/// Forms of `T^k` as a two-part section `[φ, ψ]`. At `k = 0` the ψ slot is a
/// zero 0-form placeholder.
fn total_parts(cs: &CsChart, phi: &DifferentialForm, psi: &DifferentialForm) -> Result<(DifferentialForm, DifferentialForm)> {
    let e = TotalElement { phi: phi.clone(), psi: TwistedForm::new(psi.clone(), 1) };
    let out = total_differential(cs, &e)?;
    Ok((out.phi, out.psi.base))
}

/// Section space of the total complex in degree `k`.
pub fn total_space(cs: &CsChart, k: usize, truncation: &Truncation) -> Result<SectionSpace> {
    let m = cs.nvars();
    let a = Arc::new(Fiber::full(format!("A{k}"), m, k, Twist::Plain));
    let b = if k == 0 {
        Arc::new(Fiber::new("B0", m, 0, Twist::Ell(1), &[])?)
    } else {
        Arc::new(Fiber::full(format!("B{k}"), m, k - 1, Twist::Ell(1)))
    };
    SectionSpace::new(format!("T{k}"), m, cs.var_weights(), vec![a, b], truncation)
}

pub fn total_matrix(cs: &CsChart, k: usize, truncation: &Truncation) -> Result<OperatorMatrix> {
    let src = total_space(cs, k, truncation)?;
    let tgt = total_space(cs, k + 1, truncation)?;
    OperatorMatrix::assemble(format!("Dt{k}"), &src, &tgt, |parts| {
        let (p, q) = total_parts(cs, &parts[0], &parts[1])?;
        Ok(vec![p, q])
    })
}

/// Rumin–Seshadri operators obtained from the total complex by the
/// spectral sequence of the filtration with filtered part the ψ-slot: the
/// E₀ differential is `𝛀∧`, and representatives are corrected by solving
/// against `𝛀∧` on a fixed complement of its kernel.
pub fn ss_fallback(cs: &CsChart, truncation: &Truncation) -> Result<Vec<OperatorMatrix>> {
    let data = FallbackData::new(cs);
    (0..=2 * cs.n())
        .map(|i| {
            let src = rs_space(cs, i, truncation)?;
            let tgt = rs_space(cs, i + 1, truncation)?;
            OperatorMatrix::assemble_single(format!("D{i}"), &src, &tgt, |s| data.apply(cs, i, s))
        })
        .collect()
}

/// E₀ data per form degree, computed from the raw wedge and contraction
/// matrices.
struct FallbackData {
    n: usize,
    /// `coker 𝛀∧` representatives in `Λ^j` (empty for `j > n`).
    coker: Vec<Vec<Vec<Rational>>>,
    /// `ker 𝛀∧` in `Λ^j`.
    kernel: Vec<Vec<Vec<Rational>>>,
    /// complement of the kernel in `Λ^j`.
    complement: Vec<Vec<Vec<Rational>>>,
    l: Vec<DenseMatrix>,
}

impl FallbackData {
    fn new(cs: &CsChart) -> Self {
        let f = cs.fiber();
        let m = 2 * cs.n();
        let mut coker = Vec::new();
        let mut kernel = Vec::new();
        let mut complement = Vec::new();
        let mut l = Vec::new();
        for j in 0..=m {
            let lj = f.l_matrix(j).clone();
            let lam = f.lambda_matrix(j);
            kernel.push(lj.nullspace());
            complement.push(if j + 2 <= m {
                let lam2 = f.lambda_matrix(j + 2);
                (0..lam2.cols()).map(|c| lam2.column(c)).collect::<Vec<_>>()
            } else {
                Vec::new()
            });
            coker.push(if j <= cs.n() { lam.nullspace() } else { Vec::new() });
            l.push(lj);
        }
        // the complement is spanned by the image of Λ; keep a basis
        let complement = complement
            .into_iter()
            .map(|vs| {
                if vs.is_empty() {
                    return vs;
                }
                let dim = vs[0].len();
                let (r, piv) = DenseMatrix::from_columns(dim, &vs).transpose().rref();
                (0..piv.len()).map(|i| r.row(i)).collect()
            })
            .collect();
        FallbackData { n: cs.n(), coker, kernel, complement, l }
    }

    fn apply(&self, cs: &CsChart, i: usize, payload: &DifferentialForm) -> Result<DifferentialForm> {
        let m = cs.nvars();
        let ring = cs.ring();
        // embed
        let (phi, psi) = if i <= self.n {
            (payload.clone(), DifferentialForm::zero(m, ring, i.saturating_sub(1)))
        } else {
            (DifferentialForm::zero(m, ring, i), payload.clone())
        };
        let (ya, _) = total_parts(cs, &phi, &psi)?;
        let k1 = i + 1;
        // y_A = Σ γ e + 𝛀∧b', b' in the complement of ker 𝛀∧ on Λ^{i}
        // b' ∈ Ω^{i−1} ⊗ ℓ, so that 𝛀∧b' has degree i + 1
        let deg_b = i.saturating_sub(1);
        let full_a = Fiber::full("y", m, k1, Twist::Plain);
        let mut cols: Vec<Vec<Rational>> = self.coker.get(k1).cloned().unwrap_or_default();
        let ncoker = cols.len();
        let comp = if i == 0 { Vec::new() } else { self.complement[deg_b].clone() };
        if k1 <= m {
            for v in &comp {
                cols.push(self.l[deg_b].mul_vec(v));
            }
        }
        let mut b_prime = DifferentialForm::zero(m, ring, deg_b);
        let mut gamma_form = DifferentialForm::zero(m, ring, k1);
        if k1 <= m && !ya.is_zero() {
            let dim = full_a.indices().len();
            let sys = DenseMatrix::from_columns(dim, &cols);
            let full_b = Fiber::full("b", m, deg_b, Twist::Plain);
            for (scalar, vec) in full_a.decompose(&ya)? {
                let sol = sys
                    .solve(&vec)
                    .ok_or_else(|| Error::Internal("E₀ correction system is unsolvable".into()))?;
                let f = scalar.to_coefficient(m);
                let g: Vec<Rational> = {
                    let mut acc = vec![Rational::zero(); dim];
                    for (c, v) in sol[..ncoker].iter().zip(&cols[..ncoker]) {
                        for (a, x) in acc.iter_mut().zip(v) {
                            *a += c * x;
                        }
                    }
                    acc
                };
                gamma_form = &gamma_form + &full_a.combination_form(&g, &f);
                let mut bv = vec![Rational::zero(); full_b.indices().len()];
                for (c, v) in sol[ncoker..].iter().zip(&comp) {
                    for (a, x) in bv.iter_mut().zip(v) {
                        *a += c * x;
                    }
                }
                b_prime = &b_prime + &full_b.combination_form(&bv, &f);
            }
        }
        // x' = x − (0, b'), y' = D̃x'
        let psi2 = &psi - &b_prime;
        let (ya2, yb2) = total_parts(cs, &phi, &psi2)?;
        if k1 <= self.n {
            if ya2 != gamma_form {
                return Err(Error::Internal("corrected representative has a non-primitive part".into()));
            }
            return Ok(ya2);
        }
        if !ya2.is_zero() {
            return Err(Error::Internal("corrected representative is not in the filtered part".into()));
        }
        // read the ker 𝛀∧ component of y'_B in the basis [K, C]
        let deg = k1 - 1;
        let full = Fiber::full("k", m, deg, Twist::Plain);
        let dim = full.indices().len();
        let kern = &self.kernel[deg];
        let mut basis = kern.clone();
        basis.extend(self.complement[deg].iter().cloned());
        let sys = DenseMatrix::from_columns(dim, &basis);
        let mut out = DifferentialForm::zero(m, ring, deg);
        for (scalar, vec) in full.decompose(&yb2)? {
            let sol = sys.solve(&vec).ok_or_else(|| Error::Internal("kernel/complement system is unsolvable".into()))?;
            let mut kv = vec![Rational::zero(); dim];
            for (c, v) in sol[..kern.len()].iter().zip(kern) {
                for (a, x) in kv.iter_mut().zip(v) {
                    *a += c * x;
                }
            }
            out = &out + &full.combination_form(&kv, &scalar.to_coefficient(m));
        }
        Ok(out)
    }
}

/// Dimensions of the E₁ fibers `coker 𝛀∧ ⊕ ker 𝛀∧` of the total complex.
pub fn e1_fiber_dims(cs: &CsChart) -> Vec<usize> {
    let data = FallbackData::new(cs);
    let m = 2 * cs.n();
    (0..=m + 1)
        .map(|k| {
            let a = if k <= m { data.coker[k].len() } else { 0 };
            let b = if k >= 1 && k - 1 <= m { data.kernel[k - 1].len() } else { 0 };
            a + b
        })
        .collect()
}
