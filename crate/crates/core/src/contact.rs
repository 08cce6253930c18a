//! Model contact charts `M × ℝ` with `α = dt + β`, the Levi form, the
//! tensorial map ∂, the bundles `H^k_#` and lifts of cs-compatible linear maps.
//!
//! Coordinates are `(x1, y1, …, xn, yn, t)`; `t` is the last axis. The Reeb
//! field may be rescaled to `ξ = λ∂t`, in which case `Q*` is trivialised by
//! `α_ξ = α/λ`.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coefficients::{int, Coefficient, Poly, Rational, Ring};
use crate::error::{Error, Result};
use crate::forms::{split_alpha, DifferentialForm, MultiIndex, PolyVectorField};
use crate::lefschetz::{gram_matrix, SymplecticFiber};
use crate::linalg::DenseMatrix;
use crate::sections::{Fiber, Twist};

/// How the contact condition is certified at construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContactCheck {
    /// Origin plus five seeded random rational points (polynomial ring), or
    /// the mean of the top coefficient (trigonometric ring).
    #[default]
    Points,
    /// The top coefficient must be a nonzero constant.
    Symbolic,
}

#[derive(Clone, Debug)]
pub struct ContactChart {
    n: usize,
    ring: Ring,
    beta: DifferentialForm,
    alpha: DifferentialForm,
    xi_scale: Rational,
    xi: PolyVectorField,
    alpha_xi: DifferentialForm,
    fiber: Option<Arc<SymplecticFiber>>,
}

/// `α = dt + β` on `2n + 1` coordinates. `β` may be given on the `2n` base
/// coordinates or already on the contact chart; it must be dt-free and
/// t-independent with nondegenerate `dβ`.
pub fn contactify(n: usize, beta: &DifferentialForm, ring: Ring) -> Result<ContactChart> {
    contactify_with(n, beta, ring, ContactCheck::Points)
}

pub fn contactify_with(n: usize, beta: &DifferentialForm, ring: Ring, check: ContactCheck) -> Result<ContactChart> {
    if n < 2 {
        return Err(Error::Config("n must be at least 2".into()));
    }
    let m = 2 * n + 1;
    if beta.ring() != ring {
        return Err(Error::RingMismatch(format!("β uses the {} ring, chart asks for {ring}", beta.ring())));
    }
    if beta.degree() != 1 {
        return Err(Error::NotCsPotential(format!("β has degree {}", beta.degree())));
    }
    let beta = match beta.nvars() {
        k if k == m => beta.clone(),
        k if k == m - 1 => beta.change_dimension(m)?,
        k => return Err(Error::ChartMismatch(format!("β lives on {k} coordinates, expected {} or {m}", m - 1))),
    };
    let t = 2 * n;
    if beta.terms().keys().any(|i| i.contains(t)) {
        return Err(Error::NotCsPotential("β contains dt".into()));
    }
    if beta.terms().values().any(|c| !c.partial_derivative(t).map(|d| d.is_zero()).unwrap_or(false)) {
        return Err(Error::NotCsPotential("β depends on t".into()));
    }
    let dt = DifferentialForm::dx(m, ring, t)?;
    let alpha = &dt + &beta;
    let dalpha = alpha.exterior_derivative();
    let mut top = alpha.clone();
    for _ in 0..n {
        top = top.wedge(&dalpha)?;
    }
    let full = MultiIndex::new(&(0..m).collect::<Vec<_>>())?;
    let coef = top.coefficient(full);
    certify_nonvanishing(&coef, check)?;

    let fiber = if dalpha.terms().values().all(|c| c.constant_value().is_some()) {
        Some(Arc::new(SymplecticFiber::from_form(&dalpha, 2 * n)?))
    } else {
        None
    };
    let xi = PolyVectorField::coordinate(m, ring, t)?;
    Ok(ContactChart {
        n,
        ring,
        beta,
        alpha: alpha.clone(),
        xi_scale: Rational::one(),
        xi,
        alpha_xi: alpha,
        fiber,
    })
}

fn certify_nonvanishing(coef: &Coefficient, check: ContactCheck) -> Result<()> {
    let degenerate = || Error::NotCsPotential("dβ is degenerate (α∧(dα)^n vanishes)".into());
    match check {
        ContactCheck::Symbolic => match coef.constant_value() {
            Some(v) if !v.is_zero() => Ok(()),
            Some(_) => Err(degenerate()),
            None => Err(Error::NotCsPotential("top coefficient of α∧(dα)^n is not a nonzero constant".into())),
        },
        ContactCheck::Points => match coef {
            Coefficient::Poly(p) => {
                let nv = p.nvars();
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
                let mut points = vec![vec![Rational::zero(); nv]];
                for _ in 0..5 {
                    points.push(
                        (0..nv)
                            .map(|_| Rational::new(rng.random_range(-7i64..=7).into(), rng.random_range(1i64..=5).into()))
                            .collect(),
                    );
                }
                for pt in points {
                    if p.evaluate(&pt)?.is_zero() {
                        return Err(degenerate());
                    }
                }
                Ok(())
            }
            Coefficient::Trig(t) => {
                if t.mean().is_zero() {
                    Err(degenerate())
                } else {
                    Ok(())
                }
            }
        },
    }
}

impl ContactChart {
    /// The standard chart `β = Σ x_i dy_i`.
    pub fn standard(n: usize) -> Result<Self> {
        let m = 2 * n;
        let terms = (0..n).map(|i| (MultiIndex::single(2 * i + 1), Coefficient::from(Poly::var(m, 2 * i).expect("axis"))));
        let beta = DifferentialForm::from_terms(m, Ring::Poly, 1, terms)?;
        contactify(n, &beta, Ring::Poly)
    }

    /// Same chart with Reeb field `λ∂t`.
    pub fn with_xi_scale(&self, lambda: Rational) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::Config("ξ scale must be nonzero".into()));
        }
        let mut out = self.clone();
        out.xi = PolyVectorField::coordinate(self.nvars(), self.ring, self.t_axis())?.scale(&lambda);
        out.alpha_xi = self.alpha.scale(&(Rational::one() / &lambda));
        out.xi_scale = lambda;
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        2 * self.n + 1
    }

    pub fn t_axis(&self) -> usize {
        2 * self.n
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn beta(&self) -> &DifferentialForm {
        &self.beta
    }

    /// `dt + β`.
    pub fn alpha(&self) -> &DifferentialForm {
        &self.alpha
    }

    /// Reeb field `λ∂t`.
    pub fn xi(&self) -> &PolyVectorField {
        &self.xi
    }

    pub fn xi_scale(&self) -> &Rational {
        &self.xi_scale
    }

    /// `α/λ`, dual to ξ.
    pub fn alpha_xi(&self) -> &DifferentialForm {
        &self.alpha_xi
    }

    pub fn dbeta(&self) -> DifferentialForm {
        self.beta.exterior_derivative()
    }

    /// Fiberwise Lefschetz algebra of `dβ` on H; requires constant `dβ`.
    pub fn fiber(&self) -> Result<&Arc<SymplecticFiber>> {
        self.fiber
            .as_ref()
            .ok_or_else(|| Error::Unsupported("fiberwise operations need constant dβ".into()))
    }

    /// Weights `(1, …, 1, 2)` of the coordinates.
    pub fn var_weights(&self) -> Vec<u32> {
        let mut w = vec![1; 2 * self.n];
        w.push(2);
        w
    }

    /// Frame `X_v = ∂_v − β(∂_v)∂t` of H over the base coordinates.
    pub fn h_frame(&self) -> Result<Vec<PolyVectorField>> {
        let m = self.nvars();
        let t = self.t_axis();
        (0..2 * self.n)
            .map(|v| {
                let bv = self.beta.coefficient(MultiIndex::single(v));
                PolyVectorField::from_terms(
                    m,
                    self.ring,
                    1,
                    [(MultiIndex::single(v), Coefficient::one(self.ring, m)), (MultiIndex::single(t), -&bv)],
                )
            })
            .collect()
    }

    /// `(h, a)` with `form = h + α_ξ ∧ a`, both dt-free.
    pub fn split(&self, form: &DifferentialForm) -> (DifferentialForm, DifferentialForm) {
        split_alpha(form, &self.alpha_xi, &self.xi)
    }

    /// `d_H φ = d_b φ − β ∧ ∂_t φ`, the dt-free part of `dφ` for dt-free φ.
    pub fn d_h(&self, form: &DifferentialForm) -> DifferentialForm {
        self.split(&form.exterior_derivative()).0
    }

    /// Pads a base form (on `2n` coordinates) to the contact chart.
    pub fn pull_up(&self, form: &DifferentialForm) -> Result<DifferentialForm> {
        form.change_dimension(self.nvars())
    }

    /// Inverse of [`ContactChart::pull_up`] for dt-free, t-independent forms.
    pub fn push_down(&self, form: &DifferentialForm) -> Result<DifferentialForm> {
        let t = self.t_axis();
        if form.terms().keys().any(|i| i.contains(t)) {
            return Err(Error::ChartMismatch("form contains dt".into()));
        }
        if !form.lie_derivative(&PolyVectorField::coordinate(self.nvars(), self.ring, t)?)?.is_zero() {
            let lie = form.lie_derivative(&self.xi)?;
            let (idx, c) = lie.terms().iter().next().expect("nonzero");
            return Err(Error::NotReebInvariant(format!("({c}) at {idx}")));
        }
        form.change_dimension(2 * self.n)
    }
}

/// Element of `Γ(Λ^k H*)` (`q_power = 0`) or `Γ(Λ^k H* ⊗ Q*)` (`q_power = −1`),
/// represented by a dt-free form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HForm {
    pub form: DifferentialForm,
    pub q_power: i32,
}

impl HForm {
    pub fn new(chart: &ContactChart, form: DifferentialForm, q_power: i32) -> Result<Self> {
        if !(q_power == 0 || q_power == -1) {
            return Err(Error::Config(format!("Q-power {q_power} is not 0 or -1")));
        }
        if form.nvars() != chart.nvars() {
            return Err(Error::ChartMismatch("H-form lives on a different chart".into()));
        }
        if form.terms().keys().any(|i| i.contains(chart.t_axis())) {
            return Err(Error::ChartMismatch("H-forms have no dt component".into()));
        }
        Ok(HForm { form, q_power })
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    /// The contact-chart form: `form` or `α_ξ ∧ form`.
    pub fn to_form(&self, chart: &ContactChart) -> Result<DifferentialForm> {
        if self.q_power == 0 {
            Ok(self.form.clone())
        } else {
            chart.alpha_xi().wedge(&self.form)
        }
    }
}

/// Matrix of a bilinear map on the frame of H, with function entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameMatrix {
    pub entries: Vec<Vec<Coefficient>>,
}

impl FrameMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// The constant matrix, when every entry is constant.
    pub fn constant(&self) -> Option<DenseMatrix> {
        let rows: Option<Vec<Vec<Rational>>> =
            self.entries.iter().map(|r| r.iter().map(|c| c.constant_value()).collect()).collect();
        rows.map(DenseMatrix::from_rows)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let k = self.size();
        (0..k).all(|i| (0..k).all(|j| (&self.entries[i][j] + &self.entries[j][i]).is_zero()))
    }

    pub fn neg(&self) -> FrameMatrix {
        FrameMatrix { entries: self.entries.iter().map(|r| r.iter().map(|c| -c).collect()).collect() }
    }
}

/// `𝓛(X_v, X_w) = α_ξ([X_v, X_w])`, values in Q trivialised by ξ.
pub fn levi_form(chart: &ContactChart) -> Result<FrameMatrix> {
    let frame = chart.h_frame()?;
    let k = frame.len();
    let mut entries = vec![vec![Coefficient::zero(chart.ring(), chart.nvars()); k]; k];
    for v in 0..k {
        for w in 0..k {
            let br = frame[v].bracket(&frame[w])?;
            // α_ξ(V) = Σ_a (α_ξ)_a V^a
            let mut acc = Coefficient::zero(chart.ring(), chart.nvars());
            for (idx, c) in chart.alpha_xi().terms() {
                acc = &acc + &(c * &br.component(idx.axes()[0]));
            }
            entries[v][w] = acc;
        }
    }
    let fm = FrameMatrix { entries };
    let degenerate = match fm.constant() {
        Some(m) => m.determinant().is_zero(),
        None => match chart.ring() {
            Ring::Poly => {
                let origin = vec![Rational::zero(); chart.nvars()];
                let vals: Result<Vec<Vec<Rational>>> =
                    fm.entries.iter().map(|r| r.iter().map(|c| c.evaluate(&origin)).collect()).collect();
                DenseMatrix::from_rows(vals?).determinant().is_zero()
            }
            Ring::Trig => false,
        },
    };
    if degenerate {
        return Err(Error::ContactViolation("the Levi form is degenerate".into()));
    }
    Ok(fm)
}

/// `dα` evaluated on the frame of H.
pub fn dalpha_on_frame(chart: &ContactChart) -> Result<FrameMatrix> {
    let frame = chart.h_frame()?;
    let dalpha = chart.alpha().exterior_derivative();
    let k = frame.len();
    let mut entries = vec![vec![Coefficient::zero(chart.ring(), chart.nvars()); k]; k];
    for v in 0..k {
        for w in 0..k {
            // dα(X, Y) = i_Y i_X dα
            let a = dalpha.interior_product(&frame[v])?.interior_product(&frame[w])?;
            entries[v][w] = a.coefficient(MultiIndex::empty());
        }
    }
    Ok(FrameMatrix { entries })
}

/// The tensorial map `∂ : Λ^{k−1}H* ⊗ Q* → Λ^{k+1}H*`, `φ ↦ dα_ξ|_H ∧ φ`,
/// as a matrix on the lexicographic fiber bases of the base coordinates.
pub fn partial_map(chart: &ContactChart, k: usize) -> Result<DenseMatrix> {
    let n = chart.n();
    if k == 0 || k > 2 * n {
        return Err(Error::Config(format!("∂ is defined for 1 ≤ k ≤ {}", 2 * n)));
    }
    let fiber = chart.fiber()?;
    let inv = Rational::one() / chart.xi_scale();
    if k + 1 > 2 * n {
        return Ok(DenseMatrix::zeros(0, fiber.dim(k - 1)));
    }
    Ok(fiber.l_matrix(k - 1).scale(&inv))
}

/// Fiber basis of `H^k_# = ker ∂ / im ∂`: `Λ^k_0 H*` for `k ≤ n`, and
/// `Λ^{k−1}_0 H* ⊗ Q*` for `k > n`.
pub fn h_cohomology_basis(chart: &ContactChart, k: usize) -> Result<Arc<Fiber>> {
    let n = chart.n();
    if k > 2 * n + 1 {
        return Err(Error::Config(format!("H^k_# is defined for k ≤ {}", 2 * n + 1)));
    }
    let fiber = chart.fiber()?;
    let (deg, twist) = if k <= n { (k, Twist::Plain) } else { (k - 1, Twist::QStar) };
    Ok(Arc::new(Fiber::new(format!("H{k}#"), 2 * n, deg, twist, fiber.primitive_basis(deg))?))
}

/// Lift `Φ(v, t) = (φ(v), λt + f(v))` of a linear cs-compatible substitution.
#[derive(Clone, Debug)]
pub struct LiftMap {
    /// Components of Φ as polynomials on chart B (one per coordinate of A).
    pub components: Vec<Poly>,
    pub lambda: Rational,
    pub f: Poly,
    pub linear: DenseMatrix,
}

impl LiftMap {
    /// `Φ*` of a polynomial form on chart A.
    pub fn pullback(&self, form: &DifferentialForm) -> Result<DifferentialForm> {
        form.pullback(&self.components)
    }
}

/// Builds Φ from a linear substitution `v ↦ M v` with `M*(dβ_A) = λ dβ_B` by
/// integrating the closed form `λβ_B − φ*β_A`.
pub fn lift_construction(a: &ContactChart, b: &ContactChart, linear: &DenseMatrix) -> Result<LiftMap> {
    if a.ring() != Ring::Poly || b.ring() != Ring::Poly {
        return Err(Error::Unsupported("lifts are built on polynomial charts".into()));
    }
    if a.n() != b.n() {
        return Err(Error::ChartMismatch("charts of different dimension".into()));
    }
    let n2 = 2 * a.n();
    let m = n2 + 1;
    if linear.rows() != n2 || linear.cols() != n2 {
        return Err(Error::Config(format!("substitution must be a {n2}×{n2} matrix")));
    }
    let mut base: Vec<Poly> = (0..n2)
        .map(|i| {
            let terms = (0..n2)
                .filter(|&j| !linear.get(i, j).is_zero())
                .map(|j| {
                    let mut e = vec![0; m];
                    e[j] = 1;
                    (e, linear.get(i, j).clone())
                });
            Poly::from_terms(m, terms).expect("linear component")
        })
        .collect();
    base.push(Poly::var(m, n2)?);

    // base part only: t ↦ t
    let pulled_dbeta = a.dbeta().pullback(&base)?;
    let db = b.dbeta();
    let ga = gram_matrix(&pulled_dbeta, n2).map_err(|e| Error::NotCsCompatible(e.to_string()))?;
    let gb = gram_matrix(&db, n2).map_err(|e| Error::NotCsCompatible(e.to_string()))?;
    let (r, c) = (0..n2)
        .flat_map(|r| (0..n2).map(move |c| (r, c)))
        .find(|&(r, c)| !gb.get(r, c).is_zero())
        .ok_or_else(|| Error::NotCsCompatible("dβ_B vanishes".into()))?;
    let lambda = ga.get(r, c) / gb.get(r, c);
    if lambda.is_zero() || ga != gb.scale(&lambda) {
        return Err(Error::NotCsCompatible("φ*(dβ_A) is not a multiple of dβ_B".into()));
    }

    let theta = &b.beta().scale(&lambda) - &a.beta().pullback(&base)?;
    if !theta.exterior_derivative().is_zero() {
        return Err(Error::Internal("λβ_B − φ*β_A is not closed".into()));
    }
    let f = integrate_exact(&theta)?;
    let df = DifferentialForm::scalar(f.clone().into()).exterior_derivative();
    if df != theta {
        return Err(Error::Internal("radial integration failed".into()));
    }

    let mut components = base;
    let t = &Poly::var(m, n2)?.scale(&lambda) + &f;
    components[n2] = t;
    let lift = LiftMap { components, lambda: lambda.clone(), f, linear: linear.clone() };
    if lift.pullback(a.alpha())? != b.alpha().scale(&lambda) {
        return Err(Error::Internal("Φ*α_A ≠ λα_B".into()));
    }
    Ok(lift)
}

/// Potential `f` with `df = θ` for a closed polynomial 1-form, normalised by
/// `f(0) = 0` (radial homotopy).
pub fn integrate_exact(theta: &DifferentialForm) -> Result<Poly> {
    let nv = theta.nvars();
    let mut terms = Vec::new();
    for (idx, c) in theta.terms() {
        let i = idx.axes()[0];
        let p = c.as_poly().ok_or_else(|| Error::Unsupported("integration of trigonometric forms".into()))?;
        for (e, v) in p.terms() {
            let deg: u32 = e.iter().sum();
            let mut e2 = e.clone();
            e2[i] += 1;
            terms.push((e2, v / int(deg as i64 + 1)));
        }
    }
    Poly::from_terms(nv, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::rat;

    fn base_form(n: usize, entries: &[(usize, Poly)]) -> DifferentialForm {
        DifferentialForm::from_terms(2 * n, Ring::Poly, 1, entries.iter().map(|(a, p)| (MultiIndex::single(*a), Coefficient::from(p.clone()))))
            .unwrap()
    }

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(2 * n, i).unwrap()
    }

    #[test]
    fn standard_chart_volume() {
        let ch = ContactChart::standard(2).unwrap();
        let da = ch.alpha().exterior_derivative();
        let top = ch.alpha().wedge(&da).unwrap().wedge(&da).unwrap();
        let c = top.coefficient(MultiIndex::new(&[0, 1, 2, 3, 4]).unwrap()).constant_value().unwrap();
        assert!(c == int(2) || c == int(-2));
    }

    #[test]
    fn symmetric_potential_is_valid() {
        let n = 2;
        let h = rat(1, 2);
        let beta = base_form(
            n,
            &[(1, x(n, 0).scale(&h)), (0, x(n, 1).scale(&-h.clone())), (3, x(n, 2).scale(&h)), (2, x(n, 3).scale(&-h.clone()))],
        );
        let ch = contactify(n, &beta, Ring::Poly).unwrap();
        assert_eq!(ch.dbeta(), ContactChart::standard(2).unwrap().dbeta());
    }

    #[test]
    fn degenerate_potential_rejected() {
        let beta = base_form(2, &[(1, x(2, 0))]);
        let err = contactify(2, &beta, Ring::Poly).unwrap_err();
        assert!(err.to_string().contains("not a cs potential"));
        assert!(contactify_with(2, &beta, Ring::Poly, ContactCheck::Symbolic).is_err());
    }

    #[test]
    fn levi_and_dalpha() {
        let ch = ContactChart::standard(2).unwrap();
        let levi = levi_form(&ch).unwrap().constant().unwrap();
        let da = dalpha_on_frame(&ch).unwrap().constant().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let d = if i == j { int(1) } else { int(0) };
                assert_eq!(*levi.get(2 * i, 2 * j + 1), -d.clone());
                assert_eq!(*levi.get(2 * i, 2 * j), int(0));
                assert_eq!(*levi.get(2 * i + 1, 2 * j + 1), int(0));
                assert_eq!(*da.get(2 * i, 2 * j + 1), d);
            }
        }
        assert!(levi.add(&levi.transpose()).is_zero());
        assert_eq!(levi, da.scale(&int(-1)));
    }

    #[test]
    fn partial_map_ranks() {
        for n in 2..=3 {
            let ch = ContactChart::standard(n).unwrap();
            for k in 1..=2 * n {
                let p = partial_map(&ch, k).unwrap();
                let r = p.rank();
                if k <= n {
                    assert_eq!(r, p.cols(), "injective n={n} k={k}");
                }
                if k >= n {
                    assert_eq!(r, p.rows(), "surjective n={n} k={k}");
                }
            }
        }
        let ch = ContactChart::standard(2).unwrap();
        let p = partial_map(&ch, 1).unwrap();
        // 1 ↦ dx1∧dy1 + dx2∧dy2
        let col = p.column(0);
        let idx = MultiIndex::all(4, 2);
        for (i, m) in idx.iter().enumerate() {
            let want = if *m == MultiIndex::new(&[0, 1]).unwrap() || *m == MultiIndex::new(&[2, 3]).unwrap() { int(1) } else { int(0) };
            assert_eq!(col[i], want);
        }
    }

    #[test]
    fn h_dims() {
        let ch = ContactChart::standard(2).unwrap();
        let dims: Vec<usize> = (0..=5).map(|k| h_cohomology_basis(&ch, k).unwrap().dim()).collect();
        assert_eq!(dims, vec![1, 4, 5, 5, 4, 1]);
        let f = h_cohomology_basis(&ch, 2).unwrap();
        let v = {
            let mut v = vec![int(0); 6];
            v[f.position(MultiIndex::new(&[0, 2]).unwrap()).unwrap()] = int(1);
            v
        };
        assert!(f.coords(&v).is_some());
    }

    #[test]
    fn lift_examples() {
        let n = 2;
        let std = ContactChart::standard(n).unwrap();
        // β + d(x1 y2)
        let g = &x(n, 0) * &x(n, 3);
        let dg = DifferentialForm::scalar(g.clone().into()).exterior_derivative();
        let a = contactify(n, &(&std.push_down(std.beta()).unwrap() + &dg), Ring::Poly).unwrap();
        let lift = lift_construction(&a, &std, &DenseMatrix::identity(4)).unwrap();
        assert_eq!(lift.lambda, int(1));
        let g5 = DifferentialForm::scalar(g.into()).change_dimension(5).unwrap();
        assert_eq!(Coefficient::from(lift.f.clone()), -&g5.coefficient(MultiIndex::empty()));

        let mut swap = DenseMatrix::zeros(4, 4);
        for (i, j) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
            swap.set(i, j, int(1));
        }
        let lift = lift_construction(&std, &std, &swap).unwrap();
        assert_eq!(lift.lambda, int(1));
        assert!(lift.f.is_zero());

        let mut scale = DenseMatrix::identity(4);
        scale.set(0, 0, int(2));
        scale.set(2, 2, int(2));
        let lift = lift_construction(&std, &std, &scale).unwrap();
        assert_eq!(lift.lambda, int(2));
        assert_eq!(lift.pullback(std.alpha()).unwrap(), std.alpha().scale(&int(2)));
    }

    #[test]
    fn split_commutes_with_reeb_flow() {
        let ch = ContactChart::standard(2).unwrap();
        let m = 5;
        let f = Coefficient::from(&Poly::var(m, 0).unwrap() * &Poly::var(m, 4).unwrap());
        let psi = DifferentialForm::monomial(MultiIndex::new(&[1, 4]).unwrap(), f).unwrap();
        let lie = psi.lie_derivative(ch.xi()).unwrap();
        let (h, _) = ch.split(&psi);
        let (hl, _) = ch.split(&lie);
        assert_eq!(hl, h.lie_derivative(ch.xi()).unwrap());
    }
}
