//! Rumin operators `D_k : Γ(H^k_#) → Γ(H^{k+1}_#)` on a contact chart, by
//! lifting a class to a form, correcting the lift with `α_ξ ∧ (·)`, applying
//! `d` and reading off the class of the result.
//!
//! Classes are stored by their payload: a primitive dt-free `k`-form for
//! `k ≤ n`, and the dt-free `(k−1)`-form `φ` of `α_ξ ∧ φ` for `k > n`.

use serde::{Deserialize, Serialize};

use crate::coefficients::{Coefficient, Poly};
use crate::contact::{h_cohomology_basis, ContactChart, LiftMap};
use crate::error::{Error, Result};
use crate::forms::DifferentialForm;
use crate::grading::Truncation;
use crate::operator::{OperatorMatrix, RankMethod};
use crate::sections::SectionSpace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuminClass {
    pub k: usize,
    pub payload: DifferentialForm,
}

impl RuminClass {
    pub fn new(chart: &ContactChart, k: usize, payload: DifferentialForm) -> Result<Self> {
        check_payload(chart, k, &payload)?;
        Ok(RuminClass { k, payload })
    }

    /// The representing form on the chart.
    pub fn lift(&self, chart: &ContactChart) -> Result<DifferentialForm> {
        lift(chart, self.k, &self.payload)
    }
}

fn payload_degree(n: usize, k: usize) -> usize {
    if k <= n {
        k
    } else {
        k - 1
    }
}

fn check_payload(chart: &ContactChart, k: usize, payload: &DifferentialForm) -> Result<()> {
    let n = chart.n();
    if k > 2 * n + 1 {
        return Err(Error::Config(format!("degree {k} exceeds {}", 2 * n + 1)));
    }
    if payload.degree() != payload_degree(n, k) || payload.nvars() != chart.nvars() {
        return Err(Error::BasisMismatch(format!("payload of degree {} offered at level {k}", payload.degree())));
    }
    if payload.terms().keys().any(|i| i.contains(chart.t_axis())) {
        return Err(Error::BasisMismatch("payload contains dt".into()));
    }
    if chart.fiber()?.project(payload)? != *payload {
        return Err(Error::NotPrimitive(format!("{payload}")));
    }
    Ok(())
}

/// Canonical representing form of a class.
pub fn lift(chart: &ContactChart, k: usize, payload: &DifferentialForm) -> Result<DifferentialForm> {
    if k <= chart.n() {
        Ok(payload.clone())
    } else {
        chart.alpha_xi().wedge(payload)
    }
}

/// Class of `dψ` for a representative ψ of a degree-`k` class, after the
/// correction step.
pub fn rumin_from_lift(chart: &ContactChart, k: usize, psi: &DifferentialForm) -> Result<DifferentialForm> {
    let n = chart.n();
    let fiber = chart.fiber()?;
    let (h, a) = chart.split(&psi.exterior_derivative());
    if k < n {
        return fiber.project(&h);
    }
    if k == n {
        // solve (dβ/λ) ∧ c = −h, so the corrected lift has no H-part
        let c = fiber.solve_middle(&h)?.scale(&-chart.xi_scale().clone());
        let corrected = psi + &chart.alpha_xi().wedge(&c)?;
        let (h2, a2) = chart.split(&corrected.exterior_derivative());
        if !h2.is_zero() {
            return Err(Error::Internal(format!("middle correction left {h2}")));
        }
        return Ok(a2);
    }
    if !h.is_zero() {
        return Err(Error::Internal(format!("lift of a degree-{k} class has H-part {h}")));
    }
    Ok(a)
}

/// `D_k` on a payload.
pub fn rumin_operator(chart: &ContactChart, k: usize, payload: &DifferentialForm) -> Result<DifferentialForm> {
    check_payload(chart, k, payload)?;
    rumin_from_lift(chart, k, &lift(chart, k, payload)?)
}

/// `D_k` computed from the non-canonical lift `σ + dβ∧ρ + α_ξ∧c` (`k ≤ n`).
pub fn rumin_operator_with_lift(
    chart: &ContactChart,
    k: usize,
    payload: &DifferentialForm,
    rho: Option<&DifferentialForm>,
    c: Option<&DifferentialForm>,
) -> Result<DifferentialForm> {
    check_payload(chart, k, payload)?;
    if k > chart.n() {
        return Err(Error::Unsupported("alternative lifts are only formed for k ≤ n".into()));
    }
    let mut psi = lift(chart, k, payload)?;
    if let Some(rho) = rho {
        psi = &psi + &chart.dbeta().wedge(rho)?;
    }
    if let Some(c) = c {
        psi = &psi + &chart.alpha_xi().wedge(c)?;
    }
    rumin_from_lift(chart, k, &psi)
}

/// Truncated section space of `H^k_#` on the chart.
pub fn rumin_space(chart: &ContactChart, k: usize, truncation: &Truncation) -> Result<SectionSpace> {
    if truncation.ring() != chart.ring() {
        return Err(Error::RingMismatch("truncation and chart use different rings".into()));
    }
    SectionSpace::single(format!("H{k}#"), chart.nvars(), chart.var_weights(), h_cohomology_basis(chart, k)?, truncation)
}

pub fn assemble_rumin_matrix(chart: &ContactChart, k: usize, truncation: &Truncation) -> Result<OperatorMatrix> {
    let src = rumin_space(chart, k, truncation)?;
    let tgt = rumin_space(chart, k + 1, truncation)?;
    OperatorMatrix::assemble_single(format!("D{k}"), &src, &tgt, |s| rumin_operator(chart, k, s))
}

/// All `D_0, …, D_{2n}`.
pub fn rumin_complex(chart: &ContactChart, truncation: &Truncation) -> Result<Vec<OperatorMatrix>> {
    (0..=2 * chart.n()).map(|k| assemble_rumin_matrix(chart, k, truncation)).collect()
}

/// Differential order of a linear operator on sections, from iterated
/// commutators with multiplication operators: the least `r` such that every
/// `(r+1)`-fold commutator vanishes on the test sections (capped at `max`).
pub fn operator_order<F>(op: F, sections: &[DifferentialForm], multipliers: &[Coefficient], max: usize) -> Result<usize>
where
    F: Fn(&DifferentialForm) -> Result<DifferentialForm>,
{
    fn commutator<F>(op: &F, us: &[&Coefficient], s: &DifferentialForm) -> Result<DifferentialForm>
    where
        F: Fn(&DifferentialForm) -> Result<DifferentialForm>,
    {
        match us.split_last() {
            None => op(s),
            Some((u, rest)) => {
                let a = commutator(op, rest, &s.mul_function(u)?)?;
                let b = commutator(op, rest, s)?.mul_function(u)?;
                Ok(&a - &b)
            }
        }
    }
    fn sequences(len: usize, count: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..count {
            cur.push(i);
            sequences(len, count, i, cur, out);
            cur.pop();
        }
    }
    for r in 0..max {
        let mut seqs = Vec::new();
        sequences(r + 1, multipliers.len(), 0, &mut Vec::new(), &mut seqs);
        let mut all_zero = true;
        'outer: for seq in &seqs {
            let us: Vec<&Coefficient> = seq.iter().map(|&i| &multipliers[i]).collect();
            for s in sections {
                if !commutator(&op, &us, s)?.is_zero() {
                    all_zero = false;
                    break 'outer;
                }
            }
        }
        if all_zero {
            return Ok(r);
        }
    }
    Ok(max)
}

/// Coordinate functions of a polynomial chart.
pub fn coordinate_multipliers(nvars: usize) -> Vec<Coefficient> {
    (0..nvars).map(|i| Poly::var(nvars, i).expect("axis").into()).collect()
}

/// Orders of `D_0, …, D_{2n}` on the chart, tested on sections of weight
/// at most one above the fiber weight.
pub fn rumin_orders(chart: &ContactChart) -> Result<Vec<usize>> {
    let n = chart.n();
    let mult = coordinate_multipliers(chart.nvars());
    (0..=2 * n)
        .map(|k| {
            let fiber = h_cohomology_basis(chart, k)?;
            let tr = Truncation::weight(fiber.weight() + 1);
            let space = rumin_space(chart, k, &tr)?;
            let sections: Vec<DifferentialForm> = (0..space.dim()).map(|i| space.element_single(i)).collect();
            operator_order(|s| rumin_operator(chart, k, s), &sections, &mult, 3)
        })
        .collect()
}

/// Outcome of the complex and order checks on a truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuminVerification {
    pub n: usize,
    pub truncation: Truncation,
    /// Dimensions of the truncated spaces `H^k_#`, `k = 0..=2n+1`.
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    /// `D_{k+1} D_k = 0` exactly, per `k`.
    pub composites_zero: Vec<bool>,
    pub block_diagonal: bool,
    pub orders: Vec<usize>,
    pub expected_orders: Vec<usize>,
}

impl RuminVerification {
    pub fn passed(&self) -> bool {
        self.composites_zero.iter().all(|&b| b) && self.block_diagonal && self.orders == self.expected_orders
    }

    /// First failing check, if any.
    pub fn first_failure(&self) -> Option<String> {
        if let Some(k) = self.composites_zero.iter().position(|&b| !b) {
            return Some(format!("D{} D{k} is nonzero", k + 1));
        }
        if !self.block_diagonal {
            return Some("an operator mixes weights".into());
        }
        (self.orders != self.expected_orders).then(|| format!("orders {:?}, expected {:?}", self.orders, self.expected_orders))
    }
}

pub fn verify_rumin(chart: &ContactChart, truncation: &Truncation, method: RankMethod) -> Result<RuminVerification> {
    let n = chart.n();
    let ops = rumin_complex(chart, truncation)?;
    let mut dims: Vec<usize> = ops.iter().map(OperatorMatrix::ncols).collect();
    dims.extend(ops.last().map(OperatorMatrix::nrows));
    let composites_zero =
        ops.windows(2).map(|w| w[0].then(&w[1]).map(|m| m.is_zero())).collect::<Result<Vec<_>>>()?;
    Ok(RuminVerification {
        n,
        truncation: truncation.clone(),
        dims,
        ranks: ops.iter().map(|m| m.rank(method)).collect(),
        composites_zero,
        block_diagonal: ops.iter().all(OperatorMatrix::is_block_diagonal),
        orders: rumin_orders(chart)?,
        expected_orders: (0..=2 * n).map(|k| if k == n { 2 } else { 1 }).collect(),
    })
}

/// Map on classes induced by the pullback along a lift `Φ : B → A`:
/// the class in chart B of `Φ*(lift_A σ)`.
pub fn pullback_class(lift_map: &LiftMap, a: &ContactChart, b: &ContactChart, k: usize, payload: &DifferentialForm) -> Result<DifferentialForm> {
    check_payload(a, k, payload)?;
    let psi = lift_map.pullback(&lift(a, k, payload)?)?;
    let (h, q) = b.split(&psi);
    if k <= b.n() {
        b.fiber()?.project(&h)
    } else {
        if !h.is_zero() {
            return Err(Error::Internal("pulled-back twisted class has an H-part".into()));
        }
        Ok(q)
    }
}

pub fn pullback_matrix(lift_map: &LiftMap, a: &ContactChart, b: &ContactChart, k: usize, truncation: &Truncation) -> Result<OperatorMatrix> {
    let src = rumin_space(a, k, truncation)?;
    let tgt = rumin_space(b, k, truncation)?;
    OperatorMatrix::assemble_single(format!("P{k}"), &src, &tgt, |s| pullback_class(lift_map, a, b, k, s))
}

/// Checks `D^B_k P_k = P_{k+1} D^A_k` for every `k`; returns the first
/// failing degree.
pub fn check_intertwining(lift_map: &LiftMap, a: &ContactChart, b: &ContactChart, truncation: &Truncation) -> Result<Option<usize>> {
    let n = a.n();
    let p: Vec<OperatorMatrix> =
        (0..=2 * n + 1).map(|k| pullback_matrix(lift_map, a, b, k, truncation)).collect::<Result<_>>()?;
    let da = rumin_complex(a, truncation)?;
    let db = rumin_complex(b, truncation)?;
    for k in 0..=2 * n {
        let left = p[k].then(&db[k])?;
        let right = da[k].then(&p[k + 1])?;
        if left.to_dense() != right.to_dense() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::int;
    use crate::forms::MultiIndex;
    use crate::operator::check_complex;

    fn x(i: usize) -> Poly {
        Poly::var(5, i).unwrap()
    }

    fn mono(axes: &[usize], c: Poly) -> DifferentialForm {
        DifferentialForm::monomial(MultiIndex::new(axes).unwrap(), c.into()).unwrap()
    }

    #[test]
    fn d0_is_horizontal_differential() {
        let ch = ContactChart::standard(2).unwrap();
        // f = t: d_H t = −β
        let f = DifferentialForm::scalar(x(4).into());
        let out = rumin_operator(&ch, 0, &f).unwrap();
        assert_eq!(out, -ch.beta());
        let g = DifferentialForm::scalar((&x(0) * &x(3)).into());
        let out = rumin_operator(&ch, 0, &g).unwrap();
        assert_eq!(out, &mono(&[0], x(3)) + &mono(&[3], x(0)));
    }

    #[test]
    fn complex_property_small() {
        let ch = ContactChart::standard(2).unwrap();
        let tr = Truncation::weight(4);
        let ops = rumin_complex(&ch, &tr).unwrap();
        check_complex(&ops, 0).unwrap();
        assert!(ops.iter().all(|o| o.is_block_diagonal()));
        // constants are closed
        let b0 = ops[0].column_blocks();
        assert!(b0[&crate::grading::Grade::Weight(0)].iter().all(|&c| ops[0].column(c).is_empty()));
        assert!(ops.iter().any(|o| !o.is_zero()));
    }

    #[test]
    fn lift_independence() {
        let ch = ContactChart::standard(2).unwrap().with_xi_scale(int(3)).unwrap();
        let sigma1 = mono(&[0], &x(1) * &x(4));
        let rho0 = DifferentialForm::scalar((&x(2) * &x(4)).into());
        let c0 = DifferentialForm::scalar((&x(0) * &x(1)).into());
        let base = rumin_operator(&ch, 1, &sigma1).unwrap();
        // k=1: ρ has degree −1, only the α-correction is free
        assert_eq!(rumin_operator_with_lift(&ch, 1, &sigma1, None, Some(&c0)).unwrap(), base);
        // k=2 (middle)
        let sigma2 = mono(&[0, 2], &x(1) * &x(4));
        let base2 = rumin_operator(&ch, 2, &sigma2).unwrap();
        let c1 = mono(&[3], &x(0) * &x(0));
        assert_eq!(rumin_operator_with_lift(&ch, 2, &sigma2, Some(&rho0), Some(&c1)).unwrap(), base2);
        assert_eq!(rumin_operator_with_lift(&ch, 2, &sigma2, Some(&rho0), None).unwrap(), base2);
    }

    #[test]
    fn orders_n2() {
        let ch = ContactChart::standard(2).unwrap();
        assert_eq!(rumin_orders(&ch).unwrap(), vec![1, 1, 2, 1, 1]);
    }

    #[test]
    fn verification_report() {
        let ch = ContactChart::standard(2).unwrap();
        let v = verify_rumin(&ch, &Truncation::weight(3), RankMethod::default()).unwrap();
        assert!(v.passed(), "{:?}", v.first_failure());
        assert_eq!(v.dims.len(), 6);
    }

    #[test]
    fn non_primitive_rejected() {
        let ch = ContactChart::standard(2).unwrap();
        let w = mono(&[0, 1], Poly::one(5));
        assert!(matches!(rumin_operator(&ch, 2, &w), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn scaling_lift_intertwines() {
        let ch = ContactChart::standard(2).unwrap();
        let mut m = crate::linalg::DenseMatrix::identity(4);
        m.set(0, 0, int(2));
        m.set(2, 2, int(2));
        let lift = crate::contact::lift_construction(&ch, &ch, &m).unwrap();
        assert_eq!(check_intertwining(&lift, &ch, &ch, &Truncation::weight(4)).unwrap(), None);
    }
}
