//! Sparse exterior algebra on a single chart.
//!
//! A k-form is a sparse map from strictly increasing multi-indices to
//! coefficients. Sign conventions:
//!
//! * `dx_I ∧ dx_J` carries the sign of the permutation sorting `I ++ J`;
//! * `d(f dx_I) = Σ_j ∂_j f dx_j ∧ dx_I`;
//! * for a bivector `X ∧ Y`, `i_{X∧Y} φ = φ(X, Y, ...)`, i.e. `X` is inserted
//!   first, so that `i_{∂x∧∂y}(dx∧dy) = +1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coefficients::{Coefficient, Poly, Rational, Ring, Trig};
use crate::error::{Error, Result};

/// Strictly increasing set of coordinate axes, stored as a bit set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(u32);

pub const MAX_AXES: usize = 32;

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(0)
    }

    pub fn single(axis: usize) -> Self {
        assert!(axis < MAX_AXES);
        MultiIndex(1 << axis)
    }

    pub fn new(axes: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for (i, &a) in axes.iter().enumerate() {
            if a >= MAX_AXES {
                return Err(Error::InvalidIndex(format!("axis {a} out of range")));
            }
            if i > 0 && axes[i - 1] >= a {
                return Err(Error::InvalidIndex(format!("{axes:?} is not strictly increasing")));
            }
            bits |= 1 << a;
        }
        Ok(MultiIndex(bits))
    }

    pub fn from_bits(bits: u32) -> Self {
        MultiIndex(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, axis: usize) -> bool {
        axis < MAX_AXES && self.0 & (1 << axis) != 0
    }

    pub fn axes(self) -> Vec<usize> {
        (0..MAX_AXES).filter(|&a| self.contains(a)).collect()
    }

    /// Largest axis + 1 (0 for the empty index).
    pub fn span(self) -> usize {
        MAX_AXES - self.0.leading_zeros() as usize
    }

    pub fn is_disjoint(self, other: MultiIndex) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 | other.0)
    }

    pub fn without(self, axis: usize) -> MultiIndex {
        MultiIndex(self.0 & !(1 << axis))
    }

    /// Number of axes of `self` strictly below `axis`.
    pub fn count_below(self, axis: usize) -> usize {
        (self.0 & ((1u32 << axis) - 1)).count_ones() as usize
    }

    /// Sign of `dx_self ∧ dx_other` relative to the sorted index, or `None`
    /// if the two share an axis.
    pub fn wedge_sign(self, other: MultiIndex) -> Option<i32> {
        if !self.is_disjoint(other) {
            return None;
        }
        let mut inversions = 0usize;
        for b in other.axes() {
            inversions += (self.0 >> (b + 1)).count_ones() as usize;
        }
        Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
    }

    /// All multi-indices of the given degree over `nvars` axes, in
    /// lexicographic order of their axis lists.
    pub fn all(nvars: usize, degree: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(degree);
        fn rec(start: usize, nvars: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex::new(current).unwrap());
                return;
            }
            for a in start..nvars {
                if nvars - a < left {
                    break;
                }
                current.push(a);
                rec(a + 1, nvars, left - 1, current, out);
                current.pop();
            }
        }
        if degree <= nvars {
            rec(0, nvars, degree, &mut current, &mut out);
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.axes())
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.axes().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let axes = Vec::<usize>::deserialize(d)?;
        MultiIndex::new(&axes).map_err(serde::de::Error::custom)
    }
}

/// A k-form on a chart with `nvars` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DifferentialForm {
    nvars: usize,
    ring: Ring,
    degree: usize,
    terms: BTreeMap<MultiIndex, Coefficient>,
}

impl DifferentialForm {
    pub fn zero(nvars: usize, ring: Ring, degree: usize) -> Self {
        DifferentialForm { nvars, ring, degree, terms: BTreeMap::new() }
    }

    pub fn scalar(c: Coefficient) -> Self {
        let mut f = Self::zero(c.nvars(), c.ring(), 0);
        f.add_term(MultiIndex::empty(), c);
        f
    }

    /// `c · dx_I`.
    pub fn monomial(idx: MultiIndex, c: Coefficient) -> Result<Self> {
        if idx.span() > c.nvars() {
            return Err(Error::InvalidIndex(format!("{idx} exceeds chart dimension {}", c.nvars())));
        }
        let mut f = Self::zero(c.nvars(), c.ring(), idx.degree());
        f.add_term(idx, c);
        Ok(f)
    }

    /// The coordinate 1-form `dx_axis`.
    pub fn dx(nvars: usize, ring: Ring, axis: usize) -> Result<Self> {
        if axis >= nvars {
            return Err(Error::InvalidAxis { axis, nvars });
        }
        Self::monomial(MultiIndex::single(axis), Coefficient::one(ring, nvars))
    }

    /// Constant-coefficient form `Σ c_I dx_I`.
    pub fn constant<I>(nvars: usize, ring: Ring, degree: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let terms = entries.into_iter().map(|(i, c)| (i, Coefficient::constant(ring, nvars, c)));
        Self::from_terms(nvars, ring, degree, terms)
    }

    pub fn from_terms<I>(nvars: usize, ring: Ring, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Coefficient)>,
    {
        if degree > nvars {
            return Err(Error::InvalidIndex(format!("degree {degree} exceeds chart dimension {nvars}")));
        }
        let mut f = Self::zero(nvars, ring, degree);
        for (idx, c) in terms {
            if idx.degree() != degree {
                return Err(Error::InvalidIndex(format!("{idx} in a degree-{degree} form")));
            }
            if idx.span() > nvars {
                return Err(Error::InvalidIndex(format!("{idx} exceeds chart dimension {nvars}")));
            }
            if c.ring() != ring || c.nvars() != nvars {
                return Err(Error::RingMismatch(format!(
                    "coefficient on {} chart of dimension {} inside a {ring} form of dimension {nvars}",
                    c.ring(),
                    c.nvars()
                )));
            }
            f.add_term(idx, c);
        }
        Ok(f)
    }

    fn add_term(&mut self, idx: MultiIndex, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Coefficient> {
        &self.terms
    }

    pub fn coefficient(&self, idx: MultiIndex) -> Coefficient {
        self.terms.get(&idx).cloned().unwrap_or_else(|| Coefficient::zero(self.ring, self.nvars))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn check_same_chart(&self, other: &DifferentialForm) -> Result<()> {
        if self.nvars != other.nvars || self.ring != other.ring {
            return Err(Error::ChartMismatch(format!(
                "{} form on {} coordinates vs {} form on {} coordinates",
                self.ring, self.nvars, other.ring, other.nvars
            )));
        }
        Ok(())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let mut out = Self::zero(self.nvars, self.ring, self.degree);
        for (i, c) in &self.terms {
            out.add_term(*i, c.scale(factor));
        }
        out
    }

    /// Multiplication by a function.
    pub fn mul_function(&self, f: &Coefficient) -> Result<Self> {
        if f.ring() != self.ring || f.nvars() != self.nvars {
            return Err(Error::ChartMismatch("function and form live on different charts".into()));
        }
        let mut out = Self::zero(self.nvars, self.ring, self.degree);
        for (i, c) in &self.terms {
            out.add_term(*i, c * f);
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &DifferentialForm) -> Result<Self> {
        self.check_same_chart(other)?;
        if self.degree != other.degree {
            return Err(Error::InvalidIndex(format!(
                "cannot add forms of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(self + other)
    }

    pub fn map_coefficients<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&Coefficient) -> Result<Coefficient>,
    {
        let mut out = Self::zero(self.nvars, self.ring, self.degree);
        for (i, c) in &self.terms {
            out.add_term(*i, f(c)?);
        }
        Ok(out)
    }

    /// Keeps only the terms whose index satisfies the predicate.
    pub fn filter_indices<F: Fn(MultiIndex) -> bool>(&self, keep: F) -> Self {
        let mut out = Self::zero(self.nvars, self.ring, self.degree);
        for (i, c) in &self.terms {
            if keep(*i) {
                out.terms.insert(*i, c.clone());
            }
        }
        out
    }

    /// Reinterprets the form on a chart with a different number of
    /// coordinates by padding or truncating exponent (or frequency) vectors;
    /// only valid for forms that do not involve the dropped coordinates.
    pub fn change_dimension(&self, nvars: usize) -> Result<Self> {
        let mut out = Self::zero(nvars, self.ring, self.degree);
        for (i, c) in &self.terms {
            if i.span() > nvars {
                return Err(Error::ChartMismatch(format!("{i} uses a dropped coordinate")));
            }
            let coef: Coefficient = match c {
                Coefficient::Poly(poly) => {
                    let mut terms = Vec::with_capacity(poly.terms().len());
                    for (exp, v) in poly.terms() {
                        if exp.iter().skip(nvars).any(|&e| e != 0) {
                            return Err(Error::ChartMismatch("coefficient depends on a dropped coordinate".into()));
                        }
                        let mut e2 = exp.clone();
                        e2.resize(nvars, 0);
                        terms.push((e2, v.clone()));
                    }
                    Poly::from_terms(nvars, terms)?.into()
                }
                Coefficient::Trig(trig) => {
                    let mut modes = Vec::with_capacity(trig.modes().len());
                    for (k, v) in trig.modes() {
                        if k.iter().skip(nvars).any(|&e| e != 0) {
                            return Err(Error::ChartMismatch("coefficient depends on a dropped coordinate".into()));
                        }
                        let mut k2 = k.clone();
                        k2.resize(nvars, 0);
                        modes.push((k2, v.clone()));
                    }
                    Trig::from_modes(nvars, modes)?.into()
                }
            };
            out.add_term(*i, coef);
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &DifferentialForm) -> Result<Self> {
        self.check_same_chart(other)?;
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.nvars, self.ring, degree);
        if degree > self.nvars {
            return Ok(out);
        }
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                if let Some(sign) = ia.wedge_sign(*ib) {
                    let prod = ca * cb;
                    let prod = if sign < 0 { -&prod } else { prod };
                    out.add_term(ia.union(*ib), prod);
                }
            }
        }
        Ok(out)
    }

    pub fn exterior_derivative(&self) -> Self {
        let mut out = Self::zero(self.nvars, self.ring, self.degree + 1);
        if self.degree == self.nvars {
            return out;
        }
        for (idx, c) in &self.terms {
            for j in 0..self.nvars {
                if idx.contains(j) {
                    continue;
                }
                let dc = c.partial_derivative(j).expect("axis within chart");
                if dc.is_zero() {
                    continue;
                }
                let sign = idx.count_below(j) % 2;
                let term = if sign == 1 { -&dc } else { dc };
                out.add_term(idx.union(MultiIndex::single(j)), term);
            }
        }
        out
    }

    /// Contraction with a vector field or bivector.
    pub fn interior_product(&self, p: &PolyVectorField) -> Result<Self> {
        p.contract(self)
    }

    /// `L_X = i_X d + d i_X`.
    pub fn lie_derivative(&self, x: &PolyVectorField) -> Result<Self> {
        if x.degree() != 1 {
            return Err(Error::Unsupported("Lie derivative along a bivector".into()));
        }
        let a = self.exterior_derivative().interior_product(x)?;
        if self.degree == 0 {
            return Ok(a);
        }
        let b = self.interior_product(x)?.exterior_derivative();
        Ok(&a + &b)
    }

    /// Pullback along a polynomial map whose coordinate components (one per
    /// coordinate of this form's chart) are polynomials on the source chart.
    pub fn pullback(&self, components: &[Poly]) -> Result<Self> {
        if components.len() != self.nvars {
            return Err(Error::ChartMismatch(format!(
                "pullback needs {} components, got {}",
                self.nvars,
                components.len()
            )));
        }
        if self.ring != Ring::Poly {
            return Err(Error::Unsupported("pullback of trigonometric forms".into()));
        }
        let src = components.first().map(Poly::nvars).unwrap_or(0);
        let differentials: Vec<DifferentialForm> = components
            .iter()
            .map(|p| DifferentialForm::scalar(p.clone().into()).exterior_derivative())
            .collect();
        let mut out = Self::zero(src, Ring::Poly, self.degree);
        for (idx, c) in &self.terms {
            let f = c.as_poly().unwrap().substitute(components)?;
            let mut acc = DifferentialForm::scalar(f.into());
            for a in idx.axes() {
                acc = acc.wedge(&differentials[a])?;
            }
            out = &out + &acc;
        }
        Ok(out)
    }
}

impl std::ops::Add for &DifferentialForm {
    type Output = DifferentialForm;
    fn add(self, rhs: &DifferentialForm) -> DifferentialForm {
        assert!(
            self.nvars == rhs.nvars && self.ring == rhs.ring && self.degree == rhs.degree,
            "adding incompatible forms"
        );
        let mut out = self.clone();
        for (i, c) in &rhs.terms {
            out.add_term(*i, c.clone());
        }
        out
    }
}

impl std::ops::Sub for &DifferentialForm {
    type Output = DifferentialForm;
    fn sub(self, rhs: &DifferentialForm) -> DifferentialForm {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        DifferentialForm {
            nvars: self.nvars,
            ring: self.ring,
            degree: self.degree,
            terms: self.terms.iter().map(|(i, c)| (*i, -c)).collect(),
        }
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(i, c)| {
                let dx: Vec<String> = i.axes().iter().map(|a| format!("dv{a}")).collect();
                if dx.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c}) {}", dx.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct FormTermJson {
    idx: MultiIndex,
    coef: Coefficient,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nvars: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ring: Option<Ring>,
    terms: Vec<FormTermJson>,
}

impl Serialize for DifferentialForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson {
            degree: self.degree,
            nvars: Some(self.nvars),
            ring: Some(self.ring),
            terms: self.terms.iter().map(|(i, c)| FormTermJson { idx: *i, coef: c.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DifferentialForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FormJson::deserialize(d)?;
        let nvars = raw
            .nvars
            .or_else(|| raw.terms.first().map(|t| t.coef.nvars()))
            .ok_or_else(|| D::Error::custom("cannot infer chart dimension of an empty form; supply \"nvars\""))?;
        let ring = raw.ring.or_else(|| raw.terms.first().map(|t| t.coef.ring())).unwrap_or(Ring::Poly);
        DifferentialForm::from_terms(nvars, ring, raw.degree, raw.terms.into_iter().map(|t| (t.idx, t.coef)))
            .map_err(D::Error::custom)
    }
}

/// Vector field (degree 1) or bivector field (degree 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    nvars: usize,
    ring: Ring,
    degree: usize,
    terms: BTreeMap<MultiIndex, Coefficient>,
}

impl PolyVectorField {
    pub fn from_terms<I>(nvars: usize, ring: Ring, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Coefficient)>,
    {
        if !(1..=2).contains(&degree) {
            return Err(Error::Unsupported(format!("polyvector fields of degree {degree}")));
        }
        // Reuse the form bookkeeping for canonical storage.
        let f = DifferentialForm::from_terms(nvars, ring, degree, terms)?;
        Ok(PolyVectorField { nvars, ring, degree, terms: f.terms })
    }

    /// The coordinate vector field `∂_axis`.
    pub fn coordinate(nvars: usize, ring: Ring, axis: usize) -> Result<Self> {
        if axis >= nvars {
            return Err(Error::InvalidAxis { axis, nvars });
        }
        Self::from_terms(nvars, ring, 1, [(MultiIndex::single(axis), Coefficient::one(ring, nvars))])
    }

    /// Constant-coefficient bivector `Σ c_{ab} ∂_a ∧ ∂_b` over `a < b`.
    pub fn constant_bivector<I>(nvars: usize, ring: Ring, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let terms = entries.into_iter().map(|(i, c)| (i, Coefficient::constant(ring, nvars, c)));
        Self::from_terms(nvars, ring, 2, terms)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Coefficient> {
        &self.terms
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(i, c)| (*i, c.scale(factor)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        out
    }

    /// Component of a vector field along `∂_axis`.
    pub fn component(&self, axis: usize) -> Coefficient {
        self.terms
            .get(&MultiIndex::single(axis))
            .cloned()
            .unwrap_or_else(|| Coefficient::zero(self.ring, self.nvars))
    }

    fn contract(&self, form: &DifferentialForm) -> Result<DifferentialForm> {
        if self.nvars != form.nvars || self.ring != form.ring {
            return Err(Error::ChartMismatch("polyvector and form live on different charts".into()));
        }
        if form.degree < self.degree {
            return Err(Error::DegreeUnderflow { form: form.degree, vector: self.degree });
        }
        let mut out = DifferentialForm::zero(form.nvars, form.ring, form.degree - self.degree);
        for (pv, pc) in &self.terms {
            let axes = pv.axes();
            for (idx, c) in &form.terms {
                // insert the first axis, then the second
                let mut cur = *idx;
                let mut sign = 1i32;
                let mut ok = true;
                for &a in &axes {
                    if !cur.contains(a) {
                        ok = false;
                        break;
                    }
                    if cur.count_below(a) % 2 == 1 {
                        sign = -sign;
                    }
                    cur = cur.without(a);
                }
                if !ok {
                    continue;
                }
                let prod = pc * c;
                out.add_term(cur, if sign < 0 { -&prod } else { prod });
            }
        }
        Ok(out)
    }

    /// Lie bracket of two vector fields.
    pub fn bracket(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        if self.degree != 1 || other.degree != 1 {
            return Err(Error::Unsupported("bracket of bivectors".into()));
        }
        if self.nvars != other.nvars || self.ring != other.ring {
            return Err(Error::ChartMismatch("vector fields on different charts".into()));
        }
        let n = self.nvars;
        let mut terms = Vec::new();
        for j in 0..n {
            let mut c = Coefficient::zero(self.ring, n);
            for i in 0..n {
                let xi = self.component(i);
                let yi = other.component(i);
                c = &c + &(&xi * &other.component(j).partial_derivative(i)?);
                c = &c - &(&yi * &self.component(j).partial_derivative(i)?);
            }
            terms.push((MultiIndex::single(j), c));
        }
        Self::from_terms(n, self.ring, 1, terms)
    }

    pub fn add(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        if self.nvars != other.nvars || self.ring != other.ring || self.degree != other.degree {
            return Err(Error::ChartMismatch("incompatible polyvector fields".into()));
        }
        let merged = self.terms.iter().chain(other.terms.iter()).map(|(i, c)| (*i, c.clone()));
        Self::from_terms(self.nvars, self.ring, self.degree, merged)
    }
}

/// Splits a Reeb-invariant form as `ω = φ₁ + α ∧ φ₂` with `i_ξ φ₁ = 0`,
/// `φ₂ = i_ξ ω`. Fails with the offending term if `L_ξ ω ≠ 0`.
pub fn split_off_dt(
    form: &DifferentialForm,
    alpha: &DifferentialForm,
    xi: &PolyVectorField,
) -> Result<(DifferentialForm, DifferentialForm)> {
    let lie = form.lie_derivative(xi)?;
    if let Some((idx, c)) = lie.terms().iter().next() {
        return Err(Error::NotReebInvariant(format!("({c}) at {idx}")));
    }
    Ok(split_alpha(form, alpha, xi))
}

/// Unchecked splitting `ω = (ω - α ∧ i_ξ ω) + α ∧ i_ξ ω`; valid for any form
/// when `α(ξ) = 1`.
pub fn split_alpha(
    form: &DifferentialForm,
    alpha: &DifferentialForm,
    xi: &PolyVectorField,
) -> (DifferentialForm, DifferentialForm) {
    if form.degree() == 0 {
        return (form.clone(), DifferentialForm::zero(form.nvars(), form.ring(), 0));
    }
    let phi2 = form.interior_product(xi).expect("vector field contraction");
    let phi1 = form - &alpha.wedge(&phi2).expect("same chart");
    (phi1, phi2)
}

/// Inverse of [`split_alpha`].
pub fn reassemble(
    phi1: &DifferentialForm,
    phi2: &DifferentialForm,
    alpha: &DifferentialForm,
) -> Result<DifferentialForm> {
    phi1.try_add(&alpha.wedge(phi2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::int;

    const N: usize = 5; // (x1, y1, x2, y2, t)

    fn var(i: usize) -> Coefficient {
        Poly::var(N, i).unwrap().into()
    }

    fn dx(i: usize) -> DifferentialForm {
        DifferentialForm::dx(N, Ring::Poly, i).unwrap()
    }

    fn f(c: Coefficient, axes: &[usize]) -> DifferentialForm {
        DifferentialForm::monomial(MultiIndex::new(axes).unwrap(), c).unwrap()
    }

    fn one() -> Coefficient {
        Coefficient::one(Ring::Poly, N)
    }

    fn alpha() -> DifferentialForm {
        &(&dx(4) + &f(var(0), &[1])) + &f(var(2), &[3])
    }

    fn xi() -> PolyVectorField {
        PolyVectorField::coordinate(N, Ring::Poly, 4).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert!(dx(0).wedge(&dx(0)).unwrap().is_zero());
        assert_eq!(dx(0).wedge(&dx(1)).unwrap(), f(one(), &[0, 1]));
        // (x1 dy1) ∧ (y1 dx1) = -x1 y1 dx1∧dy1
        let a = f(var(0), &[1]);
        let b = f(var(1), &[0]);
        let expected = f(&-&var(0) * &var(1), &[0, 1]);
        assert_eq!(a.wedge(&b).unwrap(), expected);
        // degrees past the dimension
        let top = f(one(), &[0, 1, 2, 3, 4]);
        assert!(top.wedge(&dx(0)).unwrap().is_zero());
        let other_chart = DifferentialForm::dx(3, Ring::Poly, 0).unwrap();
        assert!(matches!(dx(0).wedge(&other_chart), Err(Error::ChartMismatch(_))));
    }

    #[test]
    fn exterior_derivative_examples() {
        assert_eq!(f(var(0), &[1]).exterior_derivative(), f(one(), &[0, 1]));
        let g = DifferentialForm::scalar(&(&var(0) * &var(0)) * &var(3));
        assert!(g.exterior_derivative().exterior_derivative().is_zero());
        let expected = &f(one(), &[0, 1]) + &f(one(), &[2, 3]);
        assert_eq!(alpha().exterior_derivative(), expected);
    }

    #[test]
    fn interior_product_examples() {
        let dt_dx1 = dx(4).wedge(&dx(0)).unwrap();
        assert_eq!(dt_dx1.interior_product(&xi()).unwrap(), dx(0));
        let bv = PolyVectorField::constant_bivector(N, Ring::Poly, [(MultiIndex::new(&[0, 1]).unwrap(), int(1))])
            .unwrap();
        let pairing = f(one(), &[0, 1]).interior_product(&bv).unwrap();
        assert_eq!(pairing, DifferentialForm::scalar(one()));
        let bv2 = PolyVectorField::constant_bivector(
            N,
            Ring::Poly,
            [(MultiIndex::new(&[0, 1]).unwrap(), int(1)), (MultiIndex::new(&[2, 3]).unwrap(), int(1))],
        )
        .unwrap();
        let omega = &f(one(), &[0, 1]) + &f(one(), &[2, 3]);
        // expand i_X i_Y by hand on each block: both give +1
        let by_hand = {
            let x1 = PolyVectorField::coordinate(N, Ring::Poly, 0).unwrap();
            let y1 = PolyVectorField::coordinate(N, Ring::Poly, 1).unwrap();
            let x2 = PolyVectorField::coordinate(N, Ring::Poly, 2).unwrap();
            let y2 = PolyVectorField::coordinate(N, Ring::Poly, 3).unwrap();
            let a = omega.interior_product(&x1).unwrap().interior_product(&y1).unwrap();
            let b = omega.interior_product(&x2).unwrap().interior_product(&y2).unwrap();
            &a + &b
        };
        assert_eq!(by_hand, DifferentialForm::scalar(Coefficient::constant(Ring::Poly, N, int(2))));
        assert_eq!(omega.interior_product(&bv2).unwrap(), by_hand);
        assert!(matches!(dx(0).interior_product(&bv), Err(Error::DegreeUnderflow { .. })));
    }

    #[test]
    fn lie_derivative_examples() {
        assert_eq!(f(var(4), &[0]).lie_derivative(&xi()).unwrap(), dx(0));
        assert!(f(var(0), &[1]).lie_derivative(&xi()).unwrap().is_zero());
        assert!(alpha().lie_derivative(&xi()).unwrap().is_zero());
    }

    #[test]
    fn split_off_dt_examples() {
        let w = dx(4).wedge(&dx(0)).unwrap();
        let (p1, p2) = split_off_dt(&w, &alpha(), &xi()).unwrap();
        assert_eq!(p2, dx(0));
        assert!(p1.interior_product(&xi()).unwrap().is_zero());
        assert_eq!(reassemble(&p1, &p2, &alpha()).unwrap(), w);

        let w = f(one(), &[0, 1]);
        let (p1, p2) = split_off_dt(&w, &alpha(), &xi()).unwrap();
        assert_eq!(p1, w);
        assert!(p2.is_zero());

        let (p1, p2) = split_off_dt(&alpha(), &alpha(), &xi()).unwrap();
        assert!(p1.is_zero());
        assert_eq!(p2, DifferentialForm::scalar(one()));

        let bad = f(var(4), &[0]);
        assert!(matches!(split_off_dt(&bad, &alpha(), &xi()), Err(Error::NotReebInvariant(_))));
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(MultiIndex::all(4, 2).len(), 6);
        assert_eq!(MultiIndex::all(4, 2)[0].axes(), vec![0, 1]);
        assert!(MultiIndex::new(&[2, 1]).is_err());
        assert_eq!(MultiIndex::new(&[1, 3]).unwrap().wedge_sign(MultiIndex::single(2)), Some(-1));
    }

    #[test]
    fn bracket_of_frame() {
        // [∂x, ∂y - x ∂t] = -∂t
        let x = PolyVectorField::coordinate(3, Ring::Poly, 0).unwrap();
        let y = PolyVectorField::from_terms(
            3,
            Ring::Poly,
            1,
            [
                (MultiIndex::single(1), Coefficient::one(Ring::Poly, 3)),
                (MultiIndex::single(2), (-&Poly::var(3, 0).unwrap()).into()),
            ],
        )
        .unwrap();
        let br = x.bracket(&y).unwrap();
        assert_eq!(br, PolyVectorField::coordinate(3, Ring::Poly, 2).unwrap().scale(&int(-1)));
    }

    #[test]
    fn pullback_along_linear_map() {
        // (u, v) -> (2u, v): pullback of x dy is 2u dv
        let comps = vec![Poly::var(2, 0).unwrap().scale(&int(2)), Poly::var(2, 1).unwrap()];
        let form = DifferentialForm::monomial(MultiIndex::single(1), Poly::var(2, 0).unwrap().into()).unwrap();
        let pulled = form.pullback(&comps).unwrap();
        let expected =
            DifferentialForm::monomial(MultiIndex::single(1), Poly::var(2, 0).unwrap().scale(&int(2)).into())
                .unwrap();
        assert_eq!(pulled, expected);
    }
}
