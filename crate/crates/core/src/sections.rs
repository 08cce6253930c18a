//! Truncated, graded spaces of sections of constant-rank subbundles of
//! `Λ^k`, with exact coordinate extraction.
//!
//! A section is `Σ f_a(x) · v_j` where `f_a` runs over the scalar basis of a
//! block (monomials of a fixed weight, or `cos`/`sin` of a mode pair) and `v_j`
//! over a constant fiber basis. A space may have several summands (direct
//! sums such as the total complex); its elements are then tuples of forms.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coefficients::{Coefficient, Rational, Ring};
use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, MultiIndex};
use crate::grading::{scalar_basis, Grade, ScalarFn, Truncation};
use crate::linalg::{DenseMatrix, SparseVec};

/// Twist of a fiber: plain forms, `⊗ ℓ^p`, or `⊗ Q*` (trivialised by α).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Twist {
    Plain,
    Ell(i32),
    QStar,
}

impl Twist {
    /// Extra weight carried by the twist (`ℓ` generator and α both weigh 2).
    pub fn weight_shift(self) -> i64 {
        match self {
            Twist::Plain => 0,
            Twist::Ell(p) => 2 * p as i64,
            Twist::QStar => 2,
        }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Twist::Plain => Ok(()),
            Twist::Ell(p) => write!(f, "⊗ℓ^{p}"),
            Twist::QStar => write!(f, "⊗Q*"),
        }
    }
}

/// Constant fiber basis inside `Λ^degree` of the first `ambient_axes` axes,
/// kept in reduced row echelon form so coordinates can be read at pivots.
#[derive(Clone, Debug)]
pub struct Fiber {
    name: String,
    degree: usize,
    ambient_axes: usize,
    twist: Twist,
    weight: u32,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
    vectors: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Fiber {
    /// Fiber spanned by the given vectors (coordinates over
    /// `MultiIndex::all(ambient_axes, degree)`).
    pub fn new(
        name: impl Into<String>,
        ambient_axes: usize,
        degree: usize,
        twist: Twist,
        vectors: &[Vec<Rational>],
    ) -> Result<Self> {
        let indices = MultiIndex::all(ambient_axes, degree);
        let n = indices.len();
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::BasisMismatch(format!("fiber vectors must have length {n}")));
        }
        let (rows, pivots) = if vectors.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            let (r, p) = DenseMatrix::from_rows(vectors.to_vec()).rref();
            ((0..p.len()).map(|i| r.row(i)).collect(), p)
        };
        let weight = degree as i64 + twist.weight_shift();
        if weight < 0 {
            return Err(Error::Config(format!("fiber {degree}{twist} has negative weight")));
        }
        let position = indices.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Ok(Fiber {
            name: name.into(),
            degree,
            ambient_axes,
            twist,
            weight: weight as u32,
            indices,
            position,
            vectors: rows,
            pivots,
        })
    }

    /// The whole of `Λ^degree`.
    pub fn full(name: impl Into<String>, ambient_axes: usize, degree: usize, twist: Twist) -> Self {
        let n = MultiIndex::all(ambient_axes, degree).len();
        let id: Vec<Vec<Rational>> = (0..n).map(|i| DenseMatrix::identity(n).row(i)).collect();
        Fiber::new(name, ambient_axes, degree, twist, &id).expect("identity fiber")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ambient_axes(&self) -> usize {
        self.ambient_axes
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn pivot_index(&self, j: usize) -> MultiIndex {
        self.indices[self.pivots[j]]
    }

    pub fn position(&self, idx: MultiIndex) -> Option<usize> {
        self.position.get(&idx).copied()
    }

    /// Basis vector `j` as a constant form on a chart with `nvars` coordinates.
    pub fn vector_form(&self, j: usize, nvars: usize, ring: Ring) -> DifferentialForm {
        self.combination_form(&self.vectors[j], &Coefficient::one(ring, nvars))
    }

    /// `f · Σ_I v_I dx_I` for an ambient coordinate vector `v`.
    pub fn combination_form(&self, v: &[Rational], f: &Coefficient) -> DifferentialForm {
        let terms = self
            .indices
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (*m, f.scale(c)));
        DifferentialForm::from_terms(f.nvars(), f.ring(), self.degree, terms).expect("fiber form")
    }

    /// Coordinates of an ambient vector, or `None` if it is not in the span.
    pub fn coords(&self, ambient: &[Rational]) -> Option<Vec<Rational>> {
        let c: Vec<Rational> = self.pivots.iter().map(|&p| ambient[p].clone()).collect();
        let mut rebuilt = vec![Rational::zero(); ambient.len()];
        for (cj, v) in c.iter().zip(&self.vectors) {
            if cj.is_zero() {
                continue;
            }
            for (r, x) in rebuilt.iter_mut().zip(v) {
                if !x.is_zero() {
                    *r += cj * x;
                }
            }
        }
        (rebuilt == ambient).then_some(c)
    }

    /// Splits a form into `scalar function -> ambient fiber vector`.
    pub fn decompose(&self, form: &DifferentialForm) -> Result<HashMap<ScalarFn, Vec<Rational>>> {
        if form.degree() != self.degree {
            return Err(Error::BasisMismatch(format!(
                "form of degree {} offered to fiber {} of degree {}",
                form.degree(),
                self.name,
                self.degree
            )));
        }
        let n = self.indices.len();
        let mut out: HashMap<ScalarFn, Vec<Rational>> = HashMap::new();
        for (idx, coef) in form.terms() {
            let pos = self.position(*idx).ok_or_else(|| {
                Error::BasisMismatch(format!("index {idx} lies outside the fiber {}", self.name))
            })?;
            let mut push = |s: ScalarFn, v: Rational| {
                if !v.is_zero() {
                    out.entry(s).or_insert_with(|| vec![Rational::zero(); n])[pos] += v;
                }
            };
            match coef {
                Coefficient::Poly(p) => {
                    for (e, v) in p.terms() {
                        push(ScalarFn::Monomial(e.clone()), v.clone());
                    }
                }
                Coefficient::Trig(t) => {
                    for m in t.mode_pairs() {
                        let [a, b] = t.pair_coords(&m);
                        if m.iter().all(|&k| k == 0) {
                            push(ScalarFn::One, a);
                        } else {
                            push(ScalarFn::Cos(m.clone()), a);
                            push(ScalarFn::Sin(m), b);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Descriptor of one basis element of a section space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub space: String,
    pub summand: usize,
    pub degree: usize,
    pub twist: Twist,
    pub grade: Grade,
    pub scalar: ScalarFn,
    pub fiber: MultiIndex,
}

#[derive(Clone, Debug)]
struct Entry {
    grade: Grade,
    summand: usize,
    scalar: ScalarFn,
    offset: usize,
}

#[derive(Clone, Debug)]
pub struct SectionSpace {
    name: String,
    nvars: usize,
    ring: Ring,
    var_weights: Vec<u32>,
    summands: Vec<Arc<Fiber>>,
    truncation: Truncation,
    entries: Vec<Entry>,
    lookup: HashMap<(usize, ScalarFn), usize>,
    blocks: Vec<(Grade, Range<usize>)>,
    dim: usize,
}

impl SectionSpace {
    pub fn new(
        name: impl Into<String>,
        nvars: usize,
        var_weights: Vec<u32>,
        summands: Vec<Arc<Fiber>>,
        truncation: &Truncation,
    ) -> Result<Self> {
        if var_weights.len() != nvars {
            return Err(Error::Config("one weight per coordinate is required".into()));
        }
        if let Some(f) = summands.iter().find(|f| f.ambient_axes() > nvars) {
            return Err(Error::Config(format!("fiber {} needs more axes than the chart has", f.name())));
        }
        let ring = truncation.ring();
        let mut entries = Vec::new();
        let mut lookup = HashMap::new();
        let mut blocks = Vec::new();
        let mut offset = 0;
        for grade in truncation.grades() {
            let start = offset;
            for (s, fiber) in summands.iter().enumerate() {
                if fiber.dim() == 0 {
                    continue;
                }
                for scalar in scalar_basis(&grade, &var_weights, fiber.weight()) {
                    lookup.insert((s, scalar.clone()), entries.len());
                    entries.push(Entry { grade: grade.clone(), summand: s, scalar, offset });
                    offset += fiber.dim();
                }
            }
            blocks.push((grade, start..offset));
        }
        Ok(SectionSpace {
            name: name.into(),
            nvars,
            ring,
            var_weights,
            summands,
            truncation: truncation.clone(),
            entries,
            lookup,
            blocks,
            dim: offset,
        })
    }

    /// Single-summand convenience constructor.
    pub fn single(name: impl Into<String>, nvars: usize, var_weights: Vec<u32>, fiber: Arc<Fiber>, truncation: &Truncation) -> Result<Self> {
        Self::new(name, nvars, var_weights, vec![fiber], truncation)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn var_weights(&self) -> &[u32] {
        &self.var_weights
    }

    pub fn summands(&self) -> &[Arc<Fiber>] {
        &self.summands
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    /// Contiguous index range of each grade block.
    pub fn blocks(&self) -> &[(Grade, Range<usize>)] {
        &self.blocks
    }

    pub fn block_range(&self, grade: &Grade) -> Range<usize> {
        self.blocks.iter().find(|(g, _)| g == grade).map(|(_, r)| r.clone()).unwrap_or(0..0)
    }

    fn locate(&self, i: usize) -> (&Entry, usize) {
        let e = self.entries.partition_point(|e| e.offset <= i) - 1;
        let entry = &self.entries[e];
        (entry, i - entry.offset)
    }

    pub fn grade_of(&self, i: usize) -> &Grade {
        &self.locate(i).0.grade
    }

    pub fn label(&self, i: usize) -> BasisLabel {
        let (entry, j) = self.locate(i);
        let fiber = &self.summands[entry.summand];
        BasisLabel {
            space: self.name.clone(),
            summand: entry.summand,
            degree: fiber.degree(),
            twist: fiber.twist(),
            grade: entry.grade.clone(),
            scalar: entry.scalar.clone(),
            fiber: fiber.pivot_index(j),
        }
    }

    pub fn labels(&self) -> Vec<BasisLabel> {
        (0..self.dim).map(|i| self.label(i)).collect()
    }

    pub fn zero_section(&self) -> Vec<DifferentialForm> {
        self.summands.iter().map(|f| DifferentialForm::zero(self.nvars, self.ring, f.degree())).collect()
    }

    /// Basis element `i`, one form per summand.
    pub fn element(&self, i: usize) -> Vec<DifferentialForm> {
        let (entry, j) = self.locate(i);
        let mut out = self.zero_section();
        let fiber = &self.summands[entry.summand];
        let f = entry.scalar.to_coefficient(self.nvars);
        out[entry.summand] = fiber.combination_form(&fiber.vectors()[j], &f);
        out
    }

    /// Section with the given coordinates.
    pub fn section(&self, coords: &SparseVec) -> Vec<DifferentialForm> {
        let mut out = self.zero_section();
        for (i, c) in coords {
            let e = self.element(*i);
            for (o, p) in out.iter_mut().zip(e) {
                *o = &*o + &p.scale(c);
            }
        }
        out
    }

    /// Exact coordinates of a section; fails if it leaves the span or the
    /// truncation.
    pub fn coordinates(&self, parts: &[DifferentialForm]) -> Result<SparseVec> {
        if parts.len() != self.summands.len() {
            return Err(Error::BasisMismatch(format!(
                "space {} has {} summands, got {}",
                self.name,
                self.summands.len(),
                parts.len()
            )));
        }
        let mut out = SparseVec::new();
        for (s, (fiber, form)) in self.summands.iter().zip(parts).enumerate() {
            if form.is_zero() {
                continue;
            }
            if form.ring() != self.ring {
                return Err(Error::RingMismatch(format!("space {} uses the {} ring", self.name, self.ring)));
            }
            for (scalar, ambient) in fiber.decompose(form)? {
                let entry = self.lookup.get(&(s, scalar.clone())).ok_or_else(|| {
                    Error::BasisMismatch(format!("{scalar} lies outside the truncation of {}", self.name))
                })?;
                let c = fiber.coords(&ambient).ok_or_else(|| {
                    Error::BasisMismatch(format!("section is not in the fiber {} (term {scalar})", fiber.name()))
                })?;
                let base = self.entries[*entry].offset;
                for (j, v) in c.into_iter().enumerate() {
                    if !v.is_zero() {
                        out.insert(base + j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn element_single(&self, i: usize) -> DifferentialForm {
        self.element(i).pop().expect("single summand")
    }

    pub fn coordinates_single(&self, form: &DifferentialForm) -> Result<SparseVec> {
        self.coordinates(std::slice::from_ref(form))
    }
}
