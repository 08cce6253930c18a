//! Exact scalar rings on charts.
//!
//! Two rings are supported: multivariate polynomials over ℚ (affine charts)
//! and finite Fourier sums over ℤ^m with Gaussian-rational coefficients
//! (flat tori). Trigonometric functions are stored as complex exponentials
//! subject to the reality constraint `c(-k) = conj(c(k))`.
//!
//! Everything is sparse and canonical: zero terms are never stored, so two
//! values are equal exactly when their term maps are equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Gaussian = Complex<Rational>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Poly,
    Trig,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Poly => write!(f, "poly"),
            Ring::Trig => write!(f, "trig"),
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, value: Rational) -> Self {
        Self::monomial(nvars, vec![0; nvars], value)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_axis`.
    pub fn var(nvars: usize, axis: usize) -> Result<Self> {
        if axis >= nvars {
            return Err(Error::InvalidAxis { axis, nvars });
        }
        let mut exp = vec![0; nvars];
        exp[axis] = 1;
        Ok(Self::monomial(nvars, exp, Rational::one()))
    }

    pub fn monomial(nvars: usize, exp: Vec<u32>, coeff: Rational) -> Self {
        assert_eq!(exp.len(), nvars, "exponent vector length must equal chart dimension");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut out = Poly::zero(nvars);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(Error::InvalidIndex(format!(
                    "exponent vector {exp:?} has length {} but the chart has {nvars} coordinates",
                    exp.len()
                )));
            }
            out.add_term(exp, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, exp: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
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

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (exp, c) = self.terms.iter().next().unwrap();
                exp.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).collect(),
        }
    }

    pub fn derivative(&self, axis: usize) -> Result<Self> {
        if axis >= self.nvars {
            return Err(Error::InvalidAxis { axis, nvars: self.nvars });
        }
        let mut out = Poly::zero(self.nvars);
        for (exp, c) in &self.terms {
            let e = exp[axis];
            if e == 0 {
                continue;
            }
            let mut lowered = exp.clone();
            lowered[axis] = e - 1;
            out.add_term(lowered, c * Rational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::ChartMismatch(format!(
                "point has {} coordinates, chart has {}",
                point.len(),
                self.nvars
            )));
        }
        let mut total = Rational::zero();
        for (exp, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(exp) {
                for _ in 0..e {
                    term *= x;
                }
            }
            total += term;
        }
        Ok(total)
    }

    pub fn monomial_weight(exp: &[u32], weights: &[u32]) -> u32 {
        exp.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    /// Common weight of all terms, or `None` if the polynomial is zero or
    /// inhomogeneous.
    pub fn homogeneous_weight(&self, weights: &[u32]) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| Self::monomial_weight(e, weights));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Poly::one(self.nvars);
        for _ in 0..exponent {
            out = &out * self;
        }
        out
    }

    /// Composition `p(images[0], ..., images[m-1])`.
    pub fn substitute(&self, images: &[Poly]) -> Result<Self> {
        if images.len() != self.nvars {
            return Err(Error::ChartMismatch(format!(
                "substitution supplies {} images for {} variables",
                images.len(),
                self.nvars
            )));
        }
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        if images.iter().any(|p| p.nvars != target) {
            return Err(Error::ChartMismatch("substitution images live on different charts".into()));
        }
        let mut out = Poly::zero(target);
        let mut power_cache: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(p.nvars), p.clone()]).collect();
        for (exp, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (axis, &e) in exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut power_cache[axis];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &images[axis];
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomials on different charts");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomials on different charts");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomials on different charts");
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exp, ca * cb);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Trigonometric polynomials
// ---------------------------------------------------------------------------

/// Real-valued finite Fourier sum `Σ c(k) e^{i k·θ}` on the flat torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trig {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, Gaussian>,
}

fn gaussian_is_zero(z: &Gaussian) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

/// Representative of the pair `{k, -k}` whose first nonzero entry is positive.
pub fn canonical_mode(freq: &[i64]) -> Vec<i64> {
    match freq.iter().find(|&&k| k != 0) {
        Some(&k) if k < 0 => freq.iter().map(|k| -k).collect(),
        _ => freq.to_vec(),
    }
}

impl Trig {
    pub fn zero(nvars: usize) -> Self {
        Trig { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, value: Rational) -> Self {
        let mut t = Trig::zero(nvars);
        t.add_mode(vec![0; nvars], Gaussian::new(value, Rational::zero()));
        t
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// `cos(k·θ)`.
    pub fn cos(freq: Vec<i64>) -> Self {
        let nvars = freq.len();
        if freq.iter().all(|&k| k == 0) {
            return Trig::one(nvars);
        }
        let neg: Vec<i64> = freq.iter().map(|k| -k).collect();
        let half = Gaussian::new(rat(1, 2), Rational::zero());
        let mut t = Trig::zero(nvars);
        t.add_mode(freq, half.clone());
        t.add_mode(neg, half);
        t
    }

    /// `sin(k·θ)`.
    pub fn sin(freq: Vec<i64>) -> Self {
        let nvars = freq.len();
        if freq.iter().all(|&k| k == 0) {
            return Trig::zero(nvars);
        }
        let neg: Vec<i64> = freq.iter().map(|k| -k).collect();
        let mut t = Trig::zero(nvars);
        t.add_mode(freq, Gaussian::new(Rational::zero(), rat(-1, 2)));
        t.add_mode(neg, Gaussian::new(Rational::zero(), rat(1, 2)));
        t
    }

    /// Builds a function from raw Fourier modes, rejecting inputs that
    /// violate the reality constraint.
    pub fn from_modes<I>(nvars: usize, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Gaussian)>,
    {
        let mut t = Trig::zero(nvars);
        for (k, c) in modes {
            if k.len() != nvars {
                return Err(Error::InvalidIndex(format!(
                    "frequency vector {k:?} has length {} but the chart has {nvars} coordinates",
                    k.len()
                )));
            }
            t.add_mode(k, c);
        }
        if !t.is_real() {
            return Err(Error::Unsupported(
                "trigonometric coefficient violates the reality constraint c(-k) = conj c(k)".into(),
            ));
        }
        Ok(t)
    }

    fn add_mode(&mut self, k: Vec<i64>, c: Gaussian) {
        if gaussian_is_zero(&c) {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if gaussian_is_zero(&sum) {
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

    pub fn modes(&self) -> &BTreeMap<Vec<i64>, Gaussian> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(k, c)| {
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            self.terms.get(&neg).is_some_and(|d| *d == c.conj())
        })
    }

    /// Average value over the torus (the real part of the mode-0 coefficient).
    pub fn mean(&self) -> Rational {
        self.terms
            .get(&vec![0; self.nvars])
            .map(|c| c.re.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                (k.iter().all(|&x| x == 0) && c.im.is_zero()).then(|| c.re.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Trig::zero(self.nvars);
        }
        Trig {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), Gaussian::new(&c.re * factor, &c.im * factor)))
                .collect(),
        }
    }

    pub fn derivative(&self, axis: usize) -> Result<Self> {
        if axis >= self.nvars {
            return Err(Error::InvalidAxis { axis, nvars: self.nvars });
        }
        let mut out = Trig::zero(self.nvars);
        for (k, c) in &self.terms {
            let ka = int(k[axis]);
            // i·k_a·(re + i im) = -k_a im + i k_a re
            out.add_mode(k.clone(), Gaussian::new(-(&ka * &c.im), &ka * &c.re));
        }
        Ok(out)
    }

    /// Coordinates in the real basis of one mode pair: `[mean]` for the zero
    /// mode, `[a, b]` for `a cos(k·θ) + b sin(k·θ)` otherwise. `mode` must be
    /// canonical.
    pub fn pair_coords(&self, mode: &[i64]) -> [Rational; 2] {
        let c = self.terms.get(mode).cloned().unwrap_or_else(|| Gaussian::new(Rational::zero(), Rational::zero()));
        if mode.iter().all(|&k| k == 0) {
            return [c.re, Rational::zero()];
        }
        [&c.re * int(2), -(&c.im * int(2))]
    }

    /// Canonical mode pairs present in this function.
    pub fn mode_pairs(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = self.terms.keys().map(|k| canonical_mode(k)).collect();
        out.dedup();
        out.sort();
        out.dedup();
        out
    }
}

impl Add for &Trig {
    type Output = Trig;
    fn add(self, rhs: &Trig) -> Trig {
        assert_eq!(self.nvars, rhs.nvars, "trigonometric functions on different tori");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_mode(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Trig {
    type Output = Trig;
    fn sub(self, rhs: &Trig) -> Trig {
        self + &(-rhs)
    }
}

impl Neg for &Trig {
    type Output = Trig;
    fn neg(self) -> Trig {
        Trig {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &Trig {
    type Output = Trig;
    fn mul(self, rhs: &Trig) -> Trig {
        assert_eq!(self.nvars, rhs.nvars, "trigonometric functions on different tori");
        let mut out = Trig::zero(self.nvars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let k: Vec<i64> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.add_mode(k, ca * cb);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Tagged union
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Poly(Poly),
    Trig(Trig),
}

impl From<Poly> for Coefficient {
    fn from(p: Poly) -> Self {
        Coefficient::Poly(p)
    }
}

impl From<Trig> for Coefficient {
    fn from(t: Trig) -> Self {
        Coefficient::Trig(t)
    }
}

impl Coefficient {
    pub fn zero(ring: Ring, nvars: usize) -> Self {
        match ring {
            Ring::Poly => Poly::zero(nvars).into(),
            Ring::Trig => Trig::zero(nvars).into(),
        }
    }

    pub fn one(ring: Ring, nvars: usize) -> Self {
        Self::constant(ring, nvars, Rational::one())
    }

    pub fn constant(ring: Ring, nvars: usize, value: Rational) -> Self {
        match ring {
            Ring::Poly => Poly::constant(nvars, value).into(),
            Ring::Trig => Trig::constant(nvars, value).into(),
        }
    }

    pub fn ring(&self) -> Ring {
        match self {
            Coefficient::Poly(_) => Ring::Poly,
            Coefficient::Trig(_) => Ring::Trig,
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Coefficient::Poly(p) => p.nvars(),
            Coefficient::Trig(t) => t.nvars(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Poly(p) => p.is_zero(),
            Coefficient::Trig(t) => t.is_zero(),
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            Coefficient::Poly(p) => Some(p),
            Coefficient::Trig(_) => None,
        }
    }

    pub fn as_trig(&self) -> Option<&Trig> {
        match self {
            Coefficient::Trig(t) => Some(t),
            Coefficient::Poly(_) => None,
        }
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self {
            Coefficient::Poly(p) => p.constant_value(),
            Coefficient::Trig(t) => t.constant_value(),
        }
    }

    pub fn check_compatible(&self, other: &Coefficient) -> Result<()> {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring(), other.ring())));
        }
        if self.nvars() != other.nvars() {
            return Err(Error::ChartMismatch(format!(
                "coefficients on charts of dimension {} and {}",
                self.nvars(),
                other.nvars()
            )));
        }
        Ok(())
    }

    /// Exact product; fails on ring or chart mismatch.
    pub fn ring_multiply(&self, other: &Coefficient) -> Result<Coefficient> {
        self.check_compatible(other)?;
        Ok(self * other)
    }

    pub fn try_add(&self, other: &Coefficient) -> Result<Coefficient> {
        self.check_compatible(other)?;
        Ok(self + other)
    }

    pub fn partial_derivative(&self, axis: usize) -> Result<Coefficient> {
        match self {
            Coefficient::Poly(p) => p.derivative(axis).map(Into::into),
            Coefficient::Trig(t) => t.derivative(axis).map(Into::into),
        }
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        match self {
            Coefficient::Poly(p) => p.evaluate(point),
            Coefficient::Trig(_) => Err(Error::Unsupported(
                "pointwise evaluation is only defined for polynomial coefficients".into(),
            )),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Coefficient {
        match self {
            Coefficient::Poly(p) => p.scale(factor).into(),
            Coefficient::Trig(t) => t.scale(factor).into(),
        }
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        match (self, rhs) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => (a + b).into(),
            (Coefficient::Trig(a), Coefficient::Trig(b)) => (a + b).into(),
            _ => panic!("ring mismatch in coefficient addition"),
        }
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        match (self, rhs) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => (a - b).into(),
            (Coefficient::Trig(a), Coefficient::Trig(b)) => (a - b).into(),
            _ => panic!("ring mismatch in coefficient subtraction"),
        }
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        match (self, rhs) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => (a * b).into(),
            (Coefficient::Trig(a), Coefficient::Trig(b)) => (a * b).into(),
            _ => panic!("ring mismatch in coefficient multiplication"),
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        match self {
            Coefficient::Poly(p) => (-p).into(),
            Coefficient::Trig(t) => (-t).into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Display
// ---------------------------------------------------------------------------

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let abs = c.abs();
            let vars: Vec<String> = exp
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("v{i}") } else { format!("v{i}^{e}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Trig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| format!("({}+{}i)e^{{i{:?}θ}}", fmt_rational(&c.re), fmt_rational(&c.im), k))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Poly(p) => p.fmt(f),
            Coefficient::Trig(t) => t.fmt(f),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON term-list format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exp: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    freq: Option<Vec<i64>>,
    num: String,
    den: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im_num: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im_den: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CoefficientJson {
    ring: Ring,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nvars: Option<usize>,
    terms: Vec<TermJson>,
}

fn parse_rational(num: &str, den: &str) -> std::result::Result<Rational, String> {
    let n: BigInt = num.trim().parse().map_err(|_| format!("bad numerator {num:?}"))?;
    let d: BigInt = den.trim().parse().map_err(|_| format!("bad denominator {den:?}"))?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(n, d))
}

impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = match self {
            Coefficient::Poly(p) => p
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: Some(e.clone()),
                    freq: None,
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                    im_num: None,
                    im_den: None,
                })
                .collect(),
            Coefficient::Trig(t) => t
                .terms
                .iter()
                .map(|(k, c)| TermJson {
                    exp: None,
                    freq: Some(k.clone()),
                    num: c.re.numer().to_string(),
                    den: c.re.denom().to_string(),
                    im_num: (!c.im.is_zero()).then(|| c.im.numer().to_string()),
                    im_den: (!c.im.is_zero()).then(|| c.im.denom().to_string()),
                })
                .collect(),
        };
        CoefficientJson { ring: self.ring(), nvars: Some(self.nvars()), terms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CoefficientJson::deserialize(deserializer)?;
        let inferred = raw.terms.iter().find_map(|t| match raw.ring {
            Ring::Poly => t.exp.as_ref().map(Vec::len),
            Ring::Trig => t.freq.as_ref().map(Vec::len),
        });
        let nvars = raw
            .nvars
            .or(inferred)
            .ok_or_else(|| D::Error::custom("cannot infer chart dimension of an empty coefficient; supply \"nvars\""))?;
        match raw.ring {
            Ring::Poly => {
                let mut terms = Vec::with_capacity(raw.terms.len());
                for t in raw.terms {
                    let exp = t.exp.ok_or_else(|| D::Error::custom("poly term without \"exp\""))?;
                    terms.push((exp, parse_rational(&t.num, &t.den).map_err(D::Error::custom)?));
                }
                Poly::from_terms(nvars, terms).map(Into::into).map_err(D::Error::custom)
            }
            Ring::Trig => {
                let mut modes = Vec::with_capacity(raw.terms.len());
                for t in raw.terms {
                    let freq = t.freq.ok_or_else(|| D::Error::custom("trig term without \"freq\""))?;
                    let re = parse_rational(&t.num, &t.den).map_err(D::Error::custom)?;
                    let im = match (t.im_num, t.im_den) {
                        (Some(n), Some(d)) => parse_rational(&n, &d).map_err(D::Error::custom)?,
                        (None, None) => Rational::zero(),
                        _ => return Err(D::Error::custom("imaginary part needs both im_num and im_den")),
                    };
                    modes.push((freq, Gaussian::new(re, im)));
                }
                Trig::from_modes(nvars, modes).map(Into::into).map_err(D::Error::custom)
            }
        }
    }
}
