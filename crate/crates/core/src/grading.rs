//! Weight and Fourier-mode gradings, and the truncations built from them.
//!
//! Every operator in this crate preserves the grade, so a truncated section
//! space is a direct sum of complete graded blocks.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coefficients::{canonical_mode, Coefficient, Poly, Rational, Ring, Trig};
use crate::error::{Error, Result};

/// Grade of a block: total weight (polynomial ring) or a Fourier mode pair
/// `{k, -k}` identified by its canonical representative (trigonometric ring).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grade {
    Weight(u32),
    Mode(Vec<i64>),
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::Weight(w) => write!(f, "w{w}"),
            Grade::Mode(k) => write!(f, "k{k:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Truncation {
    /// All blocks of total weight `0..=max`.
    Weight { max: u32 },
    /// The listed Fourier mode pairs (canonicalised, deduplicated).
    Modes { modes: Vec<Vec<i64>> },
}

impl Truncation {
    pub fn weight(max: u32) -> Self {
        Truncation::Weight { max }
    }

    pub fn modes<I: IntoIterator<Item = Vec<i64>>>(modes: I) -> Self {
        let mut list: Vec<Vec<i64>> = modes.into_iter().map(|k| canonical_mode(&k)).collect();
        list.sort();
        list.dedup();
        Truncation::Modes { modes: list }
    }

    pub fn ring(&self) -> Ring {
        match self {
            Truncation::Weight { .. } => Ring::Poly,
            Truncation::Modes { .. } => Ring::Trig,
        }
    }

    pub fn grades(&self) -> Vec<Grade> {
        match self {
            Truncation::Weight { max } => (0..=*max).map(Grade::Weight).collect(),
            Truncation::Modes { modes } => modes.iter().cloned().map(Grade::Mode).collect(),
        }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Weight { max } => write!(f, "weight <= {max}"),
            Truncation::Modes { modes } => write!(f, "{} mode pair(s)", modes.len()),
        }
    }
}

/// A scalar basis function: a monomial, or `1`, `cos(k·θ)`, `sin(k·θ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarFn {
    Monomial(Vec<u32>),
    One,
    Cos(Vec<i64>),
    Sin(Vec<i64>),
}

impl ScalarFn {
    pub fn to_coefficient(&self, nvars: usize) -> Coefficient {
        match self {
            ScalarFn::Monomial(e) => Poly::monomial(nvars, e.clone(), Rational::from_integer(1.into())).into(),
            ScalarFn::One => Trig::one(nvars).into(),
            ScalarFn::Cos(k) => Trig::cos(k.clone()).into(),
            ScalarFn::Sin(k) => Trig::sin(k.clone()).into(),
        }
    }

    pub fn ring(&self) -> Ring {
        match self {
            ScalarFn::Monomial(_) => Ring::Poly,
            _ => Ring::Trig,
        }
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Monomial(e) => write!(f, "x^{e:?}"),
            ScalarFn::One => write!(f, "1"),
            ScalarFn::Cos(k) => write!(f, "cos{k:?}"),
            ScalarFn::Sin(k) => write!(f, "sin{k:?}"),
        }
    }
}

/// Exponent vectors of total weight exactly `weight`, in lexicographic order.
pub fn monomials_of_weight(var_weights: &[u32], weight: u32) -> Vec<Vec<u32>> {
    fn rec(ws: &[u32], pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == ws.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = ws[pos];
        let max = if w == 0 { 0 } else { left / w };
        for e in (0..=max).rev() {
            cur[pos] = e;
            rec(ws, pos + 1, left - e * w, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; var_weights.len()];
    rec(var_weights, 0, weight, &mut cur, &mut out);
    out
}

/// Scalar basis of a block, for a summand whose fiber has weight `fiber_weight`.
pub fn scalar_basis(grade: &Grade, var_weights: &[u32], fiber_weight: u32) -> Vec<ScalarFn> {
    match grade {
        Grade::Weight(w) => {
            if *w < fiber_weight {
                return Vec::new();
            }
            monomials_of_weight(var_weights, w - fiber_weight).into_iter().map(ScalarFn::Monomial).collect()
        }
        Grade::Mode(k) => {
            if k.iter().all(|&c| c == 0) {
                vec![ScalarFn::One]
            } else {
                vec![ScalarFn::Cos(k.clone()), ScalarFn::Sin(k.clone())]
            }
        }
    }
}

/// All canonical mode pairs with entries drawn from `entries`, including 0.
pub fn modes_with_entries(dim: usize, entries: &[i64]) -> Vec<Vec<i64>> {
    let mut vals: Vec<i64> = entries.to_vec();
    vals.sort();
    vals.dedup();
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect();
    }
    let mut canon: Vec<Vec<i64>> = out.into_iter().map(|k| canonical_mode(&k)).collect();
    canon.sort();
    canon.dedup();
    canon
}

/// `count` distinct nonzero canonical modes with entries in `[-2, 2]`,
/// chosen reproducibly from `seed`.
pub fn sample_modes(dim: usize, count: usize, seed: u64) -> Result<Vec<Vec<i64>>> {
    let mut pool: Vec<Vec<i64>> =
        modes_with_entries(dim, &[-2, -1, 0, 1, 2]).into_iter().filter(|k| k.iter().any(|&c| c != 0)).collect();
    if count > pool.len() {
        return Err(Error::Config(format!("cannot sample {count} distinct nonzero modes in dimension {dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    pool.truncate(count);
    pool.sort();
    Ok(pool)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_monomials() {
        // x, y weight 1; t weight 2
        let ms = monomials_of_weight(&[1, 1, 2], 2);
        assert_eq!(ms, vec![vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0], vec![0, 0, 1]]);
        assert_eq!(monomials_of_weight(&[1, 1, 1, 1], 0), vec![vec![0, 0, 0, 0]]);
        assert_eq!(monomials_of_weight(&[1, 1, 1, 1], 3).len(), 20);
    }

    #[test]
    fn mode_sets() {
        // entries {0,1} in dimension 2: (0,0),(0,1),(1,0),(1,1)
        assert_eq!(modes_with_entries(2, &[0, 1]).len(), 4);
        // entries {-1,0,1}: 9 vectors, pairs identified -> 5
        assert_eq!(modes_with_entries(2, &[-1, 0, 1]).len(), 5);
        let s = sample_modes(4, 3, 7).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s, sample_modes(4, 3, 7).unwrap());
        assert!(s.iter().all(|k| k.iter().any(|&c| c != 0)));
    }

    #[test]
    fn scalar_blocks() {
        assert!(scalar_basis(&Grade::Weight(1), &[1, 1], 2).is_empty());
        assert_eq!(scalar_basis(&Grade::Mode(vec![0, 0]), &[1, 1], 0), vec![ScalarFn::One]);
        assert_eq!(scalar_basis(&Grade::Mode(vec![0, 1]), &[1, 1], 0).len(), 2);
    }
}
