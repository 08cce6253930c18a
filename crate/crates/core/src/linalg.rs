//! Exact linear algebra over ℚ.
//!
//! * [`DenseMatrix`]: small dense matrices for fiberwise (pointwise) algebra.
//! * [`Echelon`]: incremental sparse echelon basis with combination
//!   tracking, used for solves, kernels and coordinate extraction.
//! * [`rank_fraction_free`]: sparse fraction-free elimination over ℤ with
//!   Markowitz-style pivot selection; the default rank routine.
//! * [`rank_modular_certified`]: rank modulo a large prime, certified by
//!   lifting the modular kernel to ℚ and checking it exactly.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::coefficients::Rational;

pub type SparseVec = BTreeMap<usize, Rational>;

pub fn sparse_axpy(target: &mut SparseVec, factor: &Rational, x: &SparseVec) {
    if factor.is_zero() {
        return;
    }
    for (i, v) in x {
        let add = factor * v;
        match target.entry(*i) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(add);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &add;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
}

pub fn sparse_scale(x: &SparseVec, factor: &Rational) -> SparseVec {
    if factor.is_zero() {
        return SparseVec::new();
    }
    x.iter().map(|(i, v)| (*i, v * factor)).collect()
}

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        DenseMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(nrows: usize, cols: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row(&self, r: usize) -> Vec<Rational> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = Rational::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        s += a * x;
                    }
                }
                s
            })
            .collect()
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, f: &Rational) -> DenseMatrix {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// `Some(c)` if the matrix equals `c·I`.
    pub fn scalar_value(&self) -> Option<Rational> {
        if self.rows != self.cols {
            return None;
        }
        if self.rows == 0 {
            return Some(Rational::zero());
        }
        let c = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected = if i == j { &c } else { &Rational::zero() };
                if self.get(i, j) != expected {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (DenseMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = m.get(row, col).recip();
            for c in 0..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..m.cols {
                    let v = m.get(r, c) - &f * m.get(row, c);
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `self · x = b`, if one exists.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<DenseMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                for c in 0..n {
                    m.data.swap(p * n + c, col * n + c);
                }
                det = -det;
            }
            let piv = m.get(col, col).clone();
            det *= &piv;
            for r in col + 1..n {
                let f = m.get(r, col) / &piv;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m.get(r, c) - &f * m.get(col, c);
                    m.set(r, c, v);
                }
            }
        }
        det
    }
}

// ---------------------------------------------------------------------------
// Incremental sparse echelon basis
// ---------------------------------------------------------------------------

/// Incrementally built echelon basis of a set of sparse vectors.
///
/// Every stored vector has its smallest index as pivot, normalised to 1,
/// together with its expression as a combination of the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, (SparseVec, SparseVec)>,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Returns `(residual, combo)` with `v = residual + Σ combo_j · input_j`;
    /// the residual has no entries on pivot positions.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut residual = v.clone();
        let mut combo = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let next = residual
                .range(cursor..)
                .find(|(k, _)| self.rows.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = next else { break };
            let (row, track) = &self.rows[&k];
            sparse_axpy(&mut residual, &-c.clone(), row);
            sparse_axpy(&mut combo, &c, track);
            cursor = k + 1;
        }
        (residual, combo)
    }

    /// Inserts the next input vector. Returns `None` if it was independent
    /// of the previous ones, otherwise a kernel relation among the inputs
    /// with coefficient 1 on the new vector.
    pub fn insert(&mut self, v: SparseVec) -> Option<SparseVec> {
        let id = self.inserted;
        self.inserted += 1;
        let (residual, combo) = self.reduce(&v);
        let mut relation = sparse_scale(&combo, &-Rational::one());
        relation.insert(id, Rational::one());
        match residual.iter().next() {
            None => Some(relation),
            Some((&p, lead)) => {
                let inv = lead.recip();
                self.rows.insert(p, (sparse_scale(&residual, &inv), sparse_scale(&relation, &inv)));
                None
            }
        }
    }

    /// Expresses `v` as a combination of the inserted vectors, if possible.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        let (residual, combo) = self.reduce(v);
        residual.is_empty().then_some(combo)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }
}

/// Rank and right-kernel basis of the matrix with the given columns.
pub fn kernel(columns: &[SparseVec]) -> (usize, Vec<SparseVec>) {
    let mut ech = Echelon::new();
    let mut ker = Vec::new();
    for c in columns {
        if let Some(rel) = ech.insert(c.clone()) {
            ker.push(rel);
        }
    }
    (ech.rank(), ker)
}

// ---------------------------------------------------------------------------
// Fraction-free rank
// ---------------------------------------------------------------------------

type IntRow = Vec<(usize, BigInt)>;

fn to_integer_row(v: &SparseVec) -> IntRow {
    let mut lcm = BigInt::one();
    for x in v.values() {
        lcm = lcm.lcm(x.denom());
    }
    let row: IntRow = v.iter().map(|(i, x)| (*i, x.numer() * (&lcm / x.denom()))).collect();
    primitive_part(row)
}

fn primitive_part(mut row: IntRow) -> IntRow {
    let mut g = BigInt::zero();
    for (_, x) in &row {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x /= &g;
        }
    }
    if row.first().is_some_and(|(_, x)| x.sign() == Sign::Minus) {
        for (_, x) in row.iter_mut() {
            *x = -&*x;
        }
    }
    row
}

fn entry(row: &IntRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1)
}

/// `a·row - b·pivot`, dropping zeros, then content-reduced.
fn combine(row: &IntRow, a: &BigInt, pivot: &IntRow, b: &BigInt) -> IntRow {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push((row[i].0, a * &row[i].1));
            i += 1;
        } else if take_piv {
            out.push((pivot[j].0, -(b * &pivot[j].1)));
            j += 1;
        } else {
            let v = a * &row[i].1 - b * &pivot[j].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    primitive_part(out)
}

/// Rank of the matrix spanned by the given vectors (as rows or columns,
/// equivalently), by fraction-free elimination with Markowitz-style pivots.
pub fn rank_fraction_free(vectors: &[SparseVec]) -> usize {
    let mut rows: Vec<IntRow> = vectors.iter().filter(|v| !v.is_empty()).map(to_integer_row).collect();
    let mut col_count: HashMap<usize, usize> = HashMap::new();
    for r in &rows {
        for (c, _) in r {
            *col_count.entry(*c).or_default() += 1;
        }
    }
    let mut rank = 0;
    while !rows.is_empty() {
        // Markowitz cost (r_i - 1)(c_j - 1) among the sparsest rows.
        let min_len = rows.iter().map(Vec::len).min().unwrap();
        let mut best: Option<(usize, usize, usize, u64)> = None; // (row, col, cost, bits)
        for (ri, r) in rows.iter().enumerate().filter(|(_, r)| r.len() == min_len).take(16) {
            for (c, v) in r {
                let cost = (r.len() - 1) * (col_count[c] - 1);
                let bits = v.bits();
                if best.is_none_or(|(_, _, bc, bb)| (cost, bits) < (bc, bb)) {
                    best = Some((ri, *c, cost, bits));
                }
            }
        }
        let (pr, pc, _, _) = best.unwrap();
        let pivot = rows.swap_remove(pr);
        for (c, _) in &pivot {
            *col_count.get_mut(c).unwrap() -= 1;
        }
        let p = entry(&pivot, pc).unwrap().clone();
        let mut kept = Vec::with_capacity(rows.len());
        for r in rows.drain(..) {
            match entry(&r, pc) {
                None => kept.push(r),
                Some(a) => {
                    let g = a.gcd(&p);
                    let (mul_row, mul_piv) = (&p / &g, a / &g);
                    for (c, _) in &r {
                        *col_count.get_mut(c).unwrap() -= 1;
                    }
                    let nr = combine(&r, &mul_row, &pivot, &mul_piv);
                    for (c, _) in &nr {
                        *col_count.entry(*c).or_default() += 1;
                    }
                    if !nr.is_empty() {
                        kept.push(nr);
                    }
                }
            }
        }
        rows = kept;
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// Modular rank with rational certification
// ---------------------------------------------------------------------------

const MODULUS: u64 = (1u64 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn invmod(a: u64) -> u64 {
    powmod(a, MODULUS - 2)
}

fn reduce_int(x: &BigInt) -> u64 {
    let m = BigInt::from(MODULUS);
    x.mod_floor(&m).to_u64().unwrap()
}

fn reduce_rational(x: &Rational) -> Option<u64> {
    let d = reduce_int(x.denom());
    (d != 0).then(|| mulmod(reduce_int(x.numer()), invmod(d)))
}

/// Smallest `a/b ≡ x (mod p)` with `|a|, |b| ≤ sqrt(p/2)`.
fn rational_reconstruct(x: u64) -> Option<Rational> {
    let bound = ((MODULUS / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (MODULUS as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    Some(Rational::new(BigInt::from(r1), BigInt::from(t1)))
}

type ModVec = BTreeMap<usize, u64>;

fn mod_axpy(target: &mut ModVec, factor: u64, x: &ModVec) {
    for (i, v) in x {
        let add = mulmod(factor, *v);
        let e = target.entry(*i).or_insert(0);
        *e = (*e + add) % MODULUS;
        if *e == 0 {
            target.remove(i);
        }
    }
}

/// Rank computed modulo `2^61 - 1`, certified exactly: the modular kernel is
/// lifted to ℚ by rational reconstruction and each vector is checked to be
/// an exact kernel vector. Returns `None` when certification fails (the
/// caller should then fall back to [`rank_fraction_free`]).
pub fn rank_modular_certified(columns: &[SparseVec]) -> Option<usize> {
    let mut mod_cols = Vec::with_capacity(columns.len());
    for c in columns {
        let mut v = ModVec::new();
        for (i, x) in c {
            let r = reduce_rational(x)?;
            if r != 0 {
                v.insert(*i, r);
            }
        }
        mod_cols.push(v);
    }
    // echelon with tracking, mod p
    let mut rows: BTreeMap<usize, (ModVec, ModVec)> = BTreeMap::new();
    let mut kernel_mod = Vec::new();
    for (id, v) in mod_cols.into_iter().enumerate() {
        let mut residual = v;
        let mut combo = ModVec::new();
        let mut cursor = 0;
        loop {
            let next = residual.range(cursor..).find(|(k, _)| rows.contains_key(k)).map(|(k, c)| (*k, *c));
            let Some((k, c)) = next else { break };
            let (row, track) = &rows[&k];
            mod_axpy(&mut residual, MODULUS - c, row);
            mod_axpy(&mut combo, c, track);
            cursor = k + 1;
        }
        let mut relation: ModVec = combo.iter().map(|(i, v)| (*i, (MODULUS - v) % MODULUS)).filter(|(_, v)| *v != 0).collect();
        relation.insert(id, 1);
        match residual.iter().next() {
            None => kernel_mod.push(relation),
            Some((&p, &lead)) => {
                let inv = invmod(lead);
                let scale = |m: &ModVec| -> ModVec { m.iter().map(|(i, v)| (*i, mulmod(*v, inv))).collect() };
                rows.insert(p, (scale(&residual), scale(&relation)));
            }
        }
    }
    let rank_mod = rows.len();
    for rel in &kernel_mod {
        let mut acc = SparseVec::new();
        for (j, v) in rel {
            let q = rational_reconstruct(*v)?;
            sparse_axpy(&mut acc, &q, &columns[*j]);
        }
        if !acc.is_empty() {
            return None;
        }
    }
    Some(rank_mod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{int, rat};

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|(i, v)| (*i, int(*v))).filter(|(_, v)| !v.is_zero()).collect()
    }

    #[test]
    fn dense_basics() {
        let m = DenseMatrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.nullspace(), vec![vec![int(-2), int(1)]]);
        assert!(m.inverse().is_none());
        let a = DenseMatrix::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(1)]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), DenseMatrix::identity(2));
        assert_eq!(a.determinant(), int(1));
        assert_eq!(a.solve(&[int(3), int(2)]).unwrap(), vec![int(1), int(1)]);
    }

    #[test]
    fn echelon_kernel_and_solve() {
        let cols = vec![sv(&[(0, 1), (1, 1)]), sv(&[(1, 1), (2, 1)]), sv(&[(0, 1), (2, -1)])];
        let (rank, ker) = kernel(&cols);
        assert_eq!(rank, 2);
        assert_eq!(ker.len(), 1);
        let mut acc = SparseVec::new();
        for (j, c) in &ker[0] {
            sparse_axpy(&mut acc, c, &cols[*j]);
        }
        assert!(acc.is_empty());
        let mut ech = Echelon::new();
        for c in &cols {
            ech.insert(c.clone());
        }
        let target = sv(&[(0, 2), (1, 3), (2, 1)]);
        let combo = ech.solve(&target).unwrap();
        let mut acc = SparseVec::new();
        for (j, c) in &combo {
            sparse_axpy(&mut acc, c, &cols[*j]);
        }
        assert_eq!(acc, target);
        assert!(ech.solve(&sv(&[(3, 1)])).is_none());
    }

    #[test]
    fn ranks_agree() {
        let cols = vec![
            sv(&[(0, 3), (2, 6)]),
            sv(&[(0, 1), (1, 5)]),
            sv(&[(1, 5), (2, -6)]),
            sv(&[(3, 7)]),
            [(0usize, rat(1, 3)), (1, rat(5, 3)), (3, rat(7, 2))].into_iter().collect(),
        ];
        // c4 = c1/3 + c3/2; the first four are independent
        assert_eq!(rank_fraction_free(&cols), 4);
        assert_eq!(kernel(&cols).0, 4);
        assert_eq!(rank_modular_certified(&cols), Some(4));
    }

    #[test]
    fn reconstruction() {
        let x = reduce_rational(&rat(-7, 12)).unwrap();
        assert_eq!(rational_reconstruct(x), Some(rat(-7, 12)));
    }
}
