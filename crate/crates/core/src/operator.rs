//! Sparse exact matrices between labelled section-space bases.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coefficients::Rational;
use crate::error::{Error, Result};
use crate::forms::DifferentialForm;
use crate::grading::Grade;
use crate::linalg::{rank_fraction_free, rank_modular_certified, sparse_axpy, sparse_scale, DenseMatrix, SparseVec};
use crate::sections::{BasisLabel, SectionSpace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RankMethod {
    /// Fraction-free elimination over ℤ (default).
    #[default]
    FractionFree,
    /// Rank modulo a large prime, certified over ℚ; falls back to the exact
    /// routine when certification fails.
    Modular,
}

/// Rank of the span of `columns`.
pub fn rank_with(columns: &[SparseVec], method: RankMethod) -> usize {
    match method {
        RankMethod::FractionFree => rank_fraction_free(columns),
        RankMethod::Modular => rank_modular_certified(columns).unwrap_or_else(|| rank_fraction_free(columns)),
    }
}

/// Configures the global worker pool from `CSCX_THREADS`, if set.
/// Returns the number of worker threads in use.
pub fn configure_threads() -> Result<usize> {
    if let Ok(v) = std::env::var("CSCX_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("CSCX_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Error::Config("CSCX_THREADS must be positive".into()));
        }
        // a pool may already exist (e.g. in tests); that is not an error
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}

/// Verifies that consecutive matrices compose to zero; `ops[i]` is the
/// operator out of degree `first + i`.
pub fn check_complex(ops: &[OperatorMatrix], first: usize) -> Result<()> {
    for (i, pair) in ops.windows(2).enumerate() {
        if !pair[0].then(&pair[1])?.is_zero() {
            return Err(Error::NotAComplex { degree: first + i, next: first + i + 1 });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    name: String,
    rows: Vec<BasisLabel>,
    cols: Vec<BasisLabel>,
    columns: Vec<SparseVec>,
}

impl OperatorMatrix {
    pub fn new(name: impl Into<String>, rows: Vec<BasisLabel>, cols: Vec<BasisLabel>, columns: Vec<SparseVec>) -> Result<Self> {
        if columns.len() != cols.len() {
            return Err(Error::BasisMismatch(format!("{} columns for {} column labels", columns.len(), cols.len())));
        }
        if columns.iter().any(|c| c.keys().next_back().is_some_and(|&r| r >= rows.len())) {
            return Err(Error::BasisMismatch("row index out of range".into()));
        }
        Ok(OperatorMatrix { name: name.into(), rows, cols, columns })
    }

    pub fn zero(name: impl Into<String>, rows: Vec<BasisLabel>, cols: Vec<BasisLabel>) -> Self {
        let columns = vec![SparseVec::new(); cols.len()];
        OperatorMatrix { name: name.into(), rows, cols, columns }
    }

    pub fn from_dense(name: impl Into<String>, rows: Vec<BasisLabel>, cols: Vec<BasisLabel>, m: &DenseMatrix) -> Result<Self> {
        if m.rows() != rows.len() || m.cols() != cols.len() {
            return Err(Error::BasisMismatch("dense matrix shape does not match the labels".into()));
        }
        let columns = (0..m.cols())
            .map(|c| m.column(c).into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Self::new(name, rows, cols, columns)
    }

    /// Matrix of `op` between two section spaces, column by column.
    pub fn assemble<F>(name: impl Into<String>, source: &SectionSpace, target: &SectionSpace, op: F) -> Result<Self>
    where
        F: Fn(&[DifferentialForm]) -> Result<Vec<DifferentialForm>> + Sync,
    {
        let columns = (0..source.dim())
            .into_par_iter()
            .map(|i| target.coordinates(&op(&source.element(i))?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, target.labels(), source.labels(), columns)
    }

    pub fn assemble_single<F>(name: impl Into<String>, source: &SectionSpace, target: &SectionSpace, op: F) -> Result<Self>
    where
        F: Fn(&DifferentialForm) -> Result<DifferentialForm> + Sync,
    {
        Self::assemble(name, source, target, |parts| Ok(vec![op(&parts[0])?]))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn rows(&self) -> &[BasisLabel] {
        &self.rows
    }

    pub fn cols(&self) -> &[BasisLabel] {
        &self.cols
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn column(&self, c: usize) -> &SparseVec {
        &self.columns[c]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.columns[c].get(&r).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BTreeMap::is_empty)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (c, x) in v {
            sparse_axpy(&mut out, x, &self.columns[*c]);
        }
        out
    }

    /// The composite `next ∘ self`; the row basis of `self` must be the
    /// column basis of `next`.
    pub fn then(&self, next: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.rows != next.cols {
            return Err(Error::BasisMismatch(format!(
                "cannot compose {} -> {}: intermediate bases differ",
                self.name, next.name
            )));
        }
        let columns = self.columns.par_iter().map(|c| next.apply(c)).collect();
        Ok(OperatorMatrix {
            name: format!("{}·{}", next.name, self.name),
            rows: next.rows.clone(),
            cols: self.cols.clone(),
            columns,
        })
    }

    fn check_same_shape(&self, other: &OperatorMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::BasisMismatch(format!("{} and {} act between different bases", self.name, other.name)));
        }
        Ok(())
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_same_shape(other)?;
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut c = a.clone();
                sparse_axpy(&mut c, &-Rational::from_integer(1.into()), b);
                c
            })
            .collect();
        Ok(OperatorMatrix { name: format!("{}-{}", self.name, other.name), rows: self.rows.clone(), cols: self.cols.clone(), columns })
    }

    pub fn scale(&self, f: &Rational) -> OperatorMatrix {
        OperatorMatrix {
            name: self.name.clone(),
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            columns: self.columns.iter().map(|c| sparse_scale(c, f)).collect(),
        }
    }

    /// First entry where two matrices on the same bases differ.
    pub fn first_difference(&self, other: &OperatorMatrix) -> Result<Option<(usize, usize, Rational, Rational)>> {
        self.check_same_shape(other)?;
        for (c, (a, b)) in self.columns.iter().zip(&other.columns).enumerate() {
            if a != b {
                let r = a.keys().chain(b.keys()).find(|r| a.get(r) != b.get(r)).copied().unwrap();
                return Ok(Some((r, c, self.get(r, c), other.get(r, c))));
            }
        }
        Ok(None)
    }

    /// Entries linking different grades.
    pub fn off_block_entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (c, col) in self.columns.iter().enumerate() {
            for r in col.keys() {
                if self.rows[*r].grade != self.cols[c].grade {
                    out.push((*r, c));
                }
            }
        }
        out
    }

    pub fn is_block_diagonal(&self) -> bool {
        self.off_block_entries().is_empty()
    }

    /// Column indices of each grade, in grade order.
    pub fn column_blocks(&self) -> BTreeMap<Grade, Vec<usize>> {
        let mut out: BTreeMap<Grade, Vec<usize>> = BTreeMap::new();
        for (c, l) in self.cols.iter().enumerate() {
            out.entry(l.grade.clone()).or_default().push(c);
        }
        out
    }

    /// Exact rank, computed block by block in parallel when the matrix is
    /// block-diagonal.
    pub fn rank(&self, method: RankMethod) -> usize {
        self.block_ranks(method).values().sum()
    }

    pub fn block_ranks(&self, method: RankMethod) -> BTreeMap<Grade, usize> {
        if !self.is_block_diagonal() {
            let mut m = BTreeMap::new();
            m.insert(Grade::Weight(u32::MAX), rank_with(&self.columns, method));
            return m;
        }
        let blocks: Vec<(Grade, Vec<usize>)> = self.column_blocks().into_iter().collect();
        blocks
            .into_par_iter()
            .map(|(g, cols)| {
                let vs: Vec<SparseVec> = cols.iter().map(|&c| self.columns[c].clone()).collect();
                (g, rank_with(&vs, method))
            })
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.nrows(), self.ncols());
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                m.set(*r, c, v.clone());
            }
        }
        m
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| json!([r, c, v.to_string()])))
            .collect();
        json!({
            "name": self.name,
            "shape": [self.nrows(), self.ncols()],
            "rows": self.rows,
            "cols": self.cols,
            "entries": entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::int;
    use crate::grading::Truncation;
    use crate::sections::{Fiber, Twist};
    use std::sync::Arc;

    fn spaces() -> (SectionSpace, SectionSpace, SectionSpace) {
        let t = Truncation::weight(3);
        let mk = |k: usize| {
            SectionSpace::single(format!("O{k}"), 2, vec![1, 1], Arc::new(Fiber::full(format!("L{k}"), 2, k, Twist::Plain)), &t)
                .unwrap()
        };
        (mk(0), mk(1), mk(2))
    }

    #[test]
    fn de_rham_matrices_compose_to_zero() {
        let (o0, o1, o2) = spaces();
        let d0 = OperatorMatrix::assemble_single("d0", &o0, &o1, |f| Ok(f.exterior_derivative())).unwrap();
        let d1 = OperatorMatrix::assemble_single("d1", &o1, &o2, |f| Ok(f.exterior_derivative())).unwrap();
        assert!(d0.is_block_diagonal() && d1.is_block_diagonal());
        assert!(d0.then(&d1).unwrap().is_zero());
        // weight-0 block of d0 acts on constants
        let g0 = Grade::Weight(0);
        assert!(d0.column_blocks()[&g0].iter().all(|&c| d0.column(c).is_empty()));
        // kernel of d0 is the constants: rank = dim - 1
        assert_eq!(d0.rank(RankMethod::FractionFree), o0.dim() - 1);
        assert_eq!(d0.rank(RankMethod::Modular), o0.dim() - 1);
        assert!(d1.then(&d0).is_err());
    }

    #[test]
    fn dense_round_trip_and_difference() {
        let (o0, o1, _) = spaces();
        let d0 = OperatorMatrix::assemble_single("d0", &o0, &o1, |f| Ok(f.exterior_derivative())).unwrap();
        let back = OperatorMatrix::from_dense("d0", o1.labels(), o0.labels(), &d0.to_dense()).unwrap();
        assert_eq!(back, d0);
        assert!(d0.first_difference(&back).unwrap().is_none());
        let twice = d0.scale(&int(2));
        assert!(twice.sub(&d0).unwrap().first_difference(&d0).unwrap().is_none());
        assert!(d0.to_json()["entries"].as_array().unwrap().len() == d0.nnz());
    }
}
