//! Square complex matrices in compressed-row form.

use std::collections::BTreeMap;
use std::io::{self, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

/// Entries at or below this magnitude are not stored.
pub const DROP_TOLERANCE: f64 = 1e-15;
/// Largest `|A - A^dag|` entry for which a matrix is flagged Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Accumulates `(row, col, value)` contributions, summing duplicates.
#[derive(Clone, Debug)]
pub struct CooBuilder {
    dim: usize,
    entries: BTreeMap<(usize, usize), C64>,
}

impl CooBuilder {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: BTreeMap::new() }
    }

    pub fn add(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        *self.entries.entry((row, col)).or_default() += value;
    }

    pub fn build(self) -> SparseOperator {
        let dim = self.dim;
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values = Vec::with_capacity(self.entries.len());
        for ((r, c), v) in self.entries {
            if v.norm() > DROP_TOLERANCE {
                row_ptr[r + 1] += 1;
                col_idx.push(c);
                values.push(v);
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut op = SparseOperator { dim, row_ptr, col_idx, values, hermitian: false };
        op.hermitian = op.hermiticity_deviation() <= HERMITIAN_TOLERANCE;
        op
    }
}

/// CSR matrix with a measured Hermiticity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
    hermitian: bool,
}

impl SparseOperator {
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut b = CooBuilder::new(dim);
        for (r, c, v) in triplets {
            b.add(r, c, v);
        }
        b.build()
    }

    pub fn zeros(dim: usize) -> Self {
        CooBuilder::new(dim).build()
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let n = m.nrows();
        Ok(Self::from_triplets(
            n,
            (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| (r, c, m[(r, c)])),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Hermiticity measured at construction.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `out = A x`.
    pub fn matvec_into(&self, x: &[C64], out: &mut [C64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (c, r, v.conj())))
    }

    /// Largest entry of `|A - A^dag|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.iter()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// `alpha A + beta B`.
    pub fn linear_combination(&self, alpha: C64, other: &Self, beta: C64) -> Result<Self> {
        self.check_dim(other)?;
        let mut b = CooBuilder::new(self.dim);
        self.iter().for_each(|(r, c, v)| b.add(r, c, alpha * v));
        other.iter().for_each(|(r, c, v)| b.add(r, c, beta * v));
        Ok(b.build())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_combination(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_combination(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (r, c, alpha * v)))
    }

    /// `A + c I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut b = CooBuilder::new(self.dim);
        self.iter().for_each(|(r, col, v)| b.add(r, col, v));
        (0..self.dim).for_each(|i| b.add(i, i, C64::new(c, 0.0)));
        b.build()
    }

    /// Operator product `A B` (B acts first).
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut b = CooBuilder::new(self.dim);
        for (r, k, a) in self.iter() {
            for (c, v) in other.row(k) {
                b.add(r, c, a * v);
            }
        }
        Ok(b.build())
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry of `|A - B|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Sub-matrix on `indices` (rows and columns), in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let mut position = vec![usize::MAX; self.dim];
        for (p, &i) in indices.iter().enumerate() {
            if i >= self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: i });
            }
            position[i] = p;
        }
        let mut b = CooBuilder::new(indices.len());
        for (p, &i) in indices.iter().enumerate() {
            for (c, v) in self.row(i) {
                if position[c] != usize::MAX {
                    b.add(p, position[c], v);
                }
            }
        }
        Ok(b.build())
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Writes a `dim` header line followed by one `row col re im` line per
    /// stored entry.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# dim {}", self.dim)?;
        for (r, c, v) in self.iter() {
            writeln!(w, "{r} {c} {:.17e} {:.17e}", v.re, v.im)?;
        }
        Ok(())
    }

    /// Parses the format written by [`write_triplets`](Self::write_triplets).
    pub fn read_triplets(text: &str) -> Result<Self> {
        let bad = |line: usize| Error::InvalidSpec(format!("malformed triplet on line {line}"));
        let mut lines = text.lines().enumerate();
        let dim = lines
            .next()
            .and_then(|(_, l)| l.strip_prefix("# dim "))
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| bad(1))?;
        let mut b = CooBuilder::new(dim);
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.is_empty() {
                continue;
            }
            if f.len() != 4 {
                return Err(bad(i + 1));
            }
            let r: usize = f[0].parse().map_err(|_| bad(i + 1))?;
            let c: usize = f[1].parse().map_err(|_| bad(i + 1))?;
            let re: f64 = f[2].parse().map_err(|_| bad(i + 1))?;
            let im: f64 = f[3].parse().map_err(|_| bad(i + 1))?;
            if r >= dim || c >= dim {
                return Err(bad(i + 1));
            }
            b.add(r, c, C64::new(re, im));
        }
        Ok(b.build())
    }
}
