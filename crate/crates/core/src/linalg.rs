//! Dense exact linear algebra over a prime field.
//!
//! All elimination uses first-nonzero pivoting, so every result is a
//! deterministic function of the input matrix.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElement, FieldError, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("column index {index} out of range for {cols} columns")]
    IndexOutOfRange { index: usize, cols: usize },
    #[error("column index {0} listed twice")]
    DuplicateIndex(usize),
    #[error("rows have unequal lengths")]
    Ragged,
    #[error("entry {value} at ({row}, {col}) is not in [0, {q})")]
    EntryOutOfRange { row: usize, col: usize, value: u64, q: u32 },
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A dense row-major matrix over GF(q). Entries are stored as canonical
/// residues and share the matrix's single [`FieldSpec`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// A solution of `m · xᵀ = bᵀ`. `unique` is false when the system has free
/// variables, in which case `x` sets all of them to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub x: Vec<u32>,
    pub unique: bool,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.q();
        }
        m
    }

    /// Builds a matrix from rows of canonical values in `[0, q)`.
    ///
    /// An empty row list yields a `0 × cols` matrix only through
    /// [`Matrix::zeros`]; here the column count comes from the first row.
    pub fn from_rows<T: Copy + Into<u64>>(field: FieldSpec, rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_rows_with_cols(field, cols, rows)
    }

    pub fn from_rows_with_cols<T: Copy + Into<u64>>(
        field: FieldSpec,
        cols: usize,
        rows: &[Vec<T>],
    ) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Ragged);
            }
            for (c, &v) in row.iter().enumerate() {
                let v: u64 = v.into();
                if v >= field.q() as u64 {
                    return Err(LinalgError::EntryOutOfRange { row: r, col: c, value: v, q: field.q() });
                }
                data.push(v as u32);
            }
        }
        Ok(Matrix { field, rows: rows.len(), cols, data })
    }

    /// Vandermonde matrix with entry `(t, j) = points[j]^t` for
    /// `t = 0..rows`. The first row is all ones.
    pub fn vandermonde(field: FieldSpec, points: &[u32], rows: usize) -> Self {
        let mut m = Matrix::zeros(field, rows, points.len());
        for (j, &p) in points.iter().enumerate() {
            let mut acc = 1 % field.q();
            for t in 0..rows {
                m.data[t * m.cols + j] = acc;
                acc = field.mul(acc, p % field.q());
            }
        }
        m
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn entry(&self, r: usize, c: usize) -> FieldElement {
        self.field.reduce(self.get(r, c) as i64)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.q());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch(self.field.q(), other.field.q()).into());
        }
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// `m · xᵀ`, one entry per row.
    pub fn mul_vec(&self, x: &[u32]) -> Result<Vec<u32>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::Dimension(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        let f = self.field;
        Ok((0..self.rows).map(|r| self.row(r).iter().zip(x).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))).collect())
    }

    /// `x · m`, one entry per column.
    pub fn vec_mul(&self, x: &[u32]) -> Result<Vec<u32>, LinalgError> {
        if x.len() != self.rows {
            return Err(LinalgError::Dimension(format!("vector of length {} for {} rows", x.len(), self.rows)));
        }
        let f = self.field;
        let mut out = vec![0u32; self.cols];
        for (r, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(a, v));
            }
        }
        Ok(out)
    }

    fn check_indices(&self, idx: &[usize]) -> Result<(), LinalgError> {
        let mut seen = vec![false; self.cols];
        for &i in idx {
            if i >= self.cols {
                return Err(LinalgError::IndexOutOfRange { index: i, cols: self.cols });
            }
            if seen[i] {
                return Err(LinalgError::DuplicateIndex(i));
            }
            seen[i] = true;
        }
        Ok(())
    }

    /// The submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, idx: &[usize]) -> Result<Matrix, LinalgError> {
        self.check_indices(idx)?;
        let mut m = Matrix::zeros(self.field, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m.data[r * idx.len() + j] = self.get(r, c);
            }
        }
        Ok(m)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix { field: self.field, rows: idx.len(), cols: self.cols, data }
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch(self.field.q(), other.field.q()).into());
        }
        if self.cols != other.cols {
            return Err(LinalgError::Dimension(format!("vstack of {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Reduced row echelon form and its pivot columns (strictly increasing).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = eliminate(self.field, &mut m.data, m.rows, m.cols, true);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut scratch = self.data.clone();
        eliminate(self.field, &mut scratch, self.rows, self.cols, false).len()
    }

    /// Rank of the submatrix formed by `idx`, without the bounds checks of
    /// [`Matrix::select_columns`]. Hot path of every subset search.
    pub fn rank_of_columns(&self, idx: &[usize]) -> usize {
        let w = idx.len();
        let mut scratch = Vec::with_capacity(self.rows * w);
        for r in 0..self.rows {
            let row = self.row(r);
            scratch.extend(idx.iter().map(|&c| row[c]));
        }
        eliminate(self.field, &mut scratch, self.rows, w, false).len()
    }

    /// True iff the listed columns are linearly dependent.
    pub fn columns_dependent(&self, idx: &[usize]) -> Result<bool, LinalgError> {
        self.check_indices(idx)?;
        Ok(self.rank_of_columns(idx) < idx.len())
    }

    /// A basis of `{x : m · xᵀ = 0}`, one vector per row. The basis has
    /// `cols - rank` rows; each row has a single 1 in one free column.
    pub fn null_space(&self) -> Matrix {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = Matrix::zeros(f, free.len(), self.cols);
        for (b, &fc) in free.iter().enumerate() {
            basis.set(b, fc, 1 % f.q());
            for (pr, &pc) in pivots.iter().enumerate() {
                basis.set(b, pc, f.neg(r.get(pr, fc)));
            }
        }
        basis
    }

    /// Solves `m · xᵀ = bᵀ`.
    pub fn solve(&self, b: &[u32]) -> Result<Solution, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::Dimension(format!("rhs of length {} for {} rows", b.len(), self.rows)));
        }
        let w = self.cols + 1;
        let mut aug = Vec::with_capacity(self.rows * w);
        for (r, &v) in b.iter().enumerate() {
            aug.extend_from_slice(self.row(r));
            aug.push(v % self.field.q());
        }
        let pivots = eliminate(self.field, &mut aug, self.rows, w, true);
        if pivots.last() == Some(&self.cols) {
            return Err(LinalgError::Inconsistent);
        }
        let mut x = vec![0u32; self.cols];
        for (pr, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[pr * w + self.cols];
        }
        Ok(Solution { x, unique: pivots.len() == self.cols })
    }
}

/// Gauss–Jordan elimination in place on a row-major buffer; returns pivot
/// columns. With `full` false only rows below each pivot are cleared, which
/// is enough for rank.
fn eliminate(f: FieldSpec, a: &mut [u32], rows: usize, cols: usize, full: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(sel) = (pr..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if sel != pr {
            for j in 0..cols {
                a.swap(sel * cols + j, pr * cols + j);
            }
        }
        let inv = f.inv(a[pr * cols + c]).expect("pivot is nonzero");
        for j in c..cols {
            a[pr * cols + j] = f.mul(a[pr * cols + j], inv);
        }
        let start = if full { 0 } else { pr + 1 };
        for r in start..rows {
            if r == pr {
                continue;
            }
            let factor = a[r * cols + c];
            if factor == 0 {
                continue;
            }
            for j in c..cols {
                let v = f.sub(a[r * cols + j], f.mul(factor, a[pr * cols + j]));
                a[r * cols + j] = v;
            }
        }
        pivots.push(c);
        pr += 1;
    }
    pivots
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    q: u32,
    cols: usize,
    rows: Vec<Vec<u32>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson { q: self.field.q(), cols: self.cols, rows: self.to_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        let field = FieldSpec::new(j.q).map_err(serde::de::Error::custom)?;
        Matrix::from_rows_with_cols(field, j.cols, &j.rows).map_err(serde::de::Error::custom)
    }
}
