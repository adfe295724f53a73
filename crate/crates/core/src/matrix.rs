//! Dense row-major matrices over a prime field and exact elimination.

use std::fmt;

use itertools::Itertools;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::PrimeField;

/// Default ceiling on the number of column subsets `is_mds` will enumerate.
pub const DEFAULT_MDS_CAP: u128 = 10_000_000;

/// A `rows x cols` matrix over `F_q`; every entry is a canonical residue.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Output of Gauss-Jordan elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RrefResult {
    pub rref: Matrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
    /// Invertible row-operation matrix with `transform * input = rref`.
    pub transform: Matrix,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.modulus();
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting non-residues.
    pub fn from_vec(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        for &x in &data {
            field.check(x)?;
        }
        Ok(Self { field, rows, cols, data })
    }

    /// Builds a matrix from nested rows. An empty slice gives a `0 x 0` matrix.
    pub fn from_rows<R: AsRef<[u64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_rows_with_cols(field, rows, cols)
    }

    /// Like [`Matrix::from_rows`] but fixes the column count so empty row lists keep their width.
    pub fn from_rows_with_cols<R: AsRef<[u64]>>(
        field: PrimeField,
        rows: &[R],
        cols: usize,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(field, rows.len(), cols, data)
    }

    pub fn from_fn(
        field: PrimeField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u64,
    ) -> Self {
        let q = field.modulus();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % q);
            }
        }
        Self { field, rows, cols, data }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u64) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        self.data[r * self.cols + c] = value % self.field.modulus();
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::IndexOutOfRange { index: bad, len: self.cols });
        }
        Ok(Matrix::from_fn(self.field, self.rows, cols.len(), |i, j| self.get(i, cols[j])))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::IndexOutOfRange { index: bad, len: self.rows });
        }
        Ok(Matrix::from_fn(self.field, rows.len(), self.cols, |i, j| self.get(rows[i], j)))
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &Matrix) -> Result<Matrix> {
        self.field.ensure_same(&below.field)?;
        if self.cols != below.cols {
            return Err(Error::Shape(format!(
                "cannot stack {}x{} on {}x{}",
                self.rows, self.cols, below.rows, below.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(Matrix { field: self.field, rows: self.rows + below.rows, cols: self.cols, data })
    }

    /// Exact product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        self.field.ensure_same(&rhs.field)?;
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let q = self.field.modulus() as u128;
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        let mut acc = vec![0u128; rhs.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u128;
                if a == 0 {
                    continue;
                }
                let rrow = rhs.row(k);
                for (slot, &b) in acc.iter_mut().zip(rrow) {
                    *slot = (*slot + a * b as u128) % q;
                }
            }
            for (j, a) in acc.iter().enumerate() {
                out.data[i * rhs.cols + j] = *a as u64;
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan elimination with first-nonzero pivoting.
    pub fn rref(&self) -> RrefResult {
        let f = self.field;
        let mut a = self.clone();
        let mut t = Matrix::identity(f, self.rows);
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| a.get(i, c) != 0) else {
                continue;
            };
            a.swap_rows(r, p);
            t.swap_rows(r, p);
            let inv = f.inv(a.get(r, c)).expect("pivot is nonzero");
            a.scale_row(r, inv);
            t.scale_row(r, inv);
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = a.get(i, c);
                if factor != 0 {
                    a.add_scaled_row(i, r, f.neg(factor));
                    t.add_scaled_row(i, r, f.neg(factor));
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        RrefResult { rref: a, rank: r, pivot_cols, transform: t }
    }

    pub fn rank(&self) -> usize {
        // Elimination without the transform bookkeeping.
        let f = self.field;
        let mut a = self.clone();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| a.get(i, c) != 0) else {
                continue;
            };
            a.swap_rows(r, p);
            let inv = f.inv(a.get(r, c)).expect("pivot is nonzero");
            a.scale_row(r, inv);
            for i in r + 1..self.rows {
                let factor = a.get(i, c);
                if factor != 0 {
                    a.add_scaled_row(i, r, f.neg(factor));
                }
            }
            r += 1;
        }
        r
    }

    /// Basis (as rows) of `{x : self * x^T = 0}`.
    ///
    /// One basis vector per free column of the rref: that coordinate is 1,
    /// the other free coordinates are 0.
    pub fn null_space(&self) -> Matrix {
        let f = self.field;
        let RrefResult { rref, rank, pivot_cols, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = Matrix::zeros(f, free.len(), self.cols);
        for (b, &fc) in free.iter().enumerate() {
            basis.set(b, fc, 1);
            for (i, &pc) in pivot_cols.iter().enumerate().take(rank) {
                basis.set(b, pc, f.neg(rref.get(i, fc)));
            }
        }
        basis
    }

    /// Finds `C` with `C * self = target`, or `None` if some target row is
    /// outside the row space of `self`.
    pub fn solve_in_rowspace(&self, target: &Matrix) -> Result<Option<Matrix>> {
        self.field.ensure_same(&target.field)?;
        if self.cols != target.cols {
            return Err(Error::Shape(format!(
                "target has {} columns, generator has {}",
                target.cols, self.cols
            )));
        }
        let f = self.field;
        let RrefResult { rref, rank, pivot_cols, transform } = self.rref();
        let mut coeffs = Matrix::zeros(f, target.rows, self.rows);
        for t in 0..target.rows {
            let mut residual = target.row(t).to_vec();
            let mut weights = vec![0u64; rank];
            for (i, &pc) in pivot_cols.iter().enumerate() {
                let w = residual[pc];
                if w == 0 {
                    continue;
                }
                weights[i] = w;
                for (slot, &x) in residual.iter_mut().zip(rref.row(i)) {
                    *slot = f.sub(*slot, f.mul(w, x));
                }
            }
            if residual.iter().any(|&x| x != 0) {
                return Ok(None);
            }
            for (i, &w) in weights.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for j in 0..self.rows {
                    let v = f.add(coeffs.get(t, j), f.mul(w, transform.get(i, j)));
                    coeffs.set(t, j, v);
                }
            }
        }
        Ok(Some(coeffs))
    }

    /// True iff the row spaces of `self` and `other` coincide.
    pub fn same_rowspace(&self, other: &Matrix) -> Result<bool> {
        let r = self.rank();
        if r != other.rank() {
            return Ok(false);
        }
        Ok(self.vstack(other)?.rank() == r)
    }

    pub fn invert(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!(
                "cannot invert a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let res = self.rref();
        if res.rank < self.rows {
            return Err(Error::Singular);
        }
        Ok(res.transform)
    }

    /// Every `rows x rows` column-submatrix is invertible.
    pub fn is_mds(&self) -> Result<bool> {
        self.is_mds_with_cap(DEFAULT_MDS_CAP)
    }

    pub fn is_mds_with_cap(&self, cap: u128) -> Result<bool> {
        if self.rows > self.cols {
            return Err(Error::Shape(format!(
                "MDS test needs rows <= cols, got {}x{}",
                self.rows, self.cols
            )));
        }
        let count = binomial(self.cols as u64, self.rows as u64);
        if count > cap {
            return Err(Error::EnumerationCap { count, cap });
        }
        if self.rows == 0 {
            return Ok(true);
        }
        // A zero column can never sit in an invertible submatrix.
        if (0..self.cols).any(|c| (0..self.rows).all(|r| self.get(r, c) == 0)) {
            return Ok(false);
        }
        for subset in (0..self.cols).combinations(self.rows) {
            if self.select_columns(&subset)?.rank() < self.rows {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let q = field.modulus();
        let data = (0..rows * cols).map(|_| rng.random_range(0..q)).collect();
        Matrix { field, rows, cols, data }
    }

    /// Uniform over invertible `n x n` matrices (rejection sampling).
    pub fn random_invertible<R: Rng + ?Sized>(field: PrimeField, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: u64) {
        let f = self.field;
        for x in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *x = f.mul(*x, s);
        }
    }

    /// `row[dst] += s * row[src]`
    fn add_scaled_row(&mut self, dst: usize, src: usize, s: u64) {
        let f = self.field;
        for c in 0..self.cols {
            let v = f.mul(self.data[src * self.cols + c], s);
            let d = &mut self.data[dst * self.cols + c];
            *d = f.add(*d, v);
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{}>{:?}", self.field, self.to_rows())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line = self.row(r).iter().map(|x| x.to_string()).join(" ");
            writeln!(f, "[{line}]")?;
        }
        Ok(())
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}
