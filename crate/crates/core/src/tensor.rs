//! Complex linear algebra used by every other module: dense square matrices,
//! state vectors, CSR sparse matrices, Kronecker products, traces,
//! commutators and expectation values.
//!
//! Values are immutable once built; every operation returns a fresh value.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{check_dim, invalid, Error, Result};
use crate::{ALGEBRA_TOL, EXPECTATION_TOL};

pub use num_complex::Complex64 as C64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return invalid("matrix dimension must be at least 1");
        }
        check_dim(dim * dim, data.len())?;
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows; every row must have as many entries as there are rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return invalid("matrix needs at least one row");
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[C64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { ZERO })
    }

    /// Projector `|v><v|`.
    pub fn outer(v: &ComplexVector) -> Self {
        let e = v.entries();
        Self::from_fn(e.len(), |i, j| e[i] * e[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.dim)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (i..self.dim).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dim(self.dim, v.dim())?;
        let out = self
            .rows()
            .map(|row| row.iter().zip(v.entries()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(ComplexVector { data: out })
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eigen()?.0)
    }

    /// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending, with
    /// the matching normalized eigenvectors.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, Vec<ComplexVector>)> {
        if !self.is_hermitian(ALGEBRA_TOL.max(self.max_abs() * 1e-12)) {
            return invalid("eigen-decomposition requires a Hermitian matrix");
        }
        let eig = self.to_nalgebra().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = order
            .iter()
            .map(|&k| ComplexVector {
                data: eig.eigenvectors.column(k).iter().copied().collect(),
            })
            .collect();
        Ok((values, vectors))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        ComplexMatrix { dim: n, data }
    }
}

/// Kronecker product: `result[(i*db + k, j*db + l)] = a[i][j] * b[k][l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let db = b.dim;
    ComplexMatrix::from_fn(a.dim * db, |r, c| a.get(r / db, c / db) * b.get(r % db, c % db))
}

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim(a.dim, b.dim)?;
    Ok(&(a * b) - &(b * a))
}

/// `Tr(ab)` as `sum_jk a[j][k] b[k][j]`, without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    check_dim(a.dim, b.dim)?;
    let n = a.dim;
    let mut acc = ZERO;
    for j in 0..n {
        for k in 0..n {
            acc += a.data[j * n + k] * b.data[k * n + j];
        }
    }
    Ok(acc)
}

/// Complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if data.is_empty() {
            return invalid("vector dimension must be at least 1");
        }
        Ok(Self { data })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be at least 1");
        Self { data: vec![ZERO; dim] }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() < tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            data: self.data.iter().map(|z| z / norm).collect(),
        })
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let data = self
            .data
            .iter()
            .flat_map(|a| other.data.iter().map(move |b| a * b))
            .collect();
        Self { data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A state passed to [`expectation`]: a density matrix or a pure ket.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Mixed(&'a ComplexMatrix),
    Pure(&'a ComplexVector),
}

impl<'a> From<&'a ComplexMatrix> for StateRef<'a> {
    fn from(m: &'a ComplexMatrix) -> Self {
        StateRef::Mixed(m)
    }
}

impl<'a> From<&'a ComplexVector> for StateRef<'a> {
    fn from(v: &'a ComplexVector) -> Self {
        StateRef::Pure(v)
    }
}

/// `Tr(rho obs)` or `<psi|obs|psi>` for a Hermitian observable.
///
/// The imaginary part of the result is checked against [`EXPECTATION_TOL`]
/// and then discarded.
pub fn expectation<'a>(state: impl Into<StateRef<'a>>, obs: &ComplexMatrix) -> Result<f64> {
    if !obs.is_hermitian(ALGEBRA_TOL) {
        return invalid("observable is not Hermitian");
    }
    let value = match state.into() {
        StateRef::Mixed(rho) => {
            check_dim(obs.dim, rho.dim)?;
            if (rho.trace() - ONE).norm() > ALGEBRA_TOL {
                return invalid("density matrix does not have unit trace");
            }
            trace_product(rho, obs)?
        }
        StateRef::Pure(psi) => {
            check_dim(obs.dim, psi.dim())?;
            if !psi.is_normalized(ALGEBRA_TOL) {
                return invalid("state vector is not normalized");
            }
            psi.inner(&obs.apply(psi)?)?
        }
    };
    real_part(value, EXPECTATION_TOL)
}

pub(crate) fn real_part(value: C64, tol: f64) -> Result<f64> {
    if value.im.abs() >= tol {
        return Err(Error::Numerical(format!(
            "imaginary residue {:e} exceeds {tol:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Square sparse matrix in compressed-row form. Only nonzero entries are
/// stored and no (row, column) pair occurs twice.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![ONE; dim])
    }

    pub fn from_diagonal(values: &[C64]) -> Self {
        let dim = values.len();
        let entries = values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect::<Vec<_>>();
        Self::from_sorted_unique(dim, entries)
    }

    /// Builds a matrix from distinct (row, col, value) triplets. Duplicate
    /// positions and out-of-range indices are rejected; zero values are dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Result<Self> {
        if dim == 0 {
            return invalid("matrix dimension must be at least 1");
        }
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return invalid(format!("entry ({r}, {c}) outside a {dim}x{dim} matrix"));
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = triplets.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return invalid(format!("duplicate entry at ({}, {})", w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unique(dim, triplets))
    }

    /// Builds a matrix from triplets, summing values that share a position.
    pub fn from_summed_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside a {dim}x{dim} matrix");
            *acc.entry((r, c)).or_insert(ZERO) += v;
        }
        Self::from_sorted_unique(dim, acc.into_iter().map(|((r, c), v)| (r, c, v)).collect())
    }

    fn from_sorted_unique(dim: usize, entries: Vec<(usize, usize, C64)>) -> Self {
        let mut row_ptr = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if v == ZERO {
                continue;
            }
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, m.get(i, j)))
            .collect();
        Self::from_sorted_unique(n, entries)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut data = vec![ZERO; self.dim * self.dim];
        for (r, c, v) in self.triplets() {
            data[r * self.dim + c] = v;
        }
        ComplexMatrix { dim: self.dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_sorted_unique(self.dim, self.triplets().map(|(r, c, v)| (r, c, v * factor)).collect())
    }

    /// `sum_i c_i M_i` over matrices of one dimension.
    pub fn linear_combination<'a>(dim: usize, terms: impl IntoIterator<Item = (C64, &'a SparseMatrix)>) -> Self {
        Self::from_summed_triplets(
            dim,
            terms.into_iter().flat_map(|(coeff, m)| {
                assert_eq!(m.dim, dim, "dimension mismatch");
                m.triplets().map(move |(r, c, v)| (r, c, coeff * v))
            }),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::linear_combination(self.dim, [(ONE, self), (ONE, other)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::linear_combination(self.dim, [(ONE, self), (-ONE, other)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut entries = Vec::new();
        let mut row_acc: BTreeMap<usize, C64> = BTreeMap::new();
        for i in 0..self.dim {
            row_acc.clear();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    *row_acc.entry(j).or_insert(ZERO) += a * b;
                }
            }
            entries.extend(row_acc.iter().map(|(&j, &v)| (i, j, v)));
        }
        Self::from_sorted_unique(self.dim, entries)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(self.matmul(other).sub(&other.matmul(self)))
    }

    pub fn kron(&self, other: &Self) -> Self {
        let db = other.dim;
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.triplets() {
            for (k, l, b) in other.triplets() {
                entries.push((i * db + k, j * db + l, a * b));
            }
        }
        // row-major order of (i, k) blocks is not row-major overall
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Self::from_sorted_unique(self.dim * db, entries)
    }

    /// Kronecker product of several factors, left to right.
    pub fn kron_all(factors: &[&SparseMatrix]) -> Self {
        let (first, rest) = factors.split_first().expect("at least one factor");
        rest.iter().fold((*first).clone(), |acc, f| acc.kron(f))
    }

    /// `Tr(self other)`.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        check_dim(self.dim, other.dim)?;
        Ok(self.triplets().map(|(j, k, a)| a * other.get(k, j)).sum())
    }

    /// `Tr(rho self)` against a dense matrix.
    pub fn trace_with_dense(&self, rho: &ComplexMatrix) -> Result<C64> {
        check_dim(self.dim, rho.dim())?;
        Ok(self.triplets().map(|(j, k, a)| a * rho.get(k, j)).sum())
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dim(self.dim, v.dim())?;
        let x = v.entries();
        let data = (0..self.dim)
            .map(|i| self.row(i).map(|(j, a)| a * x[j]).sum())
            .collect();
        Ok(ComplexVector { data })
    }

    /// `<psi|self|psi>` without normalization checks.
    pub fn sandwich(&self, psi: &ComplexVector) -> Result<C64> {
        check_dim(self.dim, psi.dim())?;
        let x = psi.entries();
        Ok((0..self.dim)
            .filter(|&i| x[i] != ZERO)
            .map(|i| x[i].conj() * self.row(i).map(|(j, a)| a * x[j]).sum::<C64>())
            .sum())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.triplets()
            .all(|(i, j, v)| (v - self.get(j, i).conj()).norm() <= tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }
}
