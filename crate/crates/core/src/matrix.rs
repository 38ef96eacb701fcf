//! Dense row-major matrices and vectors over either numeric backend.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rational_from_f64, Backend, Scalar};

/// Dense `rows x cols` matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Column vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T> {
    coords: Vec<T>,
}

impl<T: Scalar> Vector<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(i) = coords.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite { row: i + 1, col: 1 });
        }
        Ok(Vector { coords })
    }

    pub fn from_i64(values: &[i64]) -> Result<Self> {
        Vector::new(values.iter().map(|&v| T::from_int(v)).collect())
    }

    /// `i`-th standard basis vector (0-based `i`).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut coords = vec![T::zero(); dim];
        coords[i] = T::one();
        Vector { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Vector { coords: vec![T::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn get(&self, i: usize) -> &T {
        &self.coords[i]
    }

    pub fn norm_inf(&self) -> f64 {
        self.coords.iter().fold(0.0, |acc, v| acc.max(v.magnitude()))
    }

    pub fn dot(&self, other: &Vector<T>) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("dot of dims {} and {}", self.dim(), other.dim())));
        }
        Ok(self.coords.iter().zip(&other.coords).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    pub fn scaled(&self, factor: &T) -> Vector<T> {
        Vector { coords: self.coords.iter().map(|v| v.clone() * factor.clone()).collect() }
    }

    pub fn to_float(&self) -> Vector<f64> {
        Vector { coords: self.coords.iter().map(|v| v.as_f64()).collect() }
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::WrongLength { expected: rows * cols, actual: data.len() });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite { row: i / cols + 1, col: i % cols + 1 });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {}",
                bad + 1,
                rows[bad].len(),
                n_cols
            )));
        }
        Matrix::new(n_rows, n_cols, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Matrix::from_rows(rows.iter().map(|r| r.as_ref().iter().map(|&v| T::from_int(v)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        let mut m = Matrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = v.clone();
        }
        m
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn backend(&self) -> Backend {
        T::BACKEND
    }

    /// Side length of a square matrix, or `NotSquare`.
    pub fn order(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        Vector { coords: (0..self.rows).map(|i| self.get(i, j).clone()).collect() }
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols).map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<F: Fn(usize, usize, &T) -> T>(&self, f: F) -> Matrix<T> {
        let data = self.data.iter().enumerate().map(|(k, v)| f(k / self.cols, k % self.cols, v)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..other.cols {
                data.push(T::sum_products(row.iter().enumerate().map(|(k, a)| (a, &other.data[k * other.cols + j]))));
            }
        }
        Ok(Matrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn mul_vector(&self, x: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to vector of dim {}",
                self.rows,
                self.cols,
                x.dim()
            )));
        }
        let coords = (0..self.rows)
            .map(|i| self.row(i).iter().zip(x.coords()).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
            .collect();
        Ok(Vector { coords })
    }

    /// `A^k` by repeated squaring; `A^0 = I`.
    pub fn pow(&self, k: u32) -> Result<Matrix<T>> {
        let n = self.order()?;
        let mut result = Matrix::identity(n);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(result)
    }

    fn zip_with<F: Fn(&T, &T) -> T>(&self, other: &Matrix<T>, f: F) -> Result<Matrix<T>> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, factor: &T) -> Matrix<T> {
        self.map(|_, _, v| v.clone() * factor.clone())
    }

    /// `A + alpha I`.
    pub fn shift(&self, alpha: &T) -> Result<Matrix<T>> {
        self.order()?;
        Ok(self.map(|i, j, v| if i == j { v.clone() + alpha.clone() } else { v.clone() }))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.magnitude()))
    }

    /// Induced infinity norm (largest absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(Scalar::magnitude).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(num_traits::Zero::is_zero)
    }

    /// Submatrix on 0-based row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix<T> {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Minor on 0-based index lists of equal length.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> T {
        debug_assert_eq!(rows.len(), cols.len());
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        T::det_of(data, rows.len())
    }

    /// Determinant: partial-pivot LU for floats, fraction-free elimination
    /// for rationals.
    pub fn det(&self) -> Result<T> {
        let n = self.order()?;
        Ok(T::det_of(self.data.clone(), n))
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::factor(self)
    }

    pub fn lu_solve(&self, b: &Vector<T>) -> Result<Vector<T>> {
        self.lu()?.solve(b)
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        let lu = self.lu()?;
        let n = self.rows;
        let mut data = vec![T::zero(); n * n];
        for j in 0..n {
            let col = lu.solve(&Vector::basis(n, j))?;
            for (i, v) in col.into_coords().into_iter().enumerate() {
                data[i * n + j] = v;
            }
        }
        Ok(Matrix { rows: n, cols: n, data })
    }

    pub fn to_float(&self) -> Matrix<f64> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Scalar::as_f64).collect() }
    }
}

impl Matrix<f64> {
    /// Exact rational image of every float entry.
    pub fn to_exact(&self) -> Matrix<BigRational> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| rational_from_f64(v).expect("matrix entries are finite")).collect(),
        }
    }

    /// Entrywise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &Matrix<f64>, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// LU factorization `P A = L U` with unit lower `L`, stored compactly.
///
/// Float pivots are chosen by magnitude and rejected below
/// `1e-12 * max row norm`; exact pivots only need to be nonzero.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

pub const PIVOT_RELATIVE_THRESHOLD: f64 = 1e-12;

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        let n = a.order()?;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = match T::BACKEND {
            Backend::Float => PIVOT_RELATIVE_THRESHOLD * a.norm_inf(),
            Backend::Exact => 0.0,
        };
        for col in 0..n {
            let pivot = match T::BACKEND {
                Backend::Float => (col..n)
                    .max_by(|&r, &s| lu[r * n + col].magnitude().total_cmp(&lu[s * n + col].magnitude()))
                    .unwrap_or(col),
                Backend::Exact => (col..n).find(|&r| !lu[r * n + col].is_zero()).unwrap_or(col),
            };
            let p = &lu[pivot * n + col];
            if p.is_zero() || p.magnitude() <= threshold {
                return Err(Error::Singular { pivot: col + 1 });
            }
            if pivot != col {
                for k in 0..n {
                    lu.swap(pivot * n + k, col * n + k);
                }
                perm.swap(pivot, col);
            }
            let p = lu[col * n + col].clone();
            for row in col + 1..n {
                let factor = lu[row * n + col].clone() / p.clone();
                if factor.is_zero() {
                    lu[row * n + col] = factor;
                    continue;
                }
                for k in col + 1..n {
                    let v = lu[row * n + k].clone() - factor.clone() * lu[col * n + k].clone();
                    lu[row * n + k] = v;
                }
                lu[row * n + col] = factor;
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn solve(&self, b: &Vector<T>) -> Result<Vector<T>> {
        let n = self.n;
        if b.dim() != n {
            return Err(Error::DimensionMismatch(format!("right-hand side has dim {}, expected {n}", b.dim())));
        }
        let mut y: Vec<T> = self.perm.iter().map(|&p| b.coords()[p].clone()).collect();
        for i in 0..n {
            let mut acc = y[i].clone();
            for (l, yk) in self.lu[i * n..i * n + i].iter().zip(&y[..i]) {
                acc = acc - l.clone() * yk.clone();
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i].clone();
            for (u, yk) in self.lu[i * n + i + 1..(i + 1) * n].iter().zip(&y[i + 1..]) {
                acc = acc - u.clone() * yk.clone();
            }
            y[i] = acc / self.lu[i * n + i].clone();
        }
        Ok(Vector { coords: y })
    }
}

/// A matrix in either backend, chosen at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    Exact(Matrix<BigRational>),
    Float(Matrix<f64>),
}

impl From<Matrix<BigRational>> for AnyMatrix {
    fn from(m: Matrix<BigRational>) -> Self {
        AnyMatrix::Exact(m)
    }
}

impl From<Matrix<f64>> for AnyMatrix {
    fn from(m: Matrix<f64>) -> Self {
        AnyMatrix::Float(m)
    }
}

impl AnyMatrix {
    pub fn backend(&self) -> Backend {
        match self {
            AnyMatrix::Exact(_) => Backend::Exact,
            AnyMatrix::Float(_) => Backend::Float,
        }
    }

    pub fn order(&self) -> Result<usize> {
        match self {
            AnyMatrix::Exact(m) => m.order(),
            AnyMatrix::Float(m) => m.order(),
        }
    }

    pub fn to_float(&self) -> Matrix<f64> {
        match self {
            AnyMatrix::Exact(m) => m.to_float(),
            AnyMatrix::Float(m) => m.clone(),
        }
    }

    pub fn to_exact(&self) -> Matrix<BigRational> {
        match self {
            AnyMatrix::Exact(m) => m.clone(),
            AnyMatrix::Float(m) => m.to_exact(),
        }
    }

    pub fn matmul(&self, other: &AnyMatrix) -> Result<AnyMatrix> {
        match (self, other) {
            (AnyMatrix::Exact(a), AnyMatrix::Exact(b)) => a.matmul(b).map(AnyMatrix::Exact),
            (AnyMatrix::Float(a), AnyMatrix::Float(b)) => a.matmul(b).map(AnyMatrix::Float),
            _ => Err(Error::BackendMismatch { left: self.backend(), right: other.backend() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn example1() -> Matrix<Q> {
        Matrix::from_i64_rows(&[[10, 2, 2], [3, 2, 1], [7, 4, 6]]).unwrap()
    }

    fn example2() -> Matrix<Q> {
        Matrix::from_i64_rows(&[[8, 4, 1], [4, 10, 3], [-3, 5, 9]]).unwrap()
    }

    #[test]
    fn identity_is_left_neutral() {
        let a = example1();
        assert_eq!(Matrix::identity(3).matmul(&a).unwrap(), a);
    }

    #[test]
    fn square_matches_triple_loop() {
        // computed with a plain triple loop outside this crate
        let expected = Matrix::<Q>::from_i64_rows(&[[120, 32, 34], [43, 14, 14], [124, 46, 54]]).unwrap();
        let a = example1();
        assert_eq!(a.matmul(&a).unwrap(), expected);
    }

    #[test]
    fn one_by_one_product() {
        let a = Matrix::<f64>::from_i64_rows(&[[2]]).unwrap();
        let b = Matrix::<f64>::from_i64_rows(&[[3]]).unwrap();
        assert_eq!(a.matmul(&b).unwrap().get(0, 0), &6.0);
    }

    #[test]
    fn product_rejects_bad_shapes() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn backend_mismatch_is_an_error() {
        let a = AnyMatrix::Exact(example1());
        let b = AnyMatrix::Float(example1().to_float());
        assert_eq!(a.matmul(&b), Err(Error::BackendMismatch { left: Backend::Exact, right: Backend::Float }));
        assert!(a.matmul(&a).is_ok());
    }

    #[test]
    fn zeroth_power_is_identity() {
        assert_eq!(example1().pow(0).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn fifth_power_of_example2_is_positive() {
        let p5 = example2().pow(5).unwrap();
        assert!(p5.data().iter().all(|v| v > &q(0, 1)));
        let p4 = example2().pow(4).unwrap();
        assert!(p4.data().iter().any(|v| v <= &q(0, 1)));
    }

    #[test]
    fn swap_squares_to_identity() {
        let p = Matrix::<f64>::from_i64_rows(&[[0, 1], [1, 0]]).unwrap();
        assert_eq!(p.pow(2).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn pow_rejects_rectangular() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert_eq!(a.pow(2), Err(Error::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn solves() {
        let b = Vector::<f64>::from_i64(&[3, -4, 5]).unwrap();
        assert_eq!(Matrix::<f64>::identity(3).lu_solve(&b).unwrap(), b);

        let d = Matrix::<f64>::from_i64_rows(&[[2, 0], [0, 4]]).unwrap();
        let x = d.lu_solve(&Vector::from_i64(&[2, 8]).unwrap()).unwrap();
        assert_eq!(x.coords(), &[1.0, 2.0]);
    }

    #[test]
    fn singular_solve_reports_pivot() {
        let a = Matrix::<Q>::from_i64_rows(&[[1, 2], [2, 4]]).unwrap();
        let err = a.lu_solve(&Vector::from_i64(&[1, 1]).unwrap()).unwrap_err();
        assert_eq!(err, Error::Singular { pivot: 2 });

        let f = Matrix::<f64>::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-15]]).unwrap();
        assert_eq!(f.lu().unwrap_err(), Error::Singular { pivot: 2 });
    }

    #[test]
    fn example_determinants() {
        assert_eq!(example1().det().unwrap(), q(54, 1));
        assert_eq!(example2().det().unwrap(), q(470, 1));
        let rows = [
            ["5.6", "1.2", "0.7", "0.5"],
            ["6.6", "6.2", "4.1", "8.1"],
            ["4.4", "4.4", "3.5", "8"],
            ["1", "3.8", "3.4", "9"],
        ];
        let a = Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|s| crate::scalar::parse_decimal(s).unwrap()).collect()).collect(),
        )
        .unwrap();
        assert_eq!(a.det().unwrap(), q(33928, 10000));
        assert!((a.to_float().det().unwrap() - 3.3928).abs() < 1e-12);
    }

    #[test]
    fn rejects_nan_and_ragged() {
        assert_eq!(Matrix::new(1, 2, vec![1.0, f64::NAN]), Err(Error::NonFinite { row: 1, col: 2 }));
        assert!(matches!(Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]), Err(Error::DimensionMismatch(_))));
        assert_eq!(Matrix::<f64>::from_rows(vec![]), Err(Error::Empty));
    }

    #[test]
    fn exact_inverse() {
        let a = example2();
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn float_to_exact_is_lossless() {
        let f = Matrix::new(1, 3, vec![0.1, -2.5, 1e-300]).unwrap();
        assert_eq!(f.to_exact().to_float(), f);
    }
}
