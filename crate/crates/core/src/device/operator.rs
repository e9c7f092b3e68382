use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Dense square complex matrix. Hamiltonians are stored as `H/h` in GHz.
#[derive(Clone, PartialEq)]
pub struct DenseOperator<T: Real = f64> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> fmt::Debug for DenseOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseOperator(dim={})", self.dim())
    }
}

impl<T: Real> DenseOperator<T> {
    pub fn new(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return domain(format!(
                "operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        Ok(Self { matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero())) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim) }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex::new(x, T::zero())));
        Self { matrix: DMatrix::from_diagonal(&v) }
    }

    pub fn from_real_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Self {
        Self { matrix: DMatrix::from_fn(dim, dim, |r, c| Complex::new(f(r, c), T::zero())) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix[(row, col)]
    }

    /// `self ⊗ other`, with `self` acting on the most significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.kronecker(&other.matrix) }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "operator dimension mismatch");
        Self { matrix: &self.matrix + &other.matrix }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "operator dimension mismatch");
        Self { matrix: &self.matrix - &other.matrix }
    }

    pub fn scale(&self, s: T) -> Self {
        let s = Complex::new(s, T::zero());
        Self { matrix: self.matrix.map(|z| z * s) }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "operator dimension mismatch");
        Self { matrix: &self.matrix * &other.matrix }
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.transpose().map(|z| z.conj()) }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `‖H − H†‖_F / ‖H‖_F` (zero for the zero matrix).
    pub fn hermiticity_error(&self) -> T {
        let norm = self.frobenius_norm();
        if norm == T::zero() {
            return T::zero();
        }
        self.sub(&self.adjoint()).frobenius_norm() / norm
    }

    /// `‖A − B‖_F / max(‖A‖_F, ‖B‖_F)`.
    pub fn relative_distance(&self, other: &Self) -> T {
        let scale = self.frobenius_norm().max(other.frobenius_norm());
        if scale == T::zero() {
            return T::zero();
        }
        self.sub(other).frobenius_norm() / scale
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == T::zero())
    }

    /// Relabels basis states: entry `(i, j)` moves to `(perm[i], perm[j])`
    /// inside a `target_dim`-dimensional operator padded with zeros.
    pub fn embedded(&self, perm: &[usize], target_dim: usize) -> Self {
        assert_eq!(perm.len(), self.dim(), "permutation length must match dimension");
        let mut out = Self::zeros(target_dim);
        for (i, &pi) in perm.iter().enumerate() {
            for (j, &pj) in perm.iter().enumerate() {
                out.matrix[(pi, pj)] = self.matrix[(i, j)];
            }
        }
        out
    }

    /// Dense Hermitian eigen-decomposition, eigenvalues ascending.
    pub fn eigh(&self) -> (Vec<T>, DMatrix<Complex<T>>) {
        T::hermitian_eigen(&self.matrix)
    }
}

/// Kronecker product of a list of operators, first factor most significant.
pub fn kron_all<T: Real>(ops: &[&DenseOperator<T>]) -> DenseOperator<T> {
    let mut it = ops.iter();
    let first = (*it.next().expect("at least one factor")).clone();
    it.fold(first, |acc, op| acc.kron(op))
}

/// Operator `op` placed at `site` of an `m`-site register of identical local dimension.
pub fn lift_to_site<T: Real>(op: &DenseOperator<T>, site: usize, m: usize) -> DenseOperator<T> {
    let d = op.dim();
    let left = DenseOperator::<T>::identity(d.pow(site as u32));
    let right = DenseOperator::<T>::identity(d.pow((m - site - 1) as u32));
    left.kron(op).kron(&right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_ordering_first_factor_most_significant() {
        let a = DenseOperator::<f64>::from_real_diagonal(&[1.0, 2.0]);
        let b = DenseOperator::<f64>::from_real_diagonal(&[10.0, 20.0]);
        let k = a.kron(&b);
        let diag: Vec<f64> = (0..4).map(|i| k.get(i, i).re).collect();
        assert_eq!(diag, vec![10.0, 20.0, 20.0, 40.0]);
    }

    #[test]
    fn hermiticity_error_detects_asymmetry() {
        let h = DenseOperator::<f64>::from_real_fn(2, |r, c| if r < c { 1.0 } else { 0.0 });
        assert!(h.hermiticity_error() > 0.5);
        let s = DenseOperator::<f64>::from_real_fn(3, |r, c| (r + c) as f64);
        assert_eq!(s.hermiticity_error(), 0.0);
    }

    #[test]
    fn non_square_rejected() {
        let m = DMatrix::from_element(2, 3, Complex::new(0.0f64, 0.0));
        assert!(DenseOperator::new(m).is_err());
    }
}
