//! Scalar abstraction shared by the generic layers of the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};

/// Real floating-point type the linear algebra is generic over.
///
/// Implemented for `f32` and `f64`. Dense Hermitian diagonalization is a
/// trait method so generic code never has to name `nalgebra::RealField`,
/// whose method set collides with `num_traits::Float`.
pub trait Real:
    Float + FloatConst + NumAssign + Default + Sum + Send + Sync + Debug + Display + LowerExp + 'static
{
    fn from_f64(v: f64) -> Self;

    fn to_f64(self) -> f64;

    /// Machine-precision-aware tolerance: `max(tol, 64·ε)`.
    fn tol(tol: f64) -> Self {
        let eps = Self::epsilon().to_f64() * 64.0;
        Self::from_f64(tol.max(eps))
    }

    /// IEEE total order, as `f64::total_cmp`.
    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering;

    /// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
    fn hermitian_eigen(m: &DMatrix<Complex<Self>>) -> (Vec<Self>, DMatrix<Complex<Self>>);
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn from_f64(v: f64) -> Self {
                v as $t
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
                <$t>::total_cmp(self, other)
            }

            fn hermitian_eigen(m: &DMatrix<Complex<$t>>) -> (Vec<$t>, DMatrix<Complex<$t>>) {
                let n = m.nrows();
                let is_real = m.iter().all(|z| z.im == 0.0);
                let (values, vectors): (Vec<$t>, DMatrix<Complex<$t>>) = if is_real {
                    let re = m.map(|z| z.re);
                    let eig = nalgebra::SymmetricEigen::new(re);
                    (
                        eig.eigenvalues.iter().copied().collect(),
                        eig.eigenvectors.map(|x| Complex::new(x, 0.0)),
                    )
                } else {
                    let eig = nalgebra::SymmetricEigen::new(m.clone());
                    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
                };
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| <$t>::total_cmp(&values[a], &values[b]));
                let sorted_values = order.iter().map(|&i| values[i]).collect();
                let sorted_vectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
                (sorted_values, sorted_vectors)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_ascending() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex::new(3.0f64, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(2.0, 0.0),
        ]));
        let (vals, vecs) = f64::hermitian_eigen(&m);
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        assert!((vecs[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_path() {
        // sigma_y has eigenvalues -1, +1
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(0.0f32, 0.0),
                Complex::new(0.0, -1.0),
                Complex::new(0.0, 1.0),
                Complex::new(0.0, 0.0),
            ],
        );
        let (vals, _) = f32::hermitian_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-6 && (vals[1] - 1.0).abs() < 1e-6);
    }
}
