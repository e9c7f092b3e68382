use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;

use super::string::PauliString;
use crate::device::DenseOperator;
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Absolute threshold below which simplified coefficients are dropped.
pub const PRUNE_TOLERANCE: f64 = 1e-12;

/// Widest register [`PauliSum::matrix_of`] will densify.
pub const MAX_DENSE_QUBITS: usize = 12;

#[inline]
pub(crate) fn i_pow<T: Real>(k: u32) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match k & 3 {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm<T: Real = f64> {
    pub coefficient: Complex<T>,
    pub string: PauliString,
}

impl<T: Real> PauliTerm<T> {
    pub fn new(coefficient: Complex<T>, string: PauliString) -> Self {
        Self { coefficient, string }
    }

    pub fn real(coefficient: T, string: PauliString) -> Self {
        Self::new(Complex::new(coefficient, T::zero()), string)
    }

    pub fn axes(&self) -> String {
        self.string.axes()
    }
}

/// Weighted sum of Pauli strings kept in canonical (lexicographic) order
/// with at most one entry per string.
#[derive(Clone, PartialEq)]
pub struct PauliSum<T: Real = f64> {
    num_qubits: usize,
    terms: BTreeMap<PauliString, Complex<T>>,
}

impl<T: Real> fmt::Debug for PauliSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(p, c)| (p.axes(), c))).finish()
    }
}

impl<T: Real> PauliSum<T> {
    pub fn zero(num_qubits: usize) -> Self {
        Self { num_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(num_qubits: usize, coefficient: T) -> Self {
        let mut s = Self::zero(num_qubits);
        s.add_term(Complex::new(coefficient, T::zero()), PauliString::identity(num_qubits));
        s
    }

    /// Builds a sum from `(coefficient, axes)` pairs; all axes must share one width.
    pub fn from_real_terms(pairs: &[(T, &str)]) -> Result<Self> {
        let mut out: Option<Self> = None;
        for &(c, axes) in pairs {
            let p = PauliString::from_axes(axes)?;
            let s = out.get_or_insert_with(|| Self::zero(p.num_qubits()));
            if p.num_qubits() != s.num_qubits {
                return domain(format!("term \"{axes}\" has width {}, expected {}", p.num_qubits(), s.num_qubits));
            }
            s.add_term(Complex::new(c, T::zero()), p);
        }
        out.ok_or_else(|| Error::Domain("at least one term required to infer the width".into()))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Accumulates `c·P` without pruning.
    pub fn add_term(&mut self, c: Complex<T>, p: PauliString) {
        assert_eq!(p.num_qubits(), self.num_qubits, "Pauli width mismatch");
        *self.terms.entry(p).or_insert(Complex::new(T::zero(), T::zero())) += c;
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex<T> {
        self.terms.get(p).copied().unwrap_or(Complex::new(T::zero(), T::zero()))
    }

    pub fn coefficient_of(&self, axes: &str) -> Result<Complex<T>> {
        Ok(self.coefficient(&PauliString::from_axes(axes)?))
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliTerm<T>> + '_ {
        self.terms.iter().map(|(p, c)| PauliTerm::new(*c, *p))
    }

    /// Drops coefficients with modulus below `tol` and flushes tiny real or
    /// imaginary parts to zero.
    pub fn pruned(mut self, tol: T) -> Self {
        self.terms.retain(|_, c| c.norm() >= tol);
        for c in self.terms.values_mut() {
            if c.re.abs() < tol {
                c.re = T::zero();
            }
            if c.im.abs() < tol {
                c.im = T::zero();
            }
        }
        self
    }

    /// Pruned at the default `1e-12` threshold.
    pub fn simplified(self) -> Self {
        self.pruned(T::from_f64(PRUNE_TOLERANCE))
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return domain(format!(
                "register width mismatch: {} vs {} qubits",
                self.num_qubits, other.num_qubits
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*c, *p);
        }
        Ok(out.simplified())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        self.scale_complex(Complex::new(s, T::zero()))
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        let terms = self.terms.iter().map(|(p, c)| (*p, *c * s)).collect();
        Self { num_qubits: self.num_qubits, terms }.simplified()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        let mut out = Self::zero(self.num_qubits);
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                let (k, p) = pa.multiply(pb)?;
                out.add_term(*ca * *cb * i_pow::<T>(k), p);
            }
        }
        Ok(out.simplified())
    }

    /// Hermitian sums carry real coefficients only.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Real coefficients in canonical order; errors if any imaginary part exceeds `tol`.
    pub fn real_terms(&self, tol: T) -> Result<Vec<(T, PauliString)>> {
        self.terms
            .iter()
            .map(|(p, c)| {
                if c.im.abs() > tol {
                    domain(format!("non-Hermitian term {} with coefficient {:e}{:+e}i", p, c.re, c.im))
                } else {
                    Ok((c.re, *p))
                }
            })
            .collect()
    }

    pub fn max_weight(&self) -> usize {
        self.terms.keys().map(|p| p.weight()).max().unwrap_or(0)
    }

    pub fn tensor_extend(&self, left: usize, right: usize) -> Result<Self> {
        let mut out = Self::zero(self.num_qubits + left + right);
        for (p, c) in &self.terms {
            out.add_term(*c, p.tensor_extend(left, right)?);
        }
        Ok(out)
    }

    pub fn map_coefficients(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let terms = self.terms.iter().map(|(p, c)| (*p, f(*c))).collect();
        Self { num_qubits: self.num_qubits, terms }
    }

    pub fn matrix_of(&self) -> Result<DenseOperator<T>> {
        if self.num_qubits > MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!(
                "matrix_of supports at most {MAX_DENSE_QUBITS} qubits, got {}",
                self.num_qubits
            )));
        }
        let dim = 1usize << self.num_qubits;
        let mut m = nalgebra::DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
        for (p, c) in &self.terms {
            let x = p.x_mask() as usize;
            for b in 0..dim {
                m[(b ^ x, b)] += *c * i_pow::<T>(p.phase_on(b as u64));
            }
        }
        DenseOperator::new(m)
    }
}

/// `Σ 2·(weight − 1)` over non-identity terms: a CNOT ladder per exponential.
pub fn naive_cnot_upper_bound<T: Real>(sum: &PauliSum<T>) -> usize {
    sum.terms().filter(|t| !t.string.is_identity()).map(|t| 2 * (t.string.weight() - 1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn x_times_y_is_i_z() {
        let x = PauliSum::<f64>::from_real_terms(&[(1.0, "X")]).unwrap();
        let y = PauliSum::<f64>::from_real_terms(&[(1.0, "Y")]).unwrap();
        let p = x.multiply(&y).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient_of("Z").unwrap(), c(0.0, 1.0));
    }

    #[test]
    fn z_squared_is_identity() {
        let z = PauliSum::<f64>::from_real_terms(&[(1.0, "ZI")]).unwrap();
        let p = z.multiply(&z).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient_of("II").unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn half_x_matrix() {
        let s = PauliSum::<f64>::from_real_terms(&[(0.5, "X")]).unwrap();
        let m = s.matrix_of().unwrap();
        assert_eq!(m.get(0, 1), c(0.5, 0.0));
        assert_eq!(m.get(1, 0), c(0.5, 0.0));
        assert_eq!(m.get(0, 0), c(0.0, 0.0));
    }

    #[test]
    fn empty_sum_is_zero_matrix() {
        let m = PauliSum::<f64>::zero(2).matrix_of().unwrap();
        assert_eq!(m.frobenius_norm(), 0.0);
        assert_eq!(m.dim(), 4);
    }

    #[test]
    fn y_matrix_convention() {
        let m = PauliSum::<f64>::from_real_terms(&[(1.0, "Y")]).unwrap().matrix_of().unwrap();
        assert_eq!(m.get(0, 1), c(0.0, -1.0));
        assert_eq!(m.get(1, 0), c(0.0, 1.0));
    }

    #[test]
    fn qubit_zero_is_least_significant() {
        // Z on qubit 0 flips sign on odd basis indices
        let m = PauliSum::<f64>::from_real_terms(&[(1.0, "ZI")]).unwrap().matrix_of().unwrap();
        let d: Vec<f64> = (0..4).map(|i| m.get(i, i).re).collect();
        assert_eq!(d, vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn width_mismatch_errors() {
        let a = PauliSum::<f64>::from_real_terms(&[(1.0, "X")]).unwrap();
        let b = PauliSum::<f64>::from_real_terms(&[(1.0, "XX")]).unwrap();
        assert!(a.add(&b).is_err());
        assert!(a.multiply(&b).is_err());
    }

    #[test]
    fn cnot_bound() {
        let s = PauliSum::<f64>::from_real_terms(&[(1.0, "ZZZ")]).unwrap();
        assert_eq!(naive_cnot_upper_bound(&s), 4);
        let w1 = PauliSum::<f64>::from_real_terms(&[(1.0, "XII"), (2.0, "IIZ"), (3.0, "III")]).unwrap();
        assert_eq!(naive_cnot_upper_bound(&w1), 0);
    }

    #[test]
    fn extend_matches_kron() {
        let s = PauliSum::<f64>::from_real_terms(&[(0.5, "X"), (0.25, "Z")]).unwrap();
        let e = s.tensor_extend(0, 3).unwrap();
        assert_eq!(e.coefficient_of("XIII").unwrap(), c(0.5, 0.0));
        // qubit 0 is the least significant factor, so the kron order is reversed
        let id8 = DenseOperator::<f64>::identity(8);
        let dense = id8.kron(&s.matrix_of().unwrap());
        assert!(e.matrix_of().unwrap().relative_distance(&dense) < 1e-15);
    }
}
