use std::fmt;
use std::io::{self, Write};

use num_complex::Complex;

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Amplitudes over `2^k` basis states; bit `q` of the index is qubit `q`.
#[derive(Clone, PartialEq)]
pub struct StateVector<T: Real = f64> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> fmt::Debug for StateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector(k={})", self.num_qubits)
    }
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩`.
    pub fn zero_state(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits < usize::BITS as usize, "register too wide");
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index {index} out of range");
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Self { num_qubits, amps }
    }

    /// Wraps amplitudes that are already normalized (within tolerance).
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let s = Self::from_raw(amps)?;
        let n = s.norm_sqr();
        if (n - T::one()).abs() > T::tol(1e-10) {
            return domain(format!("state is not normalized (norm² = {n})"));
        }
        Ok(s)
    }

    /// Normalizes the given amplitudes.
    pub fn from_unnormalized(amps: Vec<Complex<T>>) -> Result<Self> {
        let mut s = Self::from_raw(amps)?;
        let n = s.norm_sqr();
        if !(n > T::zero()) {
            return domain("cannot normalize the zero vector");
        }
        s.scale(T::one() / n.sqrt());
        Ok(s)
    }

    fn from_raw(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return domain(format!("amplitude count {} is not a power of two", amps.len()));
        }
        Ok(Self { num_qubits: amps.len().trailing_zeros() as usize, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// Direct amplitude access; callers keep the state normalized.
    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > T::zero() {
            self.scale(T::one() / n);
        }
    }

    fn scale(&mut self, s: T) {
        for a in &mut self.amps {
            *a = *a * s;
        }
    }

    pub fn probability(&self, index: usize) -> T {
        self.amps[index].norm_sqr()
    }

    /// Writes `k` as a little-endian `u64`, then `re, im` pairs as little-endian `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&(self.num_qubits as u64).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_f64().to_le_bytes())?;
            w.write_all(&a.im.to_f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return domain("state dump shorter than its header");
        }
        let k = u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes")) as usize;
        if k >= 48 || bytes.len() != 8 + 16 * (1usize << k) {
            return domain(format!("state dump length {} does not match k = {k}", bytes.len()));
        }
        let f = |off: usize| T::from_f64(f64::from_le_bytes(bytes[off..off + 8].try_into().expect("8 bytes")));
        let amps = (0..1usize << k).map(|i| Complex::new(f(8 + 16 * i), f(16 + 16 * i))).collect();
        Self::from_raw(amps)
    }

    /// `index,re,im` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "index,re,im")?;
        for (i, a) in self.amps.iter().enumerate() {
            writeln!(w, "{i},{:.17e},{:.17e}", a.re.to_f64(), a.im.to_f64())?;
        }
        Ok(())
    }
}

/// `⟨a|b⟩`, conjugating `a`.
pub fn inner_product<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Complex<T>> {
    if a.num_qubits != b.num_qubits {
        return domain(format!("width mismatch: {} vs {} qubits", a.num_qubits, b.num_qubits));
    }
    Ok(dot(&a.amps, &b.amps))
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let (mut re, mut im) = (T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex::new(re, im)
}
