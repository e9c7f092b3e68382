use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// Widest register a [`PauliString`] can address.
pub const MAX_QUBITS: usize = 64;

/// Tensor product of `I`, `X`, `Y`, `Z` stored as bit masks.
///
/// Bit `q` of `x` / `z` is the X / Z component on qubit `q`; `Y` sets both
/// (`Y = i·X·Z`). The text form lists qubit 0 first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PauliString {
    num_qubits: usize,
    x: u64,
    z: u64,
}

fn width_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        assert!(num_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { num_qubits, x: 0, z: 0 }
    }

    pub fn from_masks(num_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!("{num_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let m = width_mask(num_qubits);
        if x & !m != 0 || z & !m != 0 {
            return domain(format!("masks address qubits beyond width {num_qubits}"));
        }
        Ok(Self { num_qubits, x, z })
    }

    /// Single-qubit Pauli `axis` on `qubit`.
    pub fn single(num_qubits: usize, qubit: usize, axis: char) -> Result<Self> {
        if qubit >= num_qubits {
            return domain(format!("qubit {qubit} out of range for width {num_qubits}"));
        }
        let b = 1u64 << qubit;
        let (x, z) = match axis {
            'I' => (0, 0),
            'X' => (b, 0),
            'Y' => (b, b),
            'Z' => (0, b),
            other => return domain(format!("unknown Pauli axis '{other}'")),
        };
        Self::from_masks(num_qubits, x, z)
    }

    pub fn from_axes(axes: &str) -> Result<Self> {
        let n = axes.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in axes.chars().enumerate() {
            let b = 1u64 << q;
            match c {
                'I' => {}
                'X' => x |= b,
                'Y' => {
                    x |= b;
                    z |= b;
                }
                'Z' => z |= b,
                other => return domain(format!("unknown Pauli axis '{other}' in \"{axes}\"")),
            }
        }
        Ok(Self { num_qubits: n, x, z })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn axis(&self, qubit: usize) -> char {
        let b = 1u64 << qubit;
        match (self.x & b != 0, self.z & b != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn axes(&self) -> String {
        (0..self.num_qubits).map(|q| self.axis(q)).collect()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `P|b⟩ = i^k |b ⊕ x⟩`; returns `k mod 4`.
    #[inline]
    pub fn phase_on(&self, basis: u64) -> u32 {
        (self.y_count() + 2 * (self.z & basis).count_ones()) & 3
    }

    /// `self · other = i^k · P`; returns `(k mod 4, P)`.
    pub fn multiply(&self, other: &Self) -> Result<(u32, Self)> {
        if self.num_qubits != other.num_qubits {
            return domain(format!(
                "width mismatch: {} vs {} qubits",
                self.num_qubits, other.num_qubits
            ));
        }
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y3 = (x & z).count_ones();
        let k = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones() + 4 - (y3 & 3);
        Ok((k & 3, Self { num_qubits: self.num_qubits, x, z }))
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Pads with `left` identities on the low-index side and `right` on the high side.
    pub fn tensor_extend(&self, left: usize, right: usize) -> Result<Self> {
        Self::from_masks(self.num_qubits + left + right, self.x << left, self.z << left)
    }

    fn code(&self, q: usize) -> u8 {
        match self.axis(q) {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            _ => 3,
        }
    }
}

/// Lexicographic order of the axes text with `I < X < Y < Z`.
impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.num_qubits.min(other.num_qubits);
        for q in 0..n {
            match self.code(q).cmp(&other.code(q)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.num_qubits.cmp(&other.num_qubits)
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.axes())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_axes(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_round_trip() {
        for s in ["", "I", "XYZI", "ZZZZZZZZ", "IXIY"] {
            assert_eq!(PauliString::from_axes(s).unwrap().axes(), s);
        }
        assert!(PauliString::from_axes("XQ").is_err());
    }

    #[test]
    fn single_qubit_products() {
        let x = PauliString::from_axes("X").unwrap();
        let y = PauliString::from_axes("Y").unwrap();
        let z = PauliString::from_axes("Z").unwrap();
        assert_eq!(x.multiply(&y).unwrap(), (1, z));
        assert_eq!(y.multiply(&x).unwrap(), (3, z));
        assert_eq!(y.multiply(&z).unwrap(), (1, x));
        assert_eq!(z.multiply(&x).unwrap(), (1, y));
        assert_eq!(z.multiply(&z).unwrap(), (0, PauliString::identity(1)));
        assert_eq!(y.multiply(&y).unwrap(), (0, PauliString::identity(1)));
    }

    #[test]
    fn canonical_order() {
        let mut v: Vec<PauliString> =
            ["ZI", "IX", "XI", "II", "YZ"].iter().map(|s| s.parse().unwrap()).collect();
        v.sort();
        let s: Vec<String> = v.iter().map(|p| p.axes()).collect();
        assert_eq!(s, ["II", "IX", "XI", "YZ", "ZI"]);
    }

    #[test]
    fn extend_shifts_masks() {
        let p = PauliString::from_axes("XZ").unwrap();
        assert_eq!(p.tensor_extend(1, 2).unwrap().axes(), "IXZII");
    }
}
