use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use super::string::PauliString;
use super::sum::{i_pow, PauliSum};
use crate::device::{self, ChainSpec, DenseOperator};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingScheme {
    StandardBinary,
    Gray,
    Unary,
}

impl EncodingScheme {
    pub const ALL: [EncodingScheme; 3] = [Self::StandardBinary, Self::Gray, Self::Unary];

    pub fn name(&self) -> &'static str {
        match self {
            Self::StandardBinary => "standard-binary",
            Self::Gray => "gray",
            Self::Unary => "unary",
        }
    }

    /// Qubits needed for one `d`-level register.
    pub fn num_qubits(&self, d: usize) -> Result<usize> {
        match self {
            Self::Unary => {
                if d == 0 {
                    return domain("truncation must be positive");
                }
                Ok(d)
            }
            _ => {
                if d < 2 || !d.is_power_of_two() {
                    return domain(format!("{} encoding needs d = 2^k with k >= 1, got {d}", self.name()));
                }
                Ok(d.trailing_zeros() as usize)
            }
        }
    }
}

impl fmt::Display for EncodingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncodingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard-binary" | "standard_binary" | "binary" => Ok(Self::StandardBinary),
            "gray" => Ok(Self::Gray),
            "unary" | "one-hot" => Ok(Self::Unary),
            other => domain(format!("unknown encoding scheme '{other}'")),
        }
    }
}

/// Bit pattern of one encoded level. Bit `q` lives on qubit `q`; `Display`
/// prints the most significant bit first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeWord {
    pub bits: u64,
    pub width: usize,
}

impl fmt::Display for CodeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.width).rev() {
            f.write_str(if self.bits >> q & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn gray_code(n: u64) -> u64 {
    n ^ (n >> 1)
}

pub fn code_word(level: usize, d: usize, scheme: EncodingScheme) -> Result<CodeWord> {
    let width = scheme.num_qubits(d)?;
    if level >= d {
        return domain(format!("level {level} out of range for d = {d}"));
    }
    let bits = match scheme {
        EncodingScheme::StandardBinary => level as u64,
        EncodingScheme::Gray => gray_code(level as u64),
        EncodingScheme::Unary => 1u64 << level,
    };
    Ok(CodeWord { bits, width })
}

/// `|row⟩⟨col|` expanded per bit with `|0⟩⟨0| = (I+Z)/2`, `|1⟩⟨1| = (I−Z)/2`,
/// `|0⟩⟨1| = (X+iY)/2`, `|1⟩⟨0| = (X−iY)/2`.
pub fn encode_ketbra<T: Real>(row: CodeWord, col: CodeWord) -> Result<PauliSum<T>> {
    if row.width != col.width {
        return domain(format!("code word widths differ: {} vs {}", row.width, col.width));
    }
    let n = row.width;
    let half = T::from_f64(0.5);
    let mut acc = PauliSum::<T>::identity(n, T::one());
    for q in 0..n {
        let (r, c) = (row.bits >> q & 1, col.bits >> q & 1);
        let pairs: [(Complex<T>, char); 2] = match (r, c) {
            (0, 0) => [(Complex::new(half, T::zero()), 'I'), (Complex::new(half, T::zero()), 'Z')],
            (1, 1) => [(Complex::new(half, T::zero()), 'I'), (Complex::new(-half, T::zero()), 'Z')],
            (0, 1) => [(Complex::new(half, T::zero()), 'X'), (Complex::new(T::zero(), half), 'Y')],
            _ => [(Complex::new(half, T::zero()), 'X'), (Complex::new(T::zero(), -half), 'Y')],
        };
        let mut factor = PauliSum::<T>::zero(n);
        for (coef, axis) in pairs {
            factor.add_term(coef, PauliString::single(n, q, axis)?);
        }
        acc = acc.multiply(&factor)?;
    }
    Ok(acc)
}

fn check_op<T: Real>(op: &DenseOperator<T>, dim: usize) -> Result<()> {
    if op.dim() != dim {
        return domain(format!("operator dimension {} does not match expected {dim}", op.dim()));
    }
    Ok(())
}

/// Encodes an operator on `m` registers of `d` levels each, register 0 being
/// the most significant Kronecker factor and occupying qubits `0..k`.
pub fn encode_register_operator<T: Real>(
    op: &DenseOperator<T>,
    d: usize,
    m: usize,
    scheme: EncodingScheme,
) -> Result<PauliSum<T>> {
    let k = scheme.num_qubits(d)?;
    let dim = d.checked_pow(m as u32).ok_or_else(|| Error::Capacity("register dimension overflow".into()))?;
    check_op(op, dim)?;
    let width = k * m;
    if width > super::string::MAX_QUBITS {
        return Err(Error::Capacity(format!("{width} qubits exceeds the Pauli string width limit")));
    }
    let words: Vec<u64> = (0..d).map(|l| code_word(l, d, scheme).map(|w| w.bits)).collect::<Result<_>>()?;
    let encode_index = |mut idx: usize| -> u64 {
        let mut bits = 0u64;
        for reg in (0..m).rev() {
            bits |= words[idx % d] << (reg * k);
            idx /= d;
        }
        bits
    };
    let codes: Vec<u64> = (0..dim).map(encode_index).collect();

    let tol = T::from_f64(super::sum::PRUNE_TOLERANCE);
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = PauliSum::<T>::zero(width);
    match scheme {
        EncodingScheme::Unary => {
            // Only one-hot to one-hot elements are physical. Diagonals become
            // (I − Z)/2 on one qubit, off-diagonals touch exactly two qubits.
            for r in 0..dim {
                for c in 0..dim {
                    let v = op.get(r, c);
                    if v.norm() < tol {
                        continue;
                    }
                    let (rb, cb) = (codes[r], codes[c]);
                    let mut term = PauliSum::<T>::identity(width, T::one());
                    for reg in 0..m {
                        let lane = ((1u64 << k) - 1) << (reg * k);
                        let (rq, cq) = ((rb & lane).trailing_zeros() as usize, (cb & lane).trailing_zeros() as usize);
                        let factor = if rq == cq {
                            PauliSum::from_pairs(width, &[(0.5, PauliString::identity(width)), (-0.5, PauliString::single(width, rq, 'Z')?)])
                        } else {
                            // |1⟩⟨0| on qubit rq times |0⟩⟨1| on qubit cq
                            let lower = PauliSum::from_complex_pairs(
                                width,
                                &[((0.5, 0.0), PauliString::single(width, rq, 'X')?), ((0.0, -0.5), PauliString::single(width, rq, 'Y')?)],
                            );
                            let raise = PauliSum::from_complex_pairs(
                                width,
                                &[((0.5, 0.0), PauliString::single(width, cq, 'X')?), ((0.0, 0.5), PauliString::single(width, cq, 'Y')?)],
                            );
                            lower.multiply(&raise)?
                        };
                        term = term.multiply(&factor)?;
                    }
                    for t in term.terms() {
                        out.add_term(t.coefficient * v, t.string);
                    }
                }
            }
        }
        _ => {
            // Hilbert-Schmidt projection c_P = tr(P M) / 2^n on the encoded matrix.
            let full = 1usize << width;
            let mut enc = vec![zero; full * full];
            for r in 0..dim {
                for c in 0..dim {
                    enc[codes[r] as usize * full + codes[c] as usize] = op.get(r, c);
                }
            }
            let norm = T::one() / T::from_f64(full as f64);
            for x in 0..full as u64 {
                for z in 0..full as u64 {
                    let p = PauliString::from_masks(width, x, z)?;
                    let mut acc = zero;
                    for b in 0..full {
                        let row = b ^ x as usize;
                        let v = enc[row * full + b];
                        if v != zero {
                            acc += v * i_pow::<T>(p.phase_on(row as u64));
                        }
                    }
                    if acc != zero {
                        out.add_term(acc * norm, p);
                    }
                }
            }
        }
    }
    Ok(out.simplified())
}

/// Encodes a single `d`-level operator.
pub fn encode_operator<T: Real>(op: &DenseOperator<T>, d: usize, scheme: EncodingScheme) -> Result<PauliSum<T>> {
    encode_register_operator(op, d, 1, scheme)
}

/// Restricts a qubit-space operator to the encoded levels of `m` registers,
/// returning a `d^m` operator in Kronecker order.
pub fn restrict_to_code_space<T: Real>(
    op: &DenseOperator<T>,
    d: usize,
    m: usize,
    scheme: EncodingScheme,
) -> Result<DenseOperator<T>> {
    let k = scheme.num_qubits(d)?;
    check_op(op, 1usize << (k * m))?;
    let dim = d.pow(m as u32);
    let codes = register_codes(d, m, scheme)?;
    let mat = nalgebra::DMatrix::from_fn(dim, dim, |r, c| op.get(codes[r], codes[c]));
    DenseOperator::new(mat)
}

/// Qubit basis index of every level tuple of `m` registers, in Kronecker order.
pub fn register_codes(d: usize, m: usize, scheme: EncodingScheme) -> Result<Vec<usize>> {
    let k = scheme.num_qubits(d)?;
    if k * m > 30 {
        return Err(Error::Capacity(format!("{} qubits is too wide for a dense embedding", k * m)));
    }
    let words: Vec<u64> = (0..d).map(|l| code_word(l, d, scheme).map(|w| w.bits)).collect::<Result<_>>()?;
    Ok((0..d.pow(m as u32))
        .map(|mut idx| {
            let mut bits = 0u64;
            for reg in (0..m).rev() {
                bits |= words[idx % d] << (reg * k);
                idx /= d;
            }
            bits as usize
        })
        .collect())
}

/// Encodes the chain Hamiltonian symbolically: charge terms as products of
/// encoded number operators, Josephson terms from the encoded cosine.
pub fn encode_chain_hamiltonian<T: Real>(spec: &ChainSpec, d: usize, scheme: EncodingScheme) -> Result<PauliSum<T>> {
    let m = spec.len();
    let k = scheme.num_qubits(d)?;
    let n_op = encode_operator(&device::number_operator::<T>(d)?, d, scheme)?;
    let cos_op = encode_operator(&device::cosine_phase_operator::<T>(d)?, d, scheme)?;
    let lift = |s: &PauliSum<T>, site: usize| s.tensor_extend(site * k, (m - site - 1) * k);
    let n_sites: Vec<PauliSum<T>> = (0..m).map(|i| lift(&n_op, i)).collect::<Result<_>>()?;
    let charge = spec.charge_coupling_ghz()?;
    let mut h = PauliSum::<T>::zero(m * k);
    for i in 0..m {
        for j in i..m {
            let factor = if i == j { charge[(i, i)] } else { 2.0 * charge[(i, j)] };
            if factor == 0.0 {
                continue;
            }
            h = h.add(&n_sites[i].multiply(&n_sites[j])?.scale(T::from_f64(factor)))?;
        }
    }
    for (i, t) in spec.transmons.iter().enumerate() {
        let ej = t.effective_josephson_ghz();
        if ej != 0.0 {
            h = h.sub(&lift(&cos_op, i)?.scale(T::from_f64(ej)))?;
        }
    }
    Ok(h)
}

/// Text listing: a `# d=… scheme=… qubits=…` header, then `{:+.12e} <axes>` per term.
pub fn format_listing<T: Real>(sum: &PauliSum<T>, d: usize, scheme: EncodingScheme) -> String {
    let mut s = format!("# d={d} scheme={scheme} qubits={}\n", sum.num_qubits());
    for t in sum.terms() {
        let c = t.coefficient.re.to_f64();
        let c = if c == 0.0 { 0.0 } else { c };
        s.push_str(&format!("{c:+.12e} {}\n", t.axes()));
    }
    s
}

impl<T: Real> PauliSum<T> {
    pub(crate) fn from_pairs(width: usize, pairs: &[(f64, PauliString)]) -> Self {
        let mut s = Self::zero(width);
        for (c, p) in pairs {
            s.add_term(Complex::new(T::from_f64(*c), T::zero()), *p);
        }
        s
    }

    pub(crate) fn from_complex_pairs(width: usize, pairs: &[((f64, f64), PauliString)]) -> Self {
        let mut s = Self::zero(width);
        for ((re, im), p) in pairs {
            s.add_term(Complex::new(T::from_f64(*re), T::from_f64(*im)), *p);
        }
        s
    }
}
