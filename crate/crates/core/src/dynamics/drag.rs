use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::schedule::{CoefficientFn, DenseFn, PhaseConvention, PulseSchedule};
use crate::device::{build_single_hamiltonian, exact_spectrum, DenseOperator, TransmonSpec};
use crate::error::{domain, Result};
use crate::pauli::{encode_operator, register_codes, EncodingScheme, PauliString, PauliSum};
use crate::sim::StateVector;

/// Resonant truncated-Gaussian drive in the transmon eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DragSpec {
    /// ns
    pub gate_time: f64,
    /// ns
    pub envelope_sigma: f64,
    pub truncation: usize,
    /// `Δ_j = E_j − E_0 − j(E_1 − E_0)` for `j = 0..d`, GHz.
    pub anharmonicities: Vec<f64>,
    /// `λ_0..λ_{d−2}`; the `j−1 ↔ j` transition is scaled by `λ_{j−1}`.
    pub couplings: Vec<f64>,
    /// GHz
    pub detuning: f64,
    /// `Ω_y(t) = quadrature_scale · dΩ_x/dt`.
    pub quadrature_scale: f64,
    pub initial_phase: f64,
}

/// `[1, √1, √2, …]`, `d − 1` entries.
pub fn default_couplings(d: usize) -> Vec<f64> {
    (0..d.saturating_sub(1)).map(|j| if j == 0 { 1.0 } else { (j as f64).sqrt() }).collect()
}

/// Anharmonicities of the lowest `d` levels of an isolated transmon in a
/// `d`-state charge basis.
pub fn transmon_anharmonicities(t: &TransmonSpec, d: usize) -> Result<Vec<f64>> {
    let s = exact_spectrum(&build_single_hamiltonian::<f64>(t, d)?, d)?;
    let e = &s.eigenvalues;
    let w = e[1] - e[0];
    Ok((0..d).map(|j| if j < 2 { 0.0 } else { e[j] - e[0] - j as f64 * w }).collect())
}

impl DragSpec {
    /// σ = t_g / 6, λ_j = √j, no detuning or quadrature.
    pub fn new(gate_time: f64, anharmonicities: Vec<f64>) -> Self {
        let d = anharmonicities.len();
        Self {
            gate_time,
            envelope_sigma: gate_time / 6.0,
            truncation: d,
            anharmonicities,
            couplings: default_couplings(d),
            detuning: 0.0,
            quadrature_scale: 0.0,
            initial_phase: 0.0,
        }
    }

    pub fn from_transmon(t: &TransmonSpec, d: usize, gate_time: f64) -> Result<Self> {
        Ok(Self::new(gate_time, transmon_anharmonicities(t, d)?))
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.truncation;
        if d < 2 {
            return domain("DRAG needs at least two levels");
        }
        if !(self.gate_time > 0.0) || !(self.envelope_sigma > 0.0) {
            return domain("gate time and sigma must be positive");
        }
        if self.anharmonicities.len() != d {
            return domain(format!("expected {d} anharmonicities, got {}", self.anharmonicities.len()));
        }
        if self.anharmonicities[..2].iter().any(|v| v.abs() > 1e-12) {
            return domain("Δ_0 and Δ_1 must vanish");
        }
        if self.couplings.len() != d - 1 {
            return domain(format!("expected {} couplings, got {}", d - 1, self.couplings.len()));
        }
        if self.anharmonicities.iter().chain(&self.couplings).any(|v| !v.is_finite()) {
            return domain("non-finite DRAG parameter");
        }
        Ok(())
    }
}

fn envelope_parts(t: f64, spec: &DragSpec) -> Result<(f64, f64, f64)> {
    let (tg, s) = (spec.gate_time, spec.envelope_sigma);
    if !(0.0..=tg).contains(&t) {
        return domain(format!("time {t} outside the pulse window [0, {tg}]"));
    }
    if !(s > 0.0) {
        return domain("sigma must be positive");
    }
    let edge = (-tg * tg / (8.0 * s * s)).exp();
    let norm = (2.0 * PI * s * s).sqrt() * libm::erf(tg / (8f64.sqrt() * s)) - tg * edge;
    let g = (-(t - tg / 2.0).powi(2) / (2.0 * s * s)).exp();
    Ok((g, edge, norm))
}

/// `Ω_x(t)`, area π over the window, zero at both ends.
pub fn drag_envelope(t: f64, spec: &DragSpec) -> Result<f64> {
    let (g, edge, norm) = envelope_parts(t, spec)?;
    if t == 0.0 || t == spec.gate_time {
        return Ok(0.0);
    }
    Ok(PI * (g - edge) / norm)
}

pub fn drag_envelope_derivative(t: f64, spec: &DragSpec) -> Result<f64> {
    let (g, _, norm) = envelope_parts(t, spec)?;
    let s2 = spec.envelope_sigma.powi(2);
    Ok(-PI * g * (t - spec.gate_time / 2.0) / s2 / norm)
}

/// Drift, `Σ λ P̂ˣ/2` and `Σ λ P̂ʸ/2` in the level basis.
fn level_operators(spec: &DragSpec) -> (DenseOperator<f64>, DenseOperator<f64>, DenseOperator<f64>) {
    let d = spec.truncation;
    let diag: Vec<f64> = (0..d).map(|j| j as f64 * spec.detuning + spec.anharmonicities[j]).collect();
    let mut x = DMatrix::zeros(d, d);
    let mut y = DMatrix::zeros(d, d);
    for j in 1..d {
        let l = 0.5 * spec.couplings[j - 1];
        x[(j - 1, j)] = Complex::new(l, 0.0);
        x[(j, j - 1)] = Complex::new(l, 0.0);
        y[(j - 1, j)] = Complex::new(0.0, -l);
        y[(j, j - 1)] = Complex::new(0.0, l);
    }
    (
        DenseOperator::from_real_diagonal(&diag),
        DenseOperator::new(x).expect("square"),
        DenseOperator::new(y).expect("square"),
    )
}

fn drive_amplitudes(t: f64, spec: &DragSpec) -> Result<(f64, f64)> {
    let ox = drag_envelope(t, spec)?;
    let oy = if spec.quadrature_scale != 0.0 { spec.quadrature_scale * drag_envelope_derivative(t, spec)? } else { 0.0 };
    let (s, c) = spec.initial_phase.sin_cos();
    Ok((ox * c + oy * s, oy * c - ox * s))
}

/// Rotating-frame gate Hamiltonian over `[0, t_g]`, with the level basis
/// encoded by `scheme`. Energies are read in `convention` units; the drive
/// always integrates to a π rotation.
pub fn build_drag_schedule(spec: &DragSpec, scheme: EncodingScheme, convention: PhaseConvention) -> Result<PulseSchedule> {
    spec.validate()?;
    let d = spec.truncation;
    let k = scheme.num_qubits(d)?;
    let (h0, hx, hy) = level_operators(spec);
    let sums: Vec<PauliSum<f64>> =
        [&h0, &hx, &hy].iter().map(|op| encode_operator(op, d, scheme)).collect::<Result<_>>()?;
    let mut strings: Vec<PauliString> = Vec::new();
    for s in &sums {
        for (_, p) in s.real_terms(1e-12)? {
            strings.push(p);
        }
    }
    strings.sort();
    strings.dedup();
    let tables: Vec<Vec<f64>> = sums.iter().map(|s| strings.iter().map(|p| s.coefficient(p).re).collect()).collect();
    let drive_scale = 1.0 / convention.factor();

    let spec_c = spec.clone();
    let coeffs: CoefficientFn = Arc::new(move |t| {
        let (ox, oy) = drive_amplitudes(t, &spec_c).unwrap_or((f64::NAN, f64::NAN));
        (0..tables[0].len())
            .map(|i| tables[0][i] + drive_scale * (ox * tables[1][i] + oy * tables[2][i]))
            .collect()
    });
    let perm = register_codes(d, 1, scheme)?;
    let spec_d = spec.clone();
    let dense: DenseFn = Arc::new(move |t| {
        let (ox, oy) = drive_amplitudes(t, &spec_d).unwrap_or((f64::NAN, f64::NAN));
        h0.add(&hx.scale(drive_scale * ox)).add(&hy.scale(drive_scale * oy)).embedded(&perm, 1 << k)
    });
    Ok(PulseSchedule::new(k, strings, coeffs, spec.gate_time)?.with_dense_fn(dense).with_convention(convention))
}

/// DRAG bit flip on the `{|0⟩, |1⟩}` levels.
#[derive(Clone, Debug)]
pub struct BitflipGate {
    pub spec: DragSpec,
    pub scheme: EncodingScheme,
    pub schedule: PulseSchedule,
    /// Encoded levels 0 and 1.
    pub basis: Vec<StateVector<f64>>,
    /// Pauli X on the subspace.
    pub ideal: DMatrix<Complex<f64>>,
}

pub fn build_bitflip_gate(spec: &DragSpec, scheme: EncodingScheme, convention: PhaseConvention) -> Result<BitflipGate> {
    let schedule = build_drag_schedule(spec, scheme, convention)?;
    let perm = register_codes(spec.truncation, 1, scheme)?;
    let k = schedule.num_qubits();
    let basis = vec![StateVector::basis(k, perm[0]), StateVector::basis(k, perm[1])];
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let ideal = DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
    Ok(BitflipGate { spec: spec.clone(), scheme, schedule, basis, ideal })
}
