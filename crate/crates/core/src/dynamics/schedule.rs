use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::device::DenseOperator;
use crate::error::{domain, Result};
use crate::pauli::{PauliString, PauliSum};

/// How a coefficient `c` in GHz turns into a phase over `Δt` ns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseConvention {
    /// Linear frequency: phase `2π·c·Δt`.
    Cyclic,
    /// Angular frequency: phase `c·Δt`, GHz read as rad/ns.
    Angular,
}

impl PhaseConvention {
    pub fn factor(&self) -> f64 {
        match self {
            Self::Cyclic => 2.0 * PI,
            Self::Angular => 1.0,
        }
    }
}

pub type CoefficientFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;
pub type DenseFn = Arc<dyn Fn(f64) -> DenseOperator<f64> + Send + Sync>;

/// Time-dependent Hamiltonian over a fixed Pauli skeleton.
#[derive(Clone)]
pub struct PulseSchedule {
    num_qubits: usize,
    skeleton: Vec<PauliString>,
    coefficient_fn: CoefficientFn,
    total_time: f64,
    dense_fn: Option<DenseFn>,
    convention: PhaseConvention,
    breakpoints: Vec<f64>,
    piecewise_constant: bool,
}

impl fmt::Debug for PulseSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PulseSchedule")
            .field("num_qubits", &self.num_qubits)
            .field("terms", &self.skeleton.len())
            .field("total_time", &self.total_time)
            .field("convention", &self.convention)
            .field("piecewise_constant", &self.piecewise_constant)
            .finish()
    }
}

impl PulseSchedule {
    pub fn new(
        num_qubits: usize,
        skeleton: Vec<PauliString>,
        coefficient_fn: CoefficientFn,
        total_time: f64,
    ) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return domain(format!("total time must be positive, got {total_time}"));
        }
        if let Some(p) = skeleton.iter().find(|p| p.num_qubits() != num_qubits) {
            return domain(format!("skeleton term {p} does not have {num_qubits} qubits"));
        }
        Ok(Self {
            num_qubits,
            skeleton,
            coefficient_fn,
            total_time,
            dense_fn: None,
            convention: PhaseConvention::Cyclic,
            breakpoints: Vec::new(),
            piecewise_constant: false,
        })
    }

    /// Time-independent schedule of a Hermitian sum.
    pub fn constant(h: &PauliSum<f64>, total_time: f64) -> Result<Self> {
        Self::piecewise(h.num_qubits(), &[(total_time, h.clone())])
    }

    /// Consecutive constant segments `(duration, H)`.
    pub fn piecewise(num_qubits: usize, segments: &[(f64, PauliSum<f64>)]) -> Result<Self> {
        if segments.is_empty() {
            return domain("at least one segment required");
        }
        let mut strings = BTreeSet::new();
        for (dur, h) in segments {
            if !(*dur > 0.0) {
                return domain(format!("segment duration must be positive, got {dur}"));
            }
            if h.num_qubits() != num_qubits {
                return domain("segment width mismatch");
            }
            for (_, p) in h.real_terms(1e-12)? {
                strings.insert(p);
            }
        }
        let skeleton: Vec<PauliString> = strings.into_iter().collect();
        let mut ends = Vec::with_capacity(segments.len());
        let mut table = Vec::with_capacity(segments.len());
        let mut t = 0.0;
        for (dur, h) in segments {
            t += dur;
            ends.push(t);
            table.push(skeleton.iter().map(|p| h.coefficient(p).re).collect::<Vec<f64>>());
        }
        let total = t;
        let ends_c = ends.clone();
        let f: CoefficientFn = Arc::new(move |time: f64| {
            let i = ends_c.iter().position(|&e| time < e).unwrap_or(ends_c.len() - 1);
            table[i].clone()
        });
        let mut s = Self::new(num_qubits, skeleton, f, total)?;
        s.breakpoints = ends[..ends.len() - 1].to_vec();
        s.piecewise_constant = true;
        Ok(s)
    }

    pub fn with_dense_fn(mut self, f: DenseFn) -> Self {
        self.dense_fn = Some(f);
        self
    }

    pub fn with_convention(mut self, c: PhaseConvention) -> Self {
        self.convention = c;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn skeleton(&self) -> &[PauliString] {
        &self.skeleton
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.piecewise_constant
    }

    pub fn has_dense_fn(&self) -> bool {
        self.dense_fn.is_some()
    }

    /// `[0, b₁, …, T]`.
    pub fn segment_edges(&self) -> Vec<f64> {
        let mut e = vec![0.0];
        e.extend(self.breakpoints.iter().copied());
        e.push(self.total_time);
        e
    }

    /// Coefficients at `t`, aligned with the skeleton.
    pub fn coefficients(&self, t: f64) -> Result<Vec<f64>> {
        if !(0.0..=self.total_time).contains(&t) {
            return domain(format!("time {t} outside [0, {}]", self.total_time));
        }
        let c = (self.coefficient_fn)(t);
        if c.len() != self.skeleton.len() {
            return domain(format!("coefficient function returned {} values for {} terms", c.len(), self.skeleton.len()));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return domain(format!("non-finite coefficient at t = {t}"));
        }
        Ok(c)
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<PauliSum<f64>> {
        let c = self.coefficients(t)?;
        let mut h = PauliSum::zero(self.num_qubits);
        for (p, v) in self.skeleton.iter().zip(c) {
            h.add_term(Complex::new(v, 0.0), *p);
        }
        Ok(h)
    }

    /// Dense qubit-space operator at `t`: the independent dense function when
    /// present, otherwise the skeleton densified.
    pub fn dense_at(&self, t: f64) -> Result<DenseOperator<f64>> {
        if !(0.0..=self.total_time).contains(&t) {
            return domain(format!("time {t} outside [0, {}]", self.total_time));
        }
        match &self.dense_fn {
            Some(f) => {
                let h = f(t);
                if h.dim() != 1usize << self.num_qubits {
                    return domain("dense function dimension does not match the register");
                }
                Ok(h)
            }
            None => self.hamiltonian_at(t)?.matrix_of(),
        }
    }
}
