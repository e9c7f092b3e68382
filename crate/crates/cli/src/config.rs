use std::path::{Path, PathBuf};

use qcad::device::{ChainSpec, ExtraCapacitance, TransmonSpec};
use qcad::dynamics::PhaseConvention;
use qcad::pauli::EncodingScheme;
use qcad::variational::{BetaPolicy, GradientMethod, OptimizerConfig, Strategy};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub device: DeviceConfig,
    pub sweep: SweepConfig,
    pub encode: EncodeConfig,
    pub variational: VariationalConfig,
    pub dynamics: DynamicsConfig,
    pub resources: ResourcesConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            device: DeviceConfig::default(),
            sweep: SweepConfig::default(),
            encode: EncodeConfig::default(),
            variational: VariationalConfig::default(),
            dynamics: DynamicsConfig::default(),
            resources: ResourcesConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonConfig {
    pub ej_ghz: f64,
    pub c_total_ff: f64,
    #[serde(default)]
    pub flux: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraCapacitanceConfig {
    pub i: usize,
    pub j: usize,
    pub c_ff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub transmons: Vec<TransmonConfig>,
    /// Nearest-neighbour coupling capacitances, one fewer than transmons.
    pub coupling_ff: Vec<f64>,
    pub extra_capacitance: Vec<ExtraCapacitanceConfig>,
    pub truncation_d: usize,
    pub encoding: EncodingScheme,
    /// Transmon whose flux is swept or tuned.
    pub tuned: usize,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            transmons: vec![TransmonConfig { ej_ghz: 20.0, c_total_ff: 91.0, flux: 0.0 }],
            coupling_ff: Vec::new(),
            extra_capacitance: Vec::new(),
            truncation_d: 16,
            encoding: EncodingScheme::Gray,
            tuned: 0,
        }
    }
}

impl DeviceConfig {
    pub fn chain(&self) -> Result<ChainSpec, ConfigError> {
        let transmons = self
            .transmons
            .iter()
            .enumerate()
            .map(|(i, t)| {
                TransmonSpec::new(t.ej_ghz, t.c_total_ff, t.flux)
                    .map_err(|e| ConfigError::invalid(format!("device.transmons[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut chain = ChainSpec::new(transmons, self.coupling_ff.clone())
            .map_err(|e| ConfigError::invalid("device.coupling_ff", e.to_string()))?;
        chain.extra_capacitances =
            self.extra_capacitance.iter().map(|x| ExtraCapacitance { i: x.i, j: x.j, capacitance: x.c_ff }).collect();
        chain.validate().map_err(|e| ConfigError::invalid("device.extra_capacitance", e.to_string()))?;
        Ok(chain)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub flux_start: f64,
    pub flux_stop: f64,
    pub points: usize,
    /// Levels written by `spectrum`.
    pub levels: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { flux_start: 0.0, flux_stop: 0.3, points: 7, levels: 4 }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.flux_start],
            n => (0..n).map(|i| self.flux_start + (self.flux_stop - self.flux_start) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodedOperator {
    Number,
    Cosine,
    Hamiltonian,
}

impl EncodedOperator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Number => "number",
            Self::Cosine => "cosine",
            Self::Hamiltonian => "hamiltonian",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncodeConfig {
    pub operators: Vec<EncodedOperator>,
    pub schemes: Vec<EncodingScheme>,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        Self { operators: vec![EncodedOperator::Number, EncodedOperator::Cosine], schemes: EncodingScheme::ALL.to_vec() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaChoice {
    /// `β = 2·(E_{k−1} − E_0)` from the exact spectrum.
    ExactGap,
    Adaptive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationalConfig {
    pub levels: usize,
    pub layers: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub parameter_tolerance: f64,
    pub strategy: Strategy,
    pub gradient: GradientMethod,
    pub init_scale: f64,
    pub seed: u64,
    pub beta: BetaChoice,
    pub adaptive_offset_ghz: f64,
    pub max_doublings: usize,
    /// Seed multi-transmon runs with products of single-transmon optima.
    pub seed_from_uncoupled: bool,
    /// Rayleigh-Ritz on the span of the variational states.
    pub subspace_refinement: bool,
    /// Write per-iteration objectives to `vqd_trace.log`.
    pub trace: bool,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        let o = OptimizerConfig::default();
        Self {
            levels: 4,
            layers: 2,
            restarts: 5,
            max_iterations: o.max_iterations,
            gradient_tolerance: o.gradient_tolerance,
            parameter_tolerance: o.parameter_tolerance,
            strategy: o.strategy,
            gradient: o.gradient,
            init_scale: o.init_scale,
            seed: 0,
            beta: BetaChoice::ExactGap,
            adaptive_offset_ghz: 1.0,
            max_doublings: 10,
            seed_from_uncoupled: true,
            subspace_refinement: true,
            trace: false,
        }
    }
}

impl VariationalConfig {
    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            max_iterations: self.max_iterations,
            gradient_tolerance: self.gradient_tolerance,
            parameter_tolerance: self.parameter_tolerance,
            strategy: self.strategy,
            restarts: self.restarts,
            seed: self.seed,
            init_scale: self.init_scale,
            gradient: self.gradient,
            ..OptimizerConfig::default()
        }
    }

    pub fn beta_policy(&self, exact: &[f64], levels: usize) -> qcad::Result<BetaPolicy> {
        match self.beta {
            BetaChoice::ExactGap => BetaPolicy::from_exact(exact, levels),
            BetaChoice::Adaptive => {
                Ok(BetaPolicy::Adaptive { initial_offset: self.adaptive_offset_ghz, max_doublings: self.max_doublings })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BitflipConfig {
    pub gate_time_ns: f64,
    /// Defaults to `gate_time_ns / 6`.
    pub sigma_ns: Option<f64>,
    pub detuning_ghz: f64,
    pub quadrature_scale_ns: f64,
    pub initial_phase: f64,
    pub k_list: Vec<usize>,
    pub samples: usize,
    pub ref_step_ns: f64,
}

impl Default for BitflipConfig {
    fn default() -> Self {
        Self {
            gate_time_ns: 85.32,
            sigma_ns: None,
            detuning_ghz: 0.0,
            quadrature_scale_ns: 0.0,
            initial_phase: 0.0,
            k_list: vec![125, 250, 500, 1000],
            samples: 300,
            ref_step_ns: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CphaseConfig {
    pub flux_range: [f64; 2],
    /// Skip the crossing search and start from this flux.
    pub interaction_flux: Option<f64>,
    pub hold_window: [f64; 2],
    pub scan_points: usize,
    pub return_threshold: f64,
    pub joint_refinement: bool,
    pub k_list: Vec<usize>,
    pub samples: usize,
    pub ref_step_ns: f64,
    /// Largest truncation whose Trotter scan runs without `--full`.
    pub quick_max_truncation: usize,
}

impl Default for CphaseConfig {
    fn default() -> Self {
        Self {
            flux_range: [0.0, 0.15],
            interaction_flux: None,
            hold_window: [0.5, 1.5],
            scan_points: 401,
            return_threshold: 0.995,
            joint_refinement: true,
            k_list: (1..=10).map(|i| 5000 * i).collect(),
            samples: 900,
            ref_step_ns: 1.0,
            quick_max_truncation: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    pub seed: u64,
    pub convention: PhaseConvention,
    pub bitflip: BitflipConfig,
    pub cphase: CphaseConfig,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            convention: PhaseConvention::Angular,
            bitflip: BitflipConfig::default(),
            cphase: CphaseConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourcesConfig {
    pub m_values: Vec<usize>,
}

impl Default for ResourcesConfig {
    fn default() -> Self {
        Self { m_values: vec![1, 2, 4, 8] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.resolved()
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e.to_string()))?;
        Self::from_toml(&text)
    }

    /// Fills derived defaults and validates every section.
    pub fn resolved(mut self) -> Result<Self, ConfigError> {
        let b = &mut self.dynamics.bitflip;
        if b.sigma_ns.is_none() {
            b.sigma_ns = Some(b.gate_time_ns / 6.0);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |path: &str, msg: &str| Err(ConfigError::invalid(path, msg));
        let dev = &self.device;
        if dev.transmons.is_empty() {
            return bad("device.transmons", "at least one transmon required");
        }
        dev.chain()?;
        dev.encoding.num_qubits(dev.truncation_d).map_err(|e| ConfigError::invalid("device.truncation_d", e.to_string()))?;
        if dev.tuned >= dev.transmons.len() {
            return bad("device.tuned", "index out of range");
        }
        let s = &self.sweep;
        if !s.flux_start.is_finite() || !s.flux_stop.is_finite() {
            return bad("sweep.flux_start", "flux bounds must be finite");
        }
        if s.levels == 0 {
            return bad("sweep.levels", "must be positive");
        }
        let v = &self.variational;
        if v.levels == 0 {
            return bad("variational.levels", "must be positive");
        }
        if v.layers == 0 {
            return bad("variational.layers", "must be positive");
        }
        if v.restarts == 0 {
            return bad("variational.restarts", "must be positive");
        }
        if v.max_iterations == 0 {
            return bad("variational.max_iterations", "must be positive");
        }
        if !(v.gradient_tolerance > 0.0) {
            return bad("variational.gradient_tolerance", "must be positive");
        }
        if !(v.parameter_tolerance > 0.0) {
            return bad("variational.parameter_tolerance", "must be positive");
        }
        if !(v.adaptive_offset_ghz > 0.0) {
            return bad("variational.adaptive_offset_ghz", "must be positive");
        }
        let b = &self.dynamics.bitflip;
        if !(b.gate_time_ns > 0.0) {
            return bad("dynamics.bitflip.gate_time_ns", "must be positive");
        }
        if !(b.sigma_ns.unwrap_or(1.0) > 0.0) {
            return bad("dynamics.bitflip.sigma_ns", "must be positive");
        }
        if b.samples == 0 {
            return bad("dynamics.bitflip.samples", "at least 1 sample required");
        }
        check_k_list("dynamics.bitflip.k_list", &b.k_list)?;
        if !(b.ref_step_ns > 0.0 && b.ref_step_ns <= b.gate_time_ns) {
            return bad("dynamics.bitflip.ref_step_ns", "must be in (0, gate_time_ns]");
        }
        let c = &self.dynamics.cphase;
        if c.samples == 0 {
            return bad("dynamics.cphase.samples", "at least 1 sample required");
        }
        check_k_list("dynamics.cphase.k_list", &c.k_list)?;
        if !(c.flux_range[0] < c.flux_range[1]) {
            return bad("dynamics.cphase.flux_range", "must be an increasing pair");
        }
        if !(c.hold_window[0] >= 0.0 && c.hold_window[0] < c.hold_window[1]) {
            return bad("dynamics.cphase.hold_window", "must be an increasing non-negative pair");
        }
        if c.scan_points < 3 {
            return bad("dynamics.cphase.scan_points", "at least 3 points required");
        }
        if !(0.0..=1.0).contains(&c.return_threshold) {
            return bad("dynamics.cphase.return_threshold", "must lie in [0, 1]");
        }
        if !(c.ref_step_ns > 0.0) {
            return bad("dynamics.cphase.ref_step_ns", "must be positive");
        }
        if let Some(m) = self.resources.m_values.iter().find(|m| **m == 0 || !m.is_power_of_two()) {
            return bad("resources.m_values", &format!("{m} is not a power of two"));
        }
        Ok(())
    }
}

fn check_k_list(path: &str, k: &[usize]) -> Result<(), ConfigError> {
    if k.iter().any(|&v| v == 0) || k.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::invalid(path, "step counts must be positive and strictly ascending"));
    }
    Ok(())
}
