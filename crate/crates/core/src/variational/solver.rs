use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ansatz::AnsatzProgram;
use super::lbfgs::{minimize, LbfgsOptions};
use super::objective::Objective;
use crate::error::{domain, Error, Result};
use crate::pauli::PauliSum;
use crate::sim::{inner_product, RandomSeed, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Joint,
    LayerWise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethod {
    /// Reverse-mode statevector gradient.
    Adjoint,
    ParameterShift,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Iteration cap per optimizer call.
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub parameter_tolerance: f64,
    pub strategy: Strategy,
    pub restarts: usize,
    pub seed: u64,
    /// Layer-wise sweeps before the joint refinement.
    pub layer_passes: usize,
    /// Random starts are uniform in `[−init_scale, init_scale]`.
    pub init_scale: f64,
    pub gradient: GradientMethod,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            gradient_tolerance: 1e-7,
            parameter_tolerance: 1e-10,
            strategy: Strategy::LayerWise,
            restarts: 1,
            seed: 0,
            layer_passes: 2,
            init_scale: 0.1,
            gradient: GradientMethod::Adjoint,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gradient_tolerance > 0.0) || !(self.parameter_tolerance > 0.0) {
            return domain("optimizer tolerances must be positive");
        }
        if self.restarts == 0 {
            return domain("at least one restart required");
        }
        if self.max_iterations == 0 {
            return domain("max_iterations must be positive");
        }
        Ok(())
    }

    fn lbfgs(&self) -> LbfgsOptions {
        LbfgsOptions {
            max_iterations: self.max_iterations,
            gradient_tolerance: self.gradient_tolerance,
            parameter_tolerance: self.parameter_tolerance,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaPolicy {
    /// `β_i` for each previous level `i`; the last entry repeats.
    Fixed(Vec<f64>),
    /// `γ` starts `initial_offset` GHz above the previous level and doubles its
    /// distance while the solution stays pinned at `γ`.
    Adaptive { initial_offset: f64, max_doublings: usize },
}

impl BetaPolicy {
    /// `β = 2·(E_{k−1} − E_0)` from an exact spectrum.
    pub fn from_exact(eigenvalues: &[f64], num_levels: usize) -> Result<Self> {
        if num_levels == 0 || eigenvalues.len() < num_levels {
            return domain("exact spectrum shorter than the requested levels");
        }
        let span = eigenvalues[num_levels - 1] - eigenvalues[0];
        Ok(Self::Fixed(vec![2.0 * span.max(1e-3); num_levels]))
    }

    pub fn adaptive() -> Self {
        Self::Adaptive { initial_offset: 1.0, max_doublings: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflationConfig {
    pub num_levels: usize,
    pub beta_policy: BetaPolicy,
}

impl DeflationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_levels == 0 {
            return domain("at least one level required");
        }
        match &self.beta_policy {
            BetaPolicy::Fixed(b) if b.is_empty() || b.iter().any(|v| !(*v > 0.0)) => {
                domain("fixed beta values must be positive")
            }
            BetaPolicy::Adaptive { initial_offset, .. } if !(*initial_offset > 0.0) => {
                domain("adaptive gamma offset must be positive")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelResult {
    /// `⟨H⟩` of the optimized state, GHz.
    pub energy: f64,
    /// Penalized objective.
    pub objective: f64,
    pub parameters: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    pub restart: usize,
    pub gamma_doublings: usize,
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationalResult {
    /// Ascending.
    pub levels: Vec<LevelResult>,
    /// `|⟨ψ_i|ψ_j⟩|²` in the same order as `levels`.
    pub overlaps: Vec<Vec<f64>>,
}

impl VariationalResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn max_off_diagonal_overlap(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (i, row) in self.overlaps.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i != j {
                    m = m.max(*v);
                }
            }
        }
        m
    }
}

struct Run {
    x: Vec<f64>,
    f: f64,
    gradient_norm: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
}

fn optimize_subset(obj: &Objective<'_>, x: &[f64], subset: Option<&[usize]>, cfg: &OptimizerConfig) -> Result<Run> {
    let eval_full = |p: &[f64]| -> (f64, Vec<f64>) {
        let r = match cfg.gradient {
            GradientMethod::Adjoint => obj.adjoint_gradient(p),
            GradientMethod::ParameterShift => obj.parameter_shift_gradient(p),
        };
        r.unwrap_or_else(|_| (f64::INFINITY, vec![0.0; p.len()]))
    };
    let opts = cfg.lbfgs();
    match subset {
        None => {
            let r = minimize(eval_full, x, &opts);
            Ok(Run { x: r.x, f: r.f, gradient_norm: r.gradient_norm, iterations: r.iterations, converged: r.converged, trace: r.trace })
        }
        Some(idx) => {
            let base = x.to_vec();
            let sub0: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
            let r = minimize(
                |s: &[f64]| {
                    let mut full = base.clone();
                    for (k, &i) in idx.iter().enumerate() {
                        full[i] = s[k];
                    }
                    let (v, g) = eval_full(&full);
                    (v, idx.iter().map(|&i| g[i]).collect())
                },
                &sub0,
                &opts,
            );
            let mut full = base;
            for (k, &i) in idx.iter().enumerate() {
                full[i] = r.x[k];
            }
            Ok(Run { x: full, f: r.f, gradient_norm: r.gradient_norm, iterations: r.iterations, converged: r.converged, trace: r.trace })
        }
    }
}

fn optimize_from(obj: &Objective<'_>, x0: Vec<f64>, cfg: &OptimizerConfig) -> Result<Run> {
    let mut x = x0;
    let mut iterations = 0;
    let mut trace = Vec::new();
    if cfg.strategy == Strategy::LayerWise {
        let groups = obj.ansatz().layer_groups();
        for _ in 0..cfg.layer_passes {
            for g in &groups {
                let r = optimize_subset(obj, &x, Some(g), cfg)?;
                iterations += r.iterations;
                trace.extend(r.trace);
                x = r.x;
            }
        }
    }
    let mut r = optimize_subset(obj, &x, None, cfg)?;
    r.iterations += iterations;
    trace.extend(std::mem::take(&mut r.trace));
    r.trace = trace;
    Ok(r)
}

fn start_point(n: usize, seed_params: Option<&[f64]>, restart: usize, cfg: &OptimizerConfig, level: usize) -> Vec<f64> {
    let base = seed_params.map(|s| s.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    if seed_params.is_some() && restart == 0 {
        return base;
    }
    let mut rng = RandomSeed::new(cfg.seed, ((level as u64) << 32) | restart as u64).rng();
    base.into_iter().map(|v| v + rng.random_range(-cfg.init_scale..=cfg.init_scale)).collect()
}

/// Best of `cfg.restarts` optimizations; ties within `1e-12` go to the lowest restart.
fn best_of_restarts(
    obj: &Objective<'_>,
    seed_params: Option<&[f64]>,
    cfg: &OptimizerConfig,
    level: usize,
) -> Result<(usize, Run)> {
    let n = obj.ansatz().num_parameters;
    if let Some(s) = seed_params {
        obj.ansatz().check_params(s)?;
    }
    let runs: Vec<Result<Run>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| optimize_from(obj, start_point(n, seed_params, r, cfg, level), cfg))
        .collect();
    let mut best: Option<(usize, Run)> = None;
    for (i, run) in runs.into_iter().enumerate() {
        let run = run?;
        let better = match &best {
            None => true,
            Some((_, b)) => run.f < b.f - 1e-12,
        };
        if better {
            best = Some((i, run));
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Ground-state search.
pub fn run_vqe(
    h: &PauliSum<f64>,
    ansatz: &AnsatzProgram,
    config: &OptimizerConfig,
    seed_params: Option<&[f64]>,
) -> Result<VariationalResult> {
    run_vqd(h, ansatz, &DeflationConfig { num_levels: 1, beta_policy: BetaPolicy::Fixed(vec![1.0]) }, config, seed_params.map(|s| vec![s.to_vec()]).as_deref())
}

/// Lowest `num_levels` levels by sequential deflation.
pub fn run_vqd(
    h: &PauliSum<f64>,
    ansatz: &AnsatzProgram,
    deflation: &DeflationConfig,
    config: &OptimizerConfig,
    seeds: Option<&[Vec<f64>]>,
) -> Result<VariationalResult> {
    config.validate()?;
    deflation.validate()?;
    if !h.is_hermitian(1e-12) {
        return domain("Hamiltonian has complex coefficients");
    }
    let mut found: Vec<(LevelResult, StateVector<f64>)> = Vec::new();
    for level in 0..deflation.num_levels {
        let seed = seeds.and_then(|s| s.get(level)).map(|v| v.as_slice());
        let energies: Vec<f64> = found.iter().map(|(l, _)| l.energy).collect();
        let mut doublings = 0;
        let mut gamma = match deflation.beta_policy {
            BetaPolicy::Adaptive { initial_offset, .. } => energies.last().map(|e| e + initial_offset),
            BetaPolicy::Fixed(_) => None,
        };
        loop {
            let mut obj = Objective::new(h, ansatz, None)?;
            for (i, (l, s)) in found.iter().enumerate() {
                let beta = match (&deflation.beta_policy, gamma) {
                    (BetaPolicy::Fixed(b), _) => b[i.min(b.len() - 1)],
                    (BetaPolicy::Adaptive { .. }, Some(g)) => g - l.energy,
                    (BetaPolicy::Adaptive { .. }, None) => unreachable!("gamma set once a level exists"),
                };
                obj.add_penalty(beta, s.clone())?;
            }
            let (restart, run) = best_of_restarts(&obj, seed, config, level)?;
            let state = obj.prepare(&run.x)?;
            let energy = obj.energy(&run.x)?;
            let max_overlap = found
                .iter()
                .map(|(_, s)| inner_product(s, &state).map(|z| z.norm_sqr()))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            if let (BetaPolicy::Adaptive { max_doublings, .. }, Some(g)) = (&deflation.beta_policy, gamma) {
                let pinned = max_overlap > 0.5 || run.f >= g - 1e-6 * g.abs().max(1.0);
                if pinned {
                    if doublings >= *max_doublings {
                        return Err(Error::DeflationStall(format!(
                            "level {level} stayed pinned at gamma = {g:.6} GHz after {doublings} doublings (overlap {max_overlap:.3e})"
                        )));
                    }
                    let prev = *energies.last().expect("previous level");
                    gamma = Some(prev + 2.0 * (g - prev));
                    doublings += 1;
                    continue;
                }
            }
            found.push((
                LevelResult {
                    energy,
                    objective: run.f,
                    parameters: run.x,
                    iterations: run.iterations,
                    gradient_norm: run.gradient_norm,
                    converged: run.converged,
                    restart,
                    gamma_doublings: doublings,
                    trace: run.trace,
                },
                state,
            ));
            break;
        }
    }
    found.sort_by(|a, b| a.0.energy.total_cmp(&b.0.energy));
    let overlaps = found
        .iter()
        .map(|(_, a)| found.iter().map(|(_, b)| inner_product(a, b).map(|z| z.norm_sqr()).unwrap_or(0.0)).collect())
        .collect();
    Ok(VariationalResult { levels: found.into_iter().map(|(l, _)| l).collect(), overlaps })
}
