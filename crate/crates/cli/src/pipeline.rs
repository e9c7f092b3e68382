//! Command computations, free of file I/O so tests can call them directly.

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use num_complex::Complex;
use qcad::device::{
    build_chain_hamiltonian, build_single_hamiltonian, cosine_phase_operator, exact_spectrum, label_computational_states,
    number_operator, uncoupled_product_states, ChainSpec, TransmonSpec,
};
use qcad::dynamics::{
    branch_gap, build_bitflip_gate, calibrate_cphase, exact_evolve_many, gram_matrix, run_cphase_protocol,
    subspace_fidelity, trotter_scan_with_progress, CalibrationRecord, CphaseOptions, DragSpec, ExactReport,
    FidelityReport, PostMap, PulseSchedule, ScanConfig, ScanPoint, TrotterScan,
};
use qcad::pauli::{
    encode_chain_hamiltonian, encode_operator, encode_register_operator, format_listing, naive_cnot_upper_bound,
    EncodingScheme, PauliSum,
};
use qcad::sim::{RandomSeed, StateVector};
use qcad::variational::{
    build_block_ansatz, build_hierarchical_ansatz, closed_form_resources, constructive_resources, run_vqd, run_vqe,
    subspace_refine, AnsatzProgram, DeflationConfig, ResourceCount, VariationalResult,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{EncodedOperator, RunConfig};

/// Stream ids keep the Haar samples of the two gate kinds independent.
const BITFLIP_STREAM: u64 = 1;
const CPHASE_STREAM: u64 = 2;

/// The configured chain with the tuned transmon moved to `flux`.
pub fn chain_at(cfg: &RunConfig, flux: f64) -> Result<ChainSpec> {
    let mut chain = cfg.device.chain()?;
    chain.transmons[cfg.device.tuned] = chain.transmons[cfg.device.tuned].with_flux(flux);
    Ok(chain)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub flux: f64,
    pub energies: Vec<f64>,
    pub labels: Vec<String>,
    /// Two-transmon devices only.
    pub gap_11_20_ghz: Option<f64>,
}

pub fn spectrum_point(cfg: &RunConfig, flux: f64) -> Result<SpectrumPoint> {
    let d = cfg.device.truncation_d;
    let chain = chain_at(cfg, flux)?;
    let h = build_chain_hamiltonian::<f64>(&chain, d)?;
    let levels = cfg.sweep.levels;
    let spec = exact_spectrum(&h, levels)?;
    let products = uncoupled_product_states::<f64>(&chain.transmons, d, levels.min(d))?;
    let labels = label_computational_states(&spec, &products)?.into_iter().map(|l| l.label).collect();
    let gap_11_20_ghz = if chain.len() == 2 && d >= 3 { Some(branch_gap(&chain, d, ("11", "20"))?) } else { None };
    Ok(SpectrumPoint { flux, energies: spec.eigenvalues, labels, gap_11_20_ghz })
}

pub fn spectrum_sweep(cfg: &RunConfig) -> Result<Vec<SpectrumPoint>> {
    cfg.sweep.grid().par_iter().map(|&f| spectrum_point(cfg, f)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EncodedEntry {
    pub operator: EncodedOperator,
    pub scheme: EncodingScheme,
    pub listing: String,
    pub terms: usize,
    pub max_weight: usize,
    pub naive_cnot_bound: usize,
}

pub fn encode_operators(cfg: &RunConfig) -> Result<Vec<EncodedEntry>> {
    let d = cfg.device.truncation_d;
    let mut out = Vec::new();
    for &op in &cfg.encode.operators {
        for &scheme in &cfg.encode.schemes {
            let sum: PauliSum<f64> = match op {
                EncodedOperator::Number => encode_operator(&number_operator::<f64>(d)?, d, scheme)?,
                EncodedOperator::Cosine => encode_operator(&cosine_phase_operator::<f64>(d)?, d, scheme)?,
                EncodedOperator::Hamiltonian => encode_chain_hamiltonian(&cfg.device.chain()?, d, scheme)?,
            };
            out.push(EncodedEntry {
                operator: op,
                scheme,
                listing: format_listing(&sum, d, scheme),
                terms: sum.len(),
                max_weight: sum.max_weight(),
                naive_cnot_bound: naive_cnot_upper_bound(&sum),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqdOutcome {
    pub result: VariationalResult,
    /// Rayleigh-Ritz values on the span of the variational states.
    pub refined: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqdPoint {
    pub flux: f64,
    pub exact: Vec<f64>,
    /// Per-point failures are kept so a sweep can continue.
    pub outcome: std::result::Result<VqdOutcome, String>,
}

fn ansatz_for(m: usize, k: usize, layers: usize) -> Result<AnsatzProgram> {
    Ok(if m == 1 { build_block_ansatz(k, layers)? } else { build_hierarchical_ansatz(m, k, layers)? })
}

/// Starting parameters from products of single-transmon VQD optima.
fn uncoupled_seeds(cfg: &RunConfig, transmons: &[TransmonSpec], ansatz: &AnsatzProgram) -> Result<Vec<Vec<f64>>> {
    let v = &cfg.variational;
    let d = cfg.device.truncation_d;
    let scheme = cfg.device.encoding;
    let k = scheme.num_qubits(d)?;
    let each = v.levels.min(d);
    let single = build_block_ansatz(k, v.layers)?;
    let mut per_site = Vec::with_capacity(transmons.len());
    for t in transmons {
        let h = build_single_hamiltonian::<f64>(t, d)?;
        let exact = exact_spectrum(&h, each)?;
        let deflation = DeflationConfig { num_levels: each, beta_policy: v.beta_policy(&exact.eigenvalues, each)? };
        let r = run_vqd(&encode_operator(&h, d, scheme)?, &single, &deflation, &v.optimizer(), None)?;
        per_site.push(r.levels.into_iter().map(|l| l.parameters).collect::<Vec<_>>());
    }
    let products = uncoupled_product_states::<f64>(transmons, d, each)?;
    products
        .iter()
        .take(v.levels)
        .map(|p| {
            let blocks: Vec<&[f64]> = p.levels.iter().enumerate().map(|(s, &l)| per_site[s][l].as_slice()).collect();
            Ok(ansatz.embed_stage0(&blocks)?)
        })
        .collect()
}

fn vqd_outcome(cfg: &RunConfig, chain: &ChainSpec, exact: &[f64]) -> Result<VqdOutcome> {
    let v = &cfg.variational;
    let d = cfg.device.truncation_d;
    let scheme = cfg.device.encoding;
    let m = chain.len();
    let h = encode_register_operator(&build_chain_hamiltonian::<f64>(chain, d)?, d, m, scheme)?;
    let ansatz = ansatz_for(m, scheme.num_qubits(d)?, v.layers)?;
    let seeds = if m > 1 && v.seed_from_uncoupled { Some(uncoupled_seeds(cfg, &chain.transmons, &ansatz)?) } else { None };
    let opt = v.optimizer();
    if v.levels == 1 {
        let result = run_vqe(&h, &ansatz, &opt, seeds.as_ref().map(|s| s[0].as_slice()))?;
        return Ok(VqdOutcome { result, refined: None });
    }
    let deflation = DeflationConfig { num_levels: v.levels, beta_policy: v.beta_policy(exact, v.levels)? };
    let result = run_vqd(&h, &ansatz, &deflation, &opt, seeds.as_deref())?;
    let refined = if v.subspace_refinement { Some(subspace_refine(&h, &ansatz, &result)?.energies) } else { None };
    Ok(VqdOutcome { result, refined })
}

pub fn vqd_point(cfg: &RunConfig, flux: f64) -> Result<VqdPoint> {
    let chain = chain_at(cfg, flux)?;
    let d = cfg.device.truncation_d;
    let exact = exact_spectrum(&build_chain_hamiltonian::<f64>(&chain, d)?, cfg.variational.levels)?.eigenvalues;
    let outcome = vqd_outcome(cfg, &chain, &exact).map_err(|e| format!("{e:#}"));
    Ok(VqdPoint { flux, exact, outcome })
}

pub fn vqd_sweep(cfg: &RunConfig) -> Result<Vec<VqdPoint>> {
    cfg.sweep.grid().par_iter().map(|&f| vqd_point(cfg, f)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GateRun {
    pub gate_time_ns: f64,
    pub exact_fidelity: FidelityReport,
    pub oracle: ExactReport,
    /// `⟨b_i|U|b_j⟩` on the computational subspace after any post map.
    pub subspace_matrix: Vec<Vec<[f64; 2]>>,
    pub calibration: Option<CalibrationRecord>,
    pub scan: Option<TrotterScan>,
    /// Why the scan did not run, when it did not.
    pub scan_skipped: Option<String>,
}

type Progress<'a> = &'a (dyn Fn(&ScanPoint) + Sync);

#[allow(clippy::too_many_arguments)]
fn simulate_gate(
    schedule: &PulseSchedule,
    basis: &[StateVector<f64>],
    ideal: &DMatrix<Complex<f64>>,
    post: Option<PostMap<'_>>,
    samples: usize,
    seed: RandomSeed,
    ref_step: f64,
    k_list: Option<&[usize]>,
    progress: Progress<'_>,
) -> Result<(FidelityReport, ExactReport, Vec<Vec<[f64; 2]>>, Option<TrotterScan>)> {
    let (mut outputs, oracle) = exact_evolve_many(schedule, basis, ref_step)?;
    if let Some(p) = post {
        for s in &mut outputs {
            p(s)?;
        }
    }
    let fidelity = subspace_fidelity(basis, &outputs, ideal, samples, seed)?;
    let m = gram_matrix(basis, &outputs)?;
    let matrix = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    let scan = match k_list {
        Some(k) if !k.is_empty() => {
            let cfg = ScanConfig { k_list: k.to_vec(), samples, seed, ref_step };
            Some(trotter_scan_with_progress(schedule, basis, ideal, post, &cfg, progress)?)
        }
        _ => None,
    };
    Ok((fidelity, oracle, matrix, scan))
}

pub fn run_bitflip(cfg: &RunConfig, progress: Progress<'_>) -> Result<GateRun> {
    let b = &cfg.dynamics.bitflip;
    let d = cfg.device.truncation_d;
    let chain = cfg.device.chain()?;
    if chain.len() != 1 {
        bail!("gate bitflip needs a single-transmon device, got {} transmons", chain.len());
    }
    let mut spec = DragSpec::from_transmon(&chain.transmons[0], d, b.gate_time_ns)?;
    spec.envelope_sigma = b.sigma_ns.unwrap_or(b.gate_time_ns / 6.0);
    spec.detuning = b.detuning_ghz;
    spec.quadrature_scale = b.quadrature_scale_ns;
    spec.initial_phase = b.initial_phase;
    let gate = build_bitflip_gate(&spec, cfg.device.encoding, cfg.dynamics.convention)?;
    let seed = RandomSeed::new(cfg.dynamics.seed, BITFLIP_STREAM);
    let (exact_fidelity, oracle, subspace_matrix, scan) = simulate_gate(
        &gate.schedule,
        &gate.basis,
        &gate.ideal,
        None,
        b.samples,
        seed,
        b.ref_step_ns,
        Some(&b.k_list),
        progress,
    )?;
    Ok(GateRun {
        gate_time_ns: b.gate_time_ns,
        exact_fidelity,
        oracle,
        subspace_matrix,
        calibration: None,
        scan,
        scan_skipped: None,
    })
}

pub fn cphase_options(cfg: &RunConfig) -> CphaseOptions {
    let c = &cfg.dynamics.cphase;
    CphaseOptions {
        truncation: cfg.device.truncation_d,
        scheme: cfg.device.encoding,
        convention: cfg.dynamics.convention,
        tuned: cfg.device.tuned,
        flux_range: (c.flux_range[0], c.flux_range[1]),
        interaction_flux: c.interaction_flux,
        hold_window: (c.hold_window[0], c.hold_window[1]),
        scan_points: c.scan_points,
        return_threshold: c.return_threshold,
        joint_refinement: c.joint_refinement,
    }
}

/// Calibrates, evaluates the exact channel and, unless the truncation
/// exceeds the quick limit without `full`, runs the Trotter scan.
pub fn run_cphase(cfg: &RunConfig, full: bool, progress: Progress<'_>) -> Result<GateRun> {
    let c = &cfg.dynamics.cphase;
    let d = cfg.device.truncation_d;
    let chain = cfg.device.chain()?;
    if chain.len() != 2 {
        bail!("gate cphase needs a two-transmon device, got {} transmons", chain.len());
    }
    let (spec, record) = calibrate_cphase(&chain, &cphase_options(cfg)).context("CPHASE calibration failed")?;
    let gate = run_cphase_protocol(&spec)?;
    let post = |s: &mut StateVector<f64>| gate.apply_post_phases(s);
    let run_scan = full || d <= c.quick_max_truncation;
    let scan_skipped = (!run_scan && !c.k_list.is_empty())
        .then(|| format!("Trotter scan at d={d} exceeds quick_max_truncation={}; rerun with --full", c.quick_max_truncation));
    let seed = RandomSeed::new(cfg.dynamics.seed, CPHASE_STREAM);
    let (exact_fidelity, oracle, subspace_matrix, scan) = simulate_gate(
        &gate.schedule,
        &gate.basis,
        &gate.ideal,
        Some(&post),
        c.samples,
        seed,
        c.ref_step_ns,
        run_scan.then_some(c.k_list.as_slice()),
        progress,
    )?;
    Ok(GateRun {
        gate_time_ns: spec.gate_time(),
        exact_fidelity,
        oracle,
        subspace_matrix,
        calibration: Some(record),
        scan,
        scan_skipped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResourceRow {
    pub m: usize,
    pub closed_form: ResourceCount,
    pub constructive: ResourceCount,
    pub matched: bool,
}

pub fn resource_table(m_values: &[usize]) -> Result<Vec<ResourceRow>> {
    m_values
        .iter()
        .map(|&m| {
            let closed_form = closed_form_resources(m)?;
            let constructive = constructive_resources(m)?;
            Ok(ResourceRow { m, closed_form, constructive, matched: closed_form == constructive })
        })
        .collect()
}
