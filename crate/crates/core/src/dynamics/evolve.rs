use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use super::schedule::PulseSchedule;
use crate::device::DenseOperator;
use crate::error::{domain, Error, Result};
use crate::sim::{inner_product, rotate, StateVector};

/// Convergence target of the exact oracle (change in final-state infidelity).
pub const EXACT_TOLERANCE: f64 = 1e-10;
pub const MAX_HALVINGS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExactReport {
    /// Slice width of the accepted result, ns (segment length when exact).
    pub step: f64,
    pub halvings: usize,
    /// Final `1 − |⟨ψ_n|ψ_2n⟩|²`, maximized over states; 0 for constant segments.
    pub change: f64,
}

/// `exp(−i·φ·H)` for Hermitian `H`.
pub fn unitary_exp(h: &DenseOperator<f64>, phase: f64) -> DMatrix<Complex<f64>> {
    let (vals, vecs) = h.eigh();
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (c, v) in vals.iter().enumerate() {
        let e = Complex::from_polar(1.0, -phase * v);
        for r in 0..n {
            scaled[(r, c)] *= e;
        }
    }
    scaled * vecs.adjoint()
}

fn check_states(schedule: &PulseSchedule, states: &[StateVector<f64>]) -> Result<()> {
    if let Some(s) = states.iter().find(|s| s.num_qubits() != schedule.num_qubits()) {
        return domain(format!("state has {} qubits, schedule {}", s.num_qubits(), schedule.num_qubits()));
    }
    Ok(())
}

fn to_matrix(states: &[StateVector<f64>]) -> DMatrix<Complex<f64>> {
    let dim = states.first().map(|s| s.dim()).unwrap_or(0);
    DMatrix::from_fn(dim, states.len(), |r, c| states[c].amplitudes()[r])
}

fn from_matrix(m: &DMatrix<Complex<f64>>) -> Result<Vec<StateVector<f64>>> {
    (0..m.ncols()).map(|c| StateVector::from_unnormalized(m.column(c).iter().copied().collect())).collect()
}

/// Midpoint piecewise-constant propagation with `slices_per_unit` slices per
/// segment scaled by its length.
fn propagate(schedule: &PulseSchedule, psi: &DMatrix<Complex<f64>>, step: f64) -> Result<DMatrix<Complex<f64>>> {
    let factor = schedule.convention().factor();
    let edges = schedule.segment_edges();
    let mut out = psi.clone();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        let n = if schedule.is_piecewise_constant() { 1 } else { (len / step).ceil().max(1.0) as usize };
        let dt = len / n as f64;
        for i in 0..n {
            let tm = a + (i as f64 + 0.5) * dt;
            let u = unitary_exp(&schedule.dense_at(tm)?, factor * dt);
            out = u * out;
        }
    }
    Ok(out)
}

fn max_infidelity(a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>) -> f64 {
    (0..a.ncols())
        .map(|c| {
            let ov: Complex<f64> = a.column(c).iter().zip(b.column(c).iter()).map(|(x, y)| x.conj() * y).sum();
            let na: f64 = a.column(c).iter().map(|z| z.norm_sqr()).sum();
            let nb: f64 = b.column(c).iter().map(|z| z.norm_sqr()).sum();
            (1.0 - ov.norm_sqr() / (na * nb)).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// Exact oracle for several initial states, halving `ref_step` until the
/// final states change by less than [`EXACT_TOLERANCE`] in infidelity.
pub fn exact_evolve_many(
    schedule: &PulseSchedule,
    initial: &[StateVector<f64>],
    ref_step: f64,
) -> Result<(Vec<StateVector<f64>>, ExactReport)> {
    check_states(schedule, initial)?;
    if !(ref_step > 0.0) || ref_step > schedule.total_time() {
        return domain(format!("reference step {ref_step} must be in (0, {}]", schedule.total_time()));
    }
    let psi0 = to_matrix(initial);
    if schedule.is_piecewise_constant() {
        let out = propagate(schedule, &psi0, ref_step)?;
        return Ok((from_matrix(&out)?, ExactReport { step: schedule.total_time(), halvings: 0, change: 0.0 }));
    }
    let mut step = ref_step;
    let mut prev = propagate(schedule, &psi0, step)?;
    for h in 1..=MAX_HALVINGS {
        step *= 0.5;
        let next = propagate(schedule, &psi0, step)?;
        let change = max_infidelity(&prev, &next);
        if change < EXACT_TOLERANCE {
            return Ok((from_matrix(&next)?, ExactReport { step, halvings: h, change }));
        }
        prev = next;
    }
    Err(Error::Accuracy(format!(
        "exact propagation did not converge to {EXACT_TOLERANCE:e} after {MAX_HALVINGS} halvings (step {step:e} ns)"
    )))
}

pub fn exact_evolve(schedule: &PulseSchedule, initial: &StateVector<f64>, ref_step: f64) -> Result<StateVector<f64>> {
    let (mut v, _) = exact_evolve_many(schedule, std::slice::from_ref(initial), ref_step)?;
    Ok(v.remove(0))
}

/// First-order product formula with `k` steps, coefficients at step midpoints,
/// terms in skeleton order.
pub fn trotter_evolve_many(
    schedule: &PulseSchedule,
    initial: &[StateVector<f64>],
    k: usize,
) -> Result<Vec<StateVector<f64>>> {
    check_states(schedule, initial)?;
    if k == 0 {
        return domain("at least one Trotter step required");
    }
    let dt = schedule.total_time() / k as f64;
    let scale = 2.0 * schedule.convention().factor() * dt;
    let masks: Vec<(u64, u64)> = schedule.skeleton().iter().map(|p| (p.x_mask(), p.z_mask())).collect();
    let constant = schedule.is_piecewise_constant() && schedule.segment_edges().len() == 2;
    let fixed = if constant { Some(schedule.coefficients(0.5 * schedule.total_time())?) } else { None };
    let angles: Vec<Vec<f64>> = (0..if constant { 1 } else { k })
        .map(|i| {
            let c = match &fixed {
                Some(c) => c.clone(),
                None => schedule.coefficients((i as f64 + 0.5) * dt)?,
            };
            Ok(c.into_iter().map(|v| v * scale).collect())
        })
        .collect::<Result<_>>()?;
    Ok(initial
        .par_iter()
        .map(|s| {
            let mut st = s.clone();
            let amps = st.amplitudes_mut();
            for i in 0..k {
                let th = &angles[if constant { 0 } else { i }];
                for (&(x, z), &t) in masks.iter().zip(th) {
                    if t != 0.0 {
                        rotate(amps, x, z, t);
                    }
                }
            }
            st
        })
        .collect())
}

pub fn trotter_evolve(schedule: &PulseSchedule, initial: &StateVector<f64>, k: usize) -> Result<StateVector<f64>> {
    let mut v = trotter_evolve_many(schedule, std::slice::from_ref(initial), k)?;
    Ok(v.remove(0))
}

/// `1 − |⟨ψ_trot|ψ_exact⟩|²`, clamped to `[0, 1]`.
pub fn trotter_error(psi_trot: &StateVector<f64>, psi_exact: &StateVector<f64>) -> Result<f64> {
    Ok((1.0 - inner_product(psi_trot, psi_exact)?.norm_sqr()).clamp(0.0, 1.0))
}
