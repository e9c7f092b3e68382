use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolve::{exact_evolve_many, trotter_evolve_many, ExactReport};
use super::fidelity::{gram_matrix, haar_overlap_samples, subspace_fidelity, FidelityReport, SampleStats};
use super::schedule::PulseSchedule;
use crate::error::{domain, Result};
use crate::sim::{RandomSeed, StateVector};

/// Points with a smaller error are dropped before fitting.
pub const FIT_ERROR_FLOOR: f64 = 1e-12;
/// Allowed relative change of the local log-log slope inside the fit window.
pub const SLOPE_VARIATION: f64 = 0.2;

/// Least-squares `error ≈ A·Δt^ν` on the asymptotic points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// RMS residual in natural-log units.
    pub residual: f64,
    pub points_used: usize,
    /// Fewer than three points entered the fit.
    pub degenerate: bool,
}

fn slope(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1) / (b.0 - a.0)
}

/// Walks from the smallest step upward, keeping points while each local
/// slope stays within [`SLOPE_VARIATION`] of the first one, then fits.
pub fn fit_power_law(dts: &[f64], errors: &[f64]) -> Result<ScalingFit> {
    if dts.len() != errors.len() {
        return domain("step and error lists differ in length");
    }
    let mut pts: Vec<(f64, f64)> = dts
        .iter()
        .zip(errors)
        .filter(|(dt, e)| **e > FIT_ERROR_FLOOR && **dt > 0.0)
        .map(|(dt, e)| (dt.ln(), e.ln()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nan = ScalingFit {
        prefactor: f64::NAN,
        exponent: f64::NAN,
        dt_min: f64::NAN,
        dt_max: f64::NAN,
        residual: f64::NAN,
        points_used: pts.len(),
        degenerate: true,
    };
    if pts.len() < 2 {
        return Ok(nan);
    }
    let reference = slope(pts[0], pts[1]);
    let mut used = 2;
    while used < pts.len() {
        let s = slope(pts[used - 1], pts[used]);
        if (s - reference).abs() >= SLOPE_VARIATION * reference.abs() {
            break;
        }
        used += 1;
    }
    let fit = &pts[..used];
    let n = used as f64;
    let mx = fit.iter().map(|p| p.0).sum::<f64>() / n;
    let my = fit.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let nu = sxy / sxx;
    let b = my - nu * mx;
    let residual = (fit.iter().map(|p| (p.1 - b - nu * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(ScalingFit {
        prefactor: b.exp(),
        exponent: nu,
        dt_min: fit[0].0.exp(),
        dt_max: fit[used - 1].0.exp(),
        residual,
        points_used: used,
        degenerate: used < 3,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Ascending step counts.
    pub k_list: Vec<usize>,
    pub samples: usize,
    pub seed: RandomSeed,
    /// Initial slice width of the exact oracle, ns.
    pub ref_step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub k_steps: usize,
    pub dt_ns: f64,
    pub mean_error: f64,
    pub std_error: f64,
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterScan {
    pub points: Vec<ScanPoint>,
    pub fit: ScalingFit,
    pub exact_fidelity: FidelityReport,
    pub oracle: ExactReport,
}

pub type PostMap<'a> = &'a (dyn Fn(&mut StateVector<f64>) -> Result<()> + Sync);

/// Haar-averaged Trotter error and gate fidelity per step count.
///
/// Every channel is linear, so only the subspace basis is propagated; each
/// Haar sample then costs a small quadratic form. Sample `i` uses
/// `seed.derive(i)` at every `K`. `post` (a frame change such as virtual Z
/// phases) is applied to both channels before the fidelity is taken.
pub fn trotter_scan(
    schedule: &PulseSchedule,
    basis: &[StateVector<f64>],
    ideal: &DMatrix<Complex<f64>>,
    post: Option<PostMap<'_>>,
    cfg: &ScanConfig,
) -> Result<TrotterScan> {
    trotter_scan_with_progress(schedule, basis, ideal, post, cfg, &|_| {})
}

/// [`trotter_scan`] calling `progress` as each step count finishes.
pub fn trotter_scan_with_progress(
    schedule: &PulseSchedule,
    basis: &[StateVector<f64>],
    ideal: &DMatrix<Complex<f64>>,
    post: Option<PostMap<'_>>,
    cfg: &ScanConfig,
    progress: &(dyn Fn(&ScanPoint) + Sync),
) -> Result<TrotterScan> {
    if cfg.k_list.is_empty() || cfg.k_list.windows(2).any(|w| w[0] >= w[1]) {
        return domain("K list must be non-empty and strictly ascending");
    }
    let finish = |mut v: Vec<StateVector<f64>>| -> Result<Vec<StateVector<f64>>> {
        if let Some(p) = post {
            for s in &mut v {
                p(s)?;
            }
        }
        Ok(v)
    };
    let (exact, oracle) = exact_evolve_many(schedule, basis, cfg.ref_step)?;
    let exact = finish(exact)?;
    let exact_fidelity = subspace_fidelity(basis, &exact, ideal, cfg.samples, cfg.seed)?;
    let points = cfg
        .k_list
        .par_iter()
        .map(|&k| {
            let trot = finish(trotter_evolve_many(schedule, basis, k)?)?;
            let errors: Vec<f64> = haar_overlap_samples(&gram_matrix(&trot, &exact)?, cfg.samples, cfg.seed)?
                .into_iter()
                .map(|o| (1.0 - o).clamp(0.0, 1.0))
                .collect();
            let e = SampleStats::from_values(&errors)?;
            let f = subspace_fidelity(basis, &trot, ideal, cfg.samples, cfg.seed)?;
            let point = ScanPoint {
                k_steps: k,
                dt_ns: schedule.total_time() / k as f64,
                mean_error: e.mean,
                std_error: e.std,
                mean_fidelity: f.mean,
                std_fidelity: f.std,
            };
            progress(&point);
            Ok(point)
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_power_law(
        &points.iter().map(|p| p.dt_ns).collect::<Vec<_>>(),
        &points.iter().map(|p| p.mean_error).collect::<Vec<_>>(),
    )?;
    Ok(TrotterScan { points, fit, exact_fidelity, oracle })
}
