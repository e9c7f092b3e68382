use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::fidelity::analytic_average_fidelity;
use super::schedule::{DenseFn, PhaseConvention, PulseSchedule};
use crate::device::{
    build_chain_hamiltonian, exact_spectrum, label_computational_states, uncoupled_product_states, ChainSpec,
    DenseOperator,
};
use crate::error::{domain, Error, Result};
use crate::pauli::{encode_register_operator, register_codes, EncodingScheme};
use crate::sim::StateVector;

/// Computational labels in basis order; the first digit is transmon 0.
pub const COMPUTATIONAL_LABELS: [&str; 4] = ["00", "01", "10", "11"];

const COARSE_POINTS: usize = 61;
const FLUX_TOLERANCE: f64 = 1e-6;
const BRANCH_CANDIDATES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingResult {
    pub flux: f64,
    /// GHz
    pub gap: f64,
    /// The minimum sits on an end of the search range.
    pub at_boundary: bool,
}

fn product_amplitudes(device: &ChainSpec, d: usize, label: &str) -> Result<Vec<Complex<f64>>> {
    let levels = label.chars().filter_map(|c| c.to_digit(10)).max().unwrap_or(0) as usize + 1;
    let products = uncoupled_product_states::<f64>(&device.transmons, d, levels.max(2))?;
    products
        .into_iter()
        .find(|p| p.label == label)
        .map(|p| p.amplitudes)
        .ok_or_else(|| Error::Domain(format!("label '{label}' not available for {} transmons", device.len())))
}

/// Gap between the two eigenstates carrying most weight in the span of the
/// labeled product states, in GHz.
pub fn branch_gap(device: &ChainSpec, d: usize, labels: (&str, &str)) -> Result<f64> {
    let h = build_chain_hamiltonian::<f64>(device, d)?;
    let k = BRANCH_CANDIDATES.min(h.dim());
    let spec = exact_spectrum(&h, k)?;
    let a = product_amplitudes(device, d, labels.0)?;
    let b = product_amplitudes(device, d, labels.1)?;
    let mut w: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let v = spec.eigenvectors.column(i);
            let pa: Complex<f64> = a.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            let pb: Complex<f64> = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            (pa.norm_sqr() + pb.norm_sqr(), spec.eigenvalues[i])
        })
        .collect();
    w.sort_by(|x, y| y.0.total_cmp(&x.0));
    Ok((w[0].1 - w[1].1).abs())
}

fn tuned_device(device: &ChainSpec, tuned: usize, flux: f64) -> ChainSpec {
    let mut out = device.clone();
    out.transmons[tuned] = out.transmons[tuned].with_flux(flux);
    out
}

fn golden_min(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut e = a + r * (b - a);
    let (mut fc, mut fe) = (f(c)?, f(e)?);
    while (b - a).abs() > tol {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + r * (b - a);
            fe = f(e)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Locates the minimum splitting of the `labels` branches as transmon
/// `tuned` sweeps `flux_range`.
pub fn find_avoided_crossing(
    device: &ChainSpec,
    d: usize,
    tuned: usize,
    flux_range: (f64, f64),
    labels: (&str, &str),
) -> Result<CrossingResult> {
    device.validate()?;
    if tuned >= device.len() {
        return domain(format!("tuned transmon {tuned} out of range"));
    }
    let (lo, hi) = flux_range;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return domain(format!("invalid flux range ({lo}, {hi})"));
    }
    let gap_at = |f: f64| branch_gap(&tuned_device(device, tuned, f), d, labels);
    let grid: Vec<f64> = (0..COARSE_POINTS).map(|i| lo + (hi - lo) * i as f64 / (COARSE_POINTS - 1) as f64).collect();
    let gaps: Vec<f64> = grid.iter().map(|&f| gap_at(f)).collect::<Result<_>>()?;
    let i = (0..gaps.len()).min_by(|&a, &b| gaps[a].total_cmp(&gaps[b])).unwrap_or(0);
    if i == 0 || i == gaps.len() - 1 {
        return Ok(CrossingResult { flux: grid[i], gap: gaps[i], at_boundary: true });
    }
    let sq = |f: f64| gap_at(f).map(|g| g * g);
    let mut f0 = golden_min(grid[i - 1], grid[i + 1], FLUX_TOLERANCE, sq)?;
    // Parabola through three points of the squared gap, which is smooth even
    // where the gap itself has a kink.
    let h = FLUX_TOLERANCE;
    let (ym, y0, yp) = (sq(f0 - h)?, sq(f0)?, sq(f0 + h)?);
    let curv = ym - 2.0 * y0 + yp;
    if curv > 0.0 {
        let step = 0.5 * h * (ym - yp) / curv;
        if step.abs() < 2.0 * h && sq(f0 + step)? <= y0 {
            f0 += step;
        }
    }
    Ok(CrossingResult { flux: f0, gap: gap_at(f0)?, at_boundary: false })
}

/// Diabatic CPHASE: a sudden jump of transmon `tuned` to `interaction_flux`
/// for `hold_time`, then virtual Z phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CphaseSpec {
    /// Two-transmon chain at idle fluxes.
    pub device: ChainSpec,
    pub truncation: usize,
    pub scheme: EncodingScheme,
    pub convention: PhaseConvention,
    pub tuned: usize,
    pub interaction_flux: f64,
    /// ns
    pub hold_time: f64,
    /// Radians applied to transmon 0 and transmon 1.
    pub post_z_phases: [f64; 2],
}

impl CphaseSpec {
    /// ns; the ramps are instantaneous.
    pub fn gate_time(&self) -> f64 {
        self.hold_time
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub crossing_flux: f64,
    pub min_gap_ghz: f64,
    pub operating_flux: f64,
    pub hold_time_ns: f64,
    pub gate_time_ns: f64,
    pub post_phases: [f64; 2],
    /// `|⟨11|U|11⟩|²` in the dressed basis.
    pub return_population: f64,
    /// `arg(U₀₀U₁₁ / U₀₁U₁₀)` over the diagonal, radians.
    pub conditional_phase: f64,
    pub analytic_fidelity: f64,
    pub leakage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CphaseOptions {
    pub truncation: usize,
    pub scheme: EncodingScheme,
    pub convention: PhaseConvention,
    pub tuned: usize,
    pub flux_range: (f64, f64),
    /// Skip the crossing search and start from this flux.
    pub interaction_flux: Option<f64>,
    /// Hold-time search window as multiples of the estimated swap period.
    pub hold_window: (f64, f64),
    pub scan_points: usize,
    /// Minimum `|11⟩` return accepted at the calibrated point.
    pub return_threshold: f64,
    /// Refine flux and hold together for the best analytic fidelity.
    pub joint_refinement: bool,
}

impl Default for CphaseOptions {
    fn default() -> Self {
        Self {
            truncation: 16,
            scheme: EncodingScheme::Gray,
            convention: PhaseConvention::Angular,
            tuned: 0,
            flux_range: (0.0, 0.15),
            interaction_flux: None,
            hold_window: (0.5, 1.5),
            scan_points: 401,
            return_threshold: 0.995,
            joint_refinement: true,
        }
    }
}

/// Idle dressed computational states in the `d²`-level basis, ordered as
/// [`COMPUTATIONAL_LABELS`].
pub fn dressed_computational_states(device: &ChainSpec, d: usize) -> Result<Vec<Vec<Complex<f64>>>> {
    if device.len() != 2 {
        return domain(format!("CPHASE needs a two-transmon chain, got {}", device.len()));
    }
    let h = build_chain_hamiltonian::<f64>(device, d)?;
    let spec = exact_spectrum(&h, 8.min(h.dim()))?;
    let products = uncoupled_product_states::<f64>(&device.transmons, d, 3)?;
    let labels = label_computational_states(&spec, &products)?;
    COMPUTATIONAL_LABELS
        .iter()
        .map(|l| {
            let i = labels
                .iter()
                .position(|s| s.label == *l && !s.ambiguous)
                .ok_or_else(|| Error::Domain(format!("idle state '{l}' is not uniquely identified")))?;
            Ok(spec.eigenvector(i))
        })
        .collect()
}

/// Subspace propagator `M(t) = E† exp(−iHt) E` at one flux.
struct SubspacePropagator {
    overlaps: DMatrix<Complex<f64>>,
    energies: Vec<f64>,
    factor: f64,
}

impl SubspacePropagator {
    fn new(device: &ChainSpec, d: usize, tuned: usize, flux: f64, basis: &[Vec<Complex<f64>>], factor: f64) -> Result<Self> {
        let h = build_chain_hamiltonian::<f64>(&tuned_device(device, tuned, flux), d)?;
        let (energies, vecs) = h.eigh();
        let e = DMatrix::from_fn(vecs.nrows(), basis.len(), |r, c| basis[c][r]);
        Ok(Self { overlaps: e.adjoint() * vecs, energies, factor })
    }

    fn at(&self, t: f64) -> DMatrix<Complex<f64>> {
        let mut a = self.overlaps.clone();
        for (c, e) in self.energies.iter().enumerate() {
            let p = Complex::from_polar(1.0, -self.factor * e * t);
            for r in 0..a.nrows() {
                a[(r, c)] *= p;
            }
        }
        a * self.overlaps.adjoint()
    }

    fn return_population(&self, t: f64) -> f64 {
        let a = self.overlaps.row(3);
        a.iter().zip(&self.energies).map(|(x, e)| x.norm_sqr() * Complex::from_polar(1.0, -self.factor * e * t)).sum::<Complex<f64>>().norm_sqr()
    }
}

fn post_phases(m: &DMatrix<Complex<f64>>) -> [f64; 2] {
    let r = m[(0, 0)];
    [-(m[(2, 2)] / r).arg(), -(m[(1, 1)] / r).arg()]
}

fn phase_diagonal(phases: [f64; 2]) -> [Complex<f64>; 4] {
    let [a, b] = phases;
    [0.0, b, a, a + b].map(|p| Complex::from_polar(1.0, p))
}

pub fn cphase_ideal() -> DMatrix<Complex<f64>> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
        [1.0, 1.0, 1.0, -1.0].iter().map(|&v| Complex::new(v, 0.0)).collect(),
    ))
}

fn corrected(m: &DMatrix<Complex<f64>>, phases: [f64; 2]) -> DMatrix<Complex<f64>> {
    let p = phase_diagonal(phases);
    DMatrix::from_fn(4, 4, |r, c| p[r] * m[(r, c)])
}

fn analytic_score(m: &DMatrix<Complex<f64>>) -> (f64, [f64; 2]) {
    let ph = post_phases(m);
    (analytic_average_fidelity(&corrected(m, ph), &cphase_ideal()), ph)
}

fn nelder_mead(start: [f64; 2], step: [f64; 2], max_evals: usize, mut f: impl FnMut([f64; 2]) -> Result<f64>) -> Result<([f64; 2], f64)> {
    let mut pts = vec![start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut vals: Vec<f64> = pts.iter().map(|&p| f(p)).collect::<Result<_>>()?;
    let mut evals = 3;
    while evals < max_evals {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i]).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        if (vals[2] - vals[0]).abs() < 1e-12 {
            break;
        }
        let cen = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |s: f64| [cen[0] + s * (pts[2][0] - cen[0]), cen[1] + s * (pts[2][1] - cen[1])];
        let xr = along(-1.0);
        let fr = f(xr)?;
        evals += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe)?;
            evals += 1;
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let xc = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(xc)?;
            evals += 1;
            if fc < vals[2].min(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                for i in 1..3 {
                    pts[i] = [(pts[0][0] + pts[i][0]) / 2.0, (pts[0][1] + pts[i][1]) / 2.0];
                    vals[i] = f(pts[i])?;
                    evals += 1;
                }
            }
        }
    }
    let i = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    Ok((pts[i], vals[i]))
}

/// Locates the crossing, scans the hold time for full `|11⟩` return after
/// one swap period, optionally refines flux and hold jointly, and solves
/// for the post phases.
pub fn calibrate_cphase(device: &ChainSpec, opts: &CphaseOptions) -> Result<(CphaseSpec, CalibrationRecord)> {
    let d = opts.truncation;
    let factor = opts.convention.factor();
    let basis = dressed_computational_states(device, d)?;
    let crossing = find_avoided_crossing(device, d, opts.tuned, opts.flux_range, ("11", "20"))?;
    if crossing.gap < 1e-6 {
        return Err(Error::Calibration {
            reason: format!("no |11>/|20> oscillation, minimum gap {:e} GHz", crossing.gap),
            best_hold_ns: 0.0,
            best_return: 1.0,
        });
    }
    let flux = opts.interaction_flux.unwrap_or(crossing.flux);
    let period = 2.0 * PI / (factor * crossing.gap);
    let (w0, w1) = (opts.hold_window.0 * period, opts.hold_window.1 * period);
    if !(w0 >= 0.0 && w1 > w0) || opts.scan_points < 3 {
        return domain("invalid hold-time window");
    }

    let swapped = |prop: &SubspacePropagator, t: f64| -> bool {
        let n = 64;
        (1..n).any(|i| prop.return_population(t * i as f64 / n as f64) < 0.5)
    };
    let prop = SubspacePropagator::new(device, d, opts.tuned, flux, &basis, factor)?;
    let ts: Vec<f64> = (0..opts.scan_points).map(|i| w0 + (w1 - w0) * i as f64 / (opts.scan_points - 1) as f64).collect();
    let ret: Vec<f64> = ts.iter().map(|&t| prop.return_population(t)).collect();
    let i = (0..ts.len()).max_by(|&a, &b| ret[a].total_cmp(&ret[b])).unwrap_or(0);
    let (a, b) = (ts[i.saturating_sub(1)], ts[(i + 1).min(ts.len() - 1)]);
    let mut hold = golden_min(a, b, 1e-6, |t| Ok(-prop.return_population(t)))?;
    let mut op_flux = flux;

    if opts.joint_refinement {
        let score = |p: [f64; 2]| -> Result<f64> {
            let pr = SubspacePropagator::new(device, d, opts.tuned, p[0], &basis, factor)?;
            Ok(-analytic_score(&pr.at(p[1])).0)
        };
        let (best, _) = nelder_mead([op_flux, hold], [2e-4, 1.0], 200, score)?;
        op_flux = best[0];
        hold = best[1];
    }

    let prop = SubspacePropagator::new(device, d, opts.tuned, op_flux, &basis, factor)?;
    let m = prop.at(hold);
    let (fid, phases) = analytic_score(&m);
    let ret = prop.return_population(hold);
    if ret < opts.return_threshold || !swapped(&prop, hold) {
        return Err(Error::Calibration {
            reason: format!("no full |11> return above {} after a swap in [{w0:.3}, {w1:.3}] ns", opts.return_threshold),
            best_hold_ns: hold,
            best_return: ret,
        });
    }
    let cond = (m[(0, 0)] * m[(3, 3)] / (m[(1, 1)] * m[(2, 2)])).arg();
    let kept: f64 = (0..4).map(|c| (0..4).map(|r| m[(r, c)].norm_sqr()).sum::<f64>()).sum::<f64>() / 4.0;
    let spec = CphaseSpec {
        device: device.clone(),
        truncation: d,
        scheme: opts.scheme,
        convention: opts.convention,
        tuned: opts.tuned,
        interaction_flux: op_flux,
        hold_time: hold,
        post_z_phases: phases,
    };
    let record = CalibrationRecord {
        crossing_flux: crossing.flux,
        min_gap_ghz: crossing.gap,
        operating_flux: op_flux,
        hold_time_ns: hold,
        gate_time_ns: spec.gate_time(),
        post_phases: phases,
        return_population: ret,
        conditional_phase: cond,
        analytic_fidelity: fid,
        leakage: 1.0 - kept,
    };
    Ok((spec, record))
}

/// Calibrated CPHASE in the encoded register.
#[derive(Clone, Debug)]
pub struct CphaseGate {
    pub spec: CphaseSpec,
    pub schedule: PulseSchedule,
    /// Idle dressed `|00⟩, |01⟩, |10⟩, |11⟩` in qubit space.
    pub basis: Vec<StateVector<f64>>,
    pub ideal: DMatrix<Complex<f64>>,
}

impl CphaseGate {
    /// Virtual Z: multiplies each dressed computational component by its phase.
    pub fn apply_post_phases(&self, state: &mut StateVector<f64>) -> Result<()> {
        let p = phase_diagonal(self.spec.post_z_phases);
        let coeffs: Vec<Complex<f64>> =
            self.basis.iter().map(|b| crate::sim::inner_product(b, state)).collect::<Result<_>>()?;
        let amps = state.amplitudes_mut();
        for ((b, c), ph) in self.basis.iter().zip(coeffs).zip(p) {
            let w = c * (ph - 1.0);
            for (a, v) in amps.iter_mut().zip(b.amplitudes()) {
                *a += w * v;
            }
        }
        Ok(())
    }
}

/// Builds the channel of an explicit spec: one constant interaction segment
/// over the hold time.
pub fn run_cphase_protocol(spec: &CphaseSpec) -> Result<CphaseGate> {
    let d = spec.truncation;
    let k = spec.scheme.num_qubits(d)?;
    if !(spec.hold_time > 0.0) {
        return domain("hold time must be positive");
    }
    let basis_levels = dressed_computational_states(&spec.device, d)?;
    let codes = register_codes(d, 2, spec.scheme)?;
    let n = 2 * k;
    let basis: Vec<StateVector<f64>> = basis_levels
        .iter()
        .map(|v| {
            let mut amps = vec![Complex::new(0.0, 0.0); 1 << n];
            for (i, a) in v.iter().enumerate() {
                amps[codes[i]] = *a;
            }
            StateVector::from_unnormalized(amps)
        })
        .collect::<Result<_>>()?;
    let h: DenseOperator<f64> = build_chain_hamiltonian(&tuned_device(&spec.device, spec.tuned, spec.interaction_flux), d)?;
    let encoded = encode_register_operator(&h, d, 2, spec.scheme)?;
    let dense = h.embedded(&codes, 1 << n);
    let dense_fn: DenseFn = Arc::new(move |_| dense.clone());
    let schedule = PulseSchedule::constant(&encoded, spec.hold_time)?.with_dense_fn(dense_fn).with_convention(spec.convention);
    Ok(CphaseGate { spec: spec.clone(), schedule, basis, ideal: cphase_ideal() })
}
