//! Pulse-level gate simulation: exact and Trotterized propagation, DRAG and
//! diabatic CPHASE protocols, Haar-averaged fidelity and error scans.

mod cphase;
mod drag;
mod evolve;
mod fidelity;
mod scan;
mod schedule;

pub use cphase::{
    branch_gap, calibrate_cphase, cphase_ideal, dressed_computational_states, find_avoided_crossing, run_cphase_protocol,
    CalibrationRecord, CphaseGate, CphaseOptions, CphaseSpec, CrossingResult, COMPUTATIONAL_LABELS,
};
pub use drag::{
    build_bitflip_gate, build_drag_schedule, default_couplings, drag_envelope, drag_envelope_derivative,
    transmon_anharmonicities, BitflipGate, DragSpec,
};
pub use evolve::{
    exact_evolve, exact_evolve_many, trotter_error, trotter_evolve, trotter_evolve_many, unitary_exp, ExactReport,
    EXACT_TOLERANCE, MAX_HALVINGS,
};
pub use fidelity::{
    analytic_average_fidelity, average_gate_fidelity, gram_matrix, haar_overlap_samples, subspace_fidelity,
    FidelityReport, SampleStats,
};
pub use scan::{fit_power_law, trotter_scan, trotter_scan_with_progress, PostMap, ScalingFit, ScanConfig, ScanPoint, TrotterScan};
pub use schedule::{CoefficientFn, DenseFn, PhaseConvention, PulseSchedule};
