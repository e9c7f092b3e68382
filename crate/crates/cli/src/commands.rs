use std::time::Instant;

use anyhow::Result;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{fmt_energy, fmt_stat, Csv, OutputSet};
use crate::pipeline::{self, GateRun};

pub const SPECTRUM_CSV: &str = "spectrum.csv";
pub const ENCODE_SUMMARY_CSV: &str = "encode_summary.csv";
pub const VQD_CSV: &str = "vqd.csv";
pub const VQD_TRACE: &str = "vqd_trace.log";
pub const VQD_ERRORS: &str = "vqd_errors.log";
pub const RESOURCES_CSV: &str = "resources.csv";
pub const SCAN_HEADER: [&str; 6] = ["k_steps", "dt_ns", "mean_error", "std_error", "mean_fidelity", "std_fidelity"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Bitflip,
    Cphase,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Bitflip => "bitflip",
            Self::Cphase => "cphase",
        }
    }
}

pub fn encode_listing_name(op: &str, scheme: &str) -> String {
    format!("encode_{op}_{scheme}.txt")
}

pub fn gate_scan_name(kind: GateKind) -> String {
    format!("gate_{}_scan.csv", kind.name())
}

pub fn gate_report_name(kind: GateKind) -> String {
    format!("gate_{}_fidelity.json", kind.name())
}

pub fn gate_calibration_name(kind: GateKind) -> String {
    format!("gate_{}_calibration.json", kind.name())
}

pub fn spectrum(cfg: &RunConfig) -> Result<OutputSet> {
    let points = pipeline::spectrum_sweep(cfg)?;
    let two = cfg.device.transmons.len() == 2;
    let mut header = vec!["flux", "level_index", "energy_ghz", "label"];
    if two {
        header.push("gap_11_20_ghz");
    }
    let mut csv = Csv::new(&header);
    for p in &points {
        for (i, (e, l)) in p.energies.iter().zip(&p.labels).enumerate() {
            let mut row = vec![fmt_energy(p.flux), i.to_string(), fmt_energy(*e), l.clone()];
            if two {
                row.push(p.gap_11_20_ghz.map(fmt_energy).unwrap_or_default());
            }
            csv.row(&row);
        }
    }
    let mut out = OutputSet::new();
    out.add(SPECTRUM_CSV, csv.into_string());
    Ok(out)
}

pub fn encode(cfg: &RunConfig) -> Result<OutputSet> {
    let entries = pipeline::encode_operators(cfg)?;
    let mut out = OutputSet::new();
    let mut csv = Csv::new(&["operator", "scheme", "terms", "max_weight", "naive_cnot_bound"]);
    for e in &entries {
        out.add(encode_listing_name(e.operator.name(), e.scheme.name()), e.listing.clone());
        csv.row(&[
            e.operator.name().to_string(),
            e.scheme.name().to_string(),
            e.terms.to_string(),
            e.max_weight.to_string(),
            e.naive_cnot_bound.to_string(),
        ]);
    }
    out.add(ENCODE_SUMMARY_CSV, csv.into_string());
    Ok(out)
}

pub fn vqd(cfg: &RunConfig) -> Result<OutputSet> {
    let points = pipeline::vqd_sweep(cfg)?;
    let refined = cfg.variational.subspace_refinement && cfg.variational.levels > 1;
    let mut header = vec!["flux", "level", "energy_ghz", "exact_energy_ghz", "abs_error_ghz", "iterations", "converged"];
    if refined {
        header.extend(["refined_energy_ghz", "refined_abs_error_ghz"]);
    }
    let mut csv = Csv::new(&header);
    let mut trace = String::new();
    let mut errors = String::new();
    for p in &points {
        let o = match &p.outcome {
            Ok(o) => o,
            Err(e) => {
                errors.push_str(&format!("flux={} error: {e}\n", fmt_energy(p.flux)));
                continue;
            }
        };
        for (i, (l, exact)) in o.result.levels.iter().zip(&p.exact).enumerate() {
            let mut row = vec![
                fmt_energy(p.flux),
                i.to_string(),
                fmt_energy(l.energy),
                fmt_energy(*exact),
                fmt_energy((l.energy - exact).abs()),
                l.iterations.to_string(),
                l.converged.to_string(),
            ];
            if refined {
                let r = o.refined.as_ref().and_then(|r| r.get(i)).copied().unwrap_or(f64::NAN);
                row.push(fmt_energy(r));
                row.push(fmt_energy((r - exact).abs()));
            }
            csv.row(&row);
            if cfg.variational.trace {
                for (it, v) in l.trace.iter().enumerate() {
                    trace.push_str(&format!("{} {i} {it} {}\n", fmt_energy(p.flux), fmt_energy(*v)));
                }
            }
        }
    }
    let mut out = OutputSet::new();
    out.add(VQD_CSV, csv.into_string());
    if cfg.variational.trace {
        out.add(VQD_TRACE, format!("# flux level iteration objective_ghz\n{trace}"));
    }
    if !errors.is_empty() {
        eprintln!("vqd: some flux points failed; see {VQD_ERRORS}");
        out.add(VQD_ERRORS, errors);
    }
    Ok(out)
}

#[derive(Serialize)]
struct GateReport<'a> {
    gate: &'static str,
    gate_time_ns: f64,
    exact_fidelity: &'a qcad::dynamics::FidelityReport,
    oracle: &'a qcad::dynamics::ExactReport,
    subspace_matrix: &'a [Vec<[f64; 2]>],
    fit: Option<&'a qcad::dynamics::ScalingFit>,
    scan_skipped: Option<&'a str>,
}

pub fn scan_csv(run: &GateRun) -> String {
    let mut csv = Csv::new(&SCAN_HEADER);
    for p in run.scan.iter().flat_map(|s| &s.points) {
        csv.row(&[
            p.k_steps.to_string(),
            fmt_stat(p.dt_ns),
            fmt_stat(p.mean_error),
            fmt_stat(p.std_error),
            fmt_stat(p.mean_fidelity),
            fmt_stat(p.std_fidelity),
        ]);
    }
    csv.into_string()
}

pub fn gate(cfg: &RunConfig, kind: GateKind, full: bool) -> Result<OutputSet> {
    let start = Instant::now();
    let heartbeat = move |p: &qcad::dynamics::ScanPoint| {
        eprintln!(
            "[{:>8.1}s] K={} dt={:.3e} ns mean_error={:.3e}",
            start.elapsed().as_secs_f64(),
            p.k_steps,
            p.dt_ns,
            p.mean_error
        );
    };
    let run = match kind {
        GateKind::Bitflip => pipeline::run_bitflip(cfg, &heartbeat)?,
        GateKind::Cphase => pipeline::run_cphase(cfg, full, &heartbeat)?,
    };
    if let Some(msg) = &run.scan_skipped {
        eprintln!("gate {}: {msg}", kind.name());
    }
    let mut out = OutputSet::new();
    out.add(gate_scan_name(kind), scan_csv(&run));
    out.add_json(
        gate_report_name(kind),
        &GateReport {
            gate: kind.name(),
            gate_time_ns: run.gate_time_ns,
            exact_fidelity: &run.exact_fidelity,
            oracle: &run.oracle,
            subspace_matrix: &run.subspace_matrix,
            fit: run.scan.as_ref().map(|s| &s.fit),
            scan_skipped: run.scan_skipped.as_deref(),
        },
    )?;
    if let Some(c) = &run.calibration {
        out.add_json(gate_calibration_name(kind), c)?;
    }
    Ok(out)
}

pub fn resources(cfg: &RunConfig) -> Result<OutputSet> {
    let rows = pipeline::resource_table(&cfg.resources.m_values)?;
    let mut csv = Csv::new(&[
        "m",
        "n_xx",
        "depth_parallel",
        "depth_sequential",
        "constructive_n_xx",
        "constructive_depth_parallel",
        "constructive_depth_sequential",
        "matched",
    ]);
    for r in &rows {
        csv.row(&[
            r.m.to_string(),
            r.closed_form.n_xx.to_string(),
            r.closed_form.depth_parallel.to_string(),
            r.closed_form.depth_sequential.to_string(),
            r.constructive.n_xx.to_string(),
            r.constructive.depth_parallel.to_string(),
            r.constructive.depth_sequential.to_string(),
            r.matched.to_string(),
        ]);
    }
    let mut out = OutputSet::new();
    out.add(RESOURCES_CSV, csv.into_string());
    Ok(out)
}
