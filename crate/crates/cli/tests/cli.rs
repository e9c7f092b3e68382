use std::fs;
use std::path::Path;
use std::process::Command as Process;

use clap::Parser;
use qcad_cli::config::RunConfig;
use qcad_cli::output::{sha256_hex, Manifest};
use qcad_cli::{run, Cli};

fn configs_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

fn run_args(args: &[&str]) -> anyhow::Result<Manifest> {
    let mut full = vec!["qcad"];
    full.extend_from_slice(args);
    run(&Cli::try_parse_from(full)?)
}

#[test]
fn default_config_round_trips() {
    let cfg = RunConfig::default().resolved().unwrap();
    let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
    assert_eq!(cfg, back);
}

#[test]
fn sample_configs_parse_and_round_trip() {
    for name in ["single_transmon.toml", "two_transmon.toml", "two_transmon_d8.toml"] {
        let cfg = RunConfig::load(&configs_dir().join(name)).unwrap();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg, "{name}");
    }
}

#[test]
fn unknown_keys_rejected() {
    let err = RunConfig::from_toml("[device]\ntruncation_d = 8\nbogus_key = 1\n").unwrap_err();
    assert!(err.to_string().contains("bogus_key"), "{err}");
    assert!(RunConfig::from_toml("[nonsense]\n").is_err());
}

#[test]
fn validation_errors_name_the_key() {
    let err = RunConfig::from_toml("[dynamics.bitflip]\nsamples = 0\n").unwrap_err().to_string();
    assert!(err.contains("dynamics.bitflip.samples") && err.contains("at least 1 sample required"), "{err}");
    let err = RunConfig::from_toml("[device]\ntruncation_d = 12\n").unwrap_err().to_string();
    assert!(err.contains("device.truncation_d"), "{err}");
    let err = RunConfig::from_toml("[resources]\nm_values = [3]\n").unwrap_err().to_string();
    assert!(err.contains("resources.m_values"), "{err}");
    let err = RunConfig::from_toml("[dynamics.cphase]\nk_list = [20, 10]\n").unwrap_err().to_string();
    assert!(err.contains("dynamics.cphase.k_list"), "{err}");
}

#[test]
fn default_sigma_is_filled_in() {
    let cfg = RunConfig::from_toml("[dynamics.bitflip]\ngate_time_ns = 60.0\n").unwrap();
    assert_eq!(cfg.dynamics.bitflip.sigma_ns, Some(10.0));
}

#[test]
fn manifest_hashes_match_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("res");
    let m = run_args(&["resources", "--out", out.to_str().unwrap()]).unwrap();
    assert_eq!(m.command, "resources");
    assert!(m.version.starts_with('v'));
    for f in &m.files {
        let bytes = fs::read(out.join(&f.path)).unwrap();
        assert_eq!(sha256_hex(&bytes), f.sha256);
        assert_eq!(bytes.len(), f.bytes);
    }
    let resolved = fs::read(out.join("resolved_config.toml")).unwrap();
    assert_eq!(m.config_hash, sha256_hex(&resolved));
    let on_disk: Manifest = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(on_disk, m);
}

#[test]
fn echoed_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[device]\ntruncation_d = 8\n[sweep]\npoints = 3\nlevels = 3\n[variational]\nlevels = 2\nrestarts = 2\n",
    );
    let a = tmp.path().join("a");
    run_args(&["vqd", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap(), "--seed", "7"]).unwrap();
    let b = tmp.path().join("b");
    let echoed = a.join("resolved_config.toml");
    run_args(&["vqd", "--config", echoed.to_str().unwrap(), "--out", b.to_str().unwrap()]).unwrap();
    assert_eq!(fs::read(a.join("vqd.csv")).unwrap(), fs::read(b.join("vqd.csv")).unwrap());
    let reparsed = RunConfig::load(&echoed).unwrap();
    assert_eq!(reparsed.variational.seed, 7);
    assert_eq!(reparsed.dynamics.seed, 7);
}

#[test]
fn identical_runs_give_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[device]\ntruncation_d = 8\n[sweep]\npoints = 4\n[dynamics.bitflip]\nsamples = 20\n");
    for cmd in [vec!["spectrum"], vec!["gate", "bitflip"]] {
        let mut bodies = Vec::new();
        for (i, workers) in ["1", "2"].iter().enumerate() {
            let out = tmp.path().join(format!("{}{i}", cmd.join("_")));
            let mut args = cmd.clone();
            args.extend(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", workers]);
            let m = run_args(&args).unwrap();
            let csv = m.files.iter().find(|f| f.path.ends_with(".csv")).unwrap();
            bodies.push(fs::read(out.join(&csv.path)).unwrap());
        }
        assert_eq!(bodies[0], bodies[1], "{cmd:?}");
    }
}

#[test]
fn zero_sweep_points_give_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[device]\ntruncation_d = 8\n[sweep]\npoints = 0\n");
    let out = tmp.path().join("o");
    run_args(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).unwrap();
    assert_eq!(fs::read_to_string(out.join("spectrum.csv")).unwrap(), "flux,level_index,energy_ghz,label\n");
    run_args(&["vqd", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).unwrap();
    let vqd = fs::read_to_string(out.join("vqd.csv")).unwrap();
    assert_eq!(vqd.lines().count(), 1);
    assert!(vqd.starts_with("flux,level,energy_ghz,exact_energy_ghz,abs_error_ghz,iterations,converged"));
}

#[test]
fn single_level_vqd_has_no_deflation_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[device]\ntruncation_d = 8\n[sweep]\npoints = 2\n[variational]\nlevels = 1\n");
    let out = tmp.path().join("o");
    run_args(&["vqd", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).unwrap();
    let text = fs::read_to_string(out.join("vqd.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "flux,level,energy_ghz,exact_energy_ghz,abs_error_ghz,iterations,converged");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let err: f64 = r.split(',').nth(4).unwrap().parse().unwrap();
        assert!(err < 1e-3, "{r}");
    }
}

#[test]
fn two_transmon_spectrum_has_labels_and_gap() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[device]\ntruncation_d = 4\ncoupling_ff = [0.5]\n\
         [[device.transmons]]\nej_ghz = 22.0\nc_total_ff = 91.0\n\
         [[device.transmons]]\nej_ghz = 19.0\nc_total_ff = 91.0\n\
         [sweep]\npoints = 2\nlevels = 6\n",
    );
    let out = tmp.path().join("o");
    run_args(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).unwrap();
    let text = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(text.starts_with("flux,level_index,energy_ghz,label,gap_11_20_ghz\n"));
    let first: Vec<Vec<&str>> = text.lines().skip(1).take(6).map(|l| l.split(',').collect()).collect();
    let labels: Vec<&str> = first.iter().map(|r| r[3]).collect();
    assert_eq!(&labels[..3], &["00", "01", "10"]);
    assert!(labels.contains(&"11") && labels.contains(&"20"));
    let gap: f64 = first[0][4].parse().unwrap();
    assert!(gap > 0.0);
}

#[test]
fn encode_d2_is_two_terms() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[device]\ntruncation_d = 2\n[encode]\noperators = [\"number\"]\nschemes = [\"gray\"]\n");
    let out = tmp.path().join("o");
    run_args(&["encode", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).unwrap();
    let text = fs::read_to_string(out.join("encode_number_gray.txt")).unwrap();
    let body: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(text.lines().next().unwrap(), "# d=2 scheme=gray qubits=1");
    assert_eq!(body, vec!["-5.000000000000e-1 I", "-5.000000000000e-1 Z"]);
}

#[test]
fn gray_cosine_has_lower_cnot_bound_than_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    run_args(&["encode", "--out", out.to_str().unwrap()]).unwrap();
    let summary = fs::read_to_string(out.join("encode_summary.csv")).unwrap();
    let bound = |scheme: &str| -> usize {
        let row = summary.lines().find(|l| l.starts_with(&format!("cosine,{scheme},"))).unwrap();
        row.split(',').nth(4).unwrap().parse().unwrap()
    };
    assert!(bound("gray") < bound("standard-binary"));
}

#[test]
fn resources_header_only_for_empty_list() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[resources]\nm_values = []\n");
    let out = tmp.path().join("o");
    run_args(&["resources", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).unwrap();
    assert_eq!(fs::read_to_string(out.join("resources.csv")).unwrap().lines().count(), 1);
}

#[test]
fn gate_kind_must_match_device() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let err = run_args(&["gate", "cphase", "--out", out.to_str().unwrap()]).unwrap_err();
    assert!(format!("{err:#}").contains("two-transmon"), "{err:#}");
    let cfg = RunConfig::load(&configs_dir().join("two_transmon_d8.toml")).unwrap();
    let path = write_config(tmp.path(), &cfg.to_toml());
    let err = run_args(&["gate", "bitflip", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]).unwrap_err();
    assert!(format!("{err:#}").contains("single-transmon"), "{err:#}");
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn uncoupled_cphase_calibration_aborts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[device]\ntruncation_d = 4\ncoupling_ff = [0.0]\n\
         [[device.transmons]]\nej_ghz = 22.0\nc_total_ff = 91.0\n\
         [[device.transmons]]\nej_ghz = 19.0\nc_total_ff = 91.0\n",
    );
    let out = tmp.path().join("o");
    let err = run_args(&["gate", "cphase", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).unwrap_err();
    assert!(format!("{err:#}").contains("calibration"), "{err:#}");
}

#[test]
fn cphase_scan_needs_full_above_quick_truncation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[device]\ntruncation_d = 4\ncoupling_ff = [0.5]\n\
         [[device.transmons]]\nej_ghz = 22.0\nc_total_ff = 91.0\n\
         [[device.transmons]]\nej_ghz = 19.0\nc_total_ff = 91.0\n\
         [dynamics.cphase]\nk_list = [100, 200]\nsamples = 10\nquick_max_truncation = 2\nreturn_threshold = 0.0\n",
    );
    let out = tmp.path().join("o");
    run_args(&["gate", "cphase", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).unwrap();
    let scan = fs::read_to_string(out.join("gate_cphase_scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 1);
    let report = fs::read_to_string(out.join("gate_cphase_fidelity.json")).unwrap();
    assert!(report.contains("--full"));
    assert!(out.join("gate_cphase_calibration.json").exists());
    run_args(&["gate", "cphase", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--full"]).unwrap();
    let scan = fs::read_to_string(out.join("gate_cphase_scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 3);
}

#[test]
fn binary_exits_nonzero_on_bad_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[dynamics.bitflip]\nsamples = 0\n");
    let out = Process::new(env!("CARGO_BIN_EXE_qcad"))
        .args(["gate", "bitflip", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("at least 1 sample required"), "{stderr}");
    let ok = Process::new(env!("CARGO_BIN_EXE_qcad"))
        .args(["resources", "--out", tmp.path().join("r").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(ok.status.success());
}
