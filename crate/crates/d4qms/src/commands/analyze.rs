use std::collections::BTreeMap;
use std::path::Path;

use d4qms_core::analysis::{
    d_sup, gibbs_level_weights, histogram_on_grid, kde, resample_error, scalar_observable_error, smeared_density,
    Blocks, StepCdf,
};
use d4qms_core::circuits::QpeGrid;
use d4qms_core::gauge::PLAQUETTE_VALUES;
use d4qms_core::statevector::RngStream;
use serde::{Deserialize, Serialize};

use super::exact::{ExactModels, GridModel, MODELS_FILE};
use super::run::SAMPLES_FILE;
use super::{write_csv, write_json};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::{RunManifest, MANIFEST_FILE};
use crate::records::read_records;

pub const REPORT_FILE: &str = "report.json";

/// Bootstrap stream id, kept apart from chain streams.
const ANALYSIS_STREAM: u64 = u64::MAX - 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsupTriplet {
    pub exact_vs_distorted: f64,
    pub exact_vs_qms: f64,
    pub distorted_vs_qms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteReport {
    pub plaquette: String,
    pub samples: usize,
    /// `(p_-2, p_0, p_+2)`.
    pub probs: [Estimate; 3],
    pub trace: Estimate,
    pub exact_probs: [f64; 3],
    pub exact_trace: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramReport {
    pub energies: Vec<f64>,
    pub masses: Vec<f64>,
    pub errors: Vec<f64>,
    pub qped: Vec<f64>,
}

/// Everything `analyze` derives from one run; also written as `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub run_seed: u64,
    pub run_config: BTreeMap<String, String>,
    pub run_complete: bool,
    pub qubits: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub beta: f64,
    pub samples: usize,
    pub aborted_records: usize,
    pub acceptance_rate: f64,
    pub abort_rate: f64,
    pub d_sup: DsupTriplet,
    pub grid_dist: f64,
    pub grid_dist_multiplicity: f64,
    pub energy: Estimate,
    pub energy_exact: f64,
    pub energy_qped: f64,
    pub kde_bandwidth: f64,
    pub histogram: HistogramReport,
    pub plaquette: Option<PlaquetteReport>,
}

fn describe(q: usize, e_min: f64, e_max: f64, beta: f64) -> String {
    format!("q_e={q} [{e_min}, {e_max}] beta={beta}")
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// The model entry for the run's grid and inverse temperature.
fn matching_model<'m>(ex: &'m ExactModels, run: &RunConfig, exact_dir: &Path) -> CliResult<&'m GridModel> {
    let g = run.chain.grid;
    if !same(ex.inv_coupling, run.chain.hamiltonian.inv_coupling()) {
        return Err(CliError::Input(format!(
            "inv_coupling {} of the run does not match {} in {}",
            run.chain.hamiltonian.inv_coupling(),
            ex.inv_coupling,
            exact_dir.join(MODELS_FILE).display()
        )));
    }
    ex.models
        .iter()
        .find(|m| m.qubits == g.qubits() && same(m.e_min, g.e_min()) && same(m.e_max, g.e_max()) && same(m.beta, run.chain.beta))
        .ok_or_else(|| {
            let available: Vec<String> = ex
                .models
                .iter()
                .map(|m| describe(m.qubits, m.e_min, m.e_max, m.beta))
                .collect();
            CliError::Input(format!(
                "grid mismatch: samples use {}, {} has {}",
                describe(g.qubits(), g.e_min(), g.e_max(), run.chain.beta),
                exact_dir.join(MODELS_FILE).display(),
                available.join("; ")
            ))
        })
}

fn plaquette_report(
    values: &[i8],
    name: &str,
    ex: &ExactModels,
    beta: f64,
    cfg: &RunConfig,
    rng: &RngStream,
) -> CliResult<PlaquetteReport> {
    let blocks = Blocks::new(values.len(), 4, cfg.resample.block_size, |i, out| {
        let c = PLAQUETTE_VALUES.iter().position(|&v| v == values[i] as i32).expect("valid outcome");
        out[c] = 1.0;
        out[3] = values[i] as f64;
    })?;
    let center = blocks.mean();
    let resampled = blocks.resample_means(cfg.resample.scheme, cfg.resample.resamples, rng);
    let err = resample_error(cfg.resample.scheme, &center, &resampled);
    let est = |i: usize| Estimate {
        mean: center[i],
        error: err[i],
    };
    let exact = ex
        .thermal
        .iter()
        .find(|t| same(t.beta, beta))
        .and_then(|t| t.plaquettes.iter().find(|p| p.plaquette == name))
        .ok_or_else(|| CliError::Input(format!("no thermal reference for plaquette {name} at beta={beta}")))?;
    Ok(PlaquetteReport {
        plaquette: name.to_string(),
        samples: values.len(),
        probs: [est(0), est(1), est(2)],
        trace: est(3),
        exact_probs: exact.probs,
        exact_trace: exact.trace,
    })
}

/// Compare the samples of `run_dir` with the exact and QPE-distorted predictions in
/// `exact_dir`, writing `report.json` and plotting curves into `out`.
pub fn cmd_analyze(cfg: &RunConfig, run_dir: &Path, exact_dir: &Path, out: &Path, seed: u64) -> CliResult<Report> {
    let manifest = RunManifest::load(run_dir)?;
    let run = RunConfig::from_snapshot(&manifest.config)?;
    let ex = ExactModels::load(exact_dir)?;
    let model = matching_model(&ex, &run, exact_dir)?;
    let grid: QpeGrid = model.grid()?;
    let beta = run.chain.beta;

    let samples_path = run_dir.join(SAMPLES_FILE);
    let records = read_records(&samples_path)?;
    let kept: Vec<_> = records.iter().filter(|r| !r.aborted).collect();
    if kept.is_empty() {
        return Err(CliError::Input(format!("{} holds no samples", samples_path.display())));
    }
    let energies: Vec<f64> = kept.iter().map(|r| r.energy_value).collect();

    let rng = RngStream::new(seed, ANALYSIS_STREAM);
    let hist = histogram_on_grid(&energies, &grid, &cfg.resample, &rng.fork(1))?;
    let kde_params = cfg.kde_params(&grid);
    let density = kde(&energies, &kde_params, &rng.fork(2))?;
    let (mean, error) = scalar_observable_error(
        &energies,
        cfg.resample.block_size,
        cfg.resample.resamples,
        cfg.resample.scheme,
        &rng.fork(3),
    )?;

    let levels = ex.energy_levels();
    let level_energies: Vec<f64> = levels.iter().map(|l| l.energy).collect();
    let weights = gibbs_level_weights(&levels, beta);
    let sites = grid.energies();
    let cdf_exact = StepCdf::from_masses(&level_energies, &weights)?;
    let cdf_qped = StepCdf::from_masses(&sites, &model.masses)?;
    let cdf_qms = StepCdf::from_samples(&energies)?;

    let plaquettes: Vec<i8> = kept.iter().filter_map(|r| r.plaquette).collect();
    let plaquette = match run.chain.plaquette {
        Some(id) if !plaquettes.is_empty() => Some(plaquette_report(
            &plaquettes,
            crate::config::plaquette_name(Some(id)),
            &ex,
            beta,
            cfg,
            &rng.fork(4),
        )?),
        _ => None,
    };

    let totals = manifest.totals();
    let report = Report {
        run_seed: manifest.seed,
        run_config: manifest.config.clone(),
        run_complete: manifest.complete,
        qubits: grid.qubits(),
        e_min: grid.e_min(),
        e_max: grid.e_max(),
        beta,
        samples: kept.len(),
        aborted_records: records.len() - kept.len(),
        acceptance_rate: totals.accepts as f64 / totals.steps.max(1) as f64,
        abort_rate: totals.aborts as f64 / totals.rejects.max(1) as f64,
        d_sup: DsupTriplet {
            exact_vs_distorted: d_sup(&cdf_exact, &cdf_qped),
            exact_vs_qms: d_sup(&cdf_exact, &cdf_qms),
            distorted_vs_qms: d_sup(&cdf_qped, &cdf_qms),
        },
        grid_dist: model.grid_dist,
        grid_dist_multiplicity: model.grid_dist_multiplicity,
        energy: Estimate { mean, error },
        energy_exact: level_energies.iter().zip(&weights).map(|(e, w)| e * w).sum(),
        energy_qped: model.mean_energy,
        kde_bandwidth: kde_params.bandwidth,
        histogram: HistogramReport {
            energies: sites.clone(),
            masses: hist.values.clone(),
            errors: hist.errors.clone(),
            qped: model.masses.clone(),
        },
        plaquette,
    };

    std::fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut own = RunManifest::new("analyze", seed, cfg.snapshot());
    own.outputs = [REPORT_FILE, "histogram.csv", "kde.csv", "cdf.csv"].map(String::from).to_vec();
    own.config.insert("run_manifest".into(), run_dir.join(MANIFEST_FILE).display().to_string());
    own.config.insert("exact_models".into(), exact_dir.join(MODELS_FILE).display().to_string());
    own.save(out)?;

    write_json(&out.join(REPORT_FILE), &report)?;
    write_csv(
        &out.join("histogram.csv"),
        &["site", "energy", "mass", "error", "qped"],
        (0..grid.size()).map(|j| {
            vec![
                j.to_string(),
                sites[j].to_string(),
                hist.values[j].to_string(),
                hist.errors[j].to_string(),
                model.masses[j].to_string(),
            ]
        }),
    )?;
    let sigma = kde_params.bandwidth;
    let exact_curve = smeared_density(&level_energies, &weights, sigma, &kde_params.points);
    let qped_curve = smeared_density(&sites, &model.masses, sigma, &kde_params.points);
    write_csv(
        &out.join("kde.csv"),
        &["energy", "density", "error", "exact", "qped"],
        kde_params.points.iter().enumerate().map(|(i, y)| {
            vec![
                y.to_string(),
                density.values[i].to_string(),
                density.errors[i].to_string(),
                exact_curve[i].to_string(),
                qped_curve[i].to_string(),
            ]
        }),
    )?;
    let mut xs: Vec<f64> = [cdf_exact.points(), cdf_qped.points(), cdf_qms.points()].concat();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    write_csv(
        &out.join("cdf.csv"),
        &["energy", "qms", "exact", "qped"],
        xs.iter().map(|&x| {
            vec![
                x.to_string(),
                cdf_qms.eval(x).to_string(),
                cdf_exact.eval(x).to_string(),
                cdf_qped.eval(x).to_string(),
            ]
        }),
    )?;
    own.finish();
    own.save(out)?;
    Ok(report)
}
