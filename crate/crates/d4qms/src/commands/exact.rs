use std::path::Path;

use d4qms_core::analysis::{grid_dist, qpe_distortion_model, LevelWeighting};
use d4qms_core::circuits::{plaquette_basis_change, standard_links, trotter_evolution, QpeGrid, TrotterParams};
use d4qms_core::gauge::{thermal_reference, EnergyLevel, ExactSpectrum, GaugeModel, PlaquetteId};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{write_csv, write_json};
use crate::circuit_json::circuit_to_json;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

pub const MODELS_FILE: &str = "models.json";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteReference {
    pub plaquette: String,
    /// `(p_-2, p_0, p_+2)`.
    pub probs: [f64; 3],
    pub trace: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalRow {
    pub beta: f64,
    pub mean_energy: f64,
    pub plaquettes: Vec<PlaquetteReference>,
}

/// QPE-distortion prediction and GridDist for one grid and inverse temperature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridModel {
    pub qubits: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub beta: f64,
    pub masses: Vec<f64>,
    pub distorted_levels: Vec<f64>,
    pub distorted_weights: Vec<f64>,
    pub mean_energy: f64,
    pub grid_dist: f64,
    pub grid_dist_multiplicity: f64,
}

impl GridModel {
    pub fn grid(&self) -> CliResult<QpeGrid> {
        Ok(QpeGrid::new(self.qubits, self.e_min, self.e_max)?)
    }
}

/// Everything `analyze` needs from `exact`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactModels {
    pub inv_coupling: f64,
    pub levels: Vec<Level>,
    pub thermal: Vec<ThermalRow>,
    pub models: Vec<GridModel>,
}

impl ExactModels {
    pub fn compute(cfg: &RunConfig) -> CliResult<Self> {
        let model = GaugeModel::new(cfg.chain.hamiltonian);
        let spectrum = ExactSpectrum::compute(&model)?;
        let levels = spectrum.levels().to_vec();
        let thermal = cfg
            .betas
            .iter()
            .map(|&beta| {
                let plaquettes = PlaquetteId::ALL
                    .iter()
                    .map(|&id| {
                        let r = thermal_reference(&model, &spectrum, id, beta);
                        PlaquetteReference {
                            plaquette: crate::config::plaquette_name(Some(id)).to_string(),
                            probs: r.plaquette_probs,
                            trace: r.plaquette_trace,
                        }
                    })
                    .collect();
                ThermalRow {
                    beta,
                    mean_energy: spectrum.mean_energy(beta),
                    plaquettes,
                }
            })
            .collect();
        let (e_min, e_max) = (cfg.chain.grid.e_min(), cfg.chain.grid.e_max());
        let mut models = Vec::new();
        for &q in &cfg.exact_qubits {
            let grid = QpeGrid::new(q, e_min, e_max)?;
            for &beta in &cfg.betas {
                let m = qpe_distortion_model(&levels, &grid, beta);
                models.push(GridModel {
                    qubits: q,
                    e_min,
                    e_max,
                    beta,
                    masses: m.grid_masses,
                    distorted_levels: m.distorted_levels,
                    distorted_weights: m.weights,
                    mean_energy: m.mean_energy,
                    grid_dist: grid_dist(&levels, &grid, beta, LevelWeighting::Distinct),
                    grid_dist_multiplicity: grid_dist(&levels, &grid, beta, LevelWeighting::Multiplicity),
                });
            }
        }
        Ok(Self {
            inv_coupling: cfg.chain.hamiltonian.inv_coupling(),
            levels: levels
                .iter()
                .map(|l| Level {
                    energy: l.energy,
                    multiplicity: l.multiplicity,
                })
                .collect(),
            thermal,
            models,
        })
    }

    pub fn energy_levels(&self) -> Vec<EnergyLevel> {
        self.levels
            .iter()
            .map(|l| EnergyLevel {
                energy: l.energy,
                multiplicity: l.multiplicity,
            })
            .collect()
    }

    pub fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MODELS_FILE);
        let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
        serde_json::from_str(&text).map_err(CliError::json(&path))
    }
}

/// Spectrum, thermal references, QPE-distortion tables, GridDist and a few circuits.
pub fn cmd_exact(cfg: &RunConfig, out: &Path) -> CliResult<RunManifest> {
    std::fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut manifest = RunManifest::new("exact", cfg.chain.seed, cfg.snapshot());
    manifest.save(out)?;
    let ex = ExactModels::compute(cfg)?;

    write_csv(
        &out.join("spectrum.csv"),
        &["level", "energy", "multiplicity"],
        ex.levels
            .iter()
            .enumerate()
            .map(|(k, l)| vec![k.to_string(), l.energy.to_string(), l.multiplicity.to_string()]),
    )?;
    write_json(&out.join("thermal.json"), &ex.thermal)?;
    write_json(&out.join(MODELS_FILE), &ex)?;
    write_csv(
        &out.join("qped.csv"),
        &["qubits", "beta", "site", "energy", "mass"],
        ex.models.iter().flat_map(|m| {
            let grid = QpeGrid::new(m.qubits, m.e_min, m.e_max).expect("validated grid");
            m.masses
                .iter()
                .enumerate()
                .map(move |(j, p)| {
                    vec![
                        m.qubits.to_string(),
                        m.beta.to_string(),
                        j.to_string(),
                        grid.energy(j).to_string(),
                        p.to_string(),
                    ]
                })
                .collect::<Vec<_>>()
        }),
    )?;
    write_csv(
        &out.join("griddist.csv"),
        &["qubits", "beta", "grid_dist", "grid_dist_multiplicity", "mean_energy_qped"],
        ex.models.iter().map(|m| {
            vec![
                m.qubits.to_string(),
                m.beta.to_string(),
                m.grid_dist.to_string(),
                m.grid_dist_multiplicity.to_string(),
                m.mean_energy.to_string(),
            ]
        }),
    )?;

    let model = GaugeModel::new(cfg.chain.hamiltonian);
    let links = standard_links(model.lattice().num_links());
    let unit = trotter_evolution(
        model.lattice(),
        cfg.chain.hamiltonian,
        cfg.chain.grid.unit_time(),
        TrotterParams { steps: 1 },
        &links,
        &[],
    )?;
    let mut circuits = serde_json::Map::new();
    circuits.insert("trotter_step".into(), circuit_to_json(&unit));
    for id in PlaquetteId::ALL {
        let c = plaquette_basis_change(model.lattice(), id, &links)?;
        let name = format!("plaquette_basis_change_{}", crate::config::plaquette_name(Some(id)));
        circuits.insert(name, circuit_to_json(&c));
    }
    write_json(&out.join("circuits.json"), &json!(circuits))?;

    manifest.outputs = ["spectrum.csv", "thermal.json", MODELS_FILE, "qped.csv", "griddist.csv", "circuits.json"]
        .map(String::from)
        .to_vec();
    manifest.finish();
    manifest.save(out)?;
    Ok(manifest)
}
