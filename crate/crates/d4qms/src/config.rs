//! Flat `key = value` configuration files.
//!
//! Lines may carry `#` comments. Keys are the field names of `ChainConfig`, `QpeGrid` and
//! `KdeParams`, plus a few run-level settings. Unset keys take the library defaults, with
//! `m_tol` and `retherm_steps` following `beta`, `qubits` and `plaquette` when left out.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use d4qms_core::analysis::{KdeParams, ResampleParams, ResampleScheme};
use d4qms_core::circuits::{EvolutionMode, QpeGrid, TrotterParams};
use d4qms_core::gauge::{HamiltonianSpec, PlaquetteId};
use d4qms_core::qms::{default_m_tol, BackendKind, ChainConfig};

use crate::error::{CliError, CliResult};

/// Every key the parser accepts.
pub const KEYS: &[&str] = &[
    "beta",
    "inv_coupling",
    "qubits",
    "e_min",
    "e_max",
    "trotter_steps",
    "therm_steps",
    "retherm_steps",
    "m_tol",
    "max_revert_iters",
    "move_probs",
    "theta",
    "wilson_length",
    "seed",
    "samples",
    "plaquette",
    "max_restarts",
    "backend",
    "residual_every",
    "chains",
    "bandwidth",
    "points",
    "block_size",
    "resamples",
    "scheme",
    "betas",
    "exact_qubits",
];

/// Energy register widths accepted without `--override-qe-limit`.
pub const QUBIT_RANGE: std::ops::RangeInclusive<usize> = 3..=7;

/// Parsed configuration for all three subcommands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub chain: ChainConfig,
    pub chains: usize,
    /// `None` selects the grid-spacing rule.
    pub bandwidth: Option<f64>,
    pub points: usize,
    pub resample: ResampleParams,
    /// Inverse temperatures tabulated by `exact`.
    pub betas: Vec<f64>,
    /// Energy register widths tabulated by `exact`.
    pub exact_qubits: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_text("").expect("empty config is valid")
    }
}

fn bad(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("key `{key}`: {reason}"))
}

fn parse<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| bad(key, format!("cannot parse `{value}` as {}", std::any::type_name::<T>())))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> CliResult<Vec<T>> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

fn parse_array<const N: usize>(key: &str, value: &str) -> CliResult<[f64; N]> {
    let v: Vec<f64> = parse_list(key, value)?;
    v.try_into().map_err(|v: Vec<f64>| bad(key, format!("expected {N} values, got {}", v.len())))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn plaquette_name(p: Option<PlaquetteId>) -> &'static str {
    match p {
        None => "none",
        Some(PlaquetteId::Left) => "left",
        Some(PlaquetteId::Right) => "right",
    }
}

pub fn backend_name(b: BackendKind) -> &'static str {
    match b {
        BackendKind::Spectral => "spectral",
        BackendKind::Circuit(EvolutionMode::Exact) => "exact",
        BackendKind::Circuit(EvolutionMode::Trotter(_)) => "trotter",
    }
}

fn scheme_name(s: ResampleScheme) -> &'static str {
    match s {
        ResampleScheme::Bootstrap => "bootstrap",
        ResampleScheme::Jackknife => "jackknife",
    }
}

fn snapshot_text(map: &BTreeMap<String, String>) -> String {
    map.iter()
        .filter(|(k, v)| !(k.as_str() == "bandwidth" && v.as_str() == "grid"))
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

/// Split text into `(line, key, value)` triples, rejecting unknown and repeated keys.
fn entries(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::Config(format!("line {}: unknown key `{k}`", n + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: key `{k}` set twice", n + 1)));
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_text(text: &str) -> CliResult<Self> {
        let mut e = entries(text)?;
        let mut take = |k: &str| e.remove(k);

        let beta = take("beta").map(|v| parse("beta", &v)).transpose()?.unwrap_or(1e-7);
        let qubits = take("qubits").map(|v| parse("qubits", &v)).transpose()?.unwrap_or(3);
        let e_min = take("e_min")
            .map(|v| parse("e_min", &v))
            .transpose()?
            .unwrap_or(QpeGrid::DEFAULT_MIN);
        let e_max = take("e_max")
            .map(|v| parse("e_max", &v))
            .transpose()?
            .unwrap_or(QpeGrid::DEFAULT_MAX);
        let grid = QpeGrid::new(qubits, e_min, e_max).map_err(|err| bad("qubits/e_min/e_max", err))?;
        let mut c = ChainConfig::new(beta, grid);
        if let Some(v) = take("inv_coupling") {
            c.hamiltonian = HamiltonianSpec::new(parse("inv_coupling", &v)?).map_err(|err| bad("inv_coupling", err))?;
        }
        if let Some(v) = take("trotter_steps") {
            c.trotter = TrotterParams::new(parse("trotter_steps", &v)?).map_err(|err| bad("trotter_steps", err))?;
        }
        if let Some(v) = take("plaquette") {
            let id = match v.to_ascii_lowercase().as_str() {
                "none" => None,
                "left" => Some(PlaquetteId::Left),
                "right" => Some(PlaquetteId::Right),
                _ => return Err(bad("plaquette", format!("expected none, left or right, got `{v}`"))),
            };
            if let Some(id) = id {
                c = c.with_plaquette(id);
            }
        }
        if let Some(v) = take("backend") {
            c.backend = match v.to_ascii_lowercase().as_str() {
                "spectral" => BackendKind::Spectral,
                "exact" => BackendKind::Circuit(EvolutionMode::Exact),
                "trotter" => BackendKind::Circuit(EvolutionMode::Trotter(c.trotter)),
                _ => return Err(bad("backend", format!("expected spectral, exact or trotter, got `{v}`"))),
            };
        }
        macro_rules! set {
            ($($key:literal => $field:expr),* $(,)?) => {
                $(if let Some(v) = take($key) {
                    $field = parse($key, &v)?;
                })*
            };
        }
        set! {
            "therm_steps" => c.therm_steps,
            "retherm_steps" => c.retherm_steps,
            "max_revert_iters" => c.max_revert_iters,
            "seed" => c.seed,
            "samples" => c.samples,
            "max_restarts" => c.max_restarts,
            "residual_every" => c.residual_every,
            "wilson_length" => c.wilson_length,
        }
        c.m_tol = match take("m_tol") {
            Some(v) => parse("m_tol", &v)?,
            None => default_m_tol(beta, qubits),
        };
        if let Some(v) = take("move_probs") {
            c.move_probs = parse_array("move_probs", &v)?;
        }
        if let Some(v) = take("theta") {
            c.theta = parse_array("theta", &v)?;
        }
        c.validate().map_err(|err| CliError::Config(err.to_string()))?;

        let mut out = RunConfig {
            chain: c,
            chains: 1,
            bandwidth: None,
            points: KdeParams::DEFAULT_POINTS,
            resample: ResampleParams::default(),
            betas: vec![1e-7, 0.1, 0.5],
            exact_qubits: QUBIT_RANGE.collect(),
        };
        set! {
            "chains" => out.chains,
            "points" => out.points,
            "block_size" => out.resample.block_size,
            "resamples" => out.resample.resamples,
        }
        if let Some(v) = take("bandwidth") {
            out.bandwidth = Some(parse("bandwidth", &v)?);
        }
        if let Some(v) = take("scheme") {
            out.resample.scheme = match v.to_ascii_lowercase().as_str() {
                "bootstrap" => ResampleScheme::Bootstrap,
                "jackknife" => ResampleScheme::Jackknife,
                _ => return Err(bad("scheme", format!("expected bootstrap or jackknife, got `{v}`"))),
            };
        }
        if let Some(v) = take("betas") {
            out.betas = parse_list("betas", &v)?;
        }
        if let Some(v) = take("exact_qubits") {
            out.exact_qubits = parse_list("exact_qubits", &v)?;
        }
        debug_assert!(e.is_empty(), "every key handled: {e:?}");
        out.validate()?;
        Ok(out)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|err| CliError::Config(format!("cannot read {}: {err}", path.display())))?;
        Self::from_text(&text)
    }

    fn validate(&self) -> CliResult<()> {
        if self.chains == 0 {
            return Err(bad("chains", "must be at least 1"));
        }
        if self.points < 2 {
            return Err(bad("points", "need at least 2 evaluation points"));
        }
        if self.bandwidth.is_some_and(|b| !(b > 0.0)) {
            return Err(bad("bandwidth", "must be positive"));
        }
        if self.resample.block_size == 0 {
            return Err(bad("block_size", "must be at least 1"));
        }
        if self.resample.resamples == 0 {
            return Err(bad("resamples", "must be at least 1"));
        }
        if self.betas.iter().any(|b| !(*b >= 0.0 && b.is_finite())) {
            return Err(bad("betas", "must be finite and non-negative"));
        }
        Ok(())
    }

    /// Reject energy registers outside 3..=7 unless overridden.
    pub fn check_qubit_limit(&self, override_limit: bool) -> CliResult<()> {
        if override_limit {
            return Ok(());
        }
        let q = self.chain.grid.qubits();
        if !QUBIT_RANGE.contains(&q) {
            return Err(bad("qubits", format!("{q} outside the supported range 3..=7 (use --override-qe-limit)")));
        }
        if let Some(q) = self.exact_qubits.iter().find(|q| !QUBIT_RANGE.contains(q)) {
            return Err(bad(
                "exact_qubits",
                format!("{q} outside the supported range 3..=7 (use --override-qe-limit)"),
            ));
        }
        Ok(())
    }

    /// KDE settings for a grid, honoring an explicit bandwidth.
    pub fn kde_params(&self, grid: &QpeGrid) -> KdeParams {
        let mut p = match self.bandwidth {
            Some(b) => KdeParams::with_bandwidth(grid, b),
            None => KdeParams::for_grid(grid),
        };
        if self.points != p.points.len() {
            let lo = p.points[0];
            let hi = p.points[p.points.len() - 1];
            let n = self.points;
            p.points = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        }
        p.resample = self.resample;
        p
    }

    /// Every effective setting, keyed as in the file.
    pub fn snapshot(&self) -> BTreeMap<&'static str, String> {
        let c = &self.chain;
        let mut m = BTreeMap::new();
        m.insert("beta", c.beta.to_string());
        m.insert("inv_coupling", c.hamiltonian.inv_coupling().to_string());
        m.insert("qubits", c.grid.qubits().to_string());
        m.insert("e_min", c.grid.e_min().to_string());
        m.insert("e_max", c.grid.e_max().to_string());
        m.insert("trotter_steps", c.trotter.steps.to_string());
        m.insert("therm_steps", c.therm_steps.to_string());
        m.insert("retherm_steps", c.retherm_steps.to_string());
        m.insert("m_tol", c.m_tol.to_string());
        m.insert("max_revert_iters", c.max_revert_iters.to_string());
        m.insert("move_probs", join(&c.move_probs));
        m.insert("theta", join(&c.theta));
        m.insert("wilson_length", c.wilson_length.to_string());
        m.insert("seed", c.seed.to_string());
        m.insert("samples", c.samples.to_string());
        m.insert("plaquette", plaquette_name(c.plaquette).to_string());
        m.insert("max_restarts", c.max_restarts.to_string());
        m.insert("backend", backend_name(c.backend).to_string());
        m.insert("residual_every", c.residual_every.to_string());
        m.insert("chains", self.chains.to_string());
        m.insert("bandwidth", self.bandwidth.map_or("grid".to_string(), |b| b.to_string()));
        m.insert("points", self.points.to_string());
        m.insert("block_size", self.resample.block_size.to_string());
        m.insert("resamples", self.resample.resamples.to_string());
        m.insert("scheme", scheme_name(self.resample.scheme).to_string());
        m.insert("betas", join(&self.betas));
        m.insert("exact_qubits", join(&self.exact_qubits));
        m
    }

    /// Inverse of [`RunConfig::snapshot`], as stored in a manifest.
    pub fn from_snapshot(map: &BTreeMap<String, String>) -> CliResult<Self> {
        Self::from_text(&snapshot_text(map))
    }

    /// Config file text that parses back to the same settings.
    pub fn to_text(&self) -> String {
        snapshot_text(&self.snapshot().into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_library() {
        let c = RunConfig::default();
        assert_eq!(c.chain.grid.qubits(), 3);
        assert_eq!(c.chain.therm_steps, 50);
        assert_eq!(c.chain.retherm_steps, 1);
        assert_eq!(c.chain.max_revert_iters, 100);
        assert_eq!(c.resample.resamples, 100);
        assert_eq!(c.exact_qubits, vec![3, 4, 5, 6, 7]);
        assert_eq!(RunConfig::from_text("plaquette = left").unwrap().chain.retherm_steps, 20);
    }

    #[test]
    fn m_tol_follows_beta_and_qubits_unless_set() {
        let c = RunConfig::from_text("beta = 0.5\nqubits = 5").unwrap();
        assert_eq!(c.chain.m_tol, 3);
        let c = RunConfig::from_text("beta = 0.5\nqubits = 5\nm_tol = 0").unwrap();
        assert_eq!(c.chain.m_tol, 0);
        let c = RunConfig::from_text("beta = 0.1\nqubits = 5").unwrap();
        assert_eq!(c.chain.m_tol, 0);
    }

    #[test]
    fn comments_and_whitespace() {
        let c = RunConfig::from_text("# header\n  beta=0.1   # inline\n\nmove_probs = 0.4, 0.2,0.2,0.2\n").unwrap();
        assert_eq!(c.chain.beta, 0.1);
        assert_eq!(c.chain.move_probs, [0.4, 0.2, 0.2, 0.2]);
    }

    #[test]
    fn errors_name_the_key() {
        let msg = |t: &str| RunConfig::from_text(t).unwrap_err().to_string();
        assert!(msg("betta = 1").contains("`betta`"));
        assert!(msg("beta = x").contains("`beta`"));
        assert!(msg("beta = 1\nbeta = 2").contains("set twice"));
        assert!(msg("theta = 1").contains("`theta`"));
        assert!(msg("move_probs = 1,1,1,1").contains("move_probs"));
        assert!(msg("chains = 0").contains("`chains`"));
        assert!(msg("backend = gpu").contains("`backend`"));
        assert!(msg("just a line").contains("line 1"));
    }

    #[test]
    fn qubit_limit() {
        let c = RunConfig::from_text("qubits = 8").unwrap();
        assert_eq!(c.check_qubit_limit(false).unwrap_err().exit_code(), 2);
        assert!(c.check_qubit_limit(true).is_ok());
        assert!(RunConfig::from_text("exact_qubits = 2,3").unwrap().check_qubit_limit(false).is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = RunConfig::from_text(
            "beta = 0.5\nqubits = 5\nplaquette = right\nbackend = trotter\nchains = 4\nbandwidth = 0.3\nscheme = jackknife\nbetas = 0.1,0.2",
        )
        .unwrap();
        assert_eq!(RunConfig::from_text(&c.to_text()).unwrap(), c);
        assert_eq!(RunConfig::from_text(&RunConfig::default().to_text()).unwrap(), RunConfig::default());
    }
}
