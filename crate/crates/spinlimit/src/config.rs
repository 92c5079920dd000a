//! Experiment settings: a flat `key = value` file overlaid by command-line
//! flags.
//!
//! ```text
//! # fig1.conf
//! j = 5, 10, 20, 30
//! mu = 1
//! t_final = 10
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use spinlimit_core::{HamiltonianParams, IntegratorConfig, PhasePoint, Scheme, SpinSize};

use crate::error::{AppError, AppResult};

/// Every key understood in a settings file.
pub const KEYS: &[&str] = &[
    "j",
    "epsilon",
    "lambda",
    "mu",
    "theta",
    "phi",
    "q0",
    "p0",
    "t_final",
    "samples",
    "step",
    "scheme",
    "energy_tolerance",
    "out",
    "svg",
    "seed",
    "short_window",
    "alphas",
    "thetas",
    "grids",
    "engine",
];

const INITIAL_KEYS: [&str; 4] = ["theta", "phi", "q0", "p0"];

/// Raw `key = value` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    entries: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> AppResult<Self> {
        let mut settings = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(AppError::config(format!("line {}: expected `key = value`", n + 1)));
            };
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(AppError::config(format!("line {}: unknown key `{key}`", n + 1)));
            }
            if settings.entries.contains_key(&key) {
                return Err(AppError::config(format!("line {}: duplicate key `{key}`", n + 1)));
            }
            settings.entries.insert(key, value.trim().to_string());
        }
        Ok(settings)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Settings::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "unknown key {key}");
        self.entries.insert(key.to_string(), value.into());
    }

    /// `self` with every entry of `flags` on top. An initial condition given
    /// in `flags` replaces the one in `self` as a whole.
    pub fn overlay(mut self, flags: &Settings) -> Settings {
        if INITIAL_KEYS.iter().any(|k| flags.entries.contains_key(*k)) {
            for k in INITIAL_KEYS {
                self.entries.remove(k);
            }
        }
        for (k, v) in &flags.entries {
            self.entries.insert(k.clone(), v.clone());
        }
        self
    }

    fn parsed<T: FromStr>(&self, key: &str) -> AppResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| AppError::config(format!("`{key}`: cannot parse `{v}`: {e}"))))
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> AppResult<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        let items = v
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().map_err(|e| AppError::config(format!("`{key}`: cannot parse `{s}`: {e}"))))
            .collect::<AppResult<Vec<T>>>()?;
        if items.is_empty() {
            return Err(AppError::config(format!("`{key}` must not be empty")));
        }
        Ok(Some(items))
    }
}

/// Starting point of the sphere flows; quantum runs start from the coherent
/// state at the same point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// `q0 = 0, p0 = √(2J)` on the equator; the `fig1` default.
    Equator,
    Angles {
        theta: f64,
        phi: f64,
    },
    Canonical {
        q0: f64,
        p0: f64,
    },
}

impl InitialCondition {
    pub fn canonical(&self, spin: SpinSize) -> AppResult<(f64, f64)> {
        let (q, p) = match *self {
            InitialCondition::Equator => (0.0, (2.0 * spin.j()).sqrt()),
            InitialCondition::Angles { theta, phi } => PhasePoint::new(theta, phi)?.to_canonical(spin),
            InitialCondition::Canonical { q0, p0 } => (q0, p0),
        };
        let bound = 4.0 * spin.j();
        if !(q * q + p * p < bound - 1e-9 * spin.j()) {
            return Err(AppError::config(format!(
                "initial point (q, p) = ({q}, {p}) is not strictly inside the disk q² + p² < {bound} for J = {spin}"
            )));
        }
        Ok((q, p))
    }

    pub fn phase_point(&self, spin: SpinSize) -> AppResult<PhasePoint> {
        let (q, p) = self.canonical(spin)?;
        Ok(PhasePoint::from_canonical(q, p, spin)?)
    }
}

/// Which engine `evolve` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Reduced,
    Classical,
    /// Spectral propagation of the full state.
    Exact,
    /// Schrödinger flow integrated in real coordinates.
    Real,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reduced" => Ok(Engine::Reduced),
            "classical" => Ok(Engine::Classical),
            "exact" => Ok(Engine::Exact),
            "real" => Ok(Engine::Real),
            other => Err(format!("unknown engine `{other}` (reduced, classical, exact, real)")),
        }
    }
}

fn parse_scheme(s: &str) -> AppResult<Scheme> {
    match s.trim().to_ascii_lowercase().as_str() {
        "rk4" | "runge-kutta" | "runge_kutta" => Ok(Scheme::RungeKutta4),
        "midpoint" => Ok(Scheme::Midpoint),
        other => Err(AppError::config(format!("unknown scheme `{other}` (rk4, midpoint)"))),
    }
}

fn parse_bool(key: &str, s: &str) -> AppResult<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(AppError::config(format!("`{key}`: expected a boolean, got `{other}`"))),
    }
}

/// `n` evenly spaced values covering `[0, π]`.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| PI * k as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Sorted ascending, without duplicates.
    pub j_list: Vec<SpinSize>,
    pub params: HamiltonianParams,
    pub t_final: f64,
    pub n_samples: usize,
    pub initial: InitialCondition,
    pub integrator: IntegratorConfig,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
    pub seed: u64,
    /// Window `[0, short_window]` for the exact-vs-reduced deviation.
    pub short_window: f64,
    /// Opening angles for the overlap scan.
    pub alphas: Vec<f64>,
    /// Polar angles for the moment-factorization scan.
    pub thetas: Vec<f64>,
    /// Quadrature sizes for the identity check.
    pub grids: Vec<usize>,
    pub engine: Engine,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            j_list: [10, 20, 40, 60].map(|t| SpinSize::from_two_j(t).expect("valid spin")).to_vec(),
            params: HamiltonianParams::default(),
            t_final: 10.0,
            n_samples: 1001,
            initial: InitialCondition::Equator,
            integrator: IntegratorConfig::default(),
            output_dir: PathBuf::from("out"),
            emit_svg: false,
            seed: 0,
            short_window: 0.5,
            alphas: angle_grid(13),
            thetas: angle_grid(9),
            grids: vec![2, 4, 8, 16, 32, 64],
            engine: Engine::Reduced,
        }
    }
}

impl ExperimentConfig {
    /// `base` with every key present in `settings` applied, then validated.
    pub fn from_settings(settings: &Settings, base: ExperimentConfig) -> AppResult<Self> {
        let mut cfg = base;
        if let Some(js) = settings.list::<SpinSize>("j")? {
            cfg.j_list = js;
        }
        if let Some(v) = settings.parsed("epsilon")? {
            cfg.params.epsilon = v;
        }
        if let Some(v) = settings.parsed("lambda")? {
            cfg.params.lambda = v;
        }
        if let Some(v) = settings.parsed("mu")? {
            cfg.params.mu = v;
        }
        cfg.initial = match (
            settings.parsed::<f64>("theta")?,
            settings.parsed::<f64>("phi")?,
            settings.parsed::<f64>("q0")?,
            settings.parsed::<f64>("p0")?,
        ) {
            (None, None, None, None) => cfg.initial,
            (Some(theta), Some(phi), None, None) => InitialCondition::Angles { theta, phi },
            (None, None, Some(q0), Some(p0)) => InitialCondition::Canonical { q0, p0 },
            (Some(_), None, None, None) | (None, Some(_), None, None) => {
                return Err(AppError::config("`theta` and `phi` must be given together"))
            }
            (None, None, Some(_), None) | (None, None, None, Some(_)) => {
                return Err(AppError::config("`q0` and `p0` must be given together"))
            }
            _ => return Err(AppError::config("give either (theta, phi) or (q0, p0), not both")),
        };
        if let Some(v) = settings.parsed("t_final")? {
            cfg.t_final = v;
        }
        if let Some(v) = settings.parsed("samples")? {
            cfg.n_samples = v;
        }
        if let Some(v) = settings.parsed("step")? {
            cfg.integrator.step = v;
        }
        if let Some(v) = settings.get("scheme") {
            cfg.integrator.scheme = parse_scheme(v)?;
        }
        if let Some(v) = settings.parsed("energy_tolerance")? {
            cfg.integrator.energy_tolerance = v;
        }
        if let Some(v) = settings.get("out") {
            cfg.output_dir = PathBuf::from(v);
        }
        if let Some(v) = settings.get("svg") {
            cfg.emit_svg = parse_bool("svg", v)?;
        }
        if let Some(v) = settings.parsed("seed")? {
            cfg.seed = v;
        }
        if let Some(v) = settings.parsed("short_window")? {
            cfg.short_window = v;
        }
        if let Some(v) = settings.list("alphas")? {
            cfg.alphas = v;
        }
        if let Some(v) = settings.list("thetas")? {
            cfg.thetas = v;
        }
        if let Some(v) = settings.list("grids")? {
            cfg.grids = v;
        }
        if let Some(v) = settings.parsed("engine")? {
            cfg.engine = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the invariants and normalizes `j_list` (sorted, deduplicated).
    pub fn validate(&mut self) -> AppResult<()> {
        self.j_list.sort();
        self.j_list.dedup();
        if self.j_list.is_empty() {
            return Err(AppError::config("at least one J is required"));
        }
        self.params.validate()?;
        self.integrator.validate()?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(AppError::config("`t_final` must be positive and finite"));
        }
        if self.n_samples < 2 {
            return Err(AppError::config("`samples` must be at least 2"));
        }
        if !(self.short_window > 0.0) {
            return Err(AppError::config("`short_window` must be positive"));
        }
        if let InitialCondition::Angles { theta, phi } = self.initial {
            PhasePoint::new(theta, phi)?;
        }
        for &spin in &self.j_list {
            self.initial.canonical(spin)?;
        }
        if self.alphas.iter().any(|a| !(0.0..=PI).contains(a)) {
            return Err(AppError::config("`alphas` must lie in [0, pi]"));
        }
        if self.thetas.iter().any(|t| !(0.0..=PI).contains(t)) {
            return Err(AppError::config("`thetas` must lie in [0, pi]"));
        }
        if self.grids.iter().any(|&n| n < 2) {
            return Err(AppError::config("`grids` sizes must be at least 2"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_lists_and_booleans() {
        let s = Settings::parse("# header\nj = 5, 5/2 # two spins\nsvg = yes\n\nt-final = 3\n").unwrap();
        let cfg = ExperimentConfig::from_settings(&s, ExperimentConfig::default()).unwrap();
        assert_eq!(cfg.j_list, vec![SpinSize::from_two_j(5).unwrap(), SpinSize::from_two_j(10).unwrap()]);
        assert!(cfg.emit_svg);
        assert_eq!(cfg.t_final, 3.0);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Settings::parse("j 5").is_err());
        assert!(Settings::parse("colour = red").is_err());
        assert!(Settings::parse("mu = 1\nmu = 2").is_err());
        let s = Settings::parse("mu = one").unwrap();
        assert!(ExperimentConfig::from_settings(&s, ExperimentConfig::default()).is_err());
    }

    #[test]
    fn flags_replace_the_whole_initial_condition() {
        let file = Settings::parse("theta = 1\nphi = 2\nmu = 3").unwrap();
        let mut flags = Settings::default();
        flags.set("q0", "0.5");
        flags.set("p0", "0.5");
        let merged = file.overlay(&flags);
        let cfg = ExperimentConfig::from_settings(&merged, ExperimentConfig::default()).unwrap();
        assert_eq!(cfg.initial, InitialCondition::Canonical { q0: 0.5, p0: 0.5 });
        assert_eq!(cfg.params.mu, 3.0);
    }

    #[test]
    fn initial_condition_must_be_complete_and_unique() {
        for text in ["theta = 1", "p0 = 1", "theta = 1\nphi = 0\nq0 = 0\np0 = 1"] {
            let s = Settings::parse(text).unwrap();
            assert!(ExperimentConfig::from_settings(&s, ExperimentConfig::default()).is_err(), "{text}");
        }
        let off_disk = Settings::parse("q0 = 10\np0 = 0").unwrap();
        assert!(ExperimentConfig::from_settings(&off_disk, ExperimentConfig::default()).is_err());
    }

    #[test]
    fn invariants_are_enforced() {
        for text in ["samples = 1", "t_final = 0", "j = ", "step = -1", "grids = 1", "alphas = 4"] {
            let s = Settings::parse(text).unwrap();
            assert!(ExperimentConfig::from_settings(&s, ExperimentConfig::default()).is_err(), "{text}");
        }
    }
}
