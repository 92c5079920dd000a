//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use spinlimit_core::SpinSize;

use crate::config::{ExperimentConfig, Settings};
use crate::error::{AppError, AppResult};
use crate::experiments::{
    evolve, run_exact_comparison, run_fig1, run_identity_check, run_moment_error_scan, run_overlap_scan,
    ComparisonReport,
};
use crate::table::format_float;

#[derive(Debug, Parser)]
#[command(name = "spinlimit", version, about = "Quantum, coarse-grained and classical spin-J dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduced vs classical flow for each J (default J = 5, 10, 20, 30).
    Fig1(CommonArgs),
    /// Adds exact quantum evolution and the constraint Φ(t) to `fig1`.
    CompareExact(CommonArgs),
    /// Coherent-state overlaps against cos^{2J}(α/2).
    OverlapScan(CommonArgs),
    /// Factorization error of ⟨Jz²⟩ on coherent states and its slope in J.
    MomentError(CommonArgs),
    /// Resolution of identity residual under grid refinement.
    IdentityCheck(CommonArgs),
    /// A single trajectory per J with the chosen engine.
    Evolve(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Comma-separated spins, e.g. `5,10` or `5/2,7/2`.
    #[arg(long, value_name = "LIST")]
    pub j: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Initial polar angle (with --phi).
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Initial canonical point (with --p0).
    #[arg(long, allow_negative_numbers = true)]
    pub q0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Largest integrator step.
    #[arg(long, allow_negative_numbers = true)]
    pub step: Option<f64>,
    /// `rk4` or `midpoint`.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Allowed energy drift per unit time, relative to the energy scale.
    #[arg(long, allow_negative_numbers = true)]
    pub energy_tolerance: Option<f64>,
    /// Window for the exact-vs-reduced deviation in `compare-exact`.
    #[arg(long, allow_negative_numbers = true)]
    pub short_window: Option<f64>,
    /// Opening angles for `overlap-scan` (radians, comma-separated).
    #[arg(long, value_name = "LIST")]
    pub alphas: Option<String>,
    /// Polar angles for `moment-error` (radians, comma-separated).
    #[arg(long, value_name = "LIST")]
    pub thetas: Option<String>,
    /// Quadrature sizes for `identity-check`.
    #[arg(long, value_name = "LIST")]
    pub grids: Option<String>,
    /// `reduced`, `classical`, `exact` or `real` (for `evolve`).
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
    /// Settings file (`key = value` per line); flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for randomized utilities.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl CommonArgs {
    /// The flags that were given, as settings entries.
    pub fn to_settings(&self) -> Settings {
        let mut s = Settings::default();
        let mut put = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                s.set(key, v);
            }
        };
        put("j", self.j.clone());
        put("epsilon", self.epsilon.map(|v| v.to_string()));
        put("lambda", self.lambda.map(|v| v.to_string()));
        put("mu", self.mu.map(|v| v.to_string()));
        put("theta", self.theta.map(|v| v.to_string()));
        put("phi", self.phi.map(|v| v.to_string()));
        put("q0", self.q0.map(|v| v.to_string()));
        put("p0", self.p0.map(|v| v.to_string()));
        put("t_final", self.t_final.map(|v| v.to_string()));
        put("samples", self.samples.map(|v| v.to_string()));
        put("step", self.step.map(|v| v.to_string()));
        put("scheme", self.scheme.clone());
        put("energy_tolerance", self.energy_tolerance.map(|v| v.to_string()));
        put("short_window", self.short_window.map(|v| v.to_string()));
        put("alphas", self.alphas.clone());
        put("thetas", self.thetas.clone());
        put("grids", self.grids.clone());
        put("engine", self.engine.clone());
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("svg", self.svg.then(|| "true".to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        s
    }

    /// Settings file (if any) overlaid with the flags, on top of `base`.
    pub fn resolve(&self, base: ExperimentConfig) -> AppResult<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        ExperimentConfig::from_settings(&file.overlay(&self.to_settings()), base)
    }
}

fn spins(two_js: &[u32]) -> Vec<SpinSize> {
    two_js.iter().map(|&t| SpinSize::from_two_j(t).expect("valid spin")).collect()
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Fig1(a)
            | Command::CompareExact(a)
            | Command::OverlapScan(a)
            | Command::MomentError(a)
            | Command::IdentityCheck(a)
            | Command::Evolve(a) => a,
        }
    }

    /// Defaults before the settings file and flags are applied.
    pub fn base_config(&self) -> ExperimentConfig {
        let d = ExperimentConfig::default();
        match self {
            Command::Fig1(_) | Command::CompareExact(_) => d,
            Command::OverlapScan(_) => ExperimentConfig { j_list: spins(&[1, 2, 10, 20, 50]), ..d },
            Command::MomentError(_) => ExperimentConfig { j_list: spins(&[10, 20, 40, 80, 160]), ..d },
            Command::IdentityCheck(_) => {
                ExperimentConfig { j_list: spins(&[1, 10, 20]), grids: vec![2, 4, 8, 16, 32, 64, 128], ..d }
            }
            Command::Evolve(_) => ExperimentConfig { j_list: spins(&[10]), ..d },
        }
    }

    pub fn config(&self) -> AppResult<ExperimentConfig> {
        self.args().resolve(self.base_config())
    }
}

fn comparison_summary(report: &ComparisonReport) -> String {
    let mut out = String::new();
    for r in &report.rows {
        let _ = write!(
            out,
            "J = {:>6}  max |Jz_red - Jz_cl|/J = {}",
            r.spin.to_string(),
            format_float(r.max_abs_deviation)
        );
        if let (Some(q), Some(c)) = (r.quantum_deviation, r.constraint_drift) {
            let _ = write!(out, "  quantum_deviation = {}  max phi = {}", format_float(q), format_float(c));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "wrote {} files", report.files.len());
    out
}

/// Runs a parsed command and returns the text printed on success.
pub fn execute(command: &Command) -> AppResult<String> {
    let cfg = command.config()?;
    let mut out = String::new();
    match command {
        Command::Fig1(_) => out = comparison_summary(&run_fig1(&cfg)?),
        Command::CompareExact(_) => out = comparison_summary(&run_exact_comparison(&cfg)?),
        Command::OverlapScan(_) => {
            let r = run_overlap_scan(&cfg)?;
            let _ = writeln!(out, "{} rows, max discrepancy = {}", r.scan.table.len(), format_float(r.max_discrepancy));
        }
        Command::MomentError(_) => {
            let r = run_moment_error_scan(&cfg)?;
            for (theta, slope) in &r.slopes {
                let _ = writeln!(out, "theta = {theta:.6}  slope = {slope:.6}");
            }
        }
        Command::IdentityCheck(_) => {
            let r = run_identity_check(&cfg)?;
            for (spin, residuals) in &r.residuals {
                for (n, res) in cfg.grids.iter().zip(residuals) {
                    let _ = writeln!(out, "J = {spin}  {n} x {n}  residual = {res:.3e}");
                }
            }
            let _ = writeln!(out, "non-increasing under refinement: {}", r.refinement_is_monotone());
        }
        Command::Evolve(_) => {
            for run in evolve(&cfg)? {
                let last = run.trajectory.last().expect("at least two samples");
                let _ = writeln!(
                    out,
                    "J = {}  Jz(t_final) = {}  max energy drift = {:.3e}  -> {}",
                    run.spin,
                    format_float(last.jz()),
                    run.trajectory.max_energy_drift(),
                    run.file.display()
                );
            }
        }
    }
    Ok(out)
}

/// Parses `args` (including the program name), runs the command, prints the
/// outcome and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { AppError::config("").exit_code() } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
