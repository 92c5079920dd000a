//! The experiments behind the command-line subcommands.
//!
//! Each `run_*` function computes its results, writes CSV (and optionally
//! SVG) files under `config.output_dir`, and returns an in-memory report.
//! Runs for different `J` are independent and execute on scoped threads;
//! output is assembled in ascending `J` so files do not depend on thread
//! timing.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinlimit_core::coherent::{coherent_overlap, coherent_state, identity_resolution_residual};
use spinlimit_core::dynamics::{exact_propagate, integrate_flow, schrodinger_real_flow};
use spinlimit_core::spin::{build_hamiltonian, expectation};
use spinlimit_core::{Error, FlowKind, PhasePoint, SpinOperators, SpinSize, Trajectory};

use crate::config::{Engine, ExperimentConfig};
use crate::error::{AppError, AppResult};
use crate::svg::{line_plot, Series, Stroke};
use crate::table::{Cell, Table};

/// Largest Hilbert-space dimension accepted for dense propagation.
pub const MAX_DENSE_DIM: usize = 4097;

/// Slack on `|J_z| ≤ J` when checking emitted rows.
const BOUND_SLACK: f64 = 1e-9;

/// Residuals below this are round-off; refinement is not required to
/// lower them further.
pub const RESIDUAL_FLOOR: f64 = 1e-13;

/// `5` or `5_2` (for `J = 5/2`), for file names.
pub fn spin_label(spin: SpinSize) -> String {
    spin.to_string().replace('/', "_")
}

fn spin_cell(spin: SpinSize) -> Cell {
    Cell::Text(spin.j().to_string())
}

fn ensure_dir(dir: &Path) -> AppResult<()> {
    fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> AppResult<()> {
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// Runs `job` for every `J` concurrently; results come back in `J` order
/// and the first failure (in that order) wins.
fn per_spin<T: Send>(spins: &[SpinSize], job: impl Fn(SpinSize) -> AppResult<T> + Sync) -> AppResult<Vec<T>> {
    let job = &job;
    thread::scope(|scope| {
        let handles: Vec<_> = spins.iter().map(|&spin| scope.spawn(move || job(spin))).collect();
        handles.into_iter().map(|h| h.join().expect("experiment worker panicked")).collect()
    })
}

fn check_bounds(traj: &Trajectory, spin: SpinSize) -> AppResult<()> {
    let j = spin.j();
    for s in traj.samples() {
        let (q, p) = s.canonical().unwrap_or((f64::NAN, f64::NAN));
        let on_disk = s.canonical().is_none_or(|(q, p)| q * q + p * p <= 4.0 * j * (1.0 + 1e-12));
        if !(on_disk && s.jz().abs() <= j * (1.0 + BOUND_SLACK)) {
            return Err(AppError::Numerical(Error::OffDiskExcursion { t: s.t, q, p }));
        }
    }
    Ok(())
}

/// Per-`J` summary of a comparison run.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub spin: SpinSize,
    /// `max_t |J_z^reduced − J_z^classical| / J`.
    pub max_abs_deviation: f64,
    /// `max_t |J_z^exact − J_z^reduced| / J` over `[0, short_window]`.
    pub quantum_deviation: Option<f64>,
    /// `max_t Φ(t)` of the exact evolution.
    pub constraint_drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// Ascending in `J`.
    pub rows: Vec<DeviationRow>,
    /// Every file written, in write order.
    pub files: Vec<PathBuf>,
}

impl ComparisonReport {
    pub fn table(&self) -> Table {
        let exact = self.rows.iter().any(|r| r.quantum_deviation.is_some());
        let mut header = vec!["j", "max_abs_deviation"];
        if exact {
            header.extend(["quantum_deviation", "constraint_drift"]);
        }
        let mut t = Table::new(header);
        for r in &self.rows {
            let mut row = vec![spin_cell(r.spin), r.max_abs_deviation.into()];
            if exact {
                row.push(r.quantum_deviation.unwrap_or(f64::NAN).into());
                row.push(r.constraint_drift.unwrap_or(f64::NAN).into());
            }
            t.push(row);
        }
        t
    }

    pub fn deviations(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.max_abs_deviation).collect()
    }
}

struct SphereRun {
    reduced: Trajectory,
    classical: Trajectory,
}

fn sphere_runs(cfg: &ExperimentConfig, spin: SpinSize) -> AppResult<SphereRun> {
    let (q0, p0) = cfg.initial.canonical(spin)?;
    let run = |kind| integrate_flow(kind, q0, p0, &cfg.params, spin, &cfg.integrator, cfg.t_final, cfg.n_samples);
    let reduced = run(FlowKind::Reduced)?;
    let classical = run(FlowKind::Classical)?;
    check_bounds(&reduced, spin)?;
    check_bounds(&classical, spin)?;
    Ok(SphereRun { reduced, classical })
}

fn max_scaled_gap(a: &[f64], b: &[f64], scale: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / scale).fold(0.0, f64::max)
}

struct SpinOutput {
    row: DeviationRow,
    table: Table,
    svg: Option<String>,
}

fn plot(spin: SpinSize, t: &[f64], curves: &[(&str, &[f64], Stroke, &str)]) -> String {
    let series: Vec<Series<'_>> =
        curves.iter().map(|&(label, y, stroke, colour)| Series { label, x: t, y, stroke, colour }).collect();
    line_plot(&format!("J = {spin}"), "t", "J_z/J", &series)
}

fn normalized(v: &[f64], j: f64) -> Vec<f64> {
    v.iter().map(|x| x / j).collect()
}

fn write_outputs(cfg: &ExperimentConfig, prefix: &str, outputs: Vec<SpinOutput>) -> AppResult<ComparisonReport> {
    ensure_dir(&cfg.output_dir)?;
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for out in outputs {
        let label = spin_label(out.row.spin);
        let csv = cfg.output_dir.join(format!("{prefix}_J{label}.csv"));
        out.table.write(&csv)?;
        files.push(csv);
        if let Some(svg) = out.svg {
            let path = cfg.output_dir.join(format!("{prefix}_J{label}.svg"));
            write_text(&path, &svg)?;
            files.push(path);
        }
        rows.push(out.row);
    }
    let mut report = ComparisonReport { rows, files };
    let path = cfg.output_dir.join(format!("{prefix}_report.csv"));
    report.table().write(&path)?;
    report.files.push(path);
    Ok(report)
}

/// Reduced and classical flows side by side for every `J`.
///
/// Writes `fig1_J<j>.csv` (`t, jz_reduced, jz_classical, jz_reduced_norm,
/// jz_classical_norm`), optional `fig1_J<j>.svg`, and `fig1_report.csv`.
pub fn run_fig1(cfg: &ExperimentConfig) -> AppResult<ComparisonReport> {
    let outputs = per_spin(&cfg.j_list, |spin| {
        let run = sphere_runs(cfg, spin)?;
        let j = spin.j();
        let t = run.reduced.times();
        let (zr, zc) = (run.reduced.jz(), run.classical.jz());
        let (nr, nc) = (normalized(&zr, j), normalized(&zc, j));
        let mut table = Table::new(["t", "jz_reduced", "jz_classical", "jz_reduced_norm", "jz_classical_norm"]);
        for k in 0..t.len() {
            table.push(vec![t[k].into(), zr[k].into(), zc[k].into(), nr[k].into(), nc[k].into()]);
        }
        let svg = cfg.emit_svg.then(|| {
            plot(spin, &t, &[("reduced", &nr, Stroke::Dotted, "#c0392b"), ("classical", &nc, Stroke::Thick, "#1f3a5f")])
        });
        let row = DeviationRow {
            spin,
            max_abs_deviation: max_scaled_gap(&zr, &zc, j),
            quantum_deviation: None,
            constraint_drift: None,
        };
        Ok(SpinOutput { row, table, svg })
    })?;
    write_outputs(cfg, "fig1", outputs)
}

/// As [`run_fig1`] plus exact Schrödinger evolution from the coherent state
/// at the same initial point.
///
/// Writes `compare_exact_J<j>.csv` (`t, jz_reduced, jz_classical, jz_exact,
/// jz_reduced_norm, jz_classical_norm, phi_exact`), optional SVG, and
/// `compare_exact_report.csv`.
pub fn run_exact_comparison(cfg: &ExperimentConfig) -> AppResult<ComparisonReport> {
    if let Some(big) = cfg.j_list.iter().find(|s| s.dim() > MAX_DENSE_DIM) {
        return Err(AppError::config(format!(
            "J = {big} needs dimension {} > {MAX_DENSE_DIM} for dense propagation",
            big.dim()
        )));
    }
    let outputs = per_spin(&cfg.j_list, |spin| {
        let run = sphere_runs(cfg, spin)?;
        let ops = SpinOperators::new(spin);
        let h = build_hamiltonian(&cfg.params, &ops);
        let psi0 = coherent_state(spin, &cfg.initial.phase_point(spin)?);
        let exact = exact_propagate(&h, &psi0, &ops, cfg.t_final, cfg.n_samples)?;
        check_bounds(&exact, spin)?;

        let j = spin.j();
        let t = run.reduced.times();
        let (zr, zc, ze) = (run.reduced.jz(), run.classical.jz(), exact.jz());
        let phi: Vec<f64> = exact.samples().iter().map(|s| s.phi_constraint.unwrap_or(f64::NAN)).collect();
        let (nr, nc) = (normalized(&zr, j), normalized(&zc, j));
        let mut table = Table::new([
            "t",
            "jz_reduced",
            "jz_classical",
            "jz_exact",
            "jz_reduced_norm",
            "jz_classical_norm",
            "phi_exact",
        ]);
        for k in 0..t.len() {
            table.push(vec![
                t[k].into(),
                zr[k].into(),
                zc[k].into(),
                ze[k].into(),
                nr[k].into(),
                nc[k].into(),
                phi[k].into(),
            ]);
        }
        let window = cfg.short_window * (1.0 + 1e-12);
        let quantum = t
            .iter()
            .zip(ze.iter().zip(&zr))
            .filter(|(&tk, _)| tk <= window)
            .map(|(_, (e, r))| (e - r).abs() / j)
            .fold(0.0, f64::max);
        let svg = cfg.emit_svg.then(|| {
            let ne = normalized(&ze, j);
            plot(
                spin,
                &t,
                &[
                    ("exact", &ne, Stroke::Solid, "#27ae60"),
                    ("reduced", &nr, Stroke::Dotted, "#c0392b"),
                    ("classical", &nc, Stroke::Thick, "#1f3a5f"),
                ],
            )
        });
        let row = DeviationRow {
            spin,
            max_abs_deviation: max_scaled_gap(&zr, &zc, j),
            quantum_deviation: Some(quantum),
            constraint_drift: exact.max_constraint(),
        };
        Ok(SpinOutput { row, table, svg })
    })?;
    write_outputs(cfg, "compare_exact", outputs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub table: Table,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    pub scan: ScanReport,
    pub max_discrepancy: f64,
}

/// A uniformly random unit vector and a unit vector orthogonal to it.
fn random_frame(rng: &mut impl Rng) -> ([f64; 3], [f64; 3]) {
    let z: f64 = rng.random_range(-1.0..1.0);
    let a: f64 = rng.random_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    let n = [s * a.cos(), s * a.sin(), z];
    // Any vector not parallel to n, then Gram–Schmidt.
    let helper = if n[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = {
        let d = helper[0] * n[0] + helper[1] * n[1] + helper[2] * n[2];
        let v = [helper[0] - d * n[0], helper[1] - d * n[1], helper[2] - d * n[2]];
        let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / l, v[1] / l, v[2] / l]
    };
    let e2 = [n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]];
    let b: f64 = rng.random_range(0.0..TAU);
    let u = [b.cos() * e1[0] + b.sin() * e2[0], b.cos() * e1[1] + b.sin() * e2[1], b.cos() * e1[2] + b.sin() * e2[2]];
    (n, u)
}

/// `|⟨Ω|Ω′⟩|` against `cos^{2J}(α/2)` for randomly oriented pairs at each
/// opening angle `α`. The orientation comes from `config.seed`.
///
/// Writes `overlap_scan.csv` (`j, alpha, overlap, closed_form, discrepancy`).
pub fn run_overlap_scan(cfg: &ExperimentConfig) -> AppResult<OverlapReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = Table::new(["j", "alpha", "overlap", "closed_form", "discrepancy"]);
    let mut worst = 0.0_f64;
    for &spin in &cfg.j_list {
        for &alpha in &cfg.alphas {
            let (n, u) = random_frame(&mut rng);
            let (sa, ca) = alpha.sin_cos();
            let m = [ca * n[0] + sa * u[0], ca * n[1] + sa * u[1], ca * n[2] + sa * u[2]];
            let a = PhasePoint::from_direction(n)?;
            let b = PhasePoint::from_direction(m)?;
            let overlap = coherent_overlap(&a, &b, spin).norm();
            let closed = (0.5 * alpha).cos().abs().powi(spin.two_j() as i32);
            let gap = (overlap - closed).abs();
            worst = worst.max(gap);
            table.push(vec![spin_cell(spin), alpha.into(), overlap.into(), closed.into(), gap.into()]);
        }
    }
    ensure_dir(&cfg.output_dir)?;
    let path = cfg.output_dir.join("overlap_scan.csv");
    table.write(&path)?;
    Ok(OverlapReport { scan: ScanReport { table, files: vec![path] }, max_discrepancy: worst })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub scan: ScanReport,
    /// `(θ, slope of ln error against ln J)` for every `θ` with non-zero
    /// error.
    pub slopes: Vec<(f64, f64)>,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Factorization error of `Ĵz²` on coherent states,
/// `|⟨Ĵz²⟩ − ⟨Ĵz⟩²| / J²`, computed with dense matrices; the prediction is
/// `sin²θ / (2J)`.
///
/// Writes `moment_error.csv` (`j, theta, jz2_expectation,
/// jz_expectation_squared, error_norm, predicted`) and
/// `moment_error_slopes.csv` (`theta, slope`).
pub fn run_moment_error_scan(cfg: &ExperimentConfig) -> AppResult<MomentReport> {
    let per_j = per_spin(&cfg.j_list, |spin| {
        let ops = SpinOperators::new(spin);
        let jz2 = ops.jz() * ops.jz();
        let j = spin.j();
        cfg.thetas
            .iter()
            .map(|&theta| {
                let omega = coherent_state(spin, &PhasePoint::new(theta, 0.0)?);
                let second = expectation(&jz2, &omega)?;
                let first = expectation(ops.jz(), &omega)?;
                let error = (second - first * first).abs() / (j * j);
                Ok((theta, second, first * first, error, theta.sin().powi(2) / (2.0 * j)))
            })
            .collect::<AppResult<Vec<_>>>()
    })?;

    let mut table = Table::new(["j", "theta", "jz2_expectation", "jz_expectation_squared", "error_norm", "predicted"]);
    for (spin, rows) in cfg.j_list.iter().zip(&per_j) {
        for &(theta, second, first_sq, error, predicted) in rows {
            table.push(vec![
                spin_cell(*spin),
                theta.into(),
                second.into(),
                first_sq.into(),
                error.into(),
                predicted.into(),
            ]);
        }
    }

    let mut slopes = Vec::new();
    let mut slope_table = Table::new(["theta", "slope"]);
    if cfg.j_list.len() >= 2 {
        let ln_j: Vec<f64> = cfg.j_list.iter().map(|s| s.j().ln()).collect();
        for (k, &theta) in cfg.thetas.iter().enumerate() {
            let errors: Vec<f64> = per_j.iter().map(|rows| rows[k].3).collect();
            // At the poles the error vanishes identically (up to round-off).
            if errors.iter().any(|&e| e <= 1e-12) {
                continue;
            }
            let ln_e: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
            let slope = fit_slope(&ln_j, &ln_e);
            slopes.push((theta, slope));
            slope_table.push(vec![theta.into(), slope.into()]);
        }
    }

    ensure_dir(&cfg.output_dir)?;
    let path = cfg.output_dir.join("moment_error.csv");
    table.write(&path)?;
    let slope_path = cfg.output_dir.join("moment_error_slopes.csv");
    slope_table.write(&slope_path)?;
    Ok(MomentReport { scan: ScanReport { table, files: vec![path, slope_path] }, slopes })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub scan: ScanReport,
    /// Per `J`: residuals in the order of `config.grids`.
    pub residuals: Vec<(SpinSize, Vec<f64>)>,
}

impl IdentityReport {
    /// Whether each residual sequence is non-increasing down to
    /// [`RESIDUAL_FLOOR`].
    pub fn refinement_is_monotone(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.windows(2).all(|w| w[1] <= w[0].max(RESIDUAL_FLOOR)))
    }
}

/// Residual of the coherent-state resolution of identity on square
/// `n × n` grids.
///
/// Writes `identity_check.csv` (`j, n_theta, n_phi, residual`).
pub fn run_identity_check(cfg: &ExperimentConfig) -> AppResult<IdentityReport> {
    let residuals = per_spin(&cfg.j_list, |spin| {
        let r = cfg
            .grids
            .iter()
            .map(|&n| identity_resolution_residual(spin, n, n).map_err(AppError::from))
            .collect::<AppResult<Vec<f64>>>()?;
        Ok((spin, r))
    })?;
    let mut table = Table::new(["j", "n_theta", "n_phi", "residual"]);
    for (spin, r) in &residuals {
        for (&n, &res) in cfg.grids.iter().zip(r) {
            table.push(vec![spin_cell(*spin), n.into(), n.into(), res.into()]);
        }
    }
    ensure_dir(&cfg.output_dir)?;
    let path = cfg.output_dir.join("identity_check.csv");
    table.write(&path)?;
    Ok(IdentityReport { scan: ScanReport { table, files: vec![path] }, residuals })
}

#[derive(Debug, Clone)]
pub struct EvolveRun {
    pub spin: SpinSize,
    pub trajectory: Trajectory,
    pub file: PathBuf,
}

fn engine_name(engine: Engine) -> &'static str {
    match engine {
        Engine::Reduced => "reduced",
        Engine::Classical => "classical",
        Engine::Exact => "exact",
        Engine::Real => "real",
    }
}

/// One trajectory per `J` with the configured engine.
///
/// Writes `evolve_<engine>_J<j>.csv`: `t, q, p, jx, jy, jz, energy` for the
/// sphere flows and `t, jx, jy, jz, energy, phi` for the quantum engines.
pub fn evolve(cfg: &ExperimentConfig) -> AppResult<Vec<EvolveRun>> {
    let quantum = matches!(cfg.engine, Engine::Exact | Engine::Real);
    if quantum {
        if let Some(big) = cfg.j_list.iter().find(|s| s.dim() > MAX_DENSE_DIM) {
            return Err(AppError::config(format!("J = {big} is too large for dense propagation")));
        }
    }
    let trajectories = per_spin(&cfg.j_list, |spin| {
        let traj = match cfg.engine {
            Engine::Reduced | Engine::Classical => {
                let kind = if cfg.engine == Engine::Reduced { FlowKind::Reduced } else { FlowKind::Classical };
                let (q0, p0) = cfg.initial.canonical(spin)?;
                integrate_flow(kind, q0, p0, &cfg.params, spin, &cfg.integrator, cfg.t_final, cfg.n_samples)?
            }
            Engine::Exact | Engine::Real => {
                let ops = SpinOperators::new(spin);
                let h = build_hamiltonian(&cfg.params, &ops);
                let psi0 = coherent_state(spin, &cfg.initial.phase_point(spin)?);
                if cfg.engine == Engine::Exact {
                    exact_propagate(&h, &psi0, &ops, cfg.t_final, cfg.n_samples)?
                } else {
                    schrodinger_real_flow(&h, &psi0, &ops, &cfg.integrator, cfg.t_final, cfg.n_samples)?
                }
            }
        };
        check_bounds(&traj, spin)?;
        Ok(traj)
    })?;

    ensure_dir(&cfg.output_dir)?;
    let mut runs = Vec::new();
    for (&spin, trajectory) in cfg.j_list.iter().zip(trajectories) {
        let mut table = if quantum {
            Table::new(["t", "jx", "jy", "jz", "energy", "phi"])
        } else {
            Table::new(["t", "q", "p", "jx", "jy", "jz", "energy"])
        };
        for s in trajectory.samples() {
            let mut row: Vec<Cell> = vec![s.t.into()];
            if let Some((q, p)) = s.canonical() {
                row.extend([q.into(), p.into()]);
            }
            row.extend([s.j[0].into(), s.j[1].into(), s.j[2].into(), s.energy.into()]);
            if let Some(phi) = s.phi_constraint {
                row.push(phi.into());
            }
            table.push(row);
        }
        let file = cfg.output_dir.join(format!("evolve_{}_J{}.csv", engine_name(cfg.engine), spin_label(spin)));
        table.write(&file)?;
        runs.push(EvolveRun { spin, trajectory, file });
    }
    Ok(runs)
}
