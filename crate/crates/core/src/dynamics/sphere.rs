//! Hamiltonian flows on the disk chart `(q, p)` of the sphere.
//!
//! With `ρ = q² + p²` and `r = √(4J − ρ)` the two Hamilton's functions are
//!
//! ```text
//! H     = (ε/2)(ρ − 2J) − λ (q/2) r + μ [ (ρ − 2J)²/4 + ρ(4J − ρ)/(8J) ]
//! H_cl  = (ε/2)(ρ − 2J) − λ (q/2) r + μ (ρ − 2J)²/4
//! ```
//!
//! The first is `⟨Ω|Ĥ|Ω⟩` exactly; the second drops the `O(1/J)` variance of
//! `Ĵz` from the quadratic term.

// Unused whenever std is linked and its inherent f64 methods take over.
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::integrator::{drive, TimeGrid};
use super::{check_drift, IntegratorConfig, Sample, SampleState, Trajectory};
use crate::coherent::{canonical_expectations, representative_coherent};
use crate::error::{Error, Result};
use crate::spin::{HamiltonianParams, SpinOperators, SpinSize, StateVector};

/// Which Hamilton's function drives a flow on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowKind {
    /// `⟨Ω|Ĥ|Ω⟩`, the coarse-grained constrained dynamics.
    Reduced,
    /// `H(⟨Ĵx⟩, ⟨Ĵy⟩, ⟨Ĵz⟩)`.
    Classical,
}

impl FlowKind {
    fn correction_weight(self) -> f64 {
        match self {
            FlowKind::Reduced => 1.0,
            FlowKind::Classical => 0.0,
        }
    }
}

fn disk_radius_sq(q: f64, p: f64, spin: SpinSize) -> Result<f64> {
    let bound = 4.0 * spin.j();
    let rho = q * q + p * p;
    // Same slack as the chart functions so north-pole round-off is accepted.
    if !(rho <= bound * (1.0 + 1e-12)) {
        return Err(Error::OffDisk { q, p, bound });
    }
    Ok(rho)
}

fn hamiltonian(kind: FlowKind, q: f64, p: f64, params: &HamiltonianParams, spin: SpinSize) -> Result<f64> {
    let rho = disk_radius_sq(q, p, spin)?;
    let j = spin.j();
    let r = (4.0 * j - rho).max(0.0).sqrt();
    let jz = 0.5 * (rho - 2.0 * j);
    let correction = kind.correction_weight() * rho * (4.0 * j - rho) / (8.0 * j);
    Ok(params.epsilon * jz - params.lambda * 0.5 * q * r + params.mu * (jz * jz + correction))
}

/// `⟨Ω(q, p)|Ĥ|Ω(q, p)⟩`.
pub fn reduced_hamiltonian(q: f64, p: f64, params: &HamiltonianParams, spin: SpinSize) -> Result<f64> {
    hamiltonian(FlowKind::Reduced, q, p, params, spin)
}

/// The reduced Hamiltonian without the `μ ρ(4J − ρ)/(8J)` term.
pub fn classical_hamiltonian(q: f64, p: f64, params: &HamiltonianParams, spin: SpinSize) -> Result<f64> {
    hamiltonian(FlowKind::Classical, q, p, params, spin)
}

/// `(q̇, ṗ) = (∂H/∂p, −∂H/∂q)`.
///
/// The `√(4J − ρ)` term is singular on the disk boundary, so points with
/// `ρ ≥ 4J − 1e-9 J` are rejected.
pub fn flow_rhs(kind: FlowKind, q: f64, p: f64, params: &HamiltonianParams, spin: SpinSize) -> Result<(f64, f64)> {
    let rho = disk_radius_sq(q, p, spin)?;
    let j = spin.j();
    let margin = 1e-9 * j;
    let s = 4.0 * j - rho;
    if !(s > margin) {
        return Err(Error::NearBoundary { q, p, margin });
    }
    let r = s.sqrt();
    // d/dρ of the bracketed μ term, times 2 (from dρ/dq = 2q).
    let quartic = rho - 2.0 * j;
    let correction = kind.correction_weight() * (4.0 * j - 2.0 * rho) / (4.0 * j);
    let radial = params.epsilon + params.mu * (quartic + correction);
    let dh_dq = radial * q - params.lambda * (0.5 * r - 0.5 * q * q / r);
    let dh_dp = radial * p + params.lambda * 0.5 * q * p / r;
    Ok((dh_dp, -dh_dq))
}

/// `H` written on the sphere `|v| = J` of mean spins.
fn vector_hamiltonian(kind: FlowKind, v: &[f64], params: &HamiltonianParams, j: f64) -> f64 {
    let w = kind.correction_weight();
    params.epsilon * v[2] - params.lambda * v[0] + params.mu * (v[2] * v[2] + w * (j * j - v[2] * v[2]) / (2.0 * j))
}

/// `v̇ = ∇H × v`, the same flow as [`flow_rhs`] but regular at the pole
/// `q² + p² = 4J` where the disk chart degenerates.
fn vector_rhs(kind: FlowKind, v: &[f64], params: &HamiltonianParams, j: f64, out: &mut [f64]) {
    let w = kind.correction_weight();
    let g = [-params.lambda, 0.0, params.epsilon + params.mu * (2.0 * v[2] - w * v[2] / j)];
    out[0] = g[1] * v[2] - g[2] * v[1];
    out[1] = g[2] * v[0] - g[0] * v[2];
    out[2] = g[0] * v[1] - g[1] * v[0];
}

/// Disk coordinates of the mean-spin vector `v` (`|v| = J` assumed).
fn vector_to_canonical(v: &[f64], j: f64) -> (f64, f64) {
    let radius = (2.0 * (j + v[2])).max(0.0).sqrt();
    let transverse = v[0].hypot(v[1]);
    if transverse == 0.0 {
        return (radius, 0.0);
    }
    (radius * v[0] / transverse, -radius * v[1] / transverse)
}

/// Fixed-step integration of the chosen flow from `(q0, p0)`.
///
/// The flow is advanced as `v̇ = ∇H × v` for `v = (⟨Ĵx⟩, ⟨Ĵy⟩, ⟨Ĵz⟩)` and
/// mapped back to `(q, p)` at every sample, so orbits through the pole
/// `q² + p² = 4J` are followed. Fails if `|v|` leaves `J` by more than a
/// relative `1e-6` (nothing is projected back) or if the energy drift
/// exceeds `config.drift_allowance(t_final, params.energy_scale(spin))`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_flow(
    kind: FlowKind,
    q0: f64,
    p0: f64,
    params: &HamiltonianParams,
    spin: SpinSize,
    config: &IntegratorConfig,
    t_final: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    params.validate()?;
    config.validate()?;
    let grid = TimeGrid::new(t_final, n_samples)?;
    flow_rhs(kind, q0, p0, params, spin)?;
    let e0 = hamiltonian(kind, q0, p0, params, spin)?;
    let scale = params.energy_scale(spin);
    let j = spin.j();

    let mut samples = Vec::with_capacity(n_samples);
    let mut y = canonical_expectations(q0, p0, spin)?;
    let rhs = |_: f64, v: &[f64], out: &mut [f64]| -> Result<()> {
        vector_rhs(kind, v, params, j, out);
        Ok(())
    };
    let observe = |_: usize, t: f64, v: &[f64]| -> Result<()> {
        let (q, p) = vector_to_canonical(v, j);
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !((norm / j - 1.0).abs() <= 1e-6) {
            return Err(Error::OffDiskExcursion { t, q, p });
        }
        let energy = vector_hamiltonian(kind, v, params, j);
        check_drift(config, t_final, scale, t, e0, energy)?;
        let state = SampleState::Canonical { q, p };
        samples.push(Sample { t, state, j: [v[0], v[1], v[2]], energy, phi_constraint: None });
        Ok(())
    };
    drive(&mut y, grid, config, rhs, observe)?;
    Ok(Trajectory::new(samples, scale))
}

/// `H_tot(ψ) = H(Ω_ψ)`: the reduced Hamiltonian at the coherent
/// representative of `ψ`'s equivalence class.
pub fn total_hamiltonian_value(psi: &StateVector, params: &HamiltonianParams, ops: &SpinOperators) -> Result<f64> {
    params.validate()?;
    let (point, _) = representative_coherent(psi, ops)?;
    let (q, p) = point.to_canonical(ops.spin());
    reduced_hamiltonian(q, p, params, ops.spin())
}
