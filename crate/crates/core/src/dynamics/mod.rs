//! Evolution engines: exact Schrödinger propagation, the reduced flow on
//! the coherent-state sphere, and the classical flow.

mod integrator;
mod quantum;
mod sphere;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::spin::StateVector;

pub use quantum::{exact_propagate, schrodinger_real_flow, SpectralPropagator};
pub use sphere::{
    classical_hamiltonian, flow_rhs, integrate_flow, reduced_hamiltonian, total_hamiltonian_value, FlowKind,
};

/// Fixed-step integration schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Classical fourth-order Runge–Kutta.
    #[default]
    RungeKutta4,
    /// Implicit midpoint rule, solved by fixed-point iteration.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Upper bound on the step size.
    pub step: f64,
    pub scheme: Scheme,
    /// Allowed energy drift per unit time, in units of the Hamiltonian's
    /// energy scale (see [`IntegratorConfig::drift_allowance`]).
    pub energy_tolerance: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { step: 1e-3, scheme: Scheme::RungeKutta4, energy_tolerance: 1e-8 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter("integrator step must be positive and finite"));
        }
        if !(self.energy_tolerance >= 0.0) {
            return Err(Error::InvalidParameter("energy tolerance must be non-negative"));
        }
        Ok(())
    }

    /// Absolute drift allowed over `[0, t_final]` for a Hamiltonian whose
    /// energies are bounded by `scale`: `scale (tol t_final + 1e-13)`.
    ///
    /// The flows oscillate at frequencies of order `μJ`, so with a fixed
    /// step the RK4 energy error grows like a power of `J`; measuring it
    /// against `scale` keeps one tolerance usable across spin sizes.
    pub fn drift_allowance(&self, t_final: f64, scale: f64) -> f64 {
        scale * (self.energy_tolerance * t_final + 1e-13)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleState {
    Canonical { q: f64, p: f64 },
    Quantum(StateVector),
}

/// One recorded instant of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: SampleState,
    /// `(⟨Ĵx⟩, ⟨Ĵy⟩, ⟨Ĵz⟩)`.
    pub j: [f64; 3],
    pub energy: f64,
    /// Only recorded for quantum states.
    pub phi_constraint: Option<f64>,
}

impl Sample {
    pub fn jz(&self) -> f64 {
        self.j[2]
    }

    pub fn canonical(&self) -> Option<(f64, f64)> {
        match self.state {
            SampleState::Canonical { q, p } => Some((q, p)),
            SampleState::Quantum(_) => None,
        }
    }

    pub fn quantum(&self) -> Option<&StateVector> {
        match &self.state {
            SampleState::Quantum(psi) => Some(psi),
            SampleState::Canonical { .. } => None,
        }
    }
}

/// Uniformly sampled time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    energy_scale: f64,
}

impl Trajectory {
    pub(crate) fn new(samples: Vec<Sample>, energy_scale: f64) -> Self {
        Trajectory { samples, energy_scale }
    }

    /// Bound on `|E|` used to judge energy drift.
    pub fn energy_scale(&self) -> f64 {
        self.energy_scale
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn jz(&self) -> Vec<f64> {
        self.samples.iter().map(Sample::jz).collect()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// `max_t |E(t) − E(0)|`.
    pub fn max_energy_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        self.samples.iter().map(|s| (s.energy - first.energy).abs()).fold(0.0, f64::max)
    }

    /// `max_energy_drift / energy_scale`.
    pub fn max_relative_energy_drift(&self) -> f64 {
        let drift = self.max_energy_drift();
        if drift == 0.0 {
            0.0
        } else {
            drift / self.energy_scale
        }
    }

    /// `max_t Φ(t)` for quantum trajectories.
    pub fn max_constraint(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.phi_constraint).try_fold(0.0_f64, |m, phi| phi.map(|v| m.max(v)))
    }
}

/// `t_k = k t_final / (n_samples − 1)`.
pub fn sample_times(t_final: f64, n_samples: usize) -> Result<Vec<f64>> {
    let grid = integrator::TimeGrid::new(t_final, n_samples)?;
    Ok((0..n_samples).map(|k| grid.time(k)).collect())
}

pub(crate) fn check_drift(config: &IntegratorConfig, t_final: f64, scale: f64, t: f64, e0: f64, e: f64) -> Result<()> {
    let drift = (e - e0).abs();
    let tolerance = config.drift_allowance(t_final, scale);
    if !(drift <= tolerance) {
        return Err(Error::EnergyDrift { t, drift, tolerance });
    }
    Ok(())
}
