//! Schrödinger evolution in the full `(2J+1)`-dimensional Hilbert space.

// Unused whenever std is linked and its inherent f64 methods take over.
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::DVector;
use num_complex::Complex64;

use super::integrator::{drive, TimeGrid};
use super::{check_drift, IntegratorConfig, Sample, SampleState, Trajectory};
use crate::coherent::constraint_phi;
use crate::error::{Error, Result};
use crate::spin::{
    check_operator, operator_norm_bound, quadratic_form, raw_from_real_coords, raw_real_coords, Matrix, SpinOperators,
    StateVector, Vector,
};

/// `exp(−iĤt)` through the eigendecomposition `Ĥ = V diag(E) V†`.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: Matrix,
}

impl SpectralPropagator {
    pub fn new(h: &Matrix) -> Result<Self> {
        check_operator(h, h.nrows())?;
        let eigen = h.clone().try_symmetric_eigen(f64::EPSILON, 0).ok_or(Error::Eigendecomposition)?;
        Ok(SpectralPropagator { eigenvalues: eigen.eigenvalues, eigenvectors: eigen.eigenvectors })
    }

    /// Eigenvalues in the solver's order (not sorted).
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigenvectors
    }

    /// `exp(−iĤt) ψ`.
    pub fn propagate(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.dim() != self.eigenvalues.len() {
            return Err(Error::DimensionMismatch { expected: self.eigenvalues.len(), found: psi.dim() });
        }
        let mut coeffs = self.eigenvectors.ad_mul(psi.amplitudes());
        for (c, &e) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            let (s, co) = (-e * t).sin_cos();
            *c *= Complex64::new(co, s);
        }
        let out = &self.eigenvectors * coeffs;
        let norm_sq = out.norm_squared();
        if !((norm_sq.sqrt() - 1.0).abs() <= 1e-10) {
            return Err(Error::Eigendecomposition);
        }
        Ok(StateVector::from_raw(out))
    }
}

fn quantum_sample(t: f64, psi: StateVector, ops: &SpinOperators, energy: f64) -> Result<Sample> {
    let j = ops.components().map(|op| quadratic_form(op, psi.amplitudes()).re);
    let phi = constraint_phi(&psi, ops)?;
    Ok(Sample { t, state: SampleState::Quantum(psi), j, energy, phi_constraint: Some(phi) })
}

fn check_setup(h: &Matrix, psi0: &StateVector, ops: &SpinOperators) -> Result<()> {
    let d = ops.spin().dim();
    if psi0.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: psi0.dim() });
    }
    check_operator(h, d)?;
    if !((psi0.norm_sq() - 1.0).abs() <= 1e-10) {
        return Err(Error::NotNormalized { norm_sq: psi0.norm_sq() });
    }
    Ok(())
}

/// `ψ(t) = exp(−iĤt) ψ0` on a uniform grid, recording `⟨Ĵ⟩`, `⟨Ĥ⟩` and `Φ`.
///
/// The first sample is `ψ0` itself.
pub fn exact_propagate(
    h: &Matrix,
    psi0: &StateVector,
    ops: &SpinOperators,
    t_final: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    check_setup(h, psi0, ops)?;
    let grid = TimeGrid::new(t_final, n_samples)?;
    let propagator = SpectralPropagator::new(h)?;
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = grid.time(k);
        let psi = if k == 0 { psi0.clone() } else { propagator.propagate(psi0, t)? };
        let energy = quadratic_form(h, psi.amplitudes()).re;
        samples.push(quantum_sample(t, psi, ops, energy)?);
    }
    Ok(Trajectory::new(samples, operator_norm_bound(h)))
}

/// Integrates `ẋ_i = ∂H/∂y_i, ẏ_i = −∂H/∂x_i` with `H(X) = ⟨ψ|Ĥ|ψ⟩` in
/// the real coordinates of the state.
///
/// Recorded energies are the raw quadratic form (the conserved quantity of
/// the flow); `⟨Ĵ⟩` and `Φ` are evaluated on the renormalized state.
pub fn schrodinger_real_flow(
    h: &Matrix,
    psi0: &StateVector,
    ops: &SpinOperators,
    config: &IntegratorConfig,
    t_final: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    check_setup(h, psi0, ops)?;
    config.validate()?;
    let grid = TimeGrid::new(t_final, n_samples)?;
    let n = psi0.dim();
    let s2 = core::f64::consts::SQRT_2;
    let e0 = quadratic_form(h, psi0.amplitudes()).re;
    let scale = operator_norm_bound(h);

    let mut y: Vec<f64> = raw_real_coords(psi0.amplitudes()).as_slice().to_vec();
    let mut hc = Vector::zeros(n);
    let mut c = Vector::zeros(n);
    let rhs = |_: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        for i in 0..n {
            c[i] = Complex64::new(y[i] / s2, y[n + i] / s2);
        }
        h.mul_to(&c, &mut hc);
        for i in 0..n {
            out[i] = s2 * hc[i].im;
            out[n + i] = -s2 * hc[i].re;
        }
        Ok(())
    };
    let mut samples = Vec::with_capacity(n_samples);
    let observe = |k: usize, t: f64, y: &[f64]| -> Result<()> {
        if k == 0 {
            return quantum_sample(0.0, psi0.clone(), ops, e0).map(|s| samples.push(s));
        }
        let raw = raw_from_real_coords(y);
        let energy = quadratic_form(h, &raw).re;
        check_drift(config, t_final, scale, t, e0, energy)?;
        let psi = StateVector::normalized(raw)?;
        samples.push(quantum_sample(t, psi, ops, energy)?);
        Ok(())
    };
    drive(&mut y, grid, config, rhs, observe)?;
    Ok(Trajectory::new(samples, scale))
}
