//! SU(2) coherent states and the sphere Γ they parameterize.
//!
//! Three charts are provided: spherical angles `(θ, φ)`, the canonical disk
//! `(q, p)` with `q² + p² = 2J(1 + cos θ)`, and the stereographic `z`. The
//! canonical chart is oriented so that
//!
//! ```text
//! ⟨Ĵx⟩ =  (q/2) √(4J − q² − p²)
//! ⟨Ĵy⟩ = −(p/2) √(4J − q² − p²)
//! ⟨Ĵz⟩ =  (q² + p² − 2J) / 2
//! ```
//!
//! agree with `J n̂(θ, φ)` for the maximal-weight state along `n̂`. The disk
//! centre is the south pole `θ = π`; its boundary circle collapses to the
//! north pole.

// Unused whenever std is linked and its inherent f64 methods take over.
use alloc::vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spin::{expectation_vector, total_fluctuation, Matrix, SpinOperators, SpinSize, StateVector};

const TAU: f64 = core::f64::consts::TAU;
const PI: f64 = core::f64::consts::PI;

/// Relative slack on `q² + p² ≤ 4J` absorbing round-off at the north pole.
const DISK_SLACK: f64 = 1e-12;

pub(crate) fn wrap_angle(phi: f64) -> f64 {
    let r = phi % TAU;
    let r = if r < 0.0 { r + TAU } else { r };
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A point of the sphere Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    theta: f64,
    phi: f64,
}

impl PhasePoint {
    /// `theta` must lie in `[0, π]`; `phi` is wrapped into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::InvalidParameter("theta must lie in [0, pi] and phi must be finite"));
        }
        Ok(PhasePoint { theta, phi: wrap_angle(phi) })
    }

    /// Point along a non-zero 3-vector.
    pub fn from_direction(v: [f64; 3]) -> Result<Self> {
        let rho = v[0].hypot(v[1]);
        if !(rho > 0.0 || v[2] != 0.0) || !(rho.is_finite() && v[2].is_finite()) {
            return Err(Error::InvalidParameter("direction must be a finite non-zero vector"));
        }
        Ok(PhasePoint { theta: rho.atan2(v[2]), phi: wrap_angle(v[1].atan2(v[0])) })
    }

    pub fn from_canonical(q: f64, p: f64, spin: SpinSize) -> Result<Self> {
        let (theta, phi) = canonical_to_sphere(q, p, spin)?;
        Ok(PhasePoint { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit vector `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Angle between the two directions, in `[0, π]`.
    pub fn angle_to(&self, other: &PhasePoint) -> f64 {
        let (a, b) = (self.direction(), other.direction());
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        sin.atan2(dot)
    }

    pub fn to_canonical(&self, spin: SpinSize) -> (f64, f64) {
        sphere_to_canonical(self.theta, self.phi, spin)
    }

    pub fn stereographic(&self) -> Result<Complex64> {
        stereographic(self.theta, self.phi)
    }
}

/// Records why a state belongs to the class of a given coherent state:
/// `⟨Ĵ⟩_ψ = κ J n̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceWitness {
    pub direction: [f64; 3],
    pub kappa: f64,
}

/// Maximal-weight state along `n̂(θ, φ)`:
/// `c_m = √C(2J, J+m) cos^{J+m}(θ/2) (sin(θ/2) e^{iφ})^{J−m}`.
///
/// The `m = J` amplitude is real and non-negative.
pub fn coherent_state(spin: SpinSize, point: &PhasePoint) -> StateVector {
    let two_j = spin.two_j() as usize;
    let (s, c) = (0.5 * point.theta).sin_cos();
    let (ln_s, ln_c) = (s.ln(), c.ln());
    let mut ln_binom = 0.0;
    let mut amps = DVector::<Complex64>::zeros(two_j + 1);
    for i in 0..=two_j {
        // i = J − m, so the cosine power is 2J − i and the sine power is i.
        if i > 0 {
            ln_binom += ((two_j - i + 1) as f64 / i as f64).ln();
        }
        let cos_pow = two_j - i;
        if (cos_pow > 0 && c == 0.0) || (i > 0 && s == 0.0) {
            continue;
        }
        let mut ln_mag = 0.5 * ln_binom;
        if cos_pow > 0 {
            ln_mag += cos_pow as f64 * ln_c;
        }
        if i > 0 {
            ln_mag += i as f64 * ln_s;
        }
        let (sp, cp) = (i as f64 * point.phi).sin_cos();
        amps[i] = Complex64::new(cp, sp) * ln_mag.exp();
    }
    // Analytically normalized; this only removes round-off.
    StateVector::normalized(amps).expect("coherent amplitudes are never all zero")
}

/// `⟨Ω|Ω′⟩` from the amplitude formula.
pub fn coherent_overlap(a: &PhasePoint, b: &PhasePoint, spin: SpinSize) -> Complex64 {
    coherent_state(spin, a).inner(&coherent_state(spin, b))
}

/// `(q, p) = R (cos φ, −sin φ)` with `R = √(2J(1 + cos θ))`.
pub fn sphere_to_canonical(theta: f64, phi: f64, spin: SpinSize) -> (f64, f64) {
    // 2J(1 + cos θ) = 4J cos²(θ/2), better conditioned near θ = π.
    let radius = 2.0 * spin.j().sqrt() * (0.5 * theta).cos().abs();
    let (sp, cp) = phi.sin_cos();
    (radius * cp, -radius * sp)
}

fn check_on_disk(q: f64, p: f64, spin: SpinSize) -> Result<f64> {
    let bound = 4.0 * spin.j();
    let rho = q * q + p * p;
    if !(rho <= bound * (1.0 + DISK_SLACK)) {
        return Err(Error::OffDisk { q, p, bound });
    }
    Ok(rho)
}

/// Inverse of [`sphere_to_canonical`]; `φ` is reported as 0 at the poles.
pub fn canonical_to_sphere(q: f64, p: f64, spin: SpinSize) -> Result<(f64, f64)> {
    let rho = check_on_disk(q, p, spin)?;
    let cos_half = (rho / (4.0 * spin.j())).sqrt().min(1.0);
    let theta = 2.0 * cos_half.acos();
    Ok((theta, wrap_angle((-p).atan2(q))))
}

/// `z = −tan(θ/2) e^{−iφ}`; undefined at `θ = π`.
///
/// Kept for reference only: the dynamics run in the `(q, p)` chart.
pub fn stereographic(theta: f64, phi: f64) -> Result<Complex64> {
    if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
        return Err(Error::InvalidParameter("theta must lie in [0, pi] and phi must be finite"));
    }
    if PI - theta < 1e-12 {
        return Err(Error::StereographicPole);
    }
    let t = (0.5 * theta).tan();
    let (sp, cp) = phi.sin_cos();
    Ok(Complex64::new(-t * cp, t * sp))
}

/// `(⟨Ĵx⟩, ⟨Ĵy⟩, ⟨Ĵz⟩)` of the coherent state at `(q, p)`.
pub fn canonical_expectations(q: f64, p: f64, spin: SpinSize) -> Result<[f64; 3]> {
    let rho = check_on_disk(q, p, spin)?;
    let j = spin.j();
    let r = (4.0 * j - rho).max(0.0).sqrt();
    Ok([0.5 * q * r, -0.5 * p * r, 0.5 * (rho - 2.0 * j)])
}

/// Partials `[∂/∂q, ∂/∂p]` of the three functions in
/// [`canonical_expectations`]. Requires `q² + p² < 4J`.
pub fn canonical_gradients(q: f64, p: f64, spin: SpinSize) -> Result<[[f64; 2]; 3]> {
    let rho = check_on_disk(q, p, spin)?;
    let s = 4.0 * spin.j() - rho;
    if !(s > 0.0) {
        return Err(Error::NearBoundary { q, p, margin: 0.0 });
    }
    let r = s.sqrt();
    Ok([[0.5 * r - 0.5 * q * q / r, -0.5 * q * p / r], [0.5 * p * q / r, -0.5 * r + 0.5 * p * p / r], [q, p]])
}

/// Canonical bracket `f_q g_p − f_p g_q` from gradients `[∂/∂q, ∂/∂p]`.
pub fn canonical_bracket(f: [f64; 2], g: [f64; 2]) -> f64 {
    f[0] * g[1] - f[1] * g[0]
}

/// `⟨Ĵz²⟩ = ⟨Ĵz⟩² + (q² + p²)(4J − q² − p²)/(8J)` on a coherent state.
pub fn jz2_expectation_canonical(q: f64, p: f64, spin: SpinSize) -> Result<f64> {
    let rho = check_on_disk(q, p, spin)?;
    let j = spin.j();
    let jz = 0.5 * (rho - 2.0 * j);
    Ok(jz * jz + rho * (4.0 * j - rho) / (8.0 * j))
}

/// The coherent state sharing the direction of `⟨Ĵ⟩_ψ`, plus `κ = |⟨Ĵ⟩_ψ| / J`.
///
/// Fails when `|⟨Ĵ⟩_ψ| ≤ 1e-9 J`.
pub fn representative_coherent(psi: &StateVector, ops: &SpinOperators) -> Result<(PhasePoint, EquivalenceWitness)> {
    let v = expectation_vector(ops, psi)?;
    let magnitude = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let j = ops.spin().j();
    if !(magnitude > 1e-9 * j) {
        return Err(Error::ZeroExpectation { magnitude });
    }
    let direction = [v[0] / magnitude, v[1] / magnitude, v[2] / magnitude];
    let point = PhasePoint::from_direction(direction)?;
    Ok((point, EquivalenceWitness { direction, kappa: magnitude / j }))
}

/// `Φ = Δ²Ĵx + Δ²Ĵy + Δ²Ĵz − J`; zero exactly on coherent states.
pub fn constraint_phi(psi: &StateVector, ops: &SpinOperators) -> Result<f64> {
    Ok((total_fluctuation(ops, psi)? - ops.spin().j()).max(0.0))
}

/// `‖(2J+1)/(4π) ∮ |Ω⟩⟨Ω| dΩ − 1‖_max` with an `n_theta`-point
/// Gauss–Legendre rule in `cos θ` and an `n_phi`-point trapezoid in `φ`.
pub fn identity_resolution_residual(spin: SpinSize, n_theta: usize, n_phi: usize) -> Result<f64> {
    Ok(max_deviation_from_identity(&resolution_of_identity(spin, n_theta, n_phi)?))
}

/// `(2J+1)/(4π) ∮ |Ω⟩⟨Ω| dΩ` on the quadrature grid.
pub fn resolution_of_identity(spin: SpinSize, n_theta: usize, n_phi: usize) -> Result<Matrix> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::InvalidParameter("quadrature sizes must be at least 2"));
    }
    let d = spin.dim();
    let rule = GaussLegendre::new(n_theta);
    let dphi = TAU / n_phi as f64;
    let scale = d as f64 / (2.0 * TAU);
    let mut acc = vec![Complex64::new(0.0, 0.0); d * d];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for l in 0..n_phi {
            let point = PhasePoint { theta, phi: l as f64 * dphi };
            let omega = coherent_state(spin, &point);
            let amps = omega.amplitudes().as_slice();
            let weight = w * dphi * scale;
            for (row, a) in amps.iter().enumerate() {
                let a = a * weight;
                for (col, b) in amps.iter().enumerate() {
                    acc[row * d + col] += a * b.conj();
                }
            }
        }
    }
    Ok(Matrix::from_row_slice(d, d, &acc))
}

fn max_deviation_from_identity(m: &Matrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}
