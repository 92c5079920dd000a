#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinlimit_core::{Complex64, Matrix, PhasePoint, SpinSize, StateVector, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spin(two_j: u32) -> SpinSize {
    SpinSize::from_two_j(two_j).unwrap()
}

pub fn random_state(rng: &mut impl Rng, spin: SpinSize) -> StateVector {
    let v =
        Vector::from_fn(spin.dim(), |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    StateVector::normalized(v).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> Matrix {
    let a = Matrix::from_fn(dim, dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Uniform on the sphere.
pub fn random_point(rng: &mut impl Rng) -> PhasePoint {
    let cos_theta: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    PhasePoint::new(cos_theta.acos(), phi).unwrap()
}

/// Uniform on the open disk of radius² 4J, kept away from the rim.
pub fn random_disk_point(rng: &mut impl Rng, spin: SpinSize) -> (f64, f64) {
    let bound = 4.0 * spin.j();
    let rho: f64 = rng.random_range(0.0..0.999) * bound;
    let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    (rho.sqrt() * angle.cos(), rho.sqrt() * angle.sin())
}

/// `⟨ψ|A|ψ⟩` computed entry by entry.
pub fn brute_expectation(a: &Matrix, psi: &StateVector) -> Complex64 {
    let c = psi.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..c.len() {
        for j in 0..c.len() {
            acc += c[i].conj() * a[(i, j)] * c[j];
        }
    }
    acc
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
