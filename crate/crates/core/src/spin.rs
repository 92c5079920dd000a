//! Finite-dimensional spin-J representation.
//!
//! Basis vectors are the `Ĵz` eigenstates ordered `m = J, J-1, ..., -J`, so
//! index `i` carries `m = J - i`. Units have `ħ = 1`.

// Unused whenever std is linked and its inherent f64 methods take over.
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

/// Maximum entrywise `|A - A†|` accepted as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Spin quantum number `J`, stored as the integer `2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinSize {
    two_j: u32,
}

impl SpinSize {
    pub fn from_two_j(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin { two_j });
        }
        Ok(SpinSize { two_j })
    }

    /// Accepts positive multiples of 1/2.
    pub fn from_j(j: f64) -> Result<Self> {
        let two_j = 2.0 * j;
        if !two_j.is_finite() || two_j < 1.0 || two_j > u32::MAX as f64 || two_j.fract() != 0.0 {
            return Err(Error::InvalidParameter("spin size must be a positive multiple of 1/2"));
        }
        Self::from_two_j(two_j as u32)
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Hilbert space dimension `2J + 1`.
    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// Magnetic quantum number of basis index `index`.
    pub fn m(self, index: usize) -> f64 {
        self.j() - index as f64
    }

    /// Basis index of the state with `2m = two_m`, if it exists.
    pub fn index_of_two_m(self, two_m: i64) -> Option<usize> {
        let two_j = self.two_j as i64;
        if two_m.abs() > two_j || (two_j - two_m) % 2 != 0 {
            return None;
        }
        Some(((two_j - two_m) / 2) as usize)
    }
}

impl fmt::Display for SpinSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

impl FromStr for SpinSize {
    type Err = Error;

    /// Parses `"5"`, `"2.5"` or `"5/2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = Error::InvalidParameter("spin size must look like 5, 2.5 or 5/2");
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad.clone())?;
            return match den.trim() {
                "1" => num.checked_mul(2).ok_or(bad).and_then(Self::from_two_j),
                "2" => Self::from_two_j(num),
                _ => Err(bad),
            };
        }
        let j: f64 = s.parse().map_err(|_| bad)?;
        Self::from_j(j)
    }
}

/// The Cartesian spin matrices of one irreducible representation.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    spin: SpinSize,
    jx: Matrix,
    jy: Matrix,
    jz: Matrix,
    jplus: Matrix,
    jminus: Matrix,
}

impl SpinOperators {
    /// Builds `Ĵx, Ĵy, Ĵz` from the ladder operators
    /// `⟨m+1|Ĵ+|m⟩ = √((J-m)(J+m+1))`.
    pub fn new(spin: SpinSize) -> Self {
        let d = spin.dim();
        let two_j = spin.two_j() as f64;
        let mut jplus = Matrix::zeros(d, d);
        // Column i holds m = J - i; raising lands on row i - 1.
        for i in 1..d {
            let k = i as f64;
            jplus[(i - 1, i)] = Complex64::new((k * (two_j - k + 1.0)).sqrt(), 0.0);
        }
        let jminus = jplus.adjoint();
        let half = Complex64::new(0.5, 0.0);
        let minus_half_i = Complex64::new(0.0, -0.5);
        let jx = (&jplus + &jminus) * half;
        let jy = (&jplus - &jminus) * minus_half_i;
        let jz = Matrix::from_diagonal(&Vector::from_fn(d, |i, _| Complex64::new(spin.m(i), 0.0)));
        SpinOperators { spin, jx, jy, jz, jplus, jminus }
    }

    pub fn spin(&self) -> SpinSize {
        self.spin
    }

    pub fn jx(&self) -> &Matrix {
        &self.jx
    }

    pub fn jy(&self) -> &Matrix {
        &self.jy
    }

    pub fn jz(&self) -> &Matrix {
        &self.jz
    }

    pub fn jplus(&self) -> &Matrix {
        &self.jplus
    }

    pub fn jminus(&self) -> &Matrix {
        &self.jminus
    }

    pub fn components(&self) -> [&Matrix; 3] {
        [&self.jx, &self.jy, &self.jz]
    }

    /// `Ĵx² + Ĵy² + Ĵz²`.
    pub fn casimir(&self) -> Matrix {
        &self.jx * &self.jx + &self.jy * &self.jy + &self.jz * &self.jz
    }

    pub fn identity(&self) -> Matrix {
        Matrix::identity(self.spin.dim(), self.spin.dim())
    }
}

pub fn build_spin_operators(spin: SpinSize) -> SpinOperators {
    SpinOperators::new(spin)
}

/// Normalized state in the `Ĵz` eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vector,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(amplitudes: Vector) -> Result<Self> {
        let norm_sq = amplitudes.norm_squared();
        if !((norm_sq - 1.0).abs() <= Self::NORM_TOL) {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales to unit norm; fails on zero or non-finite input.
    pub fn normalized(amplitudes: Vector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm_sq: norm * norm });
        }
        Ok(StateVector { amplitudes: amplitudes.unscale(norm) })
    }

    pub(crate) fn from_raw(amplitudes: Vector) -> Self {
        StateVector { amplitudes }
    }

    /// Basis state with index `index` (`m = J - index`).
    pub fn basis(spin: SpinSize, index: usize) -> Result<Self> {
        if index >= spin.dim() {
            return Err(Error::DimensionMismatch { expected: spin.dim(), found: index + 1 });
        }
        let mut v = Vector::zeros(spin.dim());
        v[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes: v })
    }

    /// `|J, m⟩` with `2m = two_m`.
    pub fn from_two_m(spin: SpinSize, two_m: i64) -> Result<Self> {
        let index =
            spin.index_of_two_m(two_m).ok_or(Error::InvalidParameter("m must lie in -J..=J with J - m integer"))?;
        Self::basis(spin, index)
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vector {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Couplings of `Ĥ = ε Ĵz − λ Ĵx + μ Ĵz²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianParams {
    pub epsilon: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl HamiltonianParams {
    pub fn new(epsilon: f64, lambda: f64, mu: f64) -> Result<Self> {
        let params = HamiltonianParams { epsilon, lambda, mu };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_finite() && self.lambda.is_finite() && self.mu.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter("Hamiltonian couplings must be finite"))
        }
    }

    /// `|ε|J + |λ|J + |μ|J²`, an upper bound on `‖Ĥ‖`.
    pub fn energy_scale(&self, spin: SpinSize) -> f64 {
        let j = spin.j();
        (self.epsilon.abs() + self.lambda.abs()) * j + self.mu.abs() * j * j
    }
}

impl Default for HamiltonianParams {
    /// `ε = 0, λ = μ = 1`.
    fn default() -> Self {
        HamiltonianParams { epsilon: 0.0, lambda: 1.0, mu: 1.0 }
    }
}

/// `ε Ĵz − λ Ĵx + μ Ĵz²`.
pub fn build_hamiltonian(params: &HamiltonianParams, ops: &SpinOperators) -> Matrix {
    let c = |x: f64| Complex64::new(x, 0.0);
    let jz2 = ops.jz() * ops.jz();
    ops.jz() * c(params.epsilon) - ops.jx() * c(params.lambda) + jz2 * c(params.mu)
}

/// Largest absolute row sum, an upper bound on the spectral norm.
pub fn operator_norm_bound(op: &Matrix) -> f64 {
    op.row_iter().map(|row| row.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Largest entrywise `|A_ij − conj(A_ji)|`; infinite for non-square input.
pub fn hermiticity_residual(op: &Matrix) -> f64 {
    if op.nrows() != op.ncols() {
        return f64::INFINITY;
    }
    let n = op.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((op[(i, j)] - op[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn check_operator(op: &Matrix, dim: usize) -> Result<()> {
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: op.nrows().max(op.ncols()) });
    }
    let residual = hermiticity_residual(op);
    if !(residual <= HERMITICITY_TOL) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

fn check_normalized(psi: &StateVector) -> Result<()> {
    let norm_sq = psi.norm_sq();
    if !((norm_sq - 1.0).abs() <= 1e-10) {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(())
}

/// `⟨v|A|v⟩` without validation; `v` need not be normalized.
pub(crate) fn quadratic_form(op: &Matrix, v: &Vector) -> Complex64 {
    v.dotc(&(op * v))
}

/// `⟨ψ|Â|ψ⟩` for Hermitian `Â`.
pub fn expectation(op: &Matrix, psi: &StateVector) -> Result<f64> {
    check_operator(op, psi.dim())?;
    check_normalized(psi)?;
    let value = quadratic_form(op, psi.amplitudes());
    if !(value.im.abs() <= 1e-12 * (1.0 + value.re.abs())) {
        return Err(Error::NotHermitian { residual: value.im.abs() });
    }
    Ok(value.re)
}

/// `(⟨Ĵx⟩, ⟨Ĵy⟩, ⟨Ĵz⟩)`.
pub fn expectation_vector(ops: &SpinOperators, psi: &StateVector) -> Result<[f64; 3]> {
    if psi.dim() != ops.spin().dim() {
        return Err(Error::DimensionMismatch { expected: ops.spin().dim(), found: psi.dim() });
    }
    check_normalized(psi)?;
    Ok(ops.components().map(|op| quadratic_form(op, psi.amplitudes()).re))
}

/// `⟨Â²⟩ − ⟨Â⟩²`, clamped at zero.
pub fn variance(op: &Matrix, psi: &StateVector) -> Result<f64> {
    check_operator(op, psi.dim())?;
    check_normalized(psi)?;
    let a_psi = op * psi.amplitudes();
    let mean = psi.amplitudes().dotc(&a_psi).re;
    // ⟨Â²⟩ = |Âψ|² for Hermitian Â.
    Ok((a_psi.norm_squared() - mean * mean).max(0.0))
}

/// `Δ²Ĵx + Δ²Ĵy + Δ²Ĵz`.
pub fn total_fluctuation(ops: &SpinOperators, psi: &StateVector) -> Result<f64> {
    let mut total = 0.0;
    for op in ops.components() {
        total += variance(op, psi)?;
    }
    Ok(total)
}

/// How `from_real_coords` treats `Σ(x² + y²) ≠ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormPolicy {
    /// Reject when `|Σ(x² + y²) − 2|` exceeds the tolerance.
    Check {
        tolerance: f64,
    },
    Renormalize,
}

impl Default for NormPolicy {
    fn default() -> Self {
        NormPolicy::Check { tolerance: 1e-9 }
    }
}

/// `(x_1..x_n, y_1..y_n)` with `x_i = √2 Re c_i`, `y_i = √2 Im c_i`.
pub fn to_real_coords(psi: &StateVector) -> DVector<f64> {
    raw_real_coords(psi.amplitudes())
}

pub(crate) fn raw_real_coords(v: &Vector) -> DVector<f64> {
    let n = v.len();
    let s = core::f64::consts::SQRT_2;
    DVector::from_fn(2 * n, |k, _| if k < n { s * v[k].re } else { s * v[k - n].im })
}

pub(crate) fn raw_from_real_coords(coords: &[f64]) -> Vector {
    let n = coords.len() / 2;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    Vector::from_fn(n, |i, _| Complex64::new(s * coords[i], s * coords[n + i]))
}

pub fn from_real_coords(coords: &[f64], policy: NormPolicy) -> Result<StateVector> {
    if coords.is_empty() || !coords.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter("real coordinate vector must have even, non-zero length"));
    }
    let sum: f64 = coords.iter().map(|c| c * c).sum();
    if let NormPolicy::Check { tolerance } = policy {
        if !((sum - 2.0).abs() <= tolerance) {
            return Err(Error::RealCoordsNorm { sum });
        }
    }
    StateVector::normalized(raw_from_real_coords(coords)).map_err(|_| Error::RealCoordsNorm { sum })
}

/// Splits `⟨ψ1|ψ2⟩ = (g + iω)/2` into the Euclidean metric `g` and the
/// symplectic form `ω` of the real coordinates.
pub fn scalar_product_parts(a: &StateVector, b: &StateVector) -> Result<(f64, f64)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let (xa, xb) = (to_real_coords(a), to_real_coords(b));
    let n = a.dim();
    let g = xa.dot(&xb);
    let omega = (0..n).map(|i| xa[i] * xb[n + i] - xa[n + i] * xb[i]).sum();
    Ok((g, omega))
}

/// Gradient of `X ↦ ⟨v|A|v⟩` in real coordinates: `√2 (Re Av, Im Av)`.
pub(crate) fn raw_expectation_gradient(op: &Matrix, v: &Vector) -> DVector<f64> {
    let av = op * v;
    let n = v.len();
    let s = core::f64::consts::SQRT_2;
    DVector::from_fn(2 * n, |k, _| if k < n { s * av[k].re } else { s * av[k - n].im })
}

/// Gradient of `F(X) = ⟨Â⟩_X` with respect to `(x_1..x_n, y_1..y_n)`.
pub fn expectation_gradient(op: &Matrix, psi: &StateVector) -> Result<DVector<f64>> {
    check_operator(op, psi.dim())?;
    check_normalized(psi)?;
    Ok(raw_expectation_gradient(op, psi.amplitudes()))
}

/// Canonical bracket `Σ_i (∂F/∂x_i ∂G/∂y_i − ∂G/∂x_i ∂F/∂y_i)` of two
/// expectation functions.
pub fn poisson_bracket(a: &Matrix, b: &Matrix, psi: &StateVector) -> Result<f64> {
    let grad_a = expectation_gradient(a, psi)?;
    let grad_b = expectation_gradient(b, psi)?;
    let n = psi.dim();
    Ok((0..n).map(|i| grad_a[i] * grad_b[n + i] - grad_b[i] * grad_a[n + i]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spin_size_parsing_and_display() {
        let s: SpinSize = "5/2".parse().unwrap();
        assert_eq!(s.two_j(), 5);
        assert_eq!(s.dim(), 6);
        assert_eq!(s.to_string(), "5/2");
        assert_eq!("2.5".parse::<SpinSize>().unwrap(), s);
        assert_eq!("30".parse::<SpinSize>().unwrap().to_string(), "30");
        assert_eq!("3/1".parse::<SpinSize>().unwrap().two_j(), 6);
        assert!("0".parse::<SpinSize>().is_err());
        assert!("1.25".parse::<SpinSize>().is_err());
        assert!("-1".parse::<SpinSize>().is_err());
        assert!(SpinSize::from_two_j(0).is_err());
    }

    #[test]
    fn spin_half_is_pauli_over_two() {
        let ops = SpinOperators::new(SpinSize::from_two_j(1).unwrap());
        assert_eq!(ops.jx()[(0, 1)], c(0.5, 0.0));
        assert_eq!(ops.jx()[(1, 0)], c(0.5, 0.0));
        assert_eq!(ops.jx()[(0, 0)], c(0.0, 0.0));
        assert_eq!(ops.jz()[(0, 0)], c(0.5, 0.0));
        assert_eq!(ops.jz()[(1, 1)], c(-0.5, 0.0));
        assert_eq!(ops.jy()[(0, 1)], c(0.0, -0.5));
    }

    #[test]
    fn spin_one_ladder_coefficients() {
        let ops = SpinOperators::new(SpinSize::from_two_j(2).unwrap());
        for (i, m) in [1.0, 0.0, -1.0].into_iter().enumerate() {
            assert_eq!(ops.jz()[(i, i)].re, m);
        }
        assert!((ops.jx()[(0, 1)].re - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn spin_half_hamiltonian() {
        let ops = SpinOperators::new(SpinSize::from_two_j(1).unwrap());
        let h = build_hamiltonian(&HamiltonianParams::new(0.0, 1.0, 1.0).unwrap(), &ops);
        let expected = -ops.jx() + ops.identity() * c(0.25, 0.0);
        assert!((h - expected).camax() < 1e-15);
    }

    #[test]
    fn single_term_hamiltonian_is_jz() {
        let ops = SpinOperators::new(SpinSize::from_two_j(7).unwrap());
        let h = build_hamiltonian(&HamiltonianParams::new(1.0, 0.0, 0.0).unwrap(), &ops);
        assert_eq!(&h, ops.jz());
    }

    #[test]
    fn params_reject_non_finite() {
        assert!(HamiltonianParams::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(HamiltonianParams::new(0.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn basis_state_expectations() {
        let spin = SpinSize::from_two_j(4).unwrap();
        let ops = SpinOperators::new(spin);
        let top = StateVector::basis(spin, 0).unwrap();
        assert_eq!(expectation(ops.jz(), &top).unwrap(), 2.0);
        assert_eq!(expectation(ops.jx(), &top).unwrap(), 0.0);
        assert_eq!(variance(ops.jz(), &top).unwrap(), 0.0);
    }

    #[test]
    fn cat_state_has_zero_jz() {
        let spin = SpinSize::from_two_j(2).unwrap();
        let ops = SpinOperators::new(spin);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::new(Vector::from_vec(alloc::vec![c(s, 0.0), c(0.0, 0.0), c(s, 0.0)])).unwrap();
        assert!(expectation(ops.jz(), &psi).unwrap().abs() < 1e-15);
    }

    #[test]
    fn m_zero_spin_one_total_fluctuation() {
        let spin = SpinSize::from_two_j(2).unwrap();
        let ops = SpinOperators::new(spin);
        let psi = StateVector::from_two_m(spin, 0).unwrap();
        assert!((total_fluctuation(&ops, &psi).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn expectation_rejects_bad_operators() {
        let spin = SpinSize::from_two_j(2).unwrap();
        let ops = SpinOperators::new(spin);
        let psi = StateVector::basis(spin, 0).unwrap();
        assert!(matches!(expectation(ops.jplus(), &psi), Err(Error::NotHermitian { .. })));
        let small = SpinOperators::new(SpinSize::from_two_j(1).unwrap());
        assert!(matches!(expectation(small.jz(), &psi), Err(Error::DimensionMismatch { .. })));
        let unnormalized = StateVector::from_raw(psi.amplitudes() * c(2.0, 0.0));
        assert!(matches!(expectation(ops.jz(), &unnormalized), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn state_constructors() {
        let spin = SpinSize::from_two_j(3).unwrap();
        assert!(StateVector::new(Vector::from_element(4, c(1.0, 0.0))).is_err());
        let psi = StateVector::normalized(Vector::from_element(4, c(1.0, 1.0))).unwrap();
        assert!((psi.norm_sq() - 1.0).abs() < 1e-15);
        assert!(StateVector::normalized(Vector::zeros(4)).is_err());
        assert!(StateVector::basis(spin, 4).is_err());
        assert!(StateVector::from_two_m(spin, 2).is_err());
        assert_eq!(StateVector::from_two_m(spin, -3).unwrap(), StateVector::basis(spin, 3).unwrap());
    }

    #[test]
    fn real_coords_of_top_state() {
        let spin = SpinSize::from_two_j(4).unwrap();
        let x = to_real_coords(&StateVector::basis(spin, 0).unwrap());
        assert_eq!(x.len(), 10);
        assert_eq!(x[0], core::f64::consts::SQRT_2);
        assert!(x.iter().skip(1).all(|&v| v == 0.0));
    }

    #[test]
    fn from_real_coords_norm_policy() {
        let coords = [1.0, 0.0, 0.0, 1.0];
        assert!(from_real_coords(&coords, NormPolicy::default()).is_ok());
        let off = [1.0, 0.0, 0.0, 1.1];
        assert!(matches!(from_real_coords(&off, NormPolicy::default()), Err(Error::RealCoordsNorm { .. })));
        let psi = from_real_coords(&off, NormPolicy::Renormalize).unwrap();
        assert!((psi.norm_sq() - 1.0).abs() < 1e-15);
        assert!(from_real_coords(&[1.0, 0.0, 0.0], NormPolicy::Renormalize).is_err());
        assert!(from_real_coords(&[0.0, 0.0], NormPolicy::Renormalize).is_err());
    }

    #[test]
    fn identity_gradient_is_position() {
        let spin = SpinSize::from_two_j(3).unwrap();
        let ops = SpinOperators::new(spin);
        let psi = StateVector::normalized(Vector::from_fn(4, |i, _| c(i as f64 + 1.0, 0.5 - i as f64))).unwrap();
        let grad = expectation_gradient(&ops.identity(), &psi).unwrap();
        let x = to_real_coords(&psi);
        assert!((grad - x).amax() < 1e-15);
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let spin = SpinSize::from_two_j(3).unwrap();
        let ops = SpinOperators::new(spin);
        let psi = StateVector::normalized(Vector::from_fn(4, |i, _| c(1.0 / (i as f64 + 1.0), i as f64))).unwrap();
        assert_eq!(poisson_bracket(ops.jx(), ops.jx(), &psi).unwrap(), 0.0);
        let ab = poisson_bracket(ops.jx(), ops.jz(), &psi).unwrap();
        let ba = poisson_bracket(ops.jz(), ops.jx(), &psi).unwrap();
        assert!((ab + ba).abs() < 1e-14);
    }
}
