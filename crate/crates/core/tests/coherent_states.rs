mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::{brute_expectation, random_disk_point, random_point, random_state, rng, spin};
use rand::Rng;
use spinlimit_core::coherent::{
    canonical_bracket, canonical_expectations, canonical_gradients, canonical_to_sphere, coherent_overlap,
    coherent_state, constraint_phi, identity_resolution_residual, jz2_expectation_canonical, representative_coherent,
    sphere_to_canonical, stereographic,
};
use spinlimit_core::dynamics::SpectralPropagator;
use spinlimit_core::quadrature::GaussLegendre;
use spinlimit_core::spin::{expectation, expectation_vector, total_fluctuation};
use spinlimit_core::{Complex64, Error, Matrix, PhasePoint, SpinOperators, SpinSize, StateVector, Vector};

fn direction_operator(ops: &SpinOperators, n: [f64; 3]) -> Matrix {
    let [jx, jy, jz] = ops.components();
    jx * Complex64::new(n[0], 0.0) + jy * Complex64::new(n[1], 0.0) + jz * Complex64::new(n[2], 0.0)
}

/// `exp(−iφĴz) exp(−iθĴy) |J, J⟩`, built from spectral exponentials.
fn rotated_top_state(ops: &SpinOperators, point: &PhasePoint) -> StateVector {
    let top = StateVector::basis(ops.spin(), 0).unwrap();
    let about_y = SpectralPropagator::new(ops.jy()).unwrap().propagate(&top, point.theta()).unwrap();
    SpectralPropagator::new(ops.jz()).unwrap().propagate(&about_y, point.phi()).unwrap()
}

#[test]
fn coherent_states_are_top_eigenvectors_with_minimal_fluctuation() {
    let mut r = rng(10);
    for two_j in [1, 2, 10, 20, 50] {
        let s = spin(two_j);
        let ops = SpinOperators::new(s);
        let j = s.j();
        for _ in 0..100 {
            let point = random_point(&mut r);
            let omega = coherent_state(s, &point);
            let n = point.direction();
            let lhs = direction_operator(&ops, n) * omega.amplitudes();
            let residual = (lhs - omega.amplitudes() * Complex64::new(j, 0.0)).camax();
            assert!(residual <= 1e-10 * j, "2J = {two_j}: residual {residual:e}");
            assert!((total_fluctuation(&ops, &omega).unwrap() - j).abs() < 1e-10);
            let v = expectation_vector(&ops, &omega).unwrap();
            for k in 0..3 {
                assert!((v[k] - j * n[k]).abs() < 1e-10 * j.max(1.0));
            }
        }
    }
}

#[test]
fn coherent_state_equals_rotated_highest_weight_state() {
    let mut r = rng(11);
    for two_j in [1, 4, 11] {
        let ops = SpinOperators::new(spin(two_j));
        for _ in 0..20 {
            let point = random_point(&mut r);
            let oracle = rotated_top_state(&ops, &point);
            let ours = coherent_state(ops.spin(), &point);
            assert!((ours.fidelity(&oracle) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn coherent_state_examples() {
    let s = spin(7);
    let north = coherent_state(s, &PhasePoint::new(0.0, 1.3).unwrap());
    assert_eq!(north, StateVector::basis(s, 0).unwrap());

    let half = spin(1);
    let plus_x = coherent_state(half, &PhasePoint::new(FRAC_PI_2, 0.0).unwrap());
    let h = 1.0 / 2f64.sqrt();
    assert!((plus_x.amplitudes()[0] - Complex64::new(h, 0.0)).norm() < 1e-15);
    assert!((plus_x.amplitudes()[1] - Complex64::new(h, 0.0)).norm() < 1e-15);
    let ops = SpinOperators::new(half);
    assert!((expectation(ops.jx(), &plus_x).unwrap() - 0.5).abs() < 1e-15);

    let s10 = spin(20);
    let ops10 = SpinOperators::new(s10);
    let any = coherent_state(s10, &PhasePoint::new(2.1, 4.4).unwrap());
    assert!((total_fluctuation(&ops10, &any).unwrap() - 10.0).abs() < 1e-10);
}

#[test]
fn overlap_matches_closed_form() {
    let mut r = rng(12);
    for two_j in [1, 2, 7, 20, 50] {
        let s = spin(two_j);
        for _ in 0..200 {
            let a = random_point(&mut r);
            let b = random_point(&mut r);
            let cos_alpha = a.angle_to(&b).cos();
            // cos²(α/2) = (1 + cos α)/2
            let expected = (0.5 * (1.0 + cos_alpha)).max(0.0).powf(s.j());
            let got = coherent_overlap(&a, &b, s).norm();
            assert!((got - expected).abs() < 1e-10, "2J = {two_j}: {got} vs {expected}");
        }
    }
}

#[test]
fn overlap_examples() {
    let s = spin(20);
    let a = PhasePoint::new(0.4, 1.0).unwrap();
    assert!((coherent_overlap(&a, &a, s).norm() - 1.0).abs() < 1e-14);

    let equator = PhasePoint::new(FRAC_PI_2, 0.0).unwrap();
    let pole = PhasePoint::new(0.0, 0.0).unwrap();
    assert!((coherent_overlap(&equator, &pole, s).norm() - 2f64.powi(-10)).abs() < 1e-15);

    let antipode = PhasePoint::new(PI - 0.4, 1.0 + PI).unwrap();
    for two_j in [1, 2, 9, 40] {
        assert!(coherent_overlap(&a, &antipode, spin(two_j)).norm() < 1e-12);
    }
}

#[test]
fn chart_examples() {
    let s = spin(10);
    let j = s.j();
    let (theta, _) = canonical_to_sphere(0.0, 0.0, s).unwrap();
    assert!((theta - PI).abs() < 1e-15);
    assert!((canonical_expectations(0.0, 0.0, s).unwrap()[2] + j).abs() < 1e-15);

    let (q, p) = sphere_to_canonical(FRAC_PI_2, 0.0, s);
    assert!((q - (2.0 * j).sqrt()).abs() < 1e-14 && p.abs() < 1e-15);
    let e = canonical_expectations(q, p, s).unwrap();
    assert!((e[0] - j).abs() < 1e-12);
    let ops = SpinOperators::new(s);
    let omega = coherent_state(s, &PhasePoint::new(FRAC_PI_2, 0.0).unwrap());
    assert!((expectation(ops.jx(), &omega).unwrap() - j).abs() < 1e-12);

    assert!(matches!(canonical_to_sphere(5.0, 0.0, s), Err(Error::OffDisk { .. })));
}

#[test]
fn chart_round_trips_and_radius() {
    let mut r = rng(13);
    for two_j in [1, 6, 30] {
        let s = spin(two_j);
        let j = s.j();
        for _ in 0..200 {
            let theta = r.random_range(0.05..PI - 0.05);
            let phi = r.random_range(0.0..std::f64::consts::TAU);
            let (q, p) = sphere_to_canonical(theta, phi, s);
            assert!((q * q + p * p - 2.0 * j * (1.0 + theta.cos())).abs() < 1e-12 * j);
            let (t2, f2) = canonical_to_sphere(q, p, s).unwrap();
            assert!((t2 - theta).abs() < 1e-12);
            let dphi = (f2 - phi).rem_euclid(std::f64::consts::TAU);
            assert!(dphi.min(std::f64::consts::TAU - dphi) < 1e-12);
        }
    }
}

#[test]
fn canonical_expectations_match_coherent_matrix_elements() {
    let mut r = rng(14);
    for two_j in [1, 4, 10, 25] {
        let s = spin(two_j);
        let ops = SpinOperators::new(s);
        let j = s.j();
        for _ in 0..50 {
            let (q, p) = random_disk_point(&mut r, s);
            let e = canonical_expectations(q, p, s).unwrap();
            assert!((e.iter().map(|v| v * v).sum::<f64>() - j * j).abs() < 1e-10 * j * j);
            let omega = coherent_state(s, &PhasePoint::from_canonical(q, p, s).unwrap());
            let v = expectation_vector(&ops, &omega).unwrap();
            for k in 0..3 {
                assert!((e[k] - v[k]).abs() < 1e-10 * j.max(1.0), "2J = {two_j}, component {k}");
            }
        }
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn canonical_gradients_and_su2_closure() {
    let mut r = rng(15);
    let h = 1e-6;
    for two_j in [2, 10, 40] {
        let s = spin(two_j);
        for _ in 0..100 {
            let (q, p) = random_disk_point(&mut r, s);
            let g = canonical_gradients(q, p, s).unwrap();
            let f = |q: f64, p: f64| canonical_expectations(q, p, s).unwrap();
            for k in 0..3 {
                let dq = (f(q + h, p)[k] - f(q - h, p)[k]) / (2.0 * h);
                let dp = (f(q, p + h)[k] - f(q, p - h)[k]) / (2.0 * h);
                let scale = dq.abs().max(dp.abs()).max(1.0);
                assert!((g[k][0] - dq).abs() < 1e-5 * scale && (g[k][1] - dp).abs() < 1e-5 * scale);
            }
            let e = f(q, p);
            assert!((canonical_bracket(g[0], g[1]) - e[2]).abs() < 1e-10 * s.j());
            assert!((canonical_bracket(g[1], g[2]) - e[0]).abs() < 1e-10 * s.j());
            assert!((canonical_bracket(g[2], g[0]) - e[1]).abs() < 1e-10 * s.j());
        }
    }
}

#[test]
fn stereographic_examples() {
    assert_eq!(stereographic(0.0, 0.7).unwrap().norm(), 0.0);
    assert!((stereographic(FRAC_PI_2, 0.0).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    assert!((stereographic(FRAC_PI_2, FRAC_PI_2).unwrap() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    assert!(matches!(stereographic(PI, 0.0), Err(Error::StereographicPole)));
}

#[test]
fn jz_squared_on_the_chart() {
    let s = spin(10);
    let j = s.j();
    let equator = jz2_expectation_canonical(0.0, (2.0 * j).sqrt(), s).unwrap();
    assert!((equator - j / 2.0).abs() < 1e-12);
    assert!((jz2_expectation_canonical(0.0, 0.0, s).unwrap() - j * j).abs() < 1e-12);

    let ops = SpinOperators::new(s);
    let jz2 = ops.jz() * ops.jz();
    let mut r = rng(16);
    for _ in 0..100 {
        let (q, p) = random_disk_point(&mut r, s);
        let omega = coherent_state(s, &PhasePoint::from_canonical(q, p, s).unwrap());
        let oracle = brute_expectation(&jz2, &omega).re;
        assert!((jz2_expectation_canonical(q, p, s).unwrap() - oracle).abs() < 1e-10);
    }
    assert!(jz2_expectation_canonical(5.0, 0.0, s).is_err());
}

#[test]
fn representative_examples() {
    let s = spin(9);
    let ops = SpinOperators::new(s);
    let point = PhasePoint::new(1.1, 2.5).unwrap();
    let (rep, witness) = representative_coherent(&coherent_state(s, &point), &ops).unwrap();
    assert!(rep.angle_to(&point) < 1e-10);
    assert!((witness.kappa - 1.0).abs() < 1e-10);

    let s2 = spin(4);
    let ops2 = SpinOperators::new(s2);
    let (rep, witness) = representative_coherent(&StateVector::basis(s2, 1).unwrap(), &ops2).unwrap();
    assert!(rep.theta().abs() < 1e-12);
    assert!((witness.direction[2] - 1.0).abs() < 1e-12);
    assert!((witness.kappa - 0.5).abs() < 1e-12);

    let s1 = spin(2);
    let middle = StateVector::from_two_m(s1, 0).unwrap();
    assert!(matches!(representative_coherent(&middle, &SpinOperators::new(s1)), Err(Error::ZeroExpectation { .. })));
}

#[test]
fn representative_witness_on_random_states() {
    let mut r = rng(17);
    for two_j in [1, 3, 8] {
        let s = spin(two_j);
        let ops = SpinOperators::new(s);
        for _ in 0..100 {
            let psi = random_state(&mut r, s);
            let (rep, w) = representative_coherent(&psi, &ops).unwrap();
            let norm: f64 = w.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(w.kappa > 0.0 && w.kappa <= 1.0 + 1e-12);
            let v = expectation_vector(&ops, &psi).unwrap();
            let omega = coherent_state(s, &rep);
            let vo = expectation_vector(&ops, &omega).unwrap();
            for k in 0..3 {
                assert!((v[k] - w.kappa * vo[k]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn constraint_examples_and_sign() {
    let s = spin(12);
    let ops = SpinOperators::new(s);
    let omega = coherent_state(s, &PhasePoint::new(0.8, 5.0).unwrap());
    assert!(constraint_phi(&omega, &ops).unwrap() < 1e-10);

    let s1 = spin(2);
    let middle = StateVector::from_two_m(s1, 0).unwrap();
    assert!((constraint_phi(&middle, &SpinOperators::new(s1)).unwrap() - 1.0).abs() < 1e-12);

    let s5 = spin(10);
    let mut v = Vector::zeros(11);
    v[0] = Complex64::new(1.0, 0.0);
    v[10] = Complex64::new(1.0, 0.0);
    let cat = StateVector::normalized(v).unwrap();
    assert!((constraint_phi(&cat, &SpinOperators::new(s5)).unwrap() - 25.0).abs() < 1e-10);

    let mut r = rng(18);
    for two_j in [1, 2, 5, 10] {
        let sj: SpinSize = spin(two_j);
        let opsj = SpinOperators::new(sj);
        for _ in 0..250 {
            let psi = random_state(&mut r, sj);
            let phi = constraint_phi(&psi, &opsj).unwrap();
            assert!(phi >= 0.0);
            if two_j > 1 {
                // Random states are essentially never coherent.
                assert!(phi > 1e-9);
            }
        }
    }
}

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    for n in [2, 5, 16, 64] {
        let rule = GaussLegendre::new(n);
        for k in 0..(2 * n) {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let got = rule.integrate(|x| x.powi(k as i32));
            assert!((got - exact).abs() < 1e-13, "n = {n}, k = {k}");
        }
    }
}

#[test]
fn identity_resolution() {
    assert!(identity_resolution_residual(spin(1), 16, 16).unwrap() <= 1e-12);
    assert!(identity_resolution_residual(spin(10), 64, 64).unwrap() <= 1e-10);
    assert!(identity_resolution_residual(spin(20), 128, 128).unwrap() <= 1e-9);
    assert!(identity_resolution_residual(spin(10), 2, 2).unwrap() > 0.1);
    assert!(identity_resolution_residual(spin(10), 1, 8).is_err());

    let mut last = f64::INFINITY;
    for n in [2, 4, 8, 16, 32, 64] {
        let res = identity_resolution_residual(spin(10), n, n).unwrap();
        // Once converged the residual sits at round-off and may jitter.
        assert!(res <= last.max(1e-13), "n = {n}: {res} > {last}");
        last = res;
    }
}
