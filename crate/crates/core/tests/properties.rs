use std::f64::consts::PI;

use nhqc_core::bessel::bessel_j;
use nhqc_core::operator::{kron, matrix_exp};
use nhqc_core::svd::{f_block, k_block, svd_f, svd_k};
use nhqc_core::{ComplexMatrix, C64};
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n)
        .prop_map(move |v| ComplexMatrix::from_fn(n, n, |r, c| C64::new(v[2 * (r * n + c)], v[2 * (r * n + c) + 1])))
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|m| (&m + &m.dagger()).scale_real(0.5))
}

/// `J_m(β) = (1/2π)∫₀^{2π} cos(mτ − β sin τ) dτ`; the trapezoid rule is
/// spectrally accurate for this periodic integrand.
fn bessel_by_quadrature(m: u32, beta: f64) -> f64 {
    let n = 512;
    (0..n)
        .map(|k| {
            let tau = 2.0 * PI * k as f64 / n as f64;
            (m as f64 * tau - beta * tau.sin()).cos()
        })
        .sum::<f64>()
        / n as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn single_qubit_block_factorizes(theta in 0.0f64..4.0 * PI, phi in -PI..PI) {
        let f = svd_f(theta, phi);
        let product = &(&f.w * &f.q) * &f.r_dag;
        prop_assert!((&product - &f_block(theta, phi)).max_abs() <= 1e-12);
        prop_assert!(f.w.unitarity_deviation() <= 1e-12);
        prop_assert!(f.r_dag.unitarity_deviation() <= 1e-12);
    }

    #[test]
    fn two_qubit_block_factorizes(vartheta in 0.0f64..4.0 * PI, varphi in -PI..PI) {
        let k = svd_k(vartheta, varphi);
        let product = &(&k.x * &k.y) * &k.z_dag;
        prop_assert!((&product - &k_block(vartheta, varphi)).max_abs() <= 1e-12);
        prop_assert!(k.x.unitarity_deviation() <= 1e-12);
        prop_assert!(k.z_dag.unitarity_deviation() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_mixed_product(a in matrix(2), b in matrix(3), c in matrix(2), d in matrix(3)) {
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-12);
    }

    #[test]
    fn exponential_is_unitary(h in hermitian(9), t in -5.0f64..5.0) {
        let u = matrix_exp(&h, t).unwrap();
        prop_assert!(u.unitarity_deviation() <= 1e-10);
    }

    #[test]
    fn exponential_composes(h in hermitian(4), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let lhs = &matrix_exp(&h, s).unwrap() * &matrix_exp(&h, t).unwrap();
        prop_assert!((&lhs - &matrix_exp(&h, s + t).unwrap()).max_abs() <= 1e-10);
    }

    #[test]
    fn bessel_recurrence_holds(beta in 0.05f64..20.0, m in 1u32..8) {
        let lhs = bessel_j(m - 1, beta).unwrap() + bessel_j(m + 1, beta).unwrap();
        let rhs = 2.0 * m as f64 / beta * bessel_j(m, beta).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn bessel_matches_integral(beta in 0.0f64..20.0, m in 0u32..6) {
        prop_assert!((bessel_j(m, beta).unwrap() - bessel_by_quadrature(m, beta)).abs() <= 1e-12);
    }
}

#[test]
fn bessel_recurrence_at_reference_indices() {
    for beta in [0.5, 1.6, 3.0] {
        for m in 1..=5u32 {
            let lhs = bessel_j(m - 1, beta).unwrap() + bessel_j(m + 1, beta).unwrap();
            let rhs = 2.0 * m as f64 / beta * bessel_j(m, beta).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10, "m={m} beta={beta}");
        }
    }
}
