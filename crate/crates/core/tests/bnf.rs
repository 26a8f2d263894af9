mod common;

use birkhoff_core::bnf::{
    diagonalize_hamiltonian, invariant_uniqueness_check, normalize, normalize_with, remainder_norm,
    transport_residual, NormalizeOptions, NormalizingMap,
};
use birkhoff_core::builtins::{cubic_1dof, quartic_1dof};
use birkhoff_core::polyalg::{symplectic_j, GradedPolynomial, Precision};
use birkhoff_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn quartic_invariant_matches_angle_average() {
    for c in [0.2, -0.7, 1.3] {
        let oracle = common::quartic_average_oracle(c);
        assert!(
            (oracle - 1.5 * c).abs() < 1e-12 * c.abs(),
            "oracle {oracle}"
        );
        let nf = normalize(&quartic_1dof(c), 2, 6).unwrap();
        let b2 = nf.invariants[1].coeff(&[2]);
        assert!(
            (b2 - oracle).abs() <= 1e-10 * oracle.abs(),
            "{b2} vs {oracle}"
        );
    }
}

#[test]
fn cubic_invariant_matches_measured_frequency_shift() {
    let c = 0.1;
    let dv = move |x: f64| 3.0 * c * x * x;
    // h(J) = J + B2 J² ⇒ dω/dJ = 2·B2
    let measured = common::frequency_slope(&dv) / 2.0;
    let nf = normalize(&cubic_1dof(c), 2, 6).unwrap();
    let b2 = nf.invariants[1].coeff(&[2]);
    assert!((b2 + 3.75 * c * c).abs() < 1e-12, "engine gives {b2}");
    assert!(
        (measured - b2).abs() < 1e-4 * b2.abs(),
        "measured {measured}, engine {b2}"
    );
}

#[test]
fn quartic_remainder_scales_with_degree_seven() {
    let nf = normalize(&quartic_1dof(1.0), 3, 8).unwrap();
    assert!(nf.remainder.min_degree().unwrap() >= 7);
    let ratios: Vec<f64> = [0.25, 0.125, 0.0625, 1.0 / 32.0, 1.0 / 64.0]
        .iter()
        .map(|&s| remainder_norm(&nf, s).unwrap() / s.powi(7))
        .collect();
    for w in ratios.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12));
    }
    assert!(ratios.last().unwrap().is_finite() && *ratios.last().unwrap() >= 0.0);
}

#[test]
fn remainder_norm_of_single_monomial() {
    // ζ⁵ = ((x + iy)/√2)⁵; the binomial coefficient moduli sum to 2⁵/√2⁵.
    let mut nf = normalize(&GradedPolynomial::linear_actions(&[1.0]), 2, 6).unwrap();
    nf.remainder = GradedPolynomial::monomial(1, &[5], &[0], Complex64::new(1.0, 0.0));
    let s: f64 = 0.5;
    let expect = s.powi(5) * 2f64.powi(5) / 2f64.sqrt().powi(5);
    assert!((remainder_norm(&nf, s).unwrap() - expect).abs() < 1e-14);
    assert!(matches!(remainder_norm(&nf, 0.0), Err(Error::Domain(_))));
}

#[test]
fn transported_hamiltonian_matches_normal_form() {
    for seed in 0..6 {
        let n = 1 + (seed as usize % 3);
        let h = common::random_case(n, 3, seed);
        let nf = normalize(&h, 3, 8).unwrap();
        let r = transport_residual(&h, &nf).unwrap();
        assert!(r < 1e-9, "seed {seed}: relative residual {r}");
        assert!(nf.remainder.min_degree().is_none_or(|d| d >= 7));
        for b in &nf.invariants {
            assert!(b.terms().all(|(_, c)| c.is_finite()));
        }
    }
}

#[test]
fn normalizing_map_pulls_back_hamiltonian() {
    let h = common::random_case(2, 2, 11);
    let nf = normalize(&h, 2, 6).unwrap();
    let phi = NormalizingMap::new(&nf, 64).unwrap();
    let target = nf.normalized_hamiltonian();
    for z in [[0.01, -0.02, 0.015, 0.005], [0.02, 0.01, -0.01, 0.02]] {
        let w = phi.apply(&z).unwrap();
        let lhs = h.eval(&w);
        let rhs = target.eval(&z);
        // agreement up to the truncation order (|z|^7 ≈ 1e-12) and flow error
        assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }
}

#[test]
fn normalizing_map_is_symplectic() {
    let h = common::random_case(2, 3, 5);
    let nf = normalize(&h, 3, 8).unwrap();
    let phi = NormalizingMap::new(&nf, 16).unwrap();
    let s_m = 0.1;
    let j = symplectic_j(2);
    let mut r = common::rng(99);
    for _ in 0..100 {
        let z: Vec<f64> = loop {
            let z: Vec<f64> = (0..4).map(|_| r.random_range(-s_m..s_m)).collect();
            if z.iter().map(|v| v * v).sum::<f64>() <= s_m * s_m {
                break z;
            }
        };
        let m = phi.jacobian(&z, 1e-5).unwrap();
        let defect = (m.transpose() * &j * &m - &j).amax();
        assert!(defect < 1e-8, "defect {defect}");
    }
}

#[test]
fn extended_precision_agrees() {
    let h = common::random_case(2, 3, 21);
    let a = normalize(&h, 3, 8).unwrap();
    let b = normalize_with(
        &h,
        NormalizeOptions::new(3)
            .trunc(8)
            .precision(Precision::DoubleDouble),
    )
    .unwrap();
    assert_eq!(b.report().mantissa_bits, 106);
    for (x, y) in a.invariants.iter().zip(&b.invariants) {
        assert!(x.max_abs_diff(y) <= 1e-10 * x.max_abs_coeff().max(1e-300));
    }
}

#[test]
fn quartic_uniqueness_example() {
    assert!(invariant_uniqueness_check(&quartic_1dof(1.0), 2, 4, 8).unwrap());
    assert!(invariant_uniqueness_check(
        &GradedPolynomial::linear_actions(&[1.0, 3f64.sqrt()]),
        3,
        6,
        11
    )
    .unwrap());
}

#[test]
fn non_diagonal_input_through_diagonalization() {
    // (y² + 4x²)/2 + x⁴: diagonalize, then B2 follows from x = X/√2.
    let x = GradedPolynomial::x(1, 0);
    let y = GradedPolynomial::y(1, 0);
    let h = y
        .mul(&y)
        .add(&x.mul(&x).scale_real(4.0))
        .scale_real(0.5)
        .add(&x.pow(4));
    let (_, ht) = diagonalize_hamiltonian(&h).unwrap();
    let nf = normalize(&ht, 2, 6).unwrap();
    assert!((nf.omega[0] - 2.0).abs() < 1e-12);
    // x⁴ = X⁴/4 ⇒ B2 = (3/2)/4
    assert!((nf.invariants[1].coeff(&[2]) - 0.375).abs() < 1e-12);
}

#[test]
fn report_serializes_with_schema_version() {
    let nf = normalize(&GradedPolynomial::linear_actions(&[1.0, 2f64.sqrt()]), 2, 6).unwrap();
    let v = serde_json::to_value(nf.report()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["invariants"][0]["terms"].as_array().unwrap().len(), 2);
    assert!(v["invariants"][1]["terms"].as_array().unwrap().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_do_not_depend_on_truncation(seed in 0u64..10_000, n in 1usize..=3, m in 2usize..=5) {
        // keep n = 3 at modest order so the suite stays fast
        let m = if n == 3 { m.min(3) } else { m };
        let h = common::random_case(n, m, seed);
        prop_assert!(invariant_uniqueness_check(&h, m, 2 * m, 2 * m + 3).unwrap());
    }

    #[test]
    fn real_input_gives_real_invariants(seed in 0u64..10_000) {
        let h = common::random_case(2, 3, seed);
        let nf = normalize(&h, 3, 8).unwrap();
        prop_assert!(nf.remainder.is_real());
        prop_assert!(nf.generators.iter().all(|g| g.is_real()));
        // the action part came out of Re(); verify nothing was discarded
        let ht = nf.normalized_hamiltonian();
        prop_assert!(ht.conjugate_symmetric(1e-10));
    }
}
