mod common;

use birkhoff_core::bnf::normalize;
use birkhoff_core::brick::sample_brick;
use birkhoff_core::genericity::{
    bad_parameter_volume, bad_volume_sweep, bnf_map, jacobian_unit_check, loglog_slope,
    order_schedule, rescale, torsion_class, RescaleContext, TorsionClass, VolumeOptions,
};
use birkhoff_core::polyalg::{bombieri_norm, ActionPolynomial, GradedPolynomial};
use proptest::prelude::*;

fn small_inputs(n: usize, m: usize, seed: u64, scale: f64) -> Vec<ActionPolynomial> {
    sample_brick(n, m, seed)
        .unwrap()
        .parts
        .iter()
        .map(|p| p.scale(scale))
        .collect()
}

#[test]
fn harmonic_base_is_its_own_normal_form() {
    let base = GradedPolynomial::linear_actions(&[1.0, 2f64.sqrt()]);
    let p = small_inputs(2, 4, 11, 0.2);
    let q = bnf_map(&base, 4, &p).unwrap();
    for k in 1..4 {
        assert_eq!(q[k], p[k], "degree {}", k + 1);
    }
    let shift = q[0].sub(&p[0]);
    assert!(shift.max_abs_diff(&ActionPolynomial::linear(&[1.0, 2f64.sqrt()])) < 1e-15);
}

#[test]
fn zero_input_gives_base_invariants() {
    let h = common::random_case(2, 3, 5);
    let q = bnf_map(&h, 3, &[]).unwrap();
    assert_eq!(q, normalize(&h, 3, 6).unwrap().invariants);
}

#[test]
fn changing_p_j_leaves_lower_invariants_untouched() {
    for seed in 0..6 {
        let h = common::random_case(2, 4, 100 + seed);
        let p = small_inputs(2, 4, seed, 0.01);
        let q = bnf_map(&h, 4, &p).unwrap();
        for j in 1..4 {
            let mut p2 = p.clone();
            p2[j] = p2[j].add(&small_inputs(2, 4, 1000 + seed, 0.5)[j]);
            let q2 = bnf_map(&h, 4, &p2).unwrap();
            assert_eq!(&q2[..j], &q[..j], "seed {seed}, perturbed degree {}", j + 1);
            assert_ne!(q2[j], q[j]);
        }
    }
}

#[test]
fn first_invariant_is_a_translation() {
    let h = common::random_case(2, 3, 9);
    let omega = normalize(&h, 3, 6).unwrap().invariants[0].clone();
    for seed in 0..5 {
        let p = small_inputs(2, 3, seed, 0.01);
        let q = bnf_map(&h, 3, &p).unwrap();
        assert!(q[0].sub(&p[0]).max_abs_diff(&omega) < 1e-15);
    }
}

#[test]
fn jacobian_is_unit_on_random_cases() {
    for (seed, n, m) in [(1u64, 1usize, 3usize), (2, 2, 2), (3, 2, 3)] {
        let h = common::random_case(n, m, 300 + seed);
        let p0 = small_inputs(n, m, seed, 0.01);
        let r = jacobian_unit_check(&h, m, &p0, 1e-4).unwrap();
        assert!(r.within(1e-6), "{r:?}");
        assert!((r.det - r.det_half_step).abs() < 1e-6);
        assert_eq!(r.max_upper_block, 0.0);
        assert!(r.max_diag_block_dev < 1e-8, "{r:?}");
    }
}

#[test]
fn lower_blocks_are_really_populated() {
    // a unit determinant must not come from an identity matrix by accident
    let h = common::random_case(2, 3, 77);
    let p0 = small_inputs(2, 3, 4, 0.01);
    let j = birkhoff_core::genericity::coefficient_jacobian(&h, 3, &p0, 1e-4).unwrap();
    let lower = (2..j.nrows())
        .flat_map(|r| (0..2).map(move |c| (r, c)))
        .fold(0.0f64, |a, rc| a.max(j[rc].abs()));
    assert!(lower > 1e-3);
}

#[test]
fn rescale_of_harmonic_is_identity() {
    let h = GradedPolynomial::linear_actions(&[1.0, 1.5]);
    let nf = normalize(&h, 2, 4).unwrap();
    for s_m in [0.1, 0.3, 0.45] {
        let ctx = RescaleContext::new(2, 2, s_m, 0.5, 1.0).unwrap();
        assert_eq!(rescale(&nf, &ctx).unwrap().to_graded(), h);
    }
}

#[test]
fn rescaled_unit_brick_invariants_stay_in_the_brick() {
    let n = 2;
    let m = 4;
    let s = sample_brick(n, m, 21).unwrap();
    let nf = birkhoff_core::bnf::NormalFormResult {
        invariants: s.parts.clone(),
        ..normalize(
            &GradedPolynomial::linear_actions(&[1.0, 2f64.sqrt()]),
            m,
            2 * m,
        )
        .unwrap()
    };
    let ctx = RescaleContext::new(n, m, 0.4, 0.5, 1.0).unwrap();
    let k = rescale(&nf, &ctx).unwrap();
    for (i, (before, after)) in s.parts.iter().zip(&k.parts).enumerate() {
        let d = i + 1;
        let factor = 0.4f64.powi(2 * d as i32 - 2);
        for (l, c) in before.terms() {
            assert_eq!(after.coeff(l), c * factor);
        }
        let nb = bombieri_norm(before, d).unwrap();
        let na = bombieri_norm(after, d).unwrap();
        assert!((na - factor * nb).abs() <= 1e-15 * nb);
        assert!(na <= 1.0);
    }
}

#[test]
fn benchmark_torsion_is_definite() {
    use birkhoff_core::builtins::convex_benchmark;
    let nf = normalize(&convex_benchmark(0.0, 1.0, 0.0), 2, 4).unwrap();
    assert_eq!(
        torsion_class(&nf.invariants[1]).unwrap().class,
        TorsionClass::Definite
    );
}

#[test]
fn definite_hessian_has_no_bad_volume_below_margin() {
    let h = ActionPolynomial::from_terms(2, [(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap();
    let opts = VolumeOptions {
        samples: 2000,
        grid: 41,
        seed: 3,
    };
    for eps in [1e-3, 0.5, 3.9] {
        assert_eq!(
            bad_parameter_volume(&h, 1.0, eps, &opts).unwrap().bad_count,
            0
        );
    }
    // above the margin squared the criterion can be met
    assert!(bad_parameter_volume(&h, 1.0, 4.5, &opts).unwrap().bad_count > 0);
}

#[test]
fn embedded_cubic_sweep_has_positive_slope() {
    let h = ActionPolynomial::monomial(2, &[3, 0], 1.0);
    let eps: Vec<f64> = (0..7).map(|i| 10f64.powf(-5.0 + 0.5 * i as f64)).collect();
    let opts = VolumeOptions {
        samples: 20_000,
        grid: 61,
        seed: 8,
    };
    let rows = bad_volume_sweep(&h, 0.5, &eps, &opts).unwrap();
    let fit = loglog_slope(&rows).unwrap();
    assert!(fit.slope > 0.0 && fit.ci_low > 0.0, "{fit:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sweep_is_monotone_in_eps(seed in 0u64..1000, c in -2.0f64..2.0) {
        let h = ActionPolynomial::from_terms(2, [(vec![3, 0], c), (vec![1, 1], 0.5), (vec![0, 2], -0.3)]).unwrap();
        let eps = [1e-4, 1e-3, 1e-2, 1e-1];
        let opts = VolumeOptions { samples: 500, grid: 21, seed };
        let rows = bad_volume_sweep(&h, 1.0, &eps, &opts).unwrap();
        for w in rows.windows(2) {
            prop_assert!(w[1].bad_count >= w[0].bad_count);
        }
    }

    #[test]
    fn order_schedule_is_monotone(r1 in 1e-8f64..0.999, r2 in 1e-8f64..0.999, a in 0.5f64..2.0) {
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(order_schedule(lo, 1.0, a).unwrap() >= order_schedule(hi, 1.0, a).unwrap());
    }

    #[test]
    fn rescale_never_grows_norms(seed in 0u64..500, s_m in 0.01f64..0.99) {
        let h = common::random_case(2, 3, seed);
        let nf = normalize(&h, 3, 6).unwrap();
        let ctx = RescaleContext::new(2, 3, s_m, 0.995, 1.0).unwrap();
        let k = rescale(&nf, &ctx).unwrap();
        for (d, (b, a)) in nf.invariants.iter().zip(&k.parts).enumerate() {
            let (nb, na) = (bombieri_norm(b, d + 1).unwrap(), bombieri_norm(a, d + 1).unwrap());
            prop_assert!(na <= nb * (1.0 + 1e-15));
        }
    }
}
