mod common;

use birkhoff_core::bnf::normalize;
use birkhoff_core::brick::{brick_to_hamiltonian, perturb, sample_brick, BrickSample};
use birkhoff_core::polyalg::{
    bombieri_norm, compositions, homogeneous_dim, multinomial, sup_norm_bound, ActionPolynomial,
    GradedPolynomial,
};
use birkhoff_core::stats::{ks_uniform, welch_t};

#[test]
fn norms_and_radial_law() {
    let (n, m) = (2, 3);
    let mut radial: Vec<Vec<f64>> = vec![Vec::new(); m];
    for seed in 0..3000 {
        let s = sample_brick(n, m, seed).unwrap();
        for (i, p) in s.parts.iter().enumerate() {
            let r = bombieri_norm(p, i + 1).unwrap();
            assert!(r <= 1.0);
            radial[i].push(r.powi(homogeneous_dim(n, i + 1) as i32));
        }
    }
    for (i, r) in radial.iter().enumerate() {
        let (_, p) = ks_uniform(r);
        assert!(p > 0.01, "degree {}: p = {p}", i + 1);
    }
}

#[test]
fn coefficient_means_vanish() {
    let draws = 4000;
    let mut sums = [0.0; 3];
    let mut sq = [0.0; 3];
    for seed in 0..draws {
        let v = sample_brick(2, 2, seed).unwrap().parts[1].coefficient_vector(2);
        for j in 0..3 {
            sums[j] += v[j];
            sq[j] += v[j] * v[j];
        }
    }
    for j in 0..3 {
        let mean = sums[j] / draws as f64;
        let sd = (sq[j] / draws as f64 - mean * mean).sqrt();
        assert!(
            mean.abs() < 3.0 * sd / (draws as f64).sqrt(),
            "coefficient {j}"
        );
    }
}

#[test]
fn seeds_are_reproducible_through_json() {
    let a = serde_json::to_string(&sample_brick(3, 4, 42).unwrap()).unwrap();
    let b = serde_json::to_string(&sample_brick(3, 4, 42).unwrap()).unwrap();
    assert_eq!(a, b);
    let back: BrickSample = serde_json::from_str(&a).unwrap();
    assert_eq!(back, sample_brick(3, 4, 42).unwrap());
    assert_ne!(sample_brick(3, 4, 43).unwrap(), back);
}

#[test]
fn extension_matches_direct_sampling_in_law() {
    // degree-4 parts from extended m=2 samples versus direct m=4 samples on disjoint seeds
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for seed in 0..1500u64 {
        let ext = sample_brick(2, 2, seed).unwrap().extend_to(4);
        let direct = sample_brick(2, 4, 100_000 + seed).unwrap();
        a.push(ext.parts[3].coefficient_vector(4));
        b.push(direct.parts[3].coefficient_vector(4));
    }
    for j in 0..5 {
        let xa: Vec<f64> = a.iter().map(|v| v[j]).collect();
        let xb: Vec<f64> = b.iter().map(|v| v[j]).collect();
        assert!(welch_t(&xa, &xb).abs() < 4.0, "mean of coefficient {j}");
        let sa: Vec<f64> = xa.iter().map(|v| v * v).collect();
        let sb: Vec<f64> = xb.iter().map(|v| v * v).collect();
        assert!(
            welch_t(&sa, &sb).abs() < 4.0,
            "second moment of coefficient {j}"
        );
    }
}

#[test]
fn lifted_examples() {
    let s = BrickSample {
        seed: 0,
        n: 1,
        m: 2,
        parts: vec![ActionPolynomial::linear(&[1.0]), ActionPolynomial::zero(1)],
    };
    let h = brick_to_hamiltonian(&s);
    assert!((h.eval(&[0.3, 0.4]) - 0.125).abs() < 1e-15);
    let s = BrickSample {
        parts: vec![
            ActionPolynomial::zero(1),
            ActionPolynomial::monomial(1, &[2], 1.0),
        ],
        ..s
    };
    assert!((brick_to_hamiltonian(&s).eval(&[0.3, 0.4]) - 0.125f64.powi(2)).abs() < 1e-15);
}

#[test]
fn sup_bound_is_below_unit_ball_majorant() {
    let s_rad = 0.5;
    for seed in 0..20 {
        let s = sample_brick(2, 3, seed).unwrap();
        let got = sup_norm_bound(&brick_to_hamiltonian(&s), s_rad).unwrap();
        // |p_l| ≤ sqrt(C_k^l) on the unit Bombieri ball, then the triangle inequality term by term
        let mut bound = 0.0;
        for k in 1..=3 {
            for l in compositions(2, k) {
                let lift = ActionPolynomial::monomial(2, l.as_slice(), 1.0).to_graded();
                bound += multinomial(l.as_slice()).sqrt() * sup_norm_bound(&lift, s_rad).unwrap();
            }
        }
        assert!(got.is_finite() && got <= bound * (1.0 + 1e-12));
    }
}

#[test]
fn perturbation_examples() {
    let h = common::random_case(2, 2, 8);
    let zero = BrickSample {
        seed: 0,
        n: 2,
        m: 2,
        parts: vec![ActionPolynomial::zero(2); 2],
    };
    assert_eq!(perturb(&h, &zero).unwrap().0, h);
    assert!(perturb(&GradedPolynomial::linear_actions(&[1.0]), &zero).is_err());

    // without cubic terms the order-2 invariant is the bare degree-4 action part
    let base = GradedPolynomial::linear_actions(&[1.0, 2f64.sqrt()]).add(
        &ActionPolynomial::from_terms(2, [(vec![1, 1], 0.3)])
            .unwrap()
            .to_graded(),
    );
    let mut s = sample_brick(2, 2, 9).unwrap();
    s.parts[0] = ActionPolynomial::zero(2);
    let (hp, w) = perturb(&base, &s).unwrap();
    assert_eq!(w.as_slice(), &[1.0, 2f64.sqrt()]);
    let b2 = normalize(&hp, 2, 4).unwrap().invariants[1].clone();
    let b2_base = normalize(&base, 2, 4).unwrap().invariants[1].clone();
    assert!(b2.sub(&b2_base.add(&s.parts[1])).max_abs_coeff() < 1e-15);
}
