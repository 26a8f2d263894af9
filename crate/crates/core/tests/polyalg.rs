mod common;

use birkhoff_core::builtins::random_hamiltonian;
use birkhoff_core::polyalg::{
    bombieri_norm, compositions, diagonalize_quadratic, poisson_bracket, ActionPolynomial,
    GradedPolynomial, SymplecticMap,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn x(j: usize) -> GradedPolynomial {
    GradedPolynomial::x(2, j)
}

fn y(j: usize) -> GradedPolynomial {
    GradedPolynomial::y(2, j)
}

/// Random complex polynomial of degree 1..=4 in two degrees of freedom.
fn random_poly(seed: u64) -> GradedPolynomial {
    let mut rng = common::rng(seed);
    let terms = (0..6).map(|_| {
        let d = rng.random_range(1..=4);
        let exps = compositions(4, d);
        let e = exps[rng.random_range(0..exps.len())].clone();
        (
            e,
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        )
    });
    GradedPolynomial::from_terms(2, terms).unwrap()
}

#[test]
fn bracket_examples() {
    let one = GradedPolynomial::from_terms(
        2,
        [(compositions(4, 0)[0].clone(), Complex64::new(1.0, 0.0))],
    )
    .unwrap();
    assert!(
        poisson_bracket(&x(0), &y(0))
            .unwrap()
            .sub(&one)
            .max_abs_coeff()
            < 1e-15
    );
    let i1 = GradedPolynomial::action(2, 0);
    let i2 = GradedPolynomial::action(2, 1);
    assert!(poisson_bracket(&i1, &i2).unwrap().is_zero());
    let lhs = poisson_bracket(&x(0).pow(2), &y(0)).unwrap();
    assert!(lhs.sub(&x(0).scale_real(2.0)).max_abs_coeff() < 1e-15);
    assert!(poisson_bracket(&x(0), &GradedPolynomial::x(1, 0)).is_err());
}

#[test]
fn action_polynomials_commute() {
    let mut rng = common::rng(17);
    for _ in 0..10 {
        let mut draw = || {
            let k = rng.random_range(1..=3);
            let terms: Vec<(Vec<u8>, f64)> = compositions(2, k)
                .into_iter()
                .map(|l| (l.as_slice().to_vec(), rng.random_range(-1.0..1.0)))
                .collect();
            ActionPolynomial::from_terms(2, terms).unwrap().to_graded()
        };
        let (h, g) = (draw(), draw());
        let b = poisson_bracket(&h, &g).unwrap();
        assert!(b.max_abs_coeff() < 1e-13, "{}", b.max_abs_coeff());
    }
}

#[test]
fn lifting_actions_matches_cartesian_formula() {
    let z = [0.3, -0.7, 1.1, 0.2];
    let i1 = ActionPolynomial::monomial(2, &[1, 0], 1.0).to_graded();
    assert!((i1.eval(&z) - 0.5 * (0.3f64.powi(2) + 1.1f64.powi(2))).abs() < 1e-15);
    let i1sq = ActionPolynomial::monomial(2, &[2, 0], 1.0).to_graded();
    assert!((i1sq.eval(&z) - (0.5 * (0.3f64.powi(2) + 1.1f64.powi(2))).powi(2)).abs() < 1e-15);
}

/// `P(R·I)` for a rotation `R` of the `(I_1, I_2)` plane.
fn rotate(p: &ActionPolynomial, th: f64) -> ActionPolynomial {
    let (c, s) = (th.cos(), th.sin());
    let u = ActionPolynomial::linear(&[c, -s]);
    let v = ActionPolynomial::linear(&[s, c]);
    let mut out = ActionPolynomial::zero(2);
    for (l, coeff) in p.terms() {
        let mut term = ActionPolynomial::monomial(2, &[0, 0], coeff);
        for _ in 0..l[0] {
            term = term.mul(&u);
        }
        for _ in 0..l[1] {
            term = term.mul(&v);
        }
        out = out.add(&term);
    }
    out
}

/// Elliptic quadratic `ω·I` pulled back by a product of symplectic shears.
fn sheared_quadratic(seed: u64) -> (GradedPolynomial, Vec<f64>) {
    let mut rng = common::rng(seed);
    let w = vec![rng.random_range(0.5..1.0), rng.random_range(1.2..2.0)];
    let sym = |rng: &mut rand_chacha::ChaCha8Rng| {
        let a = rng.random_range(-0.4..0.4);
        let b = rng.random_range(-0.4..0.4);
        let c = rng.random_range(-0.4..0.4);
        DMatrix::from_row_slice(2, 2, &[a, b, b, c])
    };
    let mut upper = DMatrix::identity(4, 4);
    upper.view_mut((0, 2), (2, 2)).copy_from(&sym(&mut rng));
    let mut lower = DMatrix::identity(4, 4);
    lower.view_mut((2, 0), (2, 2)).copy_from(&sym(&mut rng));
    let s = SymplecticMap {
        matrix: upper * lower,
    };
    assert!(s.symplectic_defect() < 1e-14);
    (
        s.pull_back(&GradedPolynomial::linear_actions(&w)).unwrap(),
        w,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_is_antisymmetric(a in 0u64..10_000, b in 0u64..10_000) {
        let (p, q) = (random_poly(a), random_poly(b));
        let pq = poisson_bracket(&p, &q).unwrap();
        let s = pq.add(&poisson_bracket(&q, &p).unwrap());
        prop_assert!(s.max_abs_coeff() <= 1e-15 * pq.max_abs_coeff().max(1.0));
    }

    #[test]
    fn jacobi_identity(a in 0u64..10_000, b in 0u64..10_000, c in 0u64..10_000) {
        let (p, q, r) = (random_poly(a), random_poly(b), random_poly(c));
        let br = |u: &GradedPolynomial, v: &GradedPolynomial| poisson_bracket(u, v).unwrap();
        let sum = br(&p, &br(&q, &r)).add(&br(&q, &br(&r, &p))).add(&br(&r, &br(&p, &q)));
        let scale = br(&p, &br(&q, &r)).max_abs_coeff().max(1.0);
        prop_assert!(sum.max_abs_coeff() < 1e-12 * scale);
    }

    #[test]
    fn bombieri_is_permutation_and_rotation_invariant(seed in 0u64..10_000, k in 1usize..=5, th in 0.0f64..6.3) {
        let mut rng = common::rng(seed);
        let terms: Vec<(Vec<u8>, f64)> = compositions(2, k)
            .into_iter()
            .map(|l| (l.as_slice().to_vec(), rng.random_range(-1.0..1.0)))
            .collect();
        let p = ActionPolynomial::from_terms(2, terms.clone()).unwrap();
        let swapped = ActionPolynomial::from_terms(2, terms.into_iter().map(|(l, c)| (vec![l[1], l[0]], c))).unwrap();
        let n0 = bombieri_norm(&p, k).unwrap();
        prop_assert!((bombieri_norm(&swapped, k).unwrap() - n0).abs() <= 1e-14 * n0);
        let nr = bombieri_norm(&rotate(&p, th), k).unwrap();
        prop_assert!((nr - n0).abs() <= 1e-12 * n0, "{} vs {}", nr, n0);
    }

    #[test]
    fn diagonalization_is_symplectic(seed in 0u64..10_000) {
        let (h2, w) = sheared_quadratic(seed);
        let (omega, t) = diagonalize_quadratic(&h2).unwrap();
        prop_assert!(t.symplectic_defect() < 1e-10);
        let residual = t.pull_back(&h2).unwrap().sub(&GradedPolynomial::linear_actions(omega.as_slice()));
        prop_assert!(residual.max_abs_coeff() < 1e-10);
        prop_assert!((omega[0] - w[0]).abs() < 1e-10 && (omega[1] - w[1]).abs() < 1e-10);
    }

    #[test]
    fn real_hamiltonians_stay_real_under_brackets(a in 0u64..10_000, b in 0u64..10_000) {
        let mut rng = common::rng(a);
        let p = random_hamiltonian(&[1.0, 1.3], 4, 4, 1.0, &mut rng);
        let mut rng = common::rng(b);
        let q = random_hamiltonian(&[0.7, 1.9], 4, 4, 1.0, &mut rng);
        let r = poisson_bracket(&p, &q).unwrap();
        prop_assert!(r.conjugate_symmetric(1e-12));
        let z = [0.1, -0.3, 0.25, 0.4];
        let v = r.eval_complex(
            &[Complex64::new(0.1, 0.25) / 2f64.sqrt(), Complex64::new(-0.3, 0.4) / 2f64.sqrt()],
            &[Complex64::new(0.1, -0.25) / 2f64.sqrt(), Complex64::new(-0.3, -0.4) / 2f64.sqrt()],
        );
        prop_assert!(v.im.abs() < 1e-12);
        prop_assert!((v.re - r.eval(&z)).abs() < 1e-12);
    }
}
