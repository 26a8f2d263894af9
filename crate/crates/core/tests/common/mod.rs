#![allow(dead_code)]

use birkhoff_core::arith::resonance_order;
use birkhoff_core::builtins::random_hamiltonian;
use birkhoff_core::polyalg::{Frequency, GradedPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Frequencies in `[0.6, 1.0] × [1.3, 1.9] × …` with no resonance through `order`.
pub fn random_frequency(n: usize, order: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n)
            .map(|j| rng.random_range(0.6..1.0) + 0.7 * j as f64)
            .collect();
        let f = Frequency::new(w.clone()).unwrap();
        // keep divisors comfortably away from zero
        let ok = resonance_order(&f, order).is_none()
            && (1..=order).all(|o| {
                let mut fine = true;
                birkhoff_core::arith::for_each_l1_shell(n, o, |k| {
                    fine = f.dot(k).abs() > 1e-3;
                    fine
                });
                fine
            });
        if ok {
            return w;
        }
    }
}

pub fn random_case(n: usize, m: usize, seed: u64) -> GradedPolynomial {
    let mut r = rng(seed);
    let w = random_frequency(n, 2 * m, &mut r);
    random_hamiltonian(&w, 2 * m + 2, 6, 0.5, &mut r)
}

/// Angle average of `c·x⁴` at action `I`, divided by `I²`.
pub fn quartic_average_oracle(c: f64) -> f64 {
    let steps = 4096;
    let i: f64 = 0.37;
    let mut acc = 0.0;
    for s in 0..steps {
        let th = std::f64::consts::TAU * s as f64 / steps as f64;
        let x = (2.0 * i).sqrt() * th.cos();
        acc += c * x.powi(4);
    }
    acc / steps as f64 / (i * i)
}

fn rk4(f: &dyn Fn(&[f64; 3]) -> [f64; 3], s: &[f64; 3], h: f64) -> [f64; 3] {
    let add =
        |a: &[f64; 3], b: &[f64; 3], t: f64| [a[0] + t * b[0], a[1] + t * b[1], a[2] + t * b[2]];
    let k1 = f(s);
    let k2 = f(&add(s, &k1, h / 2.0));
    let k3 = f(&add(s, &k2, h / 2.0));
    let k4 = f(&add(s, &k3, h));
    let mut out = *s;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// One period of `H = (x² + y²)/2 + V(x)` started at the turning point `(x0, 0)`.
/// Returns `(ω, J)` with `J = (1/2π)∮ y dx`.
pub fn frequency_and_action(dv: &dyn Fn(f64) -> f64, x0: f64) -> (f64, f64) {
    let f = |s: &[f64; 3]| [s[1], -(s[0] + dv(s[0])), s[1] * s[1]];
    let h = 1e-3;
    let mut s = [x0, 0.0, 0.0];
    let mut t = 0.0;
    let mut was_positive = false;
    loop {
        let next = rk4(&f, &s, h);
        if next[1] > 0.0 {
            was_positive = true;
        }
        if was_positive && s[1] > 0.0 && next[1] <= 0.0 {
            // bisect on the sub-step length for y = 0
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if rk4(&f, &s, mid)[1] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let end = rk4(&f, &s, lo);
            let period = t + lo;
            return (
                std::f64::consts::TAU / period,
                end[2] / std::f64::consts::TAU,
            );
        }
        s = next;
        t += h;
    }
}

/// `dω/dJ` at `J = 0` from a cubic least-squares fit of `ω(J) − 1`.
pub fn frequency_slope(dv: &dyn Fn(f64) -> f64) -> f64 {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..8 {
        let x0 = 0.02 * (1.0 + i as f64 * 0.25);
        let (w, j) = frequency_and_action(dv, x0);
        rows.push([j, j * j, j * j * j]);
        rhs.push(w - 1.0);
    }
    let a = nalgebra::DMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
    let b = nalgebra::DVector::from_vec(rhs);
    let sol = a.svd(true, true).solve(&b, 1e-18).unwrap();
    sol[0]
}
