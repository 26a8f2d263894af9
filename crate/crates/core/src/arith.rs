//! Resonance and Diophantine diagnostics for frequency vectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::Frequency;

/// `|k·ω| ≤ 1e-12·||k||_1·max|ω_j|` counts as an exact resonance.
pub fn is_resonant(omega: &Frequency, k: &[i64]) -> bool {
    omega.dot(k).abs() <= resonance_guard(omega, k)
}

fn resonance_guard(omega: &Frequency, k: &[i64]) -> f64 {
    let l1: i64 = k.iter().map(|v| v.abs()).sum();
    1e-12 * l1 as f64 * omega.max_abs()
}

fn l1(k: &[i64]) -> i64 {
    k.iter().map(|v| v.abs()).sum()
}

/// Calls `f` on every `k ∈ ℤⁿ` with `||k||_1 = order` whose first nonzero entry
/// is positive, in lexicographically decreasing order.
pub fn for_each_l1_shell(n: usize, order: usize, mut f: impl FnMut(&[i64]) -> bool) {
    fn rec(
        k: &mut Vec<i64>,
        n: usize,
        left: i64,
        leading: bool,
        f: &mut dyn FnMut(&[i64]) -> bool,
    ) -> bool {
        if k.len() == n {
            return left != 0 || f(k);
        }
        if k.len() + 1 == n {
            let opts: &[i64] = if left == 0 {
                &[0]
            } else if leading {
                &[1]
            } else {
                &[1, -1]
            };
            for &s in opts {
                k.push(s * left);
                let go = rec(k, n, 0, false, f);
                k.pop();
                if !go {
                    return false;
                }
            }
            return true;
        }
        for v in (-left..=left).rev() {
            if leading && v < 0 {
                continue;
            }
            k.push(v);
            let go = rec(k, n, left - v.abs(), leading && v == 0, f);
            k.pop();
            if !go {
                return false;
            }
        }
        true
    }
    if order == 0 || n == 0 {
        return;
    }
    let mut k = Vec::with_capacity(n);
    rec(&mut k, n, order as i64, true, &mut f);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub order: usize,
    pub k: Vec<i64>,
}

/// Smallest `||k||_1 ≤ max_order` with `k·ω = 0` up to the guard.
pub fn resonance_order(omega: &Frequency, max_order: usize) -> Option<Resonance> {
    for order in 1..=max_order {
        let mut hit = None;
        for_each_l1_shell(omega.n(), order, |k| {
            if is_resonant(omega, k) {
                hit = Some(k.to_vec());
                false
            } else {
                true
            }
        });
        if let Some(k) = hit {
            return Some(Resonance { order, k });
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiophantineReport {
    pub omega: Frequency,
    pub tau: f64,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub gamma_k: f64,
    pub worst_k: Vec<i64>,
    pub resonance_order: Option<usize>,
    /// `gamma_K'` for `K' = 1..=K`.
    pub running_gamma: Vec<f64>,
}

#[derive(Clone, Debug)]
struct ShellBest {
    value: f64,
    k: Vec<i64>,
}

fn better(a: &ShellBest, b: &ShellBest) -> bool {
    a.value < b.value || (a.value == b.value && a.k < b.k)
}

/// `min_{0 < ||k||_∞ ≤ K} |k·ω|·||k||_∞^τ`, scanning the box exhaustively with
/// the sign of the first nonzero entry fixed.
pub fn diophantine_gamma(omega: &Frequency, tau: f64, k_max: usize) -> Result<DiophantineReport> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    if k_max == 0 {
        return Err(Error::Domain("cutoff K must be at least 1".into()));
    }
    let n = omega.n();
    let kk = k_max as i64;
    let w = omega.as_slice();

    // Per shell: best (value, k), and smallest L1 norm of a resonant vector.
    let scan = |k0: i64| -> (Vec<Option<ShellBest>>, Option<i64>) {
        let mut best: Vec<Option<ShellBest>> = vec![None; k_max + 1];
        let mut res_l1: Option<i64> = None;
        let mut k = vec![-kk; n];
        k[0] = k0;
        loop {
            let first = k.iter().find(|&&v| v != 0);
            if let Some(&f) = first {
                if f > 0 {
                    let shell = k.iter().map(|v| v.abs()).max().unwrap() as usize;
                    let dot: f64 = k.iter().zip(w).map(|(&a, b)| a as f64 * b).sum();
                    let resonant = dot.abs() <= resonance_guard(omega, &k);
                    let value = if resonant {
                        0.0
                    } else {
                        dot.abs() * (shell as f64).powf(tau)
                    };
                    if resonant {
                        let l = l1(&k);
                        res_l1 = Some(res_l1.map_or(l, |r| r.min(l)));
                    }
                    let cand = ShellBest {
                        value,
                        k: k.clone(),
                    };
                    match &best[shell] {
                        Some(b) if !better(&cand, b) => {}
                        _ => best[shell] = Some(cand),
                    }
                }
            }
            // odometer over entries 1..n
            let mut i = n;
            loop {
                if i == 1 {
                    return (best, res_l1);
                }
                i -= 1;
                if k[i] < kk {
                    k[i] += 1;
                    break;
                }
                k[i] = -kk;
            }
        }
    };

    let parts: Vec<_> = (0..=kk).into_par_iter().map(scan).collect();
    let mut best: Vec<Option<ShellBest>> = vec![None; k_max + 1];
    let mut res_l1: Option<i64> = None;
    for (b, r) in parts {
        for (slot, cand) in best.iter_mut().zip(b) {
            if let Some(c) = cand {
                match slot {
                    Some(s) if !better(&c, s) => {}
                    _ => *slot = Some(c),
                }
            }
        }
        if let Some(r) = r {
            res_l1 = Some(res_l1.map_or(r, |x| x.min(r)));
        }
    }

    let mut running = Vec::with_capacity(k_max);
    let mut overall: Option<ShellBest> = None;
    for b in best.into_iter().skip(1).flatten() {
        // strict improvement only, so ties keep the smaller shell
        if overall.as_ref().is_none_or(|o| b.value < o.value) {
            overall = Some(b);
        }
        running.push(overall.as_ref().unwrap().value);
    }
    let overall = overall.expect("K ≥ 1 gives a nonempty scan");
    Ok(DiophantineReport {
        omega: omega.clone(),
        tau,
        k_max,
        gamma_k: overall.value,
        worst_k: overall.k,
        resonance_order: res_l1.filter(|&r| r <= kk).map(|r| r as usize),
        running_gamma: running,
    })
}
