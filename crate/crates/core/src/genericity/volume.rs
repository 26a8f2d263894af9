//! Monte-Carlo proxy for the volume of frequencies `ω ∈ B_ρ` that are badly
//! placed relative to `∇h`: `ω` is bad at level `ε` iff some action-grid point
//! `I` with `||I|| ≤ 1` has `||∇h(I) − ω|| ≤ √ε` and `σ_min(∇²h(I)) ≤ √ε`.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::ActionPolynomial;
use crate::stats::{wilson_interval, Z95};

const MAX_GRID_POINTS: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeOptions {
    pub samples: usize,
    /// Points per axis of the action grid on `[−1, 1]^n`; must be odd so
    /// that `I = 0` is on the grid.
    pub grid: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadVolumeEstimate {
    pub eps: f64,
    pub rho: f64,
    pub samples: usize,
    pub bad_count: usize,
    pub bad_fraction: f64,
    /// Wilson 95% interval on the fraction.
    pub ci_low: f64,
    pub ci_high: f64,
    /// `bad_fraction · Vol(B_ρ)`
    pub volume: f64,
}

/// Volume of the Euclidean ball of radius `r` in `R^n`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    let mut v = [1.0, 2.0];
    let unit = if n < 2 {
        v[n]
    } else {
        for k in 2..=n {
            v[k % 2] *= 2.0 * PI / k as f64;
        }
        v[n % 2]
    };
    unit * r.powi(n as i32)
}

struct ActionGrid {
    n: usize,
    /// Gradients, `n` per point, ordered by ascending `sigma`.
    grads: Vec<f64>,
    sigma: Vec<f64>,
}

fn action_grid(h: &ActionPolynomial, per_axis: usize) -> Result<ActionGrid> {
    let n = h.n();
    if per_axis < 3 || per_axis.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "grid must be odd and >= 3, got {per_axis}"
        )));
    }
    let total = (per_axis as f64).powi(n as i32);
    if total > MAX_GRID_POINTS as f64 {
        return Err(Error::Domain(format!(
            "action grid of {per_axis}^{n} points is too large"
        )));
    }
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64;
    let mut points = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let p: Vec<f64> = idx.iter().map(|&i| coord(i)).collect();
        if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12 {
            points.push(p);
        }
        let mut j = 0;
        while j < n {
            idx[j] += 1;
            if idx[j] < per_axis {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == n {
            break;
        }
    }
    let mut rows: Vec<(f64, Vec<f64>)> = points
        .par_iter()
        .map(|p| {
            let s = SymmetricEigen::new(h.hessian(p))
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |a, l| a.min(l.abs()));
            (s, h.gradient(p).iter().copied().collect())
        })
        .collect();
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(ActionGrid {
        n,
        sigma: rows.iter().map(|r| r.0).collect(),
        grads: rows.into_iter().flat_map(|r| r.1).collect(),
    })
}

impl ActionGrid {
    /// Smallest `ε` at which `ω` is bad: `min_I max(||∇h − ω||, σ_min)²`.
    fn critical_eps(&self, omega: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for (i, &s) in self.sigma.iter().enumerate() {
            if s >= best {
                break;
            }
            let g = &self.grads[i * self.n..(i + 1) * self.n];
            let d = g
                .iter()
                .zip(omega)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            best = best.min(d.max(s));
        }
        best * best
    }
}

fn sample_ball(n: usize, rho: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let q: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = q.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                let u: f64 = rng.random();
                let r = rho * u.powf(1.0 / n as f64);
                break q.iter().map(|v| v / norm * r).collect();
            }
        })
        .collect()
}

/// Estimates for every `ε` in `eps`, all evaluated on one set of frequency
/// samples, so the estimate is monotone in `ε`.
pub fn bad_volume_sweep(
    h: &ActionPolynomial,
    rho: f64,
    eps: &[f64],
    opts: &VolumeOptions,
) -> Result<Vec<BadVolumeEstimate>> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::Domain(format!("eps must be positive, got {e}")));
    }
    if opts.samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    let grid = action_grid(h, opts.grid)?;
    let omegas = sample_ball(h.n(), rho, opts.samples, opts.seed);
    let crit: Vec<f64> = omegas.par_iter().map(|w| grid.critical_eps(w)).collect();
    let vol = ball_volume(h.n(), rho);
    Ok(eps
        .iter()
        .map(|&e| {
            let bad = crit.iter().filter(|&&c| c <= e).count();
            let (lo, hi) = wilson_interval(bad, opts.samples, Z95);
            let frac = bad as f64 / opts.samples as f64;
            BadVolumeEstimate {
                eps: e,
                rho,
                samples: opts.samples,
                bad_count: bad,
                bad_fraction: frac,
                ci_low: lo,
                ci_high: hi,
                volume: frac * vol,
            }
        })
        .collect())
}

pub fn bad_parameter_volume(
    h: &ActionPolynomial,
    rho: f64,
    eps: f64,
    opts: &VolumeOptions,
) -> Result<BadVolumeEstimate> {
    Ok(bad_volume_sweep(h, rho, &[eps], opts)?.remove(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Least-squares slope of `log(fraction)` against `log(ε)` over rows with
    /// a nonzero fraction.
    pub slope: f64,
    /// Slope between the extreme rows, bracketed by their Wilson intervals.
    pub endpoint_slope: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub points: usize,
}

pub fn loglog_slope(rows: &[BadVolumeEstimate]) -> Result<SlopeFit> {
    let mut pts: Vec<&BadVolumeEstimate> = rows.iter().filter(|r| r.bad_count > 0).collect();
    pts.sort_by(|a, b| a.eps.partial_cmp(&b.eps).unwrap());
    if pts.len() < 2 {
        return Err(Error::Domain(
            "need at least two rows with a nonzero bad fraction".into(),
        ));
    }
    let xs: Vec<f64> = pts.iter().map(|r| r.eps.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|r| r.bad_fraction.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain(
            "sweep needs at least two distinct eps values".into(),
        ));
    }
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    let span = last.eps.ln() - first.eps.ln();
    Ok(SlopeFit {
        slope: sxy / sxx,
        endpoint_slope: (last.bad_fraction.ln() - first.bad_fraction.ln()) / span,
        ci_low: (last.ci_low.ln() - first.ci_high.ln()) / span,
        ci_high: (last.ci_high.ln() - first.ci_low.ln()) / span,
        points: pts.len(),
    })
}

/// Columns `eps, rho, samples, bad_fraction, ci_low, ci_high, bad_count, volume`.
pub fn write_volume_csv<W: Write>(rows: &[BadVolumeEstimate], mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "eps,rho,samples,bad_fraction,ci_low,ci_high,bad_count,volume"
    )?;
    for r in rows {
        writeln!(
            w,
            "{:e},{:e},{},{:e},{:e},{:e},{},{:e}",
            r.eps, r.rho, r.samples, r.bad_fraction, r.ci_low, r.ci_high, r.bad_count, r.volume
        )?;
    }
    Ok(())
}
