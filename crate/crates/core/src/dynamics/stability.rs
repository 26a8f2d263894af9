use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::{check_step, integrate_streaming, norm, IntegrateOptions};
use crate::error::{Error, Result};
use crate::polyalg::{formal_actions, GradedPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitTime {
    /// First time with `|I(t) − I(0)| > C·ρ`, or `T_max` when censored.
    pub time: f64,
    pub censored: bool,
    /// The trajectory left the escape ball before the drift threshold was met.
    pub escaped: bool,
}

/// Phase point with actions `I` and angles `φ`: `x = √(2I) cos φ`, `y = √(2I) sin φ`.
pub fn point_from_actions(actions: &[f64], phases: &[f64]) -> Vec<f64> {
    let n = actions.len();
    let mut z = vec![0.0; 2 * n];
    for j in 0..n {
        let r = (2.0 * actions[j]).sqrt();
        z[j] = r * phases[j].cos();
        z[n + j] = r * phases[j].sin();
    }
    z
}

pub fn stability_time(
    h: &GradedPolynomial,
    z0: &[f64],
    c: f64,
    t_max: f64,
    dt: f64,
    opts: &IntegrateOptions,
) -> Result<ExitTime> {
    let steps = check_step(dt, t_max)?;
    if !(c > 1.0) {
        return Err(Error::Domain(format!(
            "drift multiple C must exceed 1, got {c}"
        )));
    }
    let i0 = formal_actions(z0);
    let rho = norm(&i0);
    if !(rho > 0.0) {
        return Err(Error::Domain("initial point has zero action".into()));
    }
    let threshold = c * rho;
    let escape = opts.escape_radius();
    let mut out = ExitTime {
        time: steps as f64 * dt,
        censored: true,
        escaped: false,
    };
    integrate_streaming(h, z0, dt, steps, |s, z| {
        let mut d2 = 0.0;
        let n = i0.len();
        for j in 0..n {
            let a = 0.5 * (z[j] * z[j] + z[n + j] * z[n + j]) - i0[j];
            d2 += a * a;
        }
        let escaped = norm(z) > escape;
        if d2.sqrt() > threshold || escaped {
            out = ExitTime {
                time: s as f64 * dt,
                censored: false,
                escaped: escaped && d2.sqrt() <= threshold,
            };
            return false;
        }
        true
    })?;
    Ok(out)
}

/// Unit direction in action space plus initial angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDirection {
    pub id: usize,
    pub weights: Vec<f64>,
    pub phases: Vec<f64>,
}

impl InitialDirection {
    pub fn point(&self, rho: f64) -> Vec<f64> {
        let actions: Vec<f64> = self.weights.iter().map(|w| w * rho).collect();
        point_from_actions(&actions, &self.phases)
    }
}

/// The fixed set `θ ∈ {0, π/4, π/2}` with zero phases, followed by `random`
/// seeded directions in the positive orthant with uniform phases.
///
/// For `n = 2` the fixed set is `I ∝ (cos θ, sin θ)`; in general `θ = 0` and
/// `θ = π/2` are the first and last axes and `θ = π/4` the diagonal. For
/// `n = 1` the three collapse to one.
pub fn initial_directions(n: usize, random: usize, seed: u64) -> Vec<InitialDirection> {
    let mut fixed: Vec<Vec<f64>> = Vec::new();
    for th in [0.0, FRAC_PI_4, FRAC_PI_2] {
        let w = if n == 1 {
            vec![1.0]
        } else if n == 2 {
            vec![f64::cos(th).max(0.0), f64::sin(th)]
        } else if th == 0.0 {
            (0..n).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect()
        } else if th == FRAC_PI_2 {
            (0..n).map(|j| if j == n - 1 { 1.0 } else { 0.0 }).collect()
        } else {
            vec![1.0 / (n as f64).sqrt(); n]
        };
        let w: Vec<f64> = w
            .iter()
            .map(|v| if v.abs() < 1e-15 { 0.0 } else { *v })
            .collect();
        if !fixed.contains(&w) {
            fixed.push(w);
        }
    }
    let mut out: Vec<InitialDirection> = fixed
        .into_iter()
        .map(|weights| InitialDirection {
            id: 0,
            weights,
            phases: vec![0.0; n],
        })
        .collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..random {
        let w: Vec<f64> = loop {
            let q: Vec<f64> = (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal).abs())
                .collect();
            let r = norm(&q);
            if r > 0.0 {
                break q.iter().map(|v| v / r).collect();
            }
        };
        let phases = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        out.push(InitialDirection {
            id: 0,
            weights: w,
            phases,
        });
    }
    for (i, d) in out.iter_mut().enumerate() {
        d.id = i;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub rho: f64,
    pub direction_id: usize,
    pub exit_time: f64,
    pub censored: bool,
    pub escaped: bool,
}

/// `log T = p·log(1/ρ) + c`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFit {
    pub p: f64,
    pub c: f64,
    pub rss: f64,
}

/// `log T = c·ρ^{−a} + b`, with `a` searched on a grid over `[0.1, 4]`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub a: f64,
    pub c: f64,
    pub b: f64,
    pub rss: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetterModel {
    Polynomial,
    Exponential,
    /// Too few uncensored rows to compare.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub points: usize,
    pub polynomial: Option<PolynomialFit>,
    pub exponential: Option<ExponentialFit>,
    /// Chosen by AIC, which charges the exponential model its extra parameter;
    /// an exponential optimum at `a = EXP_A_MIN` counts as polynomial.
    pub better: BetterModel,
    /// Radii where every direction was censored: `T(ρ) ≥ T_max` only.
    pub lower_bound_rhos: Vec<f64>,
    pub all_censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCurve {
    pub rhos: Vec<f64>,
    /// Minimum over directions per radius.
    pub exit_times: Vec<f64>,
    pub censored: Vec<bool>,
    #[serde(rename = "C")]
    pub c: f64,
    pub t_max: f64,
    pub dt: f64,
    pub rows: Vec<ScalingRow>,
    pub fit: FitReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingOptions {
    #[serde(rename = "C")]
    pub c: f64,
    pub t_max: f64,
    pub dt: f64,
    pub domain_radius: f64,
}

pub fn scaling_experiment(
    h: &GradedPolynomial,
    rhos: &[f64],
    directions: &[InitialDirection],
    opts: &ScalingOptions,
) -> Result<StabilityCurve> {
    if rhos.is_empty() || directions.is_empty() {
        return Err(Error::Domain(
            "need at least one radius and one direction".into(),
        ));
    }
    if rhos.windows(2).any(|w| !(w[1] < w[0])) || rhos.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Domain(
            "radii must be positive and strictly decreasing".into(),
        ));
    }
    let iopts = IntegrateOptions {
        domain_radius: opts.domain_radius,
        stride: 1,
    };
    let tasks: Vec<(f64, &InitialDirection)> = rhos
        .iter()
        .flat_map(|&r| directions.iter().map(move |d| (r, d)))
        .collect();
    let rows: Vec<ScalingRow> = tasks
        .par_iter()
        .map(|(rho, d)| {
            let e = stability_time(h, &d.point(*rho), opts.c, opts.t_max, opts.dt, &iopts)?;
            Ok(ScalingRow {
                rho: *rho,
                direction_id: d.id,
                exit_time: e.time,
                censored: e.censored,
                escaped: e.escaped,
            })
        })
        .collect::<Result<_>>()?;
    let mut exit_times = Vec::with_capacity(rhos.len());
    let mut censored = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let mine = rows.iter().filter(|r| r.rho == rho);
        let best = mine
            .filter(|r| !r.censored)
            .map(|r| r.exit_time)
            .fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            exit_times.push(best);
            censored.push(false);
        } else {
            exit_times.push(rows.iter().find(|r| r.rho == rho).unwrap().exit_time);
            censored.push(true);
        }
    }
    let fit = fit_scaling(rhos, &exit_times, &censored);
    Ok(StabilityCurve {
        rhos: rhos.to_vec(),
        exit_times,
        censored,
        c: opts.c,
        t_max: opts.t_max,
        dt: opts.dt,
        rows,
        fit,
    })
}

fn linear_ls(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let rss = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - icpt).powi(2))
        .sum();
    (slope, icpt, rss)
}

/// Smallest exponent `a` tried by the exponential fit.
pub const EXP_A_MIN: f64 = 0.1;

fn aic(rss: f64, k: usize, params: usize) -> f64 {
    let k = k as f64;
    k * (rss.max(1e-300) / k).ln() + 2.0 * params as f64
}

/// Least-squares fits of both stability models on the uncensored rows.
pub fn fit_scaling(rhos: &[f64], times: &[f64], censored: &[bool]) -> FitReport {
    let used: Vec<(f64, f64)> = rhos
        .iter()
        .zip(times)
        .zip(censored)
        .filter(|(_, c)| !**c)
        .map(|((r, t), _)| (*r, t.ln()))
        .collect();
    let lower_bound_rhos: Vec<f64> = rhos
        .iter()
        .zip(censored)
        .filter(|(_, c)| **c)
        .map(|(r, _)| *r)
        .collect();
    let ys: Vec<f64> = used.iter().map(|u| u.1).collect();
    let polynomial = (used.len() >= 2).then(|| {
        let xs: Vec<f64> = used.iter().map(|u| (1.0 / u.0).ln()).collect();
        let (p, c, rss) = linear_ls(&xs, &ys);
        PolynomialFit { p, c, rss }
    });
    let exponential = (used.len() >= 3).then(|| {
        let mut best: Option<ExponentialFit> = None;
        for i in 10..=400 {
            let a = 0.01 * i as f64;
            let xs: Vec<f64> = used.iter().map(|u| u.0.powf(-a)).collect();
            let (c, b, rss) = linear_ls(&xs, &ys);
            if best.is_none_or(|f| rss < f.rss) {
                best = Some(ExponentialFit { a, c, b, rss });
            }
        }
        best.unwrap()
    });
    let better = match (&polynomial, &exponential) {
        (Some(p), Some(e)) => {
            // an optimum at the smallest a is the exponential family imitating a power law
            if e.a > EXP_A_MIN + 1e-12 && aic(e.rss, used.len(), 3) < aic(p.rss, used.len(), 2) {
                BetterModel::Exponential
            } else {
                BetterModel::Polynomial
            }
        }
        _ => BetterModel::Undetermined,
    };
    FitReport {
        points: used.len(),
        polynomial,
        exponential,
        better,
        all_censored: used.is_empty(),
        lower_bound_rhos,
    }
}

/// Columns `rho, exit_time, censored, direction_id, escaped`.
pub fn write_scaling_csv<W: Write>(curve: &StabilityCurve, mut w: W) -> std::io::Result<()> {
    writeln!(w, "rho,exit_time,censored,direction_id,escaped")?;
    for r in &curve.rows {
        writeln!(
            w,
            "{:e},{:e},{},{},{}",
            r.rho, r.exit_time, r.censored, r.direction_id, r.escaped
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_directions() {
        let d = initial_directions(2, 2, 5);
        assert_eq!(d.len(), 5);
        assert_eq!(d[0].weights, vec![1.0, 0.0]);
        assert_eq!(d[2].weights, vec![0.0, 1.0]);
        assert!((d[1].weights[0] - d[1].weights[1]).abs() < 1e-15);
        assert_eq!(initial_directions(1, 0, 0).len(), 1);
        assert_eq!(initial_directions(2, 3, 9), initial_directions(2, 3, 9));
    }

    #[test]
    fn fits_recover_exact_laws() {
        let rhos = [0.5, 0.4, 0.3, 0.2, 0.1];
        let poly: Vec<f64> = rhos.iter().map(|r: &f64| 3.0 * r.powf(-2.5)).collect();
        let f = fit_scaling(&rhos, &poly, &[false; 5]);
        assert!((f.polynomial.unwrap().p - 2.5).abs() < 1e-12);
        assert_eq!(f.better, BetterModel::Polynomial);

        let expo: Vec<f64> = rhos
            .iter()
            .map(|r: &f64| (0.7 * r.powf(-1.5) + 1.0).exp())
            .collect();
        let f = fit_scaling(&rhos, &expo, &[false; 5]);
        let e = f.exponential.unwrap();
        assert!((e.a - 1.5).abs() < 1e-9 && (e.c - 0.7).abs() < 1e-9);
        assert_eq!(f.better, BetterModel::Exponential);

        let f = fit_scaling(&rhos, &poly, &[true; 5]);
        assert!(f.all_censored && f.polynomial.is_none() && f.lower_bound_rhos.len() == 5);
    }

    #[test]
    fn harmonic_never_exits() {
        let h = GradedPolynomial::linear_actions(&[1.0, 2f64.sqrt()]);
        let z0 = point_from_actions(&[0.1, 0.05], &[0.3, 1.0]);
        let e = stability_time(&h, &z0, 1.1, 20.0, 0.05, &IntegrateOptions::default()).unwrap();
        assert!(e.censored && (e.time - 20.0).abs() < 1e-12);
    }
}
