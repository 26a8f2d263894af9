use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::CliError;
use crate::arith::diophantine_gamma;
use crate::bnf::{
    diagonalize_hamiltonian, normalize, normalize_with, radius_schedule, NormalFormReport,
    NormalizeOptions,
};
use crate::brick::{perturb, quadratic_frequency, sample_brick, BrickSample};
use crate::dynamics::{
    initial_directions, integrate, point_from_actions, scaling_experiment, write_scaling_csv,
    write_trajectory_csv, FitReport, IntegrateOptions, ScalingOptions,
};
use crate::genericity::{
    bad_volume_sweep, bnf_map, jacobian_unit_check, loglog_slope, order_schedule, rescale,
    write_volume_csv, JacobianReport, RescaleContext, SlopeFit, VolumeOptions,
};
use crate::polyalg::{
    bombieri_norm, sup_norm_bound, ActionPolynomial, Frequency, GradedPolynomial,
};

type Out = Result<Vec<PathBuf>, CliError>;

pub(super) fn dispatch(name: &str, cfg: &ExperimentConfig, out: &Path) -> Out {
    match name {
        "bnf" => bnf(cfg, out),
        "dioph" => dioph(cfg, out),
        "sample" => sample(cfg, out),
        "bnfmap" => bnfmap(cfg, out),
        "rescale" => rescale_cmd(cfg, out),
        "badvol" => badvol(cfg, out),
        "drift" => drift(cfg, out),
        "scaling" => scaling(cfg, out),
        other => Err(CliError::Config(format!("unknown command {other}"))),
    }
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Config(format!("{name}: section missing")))
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    output: String,
    config: &'a ExperimentConfig,
}

fn write_meta(
    out: &Path,
    file: &Path,
    command: &str,
    cfg: &ExperimentConfig,
) -> Result<PathBuf, CliError> {
    let stem = file.file_stem().unwrap().to_string_lossy();
    let path = out.join(format!("{stem}.meta.json"));
    let meta = Meta {
        tool: "birkhoff",
        version: env!("CARGO_PKG_VERSION"),
        command,
        output: file.file_name().unwrap().to_string_lossy().into_owned(),
        config: cfg,
    };
    write_json_raw(&path, &meta)?;
    Ok(path)
}

fn write_json_raw<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit_json<T: Serialize>(
    out: &Path,
    name: &str,
    command: &str,
    cfg: &ExperimentConfig,
    value: &T,
) -> Out {
    let path = out.join(name);
    write_json_raw(&path, value)?;
    let meta = write_meta(out, &path, command, cfg)?;
    Ok(vec![path, meta])
}

fn emit_csv(
    out: &Path,
    name: &str,
    command: &str,
    cfg: &ExperimentConfig,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Out {
    let path = out.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    body(&mut w)?;
    w.flush()?;
    let meta = write_meta(out, &path, command, cfg)?;
    Ok(vec![path, meta])
}

/// Per-task seed: first 8 bytes of `SHA-256(tag ‖ seed ‖ index)`.
pub(crate) fn substream_seed(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    h.update(seed.to_le_bytes());
    h.update(index.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

fn is_diagonal(h: &GradedPolynomial) -> bool {
    h.homogeneous(2).terms().all(|(e, _)| e.is_action())
}

/// The configured Hamiltonian, brought to `ω·I + …` if needed.
fn hamiltonian(cfg: &ExperimentConfig) -> Result<(GradedPolynomial, bool), CliError> {
    let mut h = section(&cfg.hamiltonian, "hamiltonian")?.build()?;
    if let Some(p) = &cfg.perturbation {
        let mut s = match (&p.file, p.m) {
            (Some(file), _) => {
                let text = std::fs::read_to_string(file).map_err(|e| {
                    CliError::Config(format!(
                        "perturbation.file: cannot read {}: {e}",
                        file.display()
                    ))
                })?;
                serde_json::from_str::<BrickSample>(&text)
                    .map_err(|e| CliError::Config(format!("perturbation.file: {e}")))?
            }
            (None, Some(m)) => sample_brick(h.n(), m, substream_seed(cfg.seed, "perturbation", 0))?,
            (None, None) => return Err(CliError::Config("perturbation: give file or m".into())),
        };
        s.parts = s.parts.iter().map(|q| q.scale(p.scale)).collect();
        h = perturb(&h, &s)?.0;
    }
    if is_diagonal(&h) {
        Ok((h, false))
    } else {
        Ok((diagonalize_hamiltonian(&h)?.1, true))
    }
}

#[derive(Serialize)]
struct BnfOutput {
    /// The quadratic part was brought to `ω·I` by a linear symplectic map first.
    diagonalized: bool,
    #[serde(flatten)]
    report: NormalFormReport,
}

fn bnf(cfg: &ExperimentConfig, out: &Path) -> Out {
    let c = section(&cfg.bnf, "bnf")?;
    let (h, diagonalized) = hamiltonian(cfg)?;
    let mut opts = NormalizeOptions::new(c.m).precision(c.precision);
    if let Some(t) = c.trunc {
        opts = opts.trunc(t);
    }
    let nf = normalize_with(&h, opts)?;
    let report = BnfOutput {
        diagonalized,
        report: nf.report(),
    };
    emit_json(out, "bnf.json", "bnf", cfg, &report)
}

fn dioph(cfg: &ExperimentConfig, out: &Path) -> Out {
    let c = section(&cfg.dioph, "dioph")?;
    let omega = match &c.omega {
        Some(w) => {
            Frequency::new(w.clone()).map_err(|e| CliError::Config(format!("dioph.omega: {e}")))?
        }
        None => quadratic_frequency(&section(&cfg.hamiltonian, "hamiltonian")?.build()?)?,
    };
    let report = diophantine_gamma(&omega, c.tau, c.k_max)?;
    emit_json(out, "dioph.json", "dioph", cfg, &report)
}

fn sample(cfg: &ExperimentConfig, out: &Path) -> Out {
    let c = section(&cfg.sample, "sample")?;
    let s = sample_brick(c.n, c.m, cfg.seed)?;
    emit_json(out, "sample.json", "sample", cfg, &s)
}

#[derive(Serialize)]
struct BnfMapCase {
    seed: u64,
    /// Perturbing `P_j` left every `Q_i`, `i < j`, bit-identical.
    triangular: bool,
    jacobian: JacobianReport,
}

#[derive(Serialize)]
struct BnfMapReport {
    n: usize,
    m: usize,
    all_triangular: bool,
    /// Largest spread of `Q_1 − P_1` across cases.
    translation_spread: f64,
    det_min: f64,
    det_max: f64,
    cases: Vec<BnfMapCase>,
}

fn scaled(parts: &[ActionPolynomial], s: f64) -> Vec<ActionPolynomial> {
    parts.iter().map(|p| p.scale(s)).collect()
}

fn bnfmap(cfg: &ExperimentConfig, out: &Path) -> Out {
    use rayon::prelude::*;
    let c = section(&cfg.bnfmap, "bnfmap")?;
    let (h, _) = hamiltonian(cfg)?;
    let n = h.n();
    let cases: Vec<(BnfMapCase, ActionPolynomial)> = (0..c.cases as u64)
        .into_par_iter()
        .map(|i| {
            let seed = substream_seed(cfg.seed, "bnfmap", i);
            let p = scaled(&sample_brick(n, c.m, seed)?.parts, c.input_scale);
            let q = bnf_map(&h, c.m, &p)?;
            let kick = scaled(
                &sample_brick(n, c.m, substream_seed(cfg.seed, "bnfmap-kick", i))?.parts,
                c.input_scale,
            );
            let mut triangular = true;
            for j in 1..c.m {
                let mut p2 = p.clone();
                p2[j] = p2[j].add(&kick[j]);
                triangular &= bnf_map(&h, c.m, &p2)?[..j] == q[..j];
            }
            let jacobian = jacobian_unit_check(&h, c.m, &p, c.fd_step)?;
            Ok((
                BnfMapCase {
                    seed,
                    triangular,
                    jacobian,
                },
                q[0].sub(&p[0]),
            ))
        })
        .collect::<crate::Result<_>>()?;
    let shifts: Vec<&ActionPolynomial> = cases.iter().map(|c| &c.1).collect();
    let translation_spread = shifts
        .iter()
        .flat_map(|a| shifts.iter().map(move |b| a.max_abs_diff(b)))
        .fold(0.0, f64::max);
    let cases: Vec<BnfMapCase> = cases.into_iter().map(|c| c.0).collect();
    let dets = cases
        .iter()
        .flat_map(|c| [c.jacobian.det, c.jacobian.det_half_step]);
    let (det_min, det_max) = dets.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
        (lo.min(d), hi.max(d))
    });
    let report = BnfMapReport {
        n,
        m: c.m,
        all_triangular: cases.iter().all(|c| c.triangular),
        translation_spread,
        det_min,
        det_max,
        cases,
    };
    emit_json(out, "bnfmap.json", "bnfmap", cfg, &report)
}

#[derive(Serialize)]
struct NormRow {
    k: usize,
    before: f64,
    after: f64,
    factor: f64,
}

#[derive(Serialize)]
struct RescaleReport {
    context: RescaleContext,
    norms: Vec<NormRow>,
    /// Every rescaled degree-`k` part has Bombieri norm at most 1.
    in_brick: bool,
    /// Majorant bound of the rescaled remainder on the ball of radius `r_m`.
    remainder_bound: f64,
    invariants: Vec<ActionPolynomial>,
}

fn rescale_cmd(cfg: &ExperimentConfig, out: &Path) -> Out {
    let c = section(&cfg.rescale, "rescale")?;
    let (h, _) = hamiltonian(cfg)?;
    let m = match c.m {
        Some(m) => m,
        None => order_schedule(c.r_m, c.c, c.a)?,
    };
    let s_m = match c.s_m {
        Some(s) => s,
        None => radius_schedule(c.gamma.unwrap(), c.tau.unwrap(), m, c.s)?,
    };
    let nf = normalize(&h, m, 2 * m + 2)?;
    let ctx = RescaleContext::new(h.n(), m, s_m, c.s, c.r_m)?;
    let k = rescale(&nf, &ctx)?;
    let mut norms = Vec::with_capacity(m);
    for (i, (b, a)) in nf.invariants.iter().zip(&k.parts).enumerate() {
        norms.push(NormRow {
            k: i + 1,
            before: bombieri_norm(b, i + 1)?,
            after: bombieri_norm(a, i + 1)?,
            factor: s_m.powi(2 * i as i32),
        });
    }
    let report = RescaleReport {
        context: ctx,
        in_brick: norms.iter().all(|r| r.after <= 1.0),
        norms,
        remainder_bound: sup_norm_bound(&k.remainder, c.r_m)?,
        invariants: k.parts,
    };
    emit_json(out, "rescale.json", "rescale", cfg, &report)
}

fn badvol(cfg: &ExperimentConfig, out: &Path) -> Out {
    let c = section(&cfg.badvol, "badvol")?;
    let h = c.action_polynomial()?;
    let opts = VolumeOptions {
        samples: c.samples,
        grid: c.grid,
        seed: cfg.seed,
    };
    let rows = bad_volume_sweep(&h, c.rho, &c.eps, &opts)?;
    let mut paths = emit_csv(out, "badvol.csv", "badvol", cfg, |w| {
        write_volume_csv(&rows, w)
    })?;
    let slope: Option<SlopeFit> = loglog_slope(&rows).ok();
    paths.extend(emit_json(out, "badvol_slope.json", "badvol", cfg, &slope)?);
    Ok(paths)
}

fn drift(cfg: &ExperimentConfig, out: &Path) -> Out {
    let c = section(&cfg.drift, "drift")?;
    let (h, _) = hamiltonian(cfg)?;
    if c.actions.len() != h.n() {
        return Err(CliError::Config(format!(
            "drift.actions: expected {} entries, got {}",
            h.n(),
            c.actions.len()
        )));
    }
    let phases = c.phases.clone().unwrap_or_else(|| vec![0.0; h.n()]);
    let z0 = point_from_actions(&c.actions, &phases);
    let opts = IntegrateOptions {
        domain_radius: c.domain_radius,
        stride: c.stride,
    };
    let rec = integrate(&h, &z0, c.dt, c.t_max, &opts)?;
    emit_csv(out, "drift.csv", "drift", cfg, |w| {
        write_trajectory_csv(&rec, w)
    })
}

#[derive(Serialize)]
struct ScalingFit<'a> {
    rhos: &'a [f64],
    exit_times: &'a [f64],
    censored: &'a [bool],
    #[serde(rename = "C")]
    c: f64,
    t_max: f64,
    dt: f64,
    fit: &'a FitReport,
}

fn scaling(cfg: &ExperimentConfig, out: &Path) -> Out {
    let c = section(&cfg.scaling, "scaling")?;
    let (h, _) = hamiltonian(cfg)?;
    let dirs = initial_directions(h.n(), c.random_directions, cfg.seed);
    let opts = ScalingOptions {
        c: c.c,
        t_max: c.t_max,
        dt: c.dt,
        domain_radius: c.domain_radius,
    };
    let curve = scaling_experiment(&h, &c.rhos, &dirs, &opts)?;
    let mut paths = emit_csv(out, "scaling.csv", "scaling", cfg, |w| {
        write_scaling_csv(&curve, w)
    })?;
    let fit = ScalingFit {
        rhos: &curve.rhos,
        exit_times: &curve.exit_times,
        censored: &curve.censored,
        c: curve.c,
        t_max: curve.t_max,
        dt: curve.dt,
        fit: &curve.fit,
    };
    paths.extend(emit_json(out, "scaling_fit.json", "scaling", cfg, &fit)?);
    Ok(paths)
}
