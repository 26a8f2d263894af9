//! TOML experiment configuration.

use serde::de::Error as _;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};

use crate::builtins::Builtin;
use crate::polyalg::{ActionPolynomial, GradedPolynomial, Precision};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub jobs: Option<usize>,
    pub hamiltonian: Option<HamiltonianSpec>,
    pub perturbation: Option<PerturbationConfig>,
    pub bnf: Option<BnfConfig>,
    pub dioph: Option<DiophConfig>,
    pub sample: Option<SampleConfig>,
    pub bnfmap: Option<BnfMapConfig>,
    pub rescale: Option<RescaleConfig>,
    pub badvol: Option<BadVolConfig>,
    pub drift: Option<DriftConfig>,
    pub scaling: Option<ScalingConfig>,
}

/// Either `family = "…"` with its parameters, or `n` plus the canonical
/// text form of a phase-space polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum HamiltonianSpec {
    Builtin(Builtin),
    Inline(InlineHamiltonian),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineHamiltonian {
    pub n: usize,
    pub terms: String,
}

impl<'de> Deserialize<'de> for HamiltonianSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let table = toml::Table::deserialize(d)?;
        let value = toml::Value::Table(table);
        if value.get("family").is_some() {
            Builtin::deserialize(value)
                .map(HamiltonianSpec::Builtin)
                .map_err(D::Error::custom)
        } else {
            InlineHamiltonian::deserialize(value)
                .map(HamiltonianSpec::Inline)
                .map_err(D::Error::custom)
        }
    }
}

impl HamiltonianSpec {
    pub fn build(&self) -> crate::Result<GradedPolynomial> {
        match self {
            HamiltonianSpec::Builtin(b) => b.build(),
            HamiltonianSpec::Inline(i) => GradedPolynomial::from_text(i.n, &i.terms),
        }
    }
}

/// Brick perturbation `scale·h` added to `[hamiltonian]`: read from a sample
/// file written by `sample`, or drawn from the run seed at order `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub file: Option<PathBuf>,
    pub m: Option<usize>,
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BnfConfig {
    pub m: usize,
    pub trunc: Option<usize>,
    #[serde(default)]
    pub precision: Precision,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiophConfig {
    /// Defaults to the frequency of `[hamiltonian]`.
    pub omega: Option<Vec<f64>>,
    pub tau: f64,
    #[serde(rename = "K")]
    pub k_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub n: usize,
    pub m: usize,
}

fn default_cases() -> usize {
    5
}

fn default_input_scale() -> f64 {
    0.01
}

fn default_fd_step() -> f64 {
    1e-4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BnfMapConfig {
    pub m: usize,
    #[serde(default = "default_cases")]
    pub cases: usize,
    /// Brick samples are multiplied by this before being used as inputs `P`.
    #[serde(default = "default_input_scale")]
    pub input_scale: f64,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RescaleConfig {
    /// Taken from `order_schedule(r_m, c, a)` when absent.
    pub m: Option<usize>,
    pub s: f64,
    /// Taken from `radius_schedule(gamma, tau, m, s)` when absent.
    pub s_m: Option<f64>,
    pub r_m: f64,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub a: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BadVolConfig {
    pub n: usize,
    /// Action polynomial in the `l_1 … l_n | p` text form.
    pub h: String,
    pub rho: f64,
    pub eps: Vec<f64>,
    pub samples: usize,
    pub grid: usize,
}

impl BadVolConfig {
    pub fn action_polynomial(&self) -> crate::Result<ActionPolynomial> {
        ActionPolynomial::from_text(self.n, &self.h)
    }
}

fn default_stride() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftConfig {
    pub actions: Vec<f64>,
    pub phases: Option<Vec<f64>>,
    pub dt: f64,
    pub t_max: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "one")]
    pub domain_radius: f64,
}

fn default_random_directions() -> usize {
    5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub rhos: Vec<f64>,
    #[serde(rename = "C")]
    pub c: f64,
    pub dt: f64,
    pub t_max: f64,
    #[serde(default = "default_random_directions")]
    pub random_directions: usize,
    #[serde(default = "one")]
    pub domain_radius: f64,
}

/// Parse with field paths in error messages.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, String> {
    let de = toml::Deserializer::parse(text).map_err(|e| e.to_string())?;
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format!("{path}: {}", e.into_inner().message().trim())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn in_unit(path: &str, v: f64) -> Result<(), String> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(format!("{path}: radius {v} must lie in (0, 1)"))
    }
}

fn positive(path: &str, v: f64) -> Result<(), String> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{path}: must be positive, got {v}"))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.jobs == Some(0) {
            return Err("jobs: must be at least 1".into());
        }
        if let Some(p) = &self.perturbation {
            match (&p.file, p.m) {
                (Some(_), Some(_)) => {
                    return Err("perturbation: give either file or m, not both".into())
                }
                (None, None) => return Err("perturbation: give file or m".into()),
                (None, Some(0)) => return Err("perturbation.m: must be at least 1".into()),
                _ => {}
            }
            if !p.scale.is_finite() {
                return Err(format!(
                    "perturbation.scale: must be finite, got {}",
                    p.scale
                ));
            }
        }
        if let Some(b) = &self.bnf {
            if b.m == 0 {
                return Err("bnf.m: must be at least 1".into());
            }
        }
        if let Some(s) = &self.sample {
            if s.n == 0 || s.m == 0 {
                return Err("sample: n and m must be at least 1".into());
            }
        }
        if let Some(b) = &self.bnfmap {
            if b.m == 0 {
                return Err("bnfmap.m: must be at least 1".into());
            }
            positive("bnfmap.fd_step", b.fd_step)?;
            positive("bnfmap.input_scale", b.input_scale)?;
        }
        if let Some(r) = &self.rescale {
            in_unit("rescale.s", r.s)?;
            if let Some(s_m) = r.s_m {
                in_unit("rescale.s_m", s_m)?;
                if s_m > r.s {
                    return Err(format!(
                        "rescale.s_m: {s_m} exceeds the normalization radius s = {}",
                        r.s
                    ));
                }
            } else if r.gamma.is_none() || r.tau.is_none() {
                return Err(
                    "rescale.s_m: give s_m, or gamma and tau for the radius schedule".into(),
                );
            }
            if !(r.r_m > 0.0 && r.r_m <= 1.0) {
                return Err(format!("rescale.r_m: radius {} must lie in (0, 1]", r.r_m));
            }
            if r.m.is_none() && r.r_m >= 1.0 {
                return Err(
                    "rescale.m: needed when r_m = 1 (the order schedule needs r_m < 1)".into(),
                );
            }
        }
        if let Some(b) = &self.badvol {
            positive("badvol.rho", b.rho)?;
            for (i, e) in b.eps.iter().enumerate() {
                positive(&format!("badvol.eps[{i}]"), *e)?;
            }
        }
        if let Some(d) = &self.drift {
            let rho = d.actions.iter().map(|a| a * a).sum::<f64>().sqrt();
            if d.actions.iter().any(|a| *a < 0.0) {
                return Err("drift.actions: actions must be nonnegative".into());
            }
            in_unit("drift.actions (norm)", rho)?;
            positive("drift.dt", d.dt)?;
            positive("drift.domain_radius", d.domain_radius)?;
            if let Some(p) = &d.phases {
                if p.len() != d.actions.len() {
                    return Err("drift.phases: length must match drift.actions".into());
                }
            }
        }
        if let Some(s) = &self.scaling {
            if s.rhos.is_empty() {
                return Err("scaling.rhos: empty".into());
            }
            for (i, r) in s.rhos.iter().enumerate() {
                in_unit(&format!("scaling.rhos[{i}]"), *r)?;
            }
            if s.rhos.windows(2).any(|w| !(w[1] < w[0])) {
                return Err("scaling.rhos: must be strictly decreasing".into());
            }
            if !(s.c > 1.0) {
                return Err(format!("scaling.C: must exceed 1, got {}", s.c));
            }
            positive("scaling.dt", s.dt)?;
            positive("scaling.domain_radius", s.domain_radius)?;
        }
        Ok(())
    }
}
