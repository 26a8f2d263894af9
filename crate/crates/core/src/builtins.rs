//! Named Hamiltonian families used by the experiments and the CLI.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{compositions, Exponents, GradedPolynomial};

fn default_delta() -> f64 {
    0.05
}

fn default_torsion() -> f64 {
    1.0
}

fn default_cubic() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Builtin {
    /// `ω·I`
    Harmonic { omega: Vec<f64> },
    /// `I + c·x⁴`
    #[serde(rename = "quartic-1dof")]
    Quartic1Dof { c: f64 },
    /// `I + c·x³`
    #[serde(rename = "cubic-1dof")]
    Cubic1Dof { c: f64 },
    /// `I + t·I²`
    #[serde(rename = "integrable-1dof")]
    Integrable1Dof {
        #[serde(default = "default_torsion")]
        torsion: f64,
    },
    /// `I_1 + I_2 + δ·x_1 y_2 + c·x_1³`: 1:1 resonance with linear coupling.
    ResonantCoupled {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_cubic")]
        cubic: f64,
    },
    /// `I_1 + √2·I_2 + t·(I_1² + I_2²) + δ·x_1 y_2 + c·x_1³`: definite torsion.
    ConvexBenchmark {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_torsion")]
        torsion: f64,
        #[serde(default = "default_cubic")]
        cubic: f64,
    },
    /// `I_1 + I_2 + δ·(ζ_1^{m+1} ζ̄_2^{m+1} + c.c.)`: integrable through degree
    /// `2m+1`, resonant remainder at degree `2m+2`.
    ResonantRemainder { m: usize, delta: f64 },
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Harmonic { .. } => "harmonic",
            Builtin::Quartic1Dof { .. } => "quartic-1dof",
            Builtin::Cubic1Dof { .. } => "cubic-1dof",
            Builtin::Integrable1Dof { .. } => "integrable-1dof",
            Builtin::ResonantCoupled { .. } => "resonant-coupled",
            Builtin::ConvexBenchmark { .. } => "convex-benchmark",
            Builtin::ResonantRemainder { .. } => "resonant-remainder",
        }
    }

    pub fn build(&self) -> Result<GradedPolynomial> {
        Ok(match self {
            Builtin::Harmonic { omega } => {
                if omega.is_empty() {
                    return Err(Error::Domain(
                        "harmonic needs at least one frequency".into(),
                    ));
                }
                GradedPolynomial::linear_actions(omega)
            }
            Builtin::Quartic1Dof { c } => quartic_1dof(*c),
            Builtin::Cubic1Dof { c } => cubic_1dof(*c),
            Builtin::Integrable1Dof { torsion } => {
                let i = GradedPolynomial::action(1, 0);
                i.add(&i.mul(&i).scale_real(*torsion))
            }
            Builtin::ResonantCoupled { delta, cubic } => resonant_coupled(*delta, *cubic),
            Builtin::ConvexBenchmark {
                delta,
                torsion,
                cubic,
            } => convex_benchmark(*delta, *torsion, *cubic),
            Builtin::ResonantRemainder { m, delta } => resonant_remainder(*m, *delta)?,
        })
    }
}

pub fn quartic_1dof(c: f64) -> GradedPolynomial {
    let x = GradedPolynomial::x(1, 0);
    GradedPolynomial::action(1, 0).add(&x.pow(4).scale_real(c))
}

pub fn cubic_1dof(c: f64) -> GradedPolynomial {
    let x = GradedPolynomial::x(1, 0);
    GradedPolynomial::action(1, 0).add(&x.pow(3).scale_real(c))
}

pub fn resonant_coupled(delta: f64, cubic: f64) -> GradedPolynomial {
    let x1 = GradedPolynomial::x(2, 0);
    let y2 = GradedPolynomial::y(2, 1);
    GradedPolynomial::linear_actions(&[1.0, 1.0])
        .add(&x1.mul(&y2).scale_real(delta))
        .add(&x1.pow(3).scale_real(cubic))
}

pub fn convex_benchmark(delta: f64, torsion: f64, cubic: f64) -> GradedPolynomial {
    let x1 = GradedPolynomial::x(2, 0);
    let y2 = GradedPolynomial::y(2, 1);
    let i1 = GradedPolynomial::action(2, 0);
    let i2 = GradedPolynomial::action(2, 1);
    GradedPolynomial::linear_actions(&[1.0, 2f64.sqrt()])
        .add(&i1.mul(&i1).add(&i2.mul(&i2)).scale_real(torsion))
        .add(&x1.mul(&y2).scale_real(delta))
        .add(&x1.pow(3).scale_real(cubic))
}

pub fn resonant_remainder(m: usize, delta: f64) -> Result<GradedPolynomial> {
    if m == 0 {
        return Err(Error::Domain("resonant-remainder needs m >= 1".into()));
    }
    let p = (m + 1) as u8;
    let c = Complex64::new(delta, 0.0);
    let t = GradedPolynomial::monomial(2, &[p, 0], &[0, p], c);
    Ok(GradedPolynomial::linear_actions(&[1.0, 1.0]).add(&real_pair(&t)))
}

/// `P + P̄`, flagged real.
fn real_pair(p: &GradedPolynomial) -> GradedPolynomial {
    let mut s = p.add(&p.conjugate_terms());
    s.set_real(true);
    s
}

/// `ω·I` plus `terms` random real monomial pairs `c ζ^a ζ̄^b + c̄ ζ^b ζ̄^a` of
/// degree `3..=max_degree`, coefficient moduli below `scale`.
pub fn random_hamiltonian<G: Rng + ?Sized>(
    omega: &[f64],
    max_degree: usize,
    terms: usize,
    scale: f64,
    rng: &mut G,
) -> GradedPolynomial {
    let n = omega.len();
    let mut h = GradedPolynomial::linear_actions(omega);
    if max_degree < 3 {
        return h;
    }
    for _ in 0..terms {
        let d = rng.random_range(3..=max_degree);
        let exps = compositions(2 * n, d);
        let e: &Exponents = &exps[rng.random_range(0..exps.len())];
        let c = Complex64::new(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        );
        let (a, b) = e.halves();
        let mono = GradedPolynomial::monomial(n, a, b, c);
        let pair = if e.is_action() {
            GradedPolynomial::monomial(n, a, b, Complex64::new(c.re, 0.0))
        } else {
            real_pair(&mono)
        };
        h = h.add(&pair);
    }
    h
}
