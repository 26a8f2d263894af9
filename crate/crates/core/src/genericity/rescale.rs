use serde::{Deserialize, Serialize};

use super::coefficient_dim;
use crate::bnf::NormalFormResult;
use crate::error::{Error, Result};
use crate::polyalg::{ActionPolynomial, GradedPolynomial};

/// Radii and dimensions attached to one order `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleContext {
    /// Normalization radius.
    pub s_m: f64,
    /// Experiment radius in the rescaled variables.
    pub r_m: f64,
    pub m: usize,
    #[serde(rename = "D_m")]
    pub d_m: usize,
}

impl RescaleContext {
    /// `s` is the radius of the domain where the normal form is valid.
    pub fn new(n: usize, m: usize, s_m: f64, s: f64, r_m: f64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Domain(format!(
                "need n >= 1 and m >= 1 (got n={n}, m={m})"
            )));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!(
                "normalization radius s must lie in (0, 1), got {s}"
            )));
        }
        if !(s_m > 0.0 && s_m <= s) {
            return Err(Error::Domain(format!(
                "s_m = {s_m} must lie in (0, s] with s = {s}"
            )));
        }
        if !(r_m > 0.0 && r_m <= 1.0) {
            return Err(Error::Domain(format!("r_m = {r_m} must lie in (0, 1]")));
        }
        Ok(RescaleContext {
            s_m,
            r_m,
            m,
            d_m: coefficient_dim(n, m),
        })
    }
}

/// `K_m(z') = s_m^{-2} (h_m + f_m)(s_m z')`.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledHamiltonian {
    pub s_m: f64,
    /// Degree-`k` parts of `k_m`, `k = 1..=m`.
    pub parts: Vec<ActionPolynomial>,
    pub remainder: GradedPolynomial,
}

impl RescaledHamiltonian {
    pub fn integrable_part(&self) -> ActionPolynomial {
        let n = self.remainder.n();
        self.parts
            .iter()
            .fold(ActionPolynomial::zero(n), |a, p| a.add(p))
    }

    pub fn to_graded(&self) -> GradedPolynomial {
        self.integrable_part().to_graded().add(&self.remainder)
    }
}

/// Degree-`k` coefficients times `s^{2k−2}`.
pub fn rescale_action(h: &ActionPolynomial, s: f64) -> ActionPolynomial {
    h.scale_by_degree(|k| s.powi(2 * k as i32 - 2))
}

fn rescale_phase(p: &GradedPolynomial, s: f64) -> GradedPolynomial {
    let mut out = GradedPolynomial::from_terms(
        p.n(),
        p.terms()
            .map(|(e, c)| (e.clone(), c * s.powi(e.degree() as i32 - 2))),
    )
    .expect("same layout");
    if p.is_real() {
        out.set_real(true);
    }
    out
}

pub fn rescale(nf: &NormalFormResult, ctx: &RescaleContext) -> Result<RescaledHamiltonian> {
    if ctx.m != nf.order_m {
        return Err(Error::Shape(format!(
            "context is for order {} but the normal form has order {}",
            ctx.m, nf.order_m
        )));
    }
    let n = nf.omega.n();
    if ctx.d_m != coefficient_dim(n, ctx.m) {
        return Err(Error::Dimension {
            expected: coefficient_dim(n, ctx.m),
            found: ctx.d_m,
        });
    }
    Ok(RescaledHamiltonian {
        s_m: ctx.s_m,
        parts: nf
            .invariants
            .iter()
            .map(|b| rescale_action(b, ctx.s_m))
            .collect(),
        remainder: rescale_phase(&nf.remainder, ctx.s_m),
    })
}

/// `m = ⌈c·|ln r|^a⌉`, at least 1.
pub fn order_schedule(r: f64, c: f64, a: f64) -> Result<usize> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!(
            "order_schedule needs 0 < r < 1, got {r}"
        )));
    }
    if !(c > 0.0 && a > 0.0) {
        return Err(Error::Domain(format!(
            "order_schedule needs c > 0 and a > 0, got c={c}, a={a}"
        )));
    }
    let x = c * r.ln().abs().powf(a);
    // keep exact integers (r = e^{-5}) from rounding up through ln's last bit
    let m = (x - 1e-12 * x.max(1.0)).ceil();
    Ok((m as usize).max(1))
}
