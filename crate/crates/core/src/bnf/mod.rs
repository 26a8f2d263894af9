//! Birkhoff normalization of `H = ω·I + f` to order `2m`.
//!
//! Conventions: `L_χ F = {χ, F}` and the normalized Hamiltonian is
//! `exp(L_χ_2m) ⋯ exp(L_χ_3) H`. Since `exp(L_χ) F = F∘ψ_χ` with `ψ_χ` the
//! time-1 flow of `−χ`, the normalizing map is `Φ_m = ψ_3∘ψ_4∘⋯∘ψ_2m`.

mod engine;
mod transport;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

pub use engine::DivisorEntry;
pub use transport::{transport_residual, NormalizingMap};

use crate::error::{Error, Result};
use crate::polyalg::{
    diagonalize_quadratic, sup_norm_bound, ActionPolynomial, Frequency, GradedPolynomial, Poly,
    Precision, SymplecticMap,
};

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormResult {
    pub omega: Frequency,
    pub order_m: usize,
    pub trunc: usize,
    pub precision: Precision,
    /// `B^(1), …, B^(m)`; `B^(k)` is homogeneous of degree `k` in `I`.
    pub invariants: Vec<ActionPolynomial>,
    /// `χ_3, …, χ_2m`.
    pub generators: Vec<GradedPolynomial>,
    /// Terms of degree `2m+1..=trunc` of the transformed Hamiltonian.
    pub remainder: GradedPolynomial,
    pub divisor_log: Vec<DivisorEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizeOptions {
    pub m: usize,
    /// Defaults to `2m + 2`.
    pub trunc: Option<usize>,
    pub precision: Precision,
}

impl NormalizeOptions {
    pub fn new(m: usize) -> Self {
        NormalizeOptions {
            m,
            trunc: None,
            precision: Precision::Double,
        }
    }

    pub fn trunc(mut self, trunc: usize) -> Self {
        self.trunc = Some(trunc);
        self
    }

    pub fn precision(mut self, p: Precision) -> Self {
        self.precision = p;
        self
    }
}

/// `(kernel, χ)` with `R + {χ, ω·I} = kernel`; `kernel` keeps the `a = b` monomials.
pub fn homological_solve(
    r: &GradedPolynomial,
    omega: &Frequency,
) -> Result<(GradedPolynomial, GradedPolynomial)> {
    if r.n() != omega.n() {
        return Err(Error::Dimension {
            expected: omega.n(),
            found: r.n(),
        });
    }
    if r.min_degree() != r.max_degree() {
        return Err(Error::Shape(
            "homological_solve expects a homogeneous polynomial".into(),
        ));
    }
    let guard = engine::divisor_guard(omega.max_abs());
    let (kernel, chi, _) = engine::solve_homological(r, omega.as_slice(), guard)?;
    Ok((kernel, chi))
}

/// Normalize in double precision with an explicit truncation degree.
pub fn normalize(h: &GradedPolynomial, m: usize, trunc: usize) -> Result<NormalFormResult> {
    normalize_with(h, NormalizeOptions::new(m).trunc(trunc))
}

pub fn normalize_with(h: &GradedPolynomial, opts: NormalizeOptions) -> Result<NormalFormResult> {
    let m = opts.m;
    if m == 0 {
        return Err(Error::Domain(
            "normalization order m must be at least 1".into(),
        ));
    }
    let trunc = opts.trunc.unwrap_or(2 * m + 2);
    if trunc < 2 * m {
        return Err(Error::Domain(format!(
            "truncation degree {trunc} is below 2m = {}",
            2 * m
        )));
    }
    match opts.precision {
        Precision::Double => finish(
            engine::normalize_generic(h, m, trunc)?,
            m,
            trunc,
            opts.precision,
        ),
        Precision::DoubleDouble => {
            let hx: Poly<TwoFloat> = h.cast();
            finish(
                engine::normalize_generic(&hx, m, trunc)?,
                m,
                trunc,
                opts.precision,
            )
        }
    }
}

fn finish<R: crate::polyalg::Real>(
    out: engine::EngineOutput<R>,
    m: usize,
    trunc: usize,
    precision: Precision,
) -> Result<NormalFormResult> {
    let omega = Frequency::new(out.omega.iter().map(|w| w.to_f64()).collect())?;
    let mut invariants = Vec::with_capacity(m);
    invariants.push(ActionPolynomial::linear(omega.as_slice()));
    for k in out.kernels.iter().skip(1) {
        invariants.push(ActionPolynomial::from_graded_diagonal(&k.to_f64()));
    }
    Ok(NormalFormResult {
        omega,
        order_m: m,
        trunc,
        precision,
        invariants,
        generators: out.generators.iter().map(|g| g.to_f64()).collect(),
        remainder: out.remainder.to_f64(),
        divisor_log: out.divisor_log,
    })
}

/// Diagonalize the quadratic part and return `(T, H∘T)`.
pub fn diagonalize_hamiltonian(h: &GradedPolynomial) -> Result<(SymplecticMap, GradedPolynomial)> {
    let (_, t) = diagonalize_quadratic(&h.homogeneous(2))?;
    let ht = t.pull_back(h)?;
    // Clean the quadratic part to exactly ω·I.
    let q = ht.homogeneous(2);
    let cleaned = q.filter_actions();
    Ok((t, ht.replace_homogeneous(2, &cleaned)))
}

impl NormalFormResult {
    /// `h_m = Σ_k B^(k)`
    pub fn integrable_part(&self) -> ActionPolynomial {
        self.invariants
            .iter()
            .fold(ActionPolynomial::zero(self.omega.n()), |acc, b| acc.add(b))
    }

    /// `Σ_k B^(k)(I) + f_m` as a phase-space polynomial.
    pub fn normalized_hamiltonian(&self) -> GradedPolynomial {
        self.integrable_part().to_graded().add(&self.remainder)
    }

    pub fn report(&self) -> NormalFormReport {
        NormalFormReport {
            schema_version: NormalFormReport::SCHEMA_VERSION,
            omega: self.omega.as_slice().to_vec(),
            m: self.order_m,
            trunc: self.trunc,
            precision: self.precision,
            mantissa_bits: self.precision.mantissa_bits(),
            invariants: self
                .invariants
                .iter()
                .enumerate()
                .map(|(i, b)| InvariantTable {
                    k: i + 1,
                    terms: b
                        .terms()
                        .map(|(l, c)| ActionTerm {
                            l: l.to_vec(),
                            coeff: c,
                        })
                        .collect(),
                })
                .collect(),
            divisor_log: self.divisor_log.clone(),
            generator_terms: self.generators.iter().map(|g| g.len()).collect(),
            remainder_terms: self.remainder.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionTerm {
    pub l: Vec<u8>,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantTable {
    pub k: usize,
    pub terms: Vec<ActionTerm>,
}

/// JSON form of a [`NormalFormResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormReport {
    pub schema_version: u32,
    pub omega: Vec<f64>,
    pub m: usize,
    pub trunc: usize,
    pub precision: Precision,
    pub mantissa_bits: u32,
    pub invariants: Vec<InvariantTable>,
    pub divisor_log: Vec<DivisorEntry>,
    pub generator_terms: Vec<usize>,
    pub remainder_terms: usize,
}

impl NormalFormReport {
    pub const SCHEMA_VERSION: u32 = 1;
}

/// True iff `B^(1..=m)` agree between truncation degrees `trunc1` and `trunc2`.
pub fn invariant_uniqueness_check(
    h: &GradedPolynomial,
    m: usize,
    trunc1: usize,
    trunc2: usize,
) -> Result<bool> {
    let a = normalize(h, m, trunc1)?;
    let b = normalize(h, m, trunc2)?;
    Ok(invariants_agree(&a.invariants, &b.invariants, 1e-9))
}

pub(crate) fn invariants_agree(a: &[ActionPolynomial], b: &[ActionPolynomial], rel: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            let scale = x.max_abs_coeff().max(y.max_abs_coeff());
            x.max_abs_diff(y) <= rel * scale
        })
}

/// Majorant bound of the remainder on the ball of radius `s_m`.
pub fn remainder_norm(result: &NormalFormResult, s_m: f64) -> Result<f64> {
    sup_norm_bound(&result.remainder, s_m)
}

/// `s_m = min(γ/m^{1+τ}, s)`.
pub fn radius_schedule(gamma: f64, tau: f64, m: usize, s: f64) -> Result<f64> {
    if !(gamma > 0.0) || !(tau > 0.0) || m == 0 || !(s > 0.0) {
        return Err(Error::Domain(format!(
            "radius_schedule needs gamma > 0, tau > 0, m >= 1, s > 0 (got {gamma}, {tau}, {m}, {s})"
        )));
    }
    Ok((gamma / (m as f64).powf(1.0 + tau)).min(s))
}
