//! Flat real evaluator for a phase-space polynomial and its exact gradient.

use super::cartesian::CartesianPolynomial;
use super::graded::GradedPolynomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct TermList {
    exps: Vec<u8>,
    coeffs: Vec<f64>,
}

impl TermList {
    fn eval(&self, dim: usize, pows: &[f64], stride: usize) -> f64 {
        let mut acc = 0.0;
        for (t, c) in self.coeffs.iter().enumerate() {
            let e = &self.exps[t * dim..(t + 1) * dim];
            let mut v = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    v *= pows[i * stride + k as usize];
                }
            }
            acc += v;
        }
        acc
    }
}

/// `H(x, y)` with real coefficients in the `(x, y)` monomial basis, plus the
/// `2n` partial derivatives obtained by exact differentiation.
#[derive(Clone, Debug)]
pub struct CompiledPolynomial {
    n: usize,
    max_exp: usize,
    value: TermList,
    grad: Vec<TermList>,
}

fn flatten(p: &CartesianPolynomial) -> TermList {
    let mut exps = Vec::new();
    let mut coeffs = Vec::new();
    for (e, c) in p.terms() {
        exps.extend_from_slice(e.as_slice());
        coeffs.push(c.re);
    }
    TermList { exps, coeffs }
}

impl CompiledPolynomial {
    /// Fails if the polynomial is not real-valued on real arguments.
    pub fn new(h: &GradedPolynomial) -> Result<Self> {
        let cart = CartesianPolynomial::from_graded(h);
        let scale = cart.max_abs_coeff().max(f64::MIN_POSITIVE);
        if cart.max_imag() > 1e-10 * scale {
            return Err(Error::Precondition("Hamiltonian is not real-valued".into()));
        }
        let n = h.n();
        let max_exp = cart
            .terms()
            .flat_map(|(e, _)| e.as_slice().iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let grad = (0..2 * n).map(|v| flatten(&cart.derivative(v))).collect();
        Ok(CompiledPolynomial {
            n,
            max_exp,
            value: flatten(&cart),
            grad,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn powers(&self, z: &[f64]) -> Vec<f64> {
        let stride = self.max_exp + 1;
        let mut pows = vec![1.0; 2 * self.n * stride];
        for (i, &zi) in z.iter().enumerate() {
            for k in 1..stride {
                pows[i * stride + k] = pows[i * stride + k - 1] * zi;
            }
        }
        pows
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let pows = self.powers(z);
        self.value.eval(2 * self.n, &pows, self.max_exp + 1)
    }

    /// `∇H` written into `out` (length `2n`).
    pub fn gradient_into(&self, z: &[f64], out: &mut [f64]) {
        let pows = self.powers(z);
        for (o, g) in out.iter_mut().zip(&self.grad) {
            *o = g.eval(2 * self.n, &pows, self.max_exp + 1);
        }
    }

    /// Hamiltonian vector field `(∂H/∂y, −∂H/∂x)`.
    pub fn vector_field_into(&self, z: &[f64], out: &mut [f64]) {
        let n = self.n;
        let pows = self.powers(z);
        let stride = self.max_exp + 1;
        for j in 0..n {
            out[j] = self.grad[n + j].eval(2 * n, &pows, stride);
            out[n + j] = -self.grad[j].eval(2 * n, &pows, stride);
        }
    }
}
