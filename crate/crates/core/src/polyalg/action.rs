//! Polynomials in the actions `I = (I_1..I_n)` only.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::graded::GradedPolynomial;
use super::monomial::{compositions, multinomial, Exponents};
use crate::error::{Error, Result};

/// `Σ p_l I^l` with real coefficients.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "ActionPolynomialRepr", into = "ActionPolynomialRepr")]
pub struct ActionPolynomial {
    n: usize,
    coeffs: BTreeMap<Exponents, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionTermRepr {
    l: Vec<u8>,
    coeff: f64,
}

/// JSON layout: `{"n": 2, "terms": [{"l": [1, 0], "coeff": 0.5}, …]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionPolynomialRepr {
    n: usize,
    terms: Vec<ActionTermRepr>,
}

impl From<ActionPolynomial> for ActionPolynomialRepr {
    fn from(p: ActionPolynomial) -> Self {
        ActionPolynomialRepr {
            n: p.n,
            terms: p
                .coeffs
                .into_iter()
                .map(|(l, coeff)| ActionTermRepr {
                    l: l.as_slice().to_vec(),
                    coeff,
                })
                .collect(),
        }
    }
}

impl TryFrom<ActionPolynomialRepr> for ActionPolynomial {
    type Error = Error;
    fn try_from(r: ActionPolynomialRepr) -> Result<Self> {
        ActionPolynomial::from_terms(r.n, r.terms.into_iter().map(|t| (t.l, t.coeff)))
    }
}

impl ActionPolynomial {
    pub fn zero(n: usize) -> Self {
        ActionPolynomial {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<u8>, f64)>) -> Result<Self> {
        let mut p = ActionPolynomial::zero(n);
        for (l, c) in terms {
            if l.len() != n {
                return Err(Error::Shape(format!(
                    "action exponent has {} entries, expected {n}",
                    l.len()
                )));
            }
            *p.coeffs.entry(Exponents::new(l)).or_insert(0.0) += c;
        }
        p.coeffs.retain(|_, c| *c != 0.0);
        Ok(p)
    }

    pub fn monomial(n: usize, l: &[u8], c: f64) -> Self {
        Self::from_terms(n, [(l.to_vec(), c)]).expect("length checked by caller")
    }

    /// `ω·I`
    pub fn linear(omega: &[f64]) -> Self {
        let n = omega.len();
        Self::from_terms(
            n,
            omega.iter().enumerate().map(|(j, &w)| {
                let mut l = vec![0; n];
                l[j] = 1;
                (l, w)
            }),
        )
        .unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], f64)> {
        self.coeffs.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, l: &[u8]) -> f64 {
        self.coeffs
            .get(&Exponents::new(l.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.keys().map(|e| e.degree()).max().unwrap_or(0)
    }

    pub fn homogeneous(&self, k: usize) -> Self {
        ActionPolynomial {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| e.degree() == k)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.coeffs.keys().all(|e| e.degree() == k)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in add");
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &other.coeffs {
            *coeffs.entry(e.clone()).or_insert(0.0) += c;
        }
        coeffs.retain(|_, c| *c != 0.0);
        ActionPolynomial { n: self.n, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in mul");
        let mut coeffs: BTreeMap<Exponents, f64> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                *coeffs.entry(e1.add(e2)).or_insert(0.0) += c1 * c2;
            }
        }
        coeffs.retain(|_, c| *c != 0.0);
        ActionPolynomial { n: self.n, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut coeffs: BTreeMap<_, _> = self
            .coeffs
            .iter()
            .map(|(e, c)| (e.clone(), c * s))
            .collect();
        coeffs.retain(|_, c| *c != 0.0);
        ActionPolynomial { n: self.n, coeffs }
    }

    /// Multiply each degree-`k` coefficient by `f(k)`.
    pub fn scale_by_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut coeffs: BTreeMap<_, _> = self
            .coeffs
            .iter()
            .map(|(e, c)| (e.clone(), c * f(e.degree())))
            .collect();
        coeffs.retain(|_, c| *c != 0.0);
        ActionPolynomial { n: self.n, coeffs }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .coeffs
            .values()
            .fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Coefficients of the degree-`k` part in graded-lex basis order.
    pub fn coefficient_vector(&self, k: usize) -> Vec<f64> {
        compositions(self.n, k)
            .iter()
            .map(|l| self.coeff(l.as_slice()))
            .collect()
    }

    /// Inverse of [`coefficient_vector`](Self::coefficient_vector).
    pub fn from_coefficient_vector(n: usize, k: usize, v: &[f64]) -> Self {
        let basis = compositions(n, k);
        assert_eq!(basis.len(), v.len());
        Self::from_terms(
            n,
            basis
                .into_iter()
                .zip(v)
                .map(|(l, &c)| (l.as_slice().to_vec(), c)),
        )
        .unwrap()
    }

    /// Lift to phase space: `I^l ↦ ζ^l ζ̄^l`.
    pub fn to_graded(&self) -> GradedPolynomial {
        GradedPolynomial::from_terms(
            self.n,
            self.coeffs.iter().map(|(l, &c)| {
                let mut e = l.as_slice().to_vec();
                e.extend_from_slice(l.as_slice());
                (Exponents::new(e), Complex64::new(c, 0.0))
            }),
        )
        .expect("layout is consistent")
    }

    /// Collect the terms of `p` with `a = b` (real parts); other terms are ignored.
    pub fn from_graded_diagonal(p: &GradedPolynomial) -> Self {
        let n = p.n();
        let terms = p
            .terms()
            .filter(|(e, _)| e.is_action())
            .map(|(e, c)| (e.halves().0.to_vec(), c.re));
        Self::from_terms(n, terms).unwrap()
    }

    pub fn eval(&self, actions: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(l, c)| {
                c * l
                    .as_slice()
                    .iter()
                    .zip(actions)
                    .map(|(&k, &v)| v.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn gradient(&self, actions: &[f64]) -> DVector<f64> {
        let n = self.n;
        let mut g = DVector::zeros(n);
        for (l, c) in &self.coeffs {
            let l = l.as_slice();
            for i in 0..n {
                if l[i] == 0 {
                    continue;
                }
                let mut t = c * l[i] as f64;
                for j in 0..n {
                    let p = if j == i { l[j] as i32 - 1 } else { l[j] as i32 };
                    t *= actions[j].powi(p);
                }
                g[i] += t;
            }
        }
        g
    }

    pub fn hessian(&self, actions: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut h = DMatrix::zeros(n, n);
        for (l, c) in &self.coeffs {
            let l = l.as_slice();
            for i in 0..n {
                for k in i..n {
                    let mut e: Vec<i32> = l.iter().map(|&v| v as i32).collect();
                    let mut t = *c * e[i] as f64;
                    e[i] -= 1;
                    t *= e[k] as f64;
                    e[k] -= 1;
                    if t == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        t *= actions[j].powi(e[j]);
                    }
                    h[(i, k)] += t;
                    if i != k {
                        h[(k, i)] += t;
                    }
                }
            }
        }
        h
    }

    /// Text form: one term per line, `l_1 … l_n | p`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (l, c) in &self.coeffs {
            let ls: Vec<String> = l.as_slice().iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{} | {:e}", ls.join(" "), c);
        }
        out
    }

    pub fn from_text(n: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: idx + 1, msg };
            let (lhs, rhs) = line
                .split_once('|')
                .ok_or_else(|| perr("expected `l.. | p`".into()))?;
            let l: Vec<u8> = lhs
                .split_whitespace()
                .map(|t| {
                    t.parse::<u8>()
                        .map_err(|e| perr(format!("bad exponent `{t}`: {e}")))
                })
                .collect::<Result<_>>()?;
            if l.len() != n {
                return Err(perr(format!("expected {n} exponents")));
            }
            let c: f64 = rhs
                .trim()
                .parse()
                .map_err(|e| perr(format!("bad coefficient: {e}")))?;
            terms.push((l, c));
        }
        Self::from_terms(n, terms)
    }
}

/// Bombieri norm `sqrt(Σ_{|l|=k} p_l² / C_k^l)` of a homogeneous degree-`k` polynomial.
pub fn bombieri_norm(h: &ActionPolynomial, k: usize) -> Result<f64> {
    if let Some((l, _)) = h
        .terms()
        .find(|(l, _)| l.iter().map(|&x| x as usize).sum::<usize>() != k)
    {
        return Err(Error::Shape(format!(
            "bombieri_norm expects a homogeneous degree-{k} polynomial, found exponent {l:?}"
        )));
    }
    Ok(h.terms()
        .map(|(l, c)| c * c / multinomial(l))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let p = ActionPolynomial::monomial(3, &[4, 0, 0], 1.0);
        assert_eq!(bombieri_norm(&p, 4).unwrap(), 1.0);
        let q = ActionPolynomial::monomial(2, &[1, 1], 1.0);
        assert!((bombieri_norm(&q, 2).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let r = ActionPolynomial::monomial(1, &[2], 2.0);
        assert_eq!(bombieri_norm(&r, 2).unwrap(), 2.0);
        assert!(matches!(bombieri_norm(&r, 3), Err(Error::Shape(_))));
    }

    #[test]
    fn derivatives() {
        // h = I1² I2 + 3 I2
        let h = ActionPolynomial::from_terms(2, [(vec![2, 1], 1.0), (vec![0, 1], 3.0)]).unwrap();
        let a = [0.5, 2.0];
        let g = h.gradient(&a);
        assert!((g[0] - 2.0).abs() < 1e-15 && (g[1] - 3.25).abs() < 1e-15);
        let hs = h.hessian(&a);
        assert!((hs[(0, 0)] - 4.0).abs() < 1e-15);
        assert!((hs[(0, 1)] - 1.0).abs() < 1e-15 && (hs[(1, 0)] - 1.0).abs() < 1e-15);
        assert_eq!(hs[(1, 1)], 0.0);
    }

    #[test]
    fn lift_evaluates_on_actions() {
        let h = ActionPolynomial::from_terms(2, [(vec![1, 1], 0.7), (vec![2, 0], -1.0)]).unwrap();
        let g = h.to_graded();
        let z = [0.3, -0.4, 0.5, 0.1];
        let act = super::super::formal_actions(&z);
        assert!((g.eval(&z) - h.eval(&act)).abs() < 1e-15);
        assert_eq!(ActionPolynomial::from_graded_diagonal(&g), h);
    }

    #[test]
    fn text_round_trip() {
        let h = ActionPolynomial::from_terms(2, [(vec![1, 1], 0.7), (vec![0, 3], -1.25)]).unwrap();
        assert_eq!(ActionPolynomial::from_text(2, &h.to_text()).unwrap(), h);
    }
}
