//! Polynomials in the real phase-space coordinates `(x_1..x_n, y_1..y_n)`.
//!
//! This representation is used for evaluation, exact gradients, majorant
//! bounds and linear changes of variables. Its Poisson bracket is coded
//! directly from the partial-derivative formula and is independent of the
//! complex-variable bracket in [`super::graded`].

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::graded::GradedPolynomial;
use super::monomial::{binomial, Exponents};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CartesianPolynomial {
    n: usize,
    terms: BTreeMap<Exponents, Complex64>,
}

/// Expansion of `(α u + β v)^p (γ u + δ v)^q` as `(u-exp, v-exp) → coeff`.
fn expand_pair(
    p: u8,
    q: u8,
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    delta: Complex64,
) -> Vec<((u8, u8), Complex64)> {
    let mut acc: BTreeMap<(u8, u8), Complex64> = BTreeMap::new();
    for s in 0..=p {
        let c1 =
            binomial(p as usize, s as usize) * alpha.powu((p - s) as u32) * beta.powu(s as u32);
        for t in 0..=q {
            let c2 = binomial(q as usize, t as usize)
                * gamma.powu((q - t) as u32)
                * delta.powu(t as u32);
            let key = ((p - s) + (q - t), s + t);
            *acc.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c1 * c2;
        }
    }
    acc.into_iter().collect()
}

/// Substitute per-degree-of-freedom linear forms into monomials `u^p v^q`.
fn substitute_pairs(
    n: usize,
    terms: impl Iterator<Item = (Exponents, Complex64)>,
    forms: (Complex64, Complex64, Complex64, Complex64),
) -> BTreeMap<Exponents, Complex64> {
    let (alpha, beta, gamma, delta) = forms;
    let mut out: BTreeMap<Exponents, Complex64> = BTreeMap::new();
    for (e, c) in terms {
        let (p, q) = e.halves();
        let mut partial: Vec<(Vec<u8>, Complex64)> = vec![(vec![0; 2 * n], c)];
        for j in 0..n {
            let pieces = expand_pair(p[j], q[j], alpha, beta, gamma, delta);
            let mut next = Vec::with_capacity(partial.len() * pieces.len());
            for (ex, cx) in &partial {
                for ((eu, ev), cp) in &pieces {
                    let mut ee = ex.clone();
                    ee[j] = *eu;
                    ee[n + j] = *ev;
                    next.push((ee, cx * cp));
                }
            }
            partial = next;
        }
        for (ee, cc) in partial {
            *out.entry(Exponents::new(ee))
                .or_insert(Complex64::new(0.0, 0.0)) += cc;
        }
    }
    out
}

fn prune_map(terms: &mut BTreeMap<Exponents, Complex64>, rel: f64) {
    let mut max_by_degree: BTreeMap<usize, f64> = BTreeMap::new();
    for (e, c) in terms.iter() {
        let m = max_by_degree.entry(e.degree()).or_insert(0.0);
        *m = m.max(c.norm());
    }
    terms.retain(|e, c| {
        let mag = c.norm();
        mag > 0.0 && mag >= rel * max_by_degree[&e.degree()]
    });
}

impl CartesianPolynomial {
    pub fn zero(n: usize) -> Self {
        CartesianPolynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Exponents, Complex64)>) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), 2 * n);
            *map.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        prune_map(&mut map, 1e-14);
        CartesianPolynomial { n, terms: map }
    }

    /// Monomial `c · x^p y^q`.
    pub fn monomial(n: usize, p: &[u8], q: &[u8], c: f64) -> Self {
        let mut e = p.to_vec();
        e.extend_from_slice(q);
        Self::from_terms(n, [(Exponents::new(e), Complex64::new(c, 0.0))])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Expand `ζ = (x + iy)/√2`, `ζ̄ = (x − iy)/√2`.
    pub fn from_graded(p: &GradedPolynomial) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let forms = (
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(s, 0.0),
            Complex64::new(0.0, -s),
        );
        let mut terms = substitute_pairs(p.n(), p.terms().map(|(e, c)| (e.clone(), *c)), forms);
        prune_map(&mut terms, 1e-14);
        CartesianPolynomial { n: p.n(), terms }
    }

    /// Expand `x = (ζ + ζ̄)/√2`, `y = −i(ζ − ζ̄)/√2`.
    pub fn to_graded(&self) -> GradedPolynomial {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let forms = (
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(0.0, -s),
            Complex64::new(0.0, s),
        );
        let terms = substitute_pairs(
            self.n,
            self.terms.iter().map(|(e, c)| (e.clone(), *c)),
            forms,
        );
        GradedPolynomial::from_terms(self.n, terms).expect("exponent layout is consistent")
    }

    /// Largest imaginary part of any coefficient.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_terms(
            self.n,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, c)| (e.clone(), *c)),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        CartesianPolynomial {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_truncated(other, usize::MAX)
    }

    /// Product keeping only terms of degree `≤ max_degree`.
    pub fn mul_truncated(&self, other: &Self, max_degree: usize) -> Self {
        assert_eq!(self.n, other.n);
        let mut map: BTreeMap<Exponents, Complex64> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                if e1.degree() + e2.degree() > max_degree {
                    continue;
                }
                *map.entry(e1.add(e2)).or_insert(Complex64::new(0.0, 0.0)) += c1 * c2;
            }
        }
        prune_map(&mut map, 1e-14);
        CartesianPolynomial {
            n: self.n,
            terms: map,
        }
    }

    pub fn truncate(&self, max_degree: usize) -> Self {
        CartesianPolynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() <= max_degree)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    /// Partial derivative with respect to phase-space coordinate `var` (0..2n).
    pub fn derivative(&self, var: usize) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e.as_slice()[var];
            if k == 0 {
                continue;
            }
            let mut v = e.as_slice().to_vec();
            v[var] -= 1;
            *map.entry(Exponents::new(v))
                .or_insert(Complex64::new(0.0, 0.0)) += c * k as f64;
        }
        CartesianPolynomial {
            n: self.n,
            terms: map,
        }
    }

    /// Poisson bracket from partial derivatives, truncated at `max_degree`.
    pub fn bracket_truncated(&self, other: &Self, max_degree: usize) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        let n = self.n;
        let mut acc = CartesianPolynomial::zero(n);
        for j in 0..n {
            let px = self.derivative(j);
            let py = self.derivative(n + j);
            let qx = other.derivative(j);
            let qy = other.derivative(n + j);
            acc = acc.add(&px.mul_truncated(&qy, max_degree));
            acc = acc.sub(&py.mul_truncated(&qx, max_degree));
        }
        Ok(acc)
    }

    pub fn eval_complex(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (zi, &k) in z.iter().zip(e.as_slice()) {
                if k > 0 {
                    t *= zi.powu(k as u32);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let zc: Vec<Complex64> = z.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.eval_complex(&zc).re
    }

    /// `P∘T`: substitute `z = T z'` for a `2n × 2n` matrix `T`.
    pub fn compose_linear(&self, t: &DMatrix<f64>) -> Result<Self> {
        let dim = 2 * self.n;
        if t.nrows() != dim || t.ncols() != dim {
            return Err(Error::Shape(format!(
                "linear map must be {dim}x{dim}, got {}x{}",
                t.nrows(),
                t.ncols()
            )));
        }
        let rows: Vec<CartesianPolynomial> = (0..dim)
            .map(|i| {
                let terms = (0..dim).filter(|&k| t[(i, k)] != 0.0).map(|k| {
                    let mut e = vec![0u8; dim];
                    e[k] = 1;
                    (Exponents::new(e), Complex64::new(t[(i, k)], 0.0))
                });
                CartesianPolynomial::from_terms(self.n, terms)
            })
            .collect();
        let one = CartesianPolynomial::from_terms(
            self.n,
            [(Exponents::zeros(dim), Complex64::new(1.0, 0.0))],
        );
        let mut powers: Vec<Vec<CartesianPolynomial>> =
            rows.iter().map(|_| vec![one.clone()]).collect();
        let mut acc = CartesianPolynomial::zero(self.n);
        for (e, c) in &self.terms {
            let mut prod = one.clone();
            for (i, &k) in e.as_slice().iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&rows[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    prod = prod.mul(&powers[i][k as usize]);
                }
            }
            acc = acc.add(&CartesianPolynomial {
                n: self.n,
                terms: prod.terms.into_iter().map(|(e, v)| (e, v * c)).collect(),
            });
        }
        Ok(acc)
    }

    /// Majorant `Σ |c| s^deg`, an upper bound for the supremum over the closed
    /// complex ball of radius `s` (every coordinate has modulus `≤ s` there).
    pub fn majorant(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.norm() * s.powi(e.degree() as i32))
            .sum()
    }
}

/// Majorant bound `Σ |c| s^deg ≥ sup_{|z| ≤ s} |P|`, with coefficients taken in
/// the real coordinates `(x, y)` so that the bound is attained by monomials.
pub fn sup_norm_bound(p: &GradedPolynomial, s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {s}")));
    }
    Ok(CartesianPolynomial::from_graded(p).majorant(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_complex_variables() {
        let p = CartesianPolynomial::monomial(2, &[2, 1], &[0, 1], 1.5)
            .add(&CartesianPolynomial::monomial(2, &[0, 0], &[3, 0], -0.25));
        let back = CartesianPolynomial::from_graded(&p.to_graded());
        assert!(back.sub(&p).max_abs_coeff() < 1e-14);
        assert!(back.max_imag() < 1e-14);
    }

    #[test]
    fn monomial_bound_is_exact() {
        let x = GradedPolynomial::x(1, 0);
        let p = x.pow(5).scale_real(-3.0);
        let b = sup_norm_bound(&p, 0.7).unwrap();
        assert!((b - 3.0 * 0.7f64.powi(5)).abs() < 1e-14);
        assert_eq!(
            sup_norm_bound(&GradedPolynomial::zero(1), 0.5).unwrap(),
            0.0
        );
        assert!(matches!(sup_norm_bound(&x, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn bound_dominates_grid_search_on_complex_ball() {
        // P = x + y on the unit ball of C²; the majorant is 2.
        let p = GradedPolynomial::x(1, 0).add(&GradedPolynomial::y(1, 0));
        let bound = sup_norm_bound(&p, 1.0).unwrap();
        assert!((bound - 2.0).abs() < 1e-14);
        let cp = CartesianPolynomial::from_graded(&p);
        let mut best: f64 = 0.0;
        let steps = 24;
        for ir in 0..=steps {
            let r = ir as f64 / steps as f64;
            let rx = r;
            let ry = (1.0 - r * r).max(0.0).sqrt();
            for ia in 0..steps {
                for ib in 0..steps {
                    let ta = ia as f64 * std::f64::consts::TAU / steps as f64;
                    let tb = ib as f64 * std::f64::consts::TAU / steps as f64;
                    let z = [Complex64::from_polar(rx, ta), Complex64::from_polar(ry, tb)];
                    best = best.max(cp.eval_complex(&z).norm());
                }
            }
        }
        assert!(best <= bound + 1e-12);
        assert!(
            best > 1.3,
            "grid finds the √2 maximum approximately, got {best}"
        );
    }

    #[test]
    fn real_bracket_matches_canonical_pair() {
        let x = CartesianPolynomial::monomial(1, &[1], &[0], 1.0);
        let y = CartesianPolynomial::monomial(1, &[0], &[1], 1.0);
        let b = x.bracket_truncated(&y, 10).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b.eval(&[0.3, 0.9]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn compose_with_scaling() {
        let p = CartesianPolynomial::monomial(1, &[2], &[0], 1.0);
        let t = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let q = p.compose_linear(&t).unwrap();
        assert!((q.eval(&[0.5, 0.1]) - 1.0).abs() < 1e-15);
    }
}
