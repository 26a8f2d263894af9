//! Sparse polynomials on `ℝ²ⁿ` stored in the complexified diagonal variables
//! `ζ_j = (x_j + i y_j)/√2` and `ζ̄_j`, so that `I_j = ζ_j ζ̄_j`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;

use super::monomial::Exponents;
use super::scalar::{c_from_f64, c_to_f64, cabs, Real};
use crate::error::{Error, Result};

/// Sparse polynomial in `(ζ, ζ̄)` with coefficients in `Complex<R>`.
///
/// Coefficients below `R::PRUNE_REL` times the largest coefficient of the same
/// homogeneous degree are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<R: Real = f64> {
    n: usize,
    terms: BTreeMap<Exponents, Complex<R>>,
    real: bool,
}

/// Double-precision phase-space polynomial.
pub type GradedPolynomial = Poly<f64>;

fn frac_1_sqrt2<R: Real>() -> R {
    R::one() / R::from_f64(2.0).sqrt()
}

impl<R: Real> Poly<R> {
    pub fn zero(n: usize) -> Self {
        Poly {
            n,
            terms: BTreeMap::new(),
            real: true,
        }
    }

    /// Build from raw terms; the reality flag is inferred from conjugate symmetry.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (Exponents, Complex<R>)>,
    ) -> Result<Self> {
        let mut p = Poly {
            n,
            terms: BTreeMap::new(),
            real: false,
        };
        for (e, c) in terms {
            if e.len() != 2 * n {
                return Err(Error::Shape(format!(
                    "monomial has {} exponents, expected {}",
                    e.len(),
                    2 * n
                )));
            }
            let slot = p.terms.entry(e).or_insert_with(Complex::zero_value);
            *slot = *slot + c;
        }
        p.prune();
        p.real = p.conjugate_symmetric(1e-12);
        Ok(p)
    }

    pub fn monomial(n: usize, a: &[u8], b: &[u8], c: Complex<R>) -> Self {
        assert_eq!(a.len(), n);
        assert_eq!(b.len(), n);
        let mut e = a.to_vec();
        e.extend_from_slice(b);
        let mut p = Poly::zero(n);
        p.real = a == b && c.im == R::zero();
        if c != Complex::zero_value() {
            p.terms.insert(Exponents::new(e), c);
        }
        p
    }

    /// `ζ_j`
    pub fn zeta(n: usize, j: usize) -> Self {
        let mut a = vec![0; n];
        a[j] = 1;
        let mut p = Self::monomial(n, &a, &vec![0; n], Complex::new(R::one(), R::zero()));
        p.real = false;
        p
    }

    /// `ζ̄_j`
    pub fn zeta_bar(n: usize, j: usize) -> Self {
        let mut b = vec![0; n];
        b[j] = 1;
        let mut p = Self::monomial(n, &vec![0; n], &b, Complex::new(R::one(), R::zero()));
        p.real = false;
        p
    }

    /// Position coordinate `x_j = (ζ_j + ζ̄_j)/√2`.
    pub fn x(n: usize, j: usize) -> Self {
        let s = Complex::new(frac_1_sqrt2::<R>(), R::zero());
        let mut p = Self::zeta(n, j)
            .scale(s)
            .add(&Self::zeta_bar(n, j).scale(s));
        p.real = true;
        p
    }

    /// Momentum coordinate `y_j = -i (ζ_j - ζ̄_j)/√2`.
    pub fn y(n: usize, j: usize) -> Self {
        let s = Complex::new(R::zero(), -frac_1_sqrt2::<R>());
        let mut p = Self::zeta(n, j)
            .scale(s)
            .add(&Self::zeta_bar(n, j).scale(-s));
        p.real = true;
        p
    }

    /// Formal action `I_j = ζ_j ζ̄_j = (x_j² + y_j²)/2`.
    pub fn action(n: usize, j: usize) -> Self {
        let mut a = vec![0; n];
        a[j] = 1;
        Self::monomial(n, &a, &a, Complex::new(R::one(), R::zero()))
    }

    /// `ω·I`
    pub fn linear_actions(omega: &[f64]) -> Self {
        let n = omega.len();
        let mut p = Poly::zero(n);
        for (j, &w) in omega.iter().enumerate() {
            p = p.add(&Self::action(n, j).scale_real(R::from_f64(w)));
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Complex<R>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponents) -> Complex<R> {
        self.terms
            .get(e)
            .copied()
            .unwrap_or_else(Complex::zero_value)
    }

    pub fn coeff_of(&self, a: &[u8], b: &[u8]) -> Complex<R> {
        let mut e = a.to_vec();
        e.extend_from_slice(b);
        self.coeff(&Exponents::new(e))
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.degree()).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    /// Checks `c(a,b) = conj(c(b,a))` within `tol` relative to the largest coefficient.
    pub fn conjugate_symmetric(&self, tol: f64) -> bool {
        let scale = self
            .terms
            .values()
            .map(cabs)
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        self.terms.iter().all(|(e, c)| {
            let partner = self.coeff(&e.conjugate());
            let d = c_to_f64(c) - c_to_f64(&partner).conj();
            d.norm() <= tol * scale
        })
    }

    fn check_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Drops coefficients below the relative per-degree threshold.
    pub fn prune(&mut self) {
        let mut max_by_degree: BTreeMap<usize, f64> = BTreeMap::new();
        for (e, c) in &self.terms {
            let m = max_by_degree.entry(e.degree()).or_insert(0.0);
            *m = m.max(cabs(c));
        }
        self.terms.retain(|e, c| {
            let mag = cabs(c);
            mag > 0.0 && mag >= R::PRUNE_REL * max_by_degree[&e.degree()]
        });
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in add");
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(e.clone()).or_insert_with(Complex::zero_value);
            *slot = *slot + *c;
        }
        let mut p = Poly {
            n: self.n,
            terms,
            real: self.real && other.real,
        };
        p.prune();
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -*c)).collect(),
            real: self.real,
        }
    }

    pub fn scale(&self, s: Complex<R>) -> Self {
        if s == Complex::zero_value() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), *c * s))
                .collect(),
            real: self.real && s.im == R::zero(),
        }
    }

    pub fn scale_real(&self, s: R) -> Self {
        self.scale(Complex::new(s, R::zero()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in mul");
        let mut terms: BTreeMap<Exponents, Complex<R>> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let slot = terms.entry(e1.add(e2)).or_insert_with(Complex::zero_value);
                *slot = *slot + *c1 * *c2;
            }
        }
        let mut p = Poly {
            n: self.n,
            terms,
            real: self.real && other.real,
        };
        p.prune();
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::zero(self.n);
        acc.terms.insert(
            Exponents::zeros(2 * self.n),
            Complex::new(R::one(), R::zero()),
        );
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Homogeneous part of total degree `d`.
    pub fn homogeneous(&self, d: usize) -> Self {
        self.filter(|e| e.degree() == d)
    }

    /// Terms of total degree `≤ max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Self {
        self.filter(|e| e.degree() <= max_degree)
    }

    /// Terms whose degree lies in `lo..=hi`.
    pub fn degree_range(&self, lo: usize, hi: usize) -> Self {
        self.filter(|e| (lo..=hi).contains(&e.degree()))
    }

    /// `Σ c̄ ζ^b ζ̄^a`: the polynomial whose values are the complex conjugates.
    pub fn conjugate_terms(&self) -> Self {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.conjugate(), Complex::new(c.re, -c.im)))
                .collect(),
            real: self.real,
        }
    }

    /// Terms with `a = b`, i.e. functions of the actions alone.
    pub fn filter_actions(&self) -> Self {
        self.filter(|e| e.is_action())
    }

    pub(crate) fn filter(&self, keep: impl Fn(&Exponents) -> bool) -> Self {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
            real: self.real,
        }
    }

    /// Replaces the homogeneous degree-`d` part by `part`.
    pub fn replace_homogeneous(&self, d: usize, part: &Self) -> Self {
        let mut p = self.filter(|e| e.degree() != d);
        for (e, c) in &part.terms {
            debug_assert_eq!(e.degree(), d);
            p.terms.insert(e.clone(), *c);
        }
        p.real = self.real && part.real;
        p
    }

    /// Poisson bracket `{P, Q} = Σ_j ∂P/∂x_j ∂Q/∂y_j − ∂P/∂y_j ∂Q/∂x_j`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.bracket_truncated(other, usize::MAX)
    }

    /// Poisson bracket keeping only output terms of degree `≤ max_degree`.
    ///
    /// In the complex variables `{ζ^a ζ̄^b, ζ^c ζ̄^e} = −i Σ_j (a_j e_j − b_j c_j) ζ^{a+c−1_j} ζ̄^{b+e−1_j}`.
    pub fn bracket_truncated(&self, other: &Self, max_degree: usize) -> Result<Self> {
        self.check_n(other)?;
        let n = self.n;
        let mut terms: BTreeMap<Exponents, Complex<R>> = BTreeMap::new();
        let mut buf = vec![0u8; 2 * n];
        for (e1, c1) in &self.terms {
            let d1 = e1.degree();
            let (a, b) = e1.halves();
            for (e2, c2) in &other.terms {
                let d2 = e2.degree();
                if d1 + d2 < 2 || d1 + d2 - 2 > max_degree {
                    continue;
                }
                let (c, e) = e2.halves();
                let prod = *c1 * *c2;
                for j in 0..n {
                    let w = a[j] as i64 * e[j] as i64 - b[j] as i64 * c[j] as i64;
                    if w == 0 {
                        continue;
                    }
                    for k in 0..n {
                        buf[k] = a[k] + c[k];
                        buf[n + k] = b[k] + e[k];
                    }
                    buf[j] -= 1;
                    buf[n + j] -= 1;
                    // −i · w · prod
                    let wr = R::from_f64(w as f64);
                    let term = Complex::new(prod.im * wr, -(prod.re * wr));
                    let slot = terms
                        .entry(Exponents::new(buf.clone()))
                        .or_insert_with(Complex::zero_value);
                    *slot = *slot + term;
                }
            }
        }
        let mut p = Poly {
            n,
            terms,
            real: self.real && other.real,
        };
        p.prune();
        Ok(p)
    }

    /// Evaluate at complex `(ζ, ζ̄)` given as separate vectors.
    pub fn eval_complex(&self, zeta: &[Complex<f64>], zeta_bar: &[Complex<f64>]) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let (a, b) = e.halves();
            let mut t = c_to_f64(c);
            for j in 0..self.n {
                t *= zeta[j].powu(a[j] as u32) * zeta_bar[j].powu(b[j] as u32);
            }
            acc += t;
        }
        acc
    }

    /// Evaluate at a real phase point `z = (x_1..x_n, y_1..y_n)`; returns the real part.
    pub fn eval(&self, z: &[f64]) -> f64 {
        let n = self.n;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zeta: Vec<_> = (0..n)
            .map(|j| Complex::new(z[j] * s, z[n + j] * s))
            .collect();
        let zb: Vec<_> = zeta.iter().map(|c| c.conj()).collect();
        self.eval_complex(&zeta, &zb).re
    }

    /// Convert the coefficient field.
    pub fn cast<S: Real>(&self) -> Poly<S> {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c_from_f64::<S>(c_to_f64(c))))
                .filter(|(_, c)| *c != Complex::zero_value())
                .collect(),
            real: self.real,
        }
    }

    /// Convert to double precision without the intermediate rounding of `cast`.
    pub fn to_f64(&self) -> GradedPolynomial {
        let mut p = GradedPolynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c_to_f64(c)))
                .collect(),
            real: self.real,
        };
        p.prune();
        p
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(cabs).fold(0.0, f64::max)
    }

    pub(crate) fn set_real(&mut self, real: bool) {
        self.real = real;
    }
}

trait ZeroValue {
    fn zero_value() -> Self;
}

impl<R: Real> ZeroValue for Complex<R> {
    fn zero_value() -> Self {
        Complex::new(R::zero(), R::zero())
    }
}

impl GradedPolynomial {
    /// Canonical text form: one term per line, `a_1 … a_n | b_1 … b_n | re im`,
    /// in graded-lex order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (e, c) in &self.terms {
            let (a, b) = e.halves();
            let join = |v: &[u8]| {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(out, "{} | {} | {:e} {:e}", join(a), join(b), c.re, c.im);
        }
        out
    }

    /// Parse the canonical text form. Blank lines and `#` comments are ignored.
    pub fn from_text(n: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: idx + 1, msg };
            let fields: Vec<&str> = line.split('|').collect();
            if fields.len() != 3 {
                return Err(perr("expected `a.. | b.. | re im`".into()));
            }
            let parse_exps = |s: &str| -> Result<Vec<u8>> {
                s.split_whitespace()
                    .map(|t| {
                        t.parse::<u8>()
                            .map_err(|e| perr(format!("bad exponent `{t}`: {e}")))
                    })
                    .collect()
            };
            let a = parse_exps(fields[0])?;
            let b = parse_exps(fields[1])?;
            if a.len() != n || b.len() != n {
                return Err(perr(format!("expected {n} exponents on each side")));
            }
            let nums: Vec<f64> = fields[2]
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|e| perr(format!("bad number `{t}`: {e}")))
                })
                .collect::<Result<_>>()?;
            let c = match nums.as_slice() {
                [re] => Complex::new(*re, 0.0),
                [re, im] => Complex::new(*re, *im),
                _ => return Err(perr("expected `re` or `re im`".into())),
            };
            let mut e = a;
            e.extend(b);
            terms.push((Exponents::new(e), c));
        }
        Self::from_terms(n, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> GradedPolynomial {
        GradedPolynomial::x(1, 0)
    }

    #[test]
    fn canonical_pair_bracket() {
        let x = p1();
        let y = GradedPolynomial::y(1, 0);
        let b = x.bracket(&y).unwrap();
        assert_eq!(b.len(), 1);
        let c = b.coeff_of(&[0], &[0]);
        assert!((c.re - 1.0).abs() < 1e-15 && c.im.abs() < 1e-15);
    }

    #[test]
    fn actions_commute() {
        let i1 = GradedPolynomial::action(2, 0);
        let i2 = GradedPolynomial::action(2, 1);
        assert!(i1.bracket(&i2).unwrap().is_zero());
    }

    #[test]
    fn x_squared_with_y() {
        // {x², y} = 2x
        let x = GradedPolynomial::x(1, 0);
        let y = GradedPolynomial::y(1, 0);
        let b = x.mul(&x).bracket(&y).unwrap();
        let expected = x.scale_real(2.0);
        assert!(b.sub(&expected).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn action_from_coordinates() {
        let x = GradedPolynomial::x(1, 0);
        let y = GradedPolynomial::y(1, 0);
        let i = x.mul(&x).add(&y.mul(&y)).scale_real(0.5);
        assert!(i.sub(&GradedPolynomial::action(1, 0)).max_abs_coeff() < 1e-15);
        assert!(i.is_real());
    }

    #[test]
    fn mismatched_dimensions() {
        let a = GradedPolynomial::x(1, 0);
        let b = GradedPolynomial::x(2, 0);
        assert!(matches!(a.bracket(&b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn text_round_trip() {
        let x = GradedPolynomial::x(2, 1);
        let p = x
            .mul(&x)
            .mul(&GradedPolynomial::y(2, 0))
            .add(&GradedPolynomial::action(2, 0));
        let txt = p.to_text();
        let back = GradedPolynomial::from_text(2, &txt).unwrap();
        assert_eq!(back.to_text(), txt);
        assert!(back.is_real());
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = GradedPolynomial::from_text(1, "1 | 0 | 1 0\n1 0 | 1 | 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn eval_matches_coordinates() {
        let x = GradedPolynomial::x(2, 0);
        let y = GradedPolynomial::y(2, 1);
        let p = x.mul(&y).add(&x.pow(3));
        let z = [0.3, -0.2, 0.7, 1.1];
        let expect = 0.3 * 1.1 + 0.3f64.powi(3);
        assert!((p.eval(&z) - expect).abs() < 1e-14);
    }

    #[test]
    fn pruning_is_relative_per_degree() {
        let big = GradedPolynomial::monomial(1, &[2], &[0], Complex::new(1.0, 0.0));
        let tiny = GradedPolynomial::monomial(1, &[1], &[1], Complex::new(1e-16, 0.0));
        let lone = GradedPolynomial::monomial(1, &[3], &[0], Complex::new(1e-16, 0.0));
        let p = big.add(&tiny).add(&lone);
        assert_eq!(
            p.len(),
            2,
            "same-degree tiny term dropped, lone degree kept"
        );
    }
}
