//! Degree-by-degree Lie-series normalization, generic over the coefficient field.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::polyalg::{Poly, Real};

/// Smallest divisor met while solving the degree-`d` homological equation.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DivisorEntry {
    pub degree: usize,
    /// `None` when every degree-`d` monomial was already in normal form.
    pub min_divisor: Option<f64>,
    pub k: Option<Vec<i64>>,
}

pub(crate) fn divisor_guard(omega_max: f64) -> f64 {
    1e-10 * omega_max
}

/// `(kernel, χ, smallest divisor met with its k)`
type HomologicalSplit<R> = (Poly<R>, Poly<R>, Option<(f64, Vec<i64>)>);

/// Splits a homogeneous `r` into its `a = b` part and the generator `χ` with
/// `r + {χ, ω·I} = kernel`.
pub(crate) fn solve_homological<R: Real>(
    r: &Poly<R>,
    omega: &[R],
    guard: f64,
) -> Result<HomologicalSplit<R>> {
    let n = r.n();
    let mut kernel = Vec::new();
    let mut gen = Vec::new();
    let mut smallest: Option<(f64, Vec<i64>)> = None;
    for (e, c) in r.terms() {
        if e.is_action() {
            kernel.push((e.clone(), *c));
            continue;
        }
        let k = e.resonance_vector();
        let div = k
            .iter()
            .zip(omega)
            .fold(R::zero(), |acc, (&kj, &w)| acc + R::from_f64(kj as f64) * w);
        let div_f = div.to_f64();
        if div_f.abs() < guard {
            return Err(Error::SmallDivisor {
                k,
                divisor: div_f.abs(),
            });
        }
        if smallest.as_ref().is_none_or(|(v, _)| div_f.abs() < *v) {
            smallest = Some((div_f.abs(), k));
        }
        // c / (i·div) = (c.im − i·c.re)/div
        gen.push((e.clone(), Complex::new(c.im / div, -c.re / div)));
    }
    let mut kernel = Poly::from_terms(n, kernel)?;
    let mut gen = Poly::from_terms(n, gen)?;
    if r.is_real() {
        kernel.set_real(true);
        gen.set_real(true);
    }
    Ok((kernel, gen, smallest))
}

/// `exp(L_χ) F = Σ_k {χ, ·}^k F / k!`, dropping everything above `trunc`.
pub(crate) fn lie_transform<R: Real>(f: &Poly<R>, chi: &Poly<R>, trunc: usize) -> Result<Poly<R>> {
    let mut acc = f.truncate(trunc);
    if chi.is_zero() {
        return Ok(acc);
    }
    let mut term = acc.clone();
    let mut k = 1u32;
    loop {
        term = chi.bracket_truncated(&term, trunc)?;
        if term.is_zero() {
            break;
        }
        term = term.scale_real(R::one() / R::from_f64(k as f64));
        acc = acc.add(&term);
        k += 1;
    }
    Ok(acc)
}

pub(crate) struct EngineOutput<R: Real> {
    pub omega: Vec<R>,
    /// Homogeneous degree-`2k` kernels for `k = 1..=m`.
    pub kernels: Vec<Poly<R>>,
    pub generators: Vec<Poly<R>>,
    pub remainder: Poly<R>,
    pub divisor_log: Vec<DivisorEntry>,
}

/// Reads `ω` off a quadratic part that must already be `Σ ω_j I_j`.
pub(crate) fn diagonal_frequencies<R: Real>(h: &Poly<R>) -> Result<Vec<R>> {
    let n = h.n();
    let mut omega = vec![R::zero(); n];
    for (e, c) in h.terms() {
        let d = e.degree();
        if d < 2 {
            return Err(Error::Precondition(format!(
                "Hamiltonian has a term of degree {d}; expected an expansion starting at degree 2"
            )));
        }
        if d != 2 {
            continue;
        }
        if !e.is_action() {
            return Err(Error::Precondition(
                "quadratic part is not diagonal; apply diagonalize_quadratic first".into(),
            ));
        }
        let j = e.halves().0.iter().position(|&a| a == 1).unwrap();
        let scale = c.re.to_f64().abs().max(1.0);
        if c.im.to_f64().abs() > 1e-12 * scale {
            return Err(Error::Precondition(
                "quadratic part has complex coefficients".into(),
            ));
        }
        omega[j] = c.re;
    }
    Ok(omega)
}

pub(crate) fn normalize_generic<R: Real>(
    h: &Poly<R>,
    m: usize,
    trunc: usize,
) -> Result<EngineOutput<R>> {
    let omega = diagonal_frequencies(h)?;
    let omega_f: Vec<f64> = omega.iter().map(|w| w.to_f64()).collect();
    let omega_max = omega_f.iter().fold(0.0f64, |a, w| a.max(w.abs()));
    let guard = divisor_guard(omega_max);

    // Non-resonance through order 2m, independent of which monomials occur.
    for order in 1..=2 * m {
        let mut bad = None;
        crate::arith::for_each_l1_shell(h.n(), order, |k| {
            let d: f64 = k.iter().zip(&omega_f).map(|(&a, w)| a as f64 * w).sum();
            if d.abs() < guard {
                bad = Some((k.to_vec(), d.abs()));
                false
            } else {
                true
            }
        });
        if let Some((k, divisor)) = bad {
            return Err(Error::SmallDivisor { k, divisor });
        }
    }

    let mut ham = h.truncate(trunc);
    let mut generators = Vec::with_capacity(2 * m);
    let mut divisor_log = Vec::with_capacity(2 * m);
    for d in 3..=2 * m {
        let r = ham.homogeneous(d);
        let (kernel, chi, smallest) = solve_homological(&r, &omega, guard)?;
        divisor_log.push(DivisorEntry {
            degree: d,
            min_divisor: smallest.as_ref().map(|s| s.0),
            k: smallest.map(|s| s.1),
        });
        if !chi.is_zero() {
            ham = lie_transform(&ham, &chi, trunc)?;
            ham = ham.replace_homogeneous(d, &kernel);
        }
        generators.push(chi);
    }
    let kernels = (1..=m).map(|k| ham.homogeneous(2 * k)).collect();
    let remainder = ham.degree_range(2 * m + 1, trunc);
    Ok(EngineOutput {
        omega,
        kernels,
        generators,
        remainder,
        divisor_log,
    })
}
