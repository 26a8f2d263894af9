//! Symplectic diagonalization of an elliptic quadratic Hamiltonian.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::cartesian::CartesianPolynomial;
use super::frequency::Frequency;
use super::graded::GradedPolynomial;
use crate::error::{Error, Result};

/// Linear change of variables `z = T z'` on `ℝ²ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMap {
    pub matrix: DMatrix<f64>,
}

/// Standard symplectic matrix `[[0, I], [−I, 0]]`.
pub fn symplectic_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

impl SymplecticMap {
    pub fn identity(n: usize) -> Self {
        SymplecticMap {
            matrix: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `max |TᵀJT − J|`
    pub fn symplectic_defect(&self) -> f64 {
        let j = symplectic_j(self.n());
        (self.matrix.transpose() * &j * &self.matrix - j).amax()
    }

    /// Pull back a phase-space polynomial: `P ↦ P∘T`.
    pub fn pull_back(&self, p: &GradedPolynomial) -> Result<GradedPolynomial> {
        if p.n() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                found: p.n(),
            });
        }
        let cart = CartesianPolynomial::from_graded(p).compose_linear(&self.matrix)?;
        let mut out = cart.to_graded();
        if p.is_real() {
            out.set_real(out.conjugate_symmetric(1e-10));
        }
        Ok(out)
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(z))
            .iter()
            .copied()
            .collect()
    }
}

/// Hessian of a homogeneous quadratic in `(x, y)` coordinates.
pub fn quadratic_hessian(h2: &GradedPolynomial) -> Result<DMatrix<f64>> {
    if h2.terms().any(|(e, _)| e.degree() != 2) {
        return Err(Error::Shape("expected a homogeneous quadratic".into()));
    }
    let n = h2.n();
    let cart = CartesianPolynomial::from_graded(h2);
    let scale = cart.max_abs_coeff().max(f64::MIN_POSITIVE);
    if cart.max_imag() > 1e-12 * scale {
        return Err(Error::Precondition(
            "quadratic part is not real-valued".into(),
        ));
    }
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for (e, c) in cart.terms() {
        let idx: Vec<usize> = e
            .as_slice()
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
            .collect();
        let (p, q) = (idx[0], idx[1]);
        if p == q {
            s[(p, p)] += 2.0 * c.re;
        } else {
            s[(p, q)] += c.re;
            s[(q, p)] += c.re;
        }
    }
    Ok(s)
}

/// Find `ω` and a symplectic `T` with `H2∘T = ω·I`.
///
/// The frequencies are returned in the order of the degrees of freedom they
/// mostly live on; a mode with negative Krein signature gets a negative `ω_j`.
pub fn diagonalize_quadratic(h2: &GradedPolynomial) -> Result<(Frequency, SymplecticMap)> {
    let n = h2.n();
    let s = quadratic_hessian(h2)?;
    let j = symplectic_j(n);
    let a = &j * &s;
    let eig = a.clone().complex_eigenvalues();
    let scale = eig
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()))
        .max(f64::MIN_POSITIVE);
    for z in eig.iter() {
        if z.re.abs() > 1e-9 * scale {
            return Err(Error::NotElliptic { re: z.re, im: z.im });
        }
    }
    let mut mus: Vec<f64> = eig.iter().filter(|z| z.im > 0.0).map(|z| z.im).collect();
    if mus.len() != n || mus.iter().any(|&m| m <= 1e-9 * scale) {
        return Err(Error::Degenerate {
            i: 0,
            j: 0,
            value: 0.0,
        });
    }
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in 0..n.saturating_sub(1) {
        if (mus[w + 1] - mus[w]).abs() <= 1e-8 * scale {
            return Err(Error::Degenerate {
                i: w,
                j: w + 1,
                value: mus[w],
            });
        }
    }

    let ac: DMatrix<Complex64> = a.map(|v| Complex64::new(v, 0.0));
    let mut modes: Vec<(usize, f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n);
    for &mu in &mus {
        let shifted = &ac - DMatrix::<Complex64>::identity(2 * n, 2 * n) * Complex64::new(0.0, mu);
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.expect("requested V^H");
        let (imin, _) =
            svd.singular_values
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
                );
        let mut v: DVector<Complex64> = vt.row(imin).transpose().map(|c| c.conj());
        // Fix the phase: largest x-block entry real positive.
        let largest = |range: std::ops::Range<usize>| {
            range
                .max_by(|&p, &q| {
                    v[p].norm()
                        .partial_cmp(&v[q].norm())
                        .unwrap()
                        .then(q.cmp(&p))
                })
                .unwrap()
        };
        let mut pivot = largest(0..n);
        if v[pivot].norm() < 1e-8 {
            pivot = largest(n..2 * n);
        }
        let phase = v[pivot].conj() / v[pivot].norm();
        v *= phase;
        let mut u = v.map(|c| c.re);
        let mut w = v.map(|c| c.im);
        let mut sig = (u.transpose() * &j * &w)[(0, 0)];
        let mut omega = mu;
        if sig < 0.0 {
            w = -w;
            sig = -sig;
            omega = -mu;
        }
        let norm = 1.0 / sig.sqrt();
        u *= norm;
        w *= norm;
        let dof = (0..n)
            .max_by(|&p, &q| {
                let wp = u[p].powi(2) + u[n + p].powi(2) + w[p].powi(2) + w[n + p].powi(2);
                let wq = u[q].powi(2) + u[n + q].powi(2) + w[q].powi(2) + w[n + q].powi(2);
                wp.partial_cmp(&wq).unwrap().then(q.cmp(&p))
            })
            .unwrap();
        modes.push((dof, omega, u, w));
    }
    let mut seen: Vec<usize> = modes.iter().map(|m| m.0).collect();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() == n {
        modes.sort_by_key(|m| m.0);
    }

    let mut t = DMatrix::zeros(2 * n, 2 * n);
    let mut omega = Vec::with_capacity(n);
    for (col, (_, om, u, w)) in modes.into_iter().enumerate() {
        t.set_column(col, &u);
        t.set_column(n + col, &w);
        omega.push(om);
    }
    Ok((Frequency::new(omega)?, SymplecticMap { matrix: t }))
}
