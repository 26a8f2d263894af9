//! Checks of a computed normal form that do not reuse the complex-variable engine.

use super::NormalFormResult;
use crate::dynamics::ImplicitMidpoint;
use crate::error::Result;
use crate::polyalg::{CartesianPolynomial, CompiledPolynomial, GradedPolynomial};

/// Re-expands `H` through the generator chain in real `(x, y)` coordinates and
/// returns `max |Δcoeff| / max |coeff|` against `Σ B^(k) + f_m`.
pub fn transport_residual(h: &GradedPolynomial, nf: &NormalFormResult) -> Result<f64> {
    let trunc = nf.trunc;
    let mut ham = CartesianPolynomial::from_graded(h).truncate(trunc);
    for chi in &nf.generators {
        if chi.is_zero() {
            continue;
        }
        let c = CartesianPolynomial::from_graded(chi);
        let mut term = ham.clone();
        let mut k = 1.0;
        loop {
            term = c.bracket_truncated(&term, trunc)?.scale(1.0 / k);
            if term.is_empty() {
                break;
            }
            ham = ham.add(&term);
            k += 1.0;
        }
    }
    let target = CartesianPolynomial::from_graded(&nf.normalized_hamiltonian());
    let scale = target
        .max_abs_coeff()
        .max(ham.max_abs_coeff())
        .max(f64::MIN_POSITIVE);
    Ok(ham.sub(&target).max_abs_coeff() / scale)
}

/// `Φ_m = ψ_3∘⋯∘ψ_2m` evaluated pointwise by integrating each generator flow.
#[derive(Clone, Debug)]
pub struct NormalizingMap {
    flows: Vec<CompiledPolynomial>,
    substeps: usize,
}

impl NormalizingMap {
    pub fn new(nf: &NormalFormResult, substeps: usize) -> Result<Self> {
        let flows = nf
            .generators
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| CompiledPolynomial::new(&g.neg()))
            .collect::<Result<Vec<_>>>()?;
        Ok(NormalizingMap {
            flows,
            substeps: substeps.max(1),
        })
    }

    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut w = z.to_vec();
        let dt = 1.0 / self.substeps as f64;
        for f in self.flows.iter().rev() {
            let mut im = ImplicitMidpoint::new(f.clone(), dt);
            im.advance(&mut w, self.substeps, 0.0)?;
        }
        Ok(w)
    }

    /// Central-difference Jacobian `DΦ_m(z)` (row-major, `2n × 2n`).
    pub fn jacobian(&self, z: &[f64], step: f64) -> Result<nalgebra::DMatrix<f64>> {
        let d = z.len();
        let mut jac = nalgebra::DMatrix::zeros(d, d);
        for c in 0..d {
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[c] += step;
            zm[c] -= step;
            let fp = self.apply(&zp)?;
            let fm = self.apply(&zm)?;
            for r in 0..d {
                jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * step);
            }
        }
        Ok(jac)
    }
}
