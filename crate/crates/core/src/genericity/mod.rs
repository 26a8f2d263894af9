//! The Birkhoff-invariant coefficient map `P ↦ Q`, its triangular structure,
//! rescaling to the unit brick, and the bad-parameter volume proxy.

mod rescale;
mod torsion;
mod volume;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use rescale::{order_schedule, rescale, RescaleContext, RescaledHamiltonian};
pub use torsion::{torsion_class, TorsionClass, TorsionReport, TORSION_TOL};
pub use volume::{
    bad_parameter_volume, bad_volume_sweep, ball_volume, loglog_slope, write_volume_csv,
    BadVolumeEstimate, SlopeFit, VolumeOptions,
};

use crate::bnf::normalize;
use crate::error::{Error, Result};
use crate::polyalg::{compositions, homogeneous_dim, ActionPolynomial, GradedPolynomial};

#[derive(Clone, Debug, PartialEq)]
pub struct BNFMapPoint {
    pub base_h: GradedPolynomial,
    pub m: usize,
    pub input: Vec<ActionPolynomial>,
    pub output: Vec<ActionPolynomial>,
}

/// `D_m = Σ_{k=1}^m C(k+n−1, n−1)`
pub fn coefficient_dim(n: usize, m: usize) -> usize {
    (1..=m).map(|k| homogeneous_dim(n, k)).sum()
}

/// Flatten `(P_1, …, P_m)` into the graded basis: degree by degree, and
/// within a degree in [`compositions`] order.
pub fn flatten(parts: &[ActionPolynomial], n: usize) -> Vec<f64> {
    let mut v = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        v.extend(p.coefficient_vector(i + 1));
    }
    debug_assert_eq!(v.len(), coefficient_dim(n, parts.len()));
    v
}

pub fn unflatten(v: &[f64], n: usize, m: usize) -> Vec<ActionPolynomial> {
    let mut out = Vec::with_capacity(m);
    let mut at = 0;
    for k in 1..=m {
        let d = homogeneous_dim(n, k);
        out.push(ActionPolynomial::from_coefficient_vector(
            n,
            k,
            &v[at..at + d],
        ));
        at += d;
    }
    out
}

fn check_parts(n: usize, m: usize, p: &[ActionPolynomial]) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("bnf_map needs m >= 1".into()));
    }
    if p.len() > m {
        return Err(Error::Shape(format!(
            "got {} inputs for order m = {m}",
            p.len()
        )));
    }
    for (i, pk) in p.iter().enumerate() {
        if pk.n() != n {
            return Err(Error::Dimension {
                expected: n,
                found: pk.n(),
            });
        }
        if !pk.is_homogeneous(i + 1) {
            return Err(Error::Shape(format!(
                "P_{} must be homogeneous of degree {}",
                i + 1,
                i + 1
            )));
        }
    }
    Ok(())
}

/// `(Q_1, …, Q_m)`: Birkhoff invariants of `base_h + Σ_j P_j(I)`.
///
/// `p` may be shorter than `m`; missing degrees are zero.
pub fn bnf_map(
    base_h: &GradedPolynomial,
    m: usize,
    p: &[ActionPolynomial],
) -> Result<Vec<ActionPolynomial>> {
    let n = base_h.n();
    check_parts(n, m, p)?;
    let h = p
        .iter()
        .fold(base_h.clone(), |acc, pk| acc.add(&pk.to_graded()));
    Ok(normalize(&h, m, 2 * m)?.invariants)
}

pub fn bnf_map_point(
    base_h: &GradedPolynomial,
    m: usize,
    p: &[ActionPolynomial],
) -> Result<BNFMapPoint> {
    let output = bnf_map(base_h, m, p)?;
    let mut input = p.to_vec();
    input.resize(m, ActionPolynomial::zero(base_h.n()));
    Ok(BNFMapPoint {
        base_h: base_h.clone(),
        m,
        input,
        output,
    })
}

/// Central-difference Jacobian of the flattened coefficient map at `p0`.
pub fn coefficient_jacobian(
    base_h: &GradedPolynomial,
    m: usize,
    p0: &[ActionPolynomial],
    step: f64,
) -> Result<DMatrix<f64>> {
    let n = base_h.n();
    check_parts(n, m, p0)?;
    if !(step > 0.0) {
        return Err(Error::Domain(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let mut padded = p0.to_vec();
    while padded.len() < m {
        padded.push(ActionPolynomial::zero(n));
    }
    let x0 = flatten(&padded, n);
    let dim = x0.len();
    let eval = |x: &[f64]| -> Result<Vec<f64>> {
        Ok(flatten(&bnf_map(base_h, m, &unflatten(x, n, m))?, n))
    };
    let columns: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut xp = x0.clone();
            let mut xm = x0.clone();
            xp[j] += step;
            xm[j] -= step;
            let (qp, qm) = (eval(&xp)?, eval(&xm)?);
            let h = xp[j] - xm[j];
            Ok(qp.iter().zip(&qm).map(|(a, b)| (a - b) / h).collect())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(dim, dim, |i, j| columns[j][i]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    pub fd_step: f64,
    pub det: f64,
    pub det_half_step: f64,
    /// `(4·det(h/2) − det(h))/3`
    pub det_richardson: f64,
    /// Largest entry above the diagonal blocks (zero for a triangular map).
    pub max_upper_block: f64,
    /// Largest deviation of a diagonal block from the identity.
    pub max_diag_block_dev: f64,
}

impl JacobianReport {
    pub fn within(&self, tol: f64) -> bool {
        (self.det - 1.0).abs() <= tol && (self.det_half_step - 1.0).abs() <= tol
    }
}

/// Block offsets `[0, d_1, d_1 + d_2, …]` of the graded basis.
fn block_offsets(n: usize, m: usize) -> Vec<usize> {
    let mut off = vec![0];
    for k in 1..=m {
        off.push(off[k - 1] + homogeneous_dim(n, k));
    }
    off
}

fn block_structure(j: &DMatrix<f64>, n: usize, m: usize) -> (f64, f64) {
    let off = block_offsets(n, m);
    let block_of = |i: usize| off.iter().rposition(|&o| o <= i).unwrap();
    let mut upper = 0.0f64;
    let mut diag = 0.0f64;
    for r in 0..j.nrows() {
        for c in 0..j.ncols() {
            let (br, bc) = (block_of(r), block_of(c));
            if bc > br {
                upper = upper.max(j[(r, c)].abs());
            } else if bc == br {
                let id = if r == c { 1.0 } else { 0.0 };
                diag = diag.max((j[(r, c)] - id).abs());
            }
        }
    }
    (upper, diag)
}

/// Finite-difference determinant of the coefficient map at `p0`, at
/// `fd_step` and `fd_step/2`.
pub fn jacobian_unit_check(
    base_h: &GradedPolynomial,
    m: usize,
    p0: &[ActionPolynomial],
    fd_step: f64,
) -> Result<JacobianReport> {
    let n = base_h.n();
    let j1 = coefficient_jacobian(base_h, m, p0, fd_step)?;
    let j2 = coefficient_jacobian(base_h, m, p0, fd_step / 2.0)?;
    let (det, det_half_step) = (j1.determinant(), j2.determinant());
    let (u1, d1) = block_structure(&j1, n, m);
    let (u2, d2) = block_structure(&j2, n, m);
    Ok(JacobianReport {
        n,
        m,
        dim: j1.nrows(),
        fd_step,
        det,
        det_half_step,
        det_richardson: (4.0 * det_half_step - det) / 3.0,
        max_upper_block: u1.max(u2),
        max_diag_block_dev: d1.max(d2),
    })
}

/// Basis labels `(k, l)` of the flattened coefficient vector.
pub fn coefficient_basis(n: usize, m: usize) -> Vec<(usize, Vec<u8>)> {
    (1..=m)
        .flat_map(|k| {
            compositions(n, k)
                .into_iter()
                .map(move |l| (k, l.as_slice().to_vec()))
        })
        .collect()
}
