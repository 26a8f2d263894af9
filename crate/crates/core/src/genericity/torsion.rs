use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::ActionPolynomial;

/// Eigenvalues below `TORSION_TOL·max(1, max|λ|)` count as zero.
pub const TORSION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorsionClass {
    Definite,
    Indefinite,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub class: TorsionClass,
    /// Ascending eigenvalues of the Hessian `∇²B2`.
    pub eigenvalues: Vec<f64>,
    /// `min |λ|`
    pub margin: f64,
}

/// Classify the quadratic form `B2` through the eigenvalues of its Hessian,
/// so `I_1² + I_2²` has matrix `2·Id`.
pub fn torsion_class(b2: &ActionPolynomial) -> Result<TorsionReport> {
    if !b2.is_homogeneous(2) {
        return Err(Error::Shape(
            "torsion_class expects a homogeneous quadratic in I".into(),
        ));
    }
    let n = b2.n();
    let hess = b2.hessian(&vec![0.0; n]);
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(hess)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let margin = eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, l| a.min(l.abs()));
    let scale = eigenvalues.iter().fold(1.0f64, |a, l| a.max(l.abs()));
    let class = if margin <= TORSION_TOL * scale {
        TorsionClass::Degenerate
    } else if eigenvalues[0] * eigenvalues[n - 1] > 0.0 {
        TorsionClass::Definite
    } else {
        TorsionClass::Indefinite
    };
    Ok(TorsionReport {
        class,
        eigenvalues,
        margin,
    })
}
