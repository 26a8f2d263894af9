//! Sparse polynomial algebra on phase space and on action space.

mod action;
mod cartesian;
mod compiled;
mod frequency;
mod graded;
mod linear;
mod monomial;
mod scalar;

pub use action::{bombieri_norm, ActionPolynomial};
pub use cartesian::{sup_norm_bound, CartesianPolynomial};
pub use compiled::CompiledPolynomial;
pub use frequency::Frequency;
pub use graded::{GradedPolynomial, Poly};
pub use linear::{diagonalize_quadratic, quadratic_hessian, symplectic_j, SymplecticMap};
pub use monomial::{binomial, compositions, homogeneous_dim, multinomial, Exponents};
pub use scalar::{Precision, Real};

/// `I_j = (x_j² + y_j²)/2` for `z = (x_1..x_n, y_1..y_n)`.
pub fn formal_actions(z: &[f64]) -> Vec<f64> {
    let n = z.len() / 2;
    (0..n)
        .map(|j| 0.5 * (z[j] * z[j] + z[n + j] * z[n + j]))
        .collect()
}

/// `{P, Q}`
pub fn poisson_bracket(
    p: &GradedPolynomial,
    q: &GradedPolynomial,
) -> crate::error::Result<GradedPolynomial> {
    p.bracket(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_examples() {
        assert_eq!(formal_actions(&[0.0, 0.0]), vec![0.0]);
        assert_eq!(formal_actions(&[1.0, 1.0]), vec![1.0]);
        assert_eq!(formal_actions(&[3.0, 0.0, 0.0, 4.0]), vec![4.5, 8.0]);
    }
}
