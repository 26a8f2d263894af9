use crate::error::{Error, Result};
use crate::polyalg::CompiledPolynomial;

pub const SCHEME_ID: &str = "implicit-midpoint";

const POLISH: usize = 4;

/// Fixed-step implicit midpoint rule `z' = z + dt·X_H((z + z')/2)`.
///
/// The implicit equation is solved by fixed-point iteration until successive
/// iterates differ by less than `tol·(1 + |z|_∞)`, then polished while the
/// correction keeps shrinking (at most `POLISH` sweeps) so the residual sits at
/// roundoff level.
#[derive(Clone, Debug)]
pub struct ImplicitMidpoint {
    field: CompiledPolynomial,
    pub dt: f64,
    pub tol: f64,
    pub max_iter: usize,
    mid: Vec<f64>,
    vf: Vec<f64>,
    next: Vec<f64>,
}

impl ImplicitMidpoint {
    pub fn new(field: CompiledPolynomial, dt: f64) -> Self {
        let d = 2 * field.n();
        ImplicitMidpoint {
            field,
            dt,
            tol: 1e-13,
            max_iter: 200,
            mid: vec![0.0; d],
            vf: vec![0.0; d],
            next: vec![0.0; d],
        }
    }

    pub fn field(&self) -> &CompiledPolynomial {
        &self.field
    }

    /// Advance `z` in place by one step; `time` is only used for error reports.
    pub fn step(&mut self, z: &mut [f64], time: f64) -> Result<()> {
        let d = z.len();
        let dt = self.dt;
        self.field.vector_field_into(z, &mut self.vf);
        for i in 0..d {
            self.next[i] = z[i] + dt * self.vf[i];
        }
        let scale = 1.0 + z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut converged = false;
        let mut polish = 0;
        let mut last = f64::INFINITY;
        for _ in 0..self.max_iter + POLISH {
            for i in 0..d {
                self.mid[i] = 0.5 * (z[i] + self.next[i]);
            }
            self.field.vector_field_into(&self.mid, &mut self.vf);
            let mut err = 0.0f64;
            for i in 0..d {
                let v = z[i] + dt * self.vf[i];
                err = err.max((v - self.next[i]).abs());
                self.next[i] = v;
            }
            if !err.is_finite() {
                break;
            }
            if converged {
                polish += 1;
                if err == 0.0 || err >= last || polish >= POLISH {
                    break;
                }
            } else if err <= self.tol * scale {
                converged = true;
            }
            last = err;
        }
        if !converged || self.next.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepFailure { time });
        }
        z.copy_from_slice(&self.next);
        Ok(())
    }

    /// Integrate for `steps` steps starting at time `t0`.
    pub fn advance(&mut self, z: &mut [f64], steps: usize, t0: f64) -> Result<()> {
        for s in 0..steps {
            self.step(z, t0 + s as f64 * self.dt)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::GradedPolynomial;

    #[test]
    fn harmonic_rotation_is_cayley() {
        // For H = I the midpoint map is the Cayley rotation by 2·atan(dt/2).
        let h = GradedPolynomial::linear_actions(&[1.0]);
        let mut im = ImplicitMidpoint::new(CompiledPolynomial::new(&h).unwrap(), 0.1);
        let mut z = [1.0, 0.0];
        im.step(&mut z, 0.0).unwrap();
        let th = 2.0 * (0.05f64).atan();
        assert!((z[0] - th.cos()).abs() < 1e-14);
        assert!((z[1] + th.sin()).abs() < 1e-14);
    }

    #[test]
    fn blow_up_is_a_step_failure() {
        let x = GradedPolynomial::x(1, 0);
        let h = x.pow(6).add(&GradedPolynomial::linear_actions(&[1.0]));
        let mut im = ImplicitMidpoint::new(CompiledPolynomial::new(&h).unwrap(), 1.0);
        let mut z = [30.0, 0.0];
        assert!(matches!(im.step(&mut z, 2.5), Err(Error::StepFailure { time }) if time == 2.5));
    }
}
