use std::io::Write;

use serde::{Deserialize, Serialize};

use super::integrator::{ImplicitMidpoint, SCHEME_ID};
use crate::error::{Error, Result};
use crate::polyalg::{formal_actions, CompiledPolynomial, GradedPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateOptions {
    /// Radius of the region the experiment lives in; trajectories with
    /// `|z| > 2·domain_radius` are stopped and flagged as escaped.
    pub domain_radius: f64,
    /// Keep every `stride`-th state (the first and last are always kept).
    pub stride: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            domain_radius: 1.0,
            stride: 1,
        }
    }
}

impl IntegrateOptions {
    pub fn escape_radius(&self) -> f64 {
        2.0 * self.domain_radius
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    pub dt: f64,
    pub scheme_id: String,
    pub escaped: bool,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t |H(z(t)) − H(z(0))|`
    pub fn max_energy_error(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy.iter().fold(0.0, |a, e| a.max((e - e0).abs()))
    }
}

pub(crate) fn check_step(dt: f64, t_max: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_max >= dt) {
        return Err(Error::Domain(format!(
            "need dt > 0 and t_max >= dt (got dt={dt}, t_max={t_max})"
        )));
    }
    Ok((t_max / dt).round() as usize)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Step from `z0` for `steps` steps, calling `visit(step_index, z)` after each
/// step; stops early when `visit` returns false.
pub fn integrate_streaming(
    h: &GradedPolynomial,
    z0: &[f64],
    dt: f64,
    steps: usize,
    mut visit: impl FnMut(usize, &[f64]) -> bool,
) -> Result<Vec<f64>> {
    if z0.len() != 2 * h.n() {
        return Err(Error::Dimension {
            expected: 2 * h.n(),
            found: z0.len() / 2,
        });
    }
    let mut im = ImplicitMidpoint::new(CompiledPolynomial::new(h)?, dt);
    let mut z = z0.to_vec();
    for s in 1..=steps {
        im.step(&mut z, (s - 1) as f64 * dt)?;
        if !visit(s, &z) {
            break;
        }
    }
    Ok(z)
}

pub fn integrate(
    h: &GradedPolynomial,
    z0: &[f64],
    dt: f64,
    t_max: f64,
    opts: &IntegrateOptions,
) -> Result<TrajectoryRecord> {
    let steps = check_step(dt, t_max)?;
    if opts.stride == 0 {
        return Err(Error::Domain("stride must be at least 1".into()));
    }
    let energy = CompiledPolynomial::new(h)?;
    let mut rec = TrajectoryRecord {
        times: Vec::new(),
        states: Vec::new(),
        actions: Vec::new(),
        energy: Vec::new(),
        dt,
        scheme_id: SCHEME_ID.to_string(),
        escaped: false,
    };
    let record = |rec: &mut TrajectoryRecord, s: usize, z: &[f64]| {
        rec.times.push(s as f64 * dt);
        rec.states.push(z.to_vec());
        rec.actions.push(formal_actions(z));
        rec.energy.push(energy.eval(z));
    };
    record(&mut rec, 0, z0);
    let escape = opts.escape_radius();
    let mut escaped = false;
    integrate_streaming(h, z0, dt, steps, |s, z| {
        escaped = norm(z) > escape;
        if s % opts.stride == 0 || s == steps || escaped {
            record(&mut rec, s, z);
        }
        !escaped
    })?;
    rec.escaped = escaped;
    Ok(rec)
}

/// `(max_t |I(t) − I(0)|, argmax t)`
pub fn action_drift(rec: &TrajectoryRecord) -> Result<(f64, f64)> {
    let i0 = rec
        .actions
        .first()
        .ok_or_else(|| Error::Domain("action_drift needs a nonempty record".into()))?;
    let mut best = (0.0, rec.times[0]);
    for (t, a) in rec.times.iter().zip(&rec.actions) {
        let d = a
            .iter()
            .zip(i0)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        if d > best.0 {
            best = (d, *t);
        }
    }
    Ok(best)
}

/// Columns `t, x1..xn, y1..yn, I1..In, H`.
pub fn write_trajectory_csv<W: Write>(rec: &TrajectoryRecord, mut w: W) -> std::io::Result<()> {
    let n = rec.actions.first().map_or(0, |a| a.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|j| format!("x{j}")));
    header.extend((1..=n).map(|j| format!("y{j}")));
    header.extend((1..=n).map(|j| format!("I{j}")));
    header.push("H".into());
    writeln!(w, "{}", header.join(","))?;
    for i in 0..rec.len() {
        let mut row = vec![format!("{:e}", rec.times[i])];
        row.extend(rec.states[i].iter().map(|v| format!("{v:e}")));
        row.extend(rec.actions[i].iter().map(|v| format!("{v:e}")));
        row.push(format!("{:e}", rec.energy[i]));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
