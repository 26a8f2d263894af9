//! Symplectic integration, action drift and empirical stability times.

mod integrator;
mod record;
mod stability;

pub use integrator::{ImplicitMidpoint, SCHEME_ID};
pub use record::{
    action_drift, integrate, integrate_streaming, write_trajectory_csv, IntegrateOptions,
    TrajectoryRecord,
};
pub use stability::{
    fit_scaling, initial_directions, point_from_actions, scaling_experiment, stability_time,
    write_scaling_csv, BetterModel, ExitTime, ExponentialFit, FitReport, InitialDirection,
    PolynomialFit, ScalingOptions, ScalingRow, StabilityCurve,
};
