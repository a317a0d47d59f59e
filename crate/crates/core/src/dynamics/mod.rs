//! Executable models, a fixed-step integrator and convergence experiments.

mod equilibrium;
mod experiment;
mod hopfield;
mod ltv;
mod ode;

pub use equilibrium::find_equilibrium;
pub use experiment::{
    convergence_experiment, sample_box, ExperimentConfig, ExperimentSummary, TrialOutcome, MATCH_TOL,
};
pub use hopfield::{hopfield_field, hopfield_jacobian, Activation, HopfieldModel};
pub use ltv::{ltv_rotation_example, LtvRotation};
pub use ode::{
    integrate, integrate_with, rk4_step, IntegrateOptions, Terminal, Trajectory, DIVERGENCE_LIMIT, SETTLE_TOL,
};
