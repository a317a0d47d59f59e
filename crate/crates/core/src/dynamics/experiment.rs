use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::equilibrium::find_equilibrium;
use super::hopfield::HopfieldModel;
use super::ode::{inf_dist, integrate_with, IntegrateOptions, Terminal, Trajectory};
use crate::error::{dimension, domain, Result};
use crate::scalar::Real;

/// Terminal distance (∞-norm) below which a run is attributed to an equilibrium.
pub const MATCH_TOL: f64 = 1e-4;

/// Settings for [`convergence_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig<S> {
    /// Number of random initial conditions.
    pub trials: usize,
    /// Random initial conditions are drawn uniformly from `[lower, upper]`.
    pub ic_lower: Vec<S>,
    pub ic_upper: Vec<S>,
    /// Initial conditions run before the random ones.
    pub fixed_initial: Vec<Vec<S>>,
    /// Newton starting points used to seed the equilibrium list.
    pub equilibrium_guesses: Vec<Vec<S>>,
    pub t_end: S,
    pub step: S,
    pub seed: u64,
    pub match_tol: S,
    /// Keep every state with this stride; `None` drops trajectories after classification.
    pub keep_every: Option<usize>,
}

impl<S: Real> ExperimentConfig<S> {
    /// Cube `[lo, hi]^n`, origin as the only Newton guess, step `1e-3`.
    pub fn new(n: usize, trials: usize, lo: S, hi: S, t_end: S, seed: u64) -> Self {
        Self {
            trials,
            ic_lower: vec![lo; n],
            ic_upper: vec![hi; n],
            fixed_initial: Vec::new(),
            equilibrium_guesses: vec![vec![S::zero(); n]],
            t_end,
            step: S::lit(1e-3),
            seed,
            match_tol: S::lit(MATCH_TOL),
            keep_every: None,
        }
    }
}

/// One run of the experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome<S> {
    pub initial: Vec<S>,
    pub terminal_state: Vec<S>,
    pub terminal: Terminal<S>,
    /// Present when the config asked to keep trajectories.
    pub trajectory: Option<Trajectory<S>>,
}

/// Aggregated result of [`convergence_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSummary<S> {
    pub equilibria: Vec<Vec<S>>,
    pub outcomes: Vec<TrialOutcome<S>>,
    /// Runs attributed to each equilibrium, aligned with `equilibria`.
    pub converged_counts: Vec<usize>,
    pub bounded_nonconverged: usize,
    pub diverged: usize,
}

impl<S: Real> ExperimentSummary<S> {
    pub fn total(&self) -> usize {
        self.outcomes.len()
    }

    pub fn converged(&self) -> usize {
        self.converged_counts.iter().sum()
    }

    pub fn all_converged(&self) -> bool {
        self.converged() == self.total()
    }
}

/// Initial conditions drawn from the seeded ChaCha8 stream, in draw order.
pub fn sample_box<S: Real>(lower: &[S], upper: &[S], count: usize, seed: u64) -> Vec<Vec<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            lower
                .iter()
                .zip(upper)
                .map(|(&lo, &hi)| {
                    let u: f64 = rng.gen();
                    lo + (hi - lo) * S::lit(u)
                })
                .collect()
        })
        .collect()
}

fn push_unique<S: Real>(list: &mut Vec<Vec<S>>, x: Vec<S>, tol: S) -> bool {
    if list.iter().any(|e| inf_dist(e, &x) < tol) {
        return false;
    }
    list.push(x);
    true
}

/// Integrates the model from fixed and seeded random initial conditions and
/// attributes each settled run to an equilibrium.
///
/// The equilibrium list starts with Newton solutions from
/// `equilibrium_guesses`, then grows with Newton refinements of settled end
/// points that match nothing known. Runs are integrated in parallel; the
/// result does not depend on the thread count.
pub fn convergence_experiment<S: Real>(
    model: &HopfieldModel<S>,
    config: &ExperimentConfig<S>,
) -> Result<ExperimentSummary<S>> {
    let n = model.n();
    if config.ic_lower.len() != n || config.ic_upper.len() != n {
        return Err(dimension(format!("initial box must have {n} coordinates")));
    }
    if config.ic_lower.iter().zip(&config.ic_upper).any(|(l, u)| !(l <= u)) {
        return Err(domain("initial box has lower > upper"));
    }
    if config.fixed_initial.iter().chain(&config.equilibrium_guesses).any(|x| x.len() != n) {
        return Err(dimension(format!("initial conditions must have {n} coordinates")));
    }
    let field = |x: &[S]| model.field(x);
    let jac = |x: &[S]| model.jacobian(x);

    let dedupe_tol = config.match_tol * S::lit(0.01);
    let mut equilibria = Vec::new();
    for g in &config.equilibrium_guesses {
        if let Ok(e) = find_equilibrium(field, jac, g) {
            push_unique(&mut equilibria, e, dedupe_tol);
        }
    }

    let mut initial = config.fixed_initial.clone();
    initial.extend(sample_box(&config.ic_lower, &config.ic_upper, config.trials, config.seed));

    let opts = IntegrateOptions::new(config.step).record_every(config.keep_every.unwrap_or(usize::MAX));
    let runs: Vec<Trajectory<S>> = initial
        .par_iter()
        .map(|x0| integrate_with(|_t, x: &[S]| model.field(x), x0, (S::zero(), config.t_end), &opts))
        .collect::<Result<_>>()?;

    // Deterministic, sequential pass so equilibrium ids follow run order.
    for tr in &runs {
        if let Terminal::Settled { .. } = tr.terminal {
            let end = tr.final_state();
            if equilibria.iter().all(|e| inf_dist(e, end) >= config.match_tol) {
                if let Ok(e) = find_equilibrium(field, jac, end) {
                    push_unique(&mut equilibria, e, dedupe_tol);
                }
            }
        }
    }

    let mut converged_counts = vec![0; equilibria.len()];
    let mut bounded_nonconverged = 0;
    let mut diverged = 0;
    let outcomes = initial
        .into_iter()
        .zip(runs)
        .map(|(x0, mut tr)| {
            tr.classify(&equilibria, config.match_tol);
            match tr.terminal {
                Terminal::Converged { equilibrium, .. } => converged_counts[equilibrium] += 1,
                Terminal::Diverged => diverged += 1,
                _ => bounded_nonconverged += 1,
            }
            TrialOutcome {
                initial: x0,
                terminal_state: tr.final_state().to_vec(),
                terminal: tr.terminal.clone(),
                trajectory: config.keep_every.map(|_| tr),
            }
        })
        .collect();
    Ok(ExperimentSummary {
        equilibria,
        outcomes,
        converged_counts,
        bounded_nonconverged,
        diverged,
    })
}
