use std::io::Write;

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// States with an entry above this magnitude count as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Tail change below which a run is a convergence candidate.
pub const SETTLE_TOL: f64 = 1e-8;

/// Final state of a run.
#[derive(Clone, Debug, PartialEq)]
pub enum Terminal<S> {
    /// Settled within `distance` (∞-norm) of the equilibrium with index `equilibrium`.
    Converged { equilibrium: usize, distance: S },
    /// Passed the tail test but no known equilibrium is close enough.
    Settled { tail_change: S },
    BoundedNonconverged,
    Diverged,
}

impl<S: Real> Terminal<S> {
    pub fn is_converged(&self) -> bool {
        matches!(self, Terminal::Converged { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Terminal::Converged { .. } => "converged",
            Terminal::Settled { .. } => "settled",
            Terminal::BoundedNonconverged => "bounded_nonconverged",
            Terminal::Diverged => "diverged",
        }
    }
}

/// Fixed-step integrator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrateOptions<S> {
    pub step: S,
    /// Keep every `record_every`-th state (the final state is always kept).
    pub record_every: usize,
    /// Window `Δ` of the tail test `‖x(T) - x(T - Δ)‖∞ < 1e-8`.
    pub tail_window: S,
}

impl<S: Real> IntegrateOptions<S> {
    pub fn new(step: S) -> Self {
        Self {
            step,
            record_every: 1,
            tail_window: S::one(),
        }
    }

    pub fn record_every(mut self, every: usize) -> Self {
        self.record_every = every.max(1);
        self
    }
}

/// Sampled solution of an initial value problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<S>,
    pub states: Vec<Vec<S>>,
    pub terminal: Terminal<S>,
}

impl<S: Real> Trajectory<S> {
    pub fn final_state(&self) -> &[S] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_time(&self) -> S {
        self.times.last().copied().unwrap_or_else(S::zero)
    }

    /// Upgrades a settled run to `Converged` when its end point lies within
    /// `tol` of one of `equilibria`; a settled run with no match is left as is.
    pub fn classify(&mut self, equilibria: &[Vec<S>], tol: S) {
        if let Terminal::Settled { .. } = self.terminal {
            if let Some((idx, dist)) = nearest(equilibria, self.final_state()) {
                if dist < tol {
                    self.terminal = Terminal::Converged {
                        equilibrium: idx,
                        distance: dist,
                    };
                }
            }
        }
    }

    /// CSV with header `t,x1,..,xn`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.states.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        w.write_record(&header).map_err(csv_err)?;
        for (t, x) in self.times.iter().zip(&self.states) {
            let mut rec = vec![t.to_string()];
            rec.extend(x.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| csv_err(e.into()))?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Evaluation {
        at: "csv export".into(),
        message: e.to_string(),
    }
}

pub(crate) fn inf_dist<S: Real>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

pub(crate) fn nearest<S: Real>(points: &[Vec<S>], x: &[S]) -> Option<(usize, S)> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, inf_dist(p, x)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
}

fn axpy<S: Real>(x: &[S], h: S, k: &[S]) -> Vec<S> {
    x.iter().zip(k).map(|(&xi, &ki)| xi + h * ki).collect()
}

/// One classical Runge-Kutta step.
pub fn rk4_step<S: Real, F>(field: &F, t: S, x: &[S], h: S) -> Vec<S>
where
    F: Fn(S, &[S]) -> Vec<S> + ?Sized,
{
    let half = S::lit(0.5);
    let k1 = field(t, x);
    let k2 = field(t + half * h, &axpy(x, half * h, &k1));
    let k3 = field(t + half * h, &axpy(x, half * h, &k2));
    let k4 = field(t + h, &axpy(x, h, &k3));
    let six = S::lit(6.0);
    (0..x.len())
        .map(|i| x[i] + h / six * (k1[i] + (k2[i] + k3[i]) * S::lit(2.0) + k4[i]))
        .collect()
}

/// RK4 over `t_span` with every state recorded.
pub fn integrate<S: Real, F>(field: F, x0: &[S], t_span: (S, S), step: S) -> Result<Trajectory<S>>
where
    F: Fn(S, &[S]) -> Vec<S>,
{
    integrate_with(field, x0, t_span, &IntegrateOptions::new(step))
}

/// RK4 with `N = round((t1 - t0) / step)` equal steps, so the grid ends on `t1`.
///
/// A non-finite or huge state stops the run and yields `Terminal::Diverged`.
pub fn integrate_with<S: Real, F>(
    field: F,
    x0: &[S],
    t_span: (S, S),
    opts: &IntegrateOptions<S>,
) -> Result<Trajectory<S>>
where
    F: Fn(S, &[S]) -> Vec<S>,
{
    let (t0, t1) = t_span;
    if !t0.is_finite() || !t1.is_finite() || t1 < t0 {
        return Err(domain(format!("time span ({t0}, {t1}) is not a finite forward interval")));
    }
    if !(opts.step > S::zero()) || !opts.step.is_finite() {
        return Err(domain(format!("step {} must be positive", opts.step)));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(domain("initial state has a non-finite entry"));
    }
    let steps = ((t1 - t0) / opts.step)
        .round()
        .to_usize()
        .ok_or_else(|| domain("too many steps"))?;
    let every = opts.record_every.max(1);
    let mut times = vec![t0];
    let mut states = vec![x0.to_vec()];
    if steps == 0 {
        return Ok(Trajectory {
            times,
            states,
            terminal: Terminal::Settled {
                tail_change: S::zero(),
            },
        });
    }
    let h = (t1 - t0) / S::of_usize(steps);
    let window = ((opts.tail_window / h).round().to_usize().unwrap_or(steps)).clamp(1, steps);
    let tail_at = steps - window;
    let limit = S::lit(DIVERGENCE_LIMIT);

    let mut x = x0.to_vec();
    let mut tail_ref = if tail_at == 0 { Some(x.clone()) } else { None };
    for i in 1..=steps {
        let t = t0 + h * S::of_usize(i - 1);
        x = rk4_step(&field, t, &x, h);
        let t_next = if i == steps { t1 } else { t0 + h * S::of_usize(i) };
        if x.iter().any(|v| !v.is_finite() || v.abs() > limit) {
            times.push(t_next);
            states.push(x);
            return Ok(Trajectory {
                times,
                states,
                terminal: Terminal::Diverged,
            });
        }
        if i == tail_at {
            tail_ref = Some(x.clone());
        }
        if i % every == 0 || i == steps {
            times.push(t_next);
            states.push(x.clone());
        }
    }
    let tail_change = inf_dist(&x, tail_ref.as_deref().unwrap_or(x0));
    let terminal = if tail_change < S::tol(SETTLE_TOL) {
        Terminal::Settled { tail_change }
    } else {
        Terminal::BoundedNonconverged
    };
    Ok(Trajectory {
        times,
        states,
        terminal,
    })
}
