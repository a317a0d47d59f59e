//! Sufficient conditions for k-contraction and local stability tests.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::compounds::additive_compound;
use crate::dynamics::{sample_box, HopfieldModel, LtvRotation};
use crate::error::{dimension, domain, Error, Result};
use crate::linalg::{det, eigenvalues, spd_sqrt, spectral_abscissa, sym_eigenvalues};
use crate::lognorms::{mu_compound_direct, mu_compound_scaled, mu_p, tau, NormKind, Scaling, TauSpec};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Relative slack of the positive semidefiniteness test.
pub const PSD_TOL: f64 = 1e-9;

/// Number of reweighting rounds in [`search_diagonal_weights`].
pub const WEIGHT_SEARCH_ITERS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Tau,
    TraceDominance,
    LtvSmith,
    Hopfield,
    LiWang,
    LocalStability,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Tau => "tau",
            Method::TraceDominance => "trace_dominance",
            Method::LtvSmith => "ltv_smith",
            Method::Hopfield => "hopfield",
            Method::LiWang => "li_wang",
            Method::LocalStability => "local_stability",
        }
    }

    /// True for methods whose `bound` is a contraction rate bound.
    pub fn is_contraction(self) -> bool {
        !matches!(self, Method::LiWang | Method::LocalStability)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether the verdict covers the whole domain or only the sampled points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Exact,
    Sampled { times: usize, states: usize },
}

impl Evidence {
    pub fn label(&self) -> &'static str {
        match self {
            Evidence::Exact => "exact",
            Evidence::Sampled { .. } => "sampled",
        }
    }
}

/// Method-specific data backing a verdict. Unused fields stay `None`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Witness<S> {
    /// Coordinate change `T` (or `P = Q^{1/2}`).
    pub scaling: Option<Matrix<S>>,
    /// Diagonal weights `d`.
    pub weights: Option<Vec<S>>,
    /// Index (neuron, column) attaining the bound.
    pub worst_index: Option<usize>,
    /// Sample `(t, x)` attaining the bound.
    pub worst_sample: Option<(S, Vec<S>)>,
    pub determinant: Option<S>,
    /// Samples at which the Smith inequality failed.
    pub violations: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<S> {
    pub method: Method,
    pub k: usize,
    pub p: Option<NormKind>,
    /// Worst value of the tested quantity.
    pub bound: S,
    /// `max(0, -bound)`.
    pub rate_eta: S,
    /// The `η` the caller asked for.
    pub requested_eta: S,
    pub passed: bool,
    pub evidence: Evidence,
    pub witness: Witness<S>,
}

impl<S: Real> Certificate<S> {
    fn contraction(
        method: Method,
        k: usize,
        p: NormKind,
        bound: S,
        eta: S,
        evidence: Evidence,
        witness: Witness<S>,
    ) -> Self {
        Self {
            method,
            k,
            p: Some(p),
            bound,
            rate_eta: S::zero().max(-bound),
            requested_eta: eta,
            passed: bound <= -eta && bound < S::zero(),
            evidence,
            witness,
        }
    }
}

type Evaluator<S> = dyn Fn(S, &[S]) -> std::result::Result<Matrix<S>, String> + Send + Sync;

/// Jacobian `J(t, x)` together with the points at which it is checked.
///
/// The sample set is the product of `times` and `states`. A constant
/// sampler stands for a single matrix and yields exact certificates.
#[derive(Clone)]
pub struct JacobianSampler<S> {
    n: usize,
    evaluator: Arc<Evaluator<S>>,
    times: Vec<S>,
    states: Vec<Vec<S>>,
    constant: bool,
}

impl<S: Real> fmt::Debug for JacobianSampler<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JacobianSampler")
            .field("n", &self.n)
            .field("times", &self.times.len())
            .field("states", &self.states.len())
            .field("constant", &self.constant)
            .finish()
    }
}

impl<S: Real> JacobianSampler<S> {
    /// Samples only `(0, 0)` until a grid is attached.
    pub fn new<F>(n: usize, evaluator: F) -> Self
    where
        F: Fn(S, &[S]) -> std::result::Result<Matrix<S>, String> + Send + Sync + 'static,
    {
        Self {
            n,
            evaluator: Arc::new(evaluator),
            times: vec![S::zero()],
            states: vec![vec![S::zero(); n]],
            constant: false,
        }
    }

    pub fn constant(a: Matrix<S>) -> Result<Self> {
        let n = a.require_square("Jacobian")?;
        let mut s = Self::new(n, move |_t, _x| Ok(a.clone()));
        s.constant = true;
        Ok(s)
    }

    /// State-dependent Jacobian of a Hopfield network.
    pub fn hopfield(model: HopfieldModel<S>) -> Self {
        let n = model.n();
        Self::new(n, move |_t, x| Ok(model.jacobian(x)))
    }

    /// Time-dependent matrix of the rotation example on the given times.
    pub fn ltv_rotation(times: Vec<S>) -> Self {
        let ex = LtvRotation;
        Self::new(2, move |t, _x| Ok(ex.a(t))).with_times(times)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn times(&self) -> &[S] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<S>] {
        &self.states
    }

    pub fn with_times(mut self, times: Vec<S>) -> Self {
        self.times = times;
        self
    }

    pub fn with_states(mut self, states: Vec<Vec<S>>) -> Self {
        self.states = states;
        self
    }

    /// Replaces the states by a tensor grid with `per_axis` points per
    /// coordinate (the box centre when `per_axis == 1`).
    pub fn with_grid(mut self, lower: &[S], upper: &[S], per_axis: usize) -> Result<Self> {
        self.check_box(lower, upper)?;
        if per_axis == 0 {
            return Err(domain("grid needs at least one point per axis"));
        }
        let axis = |i: usize| -> Vec<S> {
            if per_axis == 1 {
                return vec![(lower[i] + upper[i]) * S::lit(0.5)];
            }
            let h = (upper[i] - lower[i]) / S::of_usize(per_axis - 1);
            (0..per_axis).map(|j| lower[i] + h * S::of_usize(j)).collect()
        };
        let mut states = vec![Vec::new()];
        for i in 0..self.n {
            let pts = axis(i);
            states = states
                .into_iter()
                .flat_map(|s| {
                    pts.iter().map(move |&v| {
                        let mut s = s.clone();
                        s.push(v);
                        s
                    })
                })
                .collect();
        }
        self.states = states;
        Ok(self)
    }

    /// Appends `count` seeded uniform states from the box.
    pub fn with_random_states(mut self, lower: &[S], upper: &[S], count: usize, seed: u64) -> Result<Self> {
        self.check_box(lower, upper)?;
        self.states.extend(sample_box(lower, upper, count, seed));
        Ok(self)
    }

    fn check_box(&self, lower: &[S], upper: &[S]) -> Result<()> {
        if lower.len() != self.n || upper.len() != self.n {
            return Err(dimension(format!("box must have {} coordinates", self.n)));
        }
        if lower.iter().zip(upper).any(|(l, u)| !(l <= u)) {
            return Err(domain("box has lower > upper"));
        }
        Ok(())
    }

    pub fn evidence(&self) -> Evidence {
        if self.constant {
            Evidence::Exact
        } else {
            Evidence::Sampled {
                times: self.times.len(),
                states: self.states.len(),
            }
        }
    }

    pub fn samples(&self) -> Vec<(S, &[S])> {
        self.times
            .iter()
            .flat_map(|&t| self.states.iter().map(move |x| (t, x.as_slice())))
            .collect()
    }

    /// `J(t, x)`, checked to be a finite `n × n` matrix.
    pub fn evaluate(&self, t: S, x: &[S]) -> Result<Matrix<S>> {
        let at = || format!("t = {t}, x = {x:?}");
        if x.len() != self.n {
            return Err(Error::Evaluation {
                at: at(),
                message: format!("state has {} coordinates, expected {}", x.len(), self.n),
            });
        }
        let j = (self.evaluator)(t, x).map_err(|message| Error::Evaluation { at: at(), message })?;
        if j.dims() != (self.n, self.n) {
            return Err(Error::Evaluation {
                at: at(),
                message: format!("Jacobian is {}x{}, expected {n}x{n}", j.rows(), j.cols(), n = self.n),
            });
        }
        if j.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Evaluation {
                at: at(),
                message: "Jacobian has a non-finite entry".into(),
            });
        }
        Ok(j)
    }

    /// Maximum of `score(J)` over all samples, with the sample attaining it.
    /// Ties go to the first sample in grid order.
    fn worst<F>(&self, score: F) -> Result<(S, (S, Vec<S>))>
    where
        F: Fn(&Matrix<S>) -> Result<S> + Sync + Send,
    {
        let samples = self.samples();
        if samples.is_empty() {
            return Err(domain("sampling grid is empty"));
        }
        let values: Vec<S> = samples
            .par_iter()
            .map(|&(t, x)| {
                let v = score(&self.evaluate(t, x)?)?;
                if v.is_nan() {
                    return Err(Error::Evaluation {
                        at: format!("t = {t}, x = {x:?}"),
                        message: "criterion evaluated to NaN".into(),
                    });
                }
                Ok(v)
            })
            .collect::<Result<_>>()?;
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best] {
                best = i;
            }
        }
        let (t, x) = samples[best];
        Ok((values[best], (t, x.to_vec())))
    }
}

fn check_eta<S: Real>(eta: S) -> Result<()> {
    if !(eta >= S::zero()) || !eta.is_finite() {
        return Err(domain(format!("eta = {eta} must be finite and nonnegative")));
    }
    Ok(())
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(domain(format!("k = {k} outside 1..={n}")));
    }
    Ok(())
}

fn check_scaling<S: Real>(scaling: Option<&Scaling<S>>, n: usize) -> Result<()> {
    match scaling {
        Some(t) if t.dim() != n => Err(dimension(format!("scaling is {0}x{0}, system has n = {n}", t.dim()))),
        _ => Ok(()),
    }
}

fn sampled_witness<S: Real>(scaling: Option<&Scaling<S>>, sample: (S, Vec<S>), exact: bool) -> Witness<S> {
    Witness {
        scaling: scaling.map(|t| t.matrix().clone()),
        worst_sample: if exact { None } else { Some(sample) },
        ..Witness::default()
    }
}

/// Checks `μ_{p,T^(k)}(J^[k](t, x)) ≤ -η` at every sample.
pub fn certify_direct<S: Real>(
    sampler: &JacobianSampler<S>,
    k: usize,
    p: NormKind,
    scaling: Option<&Scaling<S>>,
    eta: S,
) -> Result<Certificate<S>> {
    check_eta(eta)?;
    check_k(k, sampler.dim())?;
    check_scaling(scaling, sampler.dim())?;
    let (bound, sample) = sampler.worst(|j| match scaling {
        None => mu_compound_direct(j, k, p),
        Some(_) => mu_compound_scaled(j, k, p, scaling),
    })?;
    Ok(Certificate::contraction(
        Method::Direct,
        k,
        p,
        bound,
        eta,
        sampler.evidence(),
        sampled_witness(scaling, sample, sampler.is_constant()),
    ))
}

/// Checks `τ_{p,k}(J(t, x)) ≤ -η` at every sample; no compound is formed.
pub fn certify_tau<S: Real>(
    sampler: &JacobianSampler<S>,
    k: usize,
    p: NormKind,
    scaling: Option<&Scaling<S>>,
    eta: S,
) -> Result<Certificate<S>> {
    check_eta(eta)?;
    check_k(k, sampler.dim())?;
    check_scaling(scaling, sampler.dim())?;
    let spec = TauSpec {
        p,
        k,
        scaling: scaling.cloned(),
    };
    let (bound, sample) = sampler.worst(|j| tau(j, &spec))?;
    Ok(Certificate::contraction(
        Method::Tau,
        k,
        p,
        bound,
        eta,
        sampler.evidence(),
        sampled_witness(scaling, sample, sampler.is_constant()),
    ))
}

fn check_weights<S: Real>(d: &[S], n: usize) -> Result<()> {
    if d.len() != n {
        return Err(dimension(format!("{} weights for n = {n}", d.len())));
    }
    if let Some(bad) = d.iter().find(|v| !(**v > S::zero()) || !v.is_finite()) {
        return Err(domain(format!("weight {bad} is not positive")));
    }
    Ok(())
}

/// Per-column values `-(n-k-1) a_ii + Σ_{j≠i} (a_jj + (n-k)(d_j/d_i)|a_ji|)`.
pub fn trace_dominance_columns<S: Real>(a: &Matrix<S>, k: usize, d: &[S]) -> Result<Vec<S>> {
    let n = a.require_square("trace dominance argument")?;
    check_k(k, n)?;
    check_weights(d, n)?;
    let tr = a.trace();
    let nk = S::of_usize(n - k);
    Ok((0..n)
        .map(|i| {
            let off = (0..n)
                .filter(|&j| j != i)
                .map(|j| d[j] / d[i] * a[(j, i)].abs())
                .sum::<S>();
            tr + nk * (off - a[(i, i)])
        })
        .collect())
}

fn argmax<S: Real>(v: &[S]) -> (usize, S) {
    v.iter()
        .enumerate()
        .fold((0, S::neg_infinity()), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) })
}

/// Column-wise trace dominance with diagonal weights `d`; a pass gives
/// k-contraction in the weighted ∞-norm `|D x|∞`, `D = diag(d)`.
pub fn trace_dominance<S: Real>(a: &Matrix<S>, k: usize, d: &[S], eta: S) -> Result<Certificate<S>> {
    check_eta(eta)?;
    let cols = trace_dominance_columns(a, k, d)?;
    let (worst, bound) = argmax(&cols);
    Ok(Certificate::contraction(
        Method::TraceDominance,
        k,
        NormKind::LInf,
        bound,
        eta,
        Evidence::Exact,
        Witness {
            weights: Some(d.to_vec()),
            worst_index: Some(worst),
            ..Witness::default()
        },
    ))
}

/// Looks for weights `d > 0` that make [`trace_dominance`] pass.
///
/// The worst column value is `tr A + (n-k) λ` where `λ` is the largest column
/// measure of `D B D⁻¹`, `B` being `-A` with absolute off-diagonal entries. That
/// maximum is smallest at the left Perron vector of the Metzler matrix `B`,
/// which is approximated by power iteration on a shifted `Bᵀ`. The best `d`
/// seen is returned (normalised to max 1) if it gives a negative bound.
pub fn search_diagonal_weights<S: Real>(a: &Matrix<S>, k: usize) -> Result<Option<Vec<S>>> {
    let n = a.require_square("trace dominance argument")?;
    check_k(k, n)?;
    let eval = |d: &[S]| -> S { argmax(&trace_dominance_columns(a, k, d).expect("valid weights")).1 };
    let ones = vec![S::one(); n];
    let mut best = (eval(&ones), ones.clone());
    if k < n {
        let shift = (0..n).fold(S::zero(), |m, i| m.max(a[(i, i)])) + S::one();
        let b = Matrix::from_fn(n, n, |i, j| if i == j { shift - a[(i, i)] } else { a[(i, j)].abs() });
        let floor = S::epsilon();
        let mut d = ones;
        for _ in 0..WEIGHT_SEARCH_ITERS {
            // d ← (B + cI)ᵀ d
            let next: Vec<S> = (0..n).map(|i| (0..n).map(|j| b[(j, i)] * d[j]).sum::<S>()).collect();
            let top = next.iter().fold(S::zero(), |m, v| m.max(*v));
            if !(top > S::zero()) || !top.is_finite() {
                break;
            }
            d = next.iter().map(|v| (*v / top).max(floor)).collect();
            let v = eval(&d);
            if v < best.0 {
                best = (v, d.clone());
            }
        }
    }
    Ok((best.0 < S::zero()).then_some(best.1))
}

/// `AᵀQ + QA + 2θQ ⪰ 0` together with `tr A + (n-k)θ ≤ -η` on every sample.
///
/// With `P = Q^{1/2}` the Smith inequality gives `μ_{2,P}(-A) ≤ θ`. The bound
/// reported is the maximum of `tr A + (n-k) max(θ, μ_{2,P}(-A))`, which is the
/// trace condition whenever the inequality holds and stays a valid
/// k-contraction bound when it does not. Samples where the inequality fails are
/// counted in the witness.
pub fn ltv_smith_certify<S: Real>(
    samples: &[(S, Matrix<S>)],
    q: &Matrix<S>,
    theta: &[S],
    k: usize,
    eta: S,
) -> Result<Certificate<S>> {
    check_eta(eta)?;
    if samples.is_empty() {
        return Err(domain("no samples"));
    }
    if theta.len() != samples.len() {
        return Err(dimension(format!("{} theta values for {} samples", theta.len(), samples.len())));
    }
    let n = q.require_square("Q")?;
    check_k(k, n)?;
    if let Some((t, a)) = samples.iter().find(|(_, a)| a.dims() != (n, n)) {
        return Err(dimension(format!("A({t}) is {}x{}, Q is {n}x{n}", a.rows(), a.cols())));
    }
    let p = spd_sqrt(q)?;
    let scaling = Scaling::new(p.clone())?;
    let nk = S::of_usize(n - k);
    let per_sample: Vec<(S, bool)> = samples
        .par_iter()
        .zip(theta)
        .map(|((_, a), &th)| {
            let atq = &a.transpose() * q;
            let sym = atq.try_add(&atq.transpose())?;
            let m = sym.try_add(&q.scale(S::lit(2.0) * th))?;
            let tol = S::lit(PSD_TOL) * (sym.norm_inf() + S::lit(2.0) * th.abs() * q.norm_inf());
            let psd = sym_eigenvalues(&m)?.last().copied().unwrap_or_else(S::zero) >= -tol;
            let mu_neg = mu_p(&scaling.conjugate(&-a)?, NormKind::L2)?;
            Ok((a.trace() + nk * th.max(mu_neg), psd))
        })
        .collect::<Result<_>>()?;
    let violations = per_sample.iter().filter(|(_, ok)| !ok).count();
    let values: Vec<S> = per_sample.iter().map(|(v, _)| *v).collect();
    let (worst, bound) = argmax(&values);
    Ok(Certificate::contraction(
        Method::LtvSmith,
        k,
        NormKind::L2,
        bound,
        eta,
        Evidence::Sampled {
            times: samples.len(),
            states: 1,
        },
        Witness {
            scaling: Some(p),
            worst_index: Some(worst),
            worst_sample: Some((samples[worst].0, Vec::new())),
            violations: Some(violations),
            ..Witness::default()
        },
    ))
}

/// Per-neuron values of the state-independent Hopfield bound with weights `d`.
///
/// The self-coupling term uses `m_i` when `w_ii φ_i' ≥ 0` is guaranteed
/// (`w_ii ≥ 0` and a nondecreasing activation); otherwise the valid
/// lower bound `-M_i |w_ii|` takes its place.
pub fn hopfield_columns<S: Real>(model: &HopfieldModel<S>, k: usize, d: &[S]) -> Result<Vec<S>> {
    let n = model.n();
    if k == 0 || k >= n {
        return Err(domain(format!(
            "k = {k} outside 1..={}; for k = n use the trace test on the Jacobian",
            n.saturating_sub(1)
        )));
    }
    check_weights(d, n)?;
    let w = model.weights();
    let r = model.r();
    let bounds = model.derivative_bounds();
    let acts = model.activations();
    let nk = S::of_usize(n - k);
    let nk1 = S::of_usize(n - k - 1);
    Ok((0..n)
        .map(|i| {
            let (m_i, big_m_i) = bounds[i];
            let self_low = if w[(i, i)] >= S::zero() && acts[i].is_nondecreasing() {
                m_i
            } else {
                big_m_i
            };
            let own = -nk1 * (-r[i].recip() - self_low * w[(i, i)].abs());
            let rest = (0..n)
                .filter(|&j| j != i)
                .map(|j| -r[j].recip() + bounds[j].1 * w[(j, j)].abs() + nk * d[j] / d[i] * bounds[i].1 * w[(j, i)].abs())
                .sum::<S>();
            own + rest
        })
        .collect())
}

/// State-independent k-contraction test for a Hopfield network in the
/// weighted ∞-norm `|D x|∞`; `d = None` means `D = I`. Requires `k < n`.
pub fn hopfield_certify<S: Real>(model: &HopfieldModel<S>, k: usize, d: Option<&[S]>, eta: S) -> Result<Certificate<S>> {
    check_eta(eta)?;
    let ones = vec![S::one(); model.n()];
    let d = d.unwrap_or(&ones);
    let cols = hopfield_columns(model, k, d)?;
    let (worst, bound) = argmax(&cols);
    Ok(Certificate::contraction(
        Method::Hopfield,
        k,
        NormKind::LInf,
        bound,
        eta,
        Evidence::Exact,
        Witness {
            weights: Some(d.to_vec()),
            worst_index: Some(worst),
            ..Witness::default()
        },
    ))
}

fn det_sign_ok<S: Real>(n: usize, det: S) -> bool {
    if n.is_multiple_of(2) {
        det > S::zero()
    } else {
        det < S::zero()
    }
}

/// Hurwitz test through the 2-compound: `A^[2]` Hurwitz and `(-1)^n det A > 0`.
pub fn hurwitz_via_2compound<S: Real>(a: &Matrix<S>) -> Result<bool> {
    Ok(li_wang_certificate(a)?.passed)
}

/// [`hurwitz_via_2compound`] with the spectral abscissa of `A^[2]` as bound and
/// `det A` as witness.
pub fn li_wang_certificate<S: Real>(a: &Matrix<S>) -> Result<Certificate<S>> {
    let n = a.require_square("Hurwitz test argument")?;
    if n == 0 {
        return Err(domain("empty matrix"));
    }
    let d = det(a)?;
    let bound = if n == 1 {
        S::neg_infinity()
    } else {
        spectral_abscissa(additive_compound(a, 2)?.matrix())?
    };
    let passed = bound < S::zero() && det_sign_ok(n, d);
    // 1x1 has no 2-compound; report the eigenvalue itself.
    let bound = if n == 1 { a[(0, 0)] } else { bound };
    Ok(Certificate {
        method: Method::LiWang,
        k: 2,
        p: None,
        bound,
        rate_eta: S::zero().max(-bound),
        requested_eta: S::zero(),
        passed,
        evidence: Evidence::Exact,
        witness: Witness {
            determinant: Some(d),
            ..Witness::default()
        },
    })
}

/// `τ_{p,2}(J) < 0` and `(-1)^n det J > 0`. A `true` result implies `J` is
/// Hurwitz; `false` says nothing.
pub fn local_stability_compound_free<S: Real>(j: &Matrix<S>, p: NormKind, scaling: Option<&Scaling<S>>) -> Result<bool> {
    Ok(local_stability_certificate(j, p, scaling)?.passed)
}

/// [`local_stability_compound_free`] with `τ_{p,2}(J)` as bound and `det J` as witness.
pub fn local_stability_certificate<S: Real>(
    j: &Matrix<S>,
    p: NormKind,
    scaling: Option<&Scaling<S>>,
) -> Result<Certificate<S>> {
    let n = j.require_square("Jacobian")?;
    if n < 2 {
        return Err(domain("the 2-compound test needs n >= 2"));
    }
    check_scaling(scaling, n)?;
    let spec = TauSpec {
        p,
        k: 2,
        scaling: scaling.cloned(),
    };
    let bound = tau(j, &spec)?;
    let d = det(j)?;
    Ok(Certificate {
        method: Method::LocalStability,
        k: 2,
        p: Some(p),
        bound,
        rate_eta: S::zero().max(-bound),
        requested_eta: S::zero(),
        passed: bound < S::zero() && det_sign_ok(n, d),
        evidence: Evidence::Exact,
        witness: Witness {
            scaling: scaling.map(|t| t.matrix().clone()),
            determinant: Some(d),
            ..Witness::default()
        },
    })
}

/// True iff every sum of `k` eigenvalues of `A` has negative real part,
/// i.e. the `k` largest real parts sum to a negative number.
pub fn eigsum_necessary_check<S: Real>(a: &Matrix<S>, k: usize) -> Result<bool> {
    let n = a.require_square("eigenvalue-sum argument")?;
    check_k(k, n)?;
    let mut re: Vec<S> = eigenvalues(a)?.into_iter().map(|z| z.re).collect();
    re.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(re.into_iter().take(k).sum::<S>() < S::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexidx::Sequences;
    use crate::linalg::{inverse, is_hurwitz};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(d: &[f64]) -> Matrix<f64> {
        Matrix::from_diag(d)
    }

    fn random(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Max over `α ∈ Q(k, n)` of the real part of the eigenvalue sum.
    fn eigsum_enumerated(a: &Matrix<f64>, k: usize) -> f64 {
        let ev = eigenvalues(a).unwrap();
        Sequences::new(k, a.rows())
            .unwrap()
            .map(|alpha| alpha.zero_based().map(|i| ev[i].re).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn direct_constant() {
        let s = JacobianSampler::constant(diag(&[-2.0; 3])).unwrap();
        let c = certify_direct(&s, 2, NormKind::LInf, None, 3.0).unwrap();
        assert!(c.passed);
        assert_eq!(c.bound, -4.0);
        assert_eq!(c.rate_eta, 4.0);
        assert_eq!(c.evidence, Evidence::Exact);
        assert!(!certify_direct(&s, 2, NormKind::LInf, None, 4.5).unwrap().passed);
    }

    #[test]
    fn direct_ltv_rotation() {
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let s = JacobianSampler::ltv_rotation(times);
        for p in NormKind::ALL {
            let c = certify_direct(&s, 2, p, None, 1.49).unwrap();
            assert!((c.bound + 1.5).abs() < 1e-14);
            assert!(c.passed);
            assert_eq!(c.evidence, Evidence::Sampled { times: 200, states: 1 });
        }
    }

    #[test]
    fn direct_with_lyapunov_scaling() {
        // A = S diag(λ) S⁻¹ with every pair sum negative; T = S⁻¹ diagonalises,
        // so μ_{2,T^(2)}(A^[2]) is the largest pair sum.
        let sm = Matrix::from_rows(&[[1.0, 0.4, -0.2], [0.3, 1.0, 0.5], [-0.1, 0.2, 1.0]]).unwrap();
        let s_inv = inverse(&sm).unwrap();
        let a = &(&sm * &diag(&[0.5, -1.0, -3.0])) * &s_inv;
        let t = Scaling::new(s_inv).unwrap();
        let s = JacobianSampler::constant(a.clone()).unwrap();
        let c = certify_direct(&s, 2, NormKind::L2, Some(&t), 0.0).unwrap();
        assert!((c.bound + 0.5).abs() < 1e-9, "{}", c.bound);
        assert!(c.passed);
        assert!(!certify_direct(&s, 1, NormKind::L2, Some(&t), 0.0).unwrap().passed);
    }

    #[test]
    fn tau_cases() {
        let s = JacobianSampler::constant(Matrix::identity(4)).unwrap();
        let c = certify_tau(&s, 2, NormKind::L1, None, 0.0).unwrap();
        assert_eq!(c.bound, 2.0);
        assert!(!c.passed);
        assert_eq!(c.rate_eta, 0.0);

        let s = JacobianSampler::constant(diag(&[-1.0; 3])).unwrap();
        let c = certify_tau(&s, 1, NormKind::LInf, None, 0.5).unwrap();
        // -3 + 2 μ1(I) = -1
        assert_eq!(c.bound, -1.0);
        assert!(c.passed);
    }

    #[test]
    fn tau_on_hopfield_grid() {
        let m = HopfieldModel::three_neuron_example(0.49f64).unwrap();
        let s = JacobianSampler::hopfield(m)
            .with_grid(&[-3.0; 3], &[3.0; 3], 7)
            .unwrap()
            .with_random_states(&[-10.0; 3], &[10.0; 3], 100, 4)
            .unwrap();
        assert_eq!(s.states().len(), 343 + 100);
        let c = certify_tau(&s, 2, NormKind::LInf, None, 0.0).unwrap();
        assert!(c.passed, "{}", c.bound);
        // worst case at the origin: tr = 3 - 3/r, μ1(-J) = 1/r + 1
        assert!((c.bound - (-2.0 / 0.49 + 4.0)).abs() < 1e-12);
        let d = certify_direct(&s, 2, NormKind::LInf, None, 0.0).unwrap();
        assert!(d.passed && d.bound <= c.bound + 1e-12);
    }

    #[test]
    fn evaluator_errors_carry_coordinates() {
        let s = JacobianSampler::new(2, |t: f64, _x: &[f64]| {
            if t > 0.5 {
                Err("blew up".to_string())
            } else {
                Ok(Matrix::identity(2))
            }
        })
        .with_times(vec![0.0, 1.0]);
        match certify_tau(&s, 1, NormKind::L1, None, 0.0) {
            Err(Error::Evaluation { at, message }) => {
                assert!(at.contains("t = 1"));
                assert_eq!(message, "blew up");
            }
            other => panic!("{other:?}"),
        }
        let bad = JacobianSampler::new(2, |_t: f64, _x: &[f64]| Ok(Matrix::identity(3)));
        assert!(matches!(certify_direct(&bad, 1, NormKind::L1, None, 0.0), Err(Error::Evaluation { .. })));
        let empty = JacobianSampler::constant(Matrix::identity(2)).unwrap().with_times(vec![]);
        assert!(certify_tau(&empty, 1, NormKind::L1, None, 0.0).is_err());
    }

    #[test]
    fn soundness_chain_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut tau_passes = 0;
        for _ in 0..300 {
            let n = rng.gen_range(2..=5);
            let k = rng.gen_range(1..=n);
            let a = random(&mut rng, n).try_sub(&Matrix::identity(n).scale(rng.gen_range(0.0..2.0))).unwrap();
            let s = JacobianSampler::constant(a.clone()).unwrap();
            for p in NormKind::ALL {
                let t = certify_tau(&s, k, p, None, 0.0).unwrap();
                let d = certify_direct(&s, k, p, None, 0.0).unwrap();
                assert!(d.bound <= t.bound + 1e-9);
                if t.passed {
                    tau_passes += 1;
                    assert!(d.passed);
                }
                if d.passed {
                    assert!(eigsum_necessary_check(&a, k).unwrap());
                }
                // τ ≥ k Re(λ_min)
                let lmin = eigenvalues(&a).unwrap().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                assert!(t.bound >= k as f64 * lmin - 1e-9);
            }
        }
        assert!(tau_passes > 20);
    }

    #[test]
    fn tau_monotone_in_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let a = random(&mut rng, n).try_sub(&Matrix::identity(n).scale(1.5)).unwrap();
            let s = JacobianSampler::constant(a).unwrap();
            for p in [NormKind::L1, NormKind::LInf] {
                for k in 1..n {
                    if certify_tau(&s, k, p, None, 0.0).unwrap().passed {
                        assert!(certify_tau(&s, k + 1, p, None, 0.0).unwrap().passed);
                    }
                }
            }
        }
    }

    #[test]
    fn trace_dominance_cases() {
        let a = diag(&[-1.0, -2.0, -3.0]);
        for k in 1..=3 {
            let c = trace_dominance(&a, k, &[1.0; 3], 0.0).unwrap();
            // column 3 is the worst: -6 + (n-k)·3, zero for k = 1
            assert_eq!(c.bound, -6.0 + 3.0 * (3 - k) as f64);
            assert_eq!(c.passed, k > 1);
        }
        // k = n: the trace
        let b = Matrix::from_rows(&[[-1.0, 5.0], [7.0, 0.5]]).unwrap();
        assert_eq!(trace_dominance(&b, 2, &[1.0, 3.0], 0.0).unwrap().bound, -0.5);
        // k = n - 1, D = I: tr A - a_pp + Σ_{j≠p} |a_jp|
        let c: Matrix<f64> = Matrix::from_rows(&[[-4.0, 1.0, -2.0], [0.5, -3.0, 1.0], [-1.0, 2.0, -5.0]]).unwrap();
        let cols = trace_dominance_columns(&c, 2, &[1.0; 3]).unwrap();
        for p in 0..3 {
            let want = c.trace() - c[(p, p)] + (0..3).filter(|&j| j != p).map(|j| c[(j, p)].abs()).sum::<f64>();
            assert!((cols[p] - want).abs() < 1e-15);
        }
        assert!(trace_dominance(&a, 2, &[1.0, 0.0, 1.0], 0.0).is_err());
        assert!(trace_dominance(&a, 2, &[1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn trace_dominance_is_scaled_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = rng.gen_range(2..=5);
            let k = rng.gen_range(1..=n);
            let a = random(&mut rng, n);
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
            let td = trace_dominance(&a, k, &d, 0.0).unwrap().bound;
            let spec = TauSpec::new(NormKind::LInf, k).with_scaling(Scaling::diagonal(&d).unwrap());
            assert!((td - tau(&a, &spec).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_search() {
        let a = diag(&[-1.0; 3]);
        assert_eq!(search_diagonal_weights(&a, 2).unwrap(), Some(vec![1.0; 3]));

        let dominated: Matrix<f64> = Matrix::from_rows(&[[-1.0, 0.0, 2.0], [0.0, -1.0, 2.0], [0.0, 0.0, -3.0]]).unwrap();
        assert!(!trace_dominance(&dominated, 2, &[1.0; 3], 0.0).unwrap().passed);
        let hand = trace_dominance(&dominated, 2, &[1.0, 1.0, 10.0], 0.0).unwrap();
        assert!(hand.passed);
        assert!((hand.bound - (-1.6)).abs() < 1e-15);
        let d = search_diagonal_weights(&dominated, 2).unwrap().expect("weights exist");
        assert!(trace_dominance(&dominated, 2, &d, 0.0).unwrap().passed);

        let hop: Matrix<f64> = Matrix::from_fn(3, 3, |i, j| if i == j { 1.0 - 1.0 / 0.49 } else { 1.0 });
        let d = search_diagonal_weights(&hop, 2).unwrap().expect("weights exist");
        assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-12));

        assert_eq!(search_diagonal_weights(&Matrix::<f64>::identity(3), 2).unwrap(), None);
    }

    #[test]
    fn smith_constant_and_rotation() {
        let n = 3;
        let samples = vec![(0.0, diag(&[-1.0; 3]))];
        for k in 1..=n {
            let c = ltv_smith_certify(&samples, &Matrix::identity(n), &[1.0], k, 0.0).unwrap();
            assert_eq!(c.bound, -(k as f64));
            assert!(c.passed);
            assert_eq!(c.witness.violations, Some(0));
        }

        // rotation example, Q = I: μ2(-A(t)) = 3/2, and θ = 3/2 satisfies the inequality
        let ex = LtvRotation;
        let samples: Vec<(f64, Matrix<f64>)> = (0..100).map(|i| (i as f64 * 0.1, ex.a(i as f64 * 0.1))).collect();
        for (_, a) in &samples {
            assert!((mu_p(&-a, NormKind::L2).unwrap() - 1.5).abs() < 1e-12);
        }
        let theta = vec![1.5; samples.len()];
        let c = ltv_smith_certify(&samples, &Matrix::identity(2), &theta, 2, 1.0).unwrap();
        assert!((c.bound + 1.5).abs() < 1e-12 && c.passed && c.witness.violations == Some(0));
        let c = ltv_smith_certify(&samples, &Matrix::identity(2), &theta, 1, 0.0).unwrap();
        assert!((c.bound - 0.0).abs() < 1e-12 && !c.passed);
        // too small θ: inequality fails, bound falls back to μ
        let c = ltv_smith_certify(&samples, &Matrix::identity(2), &vec![0.1; samples.len()], 1, 0.0).unwrap();
        assert_eq!(c.witness.violations, Some(100));
        assert!(c.bound >= -1e-12);
    }

    #[test]
    fn smith_polytope() {
        // vertices sharing Q = I and trace -4
        let verts = [
            Matrix::from_rows(&[[-2.0, 1.0], [-1.0, -2.0]]).unwrap(),
            Matrix::from_rows(&[[-1.0, 0.5], [0.5, -3.0]]).unwrap(),
        ];
        let samples: Vec<(f64, Matrix<f64>)> = verts.iter().cloned().map(|a| (0.0, a)).collect();
        let theta: Vec<f64> = verts.iter().map(|a| mu_p(&-a, NormKind::L2).unwrap()).collect();
        let c = ltv_smith_certify(&samples, &Matrix::identity(2), &theta, 1, 0.0).unwrap();
        assert_eq!(c.witness.violations, Some(0));
        let want = theta.iter().map(|th| -4.0 + th).fold(f64::MIN, f64::max);
        assert!((c.bound - want).abs() < 1e-12);
    }

    #[test]
    fn smith_errors() {
        let s = vec![(0.0, diag(&[-1.0; 2]))];
        let q_bad = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(
            ltv_smith_certify(&s, &q_bad, &[1.0], 1, 0.0),
            Err(Error::NotPositiveDefinite(_))
        ));
        assert!(ltv_smith_certify(&s, &Matrix::identity(3), &[1.0], 1, 0.0).is_err());
        assert!(ltv_smith_certify(&s, &Matrix::identity(2), &[], 1, 0.0).is_err());
        assert!(ltv_smith_certify::<f64>(&[], &Matrix::identity(2), &[], 1, 0.0).is_err());
    }

    #[test]
    fn hopfield_threshold() {
        // r < k / ((n-1)(n-k+1)), n = 3, k = 2 → r < 1/2
        let pass = hopfield_certify(&HopfieldModel::three_neuron_example(0.49f64).unwrap(), 2, None, 0.0).unwrap();
        assert!(pass.passed);
        assert!((pass.bound - (-2.0 / 0.49 + 4.0)).abs() < 1e-12);
        let fail = hopfield_certify(&HopfieldModel::three_neuron_example(0.51f64).unwrap(), 2, None, 0.0).unwrap();
        assert!(!fail.passed);
        for n in 2..=6 {
            for k in 1..n {
                let w = Matrix::from_fn(n, n, |_, _| 1.0);
                let thr = k as f64 / ((n - 1) * (n - k + 1)) as f64;
                for (r, ok) in [(thr * 0.99, true), (thr * 1.01, false)] {
                    let m = HopfieldModel::uniform(r, w.clone(), crate::dynamics::Activation::tanh()).unwrap();
                    let c = hopfield_certify(&m, k, None, 0.0).unwrap();
                    assert_eq!(c.passed, ok, "n={n} k={k}");
                    let closed = -(k as f64) / r + ((n - 1) * (n - k + 1)) as f64;
                    assert!((c.bound - closed).abs() < 1e-9 * closed.abs().max(1.0));
                }
            }
        }
        let small = HopfieldModel::three_neuron_example(1e-3f64).unwrap();
        assert!(hopfield_certify(&small, 1, None, 10.0).unwrap().passed);
        let m = HopfieldModel::three_neuron_example(0.49f64).unwrap();
        assert!(hopfield_certify(&m, 3, None, 0.0).is_err());
        assert!(hopfield_certify(&m, 2, Some(&[1.0, -1.0, 1.0]), 0.0).is_err());
    }

    #[test]
    fn hopfield_bound_dominates_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.gen_range(2..=5);
            let k = rng.gen_range(1..n);
            let w = random(&mut rng, n).scale(2.0);
            let r = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let m = HopfieldModel::new(r, w, vec![0.0; n], vec![crate::dynamics::Activation::tanh(); n]).unwrap();
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
            let cert = hopfield_certify(&m, k, Some(&d), 0.0).unwrap();
            let spec = TauSpec::new(NormKind::LInf, k).with_scaling(Scaling::diagonal(&d).unwrap());
            for _ in 0..20 {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                assert!(tau(&m.jacobian(&x), &spec).unwrap() <= cert.bound + 1e-12);
            }
        }
    }

    #[test]
    fn li_wang_examples() {
        assert!(hurwitz_via_2compound(&diag(&[-1.0; 3])).unwrap());
        let sm = Matrix::from_rows(&[[2.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]]).unwrap();
        let a = &(&sm * &diag(&[-1.0, 0.5, -2.0])) * &inverse(&sm).unwrap();
        let c = li_wang_certificate(&a).unwrap();
        assert!(c.bound < 0.0);
        assert!(c.witness.determinant.unwrap() > 0.0);
        assert!(!c.passed);
        assert!(!is_hurwitz(&a).unwrap());
        assert!(hurwitz_via_2compound(&diag(&[-0.5])).unwrap());
        assert!(!hurwitz_via_2compound(&diag(&[0.5])).unwrap());
    }

    #[test]
    fn li_wang_agrees_with_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut hurwitz = 0;
        for _ in 0..300 {
            let n = rng.gen_range(3..=5);
            let a = random(&mut rng, n).try_sub(&Matrix::identity(n).scale(rng.gen_range(0.0..1.5))).unwrap();
            let direct = is_hurwitz(&a).unwrap();
            hurwitz += direct as usize;
            assert_eq!(hurwitz_via_2compound(&a).unwrap(), direct);
        }
        assert!(hurwitz > 30 && hurwitz < 270);
    }

    #[test]
    fn local_stability_cases() {
        assert!(local_stability_compound_free(&diag(&[-1.0; 4]), NormKind::L1, None).unwrap());
        let c = local_stability_certificate(&diag(&[-1.0; 4]), NormKind::L2, None).unwrap();
        assert_eq!(c.bound, -2.0);

        let m = HopfieldModel::three_neuron_example(0.49f64).unwrap();
        let e2 = crate::dynamics::find_equilibrium(|x| m.field(x), |x| m.jacobian(x), &[1.0; 3]).unwrap();
        let c = local_stability_certificate(&m.jacobian(&e2), NormKind::LInf, None).unwrap();
        assert!(c.bound < 0.0 && c.witness.determinant.unwrap() < 0.0 && c.passed);
        let c = local_stability_certificate(&m.jacobian(&[0.0; 3]), NormKind::LInf, None).unwrap();
        assert!(c.witness.determinant.unwrap() > 0.0 && !c.passed);

        assert!(local_stability_compound_free(&diag(&[-1.0]), NormKind::L1, None).is_err());
        let sing = Scaling::new(Matrix::<f64>::zeros(2, 2));
        assert!(sing.is_err());
    }

    #[test]
    fn local_stability_is_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut trues = 0;
        for _ in 0..300 {
            let n = rng.gen_range(3..=5);
            let a = random(&mut rng, n).try_sub(&Matrix::identity(n).scale(rng.gen_range(0.0..3.0))).unwrap();
            for p in NormKind::ALL {
                if local_stability_compound_free(&a, p, None).unwrap() {
                    trues += 1;
                    assert!(is_hurwitz(&a).unwrap());
                }
            }
        }
        assert!(trues > 10);
    }

    #[test]
    fn eigsum_examples_and_oracle() {
        assert!(eigsum_necessary_check(&diag(&[1.0, -2.0, -3.0]), 2).unwrap());
        assert!(!eigsum_necessary_check(&diag(&[1.0, -0.5, -3.0]), 2).unwrap());
        for k in 1..=4 {
            assert!(eigsum_necessary_check(&diag(&[-1.0; 4]), k).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(2..=6);
            let k = rng.gen_range(1..=n);
            let a = random(&mut rng, n);
            let e = eigsum_enumerated(&a, k);
            if e.abs() > 1e-9 {
                assert_eq!(eigsum_necessary_check(&a, k).unwrap(), e < 0.0);
            }
        }
    }

    #[test]
    fn bad_arguments() {
        let s = JacobianSampler::constant(Matrix::<f64>::identity(2)).unwrap();
        assert!(certify_tau(&s, 3, NormKind::L1, None, 0.0).is_err());
        assert!(certify_tau(&s, 1, NormKind::L1, None, -1.0).is_err());
        let t = Scaling::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        assert!(certify_direct(&s, 1, NormKind::L1, Some(&t), 0.0).is_err());
        assert!(JacobianSampler::constant(Matrix::<f64>::zeros(2, 3)).is_err());
    }
}
