//! Log norms (matrix measures) induced by the L1, L2 and L∞ vector norms, their
//! scaled variants `μ_H(A) = μ(H A H⁻¹)`, log norms of additive compounds
//! evaluated without forming the compound, and the k-shifted log norm
//! `τ_{p,k}(A) = tr(A) + (n - k) μ_{q,T}(-A)`.

use std::fmt;
use std::str::FromStr;

use crate::compounds::{additive_compound, similarity_compound};
use crate::error::{dimension, domain, Error, Result};
use crate::lexidx::{Sequences, MAX_N};
use crate::linalg::{inverse, norm2, sym_eigenvalues};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Which L_p vector norm induces the log norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::LInf];

    /// Hölder conjugate: `1/p + 1/q = 1`.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::LInf,
            NormKind::L2 => NormKind::L2,
            NormKind::LInf => NormKind::L1,
        }
    }
}

/// Hölder conjugate exponent of `p`.
pub fn dual_exponent(p: NormKind) -> NormKind {
    p.dual()
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::L1 => "1",
            NormKind::L2 => "2",
            NormKind::LInf => "inf",
        })
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "l1" => Ok(NormKind::L1),
            "2" | "l2" => Ok(NormKind::L2),
            "inf" | "infinity" | "linf" | "∞" => Ok(NormKind::LInf),
            other => Err(domain(format!("unsupported norm '{other}', expected 1, 2 or inf"))),
        }
    }
}

/// An invertible coordinate change `H` together with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaling<S> {
    forward: Matrix<S>,
    inverse: Matrix<S>,
}

impl<S: Real> Scaling<S> {
    /// Fails when `h` is singular or too badly conditioned.
    pub fn new(h: Matrix<S>) -> Result<Self> {
        h.require_square("scaling matrix")?;
        let inverse = inverse(&h)?;
        Ok(Self { forward: h, inverse })
    }

    /// `diag(d)`; every weight must be strictly positive.
    pub fn diagonal(d: &[S]) -> Result<Self> {
        if let Some(bad) = d.iter().find(|w| !(**w > S::zero()) || !w.is_finite()) {
            return Err(domain(format!("diagonal weight {bad} is not positive")));
        }
        Ok(Self {
            forward: Matrix::from_diag(d),
            inverse: Matrix::from_diag(&d.iter().map(|w| w.recip()).collect::<Vec<_>>()),
        })
    }

    /// For matrices whose inverse is known exactly (orthogonal sign/permutation matrices).
    pub(crate) fn from_parts(forward: Matrix<S>, inverse: Matrix<S>) -> Self {
        Self { forward, inverse }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.forward
    }

    pub fn inverse(&self) -> &Matrix<S> {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.forward.rows()
    }

    /// `H A H⁻¹`.
    pub fn conjugate(&self, a: &Matrix<S>) -> Result<Matrix<S>> {
        if a.dims() != self.forward.dims() {
            return Err(dimension(format!(
                "scaling is {n}x{n}, matrix is {}x{}",
                a.rows(),
                a.cols(),
                n = self.dim()
            )));
        }
        Ok(&(&self.forward * a) * &self.inverse)
    }
}

/// A log norm: exponent plus optional scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct LogNormSpec<S> {
    pub p: NormKind,
    pub scaling: Option<Scaling<S>>,
}

impl<S: Real> LogNormSpec<S> {
    pub fn new(p: NormKind) -> Self {
        Self { p, scaling: None }
    }

    pub fn scaled(p: NormKind, scaling: Scaling<S>) -> Self {
        Self {
            p,
            scaling: Some(scaling),
        }
    }
}

fn column_measure<S: Real>(a: &Matrix<S>, j: usize) -> S {
    (0..a.rows()).fold(a[(j, j)], |acc, i| if i == j { acc } else { acc + a[(i, j)].abs() })
}

fn row_measure<S: Real>(a: &Matrix<S>, i: usize) -> S {
    (0..a.cols()).fold(a[(i, i)], |acc, j| if i == j { acc } else { acc + a[(i, j)].abs() })
}

/// Unscaled closed forms.
pub fn mu_p<S: Real>(a: &Matrix<S>, p: NormKind) -> Result<S> {
    let n = a.require_square("log norm argument")?;
    if n == 0 {
        return Err(domain("empty matrix"));
    }
    Ok(match p {
        NormKind::L1 => (0..n).map(|j| column_measure(a, j)).fold(S::neg_infinity(), S::max),
        NormKind::L2 => sym_eigenvalues(a)?[0],
        NormKind::LInf => (0..n).map(|i| row_measure(a, i)).fold(S::neg_infinity(), S::max),
    })
}

/// `μ_p(A)`, or `μ_p(H A H⁻¹)` when the spec carries a scaling.
pub fn mu<S: Real>(a: &Matrix<S>, spec: &LogNormSpec<S>) -> Result<S> {
    match &spec.scaling {
        None => mu_p(a, spec.p),
        Some(h) => mu_p(&h.conjugate(a)?, spec.p),
    }
}

/// Induced matrix norm `‖A‖_p`.
pub fn matrix_norm<S: Real>(a: &Matrix<S>, p: NormKind) -> Result<S> {
    match p {
        NormKind::L1 => Ok(a.norm1()),
        NormKind::L2 => norm2(a),
        NormKind::LInf => Ok(a.norm_inf()),
    }
}

/// Scaled induced norm `‖H A H⁻¹‖_p`.
pub fn scaled_norm<S: Real>(a: &Matrix<S>, p: NormKind, scaling: Option<&Scaling<S>>) -> Result<S> {
    match scaling {
        None => matrix_norm(a, p),
        Some(h) => matrix_norm(&h.conjugate(a)?, p),
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(domain(format!("k = {k} outside 1..={n}")));
    }
    Ok(())
}

/// `μ_p(A^[k])` without forming the compound.
///
/// For p = 2 this is the sum of the k largest eigenvalues of `(A + Aᵀ)/2`. For
/// p ∈ {1, ∞} it is the maximum over `α ∈ Q(k, n)` of
/// `Σ_{i∈α} (a_ii + Σ_{j∉α} |a_ji|)` (columns) or `|a_ij|` (rows); `Q(k, n)` is
/// streamed, never stored.
pub fn mu_compound_direct<S: Real>(a: &Matrix<S>, k: usize, p: NormKind) -> Result<S> {
    let n = a.require_square("log norm argument")?;
    if n > MAX_N {
        return Err(domain(format!("dimension {n} exceeds {MAX_N}")));
    }
    check_k(k, n)?;
    if p == NormKind::L2 {
        return Ok(sym_eigenvalues(a)?.into_iter().take(k).sum());
    }
    let off = |i: usize, j: usize| match p {
        NormKind::L1 => a[(j, i)].abs(),
        _ => a[(i, j)].abs(),
    };
    let mut inside = vec![false; n];
    let mut best = S::neg_infinity();
    for alpha in Sequences::unchecked(k, n) {
        inside.iter_mut().for_each(|x| *x = false);
        for i in alpha.zero_based() {
            inside[i] = true;
        }
        let total = alpha
            .zero_based()
            .map(|i| {
                (0..n)
                    .filter(|&j| !inside[j])
                    .fold(a[(i, i)], |acc, j| acc + off(i, j))
            })
            .sum::<S>();
        best = best.max(total);
    }
    Ok(best)
}

/// `μ_{p, T^(k)}(A^[k]) = μ_p(T^(k) A^[k] (T^(k))⁻¹)`, forming the compounds.
pub fn mu_compound_scaled<S: Real>(
    a: &Matrix<S>,
    k: usize,
    p: NormKind,
    scaling: Option<&Scaling<S>>,
) -> Result<S> {
    let n = a.require_square("log norm argument")?;
    check_k(k, n)?;
    let ak = match scaling {
        None => additive_compound(a, k)?.into_matrix(),
        Some(t) => {
            if t.dim() != n {
                return Err(dimension(format!("scaling is {0}x{0}, A is {n}x{n}", t.dim())));
            }
            similarity_compound(t.matrix(), t.inverse(), a, k)?
        }
    };
    mu_p(&ak, p)
}

/// Parameters of the k-shifted log norm.
#[derive(Clone, Debug, PartialEq)]
pub struct TauSpec<S> {
    pub p: NormKind,
    pub k: usize,
    /// Coordinate change `T`; identity when absent.
    pub scaling: Option<Scaling<S>>,
}

impl<S: Real> TauSpec<S> {
    pub fn new(p: NormKind, k: usize) -> Self {
        Self { p, k, scaling: None }
    }

    pub fn with_scaling(mut self, scaling: Scaling<S>) -> Self {
        self.scaling = Some(scaling);
        self
    }
}

/// `τ_{p,k}(A) = tr(A) + (n - k) μ_{q,T}(-A)` with `q` dual to `p`.
pub fn tau<S: Real>(a: &Matrix<S>, spec: &TauSpec<S>) -> Result<S> {
    let n = a.require_square("tau argument")?;
    check_k(spec.k, n)?;
    let neg = -a;
    let q = spec.p.dual();
    let mu_neg = match &spec.scaling {
        None => mu_p(&neg, q)?,
        Some(t) => mu_p(&t.conjugate(&neg)?, q)?,
    };
    Ok(a.trace() + S::of_usize(n - spec.k) * mu_neg)
}

/// Both sides of `μ_{p,T^(k)}(A^[k]) ≤ τ_{p,k}(A)`, each computed on its own route:
/// the left through explicit compounds, the right compound-free.
pub fn tau_upper_bounds_mu<S: Real>(a: &Matrix<S>, spec: &TauSpec<S>) -> Result<(S, S)> {
    let tau_val = tau(a, spec)?;
    let mu_val = mu_compound_scaled(a, spec.k, spec.p, spec.scaling.as_ref())?;
    Ok((mu_val, tau_val))
}

/// `μ_{p,T^(k)}(A^[k]) / k` for `k = 1..=n`; the sequence is non-increasing.
pub fn normalized_mu_monotone<S: Real>(
    a: &Matrix<S>,
    p: NormKind,
    scaling: Option<&Scaling<S>>,
) -> Result<Vec<S>> {
    let n = a.require_square("log norm argument")?;
    (1..=n)
        .map(|k| {
            let m = match scaling {
                None => mu_compound_direct(a, k, p)?,
                Some(_) => mu_compound_scaled(a, k, p, scaling)?,
            };
            Ok(m / S::of_usize(k))
        })
        .collect()
}
