//! The signed anti-diagonal matrix `U(k, n)` relating k- and (n-k)-compounds,
//! and the duality identities built on it:
//!
//! ```text
//! (A^(k))ᵀ Uᵀ A^(n-k) U = det(A) I
//! (A^[k])ᵀ + Uᵀ A^[n-k] U = tr(A) I
//! ((exp A)^(k))ᵀ = exp(tr A) Uᵀ (exp(-A))^(n-k) U
//! μ(A^[k]) = tr(A) + μ_{Uᵀ}(-(A^[n-k])ᵀ)
//! ```

use crate::compounds::{additive_compound, multiplicative_compound, MAX_COMPOUND_DIM};
use crate::error::{dimension, domain, Result};
use crate::lexidx::{binomial, Sequences, MAX_N};
use crate::linalg::{det, expm};
use crate::lognorms::{mu, LogNormSpec, Scaling};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// `U(k, n)`: an `r x r` anti-diagonal matrix, `r = C(n, k)`, whose entry in
/// column `j` is the signature of the j-th element of `Q(k, n)`. Stored as the
/// sign vector only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityMatrix {
    k: usize,
    n: usize,
    signs: Vec<i8>,
}

/// Builds `U(k, n)` for `1 ≤ k ≤ n - 1`.
pub fn build_u(k: usize, n: usize) -> Result<DualityMatrix> {
    DualityMatrix::new(k, n)
}

impl DualityMatrix {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if !(2..=MAX_N).contains(&n) {
            return Err(domain(format!("n = {n} outside 2..={MAX_N}")));
        }
        if k == 0 || k >= n {
            return Err(domain(format!("k = {k} outside 1..={}", n - 1)));
        }
        if binomial(n, k) > MAX_COMPOUND_DIM {
            return Err(domain(format!("C({n},{k}) exceeds {MAX_COMPOUND_DIM}")));
        }
        let signs = Sequences::unchecked(k, n).map(|s| s.signature()).collect();
        Ok(Self { k, n, signs })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C(n, k)`.
    pub fn r(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn to_dense<S: Real>(&self) -> Matrix<S> {
        let r = self.r();
        Matrix::from_fn(r, r, |i, j| {
            if i + j + 1 == r {
                sign::<S>(self.signs[j])
            } else {
                S::zero()
            }
        })
    }

    /// `Uᵀ B U` by permuting and re-signing: entry `(i, j)` is
    /// `s_i s_j b_{r-1-i, r-1-j}` (0-based).
    pub fn conjugate<S: Real>(&self, b: &Matrix<S>) -> Result<Matrix<S>> {
        let r = self.r();
        if b.dims() != (r, r) {
            return Err(dimension(format!(
                "U({}, {}) is {r}x{r}, matrix is {}x{}",
                self.k,
                self.n,
                b.rows(),
                b.cols()
            )));
        }
        Ok(Matrix::from_fn(r, r, |i, j| {
            let v = b[(r - 1 - i, r - 1 - j)];
            if self.signs[i] == self.signs[j] {
                v
            } else {
                -v
            }
        }))
    }

    /// The scaling `H = Uᵀ`, so that `μ_{Uᵀ}(X) = μ(Uᵀ X U)`.
    pub fn transpose_scaling<S: Real>(&self) -> Scaling<S> {
        let u = self.to_dense::<S>();
        Scaling::from_parts(u.transpose(), u)
    }
}

fn sign<S: Real>(s: i8) -> S {
    if s < 0 {
        -S::one()
    } else {
        S::one()
    }
}

/// Returns `(n, U(k, n))` after validating that `a` is square and `1 ≤ k ≤ n-1`.
fn setup<S: Real>(a: &Matrix<S>, k: usize) -> Result<(usize, DualityMatrix)> {
    let n = a.require_square("duality input")?;
    Ok((n, DualityMatrix::new(k, n)?))
}

/// `Uᵀ B U` for an explicit `U`.
pub fn conjugate_by_u<S: Real>(u: &DualityMatrix, b: &Matrix<S>) -> Result<Matrix<S>> {
    u.conjugate(b)
}

/// `Uᵀ A^(n-k) U`, the adjugate of `(A^(k))ᵀ`:
/// `(A^(k))ᵀ · kth_adjugate(A, k) = det(A) I`.
pub fn kth_adjugate<S: Real>(a: &Matrix<S>, k: usize) -> Result<Matrix<S>> {
    let (n, u) = setup(a, k)?;
    u.conjugate(multiplicative_compound(a, n - k)?.matrix())
}

/// `‖(A^(k))ᵀ Uᵀ A^(n-k) U - det(A) I‖∞`.
pub fn multiplicative_duality_residual<S: Real>(a: &Matrix<S>, k: usize) -> Result<S> {
    let adj = kth_adjugate(a, k)?;
    let ak_t = multiplicative_compound(a, k)?.into_matrix().transpose();
    let d = det(a)?;
    let r = adj.rows();
    Ok((&ak_t * &adj).try_sub(&Matrix::identity(r).scale(d))?.norm_inf())
}

/// Largest absolute entry of `(A^[k])ᵀ + Uᵀ A^[n-k] U - tr(A) I`.
pub fn additive_duality_residual<S: Real>(a: &Matrix<S>, k: usize) -> Result<S> {
    let (n, u) = setup(a, k)?;
    let lhs = additive_compound(a, k)?.into_matrix().transpose();
    let dual = u.conjugate(additive_compound(a, n - k)?.matrix())?;
    let r = u.r();
    Ok((&lhs + &dual)
        .try_sub(&Matrix::identity(r).scale(a.trace()))?
        .max_abs())
}

/// `‖XY - YX‖∞` for `X = (A^[k])ᵀ` and `Y = Uᵀ A^[n-k] U`.
pub fn commutation_residual<S: Real>(a: &Matrix<S>, k: usize) -> Result<S> {
    let (n, u) = setup(a, k)?;
    let x = additive_compound(a, k)?.into_matrix().transpose();
    let y = u.conjugate(additive_compound(a, n - k)?.matrix())?;
    Ok((&x * &y).try_sub(&(&y * &x))?.norm_inf())
}

/// `exp(tr A) Uᵀ (exp(-A))^(n-k) U`, which equals `((exp A)^(k))ᵀ`.
pub fn exp_compound_via_duality<S: Real>(a: &Matrix<S>, k: usize) -> Result<Matrix<S>> {
    let (n, u) = setup(a, k)?;
    let e_neg = expm(&-a)?;
    let dual = u.conjugate(multiplicative_compound(&e_neg, n - k)?.matrix())?;
    Ok(dual.scale(a.trace().exp()))
}

/// Relative residual of the exponential identity against the directly
/// computed `((exp A)^(k))ᵀ`.
pub fn exp_duality_residual<S: Real>(a: &Matrix<S>, k: usize) -> Result<S> {
    let rhs = exp_compound_via_duality(a, k)?;
    let lhs = multiplicative_compound(&expm(a)?, k)?.into_matrix().transpose();
    Ok(lhs.try_sub(&rhs)?.max_abs() / lhs.max_abs().max(S::min_positive_value()))
}

/// Both sides of `μ(A^[k]) = tr(A) + μ_{Uᵀ}(-(A^[n-k])ᵀ)` for the log norm
/// given by `spec` (acting on `r x r` matrices).
pub fn mu_duality_equality<S: Real>(
    a: &Matrix<S>,
    k: usize,
    spec: &LogNormSpec<S>,
) -> Result<(S, S)> {
    let (n, u) = setup(a, k)?;
    let lhs = mu(additive_compound(a, k)?.matrix(), spec)?;
    let dual = additive_compound(a, n - k)?.into_matrix().transpose();
    let rhs = a.trace() + mu(&u.conjugate(&-&dual)?, spec)?;
    Ok((lhs, rhs))
}
