use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::matrix::Matrix;
use crate::scalar::Real;

const MAX_ITER: usize = 100;
const STOP_TOL: f64 = 1e-12;
const ACCEPT_TOL: f64 = 1e-10;

fn inf_norm<S: Real>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |m, x| m.max(x.abs()))
}

/// Damped Newton iteration for `f(x) = 0`.
///
/// Stops once `‖f‖∞ < 1e-12` (or when no further progress is possible) and
/// accepts the iterate if `‖f‖∞ < 1e-10`.
pub fn find_equilibrium<S, F, J>(field: F, jacobian: J, x0: &[S]) -> Result<Vec<S>>
where
    S: Real,
    F: Fn(&[S]) -> Vec<S>,
    J: Fn(&[S]) -> Matrix<S>,
{
    let stop = S::tol(STOP_TOL);
    let accept = S::tol(ACCEPT_TOL);
    let mut x = x0.to_vec();
    let mut f = field(&x);
    let mut fnorm = inf_norm(&f);
    for _ in 0..MAX_ITER {
        if fnorm < stop {
            return Ok(x);
        }
        let lu = Lu::new(&jacobian(&x))?;
        if lu.is_singular() {
            return Err(Error::Singular(format!("Jacobian at Newton iterate {x:?}")));
        }
        let neg: Vec<S> = f.iter().map(|v| -*v).collect();
        let dx = lu.solve(&neg)?;
        let mut lambda = S::one();
        let mut improved = false;
        while lambda > S::lit(1e-4) {
            let trial: Vec<S> = x.iter().zip(&dx).map(|(&xi, &di)| xi + lambda * di).collect();
            let ft = field(&trial);
            let tn = inf_norm(&ft);
            if tn.is_finite() && tn < (S::one() - S::lit(0.5) * lambda * S::lit(1e-4)) * fnorm {
                x = trial;
                f = ft;
                fnorm = tn;
                improved = true;
                break;
            }
            lambda = lambda * S::lit(0.5);
        }
        if !improved {
            break;
        }
    }
    if fnorm < accept {
        Ok(x)
    } else {
        Err(Error::NoConvergence(format!(
            "Newton stopped with residual {fnorm} at {x:?}"
        )))
    }
}
