//! Dense kernels: LU with partial pivoting, inverses, symmetric (Jacobi) and
//! general (Hessenberg + shifted QR) eigenvalues, matrix exponential and the
//! symmetric positive definite square root.

use num_complex::Complex;

use crate::error::{dimension, Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Condition number (1-norm) above which a matrix is treated as singular.
pub fn cond_limit<S: Real>() -> S {
    S::lit(1e12).min(S::lit(0.01) / S::epsilon())
}

/// LU factorization `PA = LU` with partial pivoting, packed in one matrix.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    lu: Matrix<S>,
    perm: Vec<usize>,
    sign: S,
    singular: bool,
}

impl<S: Real> Lu<S> {
    pub fn new(a: &Matrix<S>) -> Result<Self> {
        let n = a.require_square("LU input")?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = S::one();
        let mut singular = false;
        for c in 0..n {
            let (p, pmax) = (c..n)
                .map(|r| (r, lu[(r, c)].abs()))
                .fold((c, S::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == S::zero() {
                singular = true;
                continue;
            }
            if p != c {
                for j in 0..n {
                    let tmp = lu[(p, j)];
                    lu[(p, j)] = lu[(c, j)];
                    lu[(c, j)] = tmp;
                }
                perm.swap(p, c);
                sign = -sign;
            }
            let pivot = lu[(c, c)];
            for r in (c + 1)..n {
                let f = lu[(r, c)] / pivot;
                lu[(r, c)] = f;
                if f != S::zero() {
                    for j in (c + 1)..n {
                        lu[(r, j)] = lu[(r, j)] - f * lu[(c, j)];
                    }
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            sign,
            singular,
        })
    }

    pub fn det(&self) -> S {
        if self.singular {
            return S::zero();
        }
        self.lu.diagonal().into_iter().fold(self.sign, |acc, d| acc * d)
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(dimension(format!("rhs has length {}, expected {n}", b.len())));
        }
        if self.singular {
            return Err(Error::Singular("LU factor has a zero pivot".into()));
        }
        let mut x: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix<S>> {
        let n = self.lu.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![S::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = S::zero());
            e[j] = S::one();
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

pub fn det<S: Real>(a: &Matrix<S>) -> Result<S> {
    Ok(Lu::new(a)?.det())
}

/// Inverse, rejecting matrices whose 1-norm condition number exceeds [`cond_limit`].
pub fn inverse<S: Real>(a: &Matrix<S>) -> Result<Matrix<S>> {
    let lu = Lu::new(a)?;
    if lu.is_singular() {
        return Err(Error::Singular("zero pivot".into()));
    }
    let inv = lu.inverse()?;
    let cond = a.norm1() * inv.norm1();
    if !cond.is_finite() || cond > cond_limit() {
        return Err(Error::Singular(format!("condition number {cond} too large")));
    }
    Ok(inv)
}

/// 1-norm condition number; infinite for singular input.
pub fn cond1<S: Real>(a: &Matrix<S>) -> Result<S> {
    let lu = Lu::new(a)?;
    if lu.is_singular() {
        return Ok(S::infinity());
    }
    Ok(a.norm1() * lu.inverse()?.norm1())
}

/// Symmetric eigen-decomposition.
#[derive(Clone, Debug)]
pub struct SymEigen<S> {
    /// Eigenvalues in non-increasing order.
    pub values: Vec<S>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: Matrix<S>,
}

/// Cyclic Jacobi rotations until the off-diagonal mass drops below `1e-12`
/// relative to the Frobenius norm. Only the symmetric part of `a` is used.
pub fn sym_eigen<S: Real>(a: &Matrix<S>) -> Result<SymEigen<S>> {
    const MAX_SWEEPS: usize = 100;
    let n = a.require_square("symmetric eigen input")?;
    let mut m = a.symmetric_part();
    let mut v = Matrix::identity(n);
    let tol = S::tol(1e-12) * m.frobenius().max(S::min_positive_value());
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)] * m[(p, q)])
            .sum::<S>()
            .sqrt();
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == S::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (S::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                m[(p, q)] = S::zero();
                m[(q, p)] = S::zero();
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence("Jacobi sweeps".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).expect("finite eigenvalues"));
    Ok(SymEigen {
        values: order.iter().map(|&i| m[(i, i)]).collect(),
        vectors: Matrix::from_fn(n, n, |r, c| v[(r, order[c])]),
    })
}

/// Eigenvalues of the symmetric part of `a`, non-increasing.
pub fn sym_eigenvalues<S: Real>(a: &Matrix<S>) -> Result<Vec<S>> {
    Ok(sym_eigen(a)?.values)
}

/// Spectral norm `sqrt(λ_max(AᵀA))`.
pub fn norm2<S: Real>(a: &Matrix<S>) -> Result<S> {
    let gram = &a.transpose() * a;
    Ok(sym_eigenvalues(&gram)?
        .first()
        .copied()
        .unwrap_or(S::zero())
        .max(S::zero())
        .sqrt())
}

/// Symmetric positive definite square root `P` with `P² = Q`.
pub fn spd_sqrt<S: Real>(q: &Matrix<S>) -> Result<Matrix<S>> {
    let n = q.require_square("square root input")?;
    let asym = q.try_sub(&q.transpose())?.max_abs();
    if asym > S::tol(1e-12) * q.max_abs().max(S::one()) {
        return Err(Error::NotPositiveDefinite("matrix is not symmetric".into()));
    }
    let eig = sym_eigen(q)?;
    let smallest = eig.values.last().copied().unwrap_or(S::zero());
    if smallest <= S::zero() {
        return Err(Error::NotPositiveDefinite(format!(
            "smallest eigenvalue {smallest}"
        )));
    }
    let roots: Vec<S> = eig.values.iter().map(|l| l.sqrt()).collect();
    let v = &eig.vectors;
    Ok(Matrix::from_fn(n, n, |i, j| {
        (0..n).map(|l| v[(i, l)] * roots[l] * v[(j, l)]).sum()
    }))
}

fn sign_of<S: Real>(a: S, b: S) -> S {
    if b >= S::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Reduces to upper Hessenberg form by stabilized elementary similarity transforms.
fn hessenberg<S: Real>(a: &mut Matrix<S>) {
    let n = a.rows();
    for m in 1..n.saturating_sub(1) {
        let mut x = S::zero();
        let mut i = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..n {
                let t = a[(i, j)];
                a[(i, j)] = a[(m, j)];
                a[(m, j)] = t;
            }
            for j in 0..n {
                let t = a[(j, i)];
                a[(j, i)] = a[(j, m)];
                a[(j, m)] = t;
            }
        }
        if x != S::zero() {
            for i in (m + 1)..n {
                let mut y = a[(i, m - 1)];
                if y != S::zero() {
                    y = y / x;
                    a[(i, m - 1)] = y;
                    for j in m..n {
                        a[(i, j)] = a[(i, j)] - y * a[(m, j)];
                    }
                    for j in 0..n {
                        a[(j, m)] = a[(j, m)] + y * a[(j, i)];
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[(i, j)] = S::zero();
        }
    }
}

/// Eigenvalues of a general real matrix: Hessenberg reduction followed by
/// Francis double-shift QR iteration. Order is unspecified.
pub fn eigenvalues<S: Real>(a: &Matrix<S>) -> Result<Vec<Complex<S>>> {
    const MAX_ITS: usize = 60;
    let n = a.require_square("eigenvalue input")?;
    let mut h = a.clone();
    hessenberg(&mut h);
    let mut wr = vec![S::zero(); n];
    let mut wi = vec![S::zero(); n];
    let eps = S::epsilon();
    let mut anorm = S::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm = anorm + h[(i, j)].abs();
        }
    }
    let (half, three_q, c4375) = (S::lit(0.5), S::lit(0.75), S::lit(0.4375));
    let mut nn = n as isize - 1;
    let mut t = S::zero();
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
                if s == S::zero() {
                    s = anorm;
                }
                if h[(l, l - 1)].abs() <= eps * s {
                    h[(l, l - 1)] = S::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = h[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = S::zero();
                nn -= 1;
                break;
            }
            let mut y = h[(nu - 1, nu - 1)];
            let mut w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            if l == nu - 1 {
                let p = half * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x = x + t;
                if q >= S::zero() {
                    let z = p + sign_of(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != S::zero() {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = S::zero();
                    wi[nu] = S::zero();
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = z;
                    wi[nu] = -z;
                }
                nn -= 2;
                break;
            }
            if its == MAX_ITS {
                return Err(Error::NoConvergence("shifted QR iteration".into()));
            }
            if its == 10 || its == 20 || its == 40 {
                // exceptional shift
                t = t + x;
                for i in 0..=nu {
                    h[(i, i)] = h[(i, i)] - x;
                }
                let s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = three_q * s;
                y = x;
                w = -c4375 * s * s;
            }
            its += 1;
            let (mut p, mut q, mut r, mut z);
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                let u = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..(nu - 1) {
                h[(i + 2, i)] = S::zero();
                if i != m {
                    h[(i + 2, i - 1)] = S::zero();
                }
            }
            for k in m..nu {
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = S::zero();
                    if k + 1 != nu {
                        r = h[(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != S::zero() {
                        p = p / x;
                        q = q / x;
                        r = r / x;
                    }
                }
                let s = sign_of((p * p + q * q + r * r).sqrt(), p);
                if s != S::zero() {
                    if k == m {
                        if l != m {
                            h[(k, k - 1)] = -h[(k, k - 1)];
                        }
                    } else {
                        h[(k, k - 1)] = -s * x;
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q = q / p;
                    r = r / p;
                    for j in k..=nu {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if k + 1 != nu {
                            p = p + r * h[(k + 2, j)];
                            h[(k + 2, j)] = h[(k + 2, j)] - p * z;
                        }
                        h[(k + 1, j)] = h[(k + 1, j)] - p * y;
                        h[(k, j)] = h[(k, j)] - p * x;
                    }
                    let mmin = nu.min(k + 3);
                    for i in l..=mmin {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if k + 1 != nu {
                            p = p + z * h[(i, k + 2)];
                            h[(i, k + 2)] = h[(i, k + 2)] - p * r;
                        }
                        h[(i, k + 1)] = h[(i, k + 1)] - p * q;
                        h[(i, k)] = h[(i, k)] - p;
                    }
                }
            }
            if l + 1 >= nu {
                break;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex::new(re, im)).collect())
}

/// Largest real part of the spectrum (spectral abscissa).
pub fn spectral_abscissa<S: Real>(a: &Matrix<S>) -> Result<S> {
    Ok(eigenvalues(a)?
        .iter()
        .fold(S::neg_infinity(), |m, z| m.max(z.re)))
}

/// Direct spectral test: every eigenvalue in the open left half plane.
pub fn is_hurwitz<S: Real>(a: &Matrix<S>) -> Result<bool> {
    Ok(spectral_abscissa(a)? < S::zero())
}

/// Matrix exponential by scaling and squaring with a diagonal [8/8] Padé approximant.
/// The scaling brings `‖A‖∞` below 1/2.
pub fn expm<S: Real>(a: &Matrix<S>) -> Result<Matrix<S>> {
    const DEGREE: usize = 8;
    let n = a.require_square("exponential input")?;
    let norm = a.norm_inf();
    let mut squarings = 0i32;
    if norm > S::lit(0.5) {
        squarings = (norm / S::lit(0.5)).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let x = a.scale(S::lit(2.0).powi(-squarings));
    let mut c = S::one();
    let mut power = Matrix::identity(n);
    let mut num = Matrix::identity(n);
    let mut den = Matrix::identity(n);
    for j in 1..=DEGREE {
        c = c * S::of_usize(DEGREE - j + 1) / S::of_usize(j * (2 * DEGREE - j + 1));
        power = &power * &x;
        let term = power.scale(c);
        num = &num + &term;
        den = if j % 2 == 0 { &den + &term } else { &den - &term };
    }
    let mut e = &inverse(&den)? * &num;
    for _ in 0..squarings {
        e = &e * &e;
    }
    Ok(e)
}
