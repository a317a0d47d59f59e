//! Oracles shared by the integration tests. Nothing here calls the compound,
//! eigenvalue or determinant code of the crate under test.
#![allow(dead_code)]

use kcompound::Matrix;
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn to_na(a: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

pub fn from_na(a: &DMatrix<f64>) -> Matrix<f64> {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub fn na_det(a: &Matrix<f64>) -> f64 {
    to_na(a).determinant()
}

pub fn na_eigenvalues(a: &Matrix<f64>) -> Vec<Complex<f64>> {
    to_na(a)
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex::new(z.re, z.im))
        .collect()
}

pub fn na_hurwitz(a: &Matrix<f64>) -> bool {
    na_eigenvalues(a).iter().all(|z| z.re < 0.0)
}

/// Symmetric eigenvalues, descending.
pub fn na_sym_eigenvalues(a: &Matrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(a).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.partial_cmp(x).unwrap());
    v
}

/// k-subsets of 0..n in lexicographic order.
pub fn combos(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, n, &mut Vec::new(), &mut out);
    out
}

/// Multiplicative compound from nalgebra determinants of submatrices.
pub fn compound_oracle(a: &Matrix<f64>, k: usize) -> Matrix<f64> {
    let rows = combos(k, a.rows());
    let cols = combos(k, a.cols());
    let na = to_na(a);
    Matrix::from_fn(rows.len(), cols.len(), |i, j| {
        DMatrix::from_fn(k, k, |r, c| na[(rows[i][r], cols[j][c])]).determinant()
    })
}

/// Central difference of `ε ↦ (I + εA)^(k)` at zero.
pub fn additive_fd_oracle(a: &Matrix<f64>, k: usize, h: f64) -> Matrix<f64> {
    let n = a.rows();
    let shifted = |e: f64| Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + e * a[(i, j)]);
    let plus = compound_oracle(&shifted(h), k);
    let minus = compound_oracle(&shifted(-h), k);
    Matrix::from_fn(plus.rows(), plus.cols(), |i, j| (plus[(i, j)] - minus[(i, j)]) / (2.0 * h))
}

/// Greedy matching distance between two multisets of complex numbers.
pub fn multiset_distance(got: &[Complex<f64>], want: &[Complex<f64>]) -> f64 {
    assert_eq!(got.len(), want.len());
    let mut used = vec![false; got.len()];
    let mut worst = 0.0f64;
    for w in want {
        let (idx, d) = got
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, g)| (i, (g - w).norm()))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        used[idx] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn binom(n: usize, k: usize) -> usize {
    combos(k, n).len()
}

pub fn max_abs_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    assert_eq!(a.dims(), b.dims());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Random invertible matrix with condition number kept moderate.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Matrix<f64> {
    loop {
        let t = Matrix::from_fn(n, n, |i, j| rng.gen_range(-1.0..1.0) + if i == j { 2.0 } else { 0.0 });
        if na_det(&t).abs() > 0.5 {
            return t;
        }
    }
}
