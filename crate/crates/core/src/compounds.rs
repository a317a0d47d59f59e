//! Minors, multiplicative and additive compounds, and parallelotope volumes.
//!
//! Rows and columns of a compound are indexed by `Q(k, n)` in lexicographic
//! order, so entry `(rank(α) - 1, rank(β) - 1)` of the multiplicative compound
//! is the minor `A(α|β)`.

use crate::error::{domain, Result};
use crate::lexidx::{binomial, rank_entries, IndexSeq, Sequences, MAX_N};
use crate::linalg::{inverse, Lu};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Largest accepted compound dimension `C(n, k)`.
pub const MAX_COMPOUND_DIM: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompoundKind {
    Multiplicative,
    Additive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompoundMatrix<S> {
    base_dims: (usize, usize),
    k: usize,
    kind: CompoundKind,
    mat: Matrix<S>,
}

impl<S: Real> CompoundMatrix<S> {
    pub fn base_dims(&self) -> (usize, usize) {
        self.base_dims
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> CompoundKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.mat
    }
}

/// Validates `k` against an `n x m` base and returns `(C(n,k), C(m,k))`.
fn compound_dims(n: usize, m: usize, k: usize) -> Result<(usize, usize)> {
    if n.max(m) > MAX_N {
        return Err(domain(format!("dimension {} exceeds {MAX_N}", n.max(m))));
    }
    if k == 0 || k > n.min(m) {
        return Err(domain(format!("k = {k} outside 1..={}", n.min(m))));
    }
    let (r, c) = (binomial(n, k), binomial(m, k));
    if r.max(c) > MAX_COMPOUND_DIM {
        return Err(domain(format!(
            "compound dimension {} exceeds {MAX_COMPOUND_DIM}",
            r.max(c)
        )));
    }
    Ok((r as usize, c as usize))
}

/// Determinant of the submatrix on 0-based `rows` and `cols` (same length).
pub(crate) fn minor_raw<S: Real>(a: &Matrix<S>, rows: &[usize], cols: &[usize]) -> S {
    let e = |i: usize, j: usize| a[(rows[i], cols[j])];
    match rows.len() {
        1 => e(0, 0),
        2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
        3 => {
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
        _ => Lu::new(&a.select(rows, cols))
            .map(|lu| lu.det())
            .expect("square submatrix"),
    }
}

/// `A(α|β) = det A[α|β]`.
pub fn minor<S: Real>(a: &Matrix<S>, alpha: &IndexSeq, beta: &IndexSeq) -> Result<S> {
    if alpha.k() != beta.k() {
        return Err(domain(format!(
            "row and column sequences have lengths {} and {}",
            alpha.k(),
            beta.k()
        )));
    }
    if alpha.entries().last().is_some_and(|&i| i > a.rows())
        || beta.entries().last().is_some_and(|&j| j > a.cols())
    {
        return Err(domain(format!(
            "indices {alpha} / {beta} out of range for a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let rows: Vec<usize> = alpha.zero_based().collect();
    let cols: Vec<usize> = beta.zero_based().collect();
    Ok(minor_raw(a, &rows, &cols))
}

fn zero_based_table(k: usize, n: usize) -> Vec<Vec<usize>> {
    Sequences::unchecked(k, n)
        .map(|s| s.zero_based().collect())
        .collect()
}

/// The k-multiplicative compound: all k-minors in lexicographic order.
pub fn multiplicative_compound<S: Real>(a: &Matrix<S>, k: usize) -> Result<CompoundMatrix<S>> {
    let (n, m) = a.dims();
    compound_dims(n, m, k)?;
    let row_sets = zero_based_table(k, n);
    let col_sets = zero_based_table(k, m);
    let mat = Matrix::from_fn(row_sets.len(), col_sets.len(), |i, j| {
        minor_raw(a, &row_sets[i], &col_sets[j])
    });
    Ok(CompoundMatrix {
        base_dims: (n, m),
        k,
        kind: CompoundKind::Multiplicative,
        mat,
    })
}

/// The k-additive compound, built entry by entry: diagonal entries are sums of
/// the selected diagonal of `A`, entries whose index sets differ in exactly one
/// position carry a signed entry of `A`, everything else is zero.
pub fn additive_compound<S: Real>(a: &Matrix<S>, k: usize) -> Result<CompoundMatrix<S>> {
    let n = a.require_square("additive compound input")?;
    let (r, _) = compound_dims(n, n, k)?;
    let mut mat = Matrix::zeros(r, r);
    let mut beta = vec![0usize; k];
    for (row, alpha) in Sequences::unchecked(k, n).enumerate() {
        let alpha = alpha.entries();
        mat[(row, row)] = alpha.iter().map(|&i| a[(i - 1, i - 1)]).sum();
        for (l, &il) in alpha.iter().enumerate() {
            for j in (1..=n).filter(|j| alpha.binary_search(j).is_err()) {
                // β = α with i_l replaced by j, re-sorted; m is the slot j lands in
                let mut pos = 0;
                let mut m = 0;
                let mut placed = false;
                for &x in alpha.iter().filter(|&&x| x != il) {
                    if !placed && j < x {
                        beta[pos] = j;
                        m = pos;
                        pos += 1;
                        placed = true;
                    }
                    beta[pos] = x;
                    pos += 1;
                }
                if !placed {
                    beta[pos] = j;
                    m = pos;
                }
                let col = rank_entries(&beta, n) - 1;
                let v = a[(il - 1, j - 1)];
                mat[(row, col)] = if (l + m) % 2 == 0 { v } else { -v };
            }
        }
    }
    Ok(CompoundMatrix {
        base_dims: (n, n),
        k,
        kind: CompoundKind::Additive,
        mat,
    })
}

/// Volume of the parallelotope spanned by `k` vectors in `R^n`: the Euclidean
/// norm of the k-compound of the `n x k` matrix holding them as columns.
pub fn parallelotope_volume<S: Real, V: AsRef<[S]>>(vectors: &[V]) -> Result<S> {
    let k = vectors.len();
    let n = vectors.first().map_or(0, |v| v.as_ref().len());
    if k == 0 || k > n {
        return Err(domain(format!("need 1..={n} vectors, got {k}")));
    }
    let x = Matrix::from_columns(vectors)?;
    Ok(multiplicative_compound(&x, k)?.matrix().frobenius())
}

/// `T^(k) A^[k] (T^(k))⁻¹`, which equals `(T A T⁻¹)^[k]`.
pub fn apply_similarity_compound<S: Real>(
    t: &Matrix<S>,
    a: &Matrix<S>,
    k: usize,
) -> Result<Matrix<S>> {
    let n = a.require_square("A")?;
    if t.dims() != (n, n) {
        return Err(crate::error::dimension(format!(
            "T is {}x{}, A is {n}x{n}",
            t.rows(),
            t.cols()
        )));
    }
    let t_inv = inverse(t)?;
    similarity_compound(t, &t_inv, a, k)
}

/// Same as [`apply_similarity_compound`] with the inverse already at hand;
/// uses `(T^(k))⁻¹ = (T⁻¹)^(k)`.
pub(crate) fn similarity_compound<S: Real>(
    t: &Matrix<S>,
    t_inv: &Matrix<S>,
    a: &Matrix<S>,
    k: usize,
) -> Result<Matrix<S>> {
    let tk = multiplicative_compound(t, k)?.into_matrix();
    let tk_inv = multiplicative_compound(t_inv, k)?.into_matrix();
    let ak = additive_compound(a, k)?.into_matrix();
    Ok(&(&tk * &ak) * &tk_inv)
}
