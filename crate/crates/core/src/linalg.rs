//! Small dense helpers shared by the subgroup code. Sizes are at most 2d ≤ 8.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) fn columns<T: Real>(n: usize, cols: &[DVector<T>]) -> DMatrix<T> {
    let mut m = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Thin SVD by one-sided Jacobi rotations: `a = U diag(s) Vᵀ`, s descending, columns of U
/// with zero singular value left at zero. nalgebra's bidiagonal SVD returned wrong left
/// vectors for exactly rank-deficient inputs (two equal columns), which the subgroup code
/// produces routinely.
pub(crate) struct Svd<T: Real> {
    pub u: DMatrix<T>,
    pub s: Vec<T>,
    pub v: DMatrix<T>,
}

pub(crate) fn svd<T: Real>(a: &DMatrix<T>) -> Svd<T> {
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.transpose());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let mut w = a.clone();
    let mut v = DMatrix::<T>::identity(n, n);
    let eps = T::eps();
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let sgn = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sgn / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let sn = c * t;
                for mat in [&mut w, &mut v] {
                    for i in 0..mat.nrows() {
                        let (x, y) = (mat[(i, p)], mat[(i, q)]);
                        mat[(i, p)] = c * x - sn * y;
                        mat[(i, q)] = sn * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(T, usize)> = (0..n).map(|j| (w.column(j).norm(), j)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let mut u = DMatrix::zeros(m, n);
    let mut vs = DMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, (sk, j)) in order.into_iter().enumerate() {
        if sk > T::zero() {
            u.set_column(k, &(w.column(j) / sk));
        }
        vs.set_column(k, &v.column(j));
        s.push(sk);
    }
    Svd { u, s, v: vs }
}

pub(crate) fn singular_values<T: Real>(a: &DMatrix<T>) -> Vec<T> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return vec![];
    }
    svd(a).s
}

/// Numerical rank with threshold `tol * max(1, σ_max)`.
pub(crate) fn rank<T: Real>(a: &DMatrix<T>, tol: T) -> usize {
    let s = singular_values(a);
    let cut = tol * s.first().copied().unwrap_or(T::one()).max(T::one());
    s.iter().filter(|v| **v > cut).count()
}

/// σ_max / σ_min over the columns; infinite when a column is dependent.
pub(crate) fn condition<T: Real>(a: &DMatrix<T>) -> T {
    let s = singular_values(a);
    if s.is_empty() {
        return T::one();
    }
    let lo = *s.last().unwrap();
    if s.len() < a.ncols() || lo <= T::zero() {
        return T::lit(f64::INFINITY);
    }
    s[0] / lo
}

/// Orthonormal basis of the column span of `a` (numerical rank `tol`).
pub(crate) fn orthonormal_span<T: Real>(a: &DMatrix<T>, tol: T) -> DMatrix<T> {
    let n = a.nrows();
    if a.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let d = svd(a);
    let cut = tol * d.s.first().copied().unwrap_or(T::zero()).max(T::one());
    let k = d.s.iter().filter(|v| **v > cut).count();
    d.u.columns(0, k).into_owned()
}

/// Orthonormal basis of the Euclidean complement of the span of the orthonormal columns `q`.
pub(crate) fn orthonormal_complement<T: Real>(q: &DMatrix<T>, n: usize) -> DMatrix<T> {
    let p = DMatrix::<T>::identity(n, n) - q * q.transpose();
    let eig = SymmetricEigen::new(p);
    let half = T::lit(0.5);
    let mut idx: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > half).collect();
    idx.sort();
    let mut out = DMatrix::zeros(n, idx.len());
    for (j, &i) in idx.iter().enumerate() {
        out.set_column(j, &eig.eigenvectors.column(i));
    }
    // deterministic signs: first entry of largest magnitude positive
    for j in 0..out.ncols() {
        let mut best = 0;
        for i in 0..n {
            if out[(i, j)].abs() > out[(best, j)].abs() + T::lit(1e-12) {
                best = i;
            }
        }
        if out[(best, j)] < T::zero() {
            let c = -out.column(j);
            out.set_column(j, &c);
        }
    }
    out
}

/// Orthonormal basis of ker(a) as columns.
pub(crate) fn null_space<T: Real>(a: &DMatrix<T>, tol: T) -> DMatrix<T> {
    let k = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(k, k);
    }
    let row_space = orthonormal_span(&a.transpose(), tol);
    orthonormal_complement(&row_space, k)
}

/// Moore–Penrose pseudo-inverse.
pub(crate) fn pinv<T: Real>(a: &DMatrix<T>, tol: T) -> Result<DMatrix<T>> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(DMatrix::zeros(a.ncols(), a.nrows()));
    }
    let d = svd(a);
    let cut = tol * d.s.first().copied().unwrap_or(T::zero()).max(T::one());
    let mut out = DMatrix::zeros(a.ncols(), a.nrows());
    for (k, sk) in d.s.iter().enumerate() {
        if *sk > cut {
            out += d.v.column(k) * d.u.column(k).transpose() / *sk;
        }
    }
    Ok(out)
}

/// Projection of `v` onto the complement of the orthonormal columns `q`.
pub(crate) fn project_out<T: Real>(q: &DMatrix<T>, v: &DVector<T>) -> DVector<T> {
    if q.ncols() == 0 {
        return v.clone();
    }
    v - q * (q.transpose() * v)
}

/// Basis (r columns) of the Z-module spanned by the integer columns of an r×n matrix of rank r.
/// Column-style Hermite reduction with Euclid steps.
pub(crate) fn integer_column_basis(m: &[Vec<i64>], r: usize) -> Result<Vec<Vec<i64>>> {
    let mut cols: Vec<Vec<i64>> = m.to_vec();
    let ncols = cols.len();
    let mut pivot_col = 0;
    for row in 0..r {
        if pivot_col >= ncols {
            return Err(Error::NotClosed("integer relation matrix has deficient rank".into()));
        }
        loop {
            // smallest nonzero |entry| in this row among remaining columns
            let mut best: Option<usize> = None;
            for j in pivot_col..ncols {
                let v = cols[j][row];
                if v != 0 && best.map_or(true, |b| v.abs() < cols[b][row].abs()) {
                    best = Some(j);
                }
            }
            let b = match best {
                Some(b) => b,
                None => return Err(Error::NotClosed("integer relation matrix has deficient rank".into())),
            };
            cols.swap(pivot_col, b);
            let p = cols[pivot_col][row];
            let mut done = true;
            for j in pivot_col + 1..ncols {
                let v = cols[j][row];
                if v == 0 {
                    continue;
                }
                let q = v.div_euclid(p);
                for i in 0..r {
                    let prod = q.checked_mul(cols[pivot_col][i]).ok_or(Error::Overflow)?;
                    cols[j][i] = cols[j][i].checked_sub(prod).ok_or(Error::Overflow)?;
                }
                if cols[j][row] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        pivot_col += 1;
    }
    Ok(cols.into_iter().take(r).collect())
}
