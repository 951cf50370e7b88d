//! Dense linear algebra kernels used by the QP solver.
//!
//! Everything here operates on `ndarray` types and is sized for the
//! problems this crate solves (a few hundred unknowns), so plain
//! partial-pivot LU and Gram-Schmidt are adequate.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// LU factorization with partial pivoting.
pub struct Lu {
    lu: Array2<f64>,
    piv: Vec<usize>,
    n: usize,
}

impl Lu {
    /// Factor a square matrix. Fails when a pivot falls below
    /// `tol * max_abs_entry`, i.e. the matrix is numerically singular.
    pub fn factor(a: &ArrayView2<f64>) -> Result<Lu> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                n,
                a.ncols()
            )));
        }
        let mut lu = a.to_owned();
        let mut piv = Vec::with_capacity(n);
        let scale = lu.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let tol = 1e-13 * scale;
        for k in 0..n {
            // partial pivot
            let mut p = k;
            let mut best = lu[[k, k]].abs();
            for i in (k + 1)..n {
                let v = lu[[i, k]].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tol {
                return Err(Error::Singular(format!("pivot {best:.3e} at column {k}")));
            }
            if p != k {
                for j in 0..n {
                    lu.swap([k, j], [p, j]);
                }
            }
            piv.push(p);
            let pivot = lu[[k, k]];
            for i in (k + 1)..n {
                let m = lu[[i, k]] / pivot;
                lu[[i, k]] = m;
                if m != 0.0 {
                    for j in (k + 1)..n {
                        lu[[i, j]] -= m * lu[[k, j]];
                    }
                }
            }
        }
        Ok(Lu { lu, piv, n })
    }

    pub fn solve(&self, b: &ArrayView1<f64>) -> Array1<f64> {
        let n = self.n;
        let mut x = b.to_owned();
        // The factorization swaps full rows (multiplier columns included), so
        // all interchanges must be applied to the right-hand side before the
        // triangular solves - they cannot be interleaved with elimination.
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
        }
        for k in 0..n {
            let xk = x[k];
            if xk != 0.0 {
                for i in (k + 1)..n {
                    x[i] -= self.lu[[i, k]] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in (k + 1)..n {
                s -= self.lu[[k, j]] * x[j];
            }
            x[k] = s / self.lu[[k, k]];
        }
        x
    }
}

/// Solve `A x = b` for a square `A`.
pub fn solve(a: &ArrayView2<f64>, b: &ArrayView1<f64>) -> Result<Array1<f64>> {
    Ok(Lu::factor(a)?.solve(b))
}

/// Indices of a maximal linearly independent subset of the rows of `a`,
/// found by modified Gram-Schmidt with relative tolerance `tol_rel`.
pub fn independent_rows(a: &ArrayView2<f64>, tol_rel: f64) -> Vec<usize> {
    let mut basis: Vec<Array1<f64>> = Vec::new();
    let mut keep = Vec::new();
    for (i, row) in a.rows().into_iter().enumerate() {
        let norm0 = norm2(&row);
        if norm0 <= 0.0 {
            continue;
        }
        let mut v = row.to_owned();
        for q in &basis {
            let c = q.dot(&v);
            v.scaled_add(-c, q);
        }
        // re-orthogonalize once for stability
        for q in &basis {
            let c = q.dot(&v);
            v.scaled_add(-c, q);
        }
        let norm = norm2(&v.view());
        if norm > tol_rel * norm0 {
            v.mapv_inplace(|x| x / norm);
            basis.push(v);
            keep.push(i);
        }
    }
    keep
}

/// Orthonormal basis for the nullspace of `a` (columns z with a·z = 0),
/// via Gram-Schmidt against the row space.
pub fn nullspace(a: &ArrayView2<f64>, tol_rel: f64) -> Array2<f64> {
    let p = a.ncols();
    let mut row_basis: Vec<Array1<f64>> = Vec::new();
    for row in a.rows() {
        let norm0 = norm2(&row);
        if norm0 <= 0.0 {
            continue;
        }
        let mut v = row.to_owned();
        for q in &row_basis {
            let c = q.dot(&v);
            v.scaled_add(-c, q);
        }
        let norm = norm2(&v.view());
        if norm > tol_rel * norm0 {
            v.mapv_inplace(|x| x / norm);
            row_basis.push(v);
        }
    }
    let mut null_basis: Vec<Array1<f64>> = Vec::new();
    for j in 0..p {
        let mut v = Array1::zeros(p);
        v[j] = 1.0;
        for q in &row_basis {
            let c = q.dot(&v);
            v.scaled_add(-c, q);
        }
        for q in &null_basis {
            let c = q.dot(&v);
            v.scaled_add(-c, q);
        }
        let norm = norm2(&v.view());
        if norm > 1e-10 {
            v.mapv_inplace(|x| x / norm);
            null_basis.push(v);
        }
    }
    let mut z = Array2::zeros((p, null_basis.len()));
    for (k, v) in null_basis.iter().enumerate() {
        z.column_mut(k).assign(v);
    }
    z
}

pub fn norm2(v: &ArrayView1<f64>) -> f64 {
    v.dot(v).sqrt()
}

pub fn norm_inf(v: &ArrayView1<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
