//! Rank, null spaces and subspace projections.

use serde::{Deserialize, Serialize};

use super::matrix::{dot, norm2, Matrix, Vector};
use crate::error::{Error, Result};

/// Pivot threshold `abs + rel * max|entry|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs >= 0.0 && rel >= 0.0) || (abs == 0.0 && rel == 0.0) {
            return Err(Error::Domain(format!(
                "invalid tolerance abs={abs} rel={rel}"
            )));
        }
        Ok(Tolerance { abs, rel })
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 0.0,
            rel: 1e-9,
        }
    }
}

/// Gaussian elimination with partial pivoting down to reduced row echelon form.
/// Returns the rank and a null-space basis with one vector per free column.
pub fn rank_and_kernel(m: &Matrix, tol: Tolerance) -> (usize, Vec<Vector>) {
    let (rows, cols) = (m.rows(), m.cols());
    let thr = tol.threshold(m.max_abs());
    let mut a = m.clone();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows)
            .max_by(|&x, &y| a[(x, c)].abs().total_cmp(&a[(y, c)].abs()))
            .unwrap();
        if a[(p, c)].abs() <= thr {
            for i in r..rows {
                a[(i, c)] = 0.0;
            }
            continue;
        }
        if p != r {
            for j in 0..cols {
                let t = a[(p, j)];
                a[(p, j)] = a[(r, j)];
                a[(r, j)] = t;
            }
        }
        let piv = a[(r, c)];
        for j in c..cols {
            a[(r, j)] /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in c..cols {
                        a[(i, j)] -= f * a[(r, j)];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    let mut kernel = Vec::new();
    let mut pi = 0;
    for f in 0..cols {
        if pi < pivots.len() && pivots[pi] == f {
            pi += 1;
            continue;
        }
        let mut v = vec![0.0; cols];
        v[f] = 1.0;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[(row, f)];
        }
        kernel.push(v);
    }
    (rank, kernel)
}

pub fn rank(m: &Matrix, tol: Tolerance) -> usize {
    rank_and_kernel(m, tol).0
}

/// Orthonormal basis of the span of `vectors` by modified Gram–Schmidt with
/// re-orthogonalization; vectors whose remainder falls below `rel * max norm`
/// are dropped.
pub fn orthonormal_basis(vectors: &[Vector], rel: f64) -> Vec<Vector> {
    let scale = vectors.iter().map(|v| norm2(v)).fold(0.0, f64::max);
    let mut q: Vec<Vector> = Vec::new();
    if scale == 0.0 {
        return q;
    }
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &q {
                let c = dot(&w, b);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let n = norm2(&w);
        if n > rel * scale {
            q.push(w.iter().map(|x| x / n).collect());
        }
    }
    q
}

/// Component of `v` orthogonal to the span of the orthonormal set `q`.
pub fn project_out(v: &[f64], q: &[Vector]) -> Vector {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in q {
            let c = dot(&w, b);
            for (x, y) in w.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    w
}

/// Least-squares distance from `v` to the span of `q` (orthonormal).
pub fn projection_residual(v: &[f64], q: &[Vector]) -> f64 {
    norm2(&project_out(v, q))
}

/// Least-squares solution of `a x = b` via normal equations on the
/// column space; returns `x` and the residual norm.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Result<(Vector, f64)> {
    let at = a.transpose();
    let ata = &at * a;
    let rhs = at.matvec(b);
    let x = ata.solve(&rhs)?;
    let r = norm2(&super::matrix::sub(&a.matvec(&x), b));
    Ok((x, r))
}

/// Basis of the column space, as an orthonormal set.
pub fn column_space(m: &Matrix, rel: f64) -> Vec<Vector> {
    let cols: Vec<Vector> = (0..m.cols()).map(|j| m.column(j)).collect();
    orthonormal_basis(&cols, rel)
}
