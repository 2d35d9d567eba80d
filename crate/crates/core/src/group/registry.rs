//! Built-in matrix groups and analytic group operators.

use std::sync::Arc;

use super::{Conjugation, Embedding, GroupAction, GroupMap, GroupRbo, MatrixGroup, TrivialAction};
use crate::error::{Error, Result};
use crate::lie::{labelled_basis, parse_family};
use crate::linalg::Matrix;

pub const OPERATOR_NAMES: &[&str] = &[
    "euclidean(n)",
    "up2",
    "gl_block(p,q)",
    "gauss(n)",
    "so3_inverse",
    "trivial",
];

/// Group generated by a registry algebra: `so3`, `so(n)`, `up2`, `line`,
/// `euclidean(n)`, `gl(n)`, `gl_block(p,q)`, `abelian(n)`.
pub fn group_by_name(name: &str) -> Result<MatrixGroup> {
    let (basis, labels) = labelled_basis(name)?;
    let n = basis.first().map(Matrix::rows).unwrap_or(0);
    MatrixGroup::new(name.trim(), n, basis, labels)
}

/// `[[A, α], [0, 1]]`
pub fn euclidean_element(a: &Matrix, alpha: &[f64]) -> Matrix {
    let n = a.rows();
    let mut m = Matrix::identity(n + 1);
    m.set_block(0, 0, a);
    for (i, v) in alpha.iter().enumerate() {
        m[(i, n)] = *v;
    }
    m
}

/// Inverse of [`euclidean_element`].
pub fn euclidean_parts(m: &Matrix) -> (Matrix, Vec<f64>) {
    let n = m.rows() - 1;
    (m.block(0, 0, n, n), (0..n).map(|i| m[(i, n)]).collect())
}

/// `g = N₊ D N₋` with `N₊` upper and `N₋` lower unipotent. Runs Doolittle
/// elimination on the index-reversed matrix.
pub fn gauss_factor(g: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let n = g.rows();
    let r = |i: usize| n - 1 - i;
    // a = J g J
    let mut a = Matrix::from_fn(n, n, |i, j| g[(r(i), r(j))]);
    let mut l = Matrix::identity(n);
    for k in 0..n {
        let p = a[(k, k)];
        if p.abs() < 1e-14 * g.max_abs().max(1.0) {
            return Err(Error::Domain(
                "leading minor vanishes; no Gauss factorization".into(),
            ));
        }
        for i in k + 1..n {
            let f = a[(i, k)] / p;
            l[(i, k)] = f;
            for j in k..n {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    // J g J = L·D·U with U = D⁻¹·a
    let d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let u = Matrix::from_fn(n, n, |i, j| a[(i, j)] / d[i]);
    let flip = |m: &Matrix| Matrix::from_fn(n, n, |i, j| m[(r(i), r(j))]);
    let d = (0..n).map(|i| d[r(i)]).collect();
    Ok((flip(&l), d, flip(&u)))
}

fn adjoint_operator(name: &str, group: MatrixGroup, map: GroupMap, radius: f64) -> GroupRbo {
    let n = group.ambient_dim();
    GroupRbo {
        name: name.into(),
        g: group.clone(),
        h: group,
        action: Arc::new(Conjugation::adjoint(n)),
        map,
        domain_radius: radius,
    }
}

/// `𝓑 ≡ e_G` for any pair of groups and action.
pub fn trivial_operator(g: MatrixGroup, h: MatrixGroup, action: Arc<dyn GroupAction>) -> GroupRbo {
    let e = g.identity();
    GroupRbo {
        name: "trivial".into(),
        g,
        h,
        action,
        map: Arc::new(move |_| Ok(e.clone())),
        domain_radius: f64::INFINITY,
    }
}

/// Analytic operators:
/// - `euclidean(n)`: `𝓑(A, α) = (I, −Aᵀα)` on `E(n)` with conjugation
/// - `up2`: `𝓑(r) = unipotent(r)` from the line into `UP(2)` with the scaling action
/// - `gl_block(p,q)`: `𝓑([[P, Q], [R, S]]) = [[I, 0], [−S⁻¹R, I]]` on `GL(p+q)`
/// - `gauss(n)`: `𝓑(N₊DN₋) = N₋⁻¹D^{−1/2}` on `GL(n)`, local
/// - `so3_inverse`: `𝓑(h) = h⁻¹` on `SO(3)`
/// - `trivial`: `𝓑 ≡ e` on `SO(3)` with the trivial action
pub fn operator_by_name(name: &str) -> Result<GroupRbo> {
    let name = name.trim();
    match name {
        "trivial" => {
            let g = group_by_name("so3")?;
            return Ok(trivial_operator(g.clone(), g, Arc::new(TrivialAction)));
        }
        "so3_inverse" => {
            let g = group_by_name("so3")?;
            return Ok(adjoint_operator(
                name,
                g,
                Arc::new(|h: &Matrix| h.inverse()),
                f64::INFINITY,
            ));
        }
        "up2" => {
            return Ok(GroupRbo {
                name: name.into(),
                g: group_by_name("up2")?,
                h: group_by_name("line")?,
                action: Arc::new(Conjugation {
                    embedding: Embedding::TopLeftScalar,
                    target_dim: 2,
                }),
                map: Arc::new(|h: &Matrix| Ok(h.clone())),
                domain_radius: f64::INFINITY,
            });
        }
        _ => {}
    }
    let (family, params) = parse_family(name)?;
    match (family.as_str(), params.as_slice()) {
        ("euclidean", [n]) if *n >= 1 => {
            let map: GroupMap = Arc::new(|m: &Matrix| {
                let (a, alpha) = euclidean_parts(m);
                let beta: Vec<f64> = a.transpose().matvec(&alpha).iter().map(|v| -v).collect();
                Ok(euclidean_element(&Matrix::identity(a.rows()), &beta))
            });
            Ok(adjoint_operator(
                name,
                group_by_name(name)?,
                map,
                f64::INFINITY,
            ))
        }
        ("gl_block", [p, q]) if *p >= 1 && *q >= 1 => {
            let (p, q) = (*p, *q);
            let map: GroupMap = Arc::new(move |g: &Matrix| {
                let r = g.block(p, 0, q, p);
                let s = g.block(p, p, q, q);
                let sr = &s
                    .inverse()
                    .map_err(|_| Error::Domain("lower-right block is singular".into()))?
                    * &r;
                let mut out = Matrix::identity(p + q);
                out.set_block(p, 0, &sr.scale(-1.0));
                Ok(out)
            });
            Ok(adjoint_operator(
                name,
                group_by_name(name)?,
                map,
                f64::INFINITY,
            ))
        }
        ("gauss", [n]) if *n >= 1 => {
            let map: GroupMap = Arc::new(|g: &Matrix| {
                let (_, d, lower) = gauss_factor(g)?;
                if d.iter().any(|v| *v <= 0.0) {
                    return Err(Error::Domain("diagonal factor is not positive".into()));
                }
                let dh: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
                Ok(&lower.inverse()? * &Matrix::diag(&dh))
            });
            // leading minors stay positive on this log-ball
            Ok(adjoint_operator(
                name,
                group_by_name(&format!("gl({n})"))?,
                map,
                0.5,
            ))
        }
        _ => Err(Error::Parse(format!(
            "unknown operator {name:?}; known: {}",
            OPERATOR_NAMES.join(", ")
        ))),
    }
}
