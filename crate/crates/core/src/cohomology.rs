//! The cochain complex `C^k(B) = Hom(∧^{k-1} h, g)` of an operator, its
//! cohomology, deformations and the cochain map of homomorphisms.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::LinearMap;
use crate::linalg::{
    basis_vector, column_space, max_abs, norm2, orthonormal_basis, projection_residual, rank,
    rank_and_kernel, sub, Matrix, Tolerance, Vector,
};
use crate::rbo::{
    check_mybe, check_rbo, from_modified_r, rbo_residual, ModifiedR, RelRbo, GATE_TOL,
};
use crate::report::{Check, Report};

/// Sorted `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim C^k = C(h, k-1) · dim g`
pub fn cochain_dim(h_dim: usize, g_dim: usize, k: usize) -> usize {
    if k == 0 {
        return 0;
    }
    binomial(h_dim, k - 1) * g_dim
}

/// Element of `C^k(B)`; coordinates indexed by (sorted tuple, g-coordinate)
/// with the g-coordinate fastest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cochain {
    pub k: usize,
    pub h_dim: usize,
    pub g_dim: usize,
    pub coords: Vector,
}

impl Cochain {
    pub fn new(k: usize, h_dim: usize, g_dim: usize, coords: Vector) -> Result<Self> {
        if k == 0 || coords.len() != cochain_dim(h_dim, g_dim, k) {
            return Err(Error::dim(format!(
                "cochain of degree {k} has {} coordinates",
                coords.len()
            )));
        }
        Ok(Cochain {
            k,
            h_dim,
            g_dim,
            coords,
        })
    }

    pub fn zeros(k: usize, h_dim: usize, g_dim: usize) -> Self {
        Cochain {
            k,
            h_dim,
            g_dim,
            coords: vec![0.0; cochain_dim(h_dim, g_dim, k)],
        }
    }

    /// The 2-cochain of a linear map `h → g`.
    pub fn from_operator(m: &Matrix) -> Self {
        let (gd, hd) = (m.rows(), m.cols());
        let mut coords = vec![0.0; hd * gd];
        for i in 0..hd {
            for a in 0..gd {
                coords[i * gd + a] = m[(a, i)];
            }
        }
        Cochain {
            k: 2,
            h_dim: hd,
            g_dim: gd,
            coords,
        }
    }

    /// Inverse of [`Cochain::from_operator`].
    pub fn to_operator(&self) -> Result<Matrix> {
        if self.k != 2 {
            return Err(Error::dim("only 2-cochains are linear maps"));
        }
        Ok(Matrix::from_fn(self.g_dim, self.h_dim, |a, i| {
            self.coords[i * self.g_dim + a]
        }))
    }

    /// Value on the sorted basis tuple with index `t` in lexicographic order.
    pub fn value_at(&self, t: usize) -> &[f64] {
        &self.coords[t * self.g_dim..(t + 1) * self.g_dim]
    }
}

/// Sign and sorted position of inserting `c` into the sorted tuple `rest`.
fn insert_sorted(c: usize, rest: &[usize]) -> Option<(Vec<usize>, f64)> {
    if rest.contains(&c) {
        return None;
    }
    let pos = rest.iter().take_while(|&&r| r < c).count();
    let mut t = rest.to_vec();
    t.insert(pos, c);
    Some((t, if pos % 2 == 0 { 1.0 } else { -1.0 }))
}

fn index_map(tuples: &[Vec<usize>]) -> HashMap<Vec<usize>, usize> {
    tuples
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect()
}

/// Matrix of `d: C^k → C^{k+1}` without the operator gate.
fn differential_unchecked(o: &RelRbo, k: usize) -> Matrix {
    let (gd, hd) = (o.g().dim(), o.h().dim());
    let src = combinations(hd, k.saturating_sub(1));
    let dst = combinations(hd, k);
    let (ncols, nrows) = (if k == 0 { 0 } else { src.len() * gd }, dst.len() * gd);
    if ncols == 0 || nrows == 0 {
        return Matrix::zeros(nrows, ncols);
    }
    let src_index = index_map(&src);
    let theta = o.theta_matrices();
    // descendent brackets of basis pairs, computed once
    let brackets: Vec<Vec<Vector>> = (0..hd)
        .map(|i| {
            (0..hd)
                .map(|j| o.descendent_bracket(&basis_vector(hd, i), &basis_vector(hd, j)))
                .collect()
        })
        .collect();

    let columns: Vec<Vector> = (0..ncols)
        .into_par_iter()
        .map(|col| {
            let (t_idx, a) = (col / gd, col % gd);
            let mut out = vec![0.0; nrows];
            for (row_t, u) in dst.iter().enumerate() {
                let dst_slot = &mut out[row_t * gd..(row_t + 1) * gd];
                // Σ_p (−1)^p θ(u_p) f(U \ u_p), p zero-based
                for p in 0..k {
                    let mut rest = u.clone();
                    let up = rest.remove(p);
                    if src_index.get(&rest) == Some(&t_idx) {
                        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                        let th = &theta[up];
                        for (b, slot) in dst_slot.iter_mut().enumerate() {
                            *slot += sign * th[(b, a)];
                        }
                    }
                }
                // Σ_{p<q} (−1)^{p+q} f([u_p,u_q]_B, U \ {u_p,u_q}), zero-based signs agree
                for p in 0..k {
                    for q in p + 1..k {
                        let rest: Vec<usize> = u
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| *i != p && *i != q)
                            .map(|(_, &x)| x)
                            .collect();
                        let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                        for (c, &coef) in brackets[u[p]][u[q]].iter().enumerate() {
                            if coef == 0.0 {
                                continue;
                            }
                            if let Some((t, s)) = insert_sorted(c, &rest) {
                                if src_index.get(&t) == Some(&t_idx) {
                                    dst_slot[a] += sign * s * coef;
                                }
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut m = Matrix::zeros(nrows, ncols);
    for (j, c) in columns.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Matrix of the Chevalley–Eilenberg differential `C^k(B) → C^{k+1}(B)` of the
/// descendent algebra with coefficients in `θ`.
pub fn differential_matrix(o: &RelRbo, k: usize) -> Result<Matrix> {
    if k == 0 {
        return Err(Error::Domain("cochain degrees start at 1".into()));
    }
    let res = rbo_residual(o);
    if res > GATE_TOL {
        return Err(Error::CheckFailed(format!(
            "operator identity residual {res:.3e}"
        )));
    }
    Ok(differential_unchecked(o, k))
}

/// Apply `d` to a cochain.
pub fn differential(o: &RelRbo, c: &Cochain) -> Result<Cochain> {
    let d = differential_matrix(o, c.k)?;
    Ok(Cochain {
        k: c.k + 1,
        h_dim: c.h_dim,
        g_dim: c.g_dim,
        coords: d.matvec(&c.coords),
    })
}

pub fn cohomology_dim(o: &RelRbo, k: usize, tol: Tolerance) -> Result<usize> {
    let dk = differential_matrix(o, k)?;
    let ker = dk.cols() - rank(&dk, tol);
    let im = if k >= 2 {
        rank(&differential_matrix(o, k - 1)?, tol)
    } else {
        0
    };
    Ok(ker.saturating_sub(im))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CohomologyRow {
    pub k: usize,
    pub dim_cochains: usize,
    pub rank_d: usize,
    pub dim_h: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CohomologyTable {
    pub rows: Vec<CohomologyRow>,
    /// `max_k ‖D_{k+1} D_k‖_max` over the computed range.
    pub dd_max: f64,
}

pub fn cohomology_table(o: &RelRbo, kmax: usize, tol: Tolerance) -> Result<CohomologyTable> {
    let mats: Vec<Matrix> = (1..=kmax + 1)
        .map(|k| differential_matrix(o, k))
        .collect::<Result<_>>()?;
    let ranks: Vec<usize> = mats.iter().map(|m| rank(m, tol)).collect();
    let mut rows = Vec::new();
    for k in 1..=kmax {
        let d = &mats[k - 1];
        let ker = d.cols() - ranks[k - 1];
        let im = if k >= 2 { ranks[k - 2] } else { 0 };
        rows.push(CohomologyRow {
            k,
            dim_cochains: d.cols(),
            rank_d: ranks[k - 1],
            dim_h: ker.saturating_sub(im),
        });
    }
    let dd_max = mats
        .windows(2)
        .map(|w| {
            if w[0].cols() == 0 || w[1].rows() == 0 {
                0.0
            } else {
                (&w[1] * &w[0]).max_abs()
            }
        })
        .fold(0.0, f64::max);
    Ok(CohomologyTable { rows, dd_max })
}

/// Candidate direction `B̂` of a one-parameter deformation `B + tB̂`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeformationDirection {
    pub bhat: Matrix,
}

/// Residual of `[B̂u,B̂v] = B̂(φ(B̂u)v − φ(B̂v)u)` over basis pairs.
pub fn weight_zero_residual(o: &RelRbo, bhat: &Matrix) -> f64 {
    max_abs(&weight_zero_vector(o, bhat))
}

fn weight_zero_vector(o: &RelRbo, bhat: &Matrix) -> Vector {
    let hd = o.h().dim();
    let mut out = Vec::new();
    for i in 0..hd {
        for j in i + 1..hd {
            let (u, v) = (basis_vector(hd, i), basis_vector(hd, j));
            let (bu, bv) = (bhat.matvec(&u), bhat.matvec(&v));
            let lhs = o.g().bracket(&bu, &bv);
            let inner = sub(&o.phi.act(&bu, &v), &o.phi.act(&bv, &u));
            out.extend(sub(&lhs, &bhat.matvec(&inner)));
        }
    }
    out
}

/// Sample parameters used to confirm exactness in `t`.
pub const DEFORMATION_TS: [f64; 4] = [1.0, -1.0, 0.5, -0.5];

pub fn check_deformation(o: &RelRbo, d: &DeformationDirection, tol: f64) -> Report {
    let mut r = Report::new("deformation");
    if d.bhat.rows() != o.g().dim() || d.bhat.cols() != o.h().dim() {
        r.push(Check::verdict("shape", false));
        return r;
    }
    r.check(
        "weight-zero identity",
        weight_zero_residual(o, &d.bhat),
        tol,
    );
    let d2 = differential_unchecked(o, 2);
    let cocycle = max_abs(&d2.matvec(&Cochain::from_operator(&d.bhat).coords));
    r.check("2-cocycle", cocycle, tol);
    for t in DEFORMATION_TS {
        let bt = o.b.axpy(t, &d.bhat);
        let ot = RelRbo {
            phi: o.phi.clone(),
            b: bt,
        };
        r.check(format!("B + ({t})B̂"), rbo_residual(&ot), tol);
    }
    r
}

/// Search `ker D₂` for directions that also satisfy the weight-zero identity.
///
/// Kernel basis vectors are tried first; then a projected Gauss–Newton on
/// the unit sphere of `ker D₂` from seeded starting points.
pub fn weight_zero_directions(
    o: &RelRbo,
    tol: f64,
    seed: u64,
) -> Result<Vec<DeformationDirection>> {
    let (gd, hd) = (o.g().dim(), o.h().dim());
    let d2 = differential_matrix(o, 2)?;
    let (_, kernel) = rank_and_kernel(&d2, Tolerance::default());
    let q = orthonormal_basis(&kernel, 1e-9);
    let to_op = |v: &[f64]| {
        Cochain {
            k: 2,
            h_dim: hd,
            g_dim: gd,
            coords: v.to_vec(),
        }
        .to_operator()
        .unwrap()
    };
    let normalize = |v: Vector| {
        let m = max_abs(&v);
        v.into_iter().map(|x| x / m).collect::<Vector>()
    };
    let mut found: Vec<Vector> = Vec::new();
    let accept = |v: Vector, found: &mut Vec<Vector>| {
        if max_abs(&v) == 0.0 {
            return;
        }
        let v = normalize(v);
        if weight_zero_residual(o, &to_op(&v)) > tol {
            return;
        }
        let basis = orthonormal_basis(found, 1e-9);
        if projection_residual(&v, &basis) > 1e-6 * norm2(&v) {
            found.push(v);
        }
    };
    for k in &kernel {
        accept(k.clone(), &mut found);
    }
    let m = q.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let combine = |c: &[f64]| -> Vector {
        let mut v = vec![0.0; gd * hd];
        for (qi, &ci) in q.iter().zip(c) {
            for (x, y) in v.iter_mut().zip(qi) {
                *x += ci * y;
            }
        }
        v
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vector> = (0..m).map(|i| basis_vector(m, i)).collect();
    for _ in 0..(4 * m).max(8) {
        starts.push((0..m).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    for start in starts {
        let mut c = start;
        let n = norm2(&c);
        c.iter_mut().for_each(|x| *x /= n);
        let mut lambda = 1e-3;
        for _ in 0..200 {
            let w = weight_zero_vector(o, &to_op(&combine(&c)));
            let res = norm2(&w);
            if res <= 1e-15 {
                break;
            }
            // Jacobian of the quadratic map by central differences (exact for quadratics)
            let hstep = 1e-6;
            let mut jac = Matrix::zeros(w.len(), m);
            for j in 0..m {
                let mut cp = c.clone();
                let mut cm = c.clone();
                cp[j] += hstep;
                cm[j] -= hstep;
                let col: Vector = sub(
                    &weight_zero_vector(o, &to_op(&combine(&cp))),
                    &weight_zero_vector(o, &to_op(&combine(&cm))),
                )
                .into_iter()
                .map(|x| x / (2.0 * hstep))
                .collect();
                jac.set_column(j, &col);
            }
            let jt = jac.transpose();
            let mut a = &jt * &jac;
            for i in 0..m {
                a[(i, i)] += lambda;
            }
            let Ok(step) = a.solve(&jt.matvec(&w)) else {
                break;
            };
            let mut cand: Vector = sub(&c, &step);
            let cn = norm2(&cand);
            if cn == 0.0 {
                break;
            }
            cand.iter_mut().for_each(|x| *x /= cn);
            let new_res = norm2(&weight_zero_vector(o, &to_op(&combine(&cand))));
            if new_res < res {
                c = cand;
                lambda = (lambda * 0.3).max(1e-12);
            } else {
                lambda *= 10.0;
                if lambda > 1e8 {
                    break;
                }
            }
        }
        accept(combine(&c), &mut found);
    }
    Ok(found
        .into_iter()
        .map(|v| DeformationDirection { bhat: to_op(&v) })
        .collect())
}

/// Whether `B̂₁` and `B̂₂` are equivalent through `x ∈ g`:
/// `B̂₁ − B̂₂ = d x` and `[x, B̂₁u] = B̂₂(φ(x)u)`; plus class equality by
/// least-squares membership of `B̂₁ − B̂₂` in the image of `D₁`.
pub fn deformation_equivalence(
    o: &RelRbo,
    d1: &DeformationDirection,
    d2: &DeformationDirection,
    x: &[f64],
    tol: f64,
) -> Result<Report> {
    let (gd, hd) = (o.g().dim(), o.h().dim());
    if x.len() != gd {
        return Err(Error::dim("x must be an element of g"));
    }
    let d1m = differential_matrix(o, 1)?;
    let diff = Cochain::from_operator(&(&d1.bhat - &d2.bhat)).coords;
    let dx = d1m.matvec(x);
    let mut r = Report::new("equivalence");
    r.check("difference is d x", max_abs(&sub(&diff, &dx)), tol);
    let mut aux: f64 = 0.0;
    for i in 0..hd {
        let u = basis_vector(hd, i);
        let l = o.g().bracket(x, &d1.bhat.matvec(&u));
        let rr = d2.bhat.matvec(&o.phi.act(x, &u));
        aux = aux.max(max_abs(&sub(&l, &rr)));
    }
    r.check("auxiliary relation", aux, tol);
    r.push(class_membership(&d1m, &diff));
    Ok(r)
}

/// Relative least-squares distance of `v` from the column space of `d`,
/// judged against the 1e-8 membership threshold.
fn class_membership(d: &Matrix, v: &[f64]) -> Check {
    let n = norm2(v);
    let res = if n == 0.0 {
        0.0
    } else {
        projection_residual(v, &column_space(d, 1e-9)) / n
    };
    Check::new("same cohomology class", res, 1e-8)
}

/// Whether two 2-cocycles differ by a coboundary.
pub fn same_class(o: &RelRbo, c1: &Cochain, c2: &Cochain) -> Result<Check> {
    let d1m = differential_matrix(o, 1)?;
    Ok(class_membership(&d1m, &sub(&c1.coords, &c2.coords)))
}

/// Deformations of a modified r-matrix `R + tR̂`, checked through
/// `B = (R − Id)/2`, `B̂ = R̂/2`.
pub fn r_matrix_deformation_bridge(r: &ModifiedR, rhat: &Matrix, tol: f64) -> Report {
    let mut rep = Report::new("r-matrix bridge");
    // identity residuals scale by exactly 4 under R = Id + 2B
    rep.absorb(check_mybe(r, 4.0 * tol));
    let o = from_modified_r(r);
    let bhat = rhat.scale(0.5);
    rep.absorb(check_deformation(
        &o,
        &DeformationDirection { bhat: bhat.clone() },
        tol,
    ));
    for t in DEFORMATION_TS {
        let rt = ModifiedR {
            g: r.g.clone(),
            r: r.r.axpy(t, rhat),
        };
        let r_res = crate::rbo::mybe_residual(&rt);
        let ot = RelRbo {
            phi: o.phi.clone(),
            b: o.b.axpy(t, &bhat),
        };
        let b_res = check_rbo(&ot, tol).residual();
        let agree = (r_res <= 4.0 * tol) == (b_res <= tol);
        rep.push(Check::verdict(format!("verdicts agree (t={t})"), agree));
        rep.check(
            format!("residual ratio (t={t})"),
            (r_res - 4.0 * b_res).abs(),
            1e-12 * (1.0 + r_res),
        );
    }
    rep
}

fn alternating_eval(omega: &Cochain, w: &Matrix, sub_index: &HashMap<Vec<usize>, usize>) -> Vector {
    // ω(w_1..w_m) = Σ_S det(W[S,:]) ω(e_S)
    let m = w.cols();
    let mut out = vec![0.0; omega.g_dim];
    for (s, &idx) in sub_index {
        let minor = Matrix::from_fn(m, m, |i, j| w[(s[i], j)]);
        let det = minor.det();
        if det != 0.0 {
            for (o, v) in out.iter_mut().zip(omega.value_at(idx)) {
                *o += det * v;
            }
        }
    }
    out
}

/// `p(ω)(u₁,…) = ψ_g(ω(ψ_h⁻¹u₁, …))`
pub fn pushforward_cochain(
    psi_g: &LinearMap,
    psi_h: &LinearMap,
    omega: &Cochain,
) -> Result<Cochain> {
    if omega.g_dim != psi_g.m.cols() || omega.h_dim != psi_h.m.cols() {
        return Err(Error::dim("cochain does not match the source of the maps"));
    }
    let inv = psi_h
        .m
        .inverse()
        .map_err(|_| Error::Singular("psi_h is not invertible".into()))?;
    let (hd, gd) = (psi_h.m.rows(), psi_g.m.rows());
    let m = omega.k - 1;
    let tuples = combinations(hd, m);
    let src_index = index_map(&combinations(omega.h_dim, m));
    let mut coords = Vec::with_capacity(tuples.len() * gd);
    for t in &tuples {
        let cols: Vec<Vector> = t.iter().map(|&i| inv.column(i)).collect();
        let w = if m == 0 {
            Matrix::zeros(omega.h_dim, 0)
        } else {
            Matrix::from_columns(&cols)?
        };
        let val = alternating_eval(omega, &w, &src_index);
        coords.extend(psi_g.apply(&val));
    }
    Cochain::new(omega.k, hd, gd, coords)
}

/// Matrix of `p` on `C^k`.
pub fn pushforward_matrix(psi_g: &LinearMap, psi_h: &LinearMap, k: usize) -> Result<Matrix> {
    let (hd, gd) = (psi_h.m.cols(), psi_g.m.cols());
    let n = cochain_dim(hd, gd, k);
    let cols: Vec<Vector> = (0..n)
        .map(|j| {
            pushforward_cochain(psi_g, psi_h, &Cochain::new(k, hd, gd, basis_vector(n, j))?)
                .map(|c| c.coords)
        })
        .collect::<Result<_>>()?;
    if cols.is_empty() {
        return Ok(Matrix::zeros(
            cochain_dim(psi_h.m.rows(), psi_g.m.rows(), k),
            0,
        ));
    }
    Matrix::from_columns(&cols)
}

/// `‖d^B ∘ p − p ∘ d^{B'}‖_max` on `C^k`.
pub fn cochain_map_residual(
    psi_g: &LinearMap,
    psi_h: &LinearMap,
    src: &RelRbo,
    dst: &RelRbo,
    k: usize,
) -> Result<f64> {
    let pk = pushforward_matrix(psi_g, psi_h, k)?;
    let pk1 = pushforward_matrix(psi_g, psi_h, k + 1)?;
    let lhs = &differential_matrix(dst, k)? * &pk;
    let rhs = &pk1 * &differential_matrix(src, k)?;
    Ok((&lhs - &rhs).max_abs())
}
