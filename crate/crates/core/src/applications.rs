//! Uses of Rota-Baxter operators on a single algebra or group: the
//! infinitesimal split and Cayley map, group factorization, the AKS flow,
//! local descendent groups and matched pairs.

use rayon::prelude::*;

use crate::correspondence::LocalRbo;
use crate::error::{Error, Result};
use crate::group::{
    check_descendent_group, dag, sample_elements, star, ActionKind, GroupRbo, MatrixGroup, Sampling,
};
use crate::lie::{is_subalgebra, parse_family, LieAlgebra, Representation};
use crate::linalg::{
    basis_vector, column_space, least_squares, max_abs, norm2, orthonormal_basis, project_out,
    rank, rank_and_kernel, sub, Matrix, Tolerance, Vector,
};
use crate::rbo::{check_rbo, RelRbo, GATE_TOL};
use crate::report::{Check, Report};

fn require_adjoint(o: &RelRbo) -> Result<()> {
    if !o.phi.is_adjoint(1e-12) {
        return Err(Error::Unsupported(
            "operation needs an operator on g with the adjoint action".into(),
        ));
    }
    let res = check_rbo(o, GATE_TOL);
    if !res.passed() {
        return Err(Error::CheckFailed(format!(
            "operator identity residual {:.3e}",
            res.residual()
        )));
    }
    Ok(())
}

fn b_plus_id(o: &RelRbo) -> Matrix {
    &o.b + &Matrix::identity(o.b.rows())
}

/// `g₊ = Im(B+Id)`, `g₋ = Im B`, `k₊ = ker B`, `k₋ = ker(B+Id)`.
#[derive(Clone, Debug)]
pub struct InfinitesimalSplit {
    pub g_plus: Vec<Vector>,
    pub g_minus: Vec<Vector>,
    pub k_plus: Vec<Vector>,
    pub k_minus: Vec<Vector>,
    pub report: Report,
}

/// Largest component of `[k, s]` outside `span k`.
fn ideal_residual(k: &[Vector], s: &[Vector], a: &LieAlgebra) -> f64 {
    let q = orthonormal_basis(k, 1e-9);
    let mut worst: f64 = 0.0;
    for x in k {
        for y in s {
            worst = worst.max(norm2(&project_out(&a.bracket(x, y), &q)));
        }
    }
    worst
}

pub fn split(o: &RelRbo, tol: Tolerance) -> Result<InfinitesimalSplit> {
    require_adjoint(o)?;
    let a = o.g();
    let n = a.dim();
    let bp = b_plus_id(o);
    let g_plus = column_space(&bp, tol.rel);
    let g_minus = column_space(&o.b, tol.rel);
    let k_plus = orthonormal_basis(&rank_and_kernel(&o.b, tol).1, tol.rel);
    let k_minus = orthonormal_basis(&rank_and_kernel(&bp, tol).1, tol.rel);

    let check_tol = 1e-10;
    let mut report = Report::new("split");
    for (name, v) in [
        ("g+", &g_plus),
        ("g-", &g_minus),
        ("k+", &k_plus),
        ("k-", &k_minus),
    ] {
        let mut r = is_subalgebra(v, a, check_tol);
        r.name = format!("{name} subalgebra");
        report.absorb(r);
    }
    report.check(
        "k+ ideal in g+",
        ideal_residual(&k_plus, &g_plus, a),
        check_tol,
    );
    report.check(
        "k- ideal in g-",
        ideal_residual(&k_minus, &g_minus, a),
        check_tol,
    );
    report.push(Check::verdict(
        "rank-nullity",
        g_plus.len() + k_minus.len() == n && g_minus.len() + k_plus.len() == n,
    ));

    // x = x₊ − x₋ with x₊ ∈ g₊, x₋ ∈ g₋
    let mut cols = g_plus.clone();
    cols.extend(
        g_minus
            .iter()
            .map(|v| v.iter().map(|x| -x).collect::<Vector>()),
    );
    let mut decomp: f64 = 0.0;
    if !cols.is_empty() {
        let m = Matrix::from_columns(&cols)?;
        for i in 0..n {
            decomp = decomp.max(least_squares_any(&m, &basis_vector(n, i), tol)?.1);
        }
    } else if n > 0 {
        decomp = 1.0;
    }
    report.check("x = x+ - x-", decomp, check_tol);
    Ok(InfinitesimalSplit {
        g_plus,
        g_minus,
        k_plus,
        k_minus,
        report,
    })
}

/// The induced isomorphism `g₊/k₊ → g₋/k₋`, `[(B+Id)u] ↦ [Bu]`, in orthonormal
/// complements of the kernels.
#[derive(Clone, Debug)]
pub struct CayleyMap {
    pub plus_complement: Vec<Vector>,
    pub minus_complement: Vec<Vector>,
    pub matrix: Matrix,
    pub report: Report,
}

fn complement(space: &[Vector], sub: &[Vector], rel: f64) -> Vec<Vector> {
    let projected: Vec<Vector> = space.iter().map(|v| project_out(v, sub)).collect();
    orthonormal_basis(&projected, rel)
}

fn coords_in(basis: &[Vector], v: &[f64]) -> Vector {
    basis.iter().map(|b| crate::linalg::dot(b, v)).collect()
}

pub fn cayley_transform(s: &InfinitesimalSplit, o: &RelRbo, tol: Tolerance) -> Result<CayleyMap> {
    require_adjoint(o)?;
    let cp = complement(&s.g_plus, &s.k_plus, tol.rel);
    let cm = complement(&s.g_minus, &s.k_minus, tol.rel);
    let mut report = Report::new("cayley");
    report.push(Check::verdict(
        "quotient dimensions agree",
        cp.len() == cm.len(),
    ));
    let bp = b_plus_id(o);
    if cp.is_empty() {
        report.check("well defined", 0.0, 1e-10);
        return Ok(CayleyMap {
            plus_complement: cp,
            minus_complement: cm,
            matrix: Matrix::zeros(0, 0),
            report,
        });
    }
    // preimages under B+Id of the complement basis
    let mut cols = Vec::with_capacity(cp.len());
    for c in &cp {
        let (u, res) = least_squares_any(&bp, c, tol)?;
        if res > 1e-9 {
            return Err(Error::CheckFailed(
                "complement vector not in the image of B+Id".into(),
            ));
        }
        cols.push(coords_in(&cm, &o.apply(&u)));
    }
    let matrix = Matrix::from_columns(&cols)?;

    // u with (B+Id)u ∈ k₊ must have Bu ∈ k₋
    let cpt = Matrix::from_rows(&cp)?;
    let (_, ker) = rank_and_kernel(&(&cpt * &bp), tol);
    let mut wd: f64 = 0.0;
    for v in ker {
        let v: Vector = v.iter().map(|x| x / norm2(&v)).collect();
        wd = wd.max(max_abs(&coords_in(&cm, &o.apply(&v))));
    }
    report.check("well defined", wd, 1e-10);
    report.push(Check::verdict(
        "invertible",
        matrix.is_square() && rank(&matrix, tol) == matrix.rows(),
    ));
    Ok(CayleyMap {
        plus_complement: cp,
        minus_complement: cm,
        matrix,
        report,
    })
}

/// Minimum-norm-ish solution of `a x = b` for rank-deficient `a`: solve on
/// the row space.
fn least_squares_any(a: &Matrix, b: &[f64], tol: Tolerance) -> Result<(Vector, f64)> {
    let rows = column_space(&a.transpose(), tol.rel);
    if rows.is_empty() {
        return Ok((vec![0.0; a.cols()], norm2(b)));
    }
    let basis = Matrix::from_columns(&rows)?;
    let (c, res) = least_squares(&(a * &basis), b)?;
    Ok((basis.matvec(&c), res))
}

fn require_group_adjoint(o: &GroupRbo) -> Result<()> {
    if o.action.kind() != ActionKind::Adjoint || !o.g.same_algebra(&o.h) {
        return Err(Error::Unsupported(
            "operation needs a group operator on G with conjugation".into(),
        ));
    }
    Ok(())
}

/// `exp(2tX₀) = g₊ g₋⁻¹` with `g₋ = 𝓑(exp 2tX₀)`, `g₊ = exp(2tX₀)·g₋`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub t: f64,
    pub exp: Matrix,
    pub g_plus: Matrix,
    pub g_minus: Matrix,
    pub residual: f64,
}

pub fn factorize(o: &GroupRbo, x0: &[f64], t: f64) -> Result<Factorization> {
    require_group_adjoint(o)?;
    let x: Vector = x0.iter().map(|v| 2.0 * t * v).collect();
    let g = o.g.exp(&x)?;
    let g_minus = o.eval(&g)?;
    let g_plus = &g * &g_minus;
    let residual = (&g - &(&g_plus * &g_minus.inverse()?)).norm_fro();
    Ok(Factorization {
        t,
        exp: g,
        g_plus,
        g_minus,
        residual,
    })
}

/// For Euclidean groups: the translation block of `g₊` and the rotation block
/// of `g₋` minus the identity, as max-abs residuals.
pub fn euclidean_block_residuals(f: &Factorization) -> (f64, f64) {
    let n = f.g_plus.rows() - 1;
    let trans = f.g_plus.block(0, n, n, 1).max_abs();
    let rot = (&f.g_minus.block(0, 0, n, n) - &Matrix::identity(n)).max_abs();
    (trans, rot)
}

/// For block operators with `p`-sized top block: the lower-left block of `g₊`
/// and the deviation of `g₋` from `[[I, 0], [*, I]]`.
pub fn block_triangular_residuals(f: &Factorization, p: usize) -> (f64, f64) {
    let n = f.g_plus.rows();
    let q = n - p;
    let plus = f.g_plus.block(p, 0, q, p).max_abs();
    let mut m = f.g_minus.clone();
    m.set_block(p, 0, &Matrix::zeros(q, p));
    (plus, (&m - &Matrix::identity(n)).max_abs())
}

/// `Ad_g` in the algebra coordinates of `group`.
pub fn ad_matrix(group: &MatrixGroup, g: &Matrix) -> Result<Matrix> {
    let gi = g.inverse()?;
    let cols: Vec<Vector> = group
        .algebra_basis()
        .iter()
        .map(|b| group.algebra_coords(&(&(g * b) * &gi)))
        .collect();
    Matrix::from_columns(&cols)
}

/// Basis of `{L : ad_{X₀}ᵀ L = 0}`.
pub fn coadjoint_stabilizer(a: &LieAlgebra, x0: &[f64], tol: Tolerance) -> Vec<Vector> {
    rank_and_kernel(&a.ad(x0).transpose(), tol).1
}

/// Normalized sum of the stabilizer basis.
pub fn default_l0(a: &LieAlgebra, x0: &[f64], tol: Tolerance) -> Vector {
    let ker = coadjoint_stabilizer(a, x0, tol);
    let mut l = vec![0.0; a.dim()];
    for v in &ker {
        l.iter_mut().zip(v).for_each(|(x, y)| *x += y);
    }
    let n = norm2(&l);
    if n > 0.0 {
        l.iter_mut().for_each(|x| *x /= n);
    }
    l
}

#[derive(Clone, Debug, PartialEq)]
pub struct AksPoint {
    pub t: f64,
    pub l: Vector,
    /// `‖Ad_{g₊}ᵀ L₀ − Ad_{g₋}ᵀ L₀‖_∞`
    pub agreement: f64,
    /// Norm of `L` on the chosen Casimir coordinates.
    pub casimir: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AksTrajectory {
    pub points: Vec<AksPoint>,
    /// Why the trajectory stopped early, if it did.
    pub truncated: Option<String>,
}

/// Function on `g*` that the coadjoint flow should preserve.
pub type CasimirFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// An invariant of `L ↦ L∘Ad_g` for the operator's group, if one is known.
///
/// A nondegenerate trace form `G_kl = tr(b_k b_l)` gives `Lᵀ G⁻¹ L`; for
/// `euclidean(n)` the trace form is degenerate and the translation part of
/// `L` has invariant length instead.
pub fn casimir(g: &MatrixGroup) -> Option<Box<CasimirFn>> {
    if let Ok((fam, p)) = parse_family(g.name()) {
        if fam == "euclidean" && p.len() == 1 {
            let start = p[0] * (p[0] - 1) / 2;
            return Some(Box::new(move |l: &[f64]| norm2(&l[start..])));
        }
    }
    let b = g.algebra_basis();
    let gram = Matrix::from_fn(b.len(), b.len(), |k, l| (&b[k] * &b[l]).trace());
    if b.is_empty() || gram.det().abs() < 1e-10 * gram.max_abs().powi(b.len() as i32) {
        return None;
    }
    let inv = gram.inverse().ok()?;
    Some(Box::new(move |l: &[f64]| {
        crate::linalg::dot(l, &inv.matvec(l))
    }))
}

/// `L(t) = Ad_{g₊(t)}ᵀ L₀`, compared with `Ad_{g₋(t)}ᵀ L₀` at each grid point.
pub fn aks_flow(
    o: &GroupRbo,
    x0: &[f64],
    l0: &[f64],
    ts: &[f64],
    casimir: &CasimirFn,
) -> Result<AksTrajectory> {
    require_group_adjoint(o)?;
    if l0.len() != o.g.dim() {
        return Err(Error::dim("L0 must have one coordinate per basis element"));
    }
    let results: Vec<Result<AksPoint>> = ts
        .par_iter()
        .map(|&t| {
            let f = factorize(o, x0, t)?;
            let lp = ad_matrix(&o.g, &f.g_plus)?.transpose().matvec(l0);
            let lm = ad_matrix(&o.g, &f.g_minus)?.transpose().matvec(l0);
            Ok(AksPoint {
                t,
                agreement: max_abs(&sub(&lp, &lm)),
                casimir: casimir(&lp),
                l: lp,
            })
        })
        .collect();
    let mut points = Vec::with_capacity(ts.len());
    for r in results {
        match r {
            Ok(p) => points.push(p),
            Err(Error::Domain(msg)) => {
                return Ok(AksTrajectory {
                    points,
                    truncated: Some(msg),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(AksTrajectory {
        points,
        truncated: None,
    })
}

/// `g₁ ⋆ g₂ = g₁·𝓑(g₁)·g₂·𝓑(g₁)⁻¹` on the domain of a local operator.
pub fn star_local(o: &LocalRbo, g1: &Matrix, g2: &Matrix) -> Result<Matrix> {
    require_group_adjoint(&o.op)?;
    star(&o.op, g1, g2)
}

/// `g† = 𝓑(g)⁻¹·g⁻¹·𝓑(g)`, defined when `g† ∈ U` too.
pub fn dag_local(o: &LocalRbo, g: &Matrix) -> Result<Matrix> {
    require_group_adjoint(&o.op)?;
    let d = dag(&o.op, g)?;
    if !o.op.in_domain(&d) {
        return Err(Error::Domain("inverse leaves the domain".into()));
    }
    Ok(d)
}

/// Local group axioms at in-domain samples.
pub fn check_local_descendent(o: &LocalRbo, s: &Sampling, tol: f64) -> Result<Report> {
    require_group_adjoint(&o.op)?;
    let mut r = check_descendent_group(&o.op, s, tol)?;
    r.name = "local descendent group".into();
    Ok(r)
}

/// Matched pair of Lie algebras: `ρ` of `g` on `h` and `μ` of `h` on `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchedPairAlg {
    pub g: LieAlgebra,
    pub h: LieAlgebra,
    pub rho: Representation,
    pub mu: Representation,
}

pub fn matched_pair_algebra_check(mp: &MatchedPairAlg, tol: f64) -> Report {
    let (gd, hd) = (mp.g.dim(), mp.h.dim());
    let mut r = Report::new("matched pair");
    let mut rho = mp.rho.check(tol);
    rho.name = "rho".into();
    let mut mu = mp.mu.check(tol);
    mu.name = "mu".into();
    r.absorb(rho).absorb(mu);
    let rho_of = |x: &[f64], v: &[f64]| mp.rho.of(x).matvec(v);
    let mu_of = |x: &[f64], v: &[f64]| mp.mu.of(x).matvec(v);
    let combine = |terms: [(f64, Vector); 4]| {
        let mut out = vec![0.0; terms[0].1.len()];
        for (s, v) in terms {
            out.iter_mut().zip(&v).for_each(|(o, x)| *o += s * x);
        }
        out
    };
    let mut mp1: f64 = 0.0;
    for i in 0..gd {
        let x = basis_vector(gd, i);
        for a in 0..hd {
            for b in a + 1..hd {
                let (xi, eta) = (basis_vector(hd, a), basis_vector(hd, b));
                let lhs = rho_of(&x, &mp.h.bracket(&xi, &eta));
                let rhs = combine([
                    (1.0, mp.h.bracket(&rho_of(&x, &xi), &eta)),
                    (1.0, mp.h.bracket(&xi, &rho_of(&x, &eta))),
                    (1.0, rho_of(&mu_of(&eta, &x), &xi)),
                    (-1.0, rho_of(&mu_of(&xi, &x), &eta)),
                ]);
                mp1 = mp1.max(max_abs(&sub(&lhs, &rhs)));
            }
        }
    }
    let mut mp2: f64 = 0.0;
    for a in 0..hd {
        let xi = basis_vector(hd, a);
        for i in 0..gd {
            for j in i + 1..gd {
                let (x, y) = (basis_vector(gd, i), basis_vector(gd, j));
                let lhs = mu_of(&xi, &mp.g.bracket(&x, &y));
                let rhs = combine([
                    (1.0, mp.g.bracket(&mu_of(&xi, &x), &y)),
                    (1.0, mp.g.bracket(&x, &mu_of(&xi, &y))),
                    (1.0, mu_of(&rho_of(&y, &xi), &x)),
                    (-1.0, mu_of(&rho_of(&x, &xi), &y)),
                ]);
                mp2 = mp2.max(max_abs(&sub(&lhs, &rhs)));
            }
        }
    }
    r.check("rho compatibility", mp1, tol)
        .check("mu compatibility", mp2, tol);
    r
}

/// `g ⊕ g` with the bracket acting on each summand separately.
pub fn direct_sum(a: &LieAlgebra) -> Result<LieAlgebra> {
    let n = a.dim();
    let mut entries = Vec::new();
    for (i, j, c) in a.bracket_entries() {
        entries.push((i, j, c.clone()));
        entries.push((
            i + n,
            j + n,
            c.into_iter().map(|(k, v)| (k + n, v)).collect(),
        ));
    }
    let labels = a
        .labels()
        .iter()
        .map(|l| format!("{l}'"))
        .chain(a.labels().iter().map(|l| format!("{l}''")))
        .collect();
    LieAlgebra::from_brackets(2 * n, labels, &entries)
}

/// `g_B = {(Bx, x + Bx)}` and `g_diag = {(x, x)}` inside `g ⊕ g`, with the
/// actions read off the cross brackets `[b, d] = ρ(b)d − μ(d)b`.
#[derive(Clone, Debug)]
pub struct MatchedPairFromRbo {
    pub g_b_basis: Vec<Vector>,
    pub diag_basis: Vec<Vector>,
    pub pair: MatchedPairAlg,
    pub report: Report,
}

pub fn matched_pair_from_rbo(o: &RelRbo, tol: f64) -> Result<MatchedPairFromRbo> {
    require_adjoint(o)?;
    let a = o.g();
    let n = a.dim();
    let sum = direct_sum(a)?;
    let g_b: Vec<Vector> = (0..n)
        .map(|i| {
            let bx = o.b.column(i);
            let mut v = bx.clone();
            v.extend(
                bx.iter()
                    .enumerate()
                    .map(|(k, x)| x + if k == i { 1.0 } else { 0.0 }),
            );
            v
        })
        .collect();
    let diag: Vec<Vector> = (0..n)
        .map(|i| {
            let mut v = basis_vector(2 * n, i);
            v[i + n] = 1.0;
            v
        })
        .collect();
    let mut report = Report::new("matched pair from rbo");
    let mut r = is_subalgebra(&g_b, &sum, tol);
    r.name = "g_B subalgebra".into();
    report.absorb(r);
    let mut r = is_subalgebra(&diag, &sum, tol);
    r.name = "g_diag subalgebra".into();
    report.absorb(r);
    let mut all = g_b.clone();
    all.extend(diag.iter().cloned());
    let basis = Matrix::from_columns(&all)?;
    let full_rank = rank(&basis, Tolerance::default()) == 2 * n;
    report.push(Check::verdict("direct sum of complements", full_rank));
    if !full_rank {
        return Err(Error::CheckFailed(
            "g_B and g_diag are not complementary".into(),
        ));
    }
    let lu = basis.lu()?;
    // coefficients in (g_B | g_diag)
    let split_coords = |w: &[f64]| -> (Vector, Vector) {
        let c = lu.solve(w);
        (c[..n].to_vec(), c[n..].to_vec())
    };
    let structure = |vs: &[Vector], pick_first: bool| -> Result<LieAlgebra> {
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (x, y) = split_coords(&sum.bracket(&vs[i], &vs[j]));
                let c = if pick_first { x } else { y };
                entries.push((i, j, c.into_iter().enumerate().collect::<Vec<_>>()));
            }
        }
        LieAlgebra::from_brackets(n, a.labels().to_vec(), &entries)
    };
    let gb_alg = structure(&g_b, true)?;
    let diag_alg = structure(&diag, false)?;
    let mut rho = vec![Matrix::zeros(n, n); n];
    let mut mu = vec![Matrix::zeros(n, n); n];
    for i in 0..n {
        for j in 0..n {
            let (x, y) = split_coords(&sum.bracket(&g_b[i], &diag[j]));
            for k in 0..n {
                rho[i][(k, j)] = y[k];
                mu[j][(k, i)] = -x[k];
            }
        }
    }
    let pair = MatchedPairAlg {
        rho: Representation::new(gb_alg.clone(), n, rho)?,
        mu: Representation::new(diag_alg.clone(), n, mu)?,
        g: gb_alg,
        h: diag_alg,
    };
    report.absorb(matched_pair_algebra_check(&pair, tol));
    Ok(MatchedPairFromRbo {
        g_b_basis: g_b,
        diag_basis: diag,
        pair,
        report,
    })
}

type GPair = (Matrix, Matrix);

fn pair_mul(a: &GPair, b: &GPair) -> GPair {
    (&a.0 * &b.0, &a.1 * &b.1)
}

fn pair_dist(a: &GPair, b: &GPair) -> f64 {
    (&a.0 - &b.0).max_abs().max((&a.1 - &b.1).max_abs())
}

/// `(𝓑(g), g𝓑(g)) ∈ G_𝓑`
fn graph_element(o: &GroupRbo, g: &Matrix) -> Result<GPair> {
    let b = o.eval(g)?;
    Ok((b.clone(), g * &b))
}

/// `(a, b) = (𝓑(c), c𝓑(c))·(𝓑(c)⁻¹a, 𝓑(c)⁻¹a)` with `c = b a⁻¹`; returns
/// `c` and the diagonal entry.
fn factor_pair(o: &GroupRbo, p: &GPair) -> Result<(Matrix, Matrix)> {
    let c = &p.1 * &p.0.inverse()?;
    let d = &o.eval(&c)?.inverse()? * &p.0;
    Ok((c, d))
}

/// Group-level matched pair `(G_𝓑, G_diag)`: closure, unique factorization,
/// and the compatibility axioms of `▷` and `◁`.
pub fn matched_pair_group_check(o: &GroupRbo, s: &Sampling, tol: f64) -> Result<Report> {
    require_group_adjoint(o)?;
    let mut rng = s.rng();
    let g = &o.g;
    let a1 = sample_elements(g, s.count, s.radius, &mut rng)?;
    let a2 = sample_elements(g, s.count, s.radius, &mut rng)?;
    let x1 = sample_elements(g, s.count, s.radius, &mut rng)?;
    let x2 = sample_elements(g, s.count, s.radius, &mut rng)?;
    let diag = |x: &Matrix| (x.clone(), x.clone());
    // x ▷ y and x ◁ y for x ∈ G_diag, y = graph_element(gy)
    let act = |x: &Matrix, gy: &Matrix| -> Result<(Matrix, Matrix)> {
        factor_pair(o, &pair_mul(&diag(x), &graph_element(o, gy)?))
    };
    let names = [
        "closure under product",
        "closure under inverse",
        "unique factorization",
        "left action on products",
        "right action on products",
    ];
    let mut worst = [0.0f64; 5];
    let (mut done, mut skipped) = (0, 0);
    for i in 0..s.count {
        let eval = || -> Result<[f64; 5]> {
            let (g1, g2) = (&a1[i], &a2[i]);
            let y1 = graph_element(o, g1)?;
            let y2 = graph_element(o, g2)?;
            let prod = pair_dist(&pair_mul(&y1, &y2), &graph_element(o, &star(o, g1, g2)?)?);
            let inv = pair_dist(
                &(y1.0.inverse()?, y1.1.inverse()?),
                &graph_element(o, &dag(o, g1)?)?,
            );

            let p = (g1.clone(), g2.clone());
            let (c, d) = factor_pair(o, &p)?;
            let fact = pair_dist(&pair_mul(&graph_element(o, &c)?, &diag(&d)), &p);

            // x ▷ (y₁y₂) = (x ▷ y₁)((x ◁ y₁) ▷ y₂)
            let x = &x1[i];
            let y12 = star(o, g1, g2)?;
            let (lhs, _) = act(x, &y12)?;
            let (xr1, xl1) = act(x, g1)?;
            let (xr2, _) = act(&xl1, g2)?;
            let m1 = pair_dist(
                &graph_element(o, &lhs)?,
                &pair_mul(&graph_element(o, &xr1)?, &graph_element(o, &xr2)?),
            );

            // (x₁x₂) ◁ y = (x₁ ◁ (x₂ ▷ y))(x₂ ◁ y)
            let xb = &x2[i];
            let (_, lhs) = act(&(x * xb), g1)?;
            let (r2, l2) = act(xb, g1)?;
            let (_, l1) = act(x, &r2)?;
            let m2 = (&lhs - &(&l1 * &l2)).max_abs();
            Ok([prod, inv, fact, m1, m2])
        };
        match eval() {
            Ok(v) => {
                worst.iter_mut().zip(v).for_each(|(w, x)| *w = w.max(x));
                done += 1;
            }
            Err(Error::Domain(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let mut r = Report::new("matched pair group");
    for (name, w) in names.iter().zip(worst) {
        r.push(Check::new(*name, w, tol).with_counts(done, skipped));
    }
    Ok(r)
}
