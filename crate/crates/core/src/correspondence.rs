//! Passage between group operators and their tangent operators:
//! differentiation, local integration, descendent exponentials and the
//! Van Est cochain map.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::cohomology::{combinations, differential, Cochain};
use crate::error::{Error, Result};
use crate::group::{
    sample_elements, star, theta_group_action, ActionKind, GroupAction, GroupCochain, GroupRbo,
    MatrixGroup, Sampling, SemidirectGroup,
};
use crate::lie::{ActionPhi, LieAlgebra};
use crate::linalg::{
    directional_derivative, max_abs, mixed_partials, newton_solve, sub, Matrix, NewtonOptions,
    Vector, DEFAULT_STEP,
};
use crate::rbo::{check_rbo, RelRbo, GATE_TOL};
use crate::report::{Check, Report};

/// Allowed mismatch between a differentiated group action and a stored `φ`.
pub const ACTION_GATE_TOL: f64 = 1e-6;
const MIN_STEP: f64 = 1e-9;

/// `φ(e_i) = d/dt|₀ Φ̃(exp(t e_i))` in the coordinates of `h`.
pub fn diff_action(
    action: &dyn GroupAction,
    g: &MatrixGroup,
    h: &MatrixGroup,
) -> Result<ActionPhi> {
    match action.kind() {
        ActionKind::Trivial => return Ok(ActionPhi::zero(g.lie_algebra(), h.lie_algebra())),
        ActionKind::Adjoint if g.same_algebra(h) => return Ok(ActionPhi::adjoint(g.lie_algebra())),
        _ => {}
    }
    let mats = (0..g.dim())
        .map(|i| {
            let cols = (0..h.dim())
                .map(|j| {
                    directional_derivative(
                        |t| {
                            let gt = g.exp(&scaled_basis(g.dim(), i, t))?;
                            Ok(h.algebra_coords(&action.act_algebra(&gt, &h.algebra_basis()[j])?))
                        },
                        DEFAULT_STEP,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Matrix::from_columns(&cols)
        })
        .collect::<Result<Vec<_>>>()?;
    ActionPhi::new(g.lie_algebra().clone(), h.lie_algebra().clone(), mats)
}

fn scaled_basis(n: usize, i: usize, t: f64) -> Vector {
    let mut v = vec![0.0; n];
    v[i] = t;
    v
}

/// Tangent operator of a group operator and the finite-difference step used.
#[derive(Clone, Debug)]
pub struct Differentiated {
    pub rbo: RelRbo,
    pub step: f64,
    /// The default step left the domain and was reduced.
    pub shrunk: bool,
}

/// `B(e_j) = d/dt|₀ log_G 𝓑(exp_H(t e_j))`, shrinking the step while the
/// stencil leaves the domain.
pub fn diff_group_rbo(o: &GroupRbo) -> Result<Differentiated> {
    let phi = diff_action(o.action.as_ref(), &o.g, &o.h)?;
    let mut step = DEFAULT_STEP;
    loop {
        let cols: Result<Vec<Vector>> = (0..o.h.dim())
            .map(|j| {
                directional_derivative(
                    |t| o.g.log(&o.eval(&o.h.exp(&scaled_basis(o.h.dim(), j, t))?)?),
                    step,
                )
            })
            .collect();
        match cols {
            Ok(cols) => {
                let b = if cols.is_empty() {
                    Matrix::zeros(o.g.dim(), 0)
                } else {
                    Matrix::from_columns(&cols)?
                };
                return Ok(Differentiated {
                    rbo: RelRbo::new(phi, b)?,
                    step,
                    shrunk: step < DEFAULT_STEP,
                });
            }
            Err(Error::Domain(_)) if step / 10.0 >= MIN_STEP => step /= 10.0,
            Err(e) => return Err(e),
        }
    }
}

/// `Exp_⋆(u) = P_H(EXP(Bu, u))` via the semidirect exponential.
#[derive(Clone, Debug)]
pub struct DescendentExp {
    pub rbo: RelRbo,
    pub group: SemidirectGroup,
}

impl DescendentExp {
    pub fn new(rbo: RelRbo, group: SemidirectGroup) -> Self {
        DescendentExp { rbo, group }
    }

    pub fn from_group_rbo(o: &GroupRbo) -> Result<Self> {
        Ok(DescendentExp::new(diff_group_rbo(o)?.rbo, o.semidirect()))
    }

    /// The full point `EXP(Bu, u)` on the graph.
    pub fn graph_point(&self, u: &[f64]) -> Result<(Matrix, Matrix)> {
        self.group.exp(&self.rbo.apply(u), u)
    }

    pub fn exp(&self, u: &[f64]) -> Result<Matrix> {
        Ok(self.graph_point(u)?.1)
    }
}

pub fn descendent_exp(o: &GroupRbo, u: &[f64]) -> Result<Matrix> {
    DescendentExp::from_group_rbo(o)?.exp(u)
}

/// One-parameter curve of `(H, ⋆)` by RK4 on the ⋆-left-invariant field
/// `γ' = γ·Φ̃(𝓑(γ))u`.
pub fn star_flow(o: &GroupRbo, u: &[f64], steps: usize) -> Result<Matrix> {
    let um = o.h.algebra_element(u);
    let field = |h: &Matrix| -> Result<Matrix> { Ok(h * &o.action.act_algebra(&o.eval(h)?, &um)?) };
    let mut h = o.h.identity();
    let dt = 1.0 / steps as f64;
    for _ in 0..steps {
        let k1 = field(&h)?;
        let k2 = field(&h.axpy(dt / 2.0, &k1))?;
        let k3 = field(&h.axpy(dt / 2.0, &k2))?;
        let k4 = field(&h.axpy(dt, &k3))?;
        h = h.axpy(dt / 6.0, &k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4));
    }
    Ok(h)
}

/// Checks that `Exp_⋆` is a one-parameter subgroup of `(H, ⋆)` and agrees
/// with the integrated ⋆-flow.
pub fn check_descendent_exp(
    o: &GroupRbo,
    de: &DescendentExp,
    us: &[Vector],
    tol: f64,
) -> Result<Report> {
    let (mut one_param, mut flow): (f64, f64) = (0.0, 0.0);
    for u in us {
        for (t, s) in [(0.3, 0.5), (-0.2, 0.7), (0.6, -0.1)] {
            let tu: Vector = u.iter().map(|x| t * x).collect();
            let su: Vector = u.iter().map(|x| s * x).collect();
            let both: Vector = u.iter().map(|x| (t + s) * x).collect();
            let lhs = star(o, &de.exp(&tu)?, &de.exp(&su)?)?;
            one_param = one_param.max((&lhs - &de.exp(&both)?).max_abs());
        }
        flow = flow.max((&de.exp(u)? - &star_flow(o, u, 200)?).max_abs());
    }
    let mut r = Report::new("descendent exponential");
    r.check("one-parameter", one_param, tol)
        .check("matches star flow", flow, tol);
    Ok(r)
}

/// Compares the Lie algebra of `(H, ⋆)` and the tangent of `Θ` with the
/// descendent bracket and `θ` of the differentiated operator.
pub fn descendent_compat_check(o: &GroupRbo, tol: f64) -> Result<Report> {
    let diff = diff_group_rbo(o)?.rbo;
    let (hd, gd) = (o.h.dim(), o.g.dim());
    let e = |i: usize, t: f64| o.h.exp(&scaled_basis(hd, i, t));

    // ∂s∂t (log(a⋆b) − log(b⋆a)) = [u, v]_⋆ for a = exp(su), b = exp(tv)
    let mut bracket: f64 = 0.0;
    for i in 0..hd {
        for j in i + 1..hd {
            let numeric = mixed_partials(
                |t: &[f64]| {
                    let (a, b) = (e(i, t[0])?, e(j, t[1])?);
                    Ok(sub(
                        &o.h.log(&star(o, &a, &b)?)?,
                        &o.h.log(&star(o, &b, &a)?)?,
                    ))
                },
                2,
            )?;
            let exact =
                diff.descendent_bracket(&scaled_basis(hd, i, 1.0), &scaled_basis(hd, j, 1.0));
            bracket = bracket.max(max_abs(&sub(&numeric, &exact)));
        }
    }

    let thetas = diff.theta_matrices();
    let mut theta: f64 = 0.0;
    for (i, th) in thetas.iter().enumerate() {
        for j in 0..gd {
            let numeric = mixed_partials(
                |t: &[f64]| {
                    o.g.log(&theta_group_action(
                        o,
                        &e(i, t[0])?,
                        &o.g.exp(&scaled_basis(gd, j, t[1]))?,
                    )?)
                },
                2,
            )?;
            theta = theta.max(max_abs(&sub(&numeric, &th.column(j))));
        }
    }
    let mut r = Report::new("descendent compatibility");
    r.check("bracket", bracket, tol).check("theta", theta, tol);
    Ok(r)
}

/// Where a group operator came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Analytic(String),
    Integrated { source: String },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Analytic(name) => write!(f, "analytic:{name}"),
            Provenance::Integrated { source } => write!(f, "integrated-from:{source}"),
        }
    }
}

type SolveCache = Arc<RwLock<HashMap<Vec<u64>, Vector>>>;

/// A group operator defined on a log-ball, analytic or integrated.
#[derive(Clone)]
pub struct LocalRbo {
    pub op: GroupRbo,
    pub provenance: Provenance,
    cache: Option<SolveCache>,
}

impl fmt::Debug for LocalRbo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalRbo")
            .field("op", &self.op)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl LocalRbo {
    pub fn analytic(op: GroupRbo) -> Self {
        let provenance = Provenance::Analytic(op.name.clone());
        LocalRbo {
            op,
            provenance,
            cache: None,
        }
    }

    pub fn radius(&self) -> f64 {
        self.op.domain_radius
    }

    /// Number of cached Newton solves.
    pub fn cached_solves(&self) -> usize {
        self.cache
            .as_ref()
            .map_or(0, |c| c.read().map(|m| m.len()).unwrap_or(0))
    }
}

fn matrix_key(m: &Matrix) -> Vec<u64> {
    m.as_slice().iter().map(|x| x.to_bits()).collect()
}

/// Gate shared by [`integrate_rbo`]: the operator identity, matching structure
/// constants, and `diff_action(Φ) ≈ φ`.
pub fn integration_gate(
    o: &RelRbo,
    g: &MatrixGroup,
    h: &MatrixGroup,
    action: &dyn GroupAction,
) -> Result<Report> {
    let mut r = Report::new("integration gate");
    r.absorb(check_rbo(o, GATE_TOL));
    let dist = |a: &LieAlgebra, b: &LieAlgebra| {
        if a.dim() == b.dim() {
            a.constants_distance(b)
        } else {
            f64::INFINITY
        }
    };
    r.check(
        "g structure constants",
        dist(g.lie_algebra(), o.g()),
        GATE_TOL,
    );
    r.check(
        "h structure constants",
        dist(h.lie_algebra(), o.h()),
        GATE_TOL,
    );
    let mismatch = if r.passed() {
        let phi = diff_action(action, g, h)?;
        (0..g.dim())
            .map(|i| (&phi.mats[i] - &o.phi.mats[i]).max_abs())
            .fold(0.0, f64::max)
    } else {
        f64::NAN
    };
    r.check("action differentiates to phi", mismatch, ACTION_GATE_TOL);
    Ok(r)
}

/// Local integration: `𝓑(P_H EXP(Bu, u)) = exp_G(Bu)`, solving for `u` by
/// Newton in log coordinates of `H`.
pub fn integrate_rbo(
    o: &RelRbo,
    g: MatrixGroup,
    h: MatrixGroup,
    action: Arc<dyn GroupAction>,
    radius: f64,
    source: &str,
) -> Result<LocalRbo> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!(
            "integration radius must be positive and finite, got {radius}"
        )));
    }
    let gate = integration_gate(o, &g, &h, action.as_ref())?;
    if !gate.passed() {
        let names: Vec<String> = gate
            .failures()
            .iter()
            .map(|c| format!("{} ({:.3e})", c.name, c.residual))
            .collect();
        return Err(Error::CheckFailed(format!(
            "integration gate failed: {}",
            names.join(", ")
        )));
    }
    let sd = SemidirectGroup {
        g: g.clone(),
        h: h.clone(),
        action: action.clone(),
    };
    let cache: SolveCache = Arc::default();
    let (rbo, hg, gg, c) = (o.clone(), h.clone(), g.clone(), cache.clone());
    let map = move |x: &Matrix| -> Result<Matrix> {
        let key = matrix_key(x);
        let cached = c.read().ok().and_then(|m| m.get(&key).cloned());
        let u = match cached {
            Some(u) => u,
            None => {
                let target = hg.log(x)?;
                let f = |u: &[f64]| hg.log(&sd.exp(&rbo.apply(u), u)?.1);
                let u = newton_solve(f, &target, &target, NewtonOptions::default()).map_err(
                    |e| match e {
                        Error::Divergence { residual, .. } => Error::Divergence {
                            residual,
                            context: format!(
                                "integration did not converge; try a radius below {radius}"
                            ),
                        },
                        other => other,
                    },
                )?;
                if let Ok(mut m) = c.write() {
                    m.insert(key, u.clone());
                }
                u
            }
        };
        gg.exp(&rbo.apply(&u))
    };
    let op = GroupRbo {
        name: format!("integrated({source})"),
        g,
        h,
        action,
        map: Arc::new(map),
        domain_radius: radius,
    };
    Ok(LocalRbo {
        op,
        provenance: Provenance::Integrated {
            source: source.into(),
        },
        cache: Some(cache),
    })
}

/// Local operator identity on sampled pairs; pairs whose composed argument
/// leaves the log-ball are skipped and counted.
pub fn check_local_rbo(o: &LocalRbo, s: &Sampling, tol: f64) -> Result<Report> {
    let mut r = crate::group::check_group_rbo(&o.op, s, tol)?;
    r.name = "local rbo".into();
    Ok(r)
}

/// Largest entrywise difference of two operators on sampled points of radius
/// `s.radius` that both accept.
pub fn max_disagreement(a: &GroupRbo, b: &GroupRbo, s: &Sampling) -> Result<Check> {
    let hs = sample_elements(&a.h, s.count, s.radius, &mut s.rng())?;
    let (mut worst, mut done, mut skipped): (f64, usize, usize) = (0.0, 0, 0);
    for h in &hs {
        match (a.eval(h), b.eval(h)) {
            (Ok(x), Ok(y)) => {
                worst = worst.max((&x - &y).max_abs());
                done += 1;
            }
            (Err(Error::Domain(_)), _) | (_, Err(Error::Domain(_))) => skipped += 1,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(Check::new("disagreement", worst, 0.0).with_counts(done, skipped))
}

pub const MAX_VAN_EST_DEGREE: usize = 3;

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (p, sign) in permutations(n - 1) {
        // inserting n-1 at position i adds n-1-i inversions
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            let s = if (n - 1 - i).is_multiple_of(2) {
                sign
            } else {
                -sign
            };
            out.push((q, s));
        }
    }
    out
}

/// `VE(F)(u₁..u_m) = Σ_s sgn(s) ∂^m/∂t₁..∂t_m F(Exp_⋆(t₁u_{s(1)}), ..)`
pub fn van_est_eval(de: &DescendentExp, f: &GroupCochain, us: &[Vector]) -> Result<Vector> {
    if f.k > MAX_VAN_EST_DEGREE {
        return Err(Error::Unsupported(format!(
            "Van Est of degree {} (max {MAX_VAN_EST_DEGREE})",
            f.k
        )));
    }
    let m = f.k - 1;
    if us.len() != m {
        return Err(Error::dim(format!(
            "degree-{} Van Est takes {m} arguments",
            f.k
        )));
    }
    if m == 0 {
        return f.eval(&[]);
    }
    let mut acc: Option<Vector> = None;
    for (perm, sign) in permutations(m) {
        let d = mixed_partials(
            |t: &[f64]| {
                let args = perm
                    .iter()
                    .zip(t)
                    .map(|(&p, &ti)| de.exp(&us[p].iter().map(|x| ti * x).collect::<Vector>()))
                    .collect::<Result<Vec<_>>>()?;
                f.eval(&args)
            },
            m,
        )?;
        match acc.as_mut() {
            None => acc = Some(d.iter().map(|x| sign * x).collect()),
            Some(a) => a.iter_mut().zip(&d).for_each(|(a, b)| *a += sign * b),
        }
    }
    Ok(acc.unwrap())
}

/// Van Est image as a Lie algebra cochain on basis tuples.
pub fn van_est(o: &GroupRbo, f: &GroupCochain) -> Result<Cochain> {
    van_est_with(&DescendentExp::from_group_rbo(o)?, o.g.dim(), f)
}

fn van_est_with(de: &DescendentExp, g_dim: usize, f: &GroupCochain) -> Result<Cochain> {
    let hd = de.rbo.h().dim();
    let mut coords = Vec::new();
    for t in combinations(hd, f.k.saturating_sub(1)) {
        let us: Vec<Vector> = t.iter().map(|&i| scaled_basis(hd, i, 1.0)).collect();
        let v = van_est_eval(de, f, &us)?;
        if v.len() != g_dim {
            return Err(Error::dim("cochain values must lie in g"));
        }
        coords.extend(v);
    }
    Cochain::new(f.k, hd, g_dim, coords)
}

/// `‖VE(d^𝓑 F) − d_CE VE(F)‖` over all basis tuples.
pub fn van_est_square_check(o: &GroupRbo, f: &GroupCochain, tol: f64) -> Result<Report> {
    if f.k + 1 > MAX_VAN_EST_DEGREE {
        return Err(Error::Unsupported(format!(
            "square check needs degree ≤ {}",
            MAX_VAN_EST_DEGREE - 1
        )));
    }
    let de = DescendentExp::from_group_rbo(o)?;
    let gd = o.g.dim();
    let df = crate::group::group_cochain_differential(o, f);
    let lhs = van_est_with(&de, gd, &df)?;
    let rhs = differential(&de.rbo, &van_est_with(&de, gd, f)?)?;
    let mut r = Report::new("van est square");
    r.check(
        "VE(dF) = d VE(F)",
        max_abs(&sub(&lhs.coords, &rhs.coords)),
        tol,
    );
    Ok(r)
}

/// Test cochain of degree 1 or 2 in log coordinates of `h`: a constant, or
/// `F(h)_a = Σᵢ M_{ai} cᵢ + c_a c_{a+1}` with `M_{ai} = ((a + 2i) mod 3) − 1` and `c = log h`
/// (indices mod `dim h`).
pub fn polynomial_cochain(h: &MatrixGroup, g_dim: usize, degree: usize) -> Result<GroupCochain> {
    match degree {
        1 => Ok(GroupCochain::constant(
            (0..g_dim).map(|a| 1.0 + 0.5 * a as f64).collect(),
        )),
        2 => {
            let h = h.clone();
            Ok(GroupCochain::new(2, move |hs: &[Matrix]| {
                let c = h.log(&hs[0])?;
                let d = c.len();
                Ok((0..g_dim)
                    .map(|a| {
                        let lin: f64 = (0..d)
                            .map(|i| (((a + 2 * i) % 3) as f64 - 1.0) * c[i])
                            .sum();
                        lin + if d > 0 {
                            c[a % d] * c[(a + 1) % d]
                        } else {
                            0.0
                        }
                    })
                    .collect())
            }))
        }
        _ => Err(Error::Unsupported(format!(
            "test cochains of degree {degree}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{
        check_group_action, euclidean_parts, group_by_name, operator_by_name, TrivialAction,
    };
    use crate::rbo::rbo_residual;

    fn small() -> Sampling {
        Sampling {
            count: 20,
            ..Sampling::default()
        }
    }

    fn integrate_analytic(name: &str, radius: f64) -> (GroupRbo, LocalRbo) {
        let o = operator_by_name(name).unwrap();
        let b = diff_group_rbo(&o).unwrap().rbo;
        let l =
            integrate_rbo(&b, o.g.clone(), o.h.clone(), o.action.clone(), radius, name).unwrap();
        (o, l)
    }

    #[test]
    fn adjoint_and_trivial_actions_differentiate_exactly() {
        let g = group_by_name("so3").unwrap();
        let conj = crate::group::Conjugation::adjoint(3);
        let phi = diff_action(&conj, &g, &g).unwrap();
        assert!(phi.is_adjoint(0.0));
        let phi = diff_action(&TrivialAction, &g, &g).unwrap();
        assert!(phi.mats.iter().all(|m| m.max_abs() == 0.0));
    }

    #[test]
    fn padded_action_differentiates_to_matrix_product() {
        // so(2) acting on ℝ² ≅ translations of E(2) by rotation
        let g = group_by_name("so(2)").unwrap();
        let h = group_by_name("euclidean(2)").unwrap();
        let act = crate::group::Conjugation {
            embedding: crate::group::Embedding::PadIdentity,
            target_dim: 3,
        };
        assert!(check_group_action(&act, &g, &h, &small(), 1e-12)
            .unwrap()
            .passed());
        let phi = diff_action(&act, &g, &h).unwrap();
        // rotation generator acts as ad on E(2): kills R01, rotates T0 → T1
        let expected = crate::lie::ActionPhi::adjoint(h.lie_algebra()).mats[0].clone();
        assert!((&phi.mats[0] - &expected).max_abs() < 1e-9);
    }

    #[test]
    fn euclidean_tangent_is_minus_translation() {
        let o = operator_by_name("euclidean(2)").unwrap();
        let d = diff_group_rbo(&o).unwrap();
        assert!(!d.shrunk);
        let expected = Matrix::diag(&[0.0, -1.0, -1.0]);
        assert!((&d.rbo.b - &expected).max_abs() < 1e-7);
        assert!(rbo_residual(&d.rbo) < 1e-9);
    }

    #[test]
    fn up2_tangent_is_unipotent_direction() {
        let o = operator_by_name("up2").unwrap();
        let d = diff_group_rbo(&o).unwrap().rbo;
        assert!(
            (&d.b - &Matrix::from_rows(&[vec![0.0], vec![1.0], vec![0.0]]).unwrap()).max_abs()
                < 1e-7
        );
        let ex = crate::rbo::tests::line_up2();
        assert!((&d.phi.mats[0] - &ex.phi.mats[0]).max_abs() < 1e-7);
    }

    #[test]
    fn trivial_operator_differentiates_to_zero() {
        let d = diff_group_rbo(&operator_by_name("trivial").unwrap()).unwrap();
        assert!(d.rbo.b.max_abs() < 1e-12);
    }

    #[test]
    fn step_shrinks_near_domain_boundary() {
        let mut o = operator_by_name("euclidean(2)").unwrap();
        o.domain_radius = 1e-5;
        let d = diff_group_rbo(&o).unwrap();
        assert!(d.shrunk && d.step < DEFAULT_STEP);
        assert!((&d.rbo.b - &Matrix::diag(&[0.0, -1.0, -1.0])).max_abs() < 1e-6);
    }

    #[test]
    fn integrated_operators_match_analytic_ones() {
        for (name, tol) in [
            ("euclidean(2)", 1e-8),
            ("euclidean(3)", 1e-8),
            ("up2", 1e-8),
            ("so3_inverse", 1e-8),
            ("gl_block(1,1)", 1e-7),
            ("gauss(2)", 1e-7),
        ] {
            let (o, l) = integrate_analytic(name, 0.3);
            let c = max_disagreement(&o, &l.op, &small()).unwrap();
            assert!(c.residual < tol, "{name}: {}", c.residual);
            assert!(l.cached_solves() > 0);
        }
    }

    #[test]
    fn integrated_operator_satisfies_local_identity() {
        let (_, l) = integrate_analytic("euclidean(2)", 0.3);
        let s = Sampling {
            count: 30,
            radius: 0.1,
            ..Sampling::default()
        };
        let r = check_local_rbo(&l, &s, 1e-9).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.checks[0].skipped.unwrap() < 5);
    }

    #[test]
    fn roundtrip_recovers_tangent() {
        for name in ["euclidean(2)", "up2", "so3_inverse", "gauss(2)"] {
            let (o, l) = integrate_analytic(name, 0.3);
            let b0 = diff_group_rbo(&o).unwrap().rbo.b;
            let b1 = diff_group_rbo(&l.op).unwrap().rbo.b;
            assert!((&b0 - &b1).max_abs() < 1e-6, "{name}");
        }
    }

    #[test]
    fn zero_operator_integrates_to_identity() {
        let g = group_by_name("so3").unwrap();
        let b = RelRbo::on_adjoint(g.lie_algebra(), Matrix::zeros(3, 3)).unwrap();
        let l = integrate_rbo(
            &b,
            g.clone(),
            g.clone(),
            Arc::new(crate::group::Conjugation::adjoint(3)),
            0.3,
            "zero",
        )
        .unwrap();
        let h = g.exp(&[0.1, 0.1, -0.05]).unwrap();
        assert!((&l.op.eval(&h).unwrap() - &g.identity()).max_abs() < 1e-14);
    }

    #[test]
    fn radii_agree_on_common_ball() {
        let (_, small_r) = integrate_analytic("so3_inverse", 0.2);
        let (_, big_r) = integrate_analytic("so3_inverse", 0.4);
        let s = Sampling {
            count: 10,
            radius: 0.2,
            ..Sampling::default()
        };
        assert!(
            max_disagreement(&small_r.op, &big_r.op, &s)
                .unwrap()
                .residual
                < 1e-9
        );
    }

    #[test]
    fn gate_rejects_mismatched_action() {
        let o = operator_by_name("euclidean(2)").unwrap();
        let b = diff_group_rbo(&o).unwrap().rbo;
        let err = integrate_rbo(
            &b,
            o.g.clone(),
            o.h.clone(),
            Arc::new(TrivialAction),
            0.3,
            "x",
        )
        .unwrap_err();
        assert!(matches!(err, Error::CheckFailed(_)), "{err}");
        let err = integrate_rbo(
            &b,
            o.g.clone(),
            o.h.clone(),
            o.action.clone(),
            f64::INFINITY,
            "x",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn descendent_exp_is_one_parameter_and_matches_flow() {
        for name in ["euclidean(2)", "up2", "so3_inverse"] {
            let o = operator_by_name(name).unwrap();
            let de = DescendentExp::from_group_rbo(&o).unwrap();
            let us: Vec<Vector> = vec![(0..o.h.dim()).map(|i| 0.3 - 0.2 * i as f64).collect()];
            let r = check_descendent_exp(&o, &de, &us, 1e-8).unwrap();
            assert!(r.passed(), "{name}: {r}");
            assert_eq!(de.exp(&vec![0.0; o.h.dim()]).unwrap(), o.h.identity());
        }
    }

    #[test]
    fn descendent_structures_are_compatible() {
        for name in ["euclidean(2)", "up2", "so3_inverse", "trivial", "gauss(2)"] {
            let o = operator_by_name(name).unwrap();
            let r = descendent_compat_check(&o, 1e-5).unwrap();
            assert!(r.passed(), "{name}: {r}");
        }
    }

    #[test]
    fn euclidean_theta_tangent_rotates_translations() {
        // θ((x, u))(y, v) = (0, x v)
        let o = operator_by_name("euclidean(2)").unwrap();
        let th = diff_group_rbo(&o).unwrap().rbo.theta_matrices();
        let r01 = &th[0];
        assert!((r01[(2, 1)] - 1.0).abs() < 1e-7 && (r01[(1, 2)] + 1.0).abs() < 1e-7);
        assert!(th[1].max_abs() < 1e-7 && th[2].max_abs() < 1e-7);
    }

    #[test]
    fn van_est_degree_one_is_identity() {
        let o = operator_by_name("euclidean(2)").unwrap();
        let f = GroupCochain::constant(vec![1.0, -2.0, 0.5]);
        assert_eq!(van_est(&o, &f).unwrap().coords, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn van_est_of_linear_log_cochain_is_the_linear_map() {
        let o = operator_by_name("euclidean(2)").unwrap();
        let a = Matrix::from_rows(&[
            vec![1.0, 2.0, 0.0],
            vec![0.0, -1.0, 3.0],
            vec![0.5, 0.0, 1.0],
        ])
        .unwrap();
        let (h, a2) = (o.h.clone(), a.clone());
        let f = GroupCochain::new(2, move |hs: &[Matrix]| Ok(a2.matvec(&h.log(&hs[0])?)));
        let c = van_est(&o, &f).unwrap();
        // the tangent of Exp_⋆ at 0 is the identity
        assert!((&c.to_operator().unwrap() - &a).max_abs() < 1e-9);
    }

    #[test]
    fn van_est_of_polynomial_cochain() {
        // F(A, α) = (α₀ + α₀α₁, A₁₀, α₁²): first-order term is (u₀, x, 0)
        let o = operator_by_name("euclidean(2)").unwrap();
        let f = GroupCochain::new(2, |hs: &[Matrix]| {
            let (a, al) = euclidean_parts(&hs[0]);
            Ok(vec![al[0] + al[0] * al[1], a[(1, 0)], al[1] * al[1]])
        });
        let b = van_est(&o, &f).unwrap().to_operator().unwrap();
        let expected = Matrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!((&b - &expected).max_abs() < 1e-8, "{b:?}");
    }

    #[test]
    fn van_est_is_alternating() {
        let o = operator_by_name("euclidean(2)").unwrap();
        let de = DescendentExp::from_group_rbo(&o).unwrap();
        let h = o.h.clone();
        let f = GroupCochain::new(3, move |hs: &[Matrix]| {
            let (a, b) = (h.log(&hs[0])?, h.log(&hs[1])?);
            Ok(vec![
                a[0] * b[1] + a[2] * a[2] * b[0],
                a[1] * b[1],
                (a[2] + b[0]).sin(),
            ])
        });
        let u1 = vec![0.3, -0.1, 0.7];
        let u2 = vec![-0.4, 0.2, 0.5];
        let x = van_est_eval(&de, &f, &[u1.clone(), u2.clone()]).unwrap();
        let y = van_est_eval(&de, &f, &[u2, u1]).unwrap();
        assert!(max_abs(&crate::linalg::add(&x, &y)) < 1e-8);
    }

    #[test]
    fn van_est_degree_cap() {
        let o = operator_by_name("euclidean(2)").unwrap();
        let f = GroupCochain::new(4, |_| Ok(vec![0.0; 3]));
        assert!(matches!(van_est(&o, &f), Err(Error::Unsupported(_))));
    }

    #[test]
    fn van_est_commutes_with_differentials() {
        let o = operator_by_name("euclidean(2)").unwrap();
        let r =
            van_est_square_check(&o, &GroupCochain::constant(vec![0.3, 1.0, -2.0]), 1e-4).unwrap();
        assert!(r.passed(), "{r}");
        let h = o.h.clone();
        let lin = GroupCochain::new(2, move |hs: &[Matrix]| {
            let c = h.log(&hs[0])?;
            Ok(vec![c[0] + 2.0 * c[1], -c[2], c[1] + c[0]])
        });
        let r = van_est_square_check(&o, &lin, 1e-4).unwrap();
        assert!(r.passed(), "{r}");
        let t = operator_by_name("trivial").unwrap();
        let h = t.h.clone();
        let f = GroupCochain::new(2, move |hs: &[Matrix]| {
            let c = h.log(&hs[0])?;
            Ok(vec![c[0] * c[1], c[2], c[0]])
        });
        let r = van_est_square_check(&t, &f, 1e-4).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn polynomial_cochains_commute_with_van_est() {
        let o = operator_by_name("euclidean(2)").unwrap();
        for k in [1, 2] {
            let f = polynomial_cochain(&o.h, o.g.dim(), k).unwrap();
            let r = van_est_square_check(&o, &f, 1e-4).unwrap();
            assert!(r.passed(), "degree {k}: {r}");
        }
        assert!(polynomial_cochain(&o.h, 3, 3).is_err());
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        for (q, s) in p {
            let inv = (0..3)
                .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
                .filter(|&(i, j)| q[i] > q[j])
                .count();
            assert_eq!(s, if inv % 2 == 0 { 1.0 } else { -1.0 });
        }
    }
}
