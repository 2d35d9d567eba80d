//! Relative Rota-Baxter operators of weight 1 on Lie algebras.

use crate::error::{Error, Result};
use crate::lie::{
    algebra_by_name, check_action, is_homomorphism, is_subalgebra, parse_family,
    semidirect_unchecked, ActionPhi, LieAlgebra, LinearMap, Representation,
};
use crate::linalg::{basis_vector, max_abs, sub, Matrix, Vector};
use crate::report::Report;

/// Default gate tolerance for constructors that require a valid operator.
pub const GATE_TOL: f64 = 1e-8;

/// `B: h → g` together with the action `φ: g → Der(h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelRbo {
    pub phi: ActionPhi,
    pub b: Matrix,
}

impl RelRbo {
    pub fn new(phi: ActionPhi, b: Matrix) -> Result<Self> {
        if b.rows() != phi.g.dim() || b.cols() != phi.h.dim() {
            return Err(Error::dim(format!(
                "operator matrix is {}x{}, expected {}x{}",
                b.rows(),
                b.cols(),
                phi.g.dim(),
                phi.h.dim()
            )));
        }
        Ok(RelRbo { phi, b })
    }

    /// A (non-relative) operator on `g` with the adjoint action.
    pub fn on_adjoint(g: &LieAlgebra, b: Matrix) -> Result<Self> {
        Self::new(ActionPhi::adjoint(g), b)
    }

    pub fn g(&self) -> &LieAlgebra {
        &self.phi.g
    }

    pub fn h(&self) -> &LieAlgebra {
        &self.phi.h
    }

    pub fn apply(&self, u: &[f64]) -> Vector {
        self.b.matvec(u)
    }

    /// `[u,v]_B = φ(Bu)v − φ(Bv)u + [u,v]_h`
    pub fn descendent_bracket(&self, u: &[f64], v: &[f64]) -> Vector {
        let bu = self.apply(u);
        let bv = self.apply(v);
        let a = self.phi.act(&bu, v);
        let b = self.phi.act(&bv, u);
        let c = self.h().bracket(u, v);
        (0..a.len()).map(|k| a[k] - b[k] + c[k]).collect()
    }

    /// `θ(u)x = B(φ(x)u) + [Bu, x]_g` as matrices on `g`, without gating.
    pub fn theta_matrices(&self) -> Vec<Matrix> {
        let (gd, hd) = (self.g().dim(), self.h().dim());
        (0..hd)
            .map(|i| {
                let u = basis_vector(hd, i);
                let bu = self.apply(&u);
                let cols: Vec<Vector> = (0..gd)
                    .map(|j| {
                        let x = basis_vector(gd, j);
                        let a = self.apply(&self.phi.act(&x, &u));
                        let b = self.g().bracket(&bu, &x);
                        (0..gd).map(|k| a[k] + b[k]).collect()
                    })
                    .collect();
                Matrix::from_columns(&cols).unwrap_or_else(|_| Matrix::zeros(gd, gd))
            })
            .collect()
    }

    /// Copy with a different operator matrix.
    pub fn with_b(&self, b: Matrix) -> Result<Self> {
        Self::new(self.phi.clone(), b)
    }

    fn descendent_unchecked(&self) -> LieAlgebra {
        let hd = self.h().dim();
        let mut entries = Vec::new();
        for i in 0..hd {
            for j in i + 1..hd {
                let c = self.descendent_bracket(&basis_vector(hd, i), &basis_vector(hd, j));
                entries.push((i, j, c.into_iter().enumerate().collect::<Vec<_>>()));
            }
        }
        LieAlgebra::from_brackets(hd, self.h().labels().to_vec(), &entries)
            .expect("indices are in range")
    }
}

/// Residual of `[Bu,Bv] = B(φ(Bu)v − φ(Bv)u + [u,v])` over basis pairs.
pub fn rbo_residual(o: &RelRbo) -> f64 {
    let hd = o.h().dim();
    let mut worst: f64 = 0.0;
    for i in 0..hd {
        for j in i + 1..hd {
            let (u, v) = (basis_vector(hd, i), basis_vector(hd, j));
            let lhs = o.g().bracket(&o.apply(&u), &o.apply(&v));
            let rhs = o.apply(&o.descendent_bracket(&u, &v));
            worst = worst.max(max_abs(&sub(&lhs, &rhs)));
        }
    }
    worst
}

pub fn check_rbo(o: &RelRbo, tol: f64) -> Report {
    let mut r = Report::new("rbo");
    r.check("operator identity", rbo_residual(o), tol);
    r
}

fn gate(o: &RelRbo, tol: f64) -> Result<()> {
    let res = rbo_residual(o);
    if res <= tol {
        Ok(())
    } else {
        Err(Error::CheckFailed(format!(
            "operator identity residual {res:.3e} exceeds {tol:.1e}"
        )))
    }
}

/// `Gr(B) = {(Bu, u)}` inside `g ⋉_φ h`.
pub fn graph_subalgebra_check(o: &RelRbo, tol: f64) -> Report {
    let ambient = semidirect_unchecked(&o.phi);
    let (gd, hd) = (o.g().dim(), o.h().dim());
    let span: Vec<Vector> = (0..hd)
        .map(|i| {
            let mut v = o.b.column(i);
            v.extend(basis_vector(hd, i));
            debug_assert_eq!(v.len(), gd + hd);
            v
        })
        .collect();
    let mut r = is_subalgebra(&span, &ambient, tol);
    r.name = "graph".into();
    r
}

/// The descendent Lie algebra `(h, [·,·]_B)`.
pub fn descendent_algebra(o: &RelRbo, tol: f64) -> Result<LieAlgebra> {
    gate(o, tol)?;
    Ok(o.descendent_unchecked())
}

/// `θ` as a representation of the descendent algebra on `g`.
pub fn theta_rep(o: &RelRbo, tol: f64) -> Result<Representation> {
    gate(o, tol)?;
    Representation::new(o.descendent_unchecked(), o.g().dim(), o.theta_matrices())
}

/// `φ(x)[u,v]_B = [φ(x)u,v]_B + [u,φ(x)v]_B + φ(θ(v)x)u − φ(θ(u)x)v` over basis triples.
pub fn mixed_identity_check(o: &RelRbo, tol: f64) -> Report {
    let (gd, hd) = (o.g().dim(), o.h().dim());
    let theta = o.theta_matrices();
    let mut worst: f64 = 0.0;
    for a in 0..gd {
        let x = basis_vector(gd, a);
        for i in 0..hd {
            for j in i + 1..hd {
                let (u, v) = (basis_vector(hd, i), basis_vector(hd, j));
                let lhs = o.phi.act(&x, &o.descendent_bracket(&u, &v));
                let t1 = o.descendent_bracket(&o.phi.act(&x, &u), &v);
                let t2 = o.descendent_bracket(&u, &o.phi.act(&x, &v));
                let t3 = o.phi.act(&theta[j].matvec(&x), &u);
                let t4 = o.phi.act(&theta[i].matvec(&x), &v);
                let d: Vector = (0..hd)
                    .map(|k| lhs[k] - t1[k] - t2[k] - t3[k] + t4[k])
                    .collect();
                worst = worst.max(max_abs(&d));
            }
        }
    }
    let mut r = Report::new("mixed identity");
    r.check("phi/theta compatibility", worst, tol);
    r
}

/// A solution candidate of the modified Yang–Baxter equation on `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModifiedR {
    pub g: LieAlgebra,
    pub r: Matrix,
}

impl ModifiedR {
    pub fn new(g: LieAlgebra, r: Matrix) -> Result<Self> {
        if r.rows() != g.dim() || r.cols() != g.dim() {
            return Err(Error::dim("R must be square of size dim g"));
        }
        Ok(ModifiedR { g, r })
    }
}

/// `R = Id + 2B`; requires `h = g` and `φ = ad`.
pub fn to_modified_r(o: &RelRbo) -> Result<ModifiedR> {
    if !o.phi.is_adjoint(0.0) {
        return Err(Error::Unsupported(
            "operator is not on the adjoint action".into(),
        ));
    }
    let n = o.g().dim();
    ModifiedR::new(o.g().clone(), Matrix::identity(n).axpy(2.0, &o.b))
}

/// `B = (R − Id) / 2` on the adjoint action.
pub fn from_modified_r(r: &ModifiedR) -> RelRbo {
    let n = r.g.dim();
    let b = (&r.r - &Matrix::identity(n)).scale(0.5);
    RelRbo {
        phi: ActionPhi::adjoint(&r.g),
        b,
    }
}

/// Residual of `[Ru,Rv] = R[Ru,v] + R[u,Rv] − [u,v]` over basis pairs.
pub fn mybe_residual(r: &ModifiedR) -> f64 {
    let n = r.g.dim();
    let g = &r.g;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let (u, v) = (basis_vector(n, i), basis_vector(n, j));
            let (ru, rv) = (r.r.matvec(&u), r.r.matvec(&v));
            let lhs = g.bracket(&ru, &rv);
            let a = r.r.matvec(&g.bracket(&ru, &v));
            let b = r.r.matvec(&g.bracket(&u, &rv));
            let c = g.bracket(&u, &v);
            let d: Vector = (0..n).map(|k| lhs[k] - a[k] - b[k] + c[k]).collect();
            worst = worst.max(max_abs(&d));
        }
    }
    worst
}

pub fn check_mybe(r: &ModifiedR, tol: f64) -> Report {
    let mut rep = Report::new("mybe");
    rep.check("modified Yang-Baxter", mybe_residual(r), tol);
    rep
}

/// Homomorphism `(ψ_g, ψ_h)` from `src` (`B'`) to `dst` (`B`).
pub fn check_rbo_hom(
    psi_g: &LinearMap,
    psi_h: &LinearMap,
    src: &RelRbo,
    dst: &RelRbo,
    tol: f64,
) -> Report {
    let mut r = Report::new("rbo homomorphism");
    let shapes_ok = psi_g.m.rows() == dst.g().dim()
        && psi_g.m.cols() == src.g().dim()
        && psi_h.m.rows() == dst.h().dim()
        && psi_h.m.cols() == src.h().dim();
    if !shapes_ok {
        r.push(crate::report::Check::verdict("shapes", false));
        return r;
    }
    r.check(
        "psi_g homomorphism",
        is_homomorphism(psi_g, tol).residual(),
        tol,
    );
    r.check(
        "psi_h homomorphism",
        is_homomorphism(psi_h, tol).residual(),
        tol,
    );
    let lhs = &psi_g.m * &src.b;
    let rhs = &dst.b * &psi_h.m;
    r.check("intertwines operators", (&lhs - &rhs).max_abs(), tol);

    let (sg, sh) = (src.g().dim(), src.h().dim());
    let mut act: f64 = 0.0;
    for a in 0..sg {
        let x = basis_vector(sg, a);
        let px = psi_g.apply(&x);
        for i in 0..sh {
            let v = basis_vector(sh, i);
            let l = psi_h.apply(&src.phi.act(&x, &v));
            let rr = dst.phi.act(&px, &psi_h.apply(&v));
            act = act.max(max_abs(&sub(&l, &rr)));
        }
    }
    r.check("intertwines actions", act, tol);

    let mut desc: f64 = 0.0;
    for i in 0..sh {
        for j in i + 1..sh {
            let (u, v) = (basis_vector(sh, i), basis_vector(sh, j));
            let l = psi_h.apply(&src.descendent_bracket(&u, &v));
            let rr = dst.descendent_bracket(&psi_h.apply(&u), &psi_h.apply(&v));
            desc = desc.max(max_abs(&sub(&l, &rr)));
        }
    }
    r.check("descendent homomorphism", desc, tol);

    let th_src = src.theta_matrices();
    let th_dst = dst.theta_matrices();
    let mut theta: f64 = 0.0;
    for (i, ts) in th_src.iter().enumerate() {
        let pu = psi_h.m.column(i);
        let mut td = Matrix::zeros(dst.g().dim(), dst.g().dim());
        for (k, m) in th_dst.iter().enumerate() {
            td = td.axpy(pu[k], m);
        }
        let l = &psi_g.m * ts;
        let rr = &td * &psi_g.m;
        theta = theta.max((&l - &rr).max_abs());
    }
    r.check("theta intertwining", theta, tol);
    r
}

/// Convenience: action check, operator identity and graph criterion together.
pub fn full_check(o: &RelRbo, tol: f64) -> Report {
    let mut r = Report::new("operator");
    r.absorb(check_action(&o.phi, tol));
    r.absorb(check_rbo(o, tol));
    r.absorb(graph_subalgebra_check(o, tol));
    r
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "line_up2",
    "euclidean(n)",
    "gl_block(p,q)",
    "gauss(n)",
    "zero(<algebra>)",
    "neg_id(<algebra>)",
];

/// Built-in operators:
/// - `line_up2`: `r ↦ r·E12` from the line into `up2`, acting by the `E11` entry
/// - `euclidean(n)`: `(x, u) ↦ (0, −u)`
/// - `gl_block(p,q)`: minus the projection onto the lower-left block
/// - `gauss(n)`: minus the strictly lower part minus half the diagonal
/// - `zero(alg)`, `neg_id(alg)`: `0` and `−Id` on any registry algebra
pub fn builtin(name: &str) -> Result<RelRbo> {
    let name = name.trim();
    let wrapped = |prefix: &str| name.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'));
    if name == "line_up2" {
        let g = algebra_by_name("up2")?;
        let phi = ActionPhi::new(
            g,
            LieAlgebra::abelian(1),
            vec![
                Matrix::identity(1),
                Matrix::zeros(1, 1),
                Matrix::zeros(1, 1),
            ],
        )?;
        return RelRbo::new(phi, Matrix::from_rows(&[vec![0.0], vec![1.0], vec![0.0]])?);
    }
    if let Some(alg) = wrapped("zero(") {
        let g = algebra_by_name(alg)?;
        let n = g.dim();
        return RelRbo::on_adjoint(&g, Matrix::zeros(n, n));
    }
    if let Some(alg) = wrapped("neg_id(") {
        let g = algebra_by_name(alg)?;
        let n = g.dim();
        return RelRbo::on_adjoint(&g, Matrix::identity(n).scale(-1.0));
    }
    let (family, params) = parse_family(name)?;
    match (family.as_str(), params.as_slice()) {
        ("euclidean", [n]) if *n >= 1 => {
            let e = algebra_by_name(name)?;
            let r = n * (n - 1) / 2;
            let d = e.dim();
            RelRbo::on_adjoint(
                &e,
                Matrix::from_fn(d, d, |i, j| if i == j && i >= r { -1.0 } else { 0.0 }),
            )
        }
        ("gl_block", [p, q]) if *p >= 1 && *q >= 1 => {
            let g = algebra_by_name(name)?;
            let n = p + q;
            let b = Matrix::from_fn(n * n, n * n, |a, c| {
                let (i, j) = (a / n, a % n);
                if a == c && i >= *p && j < *p {
                    -1.0
                } else {
                    0.0
                }
            });
            RelRbo::on_adjoint(&g, b)
        }
        ("gauss", [n]) if *n >= 1 => {
            let n = *n;
            let g = algebra_by_name(&format!("gl({n})"))?;
            let b = Matrix::from_fn(n * n, n * n, |a, c| {
                let (i, j) = (a / n, a % n);
                match (a == c, i.cmp(&j)) {
                    (true, std::cmp::Ordering::Greater) => -1.0,
                    (true, std::cmp::Ordering::Equal) => -0.5,
                    _ => 0.0,
                }
            });
            RelRbo::on_adjoint(&g, b)
        }
        _ => Err(Error::Parse(format!(
            "unknown operator {name:?}; known: {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}
