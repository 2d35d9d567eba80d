//! Matrix Lie groups, actions, group operators, descendent groups, the
//! action Θ, semidirect products and the group cochain complex.

mod registry;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use registry::{
    euclidean_element, euclidean_parts, gauss_factor, group_by_name, operator_by_name,
    trivial_operator, OPERATOR_NAMES,
};

use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, MatrixCoords};
use crate::linalg::{
    directional_derivative, gauss_legendre8, mat_exp, mat_log, max_abs, rk4_pair_flow, rk4_steps,
    sub, Matrix, Vector,
};
use crate::report::{Check, Report};

/// Default sampling seed: the ASCII bytes of "RB01".
pub const DEFAULT_SEED: u64 = 0x5242_3031;
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_RADIUS: f64 = 0.3;

// Wide enough that round-off stays below 1e-12, so the result can be
// differentiated again.
const THETA_STEP: f64 = 1e-3;

/// Group of invertible `N×N` matrices generated by a Lie algebra basis.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    name: String,
    ambient_dim: usize,
    coords: MatrixCoords,
    algebra: LieAlgebra,
}

impl MatrixGroup {
    pub fn new(
        name: impl Into<String>,
        ambient_dim: usize,
        basis: Vec<Matrix>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if basis
            .iter()
            .any(|b| b.rows() != ambient_dim || b.cols() != ambient_dim)
        {
            return Err(Error::dim(format!(
                "algebra basis matrices must be {ambient_dim}x{ambient_dim}"
            )));
        }
        let coords = MatrixCoords::new(&basis)?;
        let algebra = LieAlgebra::from_matrix_basis(&basis, labels)?;
        Ok(MatrixGroup {
            name: name.into(),
            ambient_dim,
            coords,
            algebra,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn lie_algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn algebra_basis(&self) -> &[Matrix] {
        self.coords.basis()
    }

    pub fn identity(&self) -> Matrix {
        Matrix::identity(self.ambient_dim)
    }

    pub fn algebra_element(&self, c: &[f64]) -> Matrix {
        self.coords.element(c, self.ambient_dim)
    }

    pub fn algebra_coords(&self, x: &Matrix) -> Vector {
        self.coords.coords(x)
    }

    pub fn exp(&self, c: &[f64]) -> Result<Matrix> {
        if c.len() != self.dim() {
            return Err(Error::dim(format!(
                "{} coordinates for a {}-dim group",
                c.len(),
                self.dim()
            )));
        }
        mat_exp(&self.algebra_element(c))
    }

    /// Coordinates of the principal logarithm.
    pub fn log(&self, g: &Matrix) -> Result<Vector> {
        Ok(self.coords.coords(&mat_log(g)?))
    }

    /// `‖log g‖_F` on the ambient matrix.
    pub fn log_norm(&self, g: &Matrix) -> Result<f64> {
        Ok(mat_log(g)?.norm_fro())
    }

    /// Whether `basis` and structure agree with another group's algebra.
    pub fn same_algebra(&self, other: &MatrixGroup) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() == other.dim()
            && self
                .algebra_basis()
                .iter()
                .zip(other.algebra_basis())
                .all(|(a, b)| a == b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionKind {
    Trivial,
    /// Conjugation of `G` on itself.
    Adjoint,
    General,
}

/// Smooth action `Φ: G → Aut(H)` of one matrix group on another.
pub trait GroupAction: Send + Sync + fmt::Debug {
    /// `Φ(g)h`
    fn act(&self, g: &Matrix, h: &Matrix) -> Result<Matrix>;
    /// `Φ̃(g)u` on ambient Lie algebra elements of `H`.
    fn act_algebra(&self, g: &Matrix, u: &Matrix) -> Result<Matrix>;
    fn kind(&self) -> ActionKind {
        ActionKind::General
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedding {
    /// `G` and `H` share an ambient space.
    Identity,
    /// `g ↦ diag(g, I)` into a larger ambient space.
    PadIdentity,
    /// `g ↦ diag(g₁₁, 1)`, scaling the off-diagonal entry of a 2×2 unipotent.
    TopLeftScalar,
}

/// `Φ(g)h = ι(g) h ι(g)⁻¹` for an embedding `ι`.
#[derive(Clone, Debug)]
pub struct Conjugation {
    pub embedding: Embedding,
    pub target_dim: usize,
}

impl Conjugation {
    pub fn adjoint(n: usize) -> Self {
        Conjugation {
            embedding: Embedding::Identity,
            target_dim: n,
        }
    }

    fn embed(&self, g: &Matrix) -> Result<Matrix> {
        match self.embedding {
            Embedding::Identity => Ok(g.clone()),
            Embedding::PadIdentity => {
                if g.rows() > self.target_dim {
                    return Err(Error::dim("cannot pad into a smaller space"));
                }
                let mut m = Matrix::identity(self.target_dim);
                m.set_block(0, 0, g);
                Ok(m)
            }
            Embedding::TopLeftScalar => {
                let mut m = Matrix::identity(self.target_dim);
                m[(0, 0)] = g[(0, 0)];
                Ok(m)
            }
        }
    }
}

impl GroupAction for Conjugation {
    fn act(&self, g: &Matrix, h: &Matrix) -> Result<Matrix> {
        let e = self.embed(g)?;
        Ok(&(&e * h) * &e.inverse()?)
    }

    fn act_algebra(&self, g: &Matrix, u: &Matrix) -> Result<Matrix> {
        self.act(g, u)
    }

    fn kind(&self) -> ActionKind {
        match self.embedding {
            Embedding::Identity => ActionKind::Adjoint,
            _ => ActionKind::General,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrivialAction;

impl GroupAction for TrivialAction {
    fn act(&self, _g: &Matrix, h: &Matrix) -> Result<Matrix> {
        Ok(h.clone())
    }

    fn act_algebra(&self, _g: &Matrix, u: &Matrix) -> Result<Matrix> {
        Ok(u.clone())
    }

    fn kind(&self) -> ActionKind {
        ActionKind::Trivial
    }
}

/// `Φ̃(g)` as a matrix in the coordinates of `h`.
pub fn induced_matrix(action: &dyn GroupAction, g: &Matrix, h: &MatrixGroup) -> Result<Matrix> {
    let cols = (0..h.dim())
        .map(|j| Ok(h.algebra_coords(&action.act_algebra(g, &h.algebra_basis()[j])?)))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_columns(&cols)
}

/// Smooth map between matrix groups, evaluated pointwise.
pub type GroupMap = Arc<dyn Fn(&Matrix) -> Result<Matrix> + Send + Sync>;

/// A (possibly local) relative Rota-Baxter operator `𝓑: U ⊆ H → G`.
#[derive(Clone)]
pub struct GroupRbo {
    pub name: String,
    pub g: MatrixGroup,
    pub h: MatrixGroup,
    pub action: Arc<dyn GroupAction>,
    pub map: GroupMap,
    /// `h` is in the domain iff `‖log h‖_F ≤ domain_radius`.
    pub domain_radius: f64,
}

impl fmt::Debug for GroupRbo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupRbo")
            .field("name", &self.name)
            .field("g", &self.g.name())
            .field("h", &self.h.name())
            .field("action", &self.action)
            .field("domain_radius", &self.domain_radius)
            .finish()
    }
}

impl GroupRbo {
    pub fn in_domain(&self, h: &Matrix) -> bool {
        if self.domain_radius.is_infinite() {
            return true;
        }
        matches!(self.h.log_norm(h), Ok(r) if r <= self.domain_radius)
    }

    pub fn eval(&self, h: &Matrix) -> Result<Matrix> {
        if !self.in_domain(h) {
            return Err(Error::Domain(format!(
                "element outside the log-ball of radius {}",
                self.domain_radius
            )));
        }
        (self.map)(h)
    }

    pub fn act(&self, g: &Matrix, h: &Matrix) -> Result<Matrix> {
        self.action.act(g, h)
    }

    pub fn semidirect(&self) -> SemidirectGroup {
        SemidirectGroup {
            g: self.g.clone(),
            h: self.h.clone(),
            action: self.action.clone(),
        }
    }
}

/// Deterministic sampling parameters for group identity sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub count: usize,
    pub radius: f64,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            count: DEFAULT_SAMPLES,
            radius: DEFAULT_RADIUS,
            seed: DEFAULT_SEED,
        }
    }
}

impl Sampling {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Points `exp(X)` with `X` uniform in the coordinate ball, rescaled so that
/// `‖X‖_F` is at most `radius`.
pub fn sample_elements(
    group: &MatrixGroup,
    count: usize,
    radius: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Matrix>> {
    let d = group.dim();
    let mut out = Vec::with_capacity(count);
    if d == 0 {
        return Ok(vec![group.identity(); count]);
    }
    while out.len() < count {
        let c: Vector = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = crate::linalg::norm2(&c);
        if r > 1.0 || r == 0.0 {
            continue;
        }
        let x = group.algebra_element(&c);
        let x = x.scale(radius * r / x.norm_fro());
        out.push(mat_exp(&x)?);
    }
    Ok(out)
}

/// Uniformly random direction in coordinates, `‖x‖₂ = 1`.
pub fn random_unit_coords(dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let c: Vector = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = crate::linalg::norm2(&c);
        if r > 1e-3 && r <= 1.0 {
            return c.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Sampled residual of `𝓑(h₁)𝓑(h₂) = 𝓑(h₁·Φ(𝓑(h₁))h₂)`; pairs whose composed
/// argument leaves the domain are skipped and counted.
pub fn check_group_rbo(o: &GroupRbo, s: &Sampling, tol: f64) -> Result<Report> {
    let mut rng = s.rng();
    let h1s = sample_elements(&o.h, s.count, s.radius, &mut rng)?;
    let h2s = sample_elements(&o.h, s.count, s.radius, &mut rng)?;
    let mut worst: f64 = 0.0;
    let (mut done, mut skipped) = (0, 0);
    for (h1, h2) in h1s.iter().zip(&h2s) {
        let eval = || -> Result<f64> {
            let b1 = o.eval(h1)?;
            let b2 = o.eval(h2)?;
            let arg = h1 * &o.act(&b1, h2)?;
            let rhs = o.eval(&arg)?;
            Ok((&(&b1 * &b2) - &rhs).max_abs())
        };
        match eval() {
            Ok(r) => {
                worst = worst.max(r);
                done += 1;
            }
            Err(Error::Domain(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let mut r = Report::new("group rbo");
    r.push(Check::new("operator identity", worst, tol).with_counts(done, skipped));
    Ok(r)
}

/// `h₁ ⋆ h₂ = h₁·Φ(𝓑(h₁))h₂`
pub fn star(o: &GroupRbo, h1: &Matrix, h2: &Matrix) -> Result<Matrix> {
    let b1 = o.eval(h1)?;
    Ok(h1 * &o.act(&b1, h2)?)
}

/// `h† = Φ(𝓑(h)⁻¹)h⁻¹`
pub fn dag(o: &GroupRbo, h: &Matrix) -> Result<Matrix> {
    let b = o.eval(h)?;
    o.act(&b.inverse()?, &h.inverse()?)
}

/// `Θ(h)g = 𝓑(Φ(g)h†)⁻¹·g·𝓑(h†)`
pub fn theta_group_action(o: &GroupRbo, h: &Matrix, g: &Matrix) -> Result<Matrix> {
    let hd = dag(o, h)?;
    let left = o.eval(&o.act(g, &hd)?)?.inverse()?;
    Ok(&(&left * g) * &o.eval(&hd)?)
}

/// Tangent of `g ↦ Θ(h)g` at the identity, as a matrix on the coordinates of `g`.
pub fn theta_linearized(o: &GroupRbo, h: &Matrix) -> Result<Matrix> {
    let n = o.g.dim();
    let cols = (0..n)
        .map(|i| {
            directional_derivative(
                |t| {
                    let g = mat_exp(&o.g.algebra_basis()[i].scale(t))?;
                    o.g.log(&theta_group_action(o, h, &g)?)
                },
                THETA_STEP,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_columns(&cols)
}

/// Sampled checks of the descendent group `(H, ⋆)`: identity, inverse,
/// associativity and `𝓑(h†) = 𝓑(h)⁻¹`.
pub fn check_descendent_group(o: &GroupRbo, s: &Sampling, tol: f64) -> Result<Report> {
    let mut rng = s.rng();
    let hs = sample_elements(&o.h, s.count, s.radius, &mut rng)?;
    let ks = sample_elements(&o.h, s.count, s.radius, &mut rng)?;
    let ls = sample_elements(&o.h, s.count, s.radius, &mut rng)?;
    let e = o.h.identity();
    let (mut ident, mut inv, mut assoc, mut bdag): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let (mut done, mut skipped) = (0, 0);
    for ((h, k), l) in hs.iter().zip(&ks).zip(&ls) {
        let eval = || -> Result<[f64; 4]> {
            let a = (&star(o, h, &e)? - h)
                .max_abs()
                .max((&star(o, &e, h)? - h).max_abs());
            let hd = dag(o, h)?;
            let b = (&star(o, h, &hd)? - &e)
                .max_abs()
                .max((&star(o, &hd, h)? - &e).max_abs());
            let c = (&star(o, &star(o, h, k)?, l)? - &star(o, h, &star(o, k, l)?)?).max_abs();
            let d = (&o.eval(&hd)? - &o.eval(h)?.inverse()?).max_abs();
            Ok([a, b, c, d])
        };
        match eval() {
            Ok([a, b, c, d]) => {
                ident = ident.max(a);
                inv = inv.max(b);
                assoc = assoc.max(c);
                bdag = bdag.max(d);
                done += 1;
            }
            Err(Error::Domain(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let mut r = Report::new("descendent group");
    for (name, v) in [
        ("identity", ident),
        ("inverse", inv),
        ("associativity", assoc),
        ("B(dag) = B^-1", bdag),
    ] {
        r.push(Check::new(name, v, tol).with_counts(done, skipped));
    }
    Ok(r)
}

/// Sampled checks that Θ is an action of `(H, ⋆)` on `G` fixing `e_G`.
pub fn check_theta_action(o: &GroupRbo, s: &Sampling, tol: f64) -> Result<Report> {
    let mut rng = s.rng();
    let hs = sample_elements(&o.h, s.count, s.radius, &mut rng)?;
    let ks = sample_elements(&o.h, s.count, s.radius, &mut rng)?;
    let gs = sample_elements(&o.g, s.count, s.radius, &mut rng)?;
    let eh = o.h.identity();
    let eg = o.g.identity();
    let (mut unit, mut comp, mut fix): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let (mut done, mut skipped) = (0, 0);
    for ((h, k), g) in hs.iter().zip(&ks).zip(&gs) {
        let eval = || -> Result<[f64; 3]> {
            let a = (&theta_group_action(o, &eh, g)? - g).max_abs();
            let hk = star(o, h, k)?;
            let lhs = theta_group_action(o, &hk, g)?;
            let rhs = theta_group_action(o, h, &theta_group_action(o, k, g)?)?;
            let c = (&theta_group_action(o, h, &eg)? - &eg).max_abs();
            Ok([a, (&lhs - &rhs).max_abs(), c])
        };
        match eval() {
            Ok([a, b, c]) => {
                unit = unit.max(a);
                comp = comp.max(b);
                fix = fix.max(c);
                done += 1;
            }
            Err(Error::Domain(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let mut r = Report::new("theta action");
    for (name, v) in [
        ("unit acts trivially", unit),
        ("composition", comp),
        ("fixes identity", fix),
    ] {
        r.push(Check::new(name, v, tol).with_counts(done, skipped));
    }
    Ok(r)
}

/// Sampled action axioms: `Φ(e) = id`, `Φ(g₁g₂) = Φ(g₁)Φ(g₂)`, `Φ(g)` multiplicative.
pub fn check_group_action(
    action: &dyn GroupAction,
    g: &MatrixGroup,
    h: &MatrixGroup,
    s: &Sampling,
    tol: f64,
) -> Result<Report> {
    let mut rng = s.rng();
    let g1s = sample_elements(g, s.count, s.radius, &mut rng)?;
    let g2s = sample_elements(g, s.count, s.radius, &mut rng)?;
    let h1s = sample_elements(h, s.count, s.radius, &mut rng)?;
    let h2s = sample_elements(h, s.count, s.radius, &mut rng)?;
    let (mut unit, mut hom, mut aut): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..s.count {
        let (g1, g2, h1, h2) = (&g1s[i], &g2s[i], &h1s[i], &h2s[i]);
        unit = unit.max((&action.act(&g.identity(), h1)? - h1).max_abs());
        let lhs = action.act(&(g1 * g2), h1)?;
        let rhs = action.act(g1, &action.act(g2, h1)?)?;
        hom = hom.max((&lhs - &rhs).max_abs());
        let lhs = action.act(g1, &(h1 * h2))?;
        let rhs = &action.act(g1, h1)? * &action.act(g1, h2)?;
        aut = aut.max((&lhs - &rhs).max_abs());
    }
    let mut r = Report::new("group action");
    r.check("identity", unit, tol)
        .check("homomorphism", hom, tol)
        .check("automorphisms", aut, tol);
    Ok(r)
}

/// `G ⋉_Φ H` with pairs of ambient matrices.
#[derive(Clone, Debug)]
pub struct SemidirectGroup {
    pub g: MatrixGroup,
    pub h: MatrixGroup,
    pub action: Arc<dyn GroupAction>,
}

pub type Pair = (Matrix, Matrix);

impl SemidirectGroup {
    /// `(g₁g₂, h₁·Φ(g₁)h₂)`
    pub fn multiply(&self, a: &Pair, b: &Pair) -> Result<Pair> {
        Ok((&a.0 * &b.0, &a.1 * &self.action.act(&a.0, &b.1)?))
    }

    pub fn inverse(&self, a: &Pair) -> Result<Pair> {
        let gi = a.0.inverse()?;
        let hi = self.action.act(&gi, &a.1.inverse()?)?;
        Ok((gi, hi))
    }

    pub fn identity(&self) -> Pair {
        (self.g.identity(), self.h.identity())
    }

    /// Exponential of `(x, u)` in coordinates. Uses a closed form when one is
    /// available, RK4 otherwise.
    pub fn exp(&self, x: &[f64], u: &[f64]) -> Result<Pair> {
        if x.len() != self.g.dim() || u.len() != self.h.dim() {
            return Err(Error::dim("semidirect exponential coordinates"));
        }
        let xm = self.g.algebra_element(x);
        let um = self.h.algebra_element(u);
        if max_abs(x) == 0.0 {
            return Ok((self.g.identity(), mat_exp(&um)?));
        }
        match self.action.kind() {
            ActionKind::Trivial => Ok((mat_exp(&xm)?, mat_exp(&um)?)),
            ActionKind::Adjoint if self.g.same_algebra(&self.h) => {
                // (g, h) ↦ (hg, g) identifies G ⋉_Ad G with G × G
                Ok((
                    mat_exp(&xm)?,
                    &mat_exp(&(&um + &xm))? * &mat_exp(&xm.scale(-1.0))?,
                ))
            }
            _ if self.h.lie_algebra().is_abelian(0.0) => {
                let v = gauss_legendre8(|s| self.action.act_algebra(&mat_exp(&xm.scale(s))?, &um))?;
                Ok((mat_exp(&xm)?, mat_exp(&v)?))
            }
            _ => self.exp_rk4(x, u),
        }
    }

    /// The exponential by integrating the left-invariant field with RK4.
    pub fn exp_rk4(&self, x: &[f64], u: &[f64]) -> Result<Pair> {
        let xm = self.g.algebra_element(x);
        let um = self.h.algebra_element(u);
        let norm = (xm.norm_fro().powi(2) + um.norm_fro().powi(2)).sqrt();
        let failed = std::sync::Mutex::new(None);
        let out = rk4_pair_flow(
            &xm,
            &um,
            |g, u| match self.action.act_algebra(g, u) {
                Ok(m) => m,
                Err(e) => {
                    *failed.lock().unwrap() = Some(e);
                    Matrix::zeros(u.rows(), u.cols())
                }
            },
            rk4_steps(norm),
        );
        match failed.into_inner().unwrap() {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

pub type CochainFn = Arc<dyn Fn(&[Matrix]) -> Result<Vector> + Send + Sync>;

/// Smooth `g`-valued cochain on `H^{k-1}`; coordinates in the basis of `g`.
#[derive(Clone)]
pub struct GroupCochain {
    pub k: usize,
    pub f: CochainFn,
}

impl fmt::Debug for GroupCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupCochain(k={})", self.k)
    }
}

impl GroupCochain {
    pub fn new(k: usize, f: impl Fn(&[Matrix]) -> Result<Vector> + Send + Sync + 'static) -> Self {
        GroupCochain { k, f: Arc::new(f) }
    }

    /// Degree-1 cochain: a constant element of `g`.
    pub fn constant(c: Vector) -> Self {
        GroupCochain::new(1, move |_| Ok(c.clone()))
    }

    pub fn eval(&self, args: &[Matrix]) -> Result<Vector> {
        if args.len() + 1 != self.k {
            return Err(Error::dim(format!(
                "degree-{} cochain takes {} arguments",
                self.k,
                self.k - 1
            )));
        }
        (self.f)(args)
    }
}

/// `(dF)(h₁..h_k) = Θ(h₁)F(h₂..) + Σᵢ(−1)ⁱF(.., hᵢ⋆hᵢ₊₁, ..) + (−1)^k F(h₁..h_{k−1})`
pub fn group_cochain_differential(o: &GroupRbo, f: &GroupCochain) -> GroupCochain {
    let o = o.clone();
    let f = f.clone();
    let k = f.k;
    GroupCochain::new(k + 1, move |hs: &[Matrix]| {
        let theta = theta_linearized(&o, &hs[0])?;
        let mut acc = theta.matvec(&f.eval(&hs[1..])?);
        for i in 1..k {
            let mut args: Vec<Matrix> = hs[..i - 1].to_vec();
            args.push(star(&o, &hs[i - 1], &hs[i])?);
            args.extend_from_slice(&hs[i + 1..]);
            let v = f.eval(&args)?;
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc.iter_mut().zip(&v).for_each(|(a, b)| *a += s * b);
        }
        let v = f.eval(&hs[..k - 1])?;
        let s = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        acc.iter_mut().zip(&v).for_each(|(a, b)| *a += s * b);
        Ok(acc)
    })
}

/// Largest `|d(dF)|` over sampled tuples. Tuples whose products leave the
/// operator's domain are skipped and counted.
pub fn check_group_d_squared(
    o: &GroupRbo,
    f: &GroupCochain,
    tuples: usize,
    s: &Sampling,
    tol: f64,
) -> Result<Report> {
    let ddf = group_cochain_differential(o, &group_cochain_differential(o, f));
    let mut rng = s.rng();
    let n = ddf.k - 1;
    let (mut worst, mut done, mut skipped): (f64, usize, usize) = (0.0, 0, 0);
    for _ in 0..tuples {
        let hs = sample_elements(&o.h, n, s.radius, &mut rng)?;
        match ddf.eval(&hs) {
            Ok(v) => {
                worst = worst.max(max_abs(&v));
                done += 1;
            }
            Err(Error::Domain(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let mut r = Report::new("group d squared");
    r.push(Check::new("d∘d", worst, tol).with_counts(done, skipped));
    Ok(r)
}

/// Homomorphism `(Ψ_G, Ψ_H)` from `src` to `dst`, checked at samples of `src.h`
/// and `src.g`: `𝓑∘Ψ_H = Ψ_G∘𝓑'`, `Ψ_H(Φ'(g)h) = Φ(Ψ_G g)Ψ_H h`, and
/// `Ψ_G∘Θ'(h) = Θ(Ψ_H h)∘Ψ_G`.
pub fn check_group_rbo_hom(
    psi_g: &GroupMap,
    psi_h: &GroupMap,
    src: &GroupRbo,
    dst: &GroupRbo,
    s: &Sampling,
    tol: f64,
) -> Result<Report> {
    let mut rng = s.rng();
    let hs = sample_elements(&src.h, s.count, s.radius, &mut rng)?;
    let gs = sample_elements(&src.g, s.count, s.radius, &mut rng)?;
    let (mut op, mut act, mut th): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (h, g) in hs.iter().zip(&gs) {
        let l = dst.eval(&psi_h(h)?)?;
        let r = psi_g(&src.eval(h)?)?;
        op = op.max((&l - &r).max_abs());
        let l = psi_h(&src.act(g, h)?)?;
        let r = dst.act(&psi_g(g)?, &psi_h(h)?)?;
        act = act.max((&l - &r).max_abs());
        let l = psi_g(&theta_group_action(src, h, g)?)?;
        let r = theta_group_action(dst, &psi_h(h)?, &psi_g(g)?)?;
        th = th.max((&l - &r).max_abs());
    }
    let mut r = Report::new("group rbo homomorphism");
    r.check("intertwines operators", op, tol)
        .check("intertwines actions", act, tol)
        .check("theta intertwining", th, tol);
    Ok(r)
}

/// Coordinates of `log` for a pair of vectors; helper for residual reporting.
pub fn coord_distance(group: &MatrixGroup, a: &Matrix, b: &Matrix) -> Result<f64> {
    Ok(max_abs(&sub(&group.log(a)?, &group.log(b)?)))
}

#[cfg(test)]
mod tests;
