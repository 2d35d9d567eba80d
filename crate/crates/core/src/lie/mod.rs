//! Lie algebras by structure constants, actions, representations and the
//! semidirect product `g ⋉ h`.

mod registry;

pub(crate) use registry::labelled_basis;
pub use registry::{algebra_by_name, matrix_basis, parse_family};

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, max_abs, orthonormal_basis, projection_residual, sub, Matrix, Vector,
};
use crate::report::Report;

/// `(i, j, [(k, c_ij^k), ...])` with `i < j`.
pub type BracketEntry = (usize, usize, Vec<(usize, f64)>);

/// Finite-dimensional Lie algebra with `[e_i, e_j] = Σ_k c[i][j][k] e_k`,
/// stored only for `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    labels: Vec<String>,
    consts: Vec<Vector>,
}

fn pair_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl LieAlgebra {
    /// The abelian algebra of the given dimension.
    pub fn abelian(dim: usize) -> Self {
        let labels = (0..dim).map(|i| format!("e{i}")).collect();
        Self::with_labels(dim, labels)
    }

    fn with_labels(dim: usize, labels: Vec<String>) -> Self {
        let pairs = dim * dim.saturating_sub(1) / 2;
        LieAlgebra {
            dim,
            labels,
            consts: vec![vec![0.0; dim]; pairs],
        }
    }

    /// Build from bracket entries `(i, j, [(k, coeff), ...])` with `i < j`.
    pub fn from_brackets(
        dim: usize,
        labels: Vec<String>,
        entries: &[BracketEntry],
    ) -> Result<Self> {
        if labels.len() != dim {
            return Err(Error::dim(format!(
                "{} labels for dimension {dim}",
                labels.len()
            )));
        }
        let mut a = Self::with_labels(dim, labels);
        for (i, j, terms) in entries {
            let (i, j) = (*i, *j);
            if !(i < j && j < dim) {
                return Err(Error::Parse(format!(
                    "bracket index pair ({i},{j}) must satisfy i<j<{dim}"
                )));
            }
            let p = pair_index(i, j, dim);
            for &(k, c) in terms {
                if k >= dim {
                    return Err(Error::Parse(format!("bracket target {k} out of range")));
                }
                if !c.is_finite() {
                    return Err(Error::Parse("non-finite structure constant".into()));
                }
                a.consts[p][k] += c;
            }
        }
        Ok(a)
    }

    /// Structure constants of the span of a commutator-closed set of matrices.
    pub fn from_matrix_basis(basis: &[Matrix], labels: Vec<String>) -> Result<Self> {
        let coords = MatrixCoords::new(basis)?;
        let n = basis.len();
        let mut a = Self::with_labels(n, labels);
        for i in 0..n {
            for j in i + 1..n {
                let br = basis[i].commutator(&basis[j]);
                let (c, res) = coords.coords_with_residual(&br);
                if res > 1e-10 * (1.0 + br.max_abs()) {
                    return Err(Error::Domain(format!(
                        "basis not closed under commutator at ({i},{j})"
                    )));
                }
                a.consts[pair_index(i, j, n)] = c;
            }
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.dim);
        self.labels = labels;
    }

    /// `[e_i, e_j]` in coordinates.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => vec![0.0; self.dim],
            Less => self.consts[pair_index(i, j, self.dim)].clone(),
            Greater => self.consts[pair_index(j, i, self.dim)]
                .iter()
                .map(|x| -x)
                .collect(),
        }
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vector {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 && y[i] == 0.0 {
                continue;
            }
            for j in i + 1..n {
                let w = x[i] * y[j] - x[j] * y[i];
                if w != 0.0 {
                    for (o, c) in out.iter_mut().zip(&self.consts[pair_index(i, j, n)]) {
                        *o += w * c;
                    }
                }
            }
        }
        out
    }

    /// Checked bracket for external callers.
    pub fn try_bracket(&self, x: &[f64], y: &[f64]) -> Result<Vector> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::dim(format!(
                "bracket of lengths {} and {} in dimension {}",
                x.len(),
                y.len(),
                self.dim
            )));
        }
        Ok(self.bracket(x, y))
    }

    /// Matrix of `ad_x`.
    pub fn ad(&self, x: &[f64]) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim)
            .map(|j| self.bracket(x, &basis_vector(self.dim, j)))
            .collect();
        Matrix::from_columns(&cols).unwrap_or_else(|_| Matrix::zeros(self.dim, self.dim))
    }

    pub fn is_abelian(&self, tol: f64) -> bool {
        self.consts.iter().all(|c| max_abs(c) <= tol)
    }

    /// Largest difference of structure constants against another algebra.
    pub fn constants_distance(&self, other: &LieAlgebra) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.consts
            .iter()
            .zip(&other.consts)
            .map(|(a, b)| max_abs(&sub(a, b)))
            .fold(0.0, f64::max)
    }

    /// Raw constants in `(i, j, coeffs)` form for serialization.
    pub fn bracket_entries(&self) -> Vec<BracketEntry> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let c = &self.consts[pair_index(i, j, self.dim)];
                let terms: Vec<(usize, f64)> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(k, v)| (k, *v))
                    .collect();
                if !terms.is_empty() {
                    out.push((i, j, terms));
                }
            }
        }
        out
    }

    /// Copy with one structure constant shifted; used to build counterexamples.
    pub fn perturbed(&self, i: usize, j: usize, k: usize, eps: f64) -> Self {
        let mut a = self.clone();
        a.consts[pair_index(i, j, self.dim)][k] += eps;
        a
    }
}

/// Coordinates of matrices in a fixed linearly independent basis.
#[derive(Clone, Debug)]
pub struct MatrixCoords {
    basis: Vec<Matrix>,
    gram_lu_inv: Matrix,
}

impl MatrixCoords {
    pub fn new(basis: &[Matrix]) -> Result<Self> {
        let n = basis.len();
        let gram = Matrix::from_fn(n, n, |i, j| {
            crate::linalg::dot(basis[i].as_slice(), basis[j].as_slice())
        });
        let inv = if n == 0 {
            Matrix::zeros(0, 0)
        } else {
            gram.inverse()
                .map_err(|_| Error::Domain("matrix basis is linearly dependent".into()))?
        };
        Ok(MatrixCoords {
            basis: basis.to_vec(),
            gram_lu_inv: inv,
        })
    }

    pub fn coords(&self, m: &Matrix) -> Vector {
        let rhs: Vector = self
            .basis
            .iter()
            .map(|b| crate::linalg::dot(b.as_slice(), m.as_slice()))
            .collect();
        self.gram_lu_inv.matvec(&rhs)
    }

    /// Coordinates plus the Frobenius distance of `m` from the span.
    pub fn coords_with_residual(&self, m: &Matrix) -> (Vector, f64) {
        let c = self.coords(m);
        let back = self.element(&c, m.rows());
        (c, (&back - m).norm_fro())
    }

    pub fn element(&self, c: &[f64], n: usize) -> Matrix {
        let mut acc = Matrix::zeros(n, n);
        for (b, &x) in self.basis.iter().zip(c) {
            if x != 0.0 {
                acc = acc.axpy(x, b);
            }
        }
        acc
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }
}

/// Linear map between two Lie algebras, `m` is `codomain.dim × domain.dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub domain: LieAlgebra,
    pub codomain: LieAlgebra,
    pub m: Matrix,
}

impl LinearMap {
    pub fn new(domain: LieAlgebra, codomain: LieAlgebra, m: Matrix) -> Result<Self> {
        if m.rows() != codomain.dim() || m.cols() != domain.dim() {
            return Err(Error::dim(format!(
                "map matrix is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        Ok(LinearMap {
            domain,
            codomain,
            m,
        })
    }

    pub fn identity(a: &LieAlgebra) -> Self {
        LinearMap {
            domain: a.clone(),
            codomain: a.clone(),
            m: Matrix::identity(a.dim()),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vector {
        self.m.matvec(x)
    }
}

/// Action `φ: g → Der(h)`; `mats[i]` is `φ(e_i)` in the basis of `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionPhi {
    pub g: LieAlgebra,
    pub h: LieAlgebra,
    pub mats: Vec<Matrix>,
}

impl ActionPhi {
    pub fn new(g: LieAlgebra, h: LieAlgebra, mats: Vec<Matrix>) -> Result<Self> {
        if mats.len() != g.dim() {
            return Err(Error::dim(format!(
                "{} action matrices for dim g = {}",
                mats.len(),
                g.dim()
            )));
        }
        if mats
            .iter()
            .any(|m| m.rows() != h.dim() || m.cols() != h.dim())
        {
            return Err(Error::dim(format!(
                "action matrices must be {0}x{0}",
                h.dim()
            )));
        }
        Ok(ActionPhi { g, h, mats })
    }

    pub fn adjoint(g: &LieAlgebra) -> Self {
        let mats = (0..g.dim())
            .map(|i| g.ad(&basis_vector(g.dim(), i)))
            .collect();
        ActionPhi {
            g: g.clone(),
            h: g.clone(),
            mats,
        }
    }

    pub fn zero(g: &LieAlgebra, h: &LieAlgebra) -> Self {
        ActionPhi {
            g: g.clone(),
            h: h.clone(),
            mats: vec![Matrix::zeros(h.dim(), h.dim()); g.dim()],
        }
    }

    /// `φ(x)` as a matrix.
    pub fn of(&self, x: &[f64]) -> Matrix {
        let n = self.h.dim();
        let mut acc = Matrix::zeros(n, n);
        for (m, &c) in self.mats.iter().zip(x) {
            if c != 0.0 {
                acc = acc.axpy(c, m);
            }
        }
        acc
    }

    /// `φ(x) u`
    pub fn act(&self, x: &[f64], u: &[f64]) -> Vector {
        let mut out = vec![0.0; self.h.dim()];
        for (m, &c) in self.mats.iter().zip(x) {
            if c != 0.0 {
                for (o, v) in out.iter_mut().zip(m.matvec(u)) {
                    *o += c * v;
                }
            }
        }
        out
    }

    /// Whether this is the adjoint action of `g` on itself.
    pub fn is_adjoint(&self, tol: f64) -> bool {
        self.g.dim() == self.h.dim()
            && self.g.constants_distance(&self.h) <= tol
            && self
                .mats
                .iter()
                .zip(&ActionPhi::adjoint(&self.g).mats)
                .all(|(a, b)| (a - b).max_abs() <= tol)
    }
}

/// Linear representation of an algebra on `R^space_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub algebra: LieAlgebra,
    pub space_dim: usize,
    pub mats: Vec<Matrix>,
}

impl Representation {
    pub fn new(algebra: LieAlgebra, space_dim: usize, mats: Vec<Matrix>) -> Result<Self> {
        if mats.len() != algebra.dim()
            || mats
                .iter()
                .any(|m| m.rows() != space_dim || m.cols() != space_dim)
        {
            return Err(Error::dim(
                "representation matrices do not match algebra/space",
            ));
        }
        Ok(Representation {
            algebra,
            space_dim,
            mats,
        })
    }

    pub fn of(&self, x: &[f64]) -> Matrix {
        let mut acc = Matrix::zeros(self.space_dim, self.space_dim);
        for (m, &c) in self.mats.iter().zip(x) {
            if c != 0.0 {
                acc = acc.axpy(c, m);
            }
        }
        acc
    }

    /// `ρ([e_i,e_j]) = [ρ(e_i), ρ(e_j)]` on basis pairs.
    pub fn check(&self, tol: f64) -> Report {
        let n = self.algebra.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let lhs = self.of(&self.algebra.bracket_basis(i, j));
                let rhs = self.mats[i].commutator(&self.mats[j]);
                worst = worst.max((&lhs - &rhs).max_abs());
            }
        }
        let mut r = Report::new("representation");
        r.check("homomorphism", worst, tol);
        r
    }
}

pub fn bracket(a: &LieAlgebra, x: &[f64], y: &[f64]) -> Result<Vector> {
    a.try_bracket(x, y)
}

pub fn check_jacobi(a: &LieAlgebra, tol: f64) -> Report {
    let n = a.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (x, y, z) = (basis_vector(n, i), basis_vector(n, j), basis_vector(n, k));
                let t1 = a.bracket(&a.bracket(&x, &y), &z);
                let t2 = a.bracket(&a.bracket(&y, &z), &x);
                let t3 = a.bracket(&a.bracket(&z, &x), &y);
                let s: Vector = (0..n).map(|l| t1[l] + t2[l] + t3[l]).collect();
                worst = worst.max(max_abs(&s));
            }
        }
    }
    let mut r = Report::new("jacobi");
    r.check("jacobi", worst, tol);
    r
}

pub fn check_action(phi: &ActionPhi, tol: f64) -> Report {
    let (gd, hd) = (phi.g.dim(), phi.h.dim());
    let mut der: f64 = 0.0;
    for x in 0..gd {
        let m = &phi.mats[x];
        for u in 0..hd {
            for v in u + 1..hd {
                let (eu, ev) = (basis_vector(hd, u), basis_vector(hd, v));
                let lhs = m.matvec(&phi.h.bracket_basis(u, v));
                let r1 = phi.h.bracket(&m.matvec(&eu), &ev);
                let r2 = phi.h.bracket(&eu, &m.matvec(&ev));
                let d: Vector = (0..hd).map(|k| lhs[k] - r1[k] - r2[k]).collect();
                der = der.max(max_abs(&d));
            }
        }
    }
    let mut hom: f64 = 0.0;
    for i in 0..gd {
        for j in i + 1..gd {
            let lhs = phi.of(&phi.g.bracket_basis(i, j));
            let rhs = phi.mats[i].commutator(&phi.mats[j]);
            hom = hom.max((&lhs - &rhs).max_abs());
        }
    }
    let mut r = Report::new("action");
    r.check("derivation", der, tol)
        .check("homomorphism", hom, tol);
    r
}

/// `g ⋉_φ h` with basis `(e_1..e_g, f_1..f_h)`.
pub fn semidirect_algebra(phi: &ActionPhi, tol: f64) -> Result<LieAlgebra> {
    let rep = check_action(phi, tol);
    if !rep.passed() {
        return Err(Error::CheckFailed(format!(
            "action check failed (residual {:.3e})",
            rep.residual()
        )));
    }
    Ok(semidirect_unchecked(phi))
}

pub(crate) fn semidirect_unchecked(phi: &ActionPhi) -> LieAlgebra {
    let (gd, hd) = (phi.g.dim(), phi.h.dim());
    let n = gd + hd;
    let mut labels: Vec<String> = phi.g.labels().to_vec();
    labels.extend(phi.h.labels().iter().map(|l| format!("h.{l}")));
    let mut a = LieAlgebra::with_labels(n, labels);
    for i in 0..n {
        for j in i + 1..n {
            let mut out = vec![0.0; n];
            if j < gd {
                out[..gd].copy_from_slice(&phi.g.bracket_basis(i, j));
            } else if i < gd {
                // [x, v] = φ(x) v
                out[gd..].copy_from_slice(&phi.mats[i].column(j - gd));
            } else {
                out[gd..].copy_from_slice(&phi.h.bracket_basis(i - gd, j - gd));
            }
            a.consts[pair_index(i, j, n)] = out;
        }
    }
    a
}

pub fn is_homomorphism(f: &LinearMap, tol: f64) -> Report {
    let n = f.domain.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let lhs = f.apply(&f.domain.bracket_basis(i, j));
            let rhs = f.codomain.bracket(&f.m.column(i), &f.m.column(j));
            worst = worst.max(max_abs(&sub(&lhs, &rhs)));
        }
    }
    let mut r = Report::new("homomorphism");
    r.check("bracket", worst, tol);
    r
}

/// Whether the span of `vectors` is closed under the bracket of `ambient`.
pub fn is_subalgebra(vectors: &[Vector], ambient: &LieAlgebra, tol: f64) -> Report {
    let q = orthonormal_basis(vectors, 1e-9);
    let mut worst: f64 = 0.0;
    for (i, x) in vectors.iter().enumerate() {
        for y in &vectors[i + 1..] {
            worst = worst.max(projection_residual(&ambient.bracket(x, y), &q));
        }
    }
    let mut r = Report::new("subalgebra");
    r.check("closure", worst, tol);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn so3() -> LieAlgebra {
        algebra_by_name("so3").unwrap()
    }

    fn cross(a: &[f64], b: &[f64]) -> Vector {
        vec![
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[test]
    fn so3_bracket_is_cross_product() {
        let a = so3();
        assert_eq!(
            a.bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]),
            vec![0.0, 0.0, 1.0]
        );
        let x = [0.3, -1.2, 2.0];
        let y = [1.5, 0.25, -0.5];
        let d = sub(&a.bracket(&x, &y), &cross(&x, &y));
        assert!(max_abs(&d) < 1e-15);
        assert!(max_abs(&a.bracket(&x, &x)) == 0.0);
    }

    #[test]
    fn abelian_bracket_vanishes() {
        let a = LieAlgebra::abelian(4);
        assert_eq!(
            a.bracket(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]),
            vec![0.0; 4]
        );
    }

    #[test]
    fn bracket_length_mismatch() {
        assert!(bracket(&so3(), &[1.0, 0.0], &[0.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn jacobi_examples() {
        let r = check_jacobi(&so3(), 0.0);
        assert!(r.passed());
        assert_eq!(r.residual(), 0.0);
        assert!(check_jacobi(&algebra_by_name("up2").unwrap(), 1e-14).passed());
        // [e1,e2] = e3 + eps e1 breaks Jacobi: [[e1,e2],e3]+... = eps [e1,e3] = -eps e2
        let bad = so3().perturbed(0, 1, 0, 1e-3);
        assert!(!check_jacobi(&bad, 1e-6).passed());
    }

    #[test]
    fn action_examples() {
        assert!(check_action(&ActionPhi::adjoint(&so3()), 1e-14).passed());
        let up2 = algebra_by_name("up2").unwrap();
        let line = LieAlgebra::abelian(1);
        let mats = vec![
            Matrix::identity(1),
            Matrix::zeros(1, 1),
            Matrix::zeros(1, 1),
        ];
        assert!(check_action(&ActionPhi::new(up2, line, mats).unwrap(), 1e-14).passed());
        // replace ad(e1) on so3 by the identity: not a derivation of a non-abelian algebra
        let mut phi = ActionPhi::adjoint(&so3());
        phi.mats[0] = Matrix::identity(3);
        let r = check_action(&phi, 1e-10);
        assert!(!r.get("derivation").unwrap().passed);
    }

    #[test]
    fn semidirect_examples() {
        let g = so3();
        let h = LieAlgebra::abelian(2);
        let s = semidirect_algebra(&ActionPhi::zero(&g, &h), 1e-12).unwrap();
        assert_eq!(s.dim(), 5);
        for i in 0..3 {
            for j in 0..3 {
                let mut want = g.bracket_basis(i, j);
                want.extend([0.0, 0.0]);
                assert_eq!(s.bracket_basis(i, j), want);
            }
        }
        let gg = semidirect_algebra(&ActionPhi::adjoint(&g), 1e-12).unwrap();
        assert!(check_jacobi(&gg, 1e-12).passed());
    }

    #[test]
    fn euclidean_is_rotations_acting_on_translations() {
        // e(n) assembled as so(n) ⋉ R^n matches the matrix realization
        for n in [2, 3] {
            let so = algebra_by_name(&format!("so({n})")).unwrap();
            let mats: Vec<Matrix> = matrix_basis(&format!("so({n})")).unwrap();
            let phi = ActionPhi::new(so, LieAlgebra::abelian(n), mats).unwrap();
            let s = semidirect_algebra(&phi, 1e-12).unwrap();
            let e = algebra_by_name(&format!("euclidean({n})")).unwrap();
            assert!(s.constants_distance(&e) < 1e-14, "n={n}");
        }
    }

    #[test]
    fn subalgebra_and_homomorphism_examples() {
        let g = so3();
        assert!(is_homomorphism(&LinearMap::identity(&g), 0.0).passed());
        assert!(is_subalgebra(&[vec![0.2, 0.3, 0.4]], &g, 1e-14).passed());
        assert!(!is_subalgebra(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], &g, 1e-10).passed());
    }

    proptest! {
        #[test]
        fn full_basis_and_lines_are_subalgebras(v in proptest::collection::vec(-2.0f64..2.0, 6)) {
            let e = algebra_by_name("euclidean(3)").unwrap();
            let full: Vec<Vector> = (0..6).map(|i| basis_vector(6, i)).collect();
            prop_assert!(is_subalgebra(&full, &e, 1e-12).passed());
            prop_assert!(is_subalgebra(&[v], &e, 1e-12).passed());
        }

        #[test]
        fn semidirect_of_random_scaling_action_is_lie(c in -2.0f64..2.0) {
            // up2 acting on a line by c * (upper-left entry)
            let up2 = algebra_by_name("up2").unwrap();
            let mats = vec![Matrix::diag(&[c]), Matrix::zeros(1, 1), Matrix::zeros(1, 1)];
            let phi = ActionPhi::new(up2, LieAlgebra::abelian(1), mats).unwrap();
            let s = semidirect_algebra(&phi, 1e-12).unwrap();
            prop_assert!(check_jacobi(&s, 1e-10).passed());
        }
    }
}
