//! Finite differences, Newton iteration, RK4 flows and quadrature.

use super::matrix::{norm2, sub, Matrix, Vector};
use crate::error::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-5;

/// Tensor-product stencil choice for [`mixed_partials_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    /// `(f(h) - f(-h)) / 2h` per axis, O(h²).
    Narrow,
    /// `(f(-2h) - 8f(-h) + 8f(h) - f(2h)) / 12h` per axis, O(h⁴).
    Wide,
}

impl Stencil {
    fn taps(self) -> &'static [(f64, f64)] {
        match self {
            Stencil::Narrow => &[(-1.0, -0.5), (1.0, 0.5)],
            Stencil::Wide => &[
                (-2.0, 1.0 / 12.0),
                (-1.0, -8.0 / 12.0),
                (1.0, 8.0 / 12.0),
                (2.0, -1.0 / 12.0),
            ],
        }
    }
}

/// First derivative at 0 of a vector-valued curve, 4th-order central difference.
pub fn directional_derivative<F>(f: F, h: f64) -> Result<Vector>
where
    F: Fn(f64) -> Result<Vector>,
{
    let mut acc: Option<Vector> = None;
    for &(k, w) in Stencil::Wide.taps() {
        let v = f(k * h)?;
        match acc.as_mut() {
            None => acc = Some(v.iter().map(|x| w * x).collect()),
            Some(a) => {
                if a.len() != v.len() {
                    return Err(Error::dim("curve changed output length"));
                }
                for (x, y) in a.iter_mut().zip(&v) {
                    *x += w * y;
                }
            }
        }
    }
    Ok(acc.unwrap().into_iter().map(|x| x / h).collect())
}

/// Same as [`directional_derivative`] for matrix-valued curves.
pub fn matrix_derivative<F>(f: F, h: f64) -> Result<Matrix>
where
    F: Fn(f64) -> Result<Matrix>,
{
    let mut shape = (0, 0);
    let d = directional_derivative(
        |t| {
            let m = f(t)?;
            Ok(m.flatten())
        },
        h,
    )?;
    let probe = f(0.0)?;
    shape.0 = probe.rows();
    shape.1 = probe.cols();
    Matrix::from_row_major(shape.0, shape.1, d)
}

/// Default step for an order-`m` mixed partial; larger orders trade
/// truncation for round-off.
pub fn default_mixed_step(m: usize) -> f64 {
    match m {
        0 | 1 => DEFAULT_STEP,
        2 => 1e-3,
        _ => 2e-3,
    }
}

/// `∂^m f / ∂t₁…∂t_m` at the origin with the wide stencil and default step.
pub fn mixed_partials<F>(f: F, m: usize) -> Result<Vector>
where
    F: Fn(&[f64]) -> Result<Vector>,
{
    mixed_partials_with(f, m, default_mixed_step(m), Stencil::Wide)
}

pub fn mixed_partials_with<F>(f: F, m: usize, h: f64, stencil: Stencil) -> Result<Vector>
where
    F: Fn(&[f64]) -> Result<Vector>,
{
    if m > 3 {
        return Err(Error::Unsupported(format!(
            "mixed partial of order {m} (max 3)"
        )));
    }
    if m == 0 {
        return f(&[]);
    }
    let taps = stencil.taps();
    let total = taps.len().pow(m as u32);
    let mut acc: Option<Vector> = None;
    let mut t = vec![0.0; m];
    for idx in 0..total {
        let mut rest = idx;
        let mut w = 1.0;
        for ti in t.iter_mut() {
            let (k, wk) = taps[rest % taps.len()];
            rest /= taps.len();
            *ti = k * h;
            w *= wk;
        }
        let v = f(&t)?;
        match acc.as_mut() {
            None => acc = Some(v.iter().map(|x| w * x).collect()),
            Some(a) => {
                for (x, y) in a.iter_mut().zip(&v) {
                    *x += w * y;
                }
            }
        }
    }
    let denom = h.powi(m as i32);
    Ok(acc.unwrap().into_iter().map(|x| x / denom).collect())
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-12,
            max_iter: 50,
            fd_step: 1e-7,
        }
    }
}

/// Solve `F(u) = target` from `guess` with a column-wise central-difference Jacobian.
pub fn newton_solve<F>(f: F, target: &[f64], guess: &[f64], opts: NewtonOptions) -> Result<Vector>
where
    F: Fn(&[f64]) -> Result<Vector>,
{
    let n = guess.len();
    let mut u = guess.to_vec();
    let mut r = sub(&f(&u)?, target);
    if r.len() != target.len() {
        return Err(Error::dim("newton: output length differs from target"));
    }
    let mut res = norm2(&r);
    for _ in 0..opts.max_iter {
        if res <= opts.tol {
            return Ok(u);
        }
        let mut jac = Matrix::zeros(r.len(), n);
        for j in 0..n {
            let h = opts.fd_step * u[j].abs().max(1.0);
            let mut up = u.clone();
            let mut um = u.clone();
            up[j] += h;
            um[j] -= h;
            let col: Vector = sub(&f(&up)?, &f(&um)?)
                .into_iter()
                .map(|x| x / (2.0 * h))
                .collect();
            jac.set_column(j, &col);
        }
        let step = jac
            .solve(&r)
            .map_err(|_| Error::Singular("newton: singular Jacobian".into()))?;
        // Backtrack only if a full step makes things clearly worse.
        let mut lambda = 1.0;
        loop {
            let cand: Vector = u.iter().zip(&step).map(|(a, b)| a - lambda * b).collect();
            let rc = sub(&f(&cand)?, target);
            let resc = norm2(&rc);
            if resc < res || lambda < 1e-3 {
                u = cand;
                r = rc;
                res = resc;
                break;
            }
            lambda *= 0.5;
        }
    }
    if res <= opts.tol {
        Ok(u)
    } else {
        Err(Error::Divergence {
            residual: res,
            context: "newton iteration".into(),
        })
    }
}

/// Step count used by [`rk4_pair_flow`].
pub fn rk4_steps(norm: f64) -> usize {
    50usize.max((norm / 0.02).ceil() as usize)
}

/// Integrate `g' = g·x`, `h' = h·act(g, u)` on `[0, 1]` from the identity with
/// classical RK4. `act(g, u)` is the induced action on the second Lie algebra.
pub fn rk4_pair_flow<A>(x: &Matrix, u: &Matrix, act: A, steps: usize) -> (Matrix, Matrix)
where
    A: Fn(&Matrix, &Matrix) -> Matrix,
{
    let mut g = Matrix::identity(x.rows());
    let mut h = Matrix::identity(u.rows());
    let dt = 1.0 / steps as f64;
    let field = |g: &Matrix, h: &Matrix| (g * x, h * &act(g, u));
    for _ in 0..steps {
        let (k1g, k1h) = field(&g, &h);
        let (k2g, k2h) = field(&g.axpy(dt / 2.0, &k1g), &h.axpy(dt / 2.0, &k1h));
        let (k3g, k3h) = field(&g.axpy(dt / 2.0, &k2g), &h.axpy(dt / 2.0, &k2h));
        let (k4g, k4h) = field(&g.axpy(dt, &k3g), &h.axpy(dt, &k3h));
        let dg = k1g.axpy(2.0, &k2g).axpy(2.0, &k3g).axpy(1.0, &k4g);
        let dh = k1h.axpy(2.0, &k2h).axpy(2.0, &k3h).axpy(1.0, &k4h);
        g = g.axpy(dt / 6.0, &dg);
        h = h.axpy(dt / 6.0, &dh);
    }
    (g, h)
}

const GL8_NODES: [f64; 4] = [
    0.1834346424956498,
    0.525532409916329,
    0.7966664774136267,
    0.9602898564975363,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362683783378362,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// `∫₀¹ f(s) ds` by 8-point Gauss–Legendre.
pub fn gauss_legendre8<F>(f: F) -> Result<Matrix>
where
    F: Fn(f64) -> Result<Matrix>,
{
    let mut acc: Option<Matrix> = None;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        for s in [0.5 - 0.5 * x, 0.5 + 0.5 * x] {
            let v = f(s)?;
            acc = Some(match acc {
                None => v.scale(0.5 * w),
                Some(a) => a.axpy(0.5 * w, &v),
            });
        }
    }
    Ok(acc.unwrap())
}
