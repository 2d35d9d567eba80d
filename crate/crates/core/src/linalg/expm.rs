//! Matrix exponential and principal logarithm.

use super::matrix::Matrix;
use crate::error::{Error, Result};

const TAYLOR_ORDER: usize = 16;
const GREGORY_DEGREE: usize = 16;
const MAX_SQRTS: usize = 100;

/// `e^M` by scaling and squaring around a degree-16 Taylor polynomial.
pub fn mat_exp(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::dim(format!(
            "exp of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::Domain("exp of a non-finite matrix".into()));
    }
    let n = m.rows();
    let norm = m.norm1();
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) >= 0.5 {
        s += 1;
    }
    let a = m.scale(0.5f64.powi(s as i32));
    // Horner: I + A(I + A/2(I + A/3(...)))
    let id = Matrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=TAYLOR_ORDER).rev() {
        acc = id.axpy(1.0 / k as f64, &(&a * &acc));
    }
    for _ in 0..s {
        acc = &acc * &acc;
    }
    Ok(acc)
}

/// Principal square root by the Denman–Beavers iteration.
pub fn mat_sqrt(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::dim("sqrt of a non-square matrix"));
    }
    let n = m.rows();
    let mut y = m.clone();
    let mut z = Matrix::identity(n);
    for _ in 0..MAX_SQRTS {
        let yi = y.inverse()?;
        let zi = z.inverse()?;
        let y_next = (&y + &zi).scale(0.5);
        let z_next = (&z + &yi).scale(0.5);
        let change = (&y_next - &y).norm1() / y_next.norm1().max(f64::MIN_POSITIVE);
        y = y_next;
        z = z_next;
        if change <= 1e-15 {
            return Ok(y);
        }
    }
    // The iteration stalls at round-off level without ever hitting the exact
    // cutoff on some inputs; accept when the square is right.
    if (&(&y * &y) - m).norm1() <= 1e-12 * m.norm1().max(1.0) {
        return Ok(y);
    }
    Err(Error::Domain(
        "square-root iteration did not converge".into(),
    ))
}

/// Principal logarithm by inverse scaling and squaring.
pub fn mat_log(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::dim(format!(
            "log of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::Domain("log of a non-finite matrix".into()));
    }
    let n = m.rows();
    let id = Matrix::identity(n);
    m.lu()?;
    let mut x = m.clone();
    let mut k = 0usize;
    while (&x - &id).norm1() >= 0.25 {
        if k == MAX_SQRTS {
            return Err(Error::Domain("too many square roots in log".into()));
        }
        x = mat_sqrt(&x)?;
        k += 1;
    }
    // log X = 2 atanh(Z), Z = (X - I)(X + I)^{-1}
    let z = &(&x - &id) * &(&x + &id).inverse()?;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut acc = Matrix::zeros(n, n);
    let mut j = 1;
    while j <= GREGORY_DEGREE {
        acc = acc.axpy(2.0 / j as f64, &term);
        term = &term * &z2;
        j += 2;
    }
    Ok(acc.scale(2f64.powi(k as i32)))
}
