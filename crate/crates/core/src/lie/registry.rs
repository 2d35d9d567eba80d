//! Built-in matrix realizations and their structure constants.

use super::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Split `"euclidean(3)"`, `"euclidean3"` or `"gl_block(1,2)"` into a family
/// name and integer parameters.
pub fn parse_family(name: &str) -> Result<(String, Vec<usize>)> {
    let name = name.trim();
    let bad = || Error::Parse(format!("malformed registry name {name:?}"));
    if let Some(open) = name.find('(') {
        let close = name.strip_suffix(')').ok_or_else(bad)?;
        let args = &close[open + 1..];
        let params = args
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        return Ok((name[..open].to_string(), params));
    }
    let split = name
        .find(|c: char| c.is_ascii_digit())
        .unwrap_or(name.len());
    let (base, digits) = name.split_at(split);
    // names like "so3" and "up2" keep their digit
    if matches!(name, "so3" | "up2") || digits.is_empty() {
        return Ok((name.to_string(), Vec::new()));
    }
    let n = digits.parse::<usize>().map_err(|_| bad())?;
    Ok((base.to_string(), vec![n]))
}

fn unit(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

/// Rotation generator in the `(i, j)` plane: `-1` at `(i, j)`, `+1` at `(j, i)`.
fn rotation(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = -1.0;
    m[(j, i)] = 1.0;
    m
}

fn one_param(params: &[usize], name: &str) -> Result<usize> {
    match params {
        [n] if *n >= 1 => Ok(*n),
        _ => Err(Error::Parse(format!("{name} needs one positive parameter"))),
    }
}

/// Matrix basis plus labels for a registry name.
pub(crate) fn labelled_basis(name: &str) -> Result<(Vec<Matrix>, Vec<String>)> {
    let (family, params) = parse_family(name)?;
    let out = match family.as_str() {
        "so3" => (
            vec![rotation(3, 1, 2), rotation(3, 2, 0), rotation(3, 0, 1)],
            vec!["L1".into(), "L2".into(), "L3".into()],
        ),
        "up2" => (
            vec![unit(2, 0, 0), unit(2, 0, 1), unit(2, 1, 1)],
            vec!["E11".into(), "E12".into(), "E22".into()],
        ),
        "line" => (vec![unit(2, 0, 1)], vec!["r".into()]),
        "so" => {
            let n = one_param(&params, "so")?;
            let mut b = Vec::new();
            let mut l = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    b.push(rotation(n, i, j));
                    l.push(format!("R{i}{j}"));
                }
            }
            (b, l)
        }
        "euclidean" => {
            let n = one_param(&params, "euclidean")?;
            let mut b = Vec::new();
            let mut l = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    b.push(rotation(n + 1, i, j));
                    l.push(format!("R{i}{j}"));
                }
            }
            for k in 0..n {
                b.push(unit(n + 1, k, n));
                l.push(format!("T{k}"));
            }
            (b, l)
        }
        "gl" | "gl_block" => {
            let n = if family == "gl" {
                one_param(&params, "gl")?
            } else {
                match params.as_slice() {
                    [p, q] if *p >= 1 && *q >= 1 => p + q,
                    _ => {
                        return Err(Error::Parse(
                            "gl_block needs two positive parameters".into(),
                        ))
                    }
                }
            };
            let mut b = Vec::new();
            let mut l = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    b.push(unit(n, i, j));
                    l.push(format!("E{}{}", i + 1, j + 1));
                }
            }
            (b, l)
        }
        "abelian" => {
            let n = one_param(&params, "abelian")?;
            (
                (0..n).map(|i| unit(n, i, i)).collect(),
                (0..n).map(|i| format!("a{i}")).collect(),
            )
        }
        _ => return Err(Error::Parse(format!("unknown registry name {name:?}"))),
    };
    Ok(out)
}

/// Matrix basis of a built-in algebra: `so3`, `so(n)`, `up2`, `line`,
/// `euclidean(n)`, `gl(n)`, `gl_block(p,q)`, `abelian(n)`.
pub fn matrix_basis(name: &str) -> Result<Vec<Matrix>> {
    Ok(labelled_basis(name)?.0)
}

pub fn algebra_by_name(name: &str) -> Result<LieAlgebra> {
    let (basis, labels) = labelled_basis(name)?;
    LieAlgebra::from_matrix_basis(&basis, labels)
}
