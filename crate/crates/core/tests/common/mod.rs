//! Shared helpers for the integration tests and the acceptance harness.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rbo_core::io::{load_rbo, RboInput};
use rbo_core::lie::algebra_by_name;
use rbo_core::linalg::{basis_vector, Matrix};
use rbo_core::rbo::{builtin, RelRbo};

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Every operator fixture (r-matrix and group descriptor files excluded).
pub fn operator_fixtures() -> Vec<RboInput> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .filter(|p| !p.file_stem().unwrap().to_string_lossy().ends_with("_r"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| load_rbo(p).unwrap_or_else(|e| panic!("{}: {e}", p.display())))
        .collect()
}

/// Operator fixtures that satisfy the identity (the deliberately broken one excluded).
pub fn valid_fixtures() -> Vec<RboInput> {
    operator_fixtures()
        .into_iter()
        .filter(|f| rbo_core::rbo::check_rbo(&f.rbo, 1e-10).passed())
        .collect()
}

pub fn fixture(name: &str) -> RboInput {
    load_rbo(&fixtures_dir().join(format!("{name}.json"))).unwrap()
}

/// Matrix of `X ↦ P X P⁻¹` on `gl(n)` in the registry basis.
pub fn conjugation_matrix(p: &Matrix) -> Matrix {
    let n = p.rows();
    let g = algebra_by_name(&format!("gl({n})")).unwrap();
    let basis = rbo_core::lie::matrix_basis(&format!("gl({n})")).unwrap();
    let coords = rbo_core::lie::MatrixCoords::new(&basis).unwrap();
    let pinv = p.inverse().unwrap();
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| coords.coords(&(&(p * b) * &pinv)))
        .collect();
    assert_eq!(g.dim(), cols.len());
    Matrix::from_columns(&cols).unwrap()
}

/// The Gauss operator on `gl(n)` transported by an inner automorphism; again
/// a Rota-Baxter operator for the adjoint action.
pub fn conjugated_gauss(n: usize, p: &Matrix) -> RelRbo {
    let o = builtin(&format!("gauss({n})")).unwrap();
    let t = conjugation_matrix(p);
    let b = &(&t * &o.b) * &t.inverse().unwrap();
    o.with_b(b).unwrap()
}

type Q = BigRational;

fn exact(x: f64) -> Q {
    Q::from_float(x).expect("finite input")
}

/// Rank over the rationals by fraction-exact Gaussian elimination.
pub fn exact_rank(mut m: Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot;
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact Chevalley–Eilenberg complex of the descendent algebra with
/// coefficients in `g` through `θ(u)x = B(φ(x)u) + [Bu, x]`, rebuilt from
/// the raw bracket, action and `B` without using the library's cochain code.
pub struct ExactComplex {
    hd: usize,
    gd: usize,
    /// `[e_i, e_j]_B` coordinates
    desc: Vec<Vec<Vec<Q>>>,
    /// `θ(e_i)` as a `gd × gd` matrix
    theta: Vec<Vec<Vec<Q>>>,
}

impl ExactComplex {
    pub fn new(o: &RelRbo) -> Self {
        let (hd, gd) = (o.h().dim(), o.g().dim());
        let b: Vec<Vec<Q>> = (0..gd)
            .map(|i| (0..hd).map(|j| exact(o.b[(i, j)])).collect())
            .collect();
        let apply_b = |u: &[Q]| -> Vec<Q> {
            (0..gd)
                .map(|i| (0..hd).map(|j| &b[i][j] * &u[j]).sum())
                .collect()
        };
        // φ(e_a) e_i and [e_i, e_j]_h, [e_a, e_c]_g from the float data (exact dyadics)
        let phi: Vec<Vec<Vec<Q>>> = (0..gd)
            .map(|a| {
                (0..hd)
                    .map(|i| {
                        o.phi
                            .act(&basis_vector(gd, a), &basis_vector(hd, i))
                            .into_iter()
                            .map(exact)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let hbr: Vec<Vec<Vec<Q>>> = (0..hd)
            .map(|i| {
                (0..hd)
                    .map(|j| {
                        o.h()
                            .bracket(&basis_vector(hd, i), &basis_vector(hd, j))
                            .into_iter()
                            .map(exact)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let gbr: Vec<Vec<Vec<Q>>> = (0..gd)
            .map(|a| {
                (0..gd)
                    .map(|c| {
                        o.g()
                            .bracket(&basis_vector(gd, a), &basis_vector(gd, c))
                            .into_iter()
                            .map(exact)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let act = |x: &[Q], i: usize| -> Vec<Q> {
            (0..hd)
                .map(|k| (0..gd).map(|a| &x[a] * &phi[a][i][k]).sum())
                .collect()
        };
        let unit = |n: usize, i: usize| -> Vec<Q> {
            (0..n)
                .map(|k| if k == i { Q::one() } else { Q::zero() })
                .collect()
        };
        let bcol = |i: usize| apply_b(&unit(hd, i));
        // [u,v]_B = φ(Bu)v − φ(Bv)u + [u,v]
        let desc = (0..hd)
            .map(|i| {
                (0..hd)
                    .map(|j| {
                        let (x, y) = (act(&bcol(i), j), act(&bcol(j), i));
                        (0..hd).map(|k| &x[k] - &y[k] + &hbr[i][j][k]).collect()
                    })
                    .collect()
            })
            .collect();
        let theta = (0..hd)
            .map(|i| {
                let bu = bcol(i);
                // column c of θ(e_i) is θ(e_i) e_c
                let cols: Vec<Vec<Q>> = (0..gd)
                    .map(|c| {
                        let first =
                            apply_b(&(0..hd).map(|k| phi[c][i][k].clone()).collect::<Vec<_>>());
                        let second: Vec<Q> = (0..gd)
                            .map(|k| (0..gd).map(|a| &bu[a] * &gbr[a][c][k]).sum())
                            .collect();
                        (0..gd).map(|k| &first[k] + &second[k]).collect()
                    })
                    .collect();
                (0..gd)
                    .map(|r| (0..gd).map(|c| cols[c][r].clone()).collect())
                    .collect()
            })
            .collect();
        ExactComplex {
            hd,
            gd,
            desc,
            theta,
        }
    }

    /// `D_k : C^k → C^{k+1}` where `C^k = Hom(∧^{k-1} h, g)`.
    pub fn differential(&self, k: usize) -> Vec<Vec<Q>> {
        let (hd, gd) = (self.hd, self.gd);
        let p = k - 1;
        let src = subsets(hd, p);
        let dst = subsets(hd, p + 1);
        if dst.is_empty() {
            return Vec::new();
        }
        let src_index = |s: &[usize]| src.iter().position(|t| t == s);
        let mut m = vec![vec![Q::zero(); src.len() * gd]; dst.len() * gd];
        // sign and slot of an unsorted argument list in the stored basis
        let locate = |args: &[usize]| -> Option<(bool, usize)> {
            let mut a = args.to_vec();
            let mut neg = false;
            for i in 0..a.len() {
                for j in 0..a.len() - 1 - i {
                    if a[j] > a[j + 1] {
                        a.swap(j, j + 1);
                        neg = !neg;
                    }
                }
            }
            if a.windows(2).any(|w| w[0] == w[1]) {
                return None;
            }
            src_index(&a).map(|s| (neg, s))
        };
        for (r, t) in dst.iter().enumerate() {
            // Σ_i (−1)^i θ(u_i) f(..û_i..)
            for i in 0..=p {
                let rest: Vec<usize> = t
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != i)
                    .map(|(_, &x)| x)
                    .collect();
                let Some((neg, s)) = locate(&rest) else {
                    continue;
                };
                let sign = if (i % 2 == 1) != neg {
                    -Q::one()
                } else {
                    Q::one()
                };
                for row in 0..gd {
                    for c in 0..gd {
                        m[r * gd + row][s * gd + c] += &sign * &self.theta[t[i]][row][c];
                    }
                }
            }
            // Σ_{i<j} (−1)^{i+j} f([u_i,u_j]_B, ..û_i..û_j..)
            for i in 0..=p {
                for j in i + 1..=p {
                    let rest: Vec<usize> = t
                        .iter()
                        .enumerate()
                        .filter(|&(q, _)| q != i && q != j)
                        .map(|(_, &x)| x)
                        .collect();
                    for (e, coef) in self.desc[t[i]][t[j]].iter().enumerate() {
                        if coef.is_zero() {
                            continue;
                        }
                        let mut args = vec![e];
                        args.extend(&rest);
                        let Some((neg, s)) = locate(&args) else {
                            continue;
                        };
                        let sign = if ((i + j) % 2 == 1) != neg {
                            -coef.clone()
                        } else {
                            coef.clone()
                        };
                        for c in 0..gd {
                            m[r * gd + c][s * gd + c] += &sign;
                        }
                    }
                }
            }
        }
        m
    }

    pub fn cochain_dim(&self, k: usize) -> usize {
        subsets(self.hd, k - 1).len() * self.gd
    }

    /// `dim H^k = dim C^k − rank D_k − rank D_{k−1}`.
    pub fn cohomology_dim(&self, k: usize) -> usize {
        let r = exact_rank(self.differential(k));
        let prev = if k >= 2 {
            exact_rank(self.differential(k - 1))
        } else {
            0
        };
        self.cochain_dim(k) - r - prev
    }

    /// Whether `D_{k+1} D_k` vanishes identically.
    pub fn squares_to_zero(&self, k: usize) -> bool {
        let a = self.differential(k);
        let b = self.differential(k + 1);
        b.iter().all(|row| {
            (0..a[0].len()).all(|c| {
                row.iter()
                    .zip(&a)
                    .map(|(x, ar)| x * &ar[c])
                    .sum::<Q>()
                    .is_zero()
            })
        })
    }
}

/// Largest absolute value of an exact matrix, as a float (for reporting).
pub fn exact_max_abs(m: &[Vec<Q>]) -> f64 {
    use num_traits::ToPrimitive;
    m.iter()
        .flatten()
        .map(|x| x.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

pub fn big(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}
