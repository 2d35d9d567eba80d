//! Randomized invariants over the public API.

mod common;

use common::{conjugated_gauss, conjugation_matrix};
use proptest::prelude::*;
use rbo_core::applications::{factorize, split};
use rbo_core::cohomology::{cohomology_dim, differential_matrix};
use rbo_core::correspondence::{van_est_eval, DescendentExp};
use rbo_core::group::{dag, operator_by_name, star, theta_group_action, GroupCochain};
use rbo_core::lie::{check_jacobi, is_homomorphism, matrix_basis, LieAlgebra, LinearMap};
use rbo_core::linalg::{
    basis_vector, mat_exp, mat_log, max_abs, norm2, rank, rank_and_kernel, sub, Matrix,
};
use rbo_core::rbo::{
    check_rbo, descendent_algebra, from_modified_r, graph_subalgebra_check, theta_rep,
    to_modified_r, RelRbo,
};
use rbo_core::Tolerance;

fn square(n: usize, scale: f64) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(-1.0f64..1.0, n * n)
        .prop_map(move |v| Matrix::from_row_major(n, n, v).unwrap().scale(scale))
}

/// Invertible matrices near the identity.
fn near_identity(n: usize) -> impl Strategy<Value = Matrix> {
    square(n, 0.3).prop_map(move |m| &Matrix::identity(n) + &m)
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = norm2(&v);
    v.into_iter().map(|x| x / n).collect()
}

fn tol() -> Tolerance {
    Tolerance::new(1e-9, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exp_of_negative_is_inverse(m in square(3, 1.0)) {
        let m = m.scale(2.0 / m.norm1().max(1e-12)).scale(0.999);
        let p = &mat_exp(&m.scale(-1.0)).unwrap() * &mat_exp(&m).unwrap();
        prop_assert!((&p - &Matrix::identity(3)).max_abs() <= 1e-10);
    }

    #[test]
    fn log_inverts_exp_near_zero(m in square(3, 1.0), r in 0.0f64..0.5) {
        let a = m.scale(r / m.norm1().max(1e-12));
        let back = mat_log(&mat_exp(&a).unwrap()).unwrap();
        prop_assert!((&back - &a).max_abs() <= 1e-9);
    }

    #[test]
    fn kernel_vectors_are_annihilated_and_rank_ignores_row_order(
        m in square(4, 1.0), drop in 0usize..4, shift in 1usize..4,
    ) {
        // force a dependency so kernels are nontrivial
        let mut rows = m.to_rows();
        rows[drop] = rows[(drop + 1) % 4].iter().zip(&rows[(drop + 2) % 4]).map(|(a, b)| a - 2.0 * b).collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let (r, ker) = rank_and_kernel(&a, Tolerance::default());
        prop_assert_eq!(r + ker.len(), 4);
        for k in &ker {
            prop_assert!(max_abs(&a.matvec(k)) <= 1e-9 * a.max_abs().max(1.0));
        }
        rows.rotate_left(shift);
        let permuted = Matrix::from_rows(&rows).unwrap();
        prop_assert_eq!(rank(&permuted, Tolerance::default()), r);
    }

    #[test]
    fn transported_operators_satisfy_the_identity_and_its_consequences(p in near_identity(2)) {
        let o = conjugated_gauss(2, &p);
        let id = check_rbo(&o, 1e-10);
        prop_assert!(id.passed(), "{:?}", id);
        prop_assert!(graph_subalgebra_check(&o, 1e-10).passed());
        let desc = descendent_algebra(&o, 1e-10).unwrap();
        prop_assert!(check_jacobi(&desc, 1e-10).passed());
        let hom = LinearMap::new(desc, o.g().clone(), o.b.clone()).unwrap();
        prop_assert!(is_homomorphism(&hom, 1e-10).passed());
        prop_assert!(theta_rep(&o, 1e-10).unwrap().check(1e-10).passed());
    }

    #[test]
    fn broken_operators_fail_both_criteria(p in near_identity(2), eps in 0.05f64..0.5) {
        let o = conjugated_gauss(2, &p);
        let mut b = o.b.clone();
        b[(0, 0)] += eps;
        let bad = o.with_b(b).unwrap();
        prop_assert_eq!(check_rbo(&bad, 1e-10).passed(), graph_subalgebra_check(&bad, 1e-10).passed());
    }

    #[test]
    fn modified_r_roundtrip_is_exact_on_dyadic_data(entries in proptest::collection::vec(-512i32..512, 16)) {
        let g = rbo_core::lie::algebra_by_name("gl(2)").unwrap();
        let b = Matrix::from_row_major(4, 4, entries.iter().map(|&e| e as f64 / 256.0).collect()).unwrap();
        let o = RelRbo::on_adjoint(&g, b.clone()).unwrap();
        let back = from_modified_r(&to_modified_r(&o).unwrap());
        prop_assert_eq!(back.b, b);
    }

    #[test]
    fn one_coboundary_is_theta(p in near_identity(2), x in proptest::collection::vec(-1.0f64..1.0, 4)) {
        let o = conjugated_gauss(2, &p);
        let d1 = differential_matrix(&o, 1).unwrap();
        let dx = d1.matvec(&x);
        let theta = o.theta_matrices();
        for (i, t) in theta.iter().enumerate() {
            let expect = t.matvec(&x);
            prop_assert!(max_abs(&sub(&dx[i * 4..(i + 1) * 4], &expect)) <= 1e-12, "u = e_{}", i);
        }
    }

    #[test]
    fn cohomology_ignores_basis_order(perm in Just((0..4).collect::<Vec<usize>>()).prop_shuffle(), p in near_identity(2)) {
        let o = conjugated_gauss(2, &p);
        let basis = matrix_basis("gl(2)").unwrap();
        let permuted: Vec<Matrix> = perm.iter().map(|&i| basis[i].clone()).collect();
        let g2 = LieAlgebra::from_matrix_basis(&permuted, (0..4).map(|i| format!("b{i}")).collect()).unwrap();
        // new coordinates: new_j = old_{perm[j]}
        let pm = Matrix::from_fn(4, 4, |j, i| if perm[j] == i { 1.0 } else { 0.0 });
        let b2 = &(&pm * &o.b) * &pm.transpose();
        let o2 = RelRbo::on_adjoint(&g2, b2).unwrap();
        for k in 1..=3 {
            prop_assert_eq!(cohomology_dim(&o, k, tol()).unwrap(), cohomology_dim(&o2, k, tol()).unwrap());
        }
    }

    #[test]
    fn split_dimensions_follow_rank_nullity(p in near_identity(3)) {
        let o = conjugated_gauss(3, &p);
        let s = split(&o, Tolerance::default()).unwrap();
        prop_assert!(s.report.passed(), "{:?}", s.report);
        prop_assert_eq!(s.g_plus.len() + s.k_minus.len(), 9);
        prop_assert_eq!(s.g_minus.len() + s.k_plus.len(), 9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn descendent_group_laws_on_euclidean(a in proptest::collection::vec(-0.3f64..0.3, 6), b in proptest::collection::vec(-0.3f64..0.3, 6), c in proptest::collection::vec(-0.3f64..0.3, 6)) {
        let o = operator_by_name("euclidean(3)").unwrap();
        let (h1, h2, h3) = (o.h.exp(&a).unwrap(), o.h.exp(&b).unwrap(), o.h.exp(&c).unwrap());
        let left = star(&o, &star(&o, &h1, &h2).unwrap(), &h3).unwrap();
        let right = star(&o, &h1, &star(&o, &h2, &h3).unwrap()).unwrap();
        prop_assert!((&left - &right).max_abs() <= 1e-9);
        let bd = o.eval(&dag(&o, &h1).unwrap()).unwrap();
        prop_assert!((&bd - &o.eval(&h1).unwrap().inverse().unwrap()).max_abs() <= 1e-9);
        let e = o.g.identity();
        prop_assert!((&theta_group_action(&o, &h1, &e).unwrap() - &e).max_abs() == 0.0);
    }

    #[test]
    fn semidirect_exp_is_one_parameter(x in proptest::collection::vec(-1.0f64..1.0, 3), u in proptest::collection::vec(-1.0f64..1.0, 3), r in 0.05f64..0.5, s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let o = operator_by_name("euclidean(2)").unwrap();
        let sd = o.semidirect();
        let n = norm2(&x).hypot(norm2(&u));
        let (x, u): (Vec<f64>, Vec<f64>) = (x.iter().map(|v| v * r / n).collect(), u.iter().map(|v| v * r / n).collect());
        let sc = |v: &[f64], k: f64| v.iter().map(|a| a * k).collect::<Vec<f64>>();
        let prod = sd.multiply(&sd.exp(&sc(&x, s), &sc(&u, s)).unwrap(), &sd.exp(&sc(&x, t), &sc(&u, t)).unwrap()).unwrap();
        let direct = sd.exp(&sc(&x, s + t), &sc(&u, s + t)).unwrap();
        prop_assert!((&prod.0 - &direct.0).max_abs() <= 1e-8);
        prop_assert!((&prod.1 - &direct.1).max_abs() <= 1e-8);
    }

    #[test]
    fn factorization_reproduces_the_exponential(v in proptest::collection::vec(-1.0f64..1.0, 9), t in -0.2f64..0.2) {
        prop_assume!(norm2(&v) > 1e-3);
        let x0 = unit(v);
        for name in ["euclidean(2)", "gauss(3)", "gl_block(1,2)"] {
            let o = operator_by_name(name).unwrap();
            let x = &x0[..o.g.dim()];
            prop_assume!(norm2(x) > 1e-3);
            let x = unit(x.to_vec());
            match factorize(&o, &x, t) {
                Ok(f) => prop_assert!(f.residual <= 1e-9, "{name}: {}", f.residual),
                Err(rbo_core::Error::Domain(_)) => {}
                Err(e) => prop_assert!(false, "{name}: {e}"),
            }
        }
    }
}

#[test]
fn van_est_output_is_alternating() {
    let o = operator_by_name("euclidean(2)").unwrap();
    let de = DescendentExp::from_group_rbo(&o).unwrap();
    let h = o.h.clone();
    let f = GroupCochain::new(3, move |hs: &[Matrix]| {
        let (a, b) = (h.log(&hs[0])?, h.log(&hs[1])?);
        Ok((0..3)
            .map(|i| a[i] * b[(i + 1) % 3] + 0.5 * a[(i + 2) % 3] * a[i] * b[i])
            .collect())
    });
    for i in 0..3 {
        for j in 0..3 {
            let (u, v) = (basis_vector(3, i), basis_vector(3, j));
            let uv = van_est_eval(&de, &f, &[u.clone(), v.clone()]).unwrap();
            let vu = van_est_eval(&de, &f, &[v, u]).unwrap();
            let sum: Vec<f64> = uv.iter().zip(&vu).map(|(a, b)| a + b).collect();
            assert!(max_abs(&sum) <= 1e-8, "({i},{j}): {sum:?}");
        }
    }
}

#[test]
fn conjugation_matrix_is_an_automorphism() {
    let p = Matrix::from_rows(&[vec![1.0, 0.3], vec![-0.2, 1.1]]).unwrap();
    let t = conjugation_matrix(&p);
    let g = rbo_core::lie::algebra_by_name("gl(2)").unwrap();
    let f = LinearMap::new(g.clone(), g, t).unwrap();
    assert!(is_homomorphism(&f, 1e-12).passed());
}
