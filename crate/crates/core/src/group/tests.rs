use super::*;
use crate::linalg::Matrix;

fn small() -> Sampling {
    Sampling {
        count: 20,
        ..Sampling::default()
    }
}

#[test]
fn group_exp_log_roundtrip() {
    let g = group_by_name("euclidean(3)").unwrap();
    let c = vec![0.1, -0.2, 0.05, 0.3, 0.0, -0.1];
    let back = g.log(&g.exp(&c).unwrap()).unwrap();
    assert!(max_abs(&sub(&back, &c)) < 1e-12);
}

#[test]
fn euclidean_product_matches_closed_form() {
    let o = operator_by_name("euclidean(2)").unwrap();
    let mut rng = small().rng();
    let hs = sample_elements(&o.h, 2, 0.5, &mut rng).unwrap();
    let (a, alpha) = euclidean_parts(&hs[0]);
    let (c, beta) = euclidean_parts(&hs[1]);
    let ac = &a * &c;
    let mut pos = (&ac * &a.transpose()).matvec(&alpha);
    pos.iter_mut()
        .zip(a.matvec(&beta))
        .for_each(|(p, v)| *p += v);
    let expected = euclidean_element(&ac, &pos);
    assert!((&star(&o, &hs[0], &hs[1]).unwrap() - &expected).max_abs() < 1e-13);

    let at = a.transpose();
    let alpha2: Vec<f64> = (&at * &at).matvec(&alpha).iter().map(|v| -v).collect();
    assert!((&dag(&o, &hs[0]).unwrap() - &euclidean_element(&at, &alpha2)).max_abs() < 1e-13);

    // Θ(A,α)(C,β) = (C, CACᵀβ)
    let th = theta_group_action(&o, &hs[0], &hs[1]).unwrap();
    let expected = euclidean_element(&c, &(&(&c * &a) * &c.transpose()).matvec(&beta));
    assert!((&th - &expected).max_abs() < 1e-12);
}

#[test]
fn registry_operators_satisfy_identity() {
    for name in [
        "euclidean(2)",
        "euclidean(3)",
        "up2",
        "gl_block(1,1)",
        "gl_block(1,2)",
        "gauss(3)",
        "so3_inverse",
        "trivial",
    ] {
        let o = operator_by_name(name).unwrap();
        let r = check_group_rbo(&o, &small(), 1e-10).unwrap();
        assert!(r.passed(), "{name}: {r}");
        let c = &r.checks[0];
        assert!(c.evaluated.unwrap() > 10, "{name} mostly skipped");
        assert!(
            check_descendent_group(&o, &small(), 1e-9).unwrap().passed(),
            "{name}"
        );
        assert!(
            check_theta_action(&o, &small(), 1e-9).unwrap().passed(),
            "{name}"
        );
        assert!(
            check_group_action(o.action.as_ref(), &o.g, &o.h, &small(), 1e-12)
                .unwrap()
                .passed(),
            "{name}"
        );
    }
}

#[test]
fn perturbed_operator_fails() {
    let mut o = operator_by_name("euclidean(2)").unwrap();
    // compose with a rotation proportional to the translation part
    let inner = operator_by_name("euclidean(2)").unwrap().map;
    o.map = Arc::new(move |h: &Matrix| {
        let (_, alpha) = euclidean_parts(h);
        let mut x = Matrix::zeros(3, 3);
        x[(0, 1)] = -1e-3 * alpha[0];
        x[(1, 0)] = 1e-3 * alpha[0];
        Ok(&inner(h)? * &mat_exp(&x)?)
    });
    assert!(!check_group_rbo(&o, &small(), 1e-10).unwrap().passed());
}

#[test]
fn gauss_factor_reconstructs() {
    let g = group_by_name("gl(3)").unwrap();
    let mut rng = small().rng();
    for m in sample_elements(&g, 5, 0.5, &mut rng).unwrap() {
        let (up, d, lo) = gauss_factor(&m).unwrap();
        let back = &(&up * &Matrix::diag(&d)) * &lo;
        assert!((&back - &m).max_abs() < 1e-13);
        for i in 0..3 {
            assert_eq!(up[(i, i)], 1.0);
            assert_eq!(lo[(i, i)], 1.0);
            for j in i + 1..3 {
                assert_eq!(up[(j, i)], 0.0);
                assert_eq!(lo[(i, j)], 0.0);
            }
        }
    }
}

#[test]
fn samples_are_deterministic_and_in_ball() {
    let g = group_by_name("so3").unwrap();
    let a = sample_elements(&g, 10, 0.3, &mut Sampling::default().rng()).unwrap();
    let b = sample_elements(&g, 10, 0.3, &mut Sampling::default().rng()).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| x == y));
    assert!(a.iter().all(|x| g.log_norm(x).unwrap() <= 0.3 + 1e-12));
}

#[test]
fn semidirect_exp_closed_forms_match_rk4() {
    for name in ["euclidean(2)", "up2", "so3_inverse", "trivial"] {
        let o = operator_by_name(name).unwrap();
        let sd = o.semidirect();
        let x: Vec<f64> = (0..o.g.dim()).map(|i| 0.3 - 0.1 * i as f64).collect();
        let u: Vec<f64> = (0..o.h.dim()).map(|i| 0.2 + 0.05 * i as f64).collect();
        let (g1, h1) = sd.exp(&x, &u).unwrap();
        let (g2, h2) = sd.exp_rk4(&x, &u).unwrap();
        assert!((&g1 - &g2).max_abs() < 1e-9, "{name}");
        assert!((&h1 - &h2).max_abs() < 1e-9, "{name}");
    }
}

#[test]
fn semidirect_group_laws() {
    let o = operator_by_name("euclidean(2)").unwrap();
    let sd = o.semidirect();
    let a = sd.exp(&[0.2, 0.1, -0.3], &[0.1, 0.4, 0.2]).unwrap();
    let b = sd.exp(&[-0.5, 0.3, 0.1], &[0.2, -0.1, 0.0]).unwrap();
    let ab = sd.multiply(&a, &b).unwrap();
    let back = sd.multiply(&ab, &sd.inverse(&b).unwrap()).unwrap();
    assert!((&back.0 - &a.0).max_abs() < 1e-13 && (&back.1 - &a.1).max_abs() < 1e-13);
}

#[test]
fn theta_linearized_euclidean() {
    // Θ_lin(A, α)(x, u) = (x, A u)
    let o = operator_by_name("euclidean(2)").unwrap();
    let h = o.h.exp(&[0.4, 0.2, -0.1]).unwrap();
    let m = theta_linearized(&o, &h).unwrap();
    let (a, _) = euclidean_parts(&h);
    let mut expected = Matrix::identity(3);
    expected.set_block(1, 1, &a);
    assert!((&m - &expected).max_abs() < 1e-8, "{m:?}");
}

#[test]
fn group_differential_squares_to_zero() {
    let o = operator_by_name("euclidean(2)").unwrap();
    let h = o.h.clone();
    let f = GroupCochain::new(2, move |hs: &[Matrix]| {
        let c = h.log(&hs[0])?;
        Ok(vec![c[0] * c[1], c[2].sin(), c[0] + c[2] * c[1]])
    });
    let r = check_group_d_squared(&o, &f, 5, &small(), 1e-7).unwrap();
    assert!(r.passed(), "{r}");
    // degree-1 constant
    let r = check_group_d_squared(
        &o,
        &GroupCochain::constant(vec![1.0, 2.0, -1.0]),
        5,
        &small(),
        1e-7,
    )
    .unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn conjugation_is_a_hom_of_itself() {
    // (Ad_k, Ad_k) is an automorphism of the so3_inverse operator
    let o = operator_by_name("so3_inverse").unwrap();
    let k = o.g.exp(&[0.3, -0.2, 0.5]).unwrap();
    let ki = k.inverse().unwrap();
    let (k1, ki1) = (k.clone(), ki.clone());
    let psi: GroupMap = Arc::new(move |m: &Matrix| Ok(&(&k1 * m) * &ki1));
    let r = check_group_rbo_hom(&psi, &psi, &o, &o, &small(), 1e-12).unwrap();
    assert!(r.passed(), "{r}");
}
