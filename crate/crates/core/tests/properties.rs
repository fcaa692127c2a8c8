use gks_core::clifford::build_rep;
use gks_core::constructions::classify::{two_eig_classify, Reason, TwoEigData};
use gks_core::gks::{check_gks, SymEndField};
use gks_core::report::{tol, Check, Report};
use gks_core::sampling;
use gks_core::sphere::SpherePoint;
use gks_core::spinor::{killing_basis, KillingSign, SpinorModel};
use gks_core::weitzenbock::{algebraic_identity, SymTensorField};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn vec_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len)
}

fn half_integer() -> impl Strategy<Value = f64> {
    (-5i32..=5).prop_map(|k| k as f64 / 2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clifford_multiplication_is_skew_and_isometric(m in 1usize..=16, seed in any::<u64>()) {
        let rep = build_rep(m).unwrap();
        let mut rng = sampling::rng(seed);
        let x = sampling::gaussian_vector(&mut rng, m);
        let phi = sampling::gaussian_vector(&mut rng, rep.module_dim());
        let psi = sampling::gaussian_vector(&mut rng, rep.module_dim());
        let xphi = rep.apply_vector(x.as_slice(), phi.as_slice());
        let xpsi = rep.apply_vector(x.as_slice(), psi.as_slice());
        let scale = 1.0 + x.norm() * phi.norm() * psi.norm();
        prop_assert!((xphi.dot(&psi) + phi.dot(&xpsi)).abs() < 1e-12 * scale);
        prop_assert!((xphi.norm() - x.norm() * phi.norm()).abs() < 1e-12 * scale);
        // X·X = -|X|²
        let xxphi = rep.apply_vector(x.as_slice(), xphi.as_slice());
        prop_assert!((xxphi + &phi * x.norm_squared()).amax() < 1e-12 * scale);
    }

    #[test]
    fn two_form_action_is_skew(m in 2usize..=12, seed in any::<u64>()) {
        let rep = build_rep(m).unwrap();
        let mut rng = sampling::rng(seed);
        let x = sampling::gaussian_vector(&mut rng, m);
        let y = sampling::gaussian_vector(&mut rng, m);
        let w = rep.two_form_action(x.as_slice(), y.as_slice()).unwrap();
        prop_assert!((&w + w.transpose()).amax() < 1e-12 * (1.0 + x.norm() * y.norm()));
    }

    #[test]
    fn volume_squares_to_its_sign(m in 1usize..=16) {
        let rep = build_rep(m).unwrap();
        let v = rep.volume_dense();
        let expected = DMatrix::<f64>::identity(v.nrows(), v.ncols()) * rep.volume_square_sign() as f64;
        prop_assert_eq!(&v * &v, expected);
    }

    #[test]
    fn classification_is_orientation_invariant(
        n in 2usize..=16,
        lambda in half_integer(),
        mu in half_integer(),
        p in 1usize..16,
    ) {
        prop_assume!(p < n);
        let d = TwoEigData { n, lambda, mu, p, q: n - p };
        let v = two_eig_classify(&d).unwrap();
        prop_assert_eq!(v, two_eig_classify(&d).unwrap());
        prop_assert_eq!(v.admissible, v.reason == Reason::Ok);
        let mirror = TwoEigData { lambda: -lambda, mu: -mu, ..d };
        let swapped = TwoEigData { lambda: mu, mu: lambda, p: d.q, q: d.p, ..d };
        for other in [mirror, swapped] {
            let w = two_eig_classify(&other).unwrap();
            prop_assert_eq!(w.admissible, v.admissible);
            prop_assert_eq!(w.reason, v.reason);
        }
    }

    #[test]
    fn algebraic_identity_on_trace_free_matrices(n in 3usize..=10, seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let g = sampling::gaussian_vector(&mut rng, n * n);
        let g = DMatrix::from_column_slice(n, n, g.as_slice());
        let mut h = (&g + g.transpose()) * 0.5;
        let t = h.trace() / n as f64;
        for i in 0..n {
            h[(i, i)] -= t;
        }
        let (lhs, rhs) = algebraic_identity(&h, n).unwrap();
        prop_assert!((lhs - rhs).abs() < tol::ALGEBRAIC * (1.0 + rhs));
        prop_assert!((rhs - (n as f64 - 2.0) * h.norm_squared()).abs() < 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn killing_combinations_satisfy_killing_equation(
        n in prop::sample::select(vec![2usize, 3, 4, 7]),
        plus in any::<bool>(),
        coeffs in vec_strategy(8),
        seed in any::<u64>(),
    ) {
        let model = SpinorModel::shared(n).unwrap();
        let sign = if plus { KillingSign::Plus } else { KillingSign::Minus };
        let basis = killing_basis(&model, sign);
        let mut c = coeffs.clone();
        c[0] = 1.0 + c[0].abs();
        let c = &c[..basis.len().min(c.len())];
        let norm = c.iter().map(|t| t * t).sum::<f64>().sqrt();
        // orthonormal basis, so the combination has constant norm |c|
        let mut psi = basis[0].scale(c[0] / norm);
        for (b, ck) in basis.iter().zip(c).skip(1) {
            psi = psi.add(&b.scale(ck / norm));
        }
        let a = SymEndField::scalar(n + 1, if plus { 0.5 } else { -0.5 });
        let check = check_gks(&psi, &a, 5, seed).unwrap();
        prop_assert!(check.pass, "{check:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn weitzenbock_residual_vanishes(n in 2usize..=4, degree in 0u32..=2, seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let h = SymTensorField::random(n, degree, &mut rng).unwrap();
        for _ in 0..3 {
            let x = SpherePoint::sample(&mut rng, n);
            prop_assert!(h.weitzenbock_residual(&x) < tol::WEITZENBOCK);
            prop_assert!(h.curvature_terms_defect(&x).unwrap() < 1e-8);
        }
    }

    #[test]
    fn exterior_covariant_derivative_is_antisymmetric(n in 2usize..=5, seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let h = SymTensorField::random(n, 2, &mut rng).unwrap();
        let x = SpherePoint::sample(&mut rng, n);
        let u = sampling::tangent_vector(&mut rng, x.vector());
        let v = sampling::tangent_vector(&mut rng, x.vector());
        let a = h.dnabla(&x, &u, &v);
        let b = h.dnabla(&x, &v, &u);
        prop_assert!((a + b).amax() < 1e-10 * (1.0 + h.eval(x.as_slice()).amax()));
    }

    #[test]
    fn reports_serialize_deterministically(seed in any::<u64>(), r in 0.0f64..1.0) {
        let build = || {
            let mut rep = Report::new("probe", serde_json::json!({ "seed": seed }), seed);
            rep.push(Check::at_most("residual", r, 0.5));
            rep.push(Check::holds("flag", true));
            rep
        };
        let (a, b) = (build(), build());
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert_eq!(a.pass, r <= 0.5);
    }
}

#[test]
fn tangent_vectors_are_tangent() {
    let mut rng = sampling::rng(1);
    for n in 2..8 {
        let x = SpherePoint::sample(&mut rng, n);
        let v: DVector<f64> = sampling::tangent_vector(&mut rng, x.vector());
        assert!(v.dot(x.vector()).abs() < 1e-12);
    }
}
