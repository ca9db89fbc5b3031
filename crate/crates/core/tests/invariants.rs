use dirac_reduce::clifford::{
    charge_conjugate, chiral_project, coefficient_quadruple, dirac_adjoint, make_chiral_basis,
    Chirality, GammaRepresentation, BUILTIN_NAMES,
};
use dirac_reduce::emfield::{field_matrix, FieldConfig, FieldTensor};
use dirac_reduce::gridops::{
    box_prime_apply, derivative, fourth_order_apply, propagate_mask, Boundary, ScalarGridField,
    SpacetimeGrid,
};
use dirac_reduce::reduction::ReductionContext;
use dirac_reduce::Spinor;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn spinor() -> impl Strategy<Value = Spinor> {
    prop::array::uniform4(complex()).prop_map(Spinor::new)
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-2.0..2.0f64)
}

fn rep_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(BUILTIN_NAMES.to_vec())
}

fn chirality() -> impl Strategy<Value = Chirality> {
    prop::bool::ANY.prop_map(|l| if l { Chirality::Left } else { Chirality::Right })
}

fn small_grid(n: usize) -> SpacetimeGrid {
    let h = 0.3;
    SpacetimeGrid::new([n, n, n, n], [h; 4], [0.0; 4], [Boundary::Trim; 4]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bilinear_identities(name in rep_name(), chi in spinor(), a in spinor(), b in spinor(),
                           e in vec3(), h in vec3(), s in chirality()) {
        let rep = GammaRepresentation::builtin(name).unwrap();
        let bar = dirac_adjoint(&chi, &rep);
        prop_assert!(bar.apply(&charge_conjugate(&chi, &rep)).norm() < 1e-12);

        let xi = chiral_project(&a, s, &rep);
        let eta = chiral_project(&b, s, &rep);
        let (xi_c, eta_c) = (charge_conjugate(&xi, &rep), charge_conjugate(&eta, &rep));
        let (xi_bar, eta_bar) = (dirac_adjoint(&xi, &rep), dirac_adjoint(&eta, &rep));
        prop_assert!((xi_bar.apply(&eta_c) + eta_bar.apply(&xi_c)).norm() < 1e-12);

        let f = field_matrix(&FieldTensor::from_e_h(e, h), &rep);
        prop_assert!((xi_bar.apply(&(f * eta_c)) - eta_bar.apply(&(f * xi_c))).norm() < 1e-12);
        if let Ok(basis) = make_chiral_basis(&rep, s, Some((xi, eta))) {
            let q = coefficient_quadruple(&basis, &f, &rep);
            prop_assert!((q.b_prime + q.a).norm() < 1e-10 * (1.0 + q.a.norm()));
        }
    }

    #[test]
    fn opposite_chiral_parts_carry_no_current(name in rep_name(), psi in spinor()) {
        let rep = GammaRepresentation::builtin(name).unwrap();
        let plus = chiral_project(&psi, Chirality::Right, &rep);
        let minus = chiral_project(&psi, Chirality::Left, &rep);
        let bar = dirac_adjoint(&plus, &rep);
        for g in &rep.gamma {
            prop_assert!(bar.apply(&(*g * minus)).norm() < 1e-12);
        }
    }

    #[test]
    fn box_prime_is_linear(alpha in complex(), beta in complex(),
                           k1 in prop::array::uniform4(-1.5..1.5f64),
                           k2 in prop::array::uniform4(-1.5..1.5f64)) {
        let field = FieldConfig::new("plane-wave", &[("amplitude", 0.4), ("k", 0.9)]).build().unwrap();
        let g = small_grid(6);
        let wave = |k: [f64; 4]| move |x: [f64; 4]| {
            Complex64::new(0.0, (0..4).map(|m| k[m] * x[m]).sum::<f64>()).exp()
        };
        let u = ScalarGridField::from_fn(&g, wave(k1));
        let v = ScalarGridField::from_fn(&g, wave(k2));
        let mix = u.zip_with(&v, |a, b| alpha * a + beta * b).unwrap();
        let lhs = box_prime_apply(&mix, &field).unwrap();
        let (lu, lv) = (box_prime_apply(&u, &field).unwrap(), box_prime_apply(&v, &field).unwrap());
        let rhs = lu.zip_with(&lv, |a, b| alpha * a + beta * b).unwrap();
        prop_assert!(lhs.max_diff(&rhs).unwrap() <= 1e-10 * (1.0 + rhs.max_norm()));
    }

    #[test]
    fn fourth_order_operator_is_linear(alpha in complex(), e in 0.2..1.0f64,
                                       k1 in prop::array::uniform4(-1.0..1.0f64),
                                       k2 in prop::array::uniform4(-1.0..1.0f64)) {
        let rep = GammaRepresentation::builtin("chiral").unwrap();
        let field = FieldConfig::new("constant-E", &[("e", e)]).build().unwrap();
        let ctx = ReductionContext::with_default_basis(rep, Chirality::Left, field).unwrap();
        let g = small_grid(7);
        let wave = |k: [f64; 4]| move |x: [f64; 4]| {
            Complex64::new(0.0, (0..4).map(|m| k[m] * x[m]).sum::<f64>()).exp()
        };
        let u = ScalarGridField::from_fn(&g, wave(k1));
        let v = ScalarGridField::from_fn(&g, wave(k2));
        let mix = u.zip_with(&v, |a, b| alpha * a + b).unwrap();
        let lhs = fourth_order_apply(&mix, &ctx).unwrap();
        let (lu, lv) = (fourth_order_apply(&u, &ctx).unwrap(), fourth_order_apply(&v, &ctx).unwrap());
        let rhs = lu.zip_with(&lv, |a, b| alpha * a + b).unwrap();
        prop_assert!(lhs.max_diff(&rhs).unwrap() <= 1e-9 * (1.0 + rhs.max_norm()));
    }

    #[test]
    fn central_differences_are_exact_on_quadratics(c in prop::array::uniform3(-2.0..2.0f64), axis in 0usize..4) {
        let g = small_grid(5);
        let f = ScalarGridField::from_fn(&g, |x| Complex64::new(c[0] + c[1] * x[axis] + c[2] * x[axis] * x[axis], 0.0));
        let d1 = derivative(&f, axis, 1).unwrap();
        let d2 = derivative(&f, axis, 2).unwrap();
        let e1 = d1.map_with_coords(|x, v| v - Complex64::new(c[1] + 2.0 * c[2] * x[axis], 0.0));
        let e2 = d2.map(|v| v - Complex64::new(2.0 * c[2], 0.0));
        prop_assert!(e1.max_norm() < 1e-12);
        prop_assert!(e2.max_norm() < 1e-10);
    }

    #[test]
    fn mask_propagation_only_grows(bits in prop::collection::vec(prop::bool::weighted(0.1), 4 * 5 * 3 * 2)) {
        let g = SpacetimeGrid::new(
            [4, 5, 3, 2],
            [0.1; 4],
            [0.0; 4],
            [Boundary::Trim, Boundary::Periodic, Boundary::Trim, Boundary::Periodic],
        )
        .unwrap();
        let once = propagate_mask(&g, &bits);
        let twice = propagate_mask(&g, &once);
        for i in 0..bits.len() {
            prop_assert!(!bits[i] || once[i]);
            prop_assert!(!once[i] || twice[i]);
        }
        prop_assert_eq!(propagate_mask(&g, &vec![false; bits.len()]), vec![false; bits.len()]);
    }
}
