use dirac_reduce::clifford::{chiral_project, make_chiral_basis, Chirality, GammaRepresentation};
use dirac_reduce::emfield::FieldConfig;
use dirac_reduce::evolver::{evolve_with_report, EvolutionProblem, InitialData};
use dirac_reduce::gridops::{
    convergence_order_on_common_region, current, dirac_residual, Boundary, GridField,
    RealGridField, ScalarGridField, SpacetimeGrid, SpinorGridField,
};
use dirac_reduce::reduction::{
    current_from_component, eta_independence_check, extract_component, extract_eta_component,
    one_component_residual, reconstruct, ReductionContext,
};
use dirac_reduce::{Error, Spinor};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(nx: usize, steps: usize) -> SpacetimeGrid {
    let dx = 2.0 * std::f64::consts::PI / nx as f64;
    let mut b = [Boundary::Periodic; 4];
    b[0] = Boundary::Trim;
    SpacetimeGrid::new([steps + 1, nx, 1, 1], [0.5 * dx, dx, 1.0, 1.0], [0.0; 4], b).unwrap()
}

fn chiral() -> GammaRepresentation {
    GammaRepresentation::builtin("chiral").unwrap()
}

fn reference_ctx(field: &FieldConfig) -> ReductionContext {
    let rep = chiral();
    let basis = make_chiral_basis(
        &rep,
        Chirality::Left,
        Some((
            Spinor::from_real([0.0, 0.0, -1.0, 0.0]),
            Spinor::from_real([0.0, 0.0, 0.0, 1.0]),
        )),
    )
    .unwrap();
    ReductionContext::new(rep, basis, field.build().unwrap()).unwrap()
}

fn random_spinor(rng: &mut impl Rng) -> Spinor {
    Spinor::new(std::array::from_fn(|_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }))
}

fn mix(seed: u64) -> InitialData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    InitialData::FourierMix {
        modes: (-1..=1).map(|m| (m, random_spinor(&mut rng))).collect(),
    }
}

fn fields() -> [FieldConfig; 2] {
    [
        FieldConfig::new("constant-E", &[("e", 0.6), ("gauge", 1.0)]),
        FieldConfig::new("plane-wave", &[("amplitude", 0.5), ("k", 1.0)]),
    ]
}

fn blocks(ctx: &ReductionContext, data: &InitialData) -> Vec<SpinorGridField> {
    let mut g = grid(32, 10);
    let mut out = Vec::new();
    for _ in 0..3 {
        let p =
            EvolutionProblem::from_data(ctx.rep().clone(), ctx.field().clone(), g.clone(), data)
                .unwrap();
        let ev = evolve_with_report(&p).unwrap();
        assert!(ev.max_step_drift < 1e-10, "drift {}", ev.max_step_drift);
        out.push(ev.block);
        g = g.refined();
    }
    out
}

fn order<T: dirac_reduce::gridops::FieldValue>(fields: &[GridField<T>]) -> f64 {
    convergence_order_on_common_region(fields).unwrap().order
}

fn in_band(o: f64) -> bool {
    (1.8..=2.2).contains(&o)
}

#[test]
fn forward_and_backward_orders() {
    for fc in fields() {
        let ctx = reference_ctx(&fc);
        let (mut fwd, mut back, mut dres, mut eta, mut cur) =
            (vec![], vec![], vec![], vec![], vec![]);
        for psi in blocks(&ctx, &mix(11)) {
            let phi = extract_component(&psi, &ctx);
            let r = one_component_residual(&phi, &ctx).unwrap();
            assert!(r.coverage >= 0.9 && r.form_mismatch < 1e-12);
            let rec = reconstruct(&phi, &ctx).unwrap();
            fwd.push(r.residual);
            back.push(rec.psi.zip_with(&psi, |a, b| a - b).unwrap());
            dres.push(dirac_residual(&rec.psi, ctx.field(), ctx.rep()).unwrap());
            eta.push(
                rec.eta_phi
                    .zip_with(&extract_eta_component(&psi, &ctx), |a, b| a - b)
                    .unwrap(),
            );
            let truth = current(&psi, ctx.rep());
            let rebuilt = current_from_component(&phi, &ctx).unwrap();
            let err: RealGridField = rebuilt.total[0]
                .zip_with(&truth.total[0], |a, b| a - b)
                .unwrap();
            cur.push(err);
        }
        for (name, o) in [
            ("forward", order(&fwd)),
            ("backward", order(&back)),
            ("dirac", order(&dres)),
            ("eta", order(&eta)),
            ("charge", order(&cur)),
        ] {
            assert!(in_band(o), "{} {name} order {o}", fc.name);
        }
    }
}

#[test]
fn non_solution_does_not_converge() {
    for fc in fields() {
        let ctx = reference_ctx(&fc);
        let mut g = grid(32, 10);
        let mut res = Vec::new();
        for _ in 0..3 {
            let phi = ScalarGridField::from_fn(&g, |x| {
                Complex64::new(x[1].cos() * (1.0 + x[0]), (2.0 * x[1]).sin())
            });
            res.push(one_component_residual(&phi, &ctx).unwrap().residual);
            g = g.refined();
        }
        assert!(order(&res) < 0.5, "{}", fc.name);
    }
}

#[test]
fn eta_substitution_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for fc in fields() {
        let ctx = reference_ctx(&fc);
        let psi = blocks(&ctx, &mix(3)).pop().unwrap();
        let phi = extract_component(&psi, &ctx);
        let generic = ScalarGridField::from_fn(phi.grid(), |x| {
            Complex64::new((x[1] + x[0]).sin(), x[0] * x[1].cos())
        });
        for _ in 0..20 {
            let mut sigma = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if sigma.norm() < 0.1 {
                sigma += 1.0;
            }
            let tau = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let on_solution = eta_independence_check(&phi, &ctx, sigma, tau).unwrap();
            assert!(on_solution.reconstruction_error <= 1e-10);
            assert!(on_solution.full_reconstruction_error <= 1e-10);
            let on_generic = eta_independence_check(&generic, &ctx, sigma, tau).unwrap();
            assert!(on_generic.passes(1e-10), "{on_generic:?}");
        }
    }
}

#[test]
fn c_sign_flip_leaves_reconstruction_unchanged() {
    for fc in fields() {
        let ctx = reference_ctx(&fc);
        let flipped = ctx.with_negated_c().unwrap();
        let psi = blocks(&ctx, &mix(8)).remove(1);
        let phi = extract_component(&psi, &ctx);
        let a = reconstruct(&phi, &ctx).unwrap();
        let b = reconstruct(&phi, &flipped).unwrap();
        assert!(a.psi.max_diff(&b.psi).unwrap() <= 1e-14);
        let ra = one_component_residual(&phi, &ctx).unwrap();
        let rb = one_component_residual(&phi, &flipped).unwrap();
        let sum = ra.residual.zip_with(&rb.residual, |x, y| x + y).unwrap();
        assert!((ra.max_norm - rb.max_norm).abs() <= 1e-14 * (1.0 + ra.max_norm));
        // The bilinear form changes sign with C.
        assert!(sum.max_norm() <= 1e-12 * (1.0 + ra.max_norm));
    }
}

#[test]
fn reconstructed_chiral_part_converges_to_projection() {
    let ctx = reference_ctx(&fields()[0]);
    let errors: Vec<SpinorGridField> = blocks(&ctx, &mix(2))
        .iter()
        .map(|psi| {
            let rec = reconstruct(&extract_component(psi, &ctx), &ctx).unwrap();
            let truth = psi.map(|v| chiral_project(&v, Chirality::Right, ctx.rep()));
            rec.chiral_part.zip_with(&truth, |a, b| a - b).unwrap()
        })
        .collect();
    let o = order(&errors);
    assert!(in_band(o), "order {o}");
}

#[test]
fn pure_h3_is_degenerate_for_reference_basis() {
    let fc = FieldConfig::new("constant-H", &[("h", 1.0), ("axis", 3.0)]);
    let ctx = reference_ctx(&fc);
    let g = grid(16, 4);
    let phi = ScalarGridField::from_fn(&g, |x| Complex64::new(x[1].cos(), 0.0));
    assert!(matches!(
        one_component_residual(&phi, &ctx),
        Err(Error::DegenerateField)
    ));
    assert!(matches!(
        reconstruct(&phi, &ctx),
        Err(Error::DegenerateField)
    ));
}
