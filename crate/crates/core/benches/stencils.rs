use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dirac_reduce::clifford::{make_chiral_basis, Chirality, GammaRepresentation};
use dirac_reduce::emfield::FieldConfig;
use dirac_reduce::gridops::{
    box_prime_apply, squared_identity_residual, Boundary, ScalarGridField, SpacetimeGrid,
    SpinorGridField,
};
use dirac_reduce::reduction::{one_component_residual, ReductionContext};
use dirac_reduce::Spinor;
use num_complex::Complex64;

fn grid(n: usize) -> SpacetimeGrid {
    let h = 1.0 / (n - 1) as f64;
    SpacetimeGrid::new([n, n, n, 4], [h, h, h, 0.25], [0.0; 4], [Boundary::Trim; 4]).unwrap()
}

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        (
            "serial",
            rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap(),
        ),
        ("parallel", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench_stencils(c: &mut Criterion) {
    let rep = GammaRepresentation::builtin("chiral").unwrap();
    let field = FieldConfig::new("crossed-constant", &[("ex", 0.4), ("hy", 0.3), ("hz", 0.2)])
        .build()
        .unwrap();
    let basis = make_chiral_basis(&rep, Chirality::Left, None).unwrap();
    let ctx = ReductionContext::new(rep.clone(), basis, field.clone()).unwrap();

    let mut group = c.benchmark_group("stencils");
    group.sample_size(10);
    for n in [16, 32] {
        let g = grid(n);
        let psi = SpinorGridField::from_fn(&g, |x| {
            Spinor::new([
                Complex64::new(x[0].sin(), x[1]),
                Complex64::new(x[2].cos(), 0.0),
                Complex64::new(x[3], x[0] * x[1]),
                Complex64::new(1.0, x[2]),
            ])
        });
        let phi =
            ScalarGridField::from_fn(&g, |x| Complex64::new((x[0] + x[1]).sin(), x[2] * x[3]));
        for (label, pool) in pools() {
            group.bench_with_input(
                BenchmarkId::new(format!("box_prime/{label}"), n),
                &phi,
                |b, phi| b.iter(|| pool.install(|| box_prime_apply(phi, &field).unwrap())),
            );
            group.bench_with_input(
                BenchmarkId::new(format!("squared_identity/{label}"), n),
                &psi,
                |b, psi| {
                    b.iter(|| {
                        pool.install(|| squared_identity_residual(psi, &field, &rep).unwrap())
                    })
                },
            );
            group.bench_with_input(
                BenchmarkId::new(format!("one_component/{label}"), n),
                &phi,
                |b, phi| b.iter(|| pool.install(|| one_component_residual(phi, &ctx).unwrap())),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench_stencils);
criterion_main!(benches);
