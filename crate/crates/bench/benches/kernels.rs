use ccc_core::cone::{double_bracket_check, BracketMode};
use ccc_core::{adapted_cone, certify, models, xi_z, CertifyConfig, Hypersurface, XiConfig};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

fn structure_function(c: &mut Criterion) {
    c.bench_function("structure_function random n=3 deg=2", |b| {
        b.iter_batched(
            || models::random_polynomial(3, 2, 11).unwrap(),
            |omega| omega.structure_function(),
            BatchSize::SmallInput,
        )
    });
}

fn xi(c: &mut Criterion) {
    let z = Hypersurface::fermat(3, 4).unwrap();
    let cfg = XiConfig::default();
    c.bench_function("xi_z fermat quartic", |b| b.iter(|| xi_z(&z, &cfg).unwrap()));
    let z5 = Hypersurface::fermat(5, 4).unwrap();
    c.bench_function("xi_z fermat quartic threefold", |b| b.iter(|| xi_z(&z5, &cfg).unwrap()));
}

fn brackets(c: &mut Criterion) {
    let z = Hypersurface::fermat(3, 4).unwrap();
    let cs = adapted_cone(&models::random_polynomial(3, 2, 88).unwrap(), &z).unwrap();
    let mut g = c.benchmark_group("double_bracket 8 samples");
    g.sample_size(10);
    for (name, mode) in [("prime", BracketMode::Prime), ("float", BracketMode::Float)] {
        g.bench_function(name, |b| {
            b.iter(|| double_bracket_check(&cs, mode, 8, 1, 2_147_483_647, 1e-8).unwrap())
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let z = Hypersurface::fermat(3, 4).unwrap();
    let x = xi_z(&z, &XiConfig::default()).unwrap();
    let cfg = CertifyConfig::default();
    let mut g = c.benchmark_group("certify");
    g.sample_size(10);
    for (name, omega) in [
        ("rescaled", models::rescaled_default(3).unwrap()),
        ("twisted", models::twisted_default(3).unwrap()),
        ("round_trip", models::round_trip(3, 4).unwrap().coframe),
    ] {
        let cs = adapted_cone(&omega, &z).unwrap();
        g.bench_function(name, |b| b.iter(|| certify(&cs, &x, &cfg)));
    }
    g.finish();
}

criterion_group!(benches, structure_function, xi, brackets, pipeline);
criterion_main!(benches);
