//! Timings for the four kernels everything else is built from: the Dupont
//! homotopy, a transferred trilinear operation, the BCH product, and the
//! full Maurer-Cartan residual.

use criterion::{criterion_group, criterion_main, Criterion};

use descent_bench::{bch_arguments, coefficients, mc_candidate, tower, tw_sample};
use descent_core::deform::{bch, mc_residual_linfty};
use descent_core::transfer::TransferEngine;

fn dupont_homotopy(c: &mut Criterion) {
    let scs = tower();
    let w = tw_sample(&scs);
    c.bench_function("dupont_h", |b| b.iter(|| w.dupont_h().unwrap()));
}

fn transferred_trilinear(c: &mut Criterion) {
    let scs = tower();
    let g1 = scs.level(1);
    let e12 = g1.basis_index("e@1,2").unwrap();
    let f13 = g1.basis_index("f@1,3").unwrap();
    let h23 = g1.basis_index("h@2,3").unwrap();
    let tuple = [(1, e12), (1, f13), (1, h23)];
    c.bench_function("qhat3_basis", |b| {
        b.iter(|| {
            // A fresh engine each pass: the point is the tree sum, not the cache.
            let engine = TransferEngine::new(&scs);
            engine.transferred_bracket_basis(&tuple).unwrap()
        })
    });
}

fn bch_product(c: &mut Criterion) {
    let scs = tower();
    let algebra = coefficients();
    let (x, y, ring) = bch_arguments(&scs, &algebra);
    c.bench_function("bch_order4", |b| b.iter(|| bch(&x, &y, &ring).unwrap()));
}

fn mc_residual(c: &mut Criterion) {
    let scs = tower();
    let algebra = coefficients();
    let x = mc_candidate(&scs, &algebra);
    let engine = TransferEngine::new(&scs);
    c.bench_function("mc_residual_linfty", |b| {
        b.iter(|| mc_residual_linfty(&engine, &x, &algebra).unwrap())
    });
}

criterion_group!(kernels, dupont_homotopy, transferred_trilinear, bch_product, mc_residual);
criterion_main!(kernels);
