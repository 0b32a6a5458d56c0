use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hkcoeff::chains::{boundary_sweep, fm_system, m_functor, RegionKind};
use hkcoeff::coeff::FaceCaches;
use hkcoeff::hecke::{tau_multiply, HeckeElt};
use hkcoeff::parahoric::{t_functor, FiniteQuotient, TfCache};
use hkcoeff::verify::seeded_module;
use hkcoeff::{Face, GroupData, GroupKind, Zm};

fn hecke(c: &mut Criterion) {
    let gd = GroupData::new(GroupKind::Pgl2, 3).unwrap();
    let ring = Zm::new(9).unwrap();
    let elements = gd.elements_up_to(6);
    let a = HeckeElt::tau(gd, ring, elements[elements.len() / 2]);
    let b = HeckeElt::tau(gd, ring, elements[elements.len() - 1]);
    c.bench_function("tau_multiply pgl2 q3 len6", |bench| {
        bench.iter(|| tau_multiply(black_box(&a), black_box(&b)).unwrap())
    });
}

fn functors(c: &mut Criterion) {
    let gd = GroupData::new(GroupKind::Sl2, 3).unwrap();
    let ring = Zm::new(9).unwrap();
    let m = seeded_module(gd, ring, 3, 5).unwrap();
    let cache = TfCache::new(Arc::new(FiniteQuotient::new(gd, Face::X0).unwrap()), ring).unwrap();
    let local = hkcoeff::hecke::restrict_module(&m, Face::X0, false).unwrap();
    c.bench_function("t_functor sl2 q3 x0", |bench| bench.iter(|| t_functor(&cache, black_box(&local)).unwrap()));

    let caches = FaceCaches::new(gd, ring).unwrap();
    let (_, apartment) = fm_system(&m, &caches, RegionKind::Apartment, 3).unwrap();
    c.bench_function("m_functor sl2 q3 N3", |bench| bench.iter(|| m_functor(black_box(&apartment)).unwrap()));

    let (_, tree) = fm_system(&m, &caches, RegionKind::Tree, 4).unwrap();
    c.bench_function("boundary_sweep sl2 q3 N4", |bench| bench.iter(|| boundary_sweep(black_box(&tree), 0).unwrap()));
}

criterion_group!(benches, hecke, functors);
criterion_main!(benches);
