use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use invlim_core::arith::{rat, snf};
use invlim_core::hull::build_injective_presentation;
use invlim_core::ladder::{point_map, run_ladder, DirectChain, InverseChain};
use invlim_core::rng::Seed;
use invlim_core::{Atom, AtomElement, Element, Extent, Hom, IntMatrix, ModuleShape};

fn bench_snf(c: &mut Criterion) {
    let mut g = c.benchmark_group("snf");
    let small = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
    let wide = IntMatrix::from_i64(&[
        &[12, -30, 7, 18, 25],
        &[-9, 14, 27, -3, 8],
        &[30, 1, -22, 16, -11],
        &[5, -28, 13, 19, 2],
        &[-17, 6, 24, -29, 10],
    ]);
    g.bench_function("3x3", |b| b.iter(|| snf(black_box(&small))));
    g.bench_function("5x5", |b| b.iter(|| snf(black_box(&wide))));
    g.finish();
}

fn bench_atoms(c: &mut Criterion) {
    let p = Atom::pruefer(3).unwrap();
    let x = AtomElement::new(p.clone(), rat(5, 81)).unwrap();
    let y = AtomElement::new(p.clone(), rat(7, 243)).unwrap();
    c.bench_function("pruefer add", |b| b.iter(|| black_box(&x).add(black_box(&y))));
    let q = AtomElement::new(Atom::QmodZ, rat(11, 360)).unwrap();
    c.bench_function("q/z divide by 7", |b| b.iter(|| black_box(&q).divide(&7.into())));
}

fn bench_hull(c: &mut Criterion) {
    let mat = IntMatrix::from_i64(&[&[4, 6], &[0, 9], &[0, 0]]);
    c.bench_function("injective presentation", |b| {
        b.iter(|| build_injective_presentation(black_box(&mat), 3))
    });
}

fn bench_ladder(c: &mut Criterion) {
    let qz = Arc::new(ModuleShape::single("r", Atom::QmodZ, Extent::Finite(1)));
    let mut g = c.benchmark_group("ladder");
    for k in [1usize, 2, 3, 4] {
        let inv = InverseChain::constant(&Hom::mult_by_int(&qz, 2.into()), k).unwrap();
        let dir = DirectChain::from_indices(&vec![2.into(); k]).unwrap();
        let x = Element::from_coords(&qz, [("r", 0, rat(1, 3))]).unwrap();
        let f0 = point_map(&x).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| run_ladder(&f0, &inv, &dir, k, Seed(0)))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_snf, bench_atoms, bench_hull, bench_ladder);
criterion_main!(benches);
