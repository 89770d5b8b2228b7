use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand_free::permutations;
use subsum::{count_automorphisms, decompose, SearchOptions};
use subsum_bench::fixture;

mod rand_free {
    use subsum::{FieldParams, Matrix, SemilinearAuto, SumGraph, VertexPermutation};

    // Deterministic spread of group elements without pulling in an RNG.
    pub fn permutations(graph: &SumGraph, field: &FieldParams, count: usize) -> Vec<VertexPermutation> {
        let n = graph.n();
        let q = field.q();
        let mut out = Vec::new();
        let mut seed = 1u64;
        while out.len() < count {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let data: Vec<u32> = (0..n * n).map(|i| ((seed >> (i % 60)) as u32) % q).collect();
            let rows: Vec<&[u32]> = data.chunks(n).collect();
            let a = Matrix::from_values(&rows).unwrap();
            let s = (seed % field.m() as u64) as u32;
            if let Ok(g) = SemilinearAuto::new(field, a, s) {
                out.push(g.as_vertex_permutation(graph).unwrap());
            }
        }
        out
    }
}

fn build(c: &mut Criterion) {
    c.bench_function("build n=3 q=4", |b| b.iter(|| fixture(black_box(3), 2, 2).unwrap()));
    c.bench_function("build n=4 q=3", |b| b.iter(|| fixture(black_box(4), 3, 1).unwrap()));
}

fn search(c: &mut Criterion) {
    let g = fixture(3, 3, 1).unwrap();
    c.bench_function("count automorphisms n=3 q=3", |b| {
        b.iter(|| count_automorphisms(black_box(&g), SearchOptions::default()).unwrap())
    });
    let g = fixture(4, 2, 1).unwrap();
    c.bench_function("count automorphisms n=4 q=2", |b| {
        b.iter(|| count_automorphisms(black_box(&g), SearchOptions::default()).unwrap())
    });
}

fn factor(c: &mut Criterion) {
    let g = fixture(3, 2, 2).unwrap();
    let perms = permutations(&g, g.field(), 32);
    c.bench_function("decompose n=3 q=4", |b| {
        b.iter(|| {
            for p in &perms {
                assert!(decompose(black_box(&g), p).unwrap().verified);
            }
        })
    });
}

criterion_group!(benches, build, search, factor);
criterion_main!(benches);
