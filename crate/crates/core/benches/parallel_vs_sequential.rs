use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pqgraph::calculus::s_laplacian_field;
use pqgraph::solver::{random_positive, solve_many, SolveTarget};
use pqgraph::*;

fn grid(rows: usize, cols: usize) -> WeightedGraph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c), 1.0));
            }
        }
    }
    WeightedGraph::from_edges(vec![1.0; rows * cols], &edges)
}

fn instance(side: usize, ratio: f64) -> ProblemInstance {
    let n = side * side;
    let base = ProblemInstance::new(
        grid(side, side),
        CoefficientFields::uniform(n, 1.0, 1.0, 0.1, 1.0).unwrap(),
        Exponents::new(3.0, 2.0, 0.5, 3.0).unwrap(),
        1.0,
    )
    .unwrap();
    base.with_lambda(ratio * lambda_star(&base)).unwrap()
}

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn laplacian_field(c: &mut Criterion) {
    let mut group = c.benchmark_group("s_laplacian_field");
    for side in [32usize, 128] {
        let g = grid(side, side);
        let psi = random_positive(side * side, 0.1, 2.0, 1);
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, side * side), &exec, |b, &exec| {
                b.iter(|| s_laplacian_field(&g, black_box(&psi), 3.0, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn fiber_batch(c: &mut Criterion) {
    let inst = instance(20, 0.5);
    let dirs: Vec<_> = (0..256).map(|s| random_positive(400, 0.01, 2.0, s)).collect();
    let mut group = c.benchmark_group("analyze_fibers_256");
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| analyze_fibers(&inst, black_box(&dirs), exec)));
    }
    group.finish();
}

fn multi_start(c: &mut Criterion) {
    let inst = instance(10, 0.5);
    let inits: Vec<_> = (0..8).map(|s| random_positive(100, 0.3, 3.0, s)).collect();
    let opts = SolverOptions::default();
    let mut group = c.benchmark_group("plus_branch_8_starts");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| solve_many(&inst, SolveTarget::Branch(Branch::Plus), black_box(&inits), &opts, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, laplacian_field, fiber_batch, multi_start);
criterion_main!(benches);
