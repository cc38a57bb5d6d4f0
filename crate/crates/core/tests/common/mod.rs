#![allow(dead_code)]

use pqgraph::{CoefficientFields, Exponents, GraphFunction, ProblemInstance, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn path(n: usize, weight: f64) -> WeightedGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i, weight)).collect();
    WeightedGraph::from_edges(vec![1.0; n], &edges)
}

pub fn cycle(n: usize) -> WeightedGraph {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
    edges.push((n - 1, 0, 1.0));
    WeightedGraph::from_edges(vec![1.0; n], &edges)
}

pub fn grid(rows: usize, cols: usize) -> WeightedGraph {
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

pub fn star(leaves: usize) -> WeightedGraph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i, 1.0)).collect();
    WeightedGraph::from_edges(vec![1.0; leaves + 1], &edges)
}

/// Connected graph on `n` vertices: a random spanning tree plus random extra
/// edges, with random weights and measures.
pub fn random_connected(n: usize, extra: usize, seed: u64) -> WeightedGraph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for i in 1..n {
        let j = r.gen_range(0..i);
        present.insert((j, i));
        edges.push((j, i, r.gen_range(0.1..3.0)));
    }
    for _ in 0..extra {
        if n < 3 {
            break;
        }
        let x = r.gen_range(0..n);
        let y = r.gen_range(0..n);
        let key = (x.min(y), x.max(y));
        if x != y && present.insert(key) {
            edges.push((key.0, key.1, r.gen_range(0.1..3.0)));
        }
    }
    let measure = (0..n).map(|_| r.gen_range(0.2..4.0)).collect();
    WeightedGraph::from_edges(measure, &edges)
}

/// Random `d`-regular multigraph-free graph via repeated pairing attempts.
pub fn random_regular(n: usize, d: usize, seed: u64) -> WeightedGraph {
    assert!((n * d).is_multiple_of(2) && d < n);
    let mut r = rng(seed);
    'attempt: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|x| std::iter::repeat_n(x, d)).collect();
        for i in (1..stubs.len()).rev() {
            let j = r.gen_range(0..=i);
            stubs.swap(i, j);
        }
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::new();
        for pair in stubs.chunks(2) {
            let (x, y) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if x == y || !seen.insert((x, y)) {
                continue 'attempt;
            }
            edges.push((x, y, r.gen_range(0.5..2.0)));
        }
        let g = WeightedGraph::from_edges(vec![1.0; n], &edges);
        if g.is_connected() {
            return g;
        }
    }
}

pub fn grid_instance(lambda: f64) -> ProblemInstance {
    ProblemInstance::new(
        grid(10, 10),
        CoefficientFields::uniform(100, 1.0, 1.0, 0.1, 1.0).unwrap(),
        Exponents::new(3.0, 2.0, 0.5, 3.0).unwrap(),
        lambda,
    )
    .unwrap()
}

pub fn single_vertex(p: f64, q: f64, lambda: f64) -> ProblemInstance {
    ProblemInstance::new(
        WeightedGraph::from_edges(vec![1.0], &[]),
        CoefficientFields::uniform(1, 1.0, 1.0, 1.0, 1.0).unwrap(),
        Exponents::new(p, q, 0.5, 3.0).unwrap(),
        lambda,
    )
    .unwrap()
}

pub fn random_function(n: usize, lo: f64, hi: f64, r: &mut ChaCha8Rng) -> GraphFunction {
    GraphFunction::from_fn(n, |_| r.gen_range(lo..hi))
}

/// All sign-change roots of `h` on a log-spaced grid over `[lo, hi]`, each
/// refined by plain bisection.
pub fn scalar_roots(h: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let ts: Vec<f64> = (0..=samples)
        .map(|k| lo * (hi / lo).powf(k as f64 / samples as f64))
        .collect();
    let mut roots = Vec::new();
    for w in ts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (h(a), h(b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        let pos_left = fa > 0.0;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (h(m) > 0.0) == pos_left {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}
