//! Finite weighted graphs.
//!
//! Vertices are dense ids `0..n` with an optional external name each. The
//! adjacency is stored in compressed rows; every undirected edge appears in
//! both endpoint rows. Construction never rejects a graph: invariants are
//! checked by [`validate_graph`], and consumers that need a valid graph
//! (e.g. [`crate::ProblemInstance`]) refuse on a non-empty report.

use std::collections::{BTreeMap, VecDeque};

/// Edge endpoints and weight as supplied to a constructor.
pub type Edge = (usize, usize, f64);

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    names: Vec<String>,
    measure: Vec<f64>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    mu0: f64,
    degree_bound: f64,
}

impl WeightedGraph {
    /// Builds a graph from undirected edges, each stored in both rows.
    pub fn from_edges(measure: Vec<f64>, edges: &[Edge]) -> Self {
        let n = measure.len();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(x, y, w) in edges {
            assert!(x < n && y < n, "edge ({x}, {y}) out of range for {n} vertices");
            rows[x].push((y, w));
            if x != y {
                rows[y].push((x, w));
            }
        }
        Self::from_adjacency(measure, rows)
    }

    /// Builds a graph from per-vertex neighbor rows taken verbatim. Nothing
    /// forces the rows to be symmetric; [`validate_graph`] reports it.
    pub fn from_adjacency(measure: Vec<f64>, rows: Vec<Vec<(usize, f64)>>) -> Self {
        assert_eq!(measure.len(), rows.len(), "one adjacency row per vertex");
        let n = measure.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(y, _)| y);
            for (y, w) in row {
                assert!(y < n, "neighbor {y} out of range for {n} vertices");
                neighbors.push(y);
                weights.push(w);
            }
            offsets.push(neighbors.len());
        }
        let names = (0..n).map(|i| i.to_string()).collect();
        let mut g = Self {
            names,
            measure,
            offsets,
            neighbors,
            weights,
            mu0: 0.0,
            degree_bound: 0.0,
        };
        g.mu0 = g.measure.iter().copied().fold(f64::INFINITY, f64::min);
        g.degree_bound = (0..n).map(|x| g.weighted_degree(x)).fold(0.0, f64::max);
        g
    }

    /// Replaces the external vertex names (defaults are `"0"`, `"1"`, ...).
    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.vertex_count());
        self.names = names;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.measure.len()
    }

    /// Number of stored directed adjacency entries (twice the undirected edge count).
    pub fn adjacency_len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn mu(&self, x: usize) -> f64 {
        self.measure[x]
    }

    /// Smallest vertex measure.
    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// Largest weighted degree `max_x Σ_{y∼x} ω_xy`.
    pub fn degree_bound(&self) -> f64 {
        self.degree_bound
    }

    pub fn total_measure(&self) -> f64 {
        crate::sum::sum(self.measure.iter().copied())
    }

    /// Neighbors of `x` with edge weights, in increasing neighbor order.
    #[inline]
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[x]..self.offsets[x + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn weighted_degree(&self, x: usize) -> f64 {
        self.neighbors(x).map(|(_, w)| w).sum()
    }

    /// Weight of the stored entry `x → y`, if any.
    pub fn weight(&self, x: usize, y: usize) -> Option<f64> {
        let range = self.offsets[x]..self.offsets[x + 1];
        self.neighbors[range.clone()]
            .binary_search(&y)
            .ok()
            .map(|i| self.weights[range.start + i])
    }

    /// Undirected edges `(x, y, ω)` with `x < y`, taken from the lower endpoint's row.
    pub fn edges(&self) -> Vec<Edge> {
        (0..self.vertex_count())
            .flat_map(|x| {
                self.neighbors(x)
                    .filter(move |&(y, _)| x < y)
                    .map(move |(y, w)| (x, y, w))
            })
            .collect()
    }

    /// Breadth-first hop distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            for (y, _) in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Minimal number of edges between `x` and `y`.
    pub fn distance(&self, x: usize, y: usize) -> Option<usize> {
        self.distances_from(x)[y]
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.distances_from(0).iter().all(Option::is_some)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub mu0: f64,
    pub degree_bound: f64,
    pub connected: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every graph invariant and reports instead of failing.
pub fn validate_graph(g: &WeightedGraph) -> ValidationReport {
    let mut violations = Vec::new();
    let n = g.vertex_count();
    if n == 0 {
        violations.push("graph has no vertices".to_string());
    }
    for x in 0..n {
        let mu = g.mu(x);
        if !(mu > 0.0 && mu.is_finite()) {
            violations.push(format!("vertex {}: measure {mu} is not positive and finite", g.name(x)));
        }
    }
    let mut seen = BTreeMap::new();
    for x in 0..n {
        for (y, w) in g.neighbors(x) {
            if x == y {
                violations.push(format!("vertex {}: self-loop", g.name(x)));
                continue;
            }
            if *seen.entry((x, y)).and_modify(|c| *c += 1).or_insert(1) == 2 {
                violations.push(format!("edge {}-{}: stored more than once", g.name(x), g.name(y)));
            }
            if !(w > 0.0 && w.is_finite()) {
                violations.push(format!(
                    "edge {}-{}: weight {w} is not positive and finite",
                    g.name(x),
                    g.name(y)
                ));
            }
            match g.weight(y, x) {
                None => violations.push(format!("edge {}-{}: reverse entry missing", g.name(x), g.name(y))),
                Some(back) if back.to_bits() != w.to_bits() && x < y => violations.push(format!(
                    "edge {}-{}: asymmetric weights {w} and {back}",
                    g.name(x),
                    g.name(y)
                )),
                Some(_) => {}
            }
        }
    }
    let connected = g.is_connected();
    if !connected {
        violations.push("graph is not connected".to_string());
    }
    ValidationReport {
        violations,
        mu0: g.mu0(),
        degree_bound: g.degree_bound(),
        connected,
    }
}
