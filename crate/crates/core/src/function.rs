use std::ops::{Deref, Index};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// A real-valued function on the vertex set, stored densely by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction(Vec<f64>);

impl GraphFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    /// Indicator of a single vertex.
    pub fn indicator(n: usize, vertex: usize) -> Self {
        let mut v = vec![0.0; n];
        v[vertex] = 1.0;
        Self(v)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..n).map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &GraphFunction) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + c * b).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    /// Errors unless the function has one value per vertex of `graph`.
    pub fn check_size(&self, graph: &WeightedGraph) -> Result<()> {
        if self.0.len() != graph.vertex_count() {
            return Err(Error::SizeMismatch {
                expected: graph.vertex_count(),
                found: self.0.len(),
            });
        }
        Ok(())
    }

    pub fn check_positive(&self) -> Result<()> {
        match self.0.iter().position(|&v| !(v > 0.0)) {
            Some(vertex) => Err(Error::NonPositive {
                vertex,
                value: self.0[vertex],
            }),
            None => Ok(()),
        }
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        match self.0.iter().position(|&v| !(v >= 0.0)) {
            Some(vertex) => Err(Error::Negative {
                vertex,
                value: self.0[vertex],
            }),
            None => Ok(()),
        }
    }
}

impl Deref for GraphFunction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for GraphFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for GraphFunction {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}
