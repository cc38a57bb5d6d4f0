//! Discrete differential calculus on a weighted graph.
//!
//! With `μ` the vertex measure and `ω` the edge weights:
//!
//! ```text
//! Γ(ψ₁,ψ₂)(x) = 1/(2μ(x)) Σ_{y∼x} ω_xy (ψ₁(y)-ψ₁(x)) (ψ₂(y)-ψ₂(x))
//! |∇ψ|(x)     = √Γ(ψ,ψ)(x)
//! Δ_s ψ(x)    = 1/(2μ(x)) Σ_{y∼x} (|∇ψ|^{s-2}(y) + |∇ψ|^{s-2}(x)) ω_xy (ψ(y)-ψ(x))
//! ∫_V ψ dμ    = Σ_x μ(x) ψ(x)
//! ```
//!
//! For `s < 2` the factor `|∇ψ|^{s-2}(z)` is taken as 0 where `|∇ψ|(z) = 0`.
//! Every difference multiplying such a factor is itself zero, so this only
//! removes `0 · ∞` terms.

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::function::GraphFunction;
use crate::graph::WeightedGraph;
use crate::sum::{self, CompensatedSum};

/// Operator fields on graphs smaller than this are computed sequentially
/// even under [`Exec::Parallel`].
pub const PARALLEL_VERTEX_THRESHOLD: usize = 4096;

fn check_vertex(g: &WeightedGraph, x: usize) -> Result<()> {
    if x >= g.vertex_count() {
        return Err(Error::VertexOutOfRange {
            vertex: x,
            count: g.vertex_count(),
        });
    }
    Ok(())
}

fn check_exponent(s: f64) -> Result<()> {
    if !(s > 1.0) {
        return Err(Error::ExponentTooSmall(s));
    }
    Ok(())
}

/// `|∇ψ|^{s-2}` with the zero-gradient convention.
#[inline]
pub fn gradient_weight(grad_norm: f64, s: f64) -> f64 {
    if grad_norm == 0.0 && s < 2.0 {
        0.0
    } else {
        grad_norm.powf(s - 2.0)
    }
}

#[inline]
pub(crate) fn gamma_unchecked(g: &WeightedGraph, a: &[f64], b: &[f64], x: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for (y, w) in g.neighbors(x) {
        acc.add(w * (a[y] - a[x]) * (b[y] - b[x]));
    }
    acc.value() / (2.0 * g.mu(x))
}

#[inline]
pub(crate) fn grad_norm_unchecked(g: &WeightedGraph, psi: &[f64], x: usize) -> f64 {
    gamma_unchecked(g, psi, psi, x).max(0.0).sqrt()
}

/// `|∇ψ|` at every vertex.
pub(crate) fn grad_norm_field_unchecked(g: &WeightedGraph, psi: &[f64], exec: Exec) -> Vec<f64> {
    let exec = field_exec(g, exec);
    exec::map_indices(exec, g.vertex_count(), |x| grad_norm_unchecked(g, psi, x))
}

fn field_exec(g: &WeightedGraph, exec: Exec) -> Exec {
    if g.vertex_count() < PARALLEL_VERTEX_THRESHOLD {
        Exec::Sequential
    } else {
        exec
    }
}

/// `Δ_s ψ(x)` given precomputed gradient weights `|∇ψ|^{s-2}`.
#[inline]
pub(crate) fn s_laplacian_weighted(g: &WeightedGraph, psi: &[f64], weights: &[f64], x: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for (y, w) in g.neighbors(x) {
        let diff = psi[y] - psi[x];
        if diff != 0.0 {
            acc.add((weights[y] + weights[x]) * w * diff);
        }
    }
    acc.value() / (2.0 * g.mu(x))
}

pub(crate) fn s_laplacian_field_unchecked(
    g: &WeightedGraph,
    psi: &[f64],
    grad_norms: &[f64],
    s: f64,
    exec: Exec,
) -> Vec<f64> {
    let weights: Vec<f64> = grad_norms.iter().map(|&n| gradient_weight(n, s)).collect();
    let exec = field_exec(g, exec);
    exec::map_indices(exec, g.vertex_count(), |x| s_laplacian_weighted(g, psi, &weights, x))
}

/// `Γ(ψ₁, ψ₂)(x)`.
pub fn gamma(g: &WeightedGraph, psi1: &GraphFunction, psi2: &GraphFunction, x: usize) -> Result<f64> {
    psi1.check_size(g)?;
    psi2.check_size(g)?;
    check_vertex(g, x)?;
    Ok(gamma_unchecked(g, psi1, psi2, x))
}

/// `|∇ψ|(x) = √Γ(ψ)(x)`.
pub fn grad_norm(g: &WeightedGraph, psi: &GraphFunction, x: usize) -> Result<f64> {
    psi.check_size(g)?;
    check_vertex(g, x)?;
    Ok(grad_norm_unchecked(g, psi, x))
}

/// `|∇ψ|` as a function on the vertices.
pub fn grad_norm_field(g: &WeightedGraph, psi: &GraphFunction, exec: Exec) -> Result<GraphFunction> {
    psi.check_size(g)?;
    Ok(grad_norm_field_unchecked(g, psi, exec).into())
}

/// `Δ_s ψ(x)`.
pub fn s_laplacian(g: &WeightedGraph, psi: &GraphFunction, s: f64, x: usize) -> Result<f64> {
    psi.check_size(g)?;
    check_exponent(s)?;
    check_vertex(g, x)?;
    // only x and its neighbors need gradient weights
    let mut weights = vec![0.0; g.vertex_count()];
    weights[x] = gradient_weight(grad_norm_unchecked(g, psi, x), s);
    for (y, _) in g.neighbors(x) {
        weights[y] = gradient_weight(grad_norm_unchecked(g, psi, y), s);
    }
    Ok(s_laplacian_weighted(g, psi, &weights, x))
}

/// `Δ_s ψ` at every vertex.
pub fn s_laplacian_field(g: &WeightedGraph, psi: &GraphFunction, s: f64, exec: Exec) -> Result<GraphFunction> {
    psi.check_size(g)?;
    check_exponent(s)?;
    let norms = grad_norm_field_unchecked(g, psi, exec);
    Ok(s_laplacian_field_unchecked(g, psi, &norms, s, exec).into())
}

/// `∫_V ψ dμ`, compensated.
pub fn integrate(g: &WeightedGraph, psi: &GraphFunction) -> Result<f64> {
    psi.check_size(g)?;
    Ok(integrate_unchecked(g, psi))
}

pub(crate) fn integrate_unchecked(g: &WeightedGraph, psi: &[f64]) -> f64 {
    sum::sum(g.measure().iter().zip(psi).map(|(m, v)| m * v))
}

/// `∫ (Δ_s ψ) φ dμ + ∫ |∇ψ|^{s-2} Γ(ψ,φ) dμ`; zero up to rounding on any finite graph.
pub fn integration_by_parts_defect(g: &WeightedGraph, psi: &GraphFunction, phi: &GraphFunction, s: f64) -> Result<f64> {
    psi.check_size(g)?;
    phi.check_size(g)?;
    check_exponent(s)?;
    let norms = grad_norm_field_unchecked(g, psi, Exec::Sequential);
    let lap = s_laplacian_field_unchecked(g, psi, &norms, s, Exec::Sequential);
    let mut acc = CompensatedSum::new();
    for x in 0..g.vertex_count() {
        acc.add(g.mu(x) * lap[x] * phi[x]);
        let weight = gradient_weight(norms[x], s);
        if weight != 0.0 {
            acc.add(g.mu(x) * weight * gamma_unchecked(g, psi, phi, x));
        }
    }
    Ok(acc.value())
}
