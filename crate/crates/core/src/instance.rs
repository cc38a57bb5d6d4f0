use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{validate_graph, WeightedGraph};
use crate::spaces::{linf_norm, lp_norm_unchecked, CoefficientFields, Exponents};

/// Scalars derived from the instance data and reused by every constant and bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceScalars {
    pub a0: f64,
    pub b0: f64,
    pub mu0: f64,
    pub g_sup: f64,
    /// `‖f‖_{p/(p-1+γ)}`
    pub f_norm_p: f64,
    /// `‖f‖_{q/(q-1+γ)}`
    pub f_norm_q: f64,
}

/// Graph, coefficients, exponents and the parameter λ of
/// `-Δ_p u - Δ_q u + a u^{p-1} + b u^{q-1} = f u^{-γ} + λ g u^α`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    graph: Arc<WeightedGraph>,
    fields: Arc<CoefficientFields>,
    exps: Exponents,
    lambda: f64,
    scalars: InstanceScalars,
}

impl ProblemInstance {
    pub fn new(graph: WeightedGraph, fields: CoefficientFields, exps: Exponents, lambda: f64) -> Result<Self> {
        Self::from_shared(Arc::new(graph), Arc::new(fields), exps, lambda)
    }

    pub fn from_shared(
        graph: Arc<WeightedGraph>,
        fields: Arc<CoefficientFields>,
        exps: Exponents,
        lambda: f64,
    ) -> Result<Self> {
        let report = validate_graph(&graph);
        if !report.is_valid() {
            return Err(Error::InvalidGraph(report.violations));
        }
        if fields.len() != graph.vertex_count() {
            return Err(Error::SizeMismatch {
                expected: graph.vertex_count(),
                found: fields.len(),
            });
        }
        exps.validate()?;
        if !lambda.is_finite() {
            return Err(Error::LambdaOutOfRange {
                lambda,
                range: "finite reals".into(),
            });
        }
        let scalars = compute_scalars(&graph, &fields, &exps);
        Ok(Self {
            graph,
            fields,
            exps,
            lambda,
            scalars,
        })
    }

    /// Same data with a different λ.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::LambdaOutOfRange {
                lambda,
                range: "finite reals".into(),
            });
        }
        Ok(Self { lambda, ..self.clone() })
    }

    /// Same graph and coefficients with different exponents.
    pub fn with_exponents(&self, exps: Exponents) -> Result<Self> {
        exps.validate()?;
        let scalars = compute_scalars(&self.graph, &self.fields, &exps);
        Ok(Self {
            exps,
            scalars,
            ..self.clone()
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<WeightedGraph> {
        Arc::clone(&self.graph)
    }

    pub fn fields(&self) -> &CoefficientFields {
        &self.fields
    }

    pub fn shared_fields(&self) -> Arc<CoefficientFields> {
        Arc::clone(&self.fields)
    }

    pub fn exponents(&self) -> &Exponents {
        &self.exps
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn scalars(&self) -> &InstanceScalars {
        &self.scalars
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }
}

fn compute_scalars(graph: &WeightedGraph, fields: &CoefficientFields, exps: &Exponents) -> InstanceScalars {
    InstanceScalars {
        a0: fields.a0(),
        b0: fields.b0(),
        mu0: graph.mu0(),
        g_sup: linf_norm(fields.g()),
        f_norm_p: lp_norm_unchecked(graph, fields.f(), exps.f_index_p()),
        f_norm_q: lp_norm_unchecked(graph, fields.f(), exps.f_index_q()),
    }
}
