//! Discrete `(p,q)`-Laplacian calculus on finite weighted graphs and
//! Nehari-manifold solvers for
//!
//! ```text
//! -Δ_p u - Δ_q u + a u^{p-1} + b u^{q-1} = f u^{-γ} + λ g u^α,   u > 0
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod constants;
pub mod energy;
pub mod error;
pub mod exec;
pub mod fiber;
pub mod function;
pub mod graph;
pub mod instance;
pub mod io;
pub mod solver;
pub mod spaces;
pub mod sum;
pub mod sweep;

pub use constants::{constants, lambda_star, ConstantInputs, ConstantsReport};
pub use energy::{energy_gradient, j_lambda, pointwise_residual, weak_residual, EnergyTerms};
pub use error::{Error, Result};
pub use exec::Exec;
pub use fiber::{analyze_fiber, analyze_fibers, nehari_classify, FiberAnalysis, FiberClass, FiberMap, NehariClass};
pub use function::GraphFunction;
pub use graph::{validate_graph, ValidationReport, WeightedGraph};
pub use instance::{InstanceScalars, ProblemInstance};
pub use solver::{
    minimize_global_negative, minimize_on_branch, project_to_nehari, verify_solution, Branch, SolveReport,
    SolverOptions,
};
pub use spaces::{CoefficientFields, Exponents};
