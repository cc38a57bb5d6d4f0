//! Parameter sweeps over λ or p, one row per grid point in grid order.

use crate::constants::{ConstantInputs, ConstantsReport};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::instance::ProblemInstance;
use crate::solver::{default_init, solve, Branch, SolveReport, SolveTarget, SolverOptions};
use crate::spaces::{lp_norm_unchecked, sobolev_norm, Exponents};

#[derive(Debug, Clone, PartialEq)]
pub enum SweepGrid {
    /// Absolute λ values.
    Lambda(Vec<f64>),
    /// λ as multiples of Λ*.
    LambdaRatio(Vec<f64>),
    /// Values of `p` at a fixed ratio λ/Λ*, recomputing Λ* per point.
    P { values: Vec<f64>, lambda_ratio: f64 },
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        match self {
            SweepGrid::Lambda(v) | SweepGrid::LambdaRatio(v) => v.len(),
            SweepGrid::P { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveSummary {
    pub converged: bool,
    pub energy: f64,
    pub wa_norm: f64,
    pub lalpha_norm: f64,
    pub residual_inf: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    /// The swept value (λ, ratio or p).
    pub parameter: f64,
    pub lambda: f64,
    pub p: f64,
    /// Present when λ > 0.
    pub constants: Option<ConstantsReport>,
    pub plus: Option<SolveSummary>,
    pub minus: Option<SolveSummary>,
    pub negative: Option<SolveSummary>,
    /// Why a solve was skipped or failed.
    pub note: Option<String>,
}

impl SweepRow {
    fn summaries(&self) -> impl Iterator<Item = &SolveSummary> {
        self.plus.iter().chain(&self.minus).chain(&self.negative)
    }

    pub fn attempted(&self) -> bool {
        self.summaries().next().is_some() || self.note.is_some()
    }

    pub fn any_converged(&self) -> bool {
        self.summaries().any(|s| s.converged)
    }
}

/// True when at least one point attempted a solve and none converged.
pub fn all_stalled(rows: &[SweepRow]) -> bool {
    let attempted: Vec<_> = rows.iter().filter(|r| r.attempted()).collect();
    !attempted.is_empty() && attempted.iter().all(|r| !r.any_converged())
}

fn summarize(inst: &ProblemInstance, report: &SolveReport) -> SolveSummary {
    let e = inst.exponents();
    let g = inst.graph();
    SolveSummary {
        converged: report.converged,
        energy: report.energy,
        wa_norm: sobolev_norm(g, &report.solution, inst.fields().a(), e.p).unwrap_or(f64::NAN),
        lalpha_norm: lp_norm_unchecked(g, &report.solution, e.alpha + 1.0),
        residual_inf: report.residual_inf,
        iterations: report.iterations,
    }
}

fn sweep_point(
    base: &ProblemInstance,
    grid: &SweepGrid,
    i: usize,
    solve_points: bool,
    opts: &SolverOptions,
) -> Result<SweepRow> {
    let (parameter, inst) = match grid {
        SweepGrid::Lambda(v) => (v[i], base.with_lambda(v[i])?),
        SweepGrid::LambdaRatio(v) => {
            let ls = ConstantInputs::from_instance(base).lambda_star();
            (v[i], base.with_lambda(v[i] * ls)?)
        }
        SweepGrid::P { values, lambda_ratio } => {
            let e = base.exponents();
            let exps = Exponents::new(values[i], e.q, e.gamma, e.alpha)?;
            let changed = base.with_exponents(exps)?;
            let ls = ConstantInputs::from_instance(&changed).lambda_star();
            (values[i], changed.with_lambda(lambda_ratio * ls)?)
        }
    };
    let lambda = inst.lambda();
    let constants = if lambda > 0.0 {
        Some(ConstantInputs::from_instance(&inst).evaluate(lambda)?)
    } else {
        None
    };
    let mut row = SweepRow {
        index: i,
        parameter,
        lambda,
        p: inst.exponents().p,
        constants,
        plus: None,
        minus: None,
        negative: None,
        note: None,
    };
    if !solve_points {
        return Ok(row);
    }
    let init = default_init(&inst);
    let mut run = |target: SolveTarget| match solve(&inst, target, &init, opts) {
        Ok(r) => Some(summarize(&inst, &r)),
        Err(err) => {
            row.note = Some(err.to_string());
            None
        }
    };
    if lambda < 0.0 {
        row.negative = run(SolveTarget::GlobalNegative);
    } else if constants.is_some_and(|c| lambda < c.lambda_star) {
        let plus = run(SolveTarget::Branch(Branch::Plus));
        let minus = run(SolveTarget::Branch(Branch::Minus));
        row.plus = plus;
        row.minus = minus;
    } else {
        row.note = Some(format!("no solver applies at λ = {lambda:e}"));
    }
    Ok(row)
}

/// Evaluates the constants (and, if `solve_points`, the solvers) at every grid point.
pub fn sweep(
    base: &ProblemInstance,
    grid: &SweepGrid,
    solve_points: bool,
    opts: &SolverOptions,
    exec: Exec,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidOptions("sweep grid is empty".into()));
    }
    opts.validate()?;
    exec::map_indices(exec, grid.len(), |i| sweep_point(base, grid, i, solve_points, opts))
        .into_iter()
        .collect()
}
