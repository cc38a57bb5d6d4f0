//! Descent solvers: projected gradient descent on the two Nehari branches for
//! `0 < λ < Λ*`, and unconstrained descent on the positive cone for `λ < 0`.
//!
//! Gradients are taken in the `μ`-weighted inner product, where the gradient
//! of `J_λ` is the pointwise residual. Steps are Barzilai–Borwein trials
//! followed by Armijo backtracking; any trial with a nonpositive entry is
//! rejected. On a branch every trial is rescaled onto the branch with the
//! fiber roots `t1` or `t2`, and since `d/dt J_λ(tu) = 0` at a Nehari point
//! the residual is also the gradient of the projected energy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{constants, lambda_star};
use crate::energy::{monotonicity_pairing, residual_unchecked, EnergyTerms};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::fiber::{nehari_classify, FiberClass, FiberMap, NehariClass, MANIFOLD_TOL};
use crate::function::GraphFunction;
use crate::instance::ProblemInstance;
use crate::spaces::{lp_norm_unchecked, sobolev_norm};

const STEP_MIN: f64 = 1e-12;
const STEP_MAX: f64 = 1e12;
const MAX_BACKTRACKS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn class(self) -> NehariClass {
        match self {
            Branch::Plus => NehariClass::Plus,
            Branch::Minus => NehariClass::Minus,
        }
    }
}

/// How a trial point with a nonpositive entry is handled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PositivityPolicy {
    /// Shrink the step and try again.
    #[default]
    RejectStep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Bound on the sup norm of the pointwise residual.
    pub grad_tol: f64,
    /// Relative energy band treated as rounding noise.
    pub energy_tol: f64,
    pub step_init: f64,
    pub armijo_c: f64,
    pub shrink: f64,
    pub seed: u64,
    pub positivity_floor_policy: PositivityPolicy,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            grad_tol: 1e-8,
            energy_tol: 1e-12,
            step_init: 1.0,
            armijo_c: 1e-4,
            shrink: 0.5,
            seed: 0,
            positivity_floor_policy: PositivityPolicy::RejectStep,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidOptions(what.to_string()));
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.grad_tol > 0.0) || !(self.energy_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.step_init > 0.0) || !self.step_init.is_finite() {
            return bad("step_init must be positive");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c must lie in (0, 1)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must lie in (0, 1)");
        }
        Ok(())
    }
}

/// A named inequality `lhs ≤ rhs` (or strict variant) with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifiedCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl VerifiedCheck {
    fn new(name: &str, lhs: f64, rhs: f64, ok: bool) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            ok,
        }
    }

    fn strict(name: &str, lhs: f64, rhs: f64) -> Self {
        Self::new(name, lhs, rhs, lhs < rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: GraphFunction,
    pub energy: f64,
    pub residual_inf: f64,
    pub residual_l2: f64,
    /// `None` when `λ ≤ 0`.
    pub nehari_class: Option<NehariClass>,
    pub iterations: usize,
    pub inequality_checks: Vec<VerifiedCheck>,
    pub converged: bool,
    /// `J_λ` at the start point and at every accepted iterate.
    pub energies: Vec<f64>,
    /// Accepted iterates that did not classify to the requested branch.
    pub branch_violations: usize,
}

impl SolveReport {
    pub fn all_checks_pass(&self) -> bool {
        self.inequality_checks.iter().all(|c| c.ok)
    }

    pub fn check(&self, name: &str) -> Option<&VerifiedCheck> {
        self.inequality_checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub residual_tol: f64,
    /// Random comparison functions for the monotonicity probe (`λ < 0`).
    pub probes: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            probes: 100,
            seed: 0,
        }
    }
}

/// What a solve targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveTarget {
    Branch(Branch),
    GlobalNegative,
}

/// `t1(u)·u` or `t2(u)·u`.
pub fn project_to_nehari(inst: &ProblemInstance, u: &GraphFunction, branch: Branch) -> Result<GraphFunction> {
    u.check_size(inst.graph())?;
    project_unchecked(inst, u, branch)
}

fn project_unchecked(inst: &ProblemInstance, u: &GraphFunction, branch: Branch) -> Result<GraphFunction> {
    let analysis = FiberMap::new(inst, u)?.analyze()?;
    let t = match (analysis.classification, branch) {
        (FiberClass::TwoRoots, Branch::Plus) => analysis.t1,
        (FiberClass::TwoRoots, Branch::Minus) => analysis.t2,
        (class, _) => return Err(Error::NoRootPair(class)),
    };
    Ok(u.scaled(t.expect("two roots")))
}

/// Constant function `1`, the deterministic start point of every solver.
pub fn default_init(inst: &ProblemInstance) -> GraphFunction {
    GraphFunction::constant(inst.vertex_count(), 1.0)
}

/// Positive function with entries drawn log-uniformly from `[lo, hi]`.
pub fn random_positive(n: usize, lo: f64, hi: f64, seed: u64) -> GraphFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (lo.ln(), hi.ln());
    GraphFunction::from_fn(n, |_| rng.gen_range(a..=b).exp())
}

/// Minimizes `J_λ` over `D⁺` or `D⁻`; requires `0 < λ < Λ*`.
pub fn minimize_on_branch(
    inst: &ProblemInstance,
    branch: Branch,
    init: &GraphFunction,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    let ls = lambda_star(inst);
    let lambda = inst.lambda();
    if !(lambda > 0.0 && lambda < ls) {
        return Err(Error::LambdaOutOfRange {
            lambda,
            range: format!("(0, {ls:e})"),
        });
    }
    init.check_size(inst.graph())?;
    init.check_nonnegative()?;
    let start = project_unchecked(inst, init, branch)?;
    Ok(descend(inst, start, Some(branch), opts))
}

/// Minimizes `J_λ` over the positive cone; requires `λ < 0`.
pub fn minimize_global_negative(
    inst: &ProblemInstance,
    init: &GraphFunction,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    let lambda = inst.lambda();
    if !(lambda < 0.0) {
        return Err(Error::LambdaOutOfRange {
            lambda,
            range: "(-∞, 0)".into(),
        });
    }
    init.check_size(inst.graph())?;
    init.check_positive()?;
    Ok(descend(inst, init.clone(), None, opts))
}

pub fn solve(
    inst: &ProblemInstance,
    target: SolveTarget,
    init: &GraphFunction,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    match target {
        SolveTarget::Branch(b) => minimize_on_branch(inst, b, init, opts),
        SolveTarget::GlobalNegative => minimize_global_negative(inst, init, opts),
    }
}

/// Independent solves from several start points.
pub fn solve_many(
    inst: &ProblemInstance,
    target: SolveTarget,
    inits: &[GraphFunction],
    opts: &SolverOptions,
    exec: Exec,
) -> Vec<Result<SolveReport>> {
    exec::map_slice(exec, inits, |u| solve(inst, target, u, opts))
}

fn mu_dot(inst: &ProblemInstance, a: &[f64], b: &[f64]) -> f64 {
    let g = inst.graph();
    crate::sum::sum(a.iter().zip(b).enumerate().map(|(x, (p, q))| g.mu(x) * p * q))
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn energy_of(inst: &ProblemInstance, u: &[f64]) -> f64 {
    EnergyTerms::compute_unchecked(inst, u).energy_at_scale(inst, 1.0)
}

fn descend(inst: &ProblemInstance, start: GraphFunction, branch: Option<Branch>, opts: &SolverOptions) -> SolveReport {
    let mut u = start;
    let mut j = energy_of(inst, &u);
    let mut r = residual_unchecked(inst, &u, Exec::Sequential);
    let mut energies = vec![j];
    let mut step = opts.step_init;
    let mut iterations = 0;
    let mut branch_violations = 0;
    let mut converged = sup(&r) <= opts.grad_tol;

    while !converged && iterations < opts.max_iters {
        let gnorm2 = mu_dot(inst, &r, &r);
        let r_sup = sup(&r);
        let mut trial = step.clamp(STEP_MIN, STEP_MAX);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            if let Some(next) = trial_point(inst, &u, &r, trial, branch) {
                let j_new = energy_of(inst, &next);
                let decrease = opts.armijo_c * trial * gnorm2;
                if j_new <= j - decrease {
                    accepted = Some((next, j_new, None));
                    break;
                }
                // Below the rounding floor of J the Armijo test is meaningless;
                // fall back to requiring a smaller residual.
                if decrease < opts.energy_tol * j.abs() && j_new <= j + opts.energy_tol * j.abs() {
                    let r_new = residual_unchecked(inst, &next, Exec::Sequential);
                    if sup(&r_new) < r_sup {
                        accepted = Some((next, j_new, Some(r_new)));
                        break;
                    }
                }
            }
            trial *= opts.shrink;
        }
        let Some((next, j_new, r_new)) = accepted else { break };
        let r_new = r_new.unwrap_or_else(|| residual_unchecked(inst, &next, Exec::Sequential));

        let s: Vec<f64> = next.iter().zip(u.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = r_new.iter().zip(&r).map(|(a, b)| a - b).collect();
        let sy = mu_dot(inst, &s, &y);
        step = if sy > 0.0 {
            mu_dot(inst, &s, &s) / sy
        } else {
            opts.step_init
        };

        if let Some(b) = branch {
            if nehari_classify(inst, &next).ok() != Some(b.class()) {
                branch_violations += 1;
            }
        }
        u = next;
        j = j_new;
        r = r_new;
        energies.push(j);
        iterations += 1;
        converged = sup(&r) <= opts.grad_tol;
    }

    let residual_inf = sup(&r);
    let residual_l2 = mu_dot(inst, &r, &r).sqrt();
    let nehari_class = if inst.lambda() > 0.0 {
        nehari_classify(inst, &u).ok()
    } else {
        None
    };
    let checks = verify_solution_with(
        inst,
        &u,
        &VerifyOptions {
            residual_tol: opts.grad_tol,
            seed: opts.seed,
            ..VerifyOptions::default()
        },
    )
    .unwrap_or_default();
    SolveReport {
        solution: u,
        energy: j,
        residual_inf,
        residual_l2,
        nehari_class,
        iterations,
        inequality_checks: checks,
        converged,
        energies,
        branch_violations,
    }
}

fn trial_point(
    inst: &ProblemInstance,
    u: &GraphFunction,
    r: &[f64],
    step: f64,
    branch: Option<Branch>,
) -> Option<GraphFunction> {
    let next: Vec<f64> = u.iter().zip(r).map(|(v, g)| v - step * g).collect();
    if next.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let next = GraphFunction::new(next);
    match branch {
        None => Some(next),
        Some(b) => project_unchecked(inst, &next, b)
            .ok()
            .filter(|w| w.iter().all(|v| *v > 0.0 && v.is_finite())),
    }
}

/// [`verify_solution_with`] at default options.
pub fn verify_solution(inst: &ProblemInstance, u: &GraphFunction) -> Result<Vec<VerifiedCheck>> {
    verify_solution_with(inst, u, &VerifyOptions::default())
}

/// A-posteriori checks of a candidate solution.
///
/// Always: residual sup norm and strict positivity. For `λ > 0`: Nehari
/// membership and, when `λ < Λ*`, the norm separation of its branch (and
/// `J < 0` on `D⁺`). For `λ < 0`: `J < 0` and the monotonicity pairing against
/// random positive functions.
pub fn verify_solution_with(
    inst: &ProblemInstance,
    u: &GraphFunction,
    opts: &VerifyOptions,
) -> Result<Vec<VerifiedCheck>> {
    u.check_size(inst.graph())?;
    u.check_positive()?;
    let g = inst.graph();
    let e = inst.exponents();
    let lambda = inst.lambda();
    let r = residual_unchecked(inst, u, Exec::Sequential);
    let terms = EnergyTerms::compute_unchecked(inst, u);
    let energy = terms.energy_at_scale(inst, 1.0);

    let mut checks = vec![
        VerifiedCheck::new("residual_inf", sup(&r), opts.residual_tol, sup(&r) <= opts.residual_tol),
        VerifiedCheck::new("positivity", 0.0, u.min(), u.min() > 0.0),
    ];

    if lambda > 0.0 {
        let scale = terms.a_term + terms.b_term + terms.f_term;
        let phi1 = terms.a_term + terms.b_term - terms.f_term - lambda * terms.g_term;
        checks.push(VerifiedCheck::new(
            "on_nehari",
            phi1.abs(),
            MANIFOLD_TOL * scale,
            phi1.abs() <= MANIFOLD_TOL * scale,
        ));
        let class = nehari_classify(inst, u)?;
        let consts = constants(inst)?;
        if lambda < consts.lambda_star {
            let wa = sobolev_norm(g, u, inst.fields().a(), e.p)?;
            let la = lp_norm_unchecked(g, u, e.alpha + 1.0);
            match class {
                NehariClass::Plus => {
                    checks.push(VerifiedCheck::strict("class_plus_wa_below_x0", wa, consts.x0));
                    checks.push(VerifiedCheck::strict("class_plus_lalpha_below_s0", la, consts.s0));
                    checks.push(VerifiedCheck::strict("energy_negative", energy, 0.0));
                }
                NehariClass::Minus => {
                    checks.push(VerifiedCheck::strict("class_minus_wa_above_x", consts.x_lambda, wa));
                    checks.push(VerifiedCheck::strict("class_minus_lalpha_above_s", consts.s_lambda, la));
                }
                other => checks.push(VerifiedCheck::new(
                    &format!("class_{}", other.as_str()),
                    0.0,
                    0.0,
                    false,
                )),
            }
        }
    } else if lambda < 0.0 {
        checks.push(VerifiedCheck::strict("energy_negative", energy, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut worst: Option<(f64, f64)> = None;
        for _ in 0..opts.probes {
            let w = GraphFunction::from_fn(u.len(), |x| u[x] * rng.gen_range(-2.5f64..2.5).exp());
            let (pairing, scale) = monotonicity_pairing(inst, u, &w)?;
            let ratio = pairing / scale.max(f64::MIN_POSITIVE);
            if worst.is_none_or(|(p, s)| ratio < p / s.max(f64::MIN_POSITIVE)) {
                worst = Some((pairing, scale));
            }
        }
        if let Some((pairing, scale)) = worst {
            checks.push(VerifiedCheck::new(
                "monotonicity_probe",
                -pairing,
                1e-12 * scale,
                pairing >= -1e-12 * scale,
            ));
        }
    }
    Ok(checks)
}
