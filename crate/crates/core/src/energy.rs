//! The energy functional, its weak and pointwise Euler–Lagrange residuals
//! and the a-priori pairing bounds.
//!
//! ```text
//! J_λ(u) = A/p + B/q - F/(1-γ) - λ G/(α+1)
//! A = ∫ (|∇u|^p + a|u|^p) dμ     B = ∫ (|∇u|^q + b|u|^q) dμ
//! F = ∫ f |u|^{1-γ} dμ           G = ∫ g |u|^{α+1} dμ
//! ```

use crate::calculus::{gamma_unchecked, grad_norm_field_unchecked, gradient_weight, s_laplacian_field_unchecked};
use crate::error::Result;
use crate::exec::Exec;
use crate::function::GraphFunction;
use crate::instance::ProblemInstance;
use crate::spaces::{lp_norm_unchecked, sobolev_power_with, Check, CheckReport};
use crate::sum::{self, CompensatedSum};

/// The four integrals that make up `J_λ` and the fibering map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    /// `‖u‖^p_{W_a^{1,p}}`
    pub a_term: f64,
    /// `‖u‖^q_{W_b^{1,q}}`
    pub b_term: f64,
    /// `∫ f|u|^{1-γ} dμ`
    pub f_term: f64,
    /// `∫ g|u|^{α+1} dμ`
    pub g_term: f64,
}

impl EnergyTerms {
    pub fn compute(inst: &ProblemInstance, u: &GraphFunction) -> Result<Self> {
        u.check_size(inst.graph())?;
        Ok(Self::compute_unchecked(inst, u))
    }

    pub(crate) fn compute_unchecked(inst: &ProblemInstance, u: &[f64]) -> Self {
        let g = inst.graph();
        let fields = inst.fields();
        let e = inst.exponents();
        let norms = grad_norm_field_unchecked(g, u, Exec::Sequential);
        let a_term = sobolev_power_with(g, u, fields.a(), e.p, &norms);
        let b_term = sobolev_power_with(g, u, fields.b(), e.q, &norms);
        let f_term = sum::sum((0..u.len()).map(|x| g.mu(x) * fields.f()[x] * u[x].abs().powf(1.0 - e.gamma)));
        let g_term = sum::sum((0..u.len()).map(|x| g.mu(x) * fields.g()[x] * u[x].abs().powf(e.alpha + 1.0)));
        Self {
            a_term,
            b_term,
            f_term,
            g_term,
        }
    }

    /// `J_λ(t u)` from the terms of `u`, by homogeneity.
    pub fn energy_at_scale(&self, inst: &ProblemInstance, t: f64) -> f64 {
        let e = inst.exponents();
        t.powf(e.p) * self.a_term / e.p + t.powf(e.q) * self.b_term / e.q
            - t.powf(1.0 - e.gamma) * self.f_term / (1.0 - e.gamma)
            - inst.lambda() * t.powf(e.alpha + 1.0) * self.g_term / (e.alpha + 1.0)
    }
}

/// `J_λ(u)`.
pub fn j_lambda(inst: &ProblemInstance, u: &GraphFunction) -> Result<f64> {
    Ok(EnergyTerms::compute(inst, u)?.energy_at_scale(inst, 1.0))
}

/// Residual of the pointwise equation
/// `-Δ_p u - Δ_q u + a u^{p-1} + b u^{q-1} - f u^{-γ} - λ g u^α` at every vertex.
pub fn pointwise_residual(inst: &ProblemInstance, u: &GraphFunction) -> Result<GraphFunction> {
    pointwise_residual_with(inst, u, Exec::Sequential)
}

pub fn pointwise_residual_with(inst: &ProblemInstance, u: &GraphFunction, exec: Exec) -> Result<GraphFunction> {
    u.check_size(inst.graph())?;
    u.check_positive()?;
    Ok(residual_unchecked(inst, u, exec).into())
}

pub(crate) fn residual_unchecked(inst: &ProblemInstance, u: &[f64], exec: Exec) -> Vec<f64> {
    let g = inst.graph();
    let fields = inst.fields();
    let e = inst.exponents();
    let lambda = inst.lambda();
    let norms = grad_norm_field_unchecked(g, u, exec);
    let lap_p = s_laplacian_field_unchecked(g, u, &norms, e.p, exec);
    let lap_q = if e.q == e.p {
        lap_p.clone()
    } else {
        s_laplacian_field_unchecked(g, u, &norms, e.q, exec)
    };
    (0..u.len())
        .map(|x| {
            let v = u[x];
            -lap_p[x] - lap_q[x] + fields.a()[x] * v.powf(e.p - 1.0) + fields.b()[x] * v.powf(e.q - 1.0)
                - fields.f()[x] * v.powf(-e.gamma)
                - lambda * fields.g()[x] * v.powf(e.alpha)
        })
        .collect()
}

/// Weak-form residual against the test function `φ`:
/// `∫(|∇u|^{p-2}Γ(u,φ) + a u^{p-1}φ) + ∫(|∇u|^{q-2}Γ(u,φ) + b u^{q-1}φ) - ∫ f u^{-γ}φ - λ∫ g u^α φ`.
///
/// Evaluated through `Γ` directly, independently of the `Δ_s` route.
pub fn weak_residual(inst: &ProblemInstance, u: &GraphFunction, phi: &GraphFunction) -> Result<f64> {
    let g = inst.graph();
    u.check_size(g)?;
    phi.check_size(g)?;
    u.check_positive()?;
    let fields = inst.fields();
    let e = inst.exponents();
    let norms = grad_norm_field_unchecked(g, u, Exec::Sequential);
    let mut acc = CompensatedSum::new();
    for x in 0..u.len() {
        let mu = g.mu(x);
        let gam = gamma_unchecked(g, u, phi, x);
        let v = u[x];
        acc.add(mu * gradient_weight(norms[x], e.p) * gam);
        acc.add(mu * gradient_weight(norms[x], e.q) * gam);
        acc.add(mu * fields.a()[x] * v.powf(e.p - 1.0) * phi[x]);
        acc.add(mu * fields.b()[x] * v.powf(e.q - 1.0) * phi[x]);
        acc.add(-mu * fields.f()[x] * v.powf(-e.gamma) * phi[x]);
        acc.add(-mu * inst.lambda() * fields.g()[x] * v.powf(e.alpha) * phi[x]);
    }
    Ok(acc.value())
}

/// Gradient of `J_λ` with respect to the vertex values: `μ(x) · residual(x)`.
pub fn energy_gradient(inst: &ProblemInstance, u: &GraphFunction) -> Result<GraphFunction> {
    let r = pointwise_residual(inst, u)?;
    let g = inst.graph();
    Ok(GraphFunction::from_fn(u.len(), |x| g.mu(x) * r[x]))
}

/// Pairing bounds for the operator parts of the weak form at a nonnegative `u`
/// against any test function `φ`:
///
/// ```text
/// |∫(|∇u|^{p-2}Γ(u,φ) + a u^{p-1}φ)| ≤ ‖u‖^{p-1}_{W_a^{1,p}} ‖φ‖_{W_a^{1,p}}
/// |∫(|∇u|^{q-2}Γ(u,φ) + b u^{q-1}φ)| ≤ ‖u‖^{q-1}_{W_b^{1,q}} ‖φ‖_{W_b^{1,q}}
/// |∫ g u^α φ|                        ≤ ‖g‖_∞ ‖u‖_∞^{α-p+1} ‖u‖_p^{p-1} ‖φ‖_p
/// ```
pub fn pairing_bounds(inst: &ProblemInstance, u: &GraphFunction, phi: &GraphFunction) -> Result<CheckReport> {
    let g = inst.graph();
    u.check_size(g)?;
    phi.check_size(g)?;
    u.check_nonnegative()?;
    let fields = inst.fields();
    let e = inst.exponents();
    let u_norms = grad_norm_field_unchecked(g, u, Exec::Sequential);
    let phi_norms = grad_norm_field_unchecked(g, phi, Exec::Sequential);

    let mut part_p = CompensatedSum::new();
    let mut part_q = CompensatedSum::new();
    let mut part_g = CompensatedSum::new();
    for x in 0..u.len() {
        let mu = g.mu(x);
        let gam = gamma_unchecked(g, u, phi, x);
        part_p.add(mu * (gradient_weight(u_norms[x], e.p) * gam + fields.a()[x] * u[x].powf(e.p - 1.0) * phi[x]));
        part_q.add(mu * (gradient_weight(u_norms[x], e.q) * gam + fields.b()[x] * u[x].powf(e.q - 1.0) * phi[x]));
        part_g.add(mu * fields.g()[x] * u[x].powf(e.alpha) * phi[x]);
    }

    let wa_u = sobolev_power_with(g, u, fields.a(), e.p, &u_norms).powf(1.0 / e.p);
    let wa_phi = sobolev_power_with(g, phi, fields.a(), e.p, &phi_norms).powf(1.0 / e.p);
    let wb_u = sobolev_power_with(g, u, fields.b(), e.q, &u_norms).powf(1.0 / e.q);
    let wb_phi = sobolev_power_with(g, phi, fields.b(), e.q, &phi_norms).powf(1.0 / e.q);
    let sup_u = u.max_abs();
    let g_bound = inst.scalars().g_sup
        * sup_u.powf(e.alpha - e.p + 1.0)
        * lp_norm_unchecked(g, u, e.p).powf(e.p - 1.0)
        * lp_norm_unchecked(g, phi, e.p);

    Ok(CheckReport {
        checks: vec![
            Check::new("pairing_p", part_p.value().abs(), wa_u.powf(e.p - 1.0) * wa_phi),
            Check::new("pairing_q", part_q.value().abs(), wb_u.powf(e.q - 1.0) * wb_phi),
            Check::new("pairing_g", part_g.value().abs(), g_bound),
        ],
    })
}

/// `⟨∇J(u) - ∇J(w), u - w⟩ = Σ μ (r_u - r_w)(u - w)` for positive `u, w`.
/// Nonnegative whenever `J_λ` is convex on the positive cone, in particular for `λ ≤ 0`.
/// Returns the pairing and a magnitude scale for tolerances.
pub fn monotonicity_pairing(inst: &ProblemInstance, u: &GraphFunction, w: &GraphFunction) -> Result<(f64, f64)> {
    let ru = pointwise_residual(inst, u)?;
    let rw = pointwise_residual(inst, w)?;
    w.check_size(inst.graph())?;
    let g = inst.graph();
    let mut acc = CompensatedSum::new();
    let mut scale = CompensatedSum::new();
    for x in 0..u.len() {
        let d = u[x] - w[x];
        acc.add(g.mu(x) * (ru[x] - rw[x]) * d);
        scale.add(g.mu(x) * (ru[x].abs() + rw[x].abs()) * d.abs());
    }
    Ok((acc.value(), scale.value()))
}
