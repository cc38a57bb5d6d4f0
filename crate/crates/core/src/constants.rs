//! Closed-form thresholds: `Λ*`, the norm separation constants `X(λ)`, `X₀`,
//! `S(λ)`, `S₀`.
//!
//! With `r = α+1-p` and `s = p-1+γ`:
//!
//! ```text
//! X(λ) = [ s / (λ(α+γ)‖g‖∞ μ₀^{(p-1-α)/p} a₀^{-(α+1)/p}) ]^{1/r}
//! X₀   = ((α+γ)/r)^{1/s} a₀^{-(1-γ)/(ps)} ‖f‖^{1/s}
//! S(λ) = (s/(λ(α+γ)))^{1/r} μ₀^{1/(α+1)} a₀^{1/r} ‖g‖∞^{-1/r}
//! S₀   = ((α+γ)/r)^{1/s} μ₀^{-r/(p(α+1))} a₀^{-1/s} ‖f‖^{1/s}
//! Λ*   = (s/(α+γ))^{(α+γ)/s} (r/s)^{r/s} ‖g‖∞^{-1} μ₀^{r/p} a₀^{(α+γ)/s} ‖f‖^{-r/s}
//! ```
//!
//! where `‖f‖ = ‖f‖_{p/(p-1+γ)}`.

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;

/// The scalars the closed forms depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantInputs {
    pub p: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub a0: f64,
    pub mu0: f64,
    pub g_sup: f64,
    pub f_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsReport {
    pub lambda: f64,
    pub lambda_star: f64,
    pub x_lambda: f64,
    pub x0: f64,
    pub s_lambda: f64,
    pub s0: f64,
}

impl ConstantInputs {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let e = inst.exponents();
        let s = inst.scalars();
        Self {
            p: e.p,
            gamma: e.gamma,
            alpha: e.alpha,
            a0: s.a0,
            mu0: s.mu0,
            g_sup: s.g_sup,
            f_norm: s.f_norm_p,
        }
    }

    fn r(&self) -> f64 {
        self.alpha + 1.0 - self.p
    }

    fn s(&self) -> f64 {
        self.p - 1.0 + self.gamma
    }

    pub fn lambda_star(&self) -> f64 {
        let (r, s, ag) = (self.r(), self.s(), self.alpha + self.gamma);
        (s / ag).powf(ag / s) * (r / s).powf(r / s) / self.g_sup
            * self.mu0.powf(r / self.p)
            * self.a0.powf(ag / s)
            * self.f_norm.powf(-r / s)
    }

    pub fn x_lambda(&self, lambda: f64) -> f64 {
        let (r, s, ag, p) = (self.r(), self.s(), self.alpha + self.gamma, self.p);
        let denom = lambda
            * ag
            * self.g_sup
            * self.mu0.powf((p - 1.0 - self.alpha) / p)
            * self.a0.powf(-(self.alpha + 1.0) / p);
        (s / denom).powf(1.0 / r)
    }

    pub fn x0(&self) -> f64 {
        let (r, s, ag, p) = (self.r(), self.s(), self.alpha + self.gamma, self.p);
        (ag / r).powf(1.0 / s) * self.a0.powf(-(1.0 - self.gamma) / (p * s)) * self.f_norm.powf(1.0 / s)
    }

    pub fn s_lambda(&self, lambda: f64) -> f64 {
        let (r, s, ag) = (self.r(), self.s(), self.alpha + self.gamma);
        (s / (lambda * ag)).powf(1.0 / r)
            * self.mu0.powf(1.0 / (self.alpha + 1.0))
            * self.a0.powf(1.0 / r)
            * self.g_sup.powf(-1.0 / r)
    }

    pub fn s0(&self) -> f64 {
        let (r, s, ag, p) = (self.r(), self.s(), self.alpha + self.gamma, self.p);
        (ag / r).powf(1.0 / s)
            * self.mu0.powf(-r / (p * (self.alpha + 1.0)))
            * self.a0.powf(-1.0 / s)
            * self.f_norm.powf(1.0 / s)
    }

    /// All constants at `λ > 0`.
    pub fn evaluate(&self, lambda: f64) -> Result<ConstantsReport> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::LambdaOutOfRange {
                lambda,
                range: "(0, ∞)".into(),
            });
        }
        Ok(ConstantsReport {
            lambda,
            lambda_star: self.lambda_star(),
            x_lambda: self.x_lambda(lambda),
            x0: self.x0(),
            s_lambda: self.s_lambda(lambda),
            s0: self.s0(),
        })
    }
}

impl ConstantsReport {
    /// `|X(Λ*) - X₀| / X₀` and `|S(Λ*) - S₀| / S₀`, evaluated from `inputs`.
    pub fn identity_defects(inputs: &ConstantInputs) -> (f64, f64) {
        let ls = inputs.lambda_star();
        let x0 = inputs.x0();
        let s0 = inputs.s0();
        (
            (inputs.x_lambda(ls) - x0).abs() / x0,
            (inputs.s_lambda(ls) - s0).abs() / s0,
        )
    }
}

/// `Λ*` of the instance (independent of its λ).
pub fn lambda_star(inst: &ProblemInstance) -> f64 {
    ConstantInputs::from_instance(inst).lambda_star()
}

/// Constants at the instance's λ, which must be positive.
pub fn constants(inst: &ProblemInstance) -> Result<ConstantsReport> {
    ConstantInputs::from_instance(inst).evaluate(inst.lambda())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs() -> ConstantInputs {
        ConstantInputs {
            p: 3.0,
            gamma: 0.5,
            alpha: 3.0,
            a0: 1.0,
            mu0: 1.0,
            g_sup: 1.0,
            f_norm: 1.0,
        }
    }

    #[test]
    fn single_vertex_lambda_star() {
        // r = 1, s = 2.5, α+γ = 3.5: Λ* = (2.5/3.5)^{1.4} (0.4)^{0.4}
        let expected = (2.5f64 / 3.5).powf(1.4) * 0.4f64.powf(0.4);
        assert!((inputs().lambda_star() - expected).abs() < 1e-15);
    }

    #[test]
    fn identities_at_threshold() {
        let (dx, ds) = ConstantsReport::identity_defects(&inputs());
        assert!(dx < 1e-14 && ds < 1e-14);
    }

    #[test]
    fn x_scales_with_lambda_ratio() {
        let c = inputs();
        let ls = c.lambda_star();
        // X(λ) = X₀ (Λ*/λ)^{1/r}
        let x = c.x_lambda(ls / 2.0);
        assert!((x - c.x0() * 2.0).abs() < 1e-13 * x);
        assert!(c.evaluate(0.0).is_err());
        assert!(c.evaluate(-1.0).is_err());
    }
}
