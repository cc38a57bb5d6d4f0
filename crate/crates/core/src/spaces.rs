//! Lebesgue and Sobolev norms on the graph, coefficient data and the
//! embedding inequalities used as numerical oracles.

use crate::calculus::{grad_norm_field_unchecked, integrate_unchecked};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::function::GraphFunction;
use crate::graph::WeightedGraph;
use crate::sum;

/// Exponents `(p, q, γ, α)` with `0 < γ < 1 < q ≤ p < α + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
    pub alpha: f64,
}

impl Exponents {
    pub fn new(p: f64, q: f64, gamma: f64, alpha: f64) -> Result<Self> {
        let e = Self { p, q, gamma, alpha };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { p, q, gamma, alpha } = *self;
        let ordered = 0.0 < gamma && gamma < 1.0 && 1.0 < q && q <= p && p < alpha + 1.0;
        if !ordered || ![p, q, gamma, alpha].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidExponents(format!(
                "need 0 < γ < 1 < q ≤ p < α+1, got p={p}, q={q}, γ={gamma}, α={alpha}"
            )));
        }
        Ok(())
    }

    /// `p/(p-1+γ)`, the Lebesgue index of `f` paired with `W_a^{1,p}`.
    pub fn f_index_p(&self) -> f64 {
        self.p / (self.p - 1.0 + self.gamma)
    }

    /// `q/(q-1+γ)`.
    pub fn f_index_q(&self) -> f64 {
        self.q / (self.q - 1.0 + self.gamma)
    }
}

/// Coefficients `a, b > 0`, `f > 0`, `g ≥ 0` with `g ≢ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFields {
    a: GraphFunction,
    b: GraphFunction,
    f: GraphFunction,
    g: GraphFunction,
    a0: f64,
    b0: f64,
}

impl CoefficientFields {
    pub fn new(a: GraphFunction, b: GraphFunction, f: GraphFunction, g: GraphFunction) -> Result<Self> {
        let n = a.len();
        if [b.len(), f.len(), g.len()].iter().any(|&l| l != n) {
            return Err(Error::InvalidCoefficients("fields have different lengths".into()));
        }
        let all_finite = [&a, &b, &f, &g].iter().all(|h| h.iter().all(|v| v.is_finite()));
        if !all_finite {
            return Err(Error::InvalidCoefficients("non-finite coefficient value".into()));
        }
        for (name, field, strict) in [("a", &a, true), ("b", &b, true), ("f", &f, true), ("g", &g, false)] {
            let bad = field.iter().position(|&v| if strict { v <= 0.0 } else { v < 0.0 });
            if let Some(x) = bad {
                let rel = if strict { "> 0" } else { "≥ 0" };
                return Err(Error::InvalidCoefficients(format!(
                    "{name}({x}) = {} violates {name} {rel}",
                    field[x]
                )));
            }
        }
        if g.is_zero() {
            return Err(Error::InvalidCoefficients("g is identically zero".into()));
        }
        let a0 = a.min();
        let b0 = b.min();
        Ok(Self { a, b, f, g, a0, b0 })
    }

    /// All four fields constant.
    pub fn uniform(n: usize, a: f64, b: f64, f: f64, g: f64) -> Result<Self> {
        Self::new(
            GraphFunction::constant(n, a),
            GraphFunction::constant(n, b),
            GraphFunction::constant(n, f),
            GraphFunction::constant(n, g),
        )
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &GraphFunction {
        &self.a
    }

    pub fn b(&self) -> &GraphFunction {
        &self.b
    }

    pub fn f(&self) -> &GraphFunction {
        &self.f
    }

    pub fn g(&self) -> &GraphFunction {
        &self.g
    }

    /// `min a`.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// `min b`.
    pub fn b0(&self) -> f64 {
        self.b0
    }
}

fn check_index(theta: f64) -> Result<()> {
    if !(theta >= 1.0) {
        return Err(Error::NormIndexTooSmall(theta));
    }
    Ok(())
}

/// `‖ψ‖_θ = (Σ μ|ψ|^θ)^{1/θ}`, evaluated relative to `‖ψ‖_∞` so large θ cannot overflow.
pub fn lp_norm(g: &WeightedGraph, psi: &GraphFunction, theta: f64) -> Result<f64> {
    psi.check_size(g)?;
    check_index(theta)?;
    Ok(lp_norm_unchecked(g, psi, theta))
}

pub(crate) fn lp_norm_unchecked(g: &WeightedGraph, psi: &[f64], theta: f64) -> f64 {
    if theta == 1.0 {
        return integrate_unchecked(g, &psi.iter().map(|v| v.abs()).collect::<Vec<_>>());
    }
    let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s = sum::sum(
        g.measure()
            .iter()
            .zip(psi)
            .map(|(m, v)| m * (v.abs() / scale).powf(theta)),
    );
    scale * s.powf(1.0 / theta)
}

/// `‖ψ‖_∞`.
pub fn linf_norm(psi: &GraphFunction) -> f64 {
    psi.max_abs()
}

/// `∫ (|∇ψ|^s + w|ψ|^s) dμ`, the s-th power of the weighted Sobolev norm.
pub fn sobolev_power(g: &WeightedGraph, psi: &GraphFunction, weight: &GraphFunction, s: f64) -> Result<f64> {
    psi.check_size(g)?;
    weight.check_size(g)?;
    if !(s > 1.0) {
        return Err(Error::ExponentTooSmall(s));
    }
    let norms = grad_norm_field_unchecked(g, psi, Exec::Sequential);
    Ok(sobolev_power_with(g, psi, weight, s, &norms))
}

pub(crate) fn sobolev_power_with(g: &WeightedGraph, psi: &[f64], weight: &[f64], s: f64, norms: &[f64]) -> f64 {
    sum::sum((0..g.vertex_count()).map(|x| g.mu(x) * (norms[x].powf(s) + weight[x] * psi[x].abs().powf(s))))
}

/// `‖ψ‖_{W^{1,s}_w} = (∫ (|∇ψ|^s + w|ψ|^s) dμ)^{1/s}`.
pub fn sobolev_norm(g: &WeightedGraph, psi: &GraphFunction, weight: &GraphFunction, s: f64) -> Result<f64> {
    Ok(sobolev_power(g, psi, weight, s)?.powf(1.0 / s))
}

/// `‖ψ‖_W = ‖ψ‖_{W_a^{1,p}} + ‖ψ‖_{W_b^{1,q}}`.
pub fn w_norm(g: &WeightedGraph, psi: &GraphFunction, fields: &CoefficientFields, exps: &Exponents) -> Result<f64> {
    Ok(sobolev_norm(g, psi, fields.a(), exps.p)? + sobolev_norm(g, psi, fields.b(), exps.q)?)
}

/// One inequality `lhs ≤ rhs` evaluated numerically.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
        }
    }

    /// `rhs - lhs`; nonnegative when the inequality holds.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// Holds up to `rel_tol` times the larger side.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.slack() >= -rel_tol * self.lhs.abs().max(self.rhs.abs())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn all_hold(&self, rel_tol: f64) -> bool {
        self.checks.iter().all(|c| c.holds(rel_tol))
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn min_slack(&self) -> f64 {
        self.checks.iter().map(Check::slack).fold(f64::INFINITY, f64::min)
    }
}

/// The embedding inequalities into `L^∞`, `L^θ` and the `f`-pairing bounds,
/// each in its `(a, p)` and `(b, q)` form. Requires `θ ≥ p`.
pub fn embedding_checks(
    g: &WeightedGraph,
    psi: &GraphFunction,
    fields: &CoefficientFields,
    exps: &Exponents,
    theta: f64,
) -> Result<CheckReport> {
    psi.check_size(g)?;
    if fields.len() != g.vertex_count() {
        return Err(Error::SizeMismatch {
            expected: g.vertex_count(),
            found: fields.len(),
        });
    }
    if !(theta >= exps.p) {
        return Err(Error::EmbeddingIndexBelowP { theta, p: exps.p });
    }
    let Exponents { p, q, gamma, .. } = *exps;
    let mu0 = g.mu0();
    let (a0, b0) = (fields.a0(), fields.b0());
    let wa = sobolev_norm(g, psi, fields.a(), p)?;
    let wb = sobolev_norm(g, psi, fields.b(), q)?;
    let sup = linf_norm(psi);
    let l_theta = lp_norm_unchecked(g, psi, theta);
    let f_pair = sum::sum((0..g.vertex_count()).map(|x| g.mu(x) * fields.f()[x] * psi[x].abs().powf(1.0 - gamma)));
    let f_p = lp_norm_unchecked(g, fields.f(), exps.f_index_p());
    let f_q = lp_norm_unchecked(g, fields.f(), exps.f_index_q());

    let checks = vec![
        Check::new("sup_by_wa", sup, (a0 * mu0).powf(-1.0 / p) * wa),
        Check::new("sup_by_wb", sup, (b0 * mu0).powf(-1.0 / q) * wb),
        Check::new(
            "ltheta_by_wa",
            l_theta,
            mu0.powf((p - theta) / (p * theta)) * a0.powf(-1.0 / p) * wa,
        ),
        Check::new(
            "ltheta_by_wb",
            l_theta,
            mu0.powf((q - theta) / (q * theta)) * b0.powf(-1.0 / q) * wb,
        ),
        Check::new(
            "f_pairing_by_wa",
            f_pair,
            a0.powf(-(1.0 - gamma) / p) * f_p * wa.powf(1.0 - gamma),
        ),
        Check::new(
            "f_pairing_by_wb",
            f_pair,
            b0.powf(-(1.0 - gamma) / q) * f_q * wb.powf(1.0 - gamma),
        ),
    ];
    Ok(CheckReport { checks })
}

/// The scalar mixing bound
/// `|x|^p + |y|^q ≥ (|x|+|y|)^{min(p,q)} / max(2^{q-1}, 2^{p-1}) - 1`,
/// reported as `rhs ≤ lhs`-style [`Check`] (lower bound on the left).
pub fn mixed_power_bound(x: f64, y: f64, p: f64, q: f64) -> Check {
    let value = x.abs().powf(p) + y.abs().powf(q);
    let bound = (x.abs() + y.abs()).powf(p.min(q)) / 2f64.powf(p.max(q) - 1.0) - 1.0;
    Check::new("mixed_power_bound", bound, value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_pair() -> WeightedGraph {
        WeightedGraph::from_edges(vec![1.0, 1.0], &[(0, 1, 2.0)])
    }

    #[test]
    fn exponent_ordering() {
        assert!(Exponents::new(3.0, 2.0, 0.5, 3.0).is_ok());
        assert!(Exponents::new(2.0, 2.0, 0.5, 3.0).is_ok());
        assert!(Exponents::new(2.0, 3.0, 0.5, 3.0).is_err());
        assert!(Exponents::new(4.0, 2.0, 0.5, 3.0).is_err());
        assert!(Exponents::new(3.0, 2.0, 1.0, 3.0).is_err());
        assert!(Exponents::new(3.0, 1.0, 0.5, 3.0).is_err());
    }

    #[test]
    fn coefficient_validation() {
        let one = GraphFunction::constant(2, 1.0);
        assert!(CoefficientFields::new(one.clone(), one.clone(), one.clone(), GraphFunction::zeros(2)).is_err());
        assert!(CoefficientFields::new(
            GraphFunction::new(vec![1.0, 0.0]),
            one.clone(),
            one.clone(),
            one.clone()
        )
        .is_err());
        let g_partial = GraphFunction::new(vec![0.0, 2.0]);
        let c =
            CoefficientFields::new(GraphFunction::new(vec![3.0, 2.0]), one.clone(), one.clone(), g_partial).unwrap();
        assert_eq!(c.a0(), 2.0);
        assert_eq!(c.b0(), 1.0);
    }

    #[test]
    fn lp_examples() {
        let g = unit_pair();
        assert_eq!(lp_norm(&g, &GraphFunction::zeros(2), 2.0).unwrap(), 0.0);
        let psi = GraphFunction::new(vec![3.0, 4.0]);
        assert!((lp_norm(&g, &psi, 2.0).unwrap() - 5.0).abs() < 1e-15);
        let mixed = GraphFunction::new(vec![-3.0, 4.5]);
        let int_abs = crate::calculus::integrate(&g, &mixed.abs()).unwrap();
        assert_eq!(lp_norm(&g, &mixed, 1.0).unwrap(), int_abs);
        assert!(matches!(lp_norm(&g, &psi, 0.5), Err(Error::NormIndexTooSmall(_))));
    }

    #[test]
    fn linf_examples() {
        assert_eq!(linf_norm(&GraphFunction::zeros(3)), 0.0);
        assert_eq!(linf_norm(&GraphFunction::new(vec![-7.0, 2.0])), 7.0);
        let g = WeightedGraph::from_edges(vec![1.0; 3], &[(0, 1, 1.0), (1, 2, 1.0)]);
        let psi = GraphFunction::new(vec![0.3, -1.7, 1.1]);
        let big = lp_norm(&g, &psi, 1e6).unwrap();
        assert!((big - 1.7).abs() < 1e-6);
    }

    #[test]
    fn sobolev_examples() {
        let single = WeightedGraph::from_edges(vec![1.0], &[]);
        let v = sobolev_norm(
            &single,
            &GraphFunction::new(vec![1.0]),
            &GraphFunction::new(vec![2.0]),
            3.0,
        )
        .unwrap();
        assert!((v - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);

        let g = unit_pair();
        let psi = GraphFunction::new(vec![0.0, 1.0]);
        let v = sobolev_norm(&g, &psi, &GraphFunction::constant(2, 1.0), 2.0).unwrap();
        assert!((v - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            sobolev_norm(&g, &GraphFunction::zeros(2), &GraphFunction::constant(2, 1.0), 2.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn w_norm_single_vertex() {
        let single = WeightedGraph::from_edges(vec![1.0], &[]);
        let fields = CoefficientFields::uniform(1, 1.0, 1.0, 1.0, 1.0).unwrap();
        let exps = Exponents::new(2.0, 2.0, 0.5, 3.0).unwrap();
        let psi = GraphFunction::new(vec![1.0]);
        assert_eq!(w_norm(&single, &psi, &fields, &exps).unwrap(), 2.0);
        assert_eq!(w_norm(&single, &GraphFunction::zeros(1), &fields, &exps).unwrap(), 0.0);
    }

    #[test]
    fn embedding_equality_case() {
        let single = WeightedGraph::from_edges(vec![2.0], &[]);
        let fields = CoefficientFields::uniform(1, 1.0, 1.0, 1.0, 1.0).unwrap();
        let exps = Exponents::new(2.0, 2.0, 0.5, 3.0).unwrap();
        let report = embedding_checks(&single, &GraphFunction::new(vec![1.0]), &fields, &exps, 2.0).unwrap();
        let c = report.get("sup_by_wa").unwrap();
        assert_eq!(c.lhs, 1.0);
        assert!((c.rhs - 1.0).abs() < 1e-15);
        assert!(report.all_hold(1e-12));
    }

    #[test]
    fn embedding_zero_and_refusal() {
        let g = unit_pair();
        let fields = CoefficientFields::uniform(2, 1.0, 1.0, 1.0, 1.0).unwrap();
        let exps = Exponents::new(3.0, 2.0, 0.5, 3.0).unwrap();
        let report = embedding_checks(&g, &GraphFunction::zeros(2), &fields, &exps, 4.0).unwrap();
        assert!(report.checks.iter().all(|c| c.lhs == 0.0 && c.rhs == 0.0));
        assert!(matches!(
            embedding_checks(&g, &GraphFunction::zeros(2), &fields, &exps, 2.5),
            Err(Error::EmbeddingIndexBelowP { .. })
        ));
    }

    #[test]
    fn mixed_power_examples() {
        assert!(mixed_power_bound(0.0, 0.0, 2.0, 3.0).holds(0.0));
        assert!(mixed_power_bound(10.0, -3.0, 1.5, 4.0).holds(0.0));
    }
}
