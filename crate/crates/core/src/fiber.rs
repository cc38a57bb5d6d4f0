//! The fibering map along a ray `t ↦ t u` and the Nehari decomposition.
//!
//! ```text
//! φ_u(t)  = t^γ d/dt J_λ(tu)
//!         = t^{p-1+γ} A + t^{q-1+γ} B - F - λ t^{α+γ} G
//! φ'_u(t) = (p-1+γ) t^{p-2+γ} A + (q-1+γ) t^{q-2+γ} B - (α+γ) λ t^{α+γ-1} G
//!         = t^{α+γ-1} [M(t) - (α+γ) λ G]
//! ```
//!
//! `M(t) = (p-1+γ) t^{p-1-α} A + (q-1+γ) t^{q-1-α} B` is strictly decreasing,
//! so for `λG > 0` the derivative has exactly one zero `t̃`, where `φ_u` is
//! maximal. Roots of `φ_u` on either side of `t̃` give the two Nehari points
//! of the ray.

use crate::energy::EnergyTerms;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::function::GraphFunction;
use crate::instance::ProblemInstance;

/// `|φ_u(t̃)| ≤ TANGENT_TOL · (A+B+F)` classifies the ray as tangent.
pub const TANGENT_TOL: f64 = 1e-10;
/// `|φ_v(1)| ≤ MANIFOLD_TOL · (A+B+F)` places `v` on the Nehari set.
pub const MANIFOLD_TOL: f64 = 1e-9;
/// Roots are accepted when `|φ_u(t_i)| ≤ ROOT_TOL · (A+B+F)`.
pub const ROOT_TOL: f64 = 1e-12;

const MAX_BRACKET_STEPS: usize = 2200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberClass {
    /// `φ_u(t̃) > 0`: two transversal roots `t1 < t̃ < t2`.
    TwoRoots,
    /// `φ_u(t̃) ≈ 0`: one double root at `t̃`.
    Tangent,
    /// `φ_u < 0` everywhere.
    NoRoot,
}

impl FiberClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FiberClass::TwoRoots => "two_roots",
            FiberClass::Tangent => "tangent",
            FiberClass::NoRoot => "no_root",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NehariClass {
    Plus,
    Zero,
    Minus,
    NotOnManifold,
}

impl NehariClass {
    pub fn as_str(self) -> &'static str {
        match self {
            NehariClass::Plus => "plus",
            NehariClass::Zero => "zero",
            NehariClass::Minus => "minus",
            NehariClass::NotOnManifold => "not_on_manifold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberAnalysis {
    pub t_tilde: f64,
    pub phi_at_t_tilde: f64,
    /// Root below `t̃`; set only for [`FiberClass::TwoRoots`].
    pub t1: Option<f64>,
    /// Root above `t̃`; set only for [`FiberClass::TwoRoots`].
    pub t2: Option<f64>,
    pub classification: FiberClass,
    /// `A + B + F` of the direction, the reference magnitude for tolerances.
    pub scale: f64,
}

/// Fibering map of a fixed nonnegative direction, evaluated from its cached energy terms.
#[derive(Debug, Clone, Copy)]
pub struct FiberMap<'a> {
    inst: &'a ProblemInstance,
    terms: EnergyTerms,
}

impl<'a> FiberMap<'a> {
    pub fn new(inst: &'a ProblemInstance, u: &GraphFunction) -> Result<Self> {
        u.check_size(inst.graph())?;
        u.check_nonnegative()?;
        if u.is_zero() {
            return Err(Error::DegenerateDirection);
        }
        Ok(Self {
            inst,
            terms: EnergyTerms::compute_unchecked(inst, u),
        })
    }

    pub fn terms(&self) -> &EnergyTerms {
        &self.terms
    }

    pub fn scale(&self) -> f64 {
        self.terms.a_term + self.terms.b_term + self.terms.f_term
    }

    /// `φ_u(t)`.
    pub fn value(&self, t: f64) -> f64 {
        let e = self.inst.exponents();
        let EnergyTerms {
            a_term,
            b_term,
            f_term,
            g_term,
        } = self.terms;
        t.powf(e.p - 1.0 + e.gamma) * a_term + t.powf(e.q - 1.0 + e.gamma) * b_term
            - f_term
            - self.inst.lambda() * t.powf(e.alpha + e.gamma) * g_term
    }

    /// `φ'_u(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        let e = self.inst.exponents();
        let EnergyTerms {
            a_term, b_term, g_term, ..
        } = self.terms;
        (e.p - 1.0 + e.gamma) * t.powf(e.p - 2.0 + e.gamma) * a_term
            + (e.q - 1.0 + e.gamma) * t.powf(e.q - 2.0 + e.gamma) * b_term
            - (e.alpha + e.gamma) * self.inst.lambda() * t.powf(e.alpha + e.gamma - 1.0) * g_term
    }

    /// `J_λ(t u)`.
    pub fn energy(&self, t: f64) -> f64 {
        self.terms.energy_at_scale(self.inst, t)
    }

    /// `M(t) - (α+γ)λG`, which has the sign of `φ'_u(t)`.
    fn stationary_gap(&self, t: f64) -> f64 {
        let e = self.inst.exponents();
        let EnergyTerms {
            a_term, b_term, g_term, ..
        } = self.terms;
        (e.p - 1.0 + e.gamma) * t.powf(e.p - 1.0 - e.alpha) * a_term
            + (e.q - 1.0 + e.gamma) * t.powf(e.q - 1.0 - e.alpha) * b_term
            - (e.alpha + e.gamma) * self.inst.lambda() * g_term
    }

    /// Locates `t̃` and the roots of `φ_u` and classifies the ray.
    pub fn analyze(&self) -> Result<FiberAnalysis> {
        if !(self.inst.lambda() * self.terms.g_term > 0.0) {
            return Err(Error::NoStationary);
        }
        let (lo, hi) = bracket_sign_change(|t| self.stationary_gap(t), 1.0).ok_or(Error::NoStationary)?;
        let t_tilde = bisect(|t| self.stationary_gap(t), lo, hi);
        let phi_max = self.value(t_tilde);
        let scale = self.scale();

        let classification = if phi_max.abs() <= TANGENT_TOL * scale {
            FiberClass::Tangent
        } else if phi_max < 0.0 {
            FiberClass::NoRoot
        } else {
            FiberClass::TwoRoots
        };
        let (t1, t2) = if classification == FiberClass::TwoRoots {
            let mut lo = t_tilde;
            let mut steps = 0;
            while self.value(lo) >= 0.0 && steps < MAX_BRACKET_STEPS {
                lo *= 0.5;
                steps += 1;
            }
            let mut hi = t_tilde;
            steps = 0;
            while self.value(hi) >= 0.0 && steps < MAX_BRACKET_STEPS {
                hi *= 2.0;
                steps += 1;
            }
            (
                Some(bisect(|t| self.value(t), lo, t_tilde)),
                Some(bisect(|t| self.value(t), t_tilde, hi)),
            )
        } else {
            (None, None)
        };
        Ok(FiberAnalysis {
            t_tilde,
            phi_at_t_tilde: phi_max,
            t1,
            t2,
            classification,
            scale,
        })
    }
}

/// Finds `[lo, hi]` with `h(lo) > 0 ≥ h(hi)` for a decreasing `h`, doubling or halving from `start`.
fn bracket_sign_change(h: impl Fn(f64) -> f64, start: f64) -> Option<(f64, f64)> {
    let mut steps = 0;
    if h(start) > 0.0 {
        let (mut lo, mut hi) = (start, 2.0 * start);
        while h(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
                return None;
            }
        }
        Some((lo, hi))
    } else {
        let (mut lo, mut hi) = (0.5 * start, start);
        while h(lo) <= 0.0 {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || lo == 0.0 {
                return None;
            }
        }
        Some((lo, hi))
    }
}

/// Bisection on `0 < lo < hi` where `h` changes sign, run to adjacent floats.
/// Splits geometrically while the bracket spans more than a factor of two.
/// Returns the endpoint with the smaller `|h|`.
pub fn bisect(h: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut h_lo = h(lo);
    let mut h_hi = h(hi);
    if h_lo == 0.0 {
        return lo;
    }
    if h_hi == 0.0 {
        return hi;
    }
    for _ in 0..4000 {
        let mid = if hi > 2.0 * lo {
            (lo * hi).sqrt()
        } else {
            lo + 0.5 * (hi - lo)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = h(mid);
        if h_mid == 0.0 {
            return mid;
        }
        if (h_mid > 0.0) == (h_lo > 0.0) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
            h_hi = h_mid;
        }
    }
    if h_lo.abs() <= h_hi.abs() {
        lo
    } else {
        hi
    }
}

/// `φ_u(t)`.
pub fn fiber_value(inst: &ProblemInstance, u: &GraphFunction, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveScale(t));
    }
    Ok(FiberMap::new(inst, u)?.value(t))
}

/// `φ'_u(t)`.
pub fn fiber_derivative(inst: &ProblemInstance, u: &GraphFunction, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveScale(t));
    }
    Ok(FiberMap::new(inst, u)?.derivative(t))
}

/// Stationary point, roots and classification of the ray through `u`.
pub fn analyze_fiber(inst: &ProblemInstance, u: &GraphFunction) -> Result<FiberAnalysis> {
    FiberMap::new(inst, u)?.analyze()
}

/// [`analyze_fiber`] over many directions.
pub fn analyze_fibers(inst: &ProblemInstance, directions: &[GraphFunction], exec: Exec) -> Vec<Result<FiberAnalysis>> {
    exec::map_slice(exec, directions, |u| analyze_fiber(inst, u))
}

/// Nehari membership of `v`: `NotOnManifold` unless `φ_v(1) ≈ 0`, otherwise
/// the sign of `(p-1+γ)A + (q-1+γ)B - (α+γ)λG`.
pub fn nehari_classify(inst: &ProblemInstance, v: &GraphFunction) -> Result<NehariClass> {
    v.check_size(inst.graph())?;
    if v.is_zero() {
        return Ok(NehariClass::Zero);
    }
    let terms = EnergyTerms::compute_unchecked(inst, v);
    let e = inst.exponents();
    let scale = terms.a_term + terms.b_term + terms.f_term;
    let tol = MANIFOLD_TOL * scale;
    let on_ray = terms.a_term + terms.b_term - terms.f_term - inst.lambda() * terms.g_term;
    if on_ray.abs() > tol {
        return Ok(NehariClass::NotOnManifold);
    }
    let second = (e.p - 1.0 + e.gamma) * terms.a_term + (e.q - 1.0 + e.gamma) * terms.b_term
        - (e.alpha + e.gamma) * inst.lambda() * terms.g_term;
    Ok(if second.abs() <= tol {
        NehariClass::Zero
    } else if second > 0.0 {
        NehariClass::Plus
    } else {
        NehariClass::Minus
    })
}
