//! Closed-form ground truth: the flat ODE `v' = −B v^p`, the extinction
//! time upper bound it yields, and a manufactured solution with matching
//! source term.
//!
//! # Extinction-time bound
//!
//! When `u₀ ≤ A|x|^a` on `B(0, R)`, `‖u₀‖_∞ ≤ A R^a` and the power-law
//! certificate holds, comparison gives `u ≤ A|x|^a` inside the ball, hence
//! `|x|^σ u^q ≥ A^{−σ/a} u^p` there with `p = (aq + σ)/a`. Outside the ball
//! `|x| ≥ R` and `u ≤ ‖u₀‖_∞` give `|x|^σ u^q ≥ R^σ ‖u₀‖_∞^{−σ/a} u^p`.
//! So `u` is a subsolution of `∂ₜv = Δvᵐ − B v^p` with
//! `B = min(A^{−σ/a}, R^σ ‖u₀‖_∞^{−σ/a})`.
//!
//! One further comparison step: the spatially flat solution of that
//! equation started from `‖u₀‖_∞` has zero Laplacian and solves
//! `v' = −B v^p`, which vanishes at `T = ‖u₀‖_∞^{1−p} / ((1 − p) B)`. It
//! dominates `u₀`, so `T` bounds the extinction time of `u` from above.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{check_supersolution_condition, ProblemParams, SupersolutionSpec};
use crate::solver::Forcing;

/// Flat comparison ODE `v' = −B v^p`, `v(0) = v0`, and its extinction time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeBound {
    pub b: f64,
    pub p: f64,
    pub v0: f64,
    /// `v0^{1−p} / ((1 − p) B)`.
    pub t_bound: f64,
}

impl OdeBound {
    pub fn new(v0: f64, b: f64, p: f64) -> Self {
        let t_bound = if v0 == 0.0 { 0.0 } else { v0.powf(1.0 - p) / ((1.0 - p) * b) };
        Self { b, p, v0, t_bound }
    }

    pub fn value(&self, t: f64) -> f64 {
        flat_ode_solution(self.v0, self.b, self.p, t)
    }
}

/// `min(A^{−σ/a}, R^σ sup^{−σ/a})`.
pub fn comparison_constant_b(spec: &SupersolutionSpec, params: &ProblemParams, sup: f64) -> Result<f64> {
    if sup == 0.0 {
        return Err(Error::ZeroData);
    }
    if !(sup > 0.0 && sup.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "sup",
            value: sup,
            reason: "sup norm must be positive and finite".into(),
        });
    }
    let ratio = params.sigma() / spec.a();
    let inner = spec.amplitude().powf(-ratio);
    let outer = spec.radius().powf(params.sigma()) * sup.powf(-ratio);
    Ok(inner.min(outer))
}

/// `(max(v0^{1−p} − (1−p) B t, 0))^{1/(1−p)}`.
pub fn flat_ode_solution(v0: f64, b: f64, p: f64, t: f64) -> f64 {
    if v0 == 0.0 || t == 0.0 {
        return v0;
    }
    let bracket = v0.powf(1.0 - p) - (1.0 - p) * b * t;
    if bracket <= 0.0 {
        0.0
    } else {
        bracket.powf(1.0 / (1.0 - p))
    }
}

/// Upper bound on the extinction time of data satisfying the flatness and
/// sup-norm hypotheses of `spec` with `‖u₀‖_∞ = sup`.
pub fn extinction_upper_bound(spec: &SupersolutionSpec, params: &ProblemParams, sup: f64) -> Result<OdeBound> {
    let flatness = params.sigma() / (1.0 - params.q());
    if !(spec.a() > flatness) {
        return Err(Error::Hypothesis(format!(
            "a = {} must exceed sigma/(1-q) = {flatness}",
            spec.a()
        )));
    }
    let check = check_supersolution_condition(spec, params)?;
    if !check.holds {
        return Err(Error::Hypothesis(format!(
            "supersolution condition fails with margin {}",
            check.margin
        )));
    }
    let p = (spec.a() * params.q() + params.sigma()) / spec.a();
    if sup == 0.0 {
        return Ok(OdeBound { b: f64::NAN, p, v0: 0.0, t_bound: 0.0 });
    }
    let b = comparison_constant_b(spec, params, sup)?;
    Ok(OdeBound::new(sup, b, p))
}

/// `u*(t, r) = (1 − t)₊ (1 − (r/L)²)₊²` on `B(0, L)` with the source term
/// `f = ∂ₜu* − Δ(u*)ᵐ + r^σ (u*)^q` that makes it an exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    pub params: ProblemParams,
    /// Support radius `L`.
    pub radius: f64,
}

impl ManufacturedSolution {
    pub fn new(params: ProblemParams, radius: f64) -> Self {
        Self { params, radius }
    }

    fn profile(&self, r: f64) -> f64 {
        let s = r / self.radius;
        (1.0 - s * s).max(0.0)
    }

    pub fn value(&self, t: f64, r: f64) -> f64 {
        let g = self.profile(r);
        (1.0 - t).max(0.0) * g * g
    }

    /// Radial Laplacian of `(u*)ᵐ`: with `φ = (1 − s²)^k`, `k = 2m`,
    /// `Δφ = k(k−1)(1−s²)^{k−2} 4s²/L² − 2Nk(1−s²)^{k−1}/L²`.
    pub fn laplacian_of_power(&self, t: f64, r: f64) -> f64 {
        let g = self.profile(r);
        if g == 0.0 {
            return 0.0;
        }
        let m = self.params.m();
        let n = self.params.dim() as f64;
        let k = 2.0 * m;
        let s = r / self.radius;
        let l2 = self.radius * self.radius;
        let time = (1.0 - t).max(0.0).powf(m);
        let second = k * (k - 1.0) * g.powf(k - 2.0) * 4.0 * s * s / l2;
        let first = -2.0 * n * k * g.powf(k - 1.0) / l2;
        time * (second + first)
    }

    pub fn source(&self, t: f64, r: f64) -> f64 {
        let g = self.profile(r);
        let dt = if t < 1.0 { -g * g } else { 0.0 };
        let u = self.value(t, r);
        let absorption = if u > 0.0 {
            r.powf(self.params.sigma()) * u.powf(self.params.q())
        } else {
            0.0
        };
        dt - self.laplacian_of_power(t, r) + absorption
    }

    pub fn forcing(&self) -> Forcing {
        let me = *self;
        Forcing::new(move |t, r| me.source(t, r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::corollary_constants;
    use approx::assert_relative_eq;

    #[test]
    fn flat_ode_examples() {
        assert_eq!(flat_ode_solution(0.7, 1.0, 0.5, 0.0), 0.7);
        assert_eq!(flat_ode_solution(1.0, 1.0, 0.5, 2.0), 0.0);
        assert_relative_eq!(flat_ode_solution(1.0, 1.0, 0.9, 5.0), 0.5f64.powi(10), max_relative = 1e-13);
        assert_relative_eq!(flat_ode_solution(1.0, 1.0, 0.9, 5.0), 9.765_625e-4, max_relative = 1e-13);
    }

    #[test]
    fn constant_b_examples() {
        let p = ProblemParams::new(2.0, 0.5, 2.0, 1).unwrap();
        let s = SupersolutionSpec::new(5.0, 1.0, 1.0, &p).unwrap();
        assert_eq!(comparison_constant_b(&s, &p, 1.0).unwrap(), 1.0);
        assert!(matches!(comparison_constant_b(&s, &p, 0.0), Err(Error::ZeroData)));

        let p0 = ProblemParams::new(2.0, 0.5, 0.0, 1).unwrap();
        let s0 = SupersolutionSpec::new(0.6, 3.0, 0.2, &p0).unwrap();
        assert_eq!(comparison_constant_b(&s0, &p0, 17.0).unwrap(), 1.0);
    }

    #[test]
    fn constant_b_corollary_setup() {
        let p = ProblemParams::new(2.0, 0.5, 2.0, 1).unwrap();
        let c = corollary_constants(5.0, 1.0, &p).unwrap();
        let s = c.spec(&p).unwrap();
        let b = comparison_constant_b(&s, &p, c.sup_bound).unwrap();
        // With sup = A R^a both branches coincide: R^σ (A R^a)^{−σ/a} = A^{−σ/a}.
        assert_relative_eq!(b, 1.0, max_relative = 1e-14);
        let outer = c.radius.powi(2) * c.sup_bound.powf(-0.4);
        assert_relative_eq!(outer, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn upper_bound_examples() {
        let p = ProblemParams::new(2.0, 0.5, 2.0, 1).unwrap();
        let c = corollary_constants(5.0, 1.0, &p).unwrap();
        let s = c.spec(&p).unwrap();
        assert_eq!(extinction_upper_bound(&s, &p, 0.0).unwrap().t_bound, 0.0);
        let bound = extinction_upper_bound(&s, &p, c.sup_bound).unwrap();
        assert_relative_eq!(bound.p, 0.9, max_relative = 1e-15);
        // mpmath: M^{0.1} / 0.1
        assert_relative_eq!(bound.t_bound, 5.258_023_207_717_144, max_relative = 1e-12);

        // sigma = 0: a = 0.6 keeps am + N - 2 > 0 and the certificate with A = R = 1 holds.
        let p0 = ProblemParams::new(2.0, 0.5, 0.0, 1).unwrap();
        let s0 = SupersolutionSpec::new(0.6, 1.0, 1.0, &p0).unwrap();
        let b0 = extinction_upper_bound(&s0, &p0, 1.0).unwrap();
        assert_eq!((b0.p, b0.b, b0.t_bound), (0.5, 1.0, 2.0));

        let bad = SupersolutionSpec::new(5.0, 1.0, 1.0, &p).unwrap();
        assert!(matches!(extinction_upper_bound(&bad, &p, 1.0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn manufactured_laplacian_matches_finite_differences() {
        for dim in 1..=3 {
            let p = ProblemParams::new(2.0, 0.5, 1.0, dim).unwrap();
            let ms = ManufacturedSolution::new(p, 1.0);
            let phi = |r: f64| ms.value(0.3, r).powi(2);
            let h = 1e-4;
            for &r in &[0.1, 0.35, 0.6, 0.9] {
                let d2 = (phi(r + h) - 2.0 * phi(r) + phi(r - h)) / (h * h);
                let d1 = (phi(r + h) - phi(r - h)) / (2.0 * h);
                let fd = d2 + (dim as f64 - 1.0) / r * d1;
                assert_relative_eq!(ms.laplacian_of_power(0.3, r), fd, max_relative = 1e-6, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn manufactured_vanishes_outside_support() {
        let p = ProblemParams::new(2.0, 0.5, 1.0, 2).unwrap();
        let ms = ManufacturedSolution::new(p, 1.0);
        assert_eq!(ms.value(0.2, 1.5), 0.0);
        assert_eq!(ms.source(0.2, 1.5), 0.0);
        assert_eq!(ms.value(1.5, 0.2), 0.0);
    }
}
