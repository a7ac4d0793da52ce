//! Exponents, regime classification and the power-law supersolution
//! certificate `S(x) = A|x|^a`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide `sigma == sigma*`.
const CRITICAL_RTOL: f64 = 1e-12;

/// Exponent tuple `(m, q, sigma, N)` of `∂ₜu = Δuᵐ − |x|^σ u^q` in `ℝᴺ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    m: f64,
    q: f64,
    sigma: f64,
    dim: usize,
}

impl ProblemParams {
    /// Fails unless `m ≥ 1`, `0 < q < 1`, `sigma ≥ 0` and `dim ≥ 1`.
    ///
    /// `sigma = 0` is admitted so the spatially homogeneous equation can be
    /// run through the same machinery.
    pub fn new(m: f64, q: f64, sigma: f64, dim: usize) -> Result<Self> {
        if !(m.is_finite() && m >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "m",
                value: m,
                reason: "diffusion exponent must satisfy m >= 1".into(),
            });
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                reason: "absorption exponent must satisfy 0 < q < 1".into(),
            });
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: sigma,
                reason: "weight exponent must satisfy sigma >= 0".into(),
            });
        }
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                value: 0.0,
                reason: "space dimension must be at least 1".into(),
            });
        }
        Ok(Self { m, q, sigma, dim })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Copy with a different weight exponent, re-validated.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.m, self.q, sigma, self.dim)
    }

    pub fn critical_exponent(&self) -> CriticalExponent {
        critical_exponent(self)
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }
}

/// Critical weight power: finite for `m > 1`, infinite in the semilinear case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalExponent {
    Finite(f64),
    Infinite,
}

impl CriticalExponent {
    pub fn is_infinite(&self) -> bool {
        matches!(self, CriticalExponent::Infinite)
    }

    /// `f64::INFINITY` for the infinite case; for reporting only.
    pub fn to_f64(self) -> f64 {
        match self {
            CriticalExponent::Finite(v) => v,
            CriticalExponent::Infinite => f64::INFINITY,
        }
    }

    /// Total order of a finite real against this extended value.
    pub fn cmp_real(&self, x: f64) -> Ordering {
        match self {
            CriticalExponent::Infinite => Ordering::Greater,
            CriticalExponent::Finite(v) => v.total_cmp(&x),
        }
    }
}

impl PartialOrd for CriticalExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use CriticalExponent::*;
        Some(match (self, other) {
            (Infinite, Infinite) => Ordering::Equal,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Finite(_), Infinite) => Ordering::Less,
            (Finite(a), Finite(b)) => a.total_cmp(b),
        })
    }
}

impl fmt::Display for CriticalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalExponent::Finite(v) => write!(f, "{v}"),
            CriticalExponent::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `sigma < sigma*`: every bounded solution vanishes in finite time.
    Subcritical,
    Critical,
    Supercritical,
    /// `m = 1`, where `sigma* = ∞`.
    SemilinearAlwaysSubcritical,
}

impl Regime {
    /// Whether extinction is unconditional in this regime.
    pub fn always_extinct(&self) -> bool {
        matches!(self, Regime::Subcritical | Regime::SemilinearAlwaysSubcritical)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
            Regime::SemilinearAlwaysSubcritical => "semilinear (always subcritical)",
        };
        f.write_str(s)
    }
}

/// `sigma* = 2(1 − q)/(m − 1)` for `m > 1`, infinite for `m = 1`.
pub fn critical_exponent(params: &ProblemParams) -> CriticalExponent {
    if params.m == 1.0 {
        CriticalExponent::Infinite
    } else {
        CriticalExponent::Finite(2.0 * (1.0 - params.q) / (params.m - 1.0))
    }
}

/// Equality with `sigma*` is decided up to a relative tolerance of `1e-12`,
/// so that parameter tuples whose critical exponent is not exactly
/// representable still classify as critical.
pub fn classify_regime(params: &ProblemParams) -> Regime {
    match critical_exponent(params) {
        CriticalExponent::Infinite => Regime::SemilinearAlwaysSubcritical,
        CriticalExponent::Finite(crit) => {
            let sigma = params.sigma;
            if (sigma - crit).abs() <= CRITICAL_RTOL * crit.abs().max(sigma.abs()) {
                Regime::Critical
            } else if sigma < crit {
                Regime::Subcritical
            } else {
                Regime::Supercritical
            }
        }
    }
}

/// Power-law profile `S(x) = A|x|^a` restricted to the ball `B(0, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionSpec {
    a: f64,
    amplitude: f64,
    radius: f64,
    l: f64,
}

impl SupersolutionSpec {
    /// Requires `a > sigma/(1 − q)`, `A > 0` and `R > 0`.
    pub fn new(a: f64, amplitude: f64, radius: f64, params: &ProblemParams) -> Result<Self> {
        let flatness = params.sigma / (1.0 - params.q);
        if !(a.is_finite() && a > flatness) {
            return Err(Error::Hypothesis(format!(
                "flatness exponent a = {a} must exceed sigma/(1-q) = {flatness}"
            )));
        }
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(Error::InvalidParameter {
                name: "A",
                value: amplitude,
                reason: "amplitude must be positive".into(),
            });
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter {
                name: "R",
                value: radius,
                reason: "radius must be positive".into(),
            });
        }
        let l = a * (params.m - params.q) - params.sigma - 2.0;
        Ok(Self {
            a,
            amplitude,
            radius,
            l,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `l = a(m − q) − sigma − 2`.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// `A·R^a`, the sup-norm cap of the admissible class.
    pub fn cap(&self) -> f64 {
        self.value(self.radius)
    }

    pub fn value(&self, r: f64) -> f64 {
        supersolution_value(self, r)
    }
}

/// `A·r^a`, with an exact zero at the origin.
pub fn supersolution_value(spec: &SupersolutionSpec, r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        spec.amplitude * r.powf(spec.a)
    }
}

/// `a·m·(a·m + N − 2)`, the coefficient of `Δ(r^{am})`.
pub(crate) fn laplacian_coefficient(a: f64, params: &ProblemParams) -> Result<f64> {
    let am = a * params.m;
    let second = am + params.dim as f64 - 2.0;
    if second <= 0.0 {
        return Err(Error::DegenerateCoefficient(second));
    }
    Ok(am * second)
}

/// Outcome of the certificate `A^{m−q} R^l ≤ 1/(am(am+N−2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    /// `rhs − lhs`; non-negative exactly when the condition holds.
    pub margin: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl ConditionCheck {
    /// `margin / rhs`.
    pub fn relative_margin(&self) -> f64 {
        self.margin / self.rhs
    }
}

/// Non-strict check; equality is admitted.
pub fn check_supersolution_condition(
    spec: &SupersolutionSpec,
    params: &ProblemParams,
) -> Result<ConditionCheck> {
    let coeff = laplacian_coefficient(spec.a, params)?;
    let lhs = spec.amplitude.powf(params.m - params.q) * spec.radius.powf(spec.l);
    let rhs = 1.0 / coeff;
    Ok(ConditionCheck {
        holds: lhs <= rhs,
        margin: rhs - lhs,
        lhs,
        rhs,
    })
}

/// PDE residual `∂ₜS − ΔSᵐ + r^σ S^q` of the stationary profile at radius
/// `r ∈ (0, R]`, in factored form
/// `A^q r^{σ+aq} [1 − am(am+N−2) A^{m−q} r^l]`.
pub fn supersolution_residual(
    spec: &SupersolutionSpec,
    params: &ProblemParams,
    r: f64,
) -> Result<f64> {
    if !(r > 0.0 && r <= spec.radius) {
        return Err(Error::OutOfDomain {
            r,
            radius: spec.radius,
        });
    }
    if spec.l < 0.0 {
        return Err(Error::Hypothesis(format!(
            "a = {} is below (sigma+2)/(m-q) = {}",
            spec.a,
            (params.sigma + 2.0) / (params.m - params.q)
        )));
    }
    let coeff = laplacian_coefficient(spec.a, params)?;
    let prefactor = spec.amplitude.powf(params.q) * r.powf(params.sigma + spec.a * params.q);
    let bracket = 1.0 - coeff * spec.amplitude.powf(params.m - params.q) * r.powf(spec.l);
    Ok(prefactor * bracket)
}

/// Explicit smallness constants for data bounded by `A₀|x|^a` on all of `ℝᴺ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryConstants {
    /// `[am(am+N−2)]^{1/(m−q)}`.
    pub k: f64,
    pub l: f64,
    /// `(K A₀)^{−(m−q)/l}`.
    pub radius: f64,
    /// `A₀ R^a`, the admissible sup-norm bound.
    pub sup_bound: f64,
    pub a: f64,
    pub a0: f64,
}

impl CorollaryConstants {
    /// The certificate `(a, A₀, R)` these constants produce.
    pub fn spec(&self, params: &ProblemParams) -> Result<SupersolutionSpec> {
        SupersolutionSpec::new(self.a, self.a0, self.radius, params)
    }
}

/// Computes `K`, `l`, `R` and `M`. `R` is the equality root of the
/// certificate; when rounding leaves it a few ulps too large it is nudged
/// down until the non-strict check holds.
pub fn corollary_constants(a: f64, a0: f64, params: &ProblemParams) -> Result<CorollaryConstants> {
    if classify_regime(params).always_extinct() {
        return Err(Error::Regime {
            sigma: params.sigma,
            critical: critical_exponent(params).to_f64(),
        });
    }
    let flatness = params.sigma / (1.0 - params.q);
    if !(a > flatness) {
        return Err(Error::Hypothesis(format!(
            "flatness exponent a = {a} must exceed sigma/(1-q) = {flatness}"
        )));
    }
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "A0",
            value: a0,
            reason: "amplitude must be positive".into(),
        });
    }
    let mq = params.m - params.q;
    let coeff = laplacian_coefficient(a, params)?;
    let k = coeff.powf(1.0 / mq);
    let l = a * mq - params.sigma - 2.0;
    if l <= 0.0 {
        return Err(Error::Hypothesis(format!(
            "l = a(m-q) - sigma - 2 = {l} must be positive"
        )));
    }
    let mut radius = (k * a0).powf(-mq / l);
    let mut spec = SupersolutionSpec::new(a, a0, radius, params)?;
    for _ in 0..64 {
        if check_supersolution_condition(&spec, params)?.holds {
            break;
        }
        radius = next_down(radius);
        spec = SupersolutionSpec::new(a, a0, radius, params)?;
    }
    Ok(CorollaryConstants {
        k,
        l,
        radius,
        sup_bound: a0 * radius.powf(a),
        a,
        a0,
    })
}

fn next_down(x: f64) -> f64 {
    debug_assert!(x > 0.0 && x.is_finite());
    f64::from_bits(x.to_bits() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(m: f64, q: f64, sigma: f64, dim: usize) -> ProblemParams {
        ProblemParams::new(m, q, sigma, dim).unwrap()
    }

    #[test]
    fn rejects_out_of_range_exponents() {
        assert!(ProblemParams::new(0.5, 0.5, 1.0, 1).is_err());
        assert!(ProblemParams::new(2.0, 1.5, 1.0, 1).is_err());
        assert!(ProblemParams::new(2.0, 0.0, 1.0, 1).is_err());
        assert!(ProblemParams::new(2.0, 0.5, -0.1, 1).is_err());
        assert!(ProblemParams::new(2.0, 0.5, 1.0, 0).is_err());
        assert!(ProblemParams::new(2.0, 0.5, f64::NAN, 1).is_err());
        assert!(ProblemParams::new(2.0, 0.5, 0.0, 3).is_ok());
    }

    #[test]
    fn critical_exponent_values() {
        assert_eq!(p(2.0, 0.5, 1.0, 1).critical_exponent(), CriticalExponent::Finite(1.0));
        assert_eq!(p(1.0, 0.3, 1.0, 1).critical_exponent(), CriticalExponent::Infinite);
        let CriticalExponent::Finite(v) = p(3.0, 0.2, 1.0, 1).critical_exponent() else {
            panic!("finite expected");
        };
        assert_relative_eq!(v, 0.8, max_relative = 1e-15);
    }

    #[test]
    fn infinite_critical_exponent_orders_above_everything() {
        let inf = CriticalExponent::Infinite;
        assert!(inf > CriticalExponent::Finite(1e300));
        assert_eq!(inf.cmp_real(f64::MAX), Ordering::Greater);
        assert_eq!(inf.partial_cmp(&inf), Some(Ordering::Equal));
    }

    #[test]
    fn regimes() {
        assert_eq!(p(2.0, 0.5, 0.5, 1).regime(), Regime::Subcritical);
        assert_eq!(p(2.0, 0.5, 1.0, 1).regime(), Regime::Critical);
        assert_eq!(p(2.0, 0.5, 1.5, 1).regime(), Regime::Supercritical);
        assert_eq!(p(1.0, 0.5, 100.0, 1).regime(), Regime::SemilinearAlwaysSubcritical);
        // 2(1 - 0.3)/0.7 is not exactly 2 in binary64.
        assert_eq!(p(1.7, 0.3, 2.0, 1).regime(), Regime::Critical);
    }

    #[test]
    fn supersolution_values() {
        let params = p(2.0, 0.5, 2.0, 1);
        let s = SupersolutionSpec::new(5.0, 1.0, 1.0, &params).unwrap();
        assert_eq!(s.value(0.0), 0.0);
        assert_eq!(s.value(1.0), 1.0);
        let s = SupersolutionSpec::new(2.0, 3.0, 1.0, &p(2.0, 0.5, 0.5, 1)).unwrap();
        assert_relative_eq!(s.value(0.5), 0.75, max_relative = 1e-15);
    }

    #[test]
    fn supersolution_spec_requires_flatness() {
        let params = p(2.0, 0.5, 2.0, 1);
        // sigma/(1-q) = 4
        assert!(matches!(
            SupersolutionSpec::new(4.0, 1.0, 1.0, &params),
            Err(Error::Hypothesis(_))
        ));
        assert!(SupersolutionSpec::new(5.0, 0.0, 1.0, &params).is_err());
        assert!(SupersolutionSpec::new(5.0, 1.0, -1.0, &params).is_err());
        assert_eq!(SupersolutionSpec::new(5.0, 1.0, 1.0, &params).unwrap().l(), 3.5);
    }

    #[test]
    fn condition_examples() {
        let params = p(2.0, 0.5, 2.0, 1);
        let s = SupersolutionSpec::new(5.0, 1.0, 0.2, &params).unwrap();
        let c = check_supersolution_condition(&s, &params).unwrap();
        assert!(c.holds);
        // mpmath: 0.2^3.5 = 3.5777087639996635e-3, 1/90
        assert_relative_eq!(c.lhs, 3.577_708_763_999_663_5e-3, max_relative = 1e-14);
        assert_relative_eq!(c.rhs, 1.0 / 90.0, max_relative = 1e-15);
        assert!(c.margin > 0.0);

        let s = SupersolutionSpec::new(5.0, 1.0, 1.0, &params).unwrap();
        let c = check_supersolution_condition(&s, &params).unwrap();
        assert!(!c.holds);
        assert!(c.margin < 0.0);
    }

    #[test]
    fn condition_admits_equality() {
        // With R = 1 the lhs is A^{m-q}; choose A so that it equals 1/90 exactly
        // up to the power, then check the boundary case directly.
        let params = p(2.0, 0.5, 2.0, 1);
        let amp = (1.0f64 / 90.0).powf(1.0 / 1.5);
        let s = SupersolutionSpec::new(5.0, amp, 1.0, &params).unwrap();
        let c = check_supersolution_condition(&s, &params).unwrap();
        assert!(c.relative_margin().abs() < 1e-14);
        // An exactly representable equality: m = 1, N = 2, a = 1 gives coeff 1,
        // and A = R = 1 gives lhs 1.
        let params = p(1.0, 0.5, 0.0, 2);
        let s = SupersolutionSpec::new(1.0, 1.0, 1.0, &params).unwrap();
        let c = check_supersolution_condition(&s, &params).unwrap();
        assert_eq!(c.margin, 0.0);
        assert!(c.holds);
    }

    #[test]
    fn degenerate_coefficient_rejected() {
        // N = 1, m = 2, a = 0.5: am + N - 2 = 0.
        let params = p(2.0, 0.5, 0.0, 1);
        let s = SupersolutionSpec::new(0.5, 1.0, 1.0, &params).unwrap();
        assert!(matches!(
            check_supersolution_condition(&s, &params),
            Err(Error::DegenerateCoefficient(_))
        ));
    }

    #[test]
    fn residual_examples() {
        let params = p(2.0, 0.5, 2.0, 1);
        let s = SupersolutionSpec::new(5.0, 1.0, 0.2, &params).unwrap();
        let r = supersolution_residual(&s, &params, 0.1).unwrap();
        // mpmath: 0.1^4.5 * (1 - 90*0.1^3.5)
        assert_relative_eq!(r, 3.072_277_660_168_379e-5, max_relative = 1e-13);
        assert!(supersolution_residual(&s, &params, 1e-30).unwrap().abs() < 1e-120);
        assert!(matches!(
            supersolution_residual(&s, &params, 0.3),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            supersolution_residual(&s, &params, 0.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn residual_vanishes_at_equality_boundary() {
        let params = p(2.0, 0.5, 2.0, 1);
        let c = corollary_constants(5.0, 1.0, &params).unwrap();
        let s = c.spec(&params).unwrap();
        let res = supersolution_residual(&s, &params, s.radius()).unwrap();
        let scale = s.amplitude().powf(0.5) * s.radius().powf(2.0 + 2.5);
        assert!(res >= 0.0);
        assert!(res / scale < 1e-13);
    }

    #[test]
    fn corollary_example() {
        let params = p(2.0, 0.5, 2.0, 1);
        let c = corollary_constants(5.0, 1.0, &params).unwrap();
        // mpmath reference values (40 digits)
        assert_relative_eq!(c.k, 20.082_988_502_465_085_656, max_relative = 1e-14);
        assert_eq!(c.l, 3.5);
        assert_relative_eq!(c.radius, 0.276_468_080_528_920_892_5, max_relative = 1e-14);
        assert_relative_eq!(c.sup_bound, 1.615_195_092_904_531_6e-3, max_relative = 1e-13);
        let s = c.spec(&params).unwrap();
        assert!(check_supersolution_condition(&s, &params).unwrap().holds);
    }

    #[test]
    fn corollary_errors() {
        assert!(matches!(
            corollary_constants(5.0, 1.0, &p(2.0, 0.5, 0.5, 1)),
            Err(Error::Regime { .. })
        ));
        assert!(matches!(
            corollary_constants(5.0, 1.0, &p(1.0, 0.5, 2.0, 1)),
            Err(Error::Regime { .. })
        ));
        assert!(matches!(
            corollary_constants(4.0, 1.0, &p(2.0, 0.5, 2.0, 1)),
            Err(Error::Hypothesis(_))
        ));
        // Critical sigma is admitted.
        assert!(corollary_constants(3.0, 1.0, &p(2.0, 0.5, 1.0, 1)).is_ok());
    }
}
