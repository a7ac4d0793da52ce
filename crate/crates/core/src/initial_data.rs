//! Radial initial profiles `u₀(r) ≥ 0` and admissibility checks for the
//! flat-at-the-origin extinction class.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{check_supersolution_condition, corollary_constants, ProblemParams, SupersolutionSpec};

/// Default number of samples used by [`validate_theorem2_hypotheses`].
pub const DEFAULT_SAMPLES: usize = 4096;

/// Relative slack of the pointwise comparisons, so that profiles equal to
/// the bound up to rounding (e.g. after rescaling) are not rejected.
const SAMPLE_RTOL: f64 = 1e-12;

/// Radially symmetric, bounded, non-negative initial data.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// `min(A r^a, A R^a)`: the largest profile below both the flatness bound
    /// on `B(0, R)` and the sup cap `A R^a`.
    PowerCap { a: f64, amplitude: f64, radius: f64 },
    FlatConstant(f64),
    /// `height · exp(−(r − center)² / (2 width²))`.
    GaussianBump { height: f64, width: f64, center: f64 },
    /// Biweight `height · (1 − ξ²)²` on `[inner, outer]`, with `ξ` the
    /// position relative to the midpoint scaled to `[−1, 1]`; zero outside.
    AnnulusBump { height: f64, inner: f64, outer: f64 },
    /// Piecewise-linear through `(radius, value)` rows, constant below the
    /// first radius and zero beyond the last.
    Table(Vec<(f64, f64)>),
}

impl InitialData {
    pub fn power_cap(a: f64, amplitude: f64, radius: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidInitialData(format!("power cap exponent a = {a} must be positive")));
        }
        check_positive("power cap amplitude", amplitude)?;
        check_positive("power cap radius", radius)?;
        Ok(Self::PowerCap { a, amplitude, radius })
    }

    /// Power cap matching a certificate exactly.
    pub fn power_cap_for(spec: &SupersolutionSpec) -> Self {
        Self::PowerCap {
            a: spec.a(),
            amplitude: spec.amplitude(),
            radius: spec.radius(),
        }
    }

    pub fn flat(c: f64) -> Result<Self> {
        check_nonnegative("flat constant", c)?;
        Ok(Self::FlatConstant(c))
    }

    pub fn gaussian(height: f64, width: f64, center: f64) -> Result<Self> {
        check_nonnegative("gaussian height", height)?;
        check_positive("gaussian width", width)?;
        check_nonnegative("gaussian center", center)?;
        Ok(Self::GaussianBump { height, width, center })
    }

    pub fn annulus(height: f64, inner: f64, outer: f64) -> Result<Self> {
        check_nonnegative("annulus height", height)?;
        check_nonnegative("annulus inner radius", inner)?;
        if !(outer > inner && outer.is_finite()) {
            return Err(Error::InvalidInitialData(format!(
                "annulus outer radius {outer} must exceed inner radius {inner}"
            )));
        }
        Ok(Self::AnnulusBump { height, inner, outer })
    }

    pub fn table(rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInitialData("table has no rows".into()));
        }
        for (i, &(r, v)) in rows.iter().enumerate() {
            check_nonnegative("table radius", r)?;
            check_nonnegative("table value", v)?;
            if i > 0 && !(r > rows[i - 1].0) {
                return Err(Error::InvalidInitialData(format!(
                    "table radii must be strictly increasing (row {} has r = {r})",
                    i + 1
                )));
            }
        }
        Ok(Self::Table(rows))
    }

    /// Parses a two-column whitespace-separated text table. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace().map(str::parse::<f64>);
            match (cols.next(), cols.next(), cols.next()) {
                (Some(Ok(r)), Some(Ok(v)), None) => rows.push((r, v)),
                _ => {
                    return Err(Error::InvalidInitialData(format!(
                        "line {}: expected two numeric columns, got `{line}`",
                        lineno + 1
                    )))
                }
            }
        }
        Self::table(rows)
    }

    pub fn load_table(path: &Path) -> Result<Self> {
        Self::parse_table(&std::fs::read_to_string(path)?)
    }

    pub fn evaluate(&self, r: f64) -> f64 {
        match *self {
            Self::PowerCap { a, amplitude, radius } => {
                if r <= 0.0 {
                    0.0
                } else {
                    amplitude * r.min(radius).powf(a)
                }
            }
            Self::FlatConstant(c) => c,
            Self::GaussianBump { height, width, center } => {
                let z = (r - center) / width;
                height * (-0.5 * z * z).exp()
            }
            Self::AnnulusBump { height, inner, outer } => {
                if r < inner || r > outer {
                    0.0
                } else {
                    let xi = (2.0 * r - inner - outer) / (outer - inner);
                    let s = 1.0 - xi * xi;
                    height * s * s
                }
            }
            Self::Table(ref rows) => interpolate(rows, r),
        }
    }

    /// Exact supremum over `r ≥ 0`.
    pub fn sup_norm(&self) -> f64 {
        match *self {
            Self::PowerCap { a, amplitude, radius } => amplitude * radius.powf(a),
            Self::FlatConstant(c) => c,
            Self::GaussianBump { height, .. } => height,
            Self::AnnulusBump { height, .. } => height,
            Self::Table(ref rows) => rows.iter().map(|&(_, v)| v).fold(0.0, f64::max),
        }
    }

    /// Radius beyond which the data vanish, or `None` for data with
    /// unbounded support (these are truncated by the computational domain).
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            Self::FlatConstant(0.0) => Some(0.0),
            Self::AnnulusBump { height, outer, .. } => Some(if height == 0.0 { 0.0 } else { outer }),
            Self::Table(ref rows) => Some(
                rows.iter()
                    .rev()
                    .find(|&&(_, v)| v > 0.0)
                    .map_or(0.0, |&(r, _)| r),
            ),
            Self::GaussianBump { height: 0.0, .. } => Some(0.0),
            _ => None,
        }
    }

    /// `λ·u₀`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        check_nonnegative("scale factor", lambda)?;
        Ok(match *self {
            Self::PowerCap { a, amplitude, radius } => {
                if lambda == 0.0 {
                    Self::FlatConstant(0.0)
                } else {
                    Self::PowerCap { a, amplitude: lambda * amplitude, radius }
                }
            }
            Self::FlatConstant(c) => Self::FlatConstant(lambda * c),
            Self::GaussianBump { height, width, center } => Self::GaussianBump {
                height: lambda * height,
                width,
                center,
            },
            Self::AnnulusBump { height, inner, outer } => Self::AnnulusBump {
                height: lambda * height,
                inner,
                outer,
            },
            Self::Table(ref rows) => Self::Table(rows.iter().map(|&(r, v)| (r, lambda * v)).collect()),
        })
    }
}

fn interpolate(rows: &[(f64, f64)], r: f64) -> f64 {
    let (r_last, v_last) = rows[rows.len() - 1];
    if r > r_last {
        return 0.0;
    }
    if r <= rows[0].0 {
        return rows[0].1;
    }
    if r == r_last {
        return v_last;
    }
    let i = rows.partition_point(|&(x, _)| x <= r);
    let (r0, v0) = rows[i - 1];
    let (r1, v1) = rows[i];
    v0 + (v1 - v0) * (r - r0) / (r1 - r0)
}

fn check_positive(what: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInitialData(format!("{what} = {x} must be positive and finite")))
    }
}

fn check_nonnegative(what: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInitialData(format!("{what} = {x} must be non-negative and finite")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Admissibility {
    Admissible,
    /// `u₀(r) > A r^a` at this (smallest sampled) radius.
    ViolatesFlatness { r: f64 },
    /// `‖u₀‖_∞ > A R^a`.
    ViolatesSupBound { sup: f64, cap: f64 },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

/// Sample radii on `[0, R]`: the origin, a log-spaced half down to
/// `1e-12·R` where the flatness bound binds, and a uniform half.
fn sample_radii(radius: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let log_count = (count - 1) / 2;
    let lin_count = count - 1 - log_count;
    let mut radii = Vec::with_capacity(count);
    radii.push(0.0);
    let lo = (1e-12f64).ln();
    for i in 0..log_count {
        let s = if log_count > 1 { i as f64 / (log_count - 1) as f64 } else { 0.0 };
        radii.push(radius * (lo * (1.0 - s)).exp());
    }
    for i in 1..=lin_count {
        radii.push(radius * i as f64 / lin_count as f64);
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
}

/// Checks `u₀ ≤ A|x|^a` on `B(0, R)` by sampling and `‖u₀‖_∞ ≤ A R^a`
/// exactly. The sup bound is reported first when both fail.
///
/// Fails when the certificate itself does not hold.
pub fn validate_theorem2_hypotheses(
    data: &InitialData,
    spec: &SupersolutionSpec,
    params: &ProblemParams,
    samples: usize,
) -> Result<Admissibility> {
    if samples < 2 {
        return Err(Error::InvalidConfig(format!("sample count {samples} must be at least 2")));
    }
    let check = check_supersolution_condition(spec, params)?;
    if !check.holds {
        return Err(Error::Hypothesis(format!(
            "supersolution condition fails with margin {}",
            check.margin
        )));
    }
    let cap = spec.cap();
    let sup = data.sup_norm();
    if sup > cap * (1.0 + SAMPLE_RTOL) {
        return Ok(Admissibility::ViolatesSupBound { sup, cap });
    }
    for r in sample_radii(spec.radius(), samples) {
        let bound = spec.value(r);
        if data.evaluate(r) > bound * (1.0 + SAMPLE_RTOL) {
            return Ok(Admissibility::ViolatesFlatness { r });
        }
    }
    Ok(Admissibility::Admissible)
}

/// Smallness test for data bounded by `A₀|x|^a` everywhere: true iff
/// `sup ≤ M`.
pub fn corollary2_admissible(a: f64, a0: f64, params: &ProblemParams, sup: f64) -> Result<bool> {
    let constants = corollary_constants(a, a0, params)?;
    Ok(sup <= constants.sup_bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ProblemParams {
        ProblemParams::new(2.0, 0.5, 2.0, 1).unwrap()
    }

    fn spec() -> SupersolutionSpec {
        SupersolutionSpec::new(5.0, 1.0, 0.2, &params()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let cap = InitialData::power_cap(5.0, 1.0, 0.2).unwrap();
        assert_eq!(cap.evaluate(0.0), 0.0);
        assert!((cap.evaluate(1.0) - 3.2e-4).abs() < 1e-18);
        let ann = InitialData::annulus(1.0, 0.5, 1.0).unwrap();
        assert_eq!(ann.evaluate(0.0), 0.0);
        assert_eq!(ann.evaluate(0.75), 1.0);
        assert_eq!(ann.evaluate(1.2), 0.0);
        assert_eq!(InitialData::flat(0.3).unwrap().evaluate(123.0), 0.3);
        let g = InitialData::gaussian(2.0, 0.5, 0.0).unwrap();
        assert_eq!(g.evaluate(0.0), 2.0);
        assert!((g.evaluate(0.5) - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn constructors_reject_bad_data() {
        assert!(InitialData::flat(-1.0).is_err());
        assert!(InitialData::gaussian(1.0, 0.0, 0.0).is_err());
        assert!(InitialData::annulus(1.0, 0.5, 0.5).is_err());
        assert!(InitialData::power_cap(5.0, 1.0, f64::INFINITY).is_err());
        assert!(InitialData::table(vec![]).is_err());
        assert!(InitialData::table(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(InitialData::table(vec![(0.0, 1.0), (0.5, -2.0)]).is_err());
    }

    #[test]
    fn table_parsing_and_interpolation() {
        let t = InitialData::parse_table("# r u\n0.0 1.0\n0.5 0.5\n\n1.0 0.0\n").unwrap();
        assert_eq!(t.evaluate(0.25), 0.75);
        assert_eq!(t.evaluate(0.5), 0.5);
        assert_eq!(t.evaluate(2.0), 0.0);
        assert_eq!(t.sup_norm(), 1.0);
        assert_eq!(t.support_radius(), Some(0.5));
        assert!(InitialData::parse_table("0 1 2\n").is_err());
        assert!(InitialData::parse_table("0 x\n").is_err());
        assert!(InitialData::parse_table("0.5 1\n0.2 1\n").is_err());
    }

    #[test]
    fn support_radii() {
        assert_eq!(InitialData::annulus(1.0, 0.0, 0.5).unwrap().support_radius(), Some(0.5));
        assert_eq!(InitialData::flat(0.0).unwrap().support_radius(), Some(0.0));
        assert_eq!(InitialData::flat(1.0).unwrap().support_radius(), None);
        assert_eq!(InitialData::power_cap(5.0, 1.0, 0.2).unwrap().support_radius(), None);
    }

    #[test]
    fn power_cap_is_admissible_for_its_own_spec() {
        let s = spec();
        let v = validate_theorem2_hypotheses(&InitialData::power_cap_for(&s), &s, &params(), DEFAULT_SAMPLES).unwrap();
        assert_eq!(v, Admissibility::Admissible);
    }

    #[test]
    fn flat_above_cap_violates_sup_bound() {
        let s = spec();
        let v = validate_theorem2_hypotheses(&InitialData::flat(2.0 * s.cap()).unwrap(), &s, &params(), 64).unwrap();
        assert!(matches!(v, Admissibility::ViolatesSupBound { .. }));
    }

    #[test]
    fn gaussian_at_origin_violates_flatness_near_zero() {
        let s = spec();
        let g = InitialData::gaussian(s.cap(), 0.01, 0.0).unwrap();
        match validate_theorem2_hypotheses(&g, &s, &params(), DEFAULT_SAMPLES).unwrap() {
            Admissibility::ViolatesFlatness { r } => assert!(r < 1e-6),
            other => panic!("expected flatness violation, got {other:?}"),
        }
    }

    #[test]
    fn validation_requires_valid_certificate() {
        let p = params();
        let bad = SupersolutionSpec::new(5.0, 1.0, 1.0, &p).unwrap();
        assert!(validate_theorem2_hypotheses(&InitialData::flat(0.0).unwrap(), &bad, &p, 16).is_err());
        assert!(validate_theorem2_hypotheses(&InitialData::flat(0.0).unwrap(), &spec(), &p, 1).is_err());
    }

    #[test]
    fn corollary_smallness() {
        let p = params();
        let m = corollary_constants(5.0, 1.0, &p).unwrap().sup_bound;
        assert!(corollary2_admissible(5.0, 1.0, &p, 0.0).unwrap());
        assert!(corollary2_admissible(5.0, 1.0, &p, m).unwrap());
        assert!(!corollary2_admissible(5.0, 1.0, &p, 0.01).unwrap());
        assert!(corollary2_admissible(5.0, 1.0, &ProblemParams::new(2.0, 0.5, 0.5, 1).unwrap(), 0.0).is_err());
    }

    #[test]
    fn sample_radii_cover_interval() {
        let r = sample_radii(0.2, 4096);
        assert_eq!(r[0], 0.0);
        assert_eq!(*r.last().unwrap(), 0.2);
        assert!(r[1] < 1e-11);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
    }
}
