//! Observables along a run: sup norm, mass, support, origin value,
//! absorption flux and the margin below a power-law supersolution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ProblemParams, SupersolutionSpec};
use crate::solver::{RadialGrid, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub sup_norm: f64,
    /// `Σ w_j u_j`.
    pub l1_mass: f64,
    /// Largest cell centre with `u_j > threshold`; zero when none.
    pub support_radius: f64,
    /// Value in the innermost cell.
    pub origin_value: f64,
    /// `Σ w_j r_j^σ u_j^q`, the instantaneous mass loss rate.
    pub absorption_flux: f64,
    /// `min (A r_j^a − u_j)` over cells with `r_j ≤ R`.
    pub comparison_margin: Option<f64>,
}

/// Computes every field of a [`DiagnosticsRecord`] by direct scan.
pub fn record(
    state: &State,
    grid: &RadialGrid,
    params: &ProblemParams,
    comparison: Option<&SupersolutionSpec>,
    support_threshold: f64,
) -> DiagnosticsRecord {
    let u = state.values();
    let centers = grid.centers();
    let weights = grid.weights();
    let (sigma, q) = (params.sigma(), params.q());

    let support_radius = u
        .iter()
        .rposition(|&v| v > support_threshold)
        .map_or(0.0, |j| centers[j]);
    let absorption_flux = u
        .iter()
        .zip(centers)
        .zip(weights)
        .filter(|((&v, _), _)| v > 0.0)
        .map(|((&v, &r), &w)| w * r.powf(sigma) * v.powf(q))
        .fold(0.0, |acc, x| acc + x);

    DiagnosticsRecord {
        t: state.t(),
        sup_norm: state.sup(),
        l1_mass: state.mass(grid),
        support_radius,
        origin_value: u[0],
        absorption_flux,
        comparison_margin: comparison.and_then(|spec| comparison_margin(state, grid, spec)),
    }
}

/// `None` when no cell centre lies inside `B(0, R)`.
pub fn comparison_margin(state: &State, grid: &RadialGrid, spec: &SupersolutionSpec) -> Option<f64> {
    state
        .values()
        .iter()
        .zip(grid.centers())
        .take_while(|(_, &r)| r <= spec.radius())
        .map(|(&v, &r)| spec.value(r) - v)
        .reduce(f64::min)
}

/// Bracket `[t_lower, t_upper]` around the first sup-norm drop below the
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtinctionBracket {
    pub t_lower: f64,
    pub t_upper: f64,
}

impl ExtinctionBracket {
    pub fn contains(&self, t: f64) -> bool {
        self.t_lower <= t && t <= self.t_upper
    }

    pub fn width(&self) -> f64 {
        self.t_upper - self.t_lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.t_lower + self.t_upper)
    }
}

/// First snapshot with `sup < threshold`, bracketed below by the previous
/// snapshot time. A trajectory that starts extinct gives `[t₀, t₀]`.
pub fn extinction_time(trajectory: &[DiagnosticsRecord], threshold: f64) -> Option<ExtinctionBracket> {
    let idx = trajectory.iter().position(|rec| rec.sup_norm < threshold)?;
    let t_upper = trajectory[idx].t;
    let t_lower = if idx == 0 { t_upper } else { trajectory[idx - 1].t };
    Some(ExtinctionBracket { t_lower, t_upper })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShrinkingReport {
    /// `max support_radius` over snapshots with `t ≥ τ`.
    pub radius: f64,
    /// Support radius at the first snapshot with `t ≥ τ`.
    pub radius_at_tau: f64,
    /// True iff the support never exceeded `initial_support` after `τ`.
    pub localized: bool,
}

/// Localization report for the snapshots at or after `tau`.
///
/// `initial_support` is the reference radius the support is compared
/// against, normally the support radius of the first record.
pub fn shrinking_report(
    trajectory: &[DiagnosticsRecord],
    tau: f64,
    initial_support: f64,
) -> Result<ShrinkingReport> {
    let horizon = trajectory.last().map_or(f64::NEG_INFINITY, |rec| rec.t);
    if !(tau <= horizon) {
        return Err(Error::Horizon { tau, horizon });
    }
    let after: Vec<_> = trajectory.iter().filter(|rec| rec.t >= tau).collect();
    let radius = after.iter().map(|rec| rec.support_radius).fold(0.0, f64::max);
    Ok(ShrinkingReport {
        radius,
        radius_at_tau: after[0].support_radius,
        localized: radius <= initial_support,
    })
}
