//! Strang-split time marching on a radial finite-volume grid.
//!
//! Each step is `absorb(τ/2) ∘ diffuse(τ) ∘ absorb(τ/2)`:
//!
//! - the absorption sub-step solves `u' = −r_j^σ u^q` exactly per cell, so
//!   cells reach exact zeros in finite time;
//! - the diffusion sub-step is an explicit conservative update of `Δuᵐ`
//!   under a CFL bound on the degenerate diffusivity `m uᵐ⁻¹`, which makes
//!   it monotone.
//!
//! Both sub-steps are order preserving, so the discrete scheme inherits the
//! comparison principle, non-negativity and the sup-norm bound.

mod config;
mod grid;

use serde::Serialize;

pub use config::{Boundary, ComparisonMonitor, Forcing, RunConfig, StepControl};
pub use grid::{unit_sphere_area, RadialGrid};

use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::initial_data::InitialData;
use crate::model::ProblemParams;

/// Cells closer than this to the outer boundary trigger a warning.
const BOUNDARY_WARNING_CELLS: usize = 5;

/// Negative values above `-NEGATIVITY_RTOL * sup` are rounding and are reset
/// to zero; anything below is an error.
const NEGATIVITY_RTOL: f64 = 1e-15;

/// Cell averages at one time instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct State {
    t: f64,
    u: Vec<f64>,
}

impl State {
    pub fn new(t: f64, u: Vec<f64>) -> Result<Self> {
        if let Some((cell, &value)) = u.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::Negativity { cell, value, t });
        }
        Ok(Self { t, u })
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self {
            t: 0.0,
            u: vec![0.0; grid.cells()],
        }
    }

    /// Point samples of `u₀` at the cell centres.
    pub fn from_initial(data: &InitialData, grid: &RadialGrid) -> Self {
        Self {
            t: 0.0,
            u: grid.centers().iter().map(|&r| data.evaluate(r)).collect(),
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn sup(&self) -> f64 {
        self.u.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ w_j u_j`.
    pub fn mass(&self, grid: &RadialGrid) -> f64 {
        self.u.iter().zip(grid.weights()).map(|(u, w)| u * w).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().all(|&v| v == 0.0)
    }
}

#[inline]
fn pow_m(u: f64, m: f64) -> f64 {
    if m == 1.0 {
        u
    } else if m == 2.0 {
        u * u
    } else {
        u.powf(m)
    }
}

/// `r_j^σ` at every cell centre.
fn absorption_weights(grid: &RadialGrid, params: &ProblemParams) -> Vec<f64> {
    let sigma = params.sigma();
    grid.centers()
        .iter()
        .map(|&r| if sigma == 0.0 { 1.0 } else { r.powf(sigma) })
        .collect()
}

/// Exact per-cell solution of `u' = −c_j u^q` over `tau`, in place, with
/// `c_j = r_j^σ` given in `coeffs`. Returns the absorbed mass
/// `Σ w_j (u_before − u_after)`.
fn absorb_in_place(u: &mut [f64], coeffs: &[f64], grid: &RadialGrid, params: &ProblemParams, tau: f64) -> f64 {
    if tau == 0.0 {
        return 0.0;
    }
    let one_minus_q = 1.0 - params.q();
    let inv = 1.0 / one_minus_q;
    let sqrt_form = params.q() == 0.5;
    let mut absorbed = 0.0;
    for ((v, &c), &w) in u.iter_mut().zip(coeffs).zip(grid.weights()) {
        if *v == 0.0 {
            continue;
        }
        let decrement = one_minus_q * c * tau;
        let new = if sqrt_form {
            let bracket = v.sqrt() - decrement;
            if bracket <= 0.0 { 0.0 } else { bracket * bracket }
        } else {
            let bracket = v.powf(one_minus_q) - decrement;
            if bracket <= 0.0 { 0.0 } else { bracket.powf(inv) }
        };
        absorbed += w * (*v - new);
        *v = new;
    }
    absorbed
}

/// Exact absorption over `tau`; produces exact zeros once a cell's
/// extinction time is reached.
pub fn absorption_substep(state: &State, grid: &RadialGrid, params: &ProblemParams, tau: f64) -> State {
    let mut u = state.u.clone();
    absorb_in_place(&mut u, &absorption_weights(grid, params), grid, params, tau);
    State { t: state.t, u }
}

/// Lipschitz bound of `u ↦ uᵐ` on `[0, sup]`.
fn diffusivity(sup: f64, m: f64) -> f64 {
    if m == 1.0 {
        1.0
    } else {
        m * sup.powf(m - 1.0)
    }
}

/// Largest step for which the explicit diffusion update is monotone:
/// `h² / (2 N D)` with `D = m sup^{m-1}`. `None` when `D = 0`.
fn diffusion_limit(grid: &RadialGrid, params: &ProblemParams, sup: f64) -> Option<f64> {
    let d = diffusivity(sup, params.m());
    (d > 0.0).then(|| grid.h() * grid.h() / (2.0 * grid.dim() as f64 * d))
}

/// `cfl · h²/(2 N D_max)`, capped at `remaining`; the whole remainder when
/// the state vanishes identically.
pub fn stable_dt(state: &State, grid: &RadialGrid, params: &ProblemParams, cfl: f64, remaining: f64) -> f64 {
    stable_dt_for_sup(state.sup(), grid, params, cfl, remaining)
}

fn stable_dt_for_sup(sup: f64, grid: &RadialGrid, params: &ProblemParams, cfl: f64, remaining: f64) -> f64 {
    match diffusion_limit(grid, params, sup) {
        Some(limit) => (cfl * limit).min(remaining),
        None => remaining,
    }
}

/// Conservative update in place; returns the mass that left through the
/// outer face.
fn diffuse_in_place(
    u: &mut [f64],
    um: &mut Vec<f64>,
    grid: &RadialGrid,
    params: &ProblemParams,
    boundary: Boundary,
    tau: f64,
    t: f64,
) -> Result<f64> {
    let sup = u.iter().copied().fold(0.0, f64::max);
    if sup == 0.0 || tau == 0.0 {
        return Ok(0.0);
    }
    if let Some(limit) = diffusion_limit(grid, params, sup) {
        if tau > limit * (1.0 + 1e-12) {
            return Err(Error::StabilityViolation { dt: tau, bound: limit });
        }
    }
    let m = params.m();
    let n = u.len();
    let inv_h = 1.0 / grid.h();
    let areas = grid.face_areas();
    um.clear();
    um.extend(u.iter().map(|&v| pow_m(v, m)));

    let outer_flux = match boundary {
        Boundary::DirichletZero => -areas[n] * um[n - 1] * inv_h,
        Boundary::NeumannZero => 0.0,
    };
    let mut inner_flux = 0.0;
    for j in 0..n {
        let right = if j + 1 < n {
            areas[j + 1] * (um[j + 1] - um[j]) * inv_h
        } else {
            outer_flux
        };
        u[j] += tau / grid.weights()[j] * (right - inner_flux);
        inner_flux = right;
    }
    clamp_rounding(u, sup, t)?;
    Ok(-tau * outer_flux)
}

fn clamp_rounding(u: &mut [f64], scale: f64, t: f64) -> Result<()> {
    for (cell, v) in u.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v < -NEGATIVITY_RTOL * scale || !v.is_finite() {
                return Err(Error::Negativity { cell, value: *v, t });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Explicit conservative update of `Δuᵐ` over `tau`. The flux through the
/// origin is zero; the outer face follows the configured boundary.
pub fn diffusion_substep(state: &State, grid: &RadialGrid, config: &RunConfig, tau: f64) -> Result<State> {
    let mut u = state.u.clone();
    let mut um = Vec::with_capacity(u.len());
    diffuse_in_place(&mut u, &mut um, grid, &config.params, config.boundary, tau, state.t)?;
    Ok(State { t: state.t, u })
}

/// Mass bookkeeping of one step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StepReport {
    pub dt: f64,
    /// Mass removed by the two absorption sub-steps.
    pub absorbed: f64,
    /// Mass lost through the outer face.
    pub outflow: f64,
    /// Mass added by the forcing term.
    pub injected: f64,
}

/// Per-run scratch buffers and cached `r_j^σ`.
#[derive(Debug)]
struct Workspace {
    um: Vec<f64>,
    coeffs: Vec<f64>,
}

impl Workspace {
    fn new(config: &RunConfig) -> Self {
        Self {
            um: Vec::with_capacity(config.grid.cells()),
            coeffs: absorption_weights(&config.grid, &config.params),
        }
    }
}

fn step_with(
    state: &mut State,
    config: &RunConfig,
    dt: f64,
    ws: &mut Workspace,
) -> Result<StepReport> {
    let grid = &config.grid;
    let params = &config.params;
    let half = 0.5 * dt;
    let t0 = state.t;
    let mut report = StepReport { dt, ..Default::default() };

    report.absorbed += absorb_in_place(&mut state.u, &ws.coeffs, grid, params, half);
    report.outflow = diffuse_in_place(&mut state.u, &mut ws.um, grid, params, config.boundary, dt, t0)?;
    if let Some(forcing) = &config.forcing {
        let tm = t0 + half;
        let scale = state.sup();
        for ((v, &r), &w) in state.u.iter_mut().zip(grid.centers()).zip(grid.weights()) {
            let add = dt * forcing.eval(tm, r);
            *v += add;
            report.injected += w * add;
        }
        clamp_rounding(&mut state.u, scale, t0)?;
    }
    report.absorbed += absorb_in_place(&mut state.u, &ws.coeffs, grid, params, half);
    state.t = t0 + dt;
    Ok(report)
}

/// One Strang step with `τ = stable_dt` (capped by the horizon).
pub fn step(state: &State, config: &RunConfig) -> Result<(State, StepReport)> {
    let remaining = (config.t_max - state.t).max(0.0);
    let dt = config.step_size(state, remaining);
    let mut next = state.clone();
    let report = step_with(&mut next, config, dt, &mut Workspace::new(config))?;
    Ok((next, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtinctionReport {
    pub extinct: bool,
    /// Time of the last step whose sup was still above the threshold.
    pub t_lower: Option<f64>,
    /// First step time with sup below the threshold.
    pub t_upper: Option<f64>,
    /// Every cell is exactly zero at the end of the run.
    pub exact_zero: bool,
}

/// Per-step invariant monitoring accumulated over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantLog {
    pub steps: usize,
    pub initial_mass: f64,
    pub initial_sup: f64,
    /// `max (sup u_{k+1} − sup u_k)`; non-positive when the discrete sup
    /// bound holds. Meaningless with forcing.
    pub max_sup_increase: f64,
    /// `max |M_{k+1} − M_k + absorbed + outflow − injected|`.
    pub max_mass_residual: f64,
    /// `max (M_{k+1} − M_k)`.
    pub max_mass_increase: f64,
    pub min_comparison_margin: Option<f64>,
    pub min_dt: f64,
    pub max_dt: f64,
}

impl InvariantLog {
    /// Mass residual relative to the initial mass.
    pub fn relative_mass_residual(&self) -> f64 {
        if self.initial_mass > 0.0 {
            self.max_mass_residual / self.initial_mass
        } else {
            self.max_mass_residual
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    /// States at the snapshot times when `keep_states` is set.
    #[serde(skip)]
    pub snapshots: Vec<State>,
    pub final_state: State,
    pub extinction: ExtinctionReport,
    pub invariants: InvariantLog,
    /// Effective extinction threshold `ε_ext · max(1, sup u₀)`.
    pub threshold: f64,
    pub comparison_tolerance: Option<f64>,
}

/// Advances until `t_max` or numerical extinction, recording diagnostics at
/// the snapshot cadence and monitoring the per-step invariants.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let grid = &config.grid;
    let params = &config.params;
    let mut state = State::from_initial(&config.initial, grid);
    let sup0 = state.sup();
    let threshold = config.extinction_threshold * sup0.max(1.0);
    let comparison_spec = config.comparison.as_ref().map(|c| c.spec);
    let comparison_tolerance = config.comparison.as_ref().map(|c| c.tolerance(grid));

    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut boundary_warned = false;
    let mut snap = |state: &State, records: &mut Vec<DiagnosticsRecord>, snapshots: &mut Vec<State>| {
        let rec = diagnostics::record(state, grid, params, comparison_spec.as_ref(), threshold);
        if !boundary_warned
            && rec.sup_norm >= threshold
            && rec.support_radius >= grid.r_max() - BOUNDARY_WARNING_CELLS as f64 * grid.h()
            && config.initial.support_radius().is_some()
        {
            log::warn!(
                "support radius {} at t = {} is within {} cells of the outer boundary",
                rec.support_radius,
                rec.t,
                BOUNDARY_WARNING_CELLS
            );
            boundary_warned = true;
        }
        records.push(rec);
        if config.keep_states {
            snapshots.push(state.clone());
        }
    };
    snap(&state, &mut records, &mut snapshots);

    let initial_mass = state.mass(grid);
    let mut log = InvariantLog {
        steps: 0,
        initial_mass,
        initial_sup: sup0,
        max_sup_increase: f64::NEG_INFINITY,
        max_mass_residual: 0.0,
        max_mass_increase: f64::NEG_INFINITY,
        min_comparison_margin: records[0].comparison_margin,
        min_dt: f64::INFINITY,
        max_dt: 0.0,
    };
    check_comparison(records[0].comparison_margin, comparison_tolerance, 0.0)?;

    let mut extinction = ExtinctionReport {
        extinct: false,
        t_lower: None,
        t_upper: None,
        exact_zero: state.is_zero(),
    };
    if sup0 < threshold {
        extinction.extinct = true;
        extinction.t_lower = Some(0.0);
        extinction.t_upper = Some(0.0);
        return Ok(RunOutput {
            records,
            snapshots,
            final_state: state,
            extinction,
            invariants: log,
            threshold,
            comparison_tolerance,
        });
    }

    let interval = config.snapshot_interval;
    let periodic = interval.is_finite() && interval > 0.0;
    let mut snap_index: u64 = 1;
    let next_snapshot = |k: u64| {
        if periodic {
            (k as f64 * interval).min(config.t_max)
        } else {
            config.t_max
        }
    };
    let mut ws = Workspace::new(config);
    let mut last_recorded_t = 0.0;

    while state.t < config.t_max {
        let target = next_snapshot(snap_index);
        let sup_before = state.sup();
        let mass_before = state.mass(grid);
        let t_before = state.t;
        let mut dt = config.step_size(&state, config.t_max - state.t);
        let lands = dt >= target - state.t;
        if lands {
            dt = target - state.t;
        }
        let report = step_with(&mut state, config, dt, &mut ws)?;
        if lands {
            state.t = target;
        }

        let sup_after = state.sup();
        let mass_after = state.mass(grid);
        log.steps += 1;
        log.min_dt = log.min_dt.min(dt);
        log.max_dt = log.max_dt.max(dt);
        log.max_sup_increase = log.max_sup_increase.max(sup_after - sup_before);
        log.max_mass_increase = log.max_mass_increase.max(mass_after - mass_before);
        let residual = mass_after - mass_before + report.absorbed + report.outflow - report.injected;
        log.max_mass_residual = log.max_mass_residual.max(residual.abs());

        if let Some(spec) = &comparison_spec {
            let margin = diagnostics::comparison_margin(&state, grid, spec);
            if let Some(mg) = margin {
                log.min_comparison_margin = Some(log.min_comparison_margin.map_or(mg, |m| m.min(mg)));
            }
            check_comparison(margin, comparison_tolerance, state.t)?;
        }

        if sup_after < threshold {
            extinction.extinct = true;
            extinction.t_lower = Some(t_before);
            extinction.t_upper = Some(state.t);
            snap(&state, &mut records, &mut snapshots);
            last_recorded_t = state.t;
            break;
        }
        if lands {
            snap(&state, &mut records, &mut snapshots);
            last_recorded_t = state.t;
            snap_index += 1;
        }
    }
    if last_recorded_t != state.t {
        snap(&state, &mut records, &mut snapshots);
    }
    extinction.exact_zero = state.is_zero();

    Ok(RunOutput {
        records,
        snapshots,
        final_state: state,
        extinction,
        invariants: log,
        threshold,
        comparison_tolerance,
    })
}

fn check_comparison(margin: Option<f64>, tolerance: Option<f64>, t: f64) -> Result<()> {
    if let (Some(margin), Some(tolerance)) = (margin, tolerance) {
        if margin < -tolerance {
            return Err(Error::ComparisonViolation { margin, tolerance, t });
        }
    }
    Ok(())
}
