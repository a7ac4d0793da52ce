//! Certificate report: regime, certificate margin, admissibility of the
//! configured data, smallness constants and the extinction-time bound.

use extinct_core::initial_data::{validate_theorem2_hypotheses, Admissibility, DEFAULT_SAMPLES};
use extinct_core::model::{check_supersolution_condition, corollary_constants, ConditionCheck, CorollaryConstants};
use extinct_core::oracles::{extinction_upper_bound, OdeBound};
use extinct_core::Regime;
use serde::Serialize;

use crate::config::Setup;

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub regime: Regime,
    /// `null` when infinite.
    pub critical_exponent: Option<f64>,
    pub initial_sup: f64,
    pub certificate: Option<CertificateSection>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSection {
    pub a: f64,
    pub amplitude: f64,
    pub radius: f64,
    /// `A R^a`.
    pub cap: f64,
    pub condition: ConditionCheck,
    pub relative_margin: f64,
    pub admissibility: Option<Admissibility>,
    pub corollary: Option<CorollaryConstants>,
    pub t_bound: Option<OdeBound>,
}

impl CertificateReport {
    pub fn admissible(&self) -> bool {
        self.certificate
            .as_ref()
            .and_then(|c| c.admissibility)
            .is_some_and(|a| a.is_admissible())
    }

    pub fn t_bound(&self) -> Option<f64> {
        self.certificate.as_ref().and_then(|c| c.t_bound).map(|b| b.t_bound)
    }
}

pub fn certify(setup: &Setup) -> CertificateReport {
    let params = &setup.config.params;
    let crit = params.critical_exponent();
    let sup = setup.config.initial.sup_norm();
    let mut notes = Vec::new();

    let certificate = match &setup.certificate {
        None => {
            notes.push("no comparison profile configured; certificate checks skipped".into());
            None
        }
        Some(spec) => match check_supersolution_condition(spec, params) {
            Err(e) => {
                notes.push(format!("certificate not evaluable: {e}"));
                None
            }
            Ok(condition) => {
                let admissibility = if condition.holds {
                    match validate_theorem2_hypotheses(&setup.config.initial, spec, params, DEFAULT_SAMPLES) {
                        Ok(v) => Some(v),
                        Err(e) => {
                            notes.push(format!("admissibility not evaluable: {e}"));
                            None
                        }
                    }
                } else {
                    notes.push("power-law certificate fails; data cannot be certified".into());
                    None
                };
                let corollary = if params.regime().always_extinct() {
                    notes.push(format!("regime is {}: extinction is unconditional", params.regime()));
                    None
                } else {
                    corollary_constants(spec.a(), spec.amplitude(), params)
                        .map_err(|e| notes.push(format!("smallness constants unavailable: {e}")))
                        .ok()
                };
                let t_bound = if admissibility.is_some_and(|a| a.is_admissible()) {
                    extinction_upper_bound(spec, params, sup)
                        .map_err(|e| notes.push(format!("extinction bound unavailable: {e}")))
                        .ok()
                } else {
                    None
                };
                Some(CertificateSection {
                    a: spec.a(),
                    amplitude: spec.amplitude(),
                    radius: spec.radius(),
                    cap: spec.cap(),
                    relative_margin: condition.relative_margin(),
                    condition,
                    admissibility,
                    corollary,
                    t_bound,
                })
            }
        },
    };

    CertificateReport {
        regime: params.regime(),
        critical_exponent: (!crit.is_infinite()).then(|| crit.to_f64()),
        initial_sup: sup,
        certificate,
        notes,
    }
}

/// One line per fact, for the terminal.
pub fn summarize(report: &CertificateReport) -> String {
    let mut out = format!(
        "regime: {} (sigma* = {})\n",
        report.regime,
        report.critical_exponent.map_or("inf".to_string(), |c| c.to_string())
    );
    if let Some(c) = &report.certificate {
        out += &format!(
            "certificate: a = {}, A = {}, R = {}: holds = {}, margin = {:e} (relative {:e})\n",
            c.a, c.amplitude, c.radius, c.condition.holds, c.condition.margin, c.relative_margin
        );
        match c.admissibility {
            Some(Admissibility::Admissible) => out += "data: admissible\n",
            Some(Admissibility::ViolatesFlatness { r }) => out += &format!("data: violates flatness at r = {r:e}\n"),
            Some(Admissibility::ViolatesSupBound { sup, cap }) => {
                out += &format!("data: sup {sup} exceeds cap {cap}\n")
            }
            None => out += "data: not evaluated\n",
        }
        if let Some(k) = &c.corollary {
            out += &format!("smallness constants: K = {}, l = {}, R = {}, M = {}\n", k.k, k.l, k.radius, k.sup_bound);
        }
        if let Some(b) = &c.t_bound {
            out += &format!("extinction time bound: T = {} (B = {}, p = {})\n", b.t_bound, b.b, b.p);
        }
    }
    for note in &report.notes {
        out += &format!("note: {note}\n");
    }
    out
}
