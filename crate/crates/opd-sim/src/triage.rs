//! Severity prediction backend: face-value triage, history-aware escalation
//! and deterioration drift.
//!
//! The engine talks to a [`TriageBackend`]. [`CalibratedBackend`] reproduces
//! the behaviour of an LLM triage service with calibrated probabilities; a
//! live adapter would implement the same trait and respect
//! [`LIVE_RATE_LIMIT_PER_MINUTE`].

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::patientgen::{HistoryRecord, Patient};
use crate::types::{Specialty, Urgency};

/// Request budget a live LLM adapter must stay within.
pub const LIVE_RATE_LIMIT_PER_MINUTE: u32 = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriageResult {
    pub urgency: Urgency,
    pub acuity: u8,
    pub reasoning: String,
    pub red_flags: Vec<String>,
    pub specialty: Specialty,
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DriftParams {
    /// Minutes between reassessment ticks.
    pub check_interval: f64,
    pub p_high: f64,
    pub p_medium: f64,
    pub p_low: f64,
    /// κ: drift probability multiplier for patients with a history record.
    pub history_multiplier: f64,
    /// Per-check probability that a history rule fires.
    pub p_history_escalation: f64,
    /// Highest class drift alone can reach. Critical remains reachable
    /// through face-value triage and history escalation.
    pub ceiling: Urgency,
}

impl Default for DriftParams {
    fn default() -> Self {
        DriftParams {
            check_interval: 5.0,
            p_high: 0.015,
            p_medium: 0.030,
            p_low: 0.020,
            history_multiplier: 0.25,
            p_history_escalation: 0.7,
            ceiling: Urgency::High,
        }
    }
}

impl DriftParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.check_interval > 0.0 && self.check_interval.is_finite()) {
            return Err(invalid("drift check_interval must be positive"));
        }
        for (name, p) in [
            ("p_high", self.p_high),
            ("p_medium", self.p_medium),
            ("p_low", self.p_low),
            ("p_history_escalation", self.p_history_escalation),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("{name} = {p} is not a probability")));
            }
        }
        if !(self.history_multiplier >= 0.0 && self.history_multiplier.is_finite()) {
            return Err(invalid("history_multiplier must be a non-negative number"));
        }
        Ok(())
    }

    pub fn base_probability(&self, level: Urgency) -> f64 {
        match level {
            Urgency::Low => self.p_low,
            Urgency::Medium => self.p_medium,
            Urgency::High => self.p_high,
            Urgency::Critical => 0.0,
        }
    }
}

/// Face-value triage: the presenting urgency and acuity, history ignored.
pub fn triage_face_value(patient: &Patient) -> TriageResult {
    TriageResult {
        urgency: patient.face_urgency,
        acuity: patient.face_acuity,
        reasoning: format!("Presenting complaint: {}", patient.complaint),
        red_flags: Vec::new(),
        specialty: patient.required_specialty,
        confidence: 0.85,
    }
}

/// One reassessment-loop check of a history rule. Fires with probability
/// `p_history_escalation` unless it has already fired for this patient.
pub fn assess_history_escalation<R: Rng + ?Sized>(
    patient: &Patient,
    record: &HistoryRecord,
    already_fired: bool,
    rng: &mut R,
    params: &DriftParams,
) -> Option<TriageResult> {
    if already_fired || params.p_history_escalation <= 0.0 {
        return None;
    }
    if !rng.random_bool(params.p_history_escalation) {
        return None;
    }
    let target = record.escalation_rule.target;
    Some(TriageResult {
        urgency: target,
        acuity: target.band_midpoint(),
        reasoning: record.escalation_rule.reason.clone(),
        red_flags: record.conditions.iter().map(|c| c.label().to_string()).collect(),
        specialty: patient.required_specialty,
        confidence: 0.9,
    })
}

/// One drift check. Returns the next class up on success.
pub fn assess_drift<R: Rng + ?Sized>(
    current: Urgency,
    has_history: bool,
    rng: &mut R,
    params: &DriftParams,
) -> Option<Urgency> {
    if current >= params.ceiling {
        return None;
    }
    let next = current.next()?;
    let mut p = params.base_probability(current);
    if has_history {
        p *= params.history_multiplier;
    }
    let p = p.clamp(0.0, 1.0);
    if p > 0.0 && rng.random_bool(p) {
        Some(next)
    } else {
        None
    }
}

/// One alert per recorded allergy. Alerts inform the physician summary only.
pub fn generate_medication_alerts(record: &HistoryRecord) -> Vec<String> {
    record
        .allergies
        .iter()
        .map(|a| {
            let current = if record.medications.is_empty() {
                String::new()
            } else {
                format!(" Current medications: {}.", record.medications.join(", "))
            };
            format!("Allergy alert: {a}. Avoid {a} and cross-reactive agents.{current}")
        })
        .collect()
}

pub trait TriageBackend {
    fn face_value(&mut self, patient: &Patient) -> TriageResult;

    fn history_escalation(
        &mut self,
        patient: &Patient,
        record: &HistoryRecord,
        already_fired: bool,
        rng: &mut dyn RngCore,
        params: &DriftParams,
    ) -> Option<TriageResult>;

    fn drift(
        &mut self,
        current: Urgency,
        has_history: bool,
        rng: &mut dyn RngCore,
        params: &DriftParams,
    ) -> Option<Urgency>;
}

/// Stochastic stand-in for the LLM backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct CalibratedBackend;

impl TriageBackend for CalibratedBackend {
    fn face_value(&mut self, patient: &Patient) -> TriageResult {
        triage_face_value(patient)
    }

    fn history_escalation(
        &mut self,
        patient: &Patient,
        record: &HistoryRecord,
        already_fired: bool,
        rng: &mut dyn RngCore,
        params: &DriftParams,
    ) -> Option<TriageResult> {
        assess_history_escalation(patient, record, already_fired, rng, params)
    }

    fn drift(
        &mut self,
        current: Urgency,
        has_history: bool,
        rng: &mut dyn RngCore,
        params: &DriftParams,
    ) -> Option<Urgency> {
        assess_drift(current, has_history, rng, params)
    }
}
