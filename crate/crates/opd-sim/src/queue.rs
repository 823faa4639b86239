//! Waiting queue: priority scoring, reassessment ticks and dequeue policy.

use std::cmp::Ordering;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::patientgen::Patient;
use crate::triage::{DriftParams, TriageBackend};
use crate::types::{Specialty, Strategy, Urgency};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PriorityWeights {
    pub w_u: f64,
    pub w_a: f64,
    pub w_w: f64,
    pub w_l: f64,
    /// Ceiling of the wait factor W.
    pub wait_cap: f64,
    /// Minutes after which W saturates.
    pub wait_horizon: f64,
}

impl Default for PriorityWeights {
    fn default() -> Self {
        PriorityWeights { w_u: 0.45, w_a: 0.20, w_w: 0.20, w_l: 0.15, wait_cap: 0.3, wait_horizon: 120.0 }
    }
}

impl PriorityWeights {
    /// W = cap * min(wait / horizon, 1).
    pub fn wait_factor(&self, wait: f64) -> f64 {
        self.wait_cap * (wait / self.wait_horizon).min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EscalationCause {
    Drift,
    Memory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Escalation {
    pub time: f64,
    pub patient_id: String,
    pub from: Urgency,
    pub to: Urgency,
    pub cause: EscalationCause,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueEntry {
    /// Index into the dataset's patient list.
    pub patient: usize,
    pub patient_id: String,
    pub enqueue_time: f64,
    /// Class assigned at registration; rule-based ordering never changes it.
    pub static_urgency: Urgency,
    pub effective_urgency: Urgency,
    pub effective_acuity: u8,
    pub required_specialty: Specialty,
    pub assigned_physician: Option<usize>,
    pub priority: f64,
    pub escalation_log: Vec<Escalation>,
    pub memory_fired: bool,
}

impl QueueEntry {
    pub fn new(patient: usize, p: &Patient, enqueue_time: f64, urgency: Urgency, acuity: u8) -> Self {
        QueueEntry {
            patient,
            patient_id: p.id.clone(),
            enqueue_time,
            static_urgency: urgency,
            effective_urgency: urgency,
            effective_acuity: acuity,
            required_specialty: p.required_specialty,
            assigned_physician: None,
            priority: 0.0,
            escalation_log: Vec::new(),
            memory_fired: false,
        }
    }

    fn escalate(&mut self, time: f64, to: Urgency, acuity: u8, cause: EscalationCause) -> Escalation {
        let e = Escalation { time, patient_id: self.patient_id.clone(), from: self.effective_urgency, to, cause };
        self.effective_urgency = to;
        self.effective_acuity = acuity;
        self.escalation_log.push(e.clone());
        e
    }
}

/// Priority = w_u U + w_a A + w_w W + w_l L, with L = 1 - normalized load of
/// the patient's assigned physician.
///
/// # Panics
/// When `now` precedes the entry's enqueue time.
pub fn priority(entry: &QueueEntry, now: f64, physician_load: f64, w: &PriorityWeights) -> f64 {
    assert!(now >= entry.enqueue_time, "priority evaluated before enqueue");
    let u = entry.effective_urgency.score();
    let a = f64::from(entry.effective_acuity) / 10.0;
    let wf = w.wait_factor(now - entry.enqueue_time);
    let l = 1.0 - physician_load;
    w.w_u * u + w.w_a * a + w.w_w * wf + w.w_l * l
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReassessFlags {
    pub drift: bool,
    pub memory: bool,
}

#[derive(Debug, Clone, Default)]
pub struct WaitingQueue {
    entries: Vec<QueueEntry>,
}

impl WaitingQueue {
    pub fn new() -> Self {
        WaitingQueue::default()
    }

    pub fn push(&mut self, entry: QueueEntry) {
        self.entries.push(entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[QueueEntry] {
        &self.entries
    }

    pub fn drain(&mut self) -> Vec<QueueEntry> {
        std::mem::take(&mut self.entries)
    }

    /// Recompute every priority. `loads[j]` is physician j's normalized load.
    pub fn reprioritize(&mut self, now: f64, loads: &[f64], w: &PriorityWeights) {
        for e in &mut self.entries {
            let load = e.assigned_physician.map(|j| loads[j]).unwrap_or(0.0);
            e.priority = priority(e, now, load, w);
        }
    }

    /// One reassessment pass. History rules are checked first; a patient whose
    /// rule raised their class skips the drift draw on that tick.
    #[allow(clippy::too_many_arguments)]
    pub fn reassess_tick(
        &mut self,
        now: f64,
        patients: &[Patient],
        params: &DriftParams,
        flags: ReassessFlags,
        backend: &mut dyn TriageBackend,
        rng: &mut dyn RngCore,
        loads: &[f64],
        weights: &PriorityWeights,
    ) -> Vec<Escalation> {
        let mut out = Vec::new();
        if !flags.drift {
            return out;
        }
        for e in &mut self.entries {
            let p = &patients[e.patient];
            if flags.memory && !e.memory_fired {
                if let Some(record) = &p.history {
                    if let Some(r) = backend.history_escalation(p, record, false, rng, params) {
                        e.memory_fired = true;
                        if r.urgency > e.effective_urgency {
                            out.push(e.escalate(now, r.urgency, r.acuity, EscalationCause::Memory));
                            continue;
                        }
                    }
                }
            }
            // Deterioration is a property of the patient, so the history
            // multiplier applies whether or not the memory rule is in use.
            if let Some(next) = backend.drift(e.effective_urgency, p.history.is_some(), rng, params) {
                if next > e.effective_urgency {
                    out.push(e.escalate(now, next, next.band_midpoint(), EscalationCause::Drift));
                }
            }
        }
        self.reprioritize(now, loads, weights);
        out
    }

    /// Remove and return the next patient to see.
    ///
    /// FCFS serves only the physician's own token line, earliest registration
    /// first, and returns `None` when that line is empty. Rule-based
    /// takes the highest static class, FIFO within class. Agentic takes the
    /// highest priority. Remaining ties go to the earlier enqueue time, then
    /// the lower patient index.
    pub fn dequeue_next(
        &mut self,
        strategy: Strategy,
        physician: usize,
        now: f64,
        loads: &[f64],
        w: &PriorityWeights,
    ) -> Option<QueueEntry> {
        if self.entries.is_empty() {
            return None;
        }
        let fifo =
            |a: &QueueEntry, b: &QueueEntry| a.enqueue_time.total_cmp(&b.enqueue_time).then(a.patient.cmp(&b.patient));
        let idx = match strategy {
            Strategy::Fcfs => (0..self.entries.len())
                .filter(|&i| self.entries[i].assigned_physician == Some(physician))
                .min_by(|&a, &b| fifo(&self.entries[a], &self.entries[b])),
            Strategy::RuleBased => (0..self.entries.len()).min_by(|&a, &b| {
                let (x, y) = (&self.entries[a], &self.entries[b]);
                y.static_urgency.cmp(&x.static_urgency).then_with(|| fifo(x, y))
            }),
            Strategy::Agentic => {
                self.reprioritize(now, loads, w);
                (0..self.entries.len()).min_by(|&a, &b| {
                    let (x, y) = (&self.entries[a], &self.entries[b]);
                    match y.priority.total_cmp(&x.priority) {
                        Ordering::Equal => fifo(x, y),
                        o => o,
                    }
                })
            }
        }?;
        Some(self.entries.remove(idx))
    }
}
