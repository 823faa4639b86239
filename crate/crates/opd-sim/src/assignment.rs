//! Physician roster and load-aware assignment scoring.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::types::{Specialty, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhysicianState {
    Idle,
    Busy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Physician {
    pub id: String,
    pub specialty: Specialty,
    pub state: PhysicianState,
    /// Patients assigned to this physician and still waiting.
    pub queue_length: u32,
    pub served_count: u32,
    pub busy_until: f64,
}

impl Physician {
    pub fn new(id: impl Into<String>, specialty: Specialty) -> Self {
        Physician {
            id: id.into(),
            specialty,
            state: PhysicianState::Idle,
            queue_length: 0,
            served_count: 0,
            busy_until: 0.0,
        }
    }

    pub fn is_idle(&self) -> bool {
        self.state == PhysicianState::Idle
    }

    /// Waiting patients plus the one in consultation, if any.
    pub fn backlog(&self) -> u32 {
        self.queue_length + u32::from(!self.is_idle())
    }
}

/// Roster file entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub id: String,
    pub specialty: Specialty,
}

pub fn default_roster() -> Vec<Physician> {
    [
        ("PHY-01", Specialty::GeneralMedicine),
        ("PHY-02", Specialty::GeneralMedicine),
        ("PHY-03", Specialty::Pediatrics),
        ("PHY-04", Specialty::ObGyn),
        ("PHY-05", Specialty::Orthopedics),
        ("PHY-06", Specialty::Surgery),
    ]
    .into_iter()
    .map(|(id, s)| Physician::new(id, s))
    .collect()
}

/// Build a roster from file entries, sorted by id so index order is id order.
pub fn roster_from_entries(entries: &[RosterEntry]) -> Result<Vec<Physician>> {
    if entries.is_empty() {
        return Err(invalid("roster is empty"));
    }
    let mut roster: Vec<Physician> = entries.iter().map(|e| Physician::new(e.id.clone(), e.specialty)).collect();
    roster.sort_by(|a, b| a.id.cmp(&b.id));
    if roster.windows(2).any(|w| w[0].id == w[1].id) {
        return Err(invalid("duplicate physician id in roster"));
    }
    Ok(roster)
}

pub fn roster_entries(roster: &[Physician]) -> Vec<RosterEntry> {
    roster.iter().map(|p| RosterEntry { id: p.id.clone(), specialty: p.specialty }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssignmentWeights {
    pub specialty: f64,
    pub load: f64,
    pub availability: f64,
}

impl Default for AssignmentWeights {
    fn default() -> Self {
        AssignmentWeights { specialty: 0.50, load: 0.30, availability: 0.20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentScore {
    pub physician_id: String,
    pub specialty_match: f64,
    pub load_balance: f64,
    pub availability: f64,
    pub total: f64,
}

/// 1.0 for the required specialty, 0.5 for a general physician, else 0.
pub fn specialty_match(physician: Specialty, required: Specialty) -> f64 {
    if physician == required {
        1.0
    } else if physician == Specialty::GeneralMedicine {
        0.5
    } else {
        0.0
    }
}

fn max_backlog(roster: &[Physician]) -> u32 {
    roster.iter().map(Physician::backlog).max().unwrap_or(0).max(1)
}

/// `1 - backlog / max(1, max backlog)` for every physician.
pub fn load_balance(roster: &[Physician]) -> Vec<f64> {
    let m = f64::from(max_backlog(roster));
    roster.iter().map(|p| 1.0 - f64::from(p.backlog()) / m).collect()
}

pub fn score(physician: &Physician, required: Specialty, roster: &[Physician]) -> AssignmentScore {
    score_with(&AssignmentWeights::default(), physician, required, roster)
}

pub fn score_with(
    w: &AssignmentWeights,
    physician: &Physician,
    required: Specialty,
    roster: &[Physician],
) -> AssignmentScore {
    let sm = specialty_match(physician.specialty, required);
    let lb = 1.0 - f64::from(physician.backlog()) / f64::from(max_backlog(roster));
    let av = if physician.is_idle() { 1.0 } else { 0.0 };
    AssignmentScore {
        physician_id: physician.id.clone(),
        specialty_match: sm,
        load_balance: lb,
        availability: av,
        total: w.specialty * sm + w.load * lb + w.availability * av,
    }
}

/// Stateful assigner; FCFS needs a round-robin cursor.
#[derive(Debug, Clone, Default)]
pub struct Assigner {
    cursor: usize,
    pub weights: AssignmentWeights,
}

impl Assigner {
    pub fn new(weights: AssignmentWeights) -> Self {
        Assigner { cursor: 0, weights }
    }

    /// Index into `roster` of the chosen physician. Ties go to the lowest index.
    pub fn assign(&mut self, required: Specialty, roster: &[Physician], strategy: Strategy) -> usize {
        assert!(!roster.is_empty(), "assign on an empty roster");
        match strategy {
            Strategy::Fcfs => {
                let j = self.cursor % roster.len();
                self.cursor += 1;
                j
            }
            Strategy::RuleBased => {
                let key = |j: &usize| (roster[*j].backlog(), *j);
                (0..roster.len())
                    .filter(|&j| roster[j].specialty == required)
                    .min_by_key(key)
                    .unwrap_or_else(|| (0..roster.len()).min_by_key(key).expect("roster non-empty"))
            }
            Strategy::Agentic => {
                let mut best = 0;
                let mut best_score = f64::NEG_INFINITY;
                for (j, p) in roster.iter().enumerate() {
                    let s = score_with(&self.weights, p, required, roster).total;
                    if s > best_score {
                        best = j;
                        best_score = s;
                    }
                }
                best
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_score_is_one() {
        let roster = default_roster();
        let s = score(&roster[2], Specialty::Pediatrics, &roster);
        assert!((s.total - 1.00).abs() < 1e-12);
    }

    #[test]
    fn mismatched_busy_max_queue_scores_zero() {
        let mut roster = default_roster();
        roster[5].state = PhysicianState::Busy;
        roster[5].queue_length = 3;
        roster[0].queue_length = 1;
        let s = score(&roster[5], Specialty::Pediatrics, &roster);
        assert_eq!(s.specialty_match, 0.0);
        assert_eq!(s.load_balance, 0.0);
        assert_eq!(s.availability, 0.0);
        assert!(s.total.abs() < 1e-12);
    }

    #[test]
    fn empty_queues_balance_to_one() {
        assert!(load_balance(&default_roster()).iter().all(|&x| x == 1.0));
    }

    #[test]
    fn general_fallback_is_half() {
        assert_eq!(specialty_match(Specialty::GeneralMedicine, Specialty::Surgery), 0.5);
        assert_eq!(specialty_match(Specialty::Orthopedics, Specialty::Surgery), 0.0);
        assert_eq!(specialty_match(Specialty::Surgery, Specialty::Surgery), 1.0);
    }

    #[test]
    fn fcfs_round_robin_cycles() {
        let roster = default_roster();
        let mut a = Assigner::default();
        let got: Vec<usize> = (0..12).map(|_| a.assign(Specialty::Surgery, &roster, Strategy::Fcfs)).collect();
        assert_eq!(got, vec![0, 1, 2, 3, 4, 5, 0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn agentic_ties_take_lowest_id() {
        let roster = default_roster();
        let mut a = Assigner::default();
        // Both general physicians score 1.0 for a general patient.
        assert_eq!(a.assign(Specialty::GeneralMedicine, &roster, Strategy::Agentic), 0);
        assert_eq!(a.assign(Specialty::Surgery, &roster, Strategy::Agentic), 5);
    }

    #[test]
    fn rule_based_prefers_shorter_specialist_queue() {
        let mut roster = default_roster();
        roster[0].queue_length = 4;
        let mut a = Assigner::default();
        assert_eq!(a.assign(Specialty::GeneralMedicine, &roster, Strategy::RuleBased), 1);
        let mut single = vec![Physician::new("X", Specialty::Surgery), Physician::new("Y", Specialty::Orthopedics)];
        single[0].queue_length = 2;
        assert_eq!(a.assign(Specialty::Pediatrics, &single, Strategy::RuleBased), 1);
    }

    #[test]
    fn roster_composition() {
        let r = default_roster();
        assert_eq!(r.len(), 6);
        assert_eq!(r.iter().filter(|p| p.specialty == Specialty::GeneralMedicine).count(), 2);
        let mut ids: Vec<&str> = r.iter().map(|p| p.id.as_str()).collect();
        ids.dedup();
        assert_eq!(ids.len(), 6);
    }

    #[test]
    fn roster_entries_round_trip_and_validate() {
        let r = default_roster();
        assert_eq!(roster_from_entries(&roster_entries(&r)).unwrap(), r);
        assert!(roster_from_entries(&[]).is_err());
        let dup = vec![
            RosterEntry { id: "A".into(), specialty: Specialty::Surgery },
            RosterEntry { id: "A".into(), specialty: Specialty::ObGyn },
        ];
        assert!(roster_from_entries(&dup).is_err());
    }
}
