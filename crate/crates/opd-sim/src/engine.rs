//! Event calendar, registration and consultation processes, and per-run
//! metrics.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::arrivals::{default_profile, sample_arrivals, IntensityProfile, SESSION_MINUTES};
use crate::assignment::{default_roster, Assigner, AssignmentWeights, Physician, PhysicianState};
use crate::error::{invalid, Result};
use crate::patientgen::{Dataset, Patient};
use crate::queue::{Escalation, EscalationCause, PriorityWeights, QueueEntry, ReassessFlags, WaitingQueue};
use crate::rng::{stream, Stream};
use crate::stats;
use crate::triage::{CalibratedBackend, DriftParams, TriageBackend};
use crate::types::{Strategy, Urgency};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceTime {
    pub mean: f64,
    pub std: f64,
}

impl ServiceTime {
    pub const fn new(mean: f64, std: f64) -> Self {
        ServiceTime { mean, std }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.mean > 0.0 && self.mean.is_finite() && self.std >= 0.0 && self.std.is_finite()) {
            return Err(invalid(format!("{what}: mean must be positive and std non-negative")));
        }
        Ok(())
    }
}

/// Normal draw truncated below at `floor` by resampling.
pub fn truncated_normal<R: Rng + ?Sized>(rng: &mut R, t: ServiceTime, floor: f64) -> f64 {
    if t.std == 0.0 {
        return t.mean.max(floor);
    }
    let n = Normal::new(t.mean, t.std).expect("validated parameters");
    loop {
        let x = n.sample(rng);
        if x >= floor {
            return x;
        }
    }
}

pub const REGISTRATION_FLOOR: f64 = 0.5;
pub const CONSULT_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConsultParams {
    pub critical: ServiceTime,
    pub high: ServiceTime,
    pub medium: ServiceTime,
    pub low: ServiceTime,
}

impl Default for ConsultParams {
    fn default() -> Self {
        ConsultParams {
            critical: ServiceTime::new(15.0, 4.0),
            high: ServiceTime::new(10.0, 3.0),
            medium: ServiceTime::new(7.0, 2.5),
            low: ServiceTime::new(5.0, 1.5),
        }
    }
}

impl ConsultParams {
    pub fn for_level(&self, u: Urgency) -> ServiceTime {
        match u {
            Urgency::Critical => self.critical,
            Urgency::High => self.high,
            Urgency::Medium => self.medium,
            Urgency::Low => self.low,
        }
    }
}

/// Which class sets the consultation length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConsultBasis {
    /// The class the patient's condition warrants (face value raised to the
    /// history target), whatever the queue believes.
    TrueCondition,
    /// The queue's effective class at consult start.
    Effective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    pub memory_enabled: bool,
    pub drift_enabled: bool,
    /// Registration service time for FCFS and rule-based.
    pub registration: ServiceTime,
    /// Registration service time with voice capture (agentic).
    pub agentic_registration: ServiceTime,
    pub reg_desks: usize,
    pub consult: ConsultParams,
    pub consult_basis: ConsultBasis,
    pub session_length: f64,
    pub drift: DriftParams,
    pub priority: PriorityWeights,
    pub assignment: AssignmentWeights,
    pub profile: IntensityProfile,
    pub seed: u64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            strategy: Strategy::Agentic,
            memory_enabled: true,
            drift_enabled: true,
            registration: ServiceTime::new(5.5, 2.0),
            agentic_registration: ServiceTime::new(3.3, 1.2),
            reg_desks: 5,
            consult: ConsultParams::default(),
            consult_basis: ConsultBasis::TrueCondition,
            session_length: SESSION_MINUTES,
            drift: DriftParams::default(),
            priority: PriorityWeights::default(),
            assignment: AssignmentWeights::default(),
            profile: default_profile(),
            seed: 0,
        }
    }
}

impl StrategyConfig {
    pub fn new(strategy: Strategy) -> Self {
        StrategyConfig { strategy, ..StrategyConfig::default() }.normalized()
    }

    /// FCFS and rule-based never reassess.
    pub fn normalized(mut self) -> Self {
        if self.strategy != Strategy::Agentic {
            self.memory_enabled = false;
            self.drift_enabled = false;
        }
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_flags(mut self, memory: bool, drift: bool) -> Self {
        self.memory_enabled = memory;
        self.drift_enabled = drift;
        self.normalized()
    }

    pub fn registration_time(&self) -> ServiceTime {
        match self.strategy {
            Strategy::Agentic => self.agentic_registration,
            _ => self.registration,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.registration.validate("registration")?;
        self.agentic_registration.validate("agentic_registration")?;
        for u in Urgency::ALL {
            self.consult.for_level(u).validate(&format!("consult.{}", u.label().to_lowercase()))?;
        }
        if self.reg_desks == 0 {
            return Err(invalid("reg_desks must be at least 1"));
        }
        if !(self.session_length > 0.0 && self.session_length.is_finite()) {
            return Err(invalid("session_length must be positive"));
        }
        self.drift.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EventKind {
    ConsultEnd,
    ReassessTick,
    RegistrationDone,
    Arrival,
    ConsultStart,
    SessionEnd,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::ConsultEnd => "consult_end",
            EventKind::ReassessTick => "reassess_tick",
            EventKind::RegistrationDone => "registration_done",
            EventKind::Arrival => "arrival",
            EventKind::ConsultStart => "consult_start",
            EventKind::SessionEnd => "session_end",
        }
    }
}

/// Calendar entry. `subject` is a patient index for patient events and a
/// physician index for consult events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEvent {
    pub time: f64,
    pub kind: EventKind,
    pub subject: usize,
}

impl Eq for SimEvent {}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.kind.cmp(&other.kind)).then(self.subject.cmp(&other.subject))
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: f64,
    pub kind: EventKind,
    pub patient: Option<String>,
    pub physician: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientOutcome {
    pub id: String,
    pub face_urgency: Urgency,
    pub effective_urgency: Urgency,
    pub has_history: bool,
    pub arrival: f64,
    pub registration_done: Option<f64>,
    pub consult_start: Option<f64>,
    pub consult_end: Option<f64>,
    pub physician: Option<String>,
    pub specialty_match: Option<bool>,
    pub escalations: u32,
    pub memory_escalated: bool,
}

impl PatientOutcome {
    pub fn wait(&self) -> Option<f64> {
        Some(self.consult_start? - self.registration_done?)
    }

    pub fn served(&self) -> bool {
        self.consult_start.is_some()
    }
}

/// Mean wait per class, report order (Critical, High, Medium, Low).
pub type UrgencyWaits = [Option<f64>; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionMetrics {
    pub seed: u64,
    pub strategy: Strategy,
    pub memory_enabled: bool,
    pub drift_enabled: bool,
    pub arrivals: usize,
    pub served_count: usize,
    pub unserved_count: usize,
    pub throughput_per_hour: f64,
    pub avg_wait: Option<f64>,
    pub median_wait: Option<f64>,
    pub p95_wait: Option<f64>,
    /// By final effective class.
    pub wait_by_urgency: UrgencyWaits,
    pub wait_by_face_urgency: UrgencyWaits,
    pub specialty_matches: usize,
    pub specialty_match_rate: Option<f64>,
    /// Drift escalations plus history escalations.
    pub drift_event_count: usize,
    pub memory_escalation_count: usize,
    pub critical_count_effective: usize,
    /// Final effective composition (Critical, High, Medium, Low).
    pub final_composition: [usize; 4],
    pub critical_served: usize,
    pub critical_within_10: usize,
    pub critical_within_15: usize,
    pub pct_critical_within_10: Option<f64>,
    pub pct_critical_within_15: Option<f64>,
    /// Backend invocations (triage at registration plus each escalation).
    pub triage_calls: usize,
    pub patients: Vec<PatientOutcome>,
}

impl SessionMetrics {
    pub fn critical_waits(&self) -> Vec<f64> {
        self.patients
            .iter()
            .filter(|p| p.effective_urgency == Urgency::Critical)
            .filter_map(PatientOutcome::wait)
            .collect()
    }

    pub fn waits(&self) -> Vec<f64> {
        self.patients.iter().filter_map(PatientOutcome::wait).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionOutcome {
    pub metrics: SessionMetrics,
    pub escalations: Vec<Escalation>,
    pub trace: Vec<TraceRecord>,
}

pub fn run_session(config: &StrategyConfig, dataset: &Dataset, roster: &[Physician]) -> Result<SessionOutcome> {
    run_session_with_backend(config, dataset, roster, &mut CalibratedBackend)
}

struct Engine<'a> {
    cfg: StrategyConfig,
    patients: &'a [Patient],
    roster: Vec<Physician>,
    backend: &'a mut dyn TriageBackend,
    calendar: BinaryHeap<std::cmp::Reverse<SimEvent>>,
    queue: WaitingQueue,
    reg_queue: VecDeque<usize>,
    free_desks: usize,
    dispatch_pending: Vec<bool>,
    in_consult: Vec<Option<QueueEntry>>,
    outcomes: Vec<PatientOutcome>,
    escalations: Vec<Escalation>,
    trace: Vec<TraceRecord>,
    assigner: Assigner,
    reg_rng: rand_chacha::ChaCha8Rng,
    consult_rng: rand_chacha::ChaCha8Rng,
    drift_rng: rand_chacha::ChaCha8Rng,
    ended: bool,
    triage_calls: usize,
}

pub fn run_session_with_backend(
    config: &StrategyConfig,
    dataset: &Dataset,
    roster: &[Physician],
    backend: &mut dyn TriageBackend,
) -> Result<SessionOutcome> {
    let cfg = config.clone().normalized();
    cfg.validate()?;
    if roster.is_empty() {
        return Err(invalid("roster is empty"));
    }
    let patients = &dataset.patients;
    let n = patients.len();

    let mut arr_rng = stream(cfg.seed, Stream::Arrivals);
    let times = sample_arrivals(&cfg.profile, n, &mut arr_rng)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut arr_rng);

    let mut roster: Vec<Physician> = roster.to_vec();
    for p in &mut roster {
        p.state = PhysicianState::Idle;
        p.queue_length = 0;
        p.served_count = 0;
        p.busy_until = 0.0;
    }

    let outcomes = patients
        .iter()
        .map(|p| PatientOutcome {
            id: p.id.clone(),
            face_urgency: p.face_urgency,
            effective_urgency: p.face_urgency,
            has_history: p.history.is_some(),
            arrival: f64::NAN,
            registration_done: None,
            consult_start: None,
            consult_end: None,
            physician: None,
            specialty_match: None,
            escalations: 0,
            memory_escalated: false,
        })
        .collect();

    let physicians = roster.len();
    let mut eng = Engine {
        patients,
        free_desks: cfg.reg_desks,
        dispatch_pending: vec![false; physicians],
        in_consult: vec![None; physicians],
        roster,
        backend,
        calendar: BinaryHeap::new(),
        queue: WaitingQueue::new(),
        reg_queue: VecDeque::new(),
        outcomes,
        escalations: Vec::new(),
        trace: Vec::new(),
        assigner: Assigner::new(cfg.assignment),
        reg_rng: stream(cfg.seed, Stream::Registration),
        consult_rng: stream(cfg.seed, Stream::Consult),
        drift_rng: stream(cfg.seed, Stream::Drift),
        ended: false,
        triage_calls: 0,
        cfg,
    };

    for (t, &i) in times.iter().zip(order.iter()) {
        eng.outcomes[i].arrival = *t;
        eng.schedule(*t, EventKind::Arrival, i);
    }
    if eng.cfg.drift_enabled {
        let step = eng.cfg.drift.check_interval;
        let mut k = 1u64;
        while (k as f64) * step < eng.cfg.session_length {
            eng.schedule(k as f64 * step, EventKind::ReassessTick, 0);
            k += 1;
        }
    }
    eng.schedule(eng.cfg.session_length, EventKind::SessionEnd, 0);
    eng.run();
    Ok(eng.finish())
}

impl Engine<'_> {
    fn schedule(&mut self, time: f64, kind: EventKind, subject: usize) {
        self.calendar.push(std::cmp::Reverse(SimEvent { time, kind, subject }));
    }

    fn log(&mut self, time: f64, kind: EventKind, patient: Option<usize>, physician: Option<usize>) {
        self.trace.push(TraceRecord {
            time,
            kind,
            patient: patient.map(|i| self.patients[i].id.clone()),
            physician: physician.map(|j| self.roster[j].id.clone()),
        });
    }

    fn loads(&self) -> Vec<f64> {
        let m = f64::from(self.roster.iter().map(Physician::backlog).max().unwrap_or(0).max(1));
        self.roster.iter().map(|p| f64::from(p.backlog()) / m).collect()
    }

    fn start_registration(&mut self, now: f64, i: usize) {
        let d = truncated_normal(&mut self.reg_rng, self.cfg.registration_time(), REGISTRATION_FLOOR);
        self.schedule(now + d, EventKind::RegistrationDone, i);
    }

    fn request_dispatch(&mut self, now: f64, j: usize) {
        if !self.dispatch_pending[j] && self.roster[j].is_idle() {
            self.dispatch_pending[j] = true;
            self.schedule(now, EventKind::ConsultStart, j);
        }
    }

    fn run(&mut self) {
        while let Some(std::cmp::Reverse(ev)) = self.calendar.pop() {
            if self.ended && ev.kind != EventKind::ConsultEnd {
                continue;
            }
            let now = ev.time;
            match ev.kind {
                EventKind::Arrival => {
                    self.log(now, ev.kind, Some(ev.subject), None);
                    if self.free_desks > 0 {
                        self.free_desks -= 1;
                        self.start_registration(now, ev.subject);
                    } else {
                        self.reg_queue.push_back(ev.subject);
                    }
                }
                EventKind::RegistrationDone => self.registration_done(now, ev.subject),
                EventKind::ReassessTick => self.reassess(now),
                EventKind::ConsultStart => self.dispatch(now, ev.subject),
                EventKind::ConsultEnd => self.consult_end(now, ev.subject),
                EventKind::SessionEnd => {
                    self.log(now, ev.kind, None, None);
                    self.ended = true;
                }
            }
        }
    }

    fn registration_done(&mut self, now: f64, i: usize) {
        self.outcomes[i].registration_done = Some(now);
        match self.reg_queue.pop_front() {
            Some(next) => self.start_registration(now, next),
            None => self.free_desks += 1,
        }
        let p = &self.patients[i];
        let triage = self.backend.face_value(p);
        self.triage_calls += 1;
        let mut entry = QueueEntry::new(i, p, now, triage.urgency, triage.acuity);
        entry.required_specialty = triage.specialty;
        let j = self.assigner.assign(triage.specialty, &self.roster, self.cfg.strategy);
        entry.assigned_physician = Some(j);
        self.roster[j].queue_length += 1;
        self.outcomes[i].effective_urgency = triage.urgency;
        self.queue.push(entry);
        self.log(now, EventKind::RegistrationDone, Some(i), Some(j));
        for j in 0..self.roster.len() {
            self.request_dispatch(now, j);
        }
    }

    fn reassess(&mut self, now: f64) {
        self.log(now, EventKind::ReassessTick, None, None);
        let flags = ReassessFlags { drift: self.cfg.drift_enabled, memory: self.cfg.memory_enabled };
        let loads = self.loads();
        let out = self.queue.reassess_tick(
            now,
            self.patients,
            &self.cfg.drift,
            flags,
            &mut *self.backend,
            &mut self.drift_rng,
            &loads,
            &self.cfg.priority,
        );
        self.triage_calls += out.len();
        self.escalations.extend(out);
    }

    fn dispatch(&mut self, now: f64, j: usize) {
        self.dispatch_pending[j] = false;
        if !self.roster[j].is_idle() {
            return;
        }
        let loads = self.loads();
        let Some(entry) = self.queue.dequeue_next(self.cfg.strategy, j, now, &loads, &self.cfg.priority) else {
            return;
        };
        if let Some(a) = entry.assigned_physician {
            self.roster[a].queue_length -= 1;
        }
        let p = &self.patients[entry.patient];
        let basis = match self.cfg.consult_basis {
            ConsultBasis::TrueCondition => p.true_urgency(),
            ConsultBasis::Effective => entry.effective_urgency,
        };
        let d = truncated_normal(&mut self.consult_rng, self.cfg.consult.for_level(basis), CONSULT_FLOOR);
        let phys = &mut self.roster[j];
        phys.state = PhysicianState::Busy;
        phys.busy_until = now + d;
        phys.served_count += 1;
        let o = &mut self.outcomes[entry.patient];
        o.consult_start = Some(now);
        o.physician = Some(phys.id.clone());
        o.specialty_match = Some(phys.specialty == p.required_specialty);
        let i = entry.patient;
        self.in_consult[j] = Some(entry);
        self.log(now, EventKind::ConsultStart, Some(i), Some(j));
        self.schedule(now + d, EventKind::ConsultEnd, j);
    }

    fn consult_end(&mut self, now: f64, j: usize) {
        let entry = self.in_consult[j].take().expect("consult end without a patient");
        self.outcomes[entry.patient].consult_end = Some(now);
        self.roster[j].state = PhysicianState::Idle;
        self.log(now, EventKind::ConsultEnd, Some(entry.patient), Some(j));
        self.settle(entry);
        if !self.ended {
            self.request_dispatch(now, j);
        }
    }

    /// Fold an entry's final class and escalation history into its outcome.
    fn settle(&mut self, entry: QueueEntry) {
        let o = &mut self.outcomes[entry.patient];
        o.effective_urgency = entry.effective_urgency;
        o.escalations = entry.escalation_log.len() as u32;
        o.memory_escalated = entry.escalation_log.iter().any(|e| e.cause == EscalationCause::Memory);
    }

    fn finish(mut self) -> SessionOutcome {
        for e in self.queue.drain() {
            self.settle(e);
        }
        for j in 0..self.in_consult.len() {
            if let Some(e) = self.in_consult[j].take() {
                self.settle(e);
            }
        }
        let metrics = compute_metrics(&self.cfg, self.outcomes, &self.escalations, self.triage_calls);
        SessionOutcome { metrics, escalations: self.escalations, trace: self.trace }
    }
}

fn mean_of(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| stats::mean(v))
}

fn compute_metrics(
    cfg: &StrategyConfig,
    patients: Vec<PatientOutcome>,
    escalations: &[Escalation],
    triage_calls: usize,
) -> SessionMetrics {
    let waits: Vec<f64> = patients.iter().filter_map(PatientOutcome::wait).collect();
    let served = waits.len();
    let by = |key: &dyn Fn(&PatientOutcome) -> Urgency| -> UrgencyWaits {
        let mut out = [None; 4];
        for u in Urgency::ALL {
            let w: Vec<f64> = patients.iter().filter(|p| key(p) == u).filter_map(PatientOutcome::wait).collect();
            out[u.report_index()] = mean_of(&w);
        }
        out
    };
    let wait_by_urgency = by(&|p| p.effective_urgency);
    let wait_by_face_urgency = by(&|p| p.face_urgency);

    let mut composition = [0usize; 4];
    for p in &patients {
        composition[p.effective_urgency.report_index()] += 1;
    }
    let crit: Vec<f64> =
        patients.iter().filter(|p| p.effective_urgency == Urgency::Critical).filter_map(PatientOutcome::wait).collect();
    let within = |m: f64| crit.iter().filter(|&&w| w < m).count();
    let (c10, c15) = (within(10.0), within(15.0));
    let pct = |k: usize| (!crit.is_empty()).then(|| 100.0 * k as f64 / crit.len() as f64);
    let matches = patients.iter().filter(|p| p.specialty_match == Some(true)).count();

    let mut sorted = waits.clone();
    sorted.sort_by(f64::total_cmp);

    SessionMetrics {
        seed: cfg.seed,
        strategy: cfg.strategy,
        memory_enabled: cfg.memory_enabled,
        drift_enabled: cfg.drift_enabled,
        arrivals: patients.len(),
        served_count: served,
        unserved_count: patients.len() - served,
        throughput_per_hour: served as f64 / (cfg.session_length / 60.0),
        avg_wait: mean_of(&waits),
        median_wait: (!sorted.is_empty()).then(|| stats::quantile_sorted(&sorted, 0.5)),
        p95_wait: (!sorted.is_empty()).then(|| stats::quantile_sorted(&sorted, 0.95)),
        wait_by_urgency,
        wait_by_face_urgency,
        specialty_matches: matches,
        specialty_match_rate: (served > 0).then(|| matches as f64 / served as f64),
        drift_event_count: escalations.len(),
        memory_escalation_count: escalations.iter().filter(|e| e.cause == EscalationCause::Memory).count(),
        critical_count_effective: composition[0],
        final_composition: composition,
        critical_served: crit.len(),
        critical_within_10: c10,
        critical_within_15: c15,
        pct_critical_within_10: pct(c10),
        pct_critical_within_15: pct(c15),
        triage_calls,
        patients,
    }
}

pub fn seed_ladder(base_seed: u64, n_runs: usize) -> Vec<u64> {
    (0..n_runs as u64).map(|k| base_seed.wrapping_add(k)).collect()
}

/// `n_runs` sessions on seeds `base_seed..base_seed + n_runs`.
pub fn run_experiment(
    config: &StrategyConfig,
    dataset: &Dataset,
    roster: &[Physician],
    n_runs: usize,
    base_seed: u64,
) -> Result<Vec<SessionMetrics>> {
    if n_runs == 0 {
        return Err(invalid("n_runs must be at least 1"));
    }
    seed_ladder(base_seed, n_runs)
        .into_iter()
        .map(|s| run_session(&config.clone().with_seed(s), dataset, roster).map(|o| o.metrics))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationVariant {
    Full,
    NoMemory,
    NoDrift,
    Neither,
}

impl AblationVariant {
    pub const ALL: [AblationVariant; 4] =
        [AblationVariant::Full, AblationVariant::NoMemory, AblationVariant::NoDrift, AblationVariant::Neither];

    /// (memory, drift)
    pub fn flags(self) -> (bool, bool) {
        match self {
            AblationVariant::Full => (true, true),
            AblationVariant::NoMemory => (false, true),
            AblationVariant::NoDrift => (true, false),
            AblationVariant::Neither => (false, false),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AblationVariant::Full => "Full System",
            AblationVariant::NoMemory => "No Patient Memory",
            AblationVariant::NoDrift => "No Drift Detection",
            AblationVariant::Neither => "No Memory + No Drift",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            AblationVariant::Full => "full",
            AblationVariant::NoMemory => "no-memory",
            AblationVariant::NoDrift => "no-drift",
            AblationVariant::Neither => "neither",
        }
    }

    pub fn config(self, base: &StrategyConfig) -> StrategyConfig {
        let (m, d) = self.flags();
        StrategyConfig { strategy: Strategy::Agentic, ..base.clone() }.with_flags(m, d)
    }
}

/// The four agentic variants on one shared seed ladder.
pub fn run_ablations(
    base: &StrategyConfig,
    dataset: &Dataset,
    roster: &[Physician],
    n_runs: usize,
    base_seed: u64,
) -> Result<Vec<(AblationVariant, Vec<SessionMetrics>)>> {
    AblationVariant::ALL
        .iter()
        .map(|&v| Ok((v, run_experiment(&v.config(base), dataset, roster, n_runs, base_seed)?)))
        .collect()
}

/// Convenience: the default dataset and roster.
pub fn default_inputs() -> Result<(Dataset, Vec<Physician>)> {
    Ok((Dataset::generate(crate::patientgen::DEFAULT_DATASET_SEED)?, default_roster()))
}
