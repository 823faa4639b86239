//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::HashMap;

use opd_sim::arrivals::{thin, IntensityProfile};
use opd_sim::assignment::{score, Physician, PhysicianState};
use opd_sim::engine::{
    default_inputs, run_experiment, run_session, AblationVariant, SessionMetrics, SessionOutcome, StrategyConfig,
};
use opd_sim::export::trace_csv_string;
use opd_sim::patientgen::Dataset;
use opd_sim::queue::{priority, EscalationCause, PriorityWeights, QueueEntry};
use opd_sim::report::{run_critical_wait, summarize, StrategySummary};
use opd_sim::rng::{stream, Stream};
use opd_sim::stats::{ks_critical, ks_statistic, welch_t, wilson_ci};
use opd_sim::{Specialty, Strategy, Urgency};

const RUNS: usize = 30;
const BASE_SEED: u64 = 1;
const FUZZ_SEEDS: u64 = 100;
const FUZZ_BASE: u64 = 10_000;

struct Check {
    what: String,
    ok: bool,
}

fn check(ok: bool, what: impl Into<String>) -> Check {
    Check { what: what.into(), ok }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

struct Experiments {
    dataset: Dataset,
    roster: Vec<Physician>,
    runs: HashMap<&'static str, Vec<SessionMetrics>>,
}

impl Experiments {
    fn new() -> Experiments {
        let (dataset, roster) = default_inputs().expect("default inputs");
        let mut runs = HashMap::new();
        for s in [Strategy::Fcfs, Strategy::RuleBased, Strategy::Agentic] {
            let cfg = StrategyConfig::new(s);
            runs.insert(s.slug(), run_experiment(&cfg, &dataset, &roster, RUNS, BASE_SEED).expect("experiment"));
        }
        let base = StrategyConfig::new(Strategy::Agentic);
        for v in [AblationVariant::NoMemory, AblationVariant::NoDrift, AblationVariant::Neither] {
            let cfg = v.config(&base);
            runs.insert(v.slug(), run_experiment(&cfg, &dataset, &roster, RUNS, BASE_SEED).expect("ablation"));
        }
        Experiments { dataset, roster, runs }
    }

    fn runs(&self, key: &str) -> &[SessionMetrics] {
        &self.runs[key]
    }

    fn summary(&self, key: &str) -> StrategySummary {
        summarize(key, self.runs(key)).expect("summary")
    }
}

fn mean_or_nan(x: Option<opd_sim::stats::MeanStd>) -> f64 {
    x.map(|m| m.mean).unwrap_or(f64::NAN)
}

fn c1(e: &Experiments) -> Vec<Check> {
    let f = e.summary("fcfs");
    let avg = mean_or_nan(f.avg_wait);
    let c10 = f.pct_critical_within_10.unwrap_or(f64::NAN);
    vec![
        check(within(avg, 33.1 - 6.0, 33.1 + 6.0), format!("FCFS avg wait {avg:.1} min (33.1 ± 6)")),
        check(within(c10, 30.8 - 8.0, 30.8 + 8.0), format!("FCFS critical <10 min {c10:.1}% (30.8 ± 8)")),
    ]
}

fn c2(e: &Experiments) -> Vec<Check> {
    let r = e.summary("rule-based");
    let cw = mean_or_nan(r.critical_wait);
    let c10 = r.pct_critical_within_10.unwrap_or(f64::NAN);
    let low = mean_or_nan(r.wait_by_urgency[Urgency::Low.report_index()]);
    vec![
        check(cw < 3.0, format!("critical wait {cw:.2} min (< 3)")),
        check(c10 >= 99.0, format!("critical <10 min {c10:.1}% (>= 99)")),
        check(within(low, 66.0, 106.0), format!("Low wait {low:.1} min (86 ± 20)")),
    ]
}

fn c3(e: &Experiments) -> Vec<Check> {
    let a = e.summary("agentic");
    let c10 = a.pct_critical_within_10.unwrap_or(f64::NAN);
    let cw = mean_or_nan(a.critical_wait);
    vec![
        check(c10 >= 88.0, format!("critical <10 min {c10:.1}% (>= 88)")),
        check(cw < 12.0, format!("critical wait {cw:.2} min (< 12)")),
        check(within(a.drifts.mean, 190.0, 282.0), format!("drift events {:.1} ([190, 282])", a.drifts.mean)),
        check(
            within(a.critical_per_session.mean, 21.0, 29.0),
            format!("critical/session {:.1} ([21, 29])", a.critical_per_session.mean),
        ),
    ]
}

fn c4(e: &Experiments) -> Vec<Check> {
    let start = e.dataset.face_counts();
    let a = e.summary("agentic");
    let target = [25.0, 178.0, 115.0, 50.0];
    let mut out = vec![check(start == [13, 36, 158, 161], format!("start {start:?} (= [13, 36, 158, 161])"))];
    for (k, u) in Urgency::ALL.iter().enumerate() {
        let (x, t) = (a.composition[k], target[k]);
        out.push(check(within(x, 0.85 * t, 1.15 * t), format!("{} {x:.1} ({t} ± 15%)", u.label())));
    }
    out
}

fn c5(e: &Experiments) -> Vec<Check> {
    let nm = e.summary("no-memory");
    let full = e.summary("agentic");
    let mut out =
        vec![check(within(nm.drifts.mean, 55.0, 85.0), format!("No-Memory drifts {:.1} ([55, 85])", nm.drifts.mean))];
    for key in ["no-drift", "neither"] {
        let runs = e.runs(key);
        let zero = runs.iter().all(|m| m.drift_event_count == 0);
        let thirteen = runs.iter().all(|m| m.critical_count_effective == 13);
        out.push(check(zero && thirteen, format!("{key}: 0 drifts and 13 critical in every run")));
    }
    let delta = full.critical_per_session.mean - nm.critical_per_session.mean;
    out.push(check(within(delta, 8.0, 14.0), format!("Full − No-Memory critical {delta:.1} ([8, 14])")));
    out
}

fn c6(e: &Experiments) -> Vec<Check> {
    let tp = |k: &str| e.summary(k).throughput.mean;
    let (f, r, a) = (tp("fcfs"), tp("rule-based"), tp("agentic"));
    vec![
        check(within(f, 37.0, 43.0), format!("FCFS {f:.2}/h")),
        check(within(r, 37.0, 43.0), format!("RuleBased {r:.2}/h")),
        check(within(a, 37.0, 43.0), format!("Agentic {a:.2}/h (all 40 ± 3)")),
        check((f - r).abs() < 1.0, format!("|FCFS − RuleBased| {:.2} (< 1)", (f - r).abs())),
    ]
}

fn c7(e: &Experiments) -> Vec<Check> {
    let w1 = wilson_ci(118, 120, 1.96).expect("wilson");
    let w2 = wilson_ci(173, 368, 1.96).expect("wilson");
    let near = |x: f64, t: f64| (100.0 * x - t).abs() <= 0.1;
    let waits = |k: &str| e.runs(k).iter().filter_map(run_critical_wait).collect::<Vec<_>>();
    let t = welch_t("critical-wait", &waits("fcfs"), &waits("agentic")).expect("welch");
    vec![
        check(
            near(w1.lo, 94.1) && near(w1.hi, 99.5),
            format!("118/120 → [{:.1}, {:.1}]", 100.0 * w1.lo, 100.0 * w1.hi),
        ),
        check(
            near(w2.lo, 42.0) && near(w2.hi, 52.1),
            format!("173/368 → [{:.1}, {:.1}]", 100.0 * w2.lo, 100.0 * w2.hi),
        ),
        check(t.p_value < 1e-6, format!("Welch p {:.2e} (< 1e-6), t {:.1}", t.p_value, t.t_stat)),
        check(t.cohens_d > 3.0, format!("d {:.2} (> 3)", t.cohens_d)),
    ]
}

fn fingerprint(o: &SessionOutcome) -> (String, String) {
    (serde_json::to_string(&o.metrics).expect("json"), trace_csv_string(&o.trace).expect("csv"))
}

fn c8(e: &Experiments) -> Vec<Check> {
    let mut out = Vec::new();
    for s in [Strategy::Fcfs, Strategy::RuleBased, Strategy::Agentic] {
        let cfg = StrategyConfig::new(s).with_seed(7);
        let first = fingerprint(&run_session(&cfg, &e.dataset, &e.roster).expect("run"));
        let same = (0..9).all(|_| fingerprint(&run_session(&cfg, &e.dataset, &e.roster).expect("run")) == first);
        out.push(check(same, format!("{} ×10 identical", s.slug())));
    }
    out
}

fn fuzz_configs() -> Vec<StrategyConfig> {
    let mut v: Vec<StrategyConfig> =
        [Strategy::Fcfs, Strategy::RuleBased, Strategy::Agentic].iter().map(|&s| StrategyConfig::new(s)).collect();
    v.push(AblationVariant::NoMemory.config(&StrategyConfig::new(Strategy::Agentic)));
    v
}

fn fuzz_sweep(e: &Experiments) -> Vec<SessionOutcome> {
    let mut out = Vec::new();
    for seed in FUZZ_BASE..FUZZ_BASE + FUZZ_SEEDS {
        for cfg in fuzz_configs() {
            out.push(run_session(&cfg.with_seed(seed), &e.dataset, &e.roster).expect("run"));
        }
    }
    out
}

fn conservation_causality(o: &SessionOutcome) -> Result<(), String> {
    let m = &o.metrics;
    if m.arrivals != m.served_count + m.unserved_count {
        return Err(format!("seed {}: arrivals != served + unserved", m.seed));
    }
    if m.served_count > 368 || m.final_composition.iter().sum::<usize>() != 368 {
        return Err(format!("seed {}: counts out of range", m.seed));
    }
    for p in &m.patients {
        let reg = p.registration_done.unwrap_or(f64::INFINITY);
        let start = p.consult_start.unwrap_or(f64::INFINITY);
        let end = p.consult_end.unwrap_or(f64::INFINITY);
        if p.consult_start.is_some() && (p.registration_done.is_none() || p.consult_end.is_none()) {
            return Err(format!("seed {}: {} served without registration or end", m.seed, p.id));
        }
        if !(p.arrival <= reg && (p.consult_start.is_none() || (reg <= start && start <= end))) {
            return Err(format!("seed {}: causality broken for {}", m.seed, p.id));
        }
    }
    let mut last = f64::NEG_INFINITY;
    for r in &o.trace {
        if r.time < last {
            return Err(format!("seed {}: trace goes back in time", m.seed));
        }
        last = r.time;
    }
    Ok(())
}

fn monotone_escalations(o: &SessionOutcome) -> Result<(), String> {
    let m = &o.metrics;
    let mut by_patient: HashMap<&str, Vec<_>> = HashMap::new();
    for e in &o.escalations {
        by_patient.entry(e.patient_id.as_str()).or_default().push(e);
    }
    let outcomes: HashMap<&str, _> = m.patients.iter().map(|p| (p.id.as_str(), p)).collect();
    for (id, log) in by_patient {
        let p = outcomes[id];
        if log.iter().filter(|e| e.cause == EscalationCause::Memory).count() > 1 {
            return Err(format!("seed {}: {id} memory-escalated twice", m.seed));
        }
        let mut level = p.face_urgency;
        let mut t = f64::NEG_INFINITY;
        for e in log {
            if e.from != level || e.to <= e.from || e.time <= t {
                return Err(format!("seed {}: {id} escalation log not monotone", m.seed));
            }
            if e.cause == EscalationCause::Drift && Some(e.to) != e.from.next() {
                return Err(format!("seed {}: {id} drift skipped a level", m.seed));
            }
            if p.consult_start.is_some_and(|s| e.time > s) {
                return Err(format!("seed {}: {id} escalated after consult start", m.seed));
            }
            level = e.to;
            t = e.time;
        }
        if level != p.effective_urgency {
            return Err(format!("seed {}: {id} final class disagrees with its log", m.seed));
        }
    }
    Ok(())
}

fn sweep_check(sweep: &[SessionOutcome], f: fn(&SessionOutcome) -> Result<(), String>, label: &str) -> Check {
    let errors: Vec<String> = sweep.iter().filter_map(|o| f(o).err()).collect();
    match errors.first() {
        None => check(true, format!("{label}: {} runs clean", sweep.len())),
        Some(e) => check(false, format!("{label}: {} violations, first: {e}", errors.len())),
    }
}

fn c11() -> Vec<Check> {
    let ped = Physician::new("PHY-03", Specialty::Pediatrics);
    let best = score(&ped, Specialty::Pediatrics, std::slice::from_ref(&ped)).total;

    let mut busy = Physician::new("PHY-05", Specialty::Orthopedics);
    busy.state = PhysicianState::Busy;
    busy.queue_length = 4;
    let mut other = Physician::new("PHY-06", Specialty::Surgery);
    other.queue_length = 1;
    let roster = vec![busy.clone(), other];
    let worst = score(&busy, Specialty::Pediatrics, &roster).total;

    let (dataset, _) = default_inputs().expect("inputs");
    let p = &dataset.patients[0];
    let w = PriorityWeights::default();
    let top = QueueEntry::new(0, p, 0.0, Urgency::Critical, 10);
    let low = QueueEntry::new(0, p, 0.0, Urgency::Low, 1);
    let e1 = priority(&top, 0.0, 0.0, &w);
    let e2 = priority(&low, 150.0, 1.0, &w);
    vec![
        check((best - 1.00).abs() < 1e-12, format!("assignment best {best}")),
        check(worst.abs() < 1e-12, format!("assignment worst {worst}")),
        check((e1 - 0.80).abs() < 1e-12, format!("priority top {e1}")),
        check((e2 - 0.1925).abs() < 1e-12, format!("priority starved Low {e2}")),
    ]
}

fn c12() -> Vec<Check> {
    let profile = IntensityProfile::constant(1.0, 12_000.0).expect("profile");
    let mut rng = stream(2024, Stream::Arrivals);
    let times = thin(&profile, &mut rng);
    let n = 10_000;
    let gaps: Vec<f64> = std::iter::once(times[0]).chain(times.windows(2).map(|w| w[1] - w[0])).take(n).collect();
    let d = ks_statistic(&gaps, |x| 1.0 - (-x).exp());
    let crit = ks_critical(gaps.len(), 0.01);

    let gap =
        IntensityProfile::new(vec![(0.0, 1.0), (100.0, 1.0), (100.0, 0.0), (200.0, 0.0), (200.0, 1.0), (300.0, 1.0)])
            .expect("profile");
    let mut rng = stream(7, Stream::Arrivals);
    let mut inside = 0;
    for _ in 0..200 {
        inside += thin(&gap, &mut rng).iter().filter(|&&t| (100.0..200.0).contains(&t)).count();
    }
    vec![
        check(gaps.len() == n && d < crit, format!("KS D {d:.4} < {crit:.4} (n = {})", gaps.len())),
        check(inside == 0, format!("{inside} arrivals in the zero-intensity interval")),
    ]
}

fn c13(e: &Experiments) -> Vec<Check> {
    let (f, r, a) = (e.runs("fcfs"), e.runs("rule-based"), e.runs("agentic"));
    let count = |pred: &dyn Fn(usize) -> bool| (0..RUNS).filter(|&i| pred(i)).count();
    let low = |m: &SessionMetrics| m.wait_by_urgency[Urgency::Low.report_index()].unwrap_or(f64::NAN);
    let cw = count(&|i| run_critical_wait(&a[i]).unwrap_or(f64::INFINITY) < run_critical_wait(&f[i]).unwrap_or(0.0));
    let p95 = count(&|i| a[i].p95_wait > r[i].p95_wait && r[i].p95_wait > f[i].p95_wait);
    let lw = count(&|i| low(&r[i]) > low(&f[i]));
    vec![
        check(cw >= 28, format!("critical wait Agentic < FCFS {cw}/30")),
        check(p95 >= 28, format!("P95 Agentic > RuleBased > FCFS {p95}/30")),
        check(lw >= 28, format!("Low wait RuleBased > FCFS {lw}/30")),
    ]
}

fn main() {
    let e = Experiments::new();
    let sweep = fuzz_sweep(&e);
    let criteria: Vec<(u32, &str, Vec<Check>)> = vec![
        (1, "FCFS waits", c1(&e)),
        (2, "RuleBased waits", c2(&e)),
        (3, "Agentic full system", c3(&e)),
        (4, "Queue recomposition", c4(&e)),
        (5, "Ablation deltas", c5(&e)),
        (6, "Throughput", c6(&e)),
        (7, "Statistics", c7(&e)),
        (8, "Determinism", c8(&e)),
        (9, "Conservation and causality", vec![sweep_check(&sweep, conservation_causality, "invariants")]),
        (10, "Escalation monotonicity", vec![sweep_check(&sweep, monotone_escalations, "escalations")]),
        (11, "Assignment and priority hand examples", c11()),
        (12, "NHPP thinning", c12()),
        (13, "Strategy orderings", c13(&e)),
    ];
    let mut failed = 0;
    for (id, name, checks) in &criteria {
        let ok = checks.iter().all(|c| c.ok);
        if !ok {
            failed += 1;
        }
        let detail: Vec<String> =
            checks.iter().map(|c| if c.ok { c.what.clone() } else { format!("[x] {}", c.what) }).collect();
        println!("{} {id:>2} {name}: {}", if ok { "PASS" } else { "FAIL" }, detail.join("; "));
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
