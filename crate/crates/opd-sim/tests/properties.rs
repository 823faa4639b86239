use opd_sim::assignment::{default_roster, score_with, Assigner, AssignmentWeights, Physician, PhysicianState};
use opd_sim::engine::{default_inputs, run_experiment, StrategyConfig};
use opd_sim::patientgen::{Dataset, HISTORY_SIZE};
use opd_sim::queue::{priority, PriorityWeights, QueueEntry};
use opd_sim::report::summarize;
use opd_sim::rng::{stream, Stream};
use opd_sim::stats::{welch_t, wilson_ci};
use opd_sim::triage::{assess_drift, DriftParams};
use opd_sim::{Specialty, Strategy as Sched, Urgency};
use proptest::prelude::*;

fn urgency() -> impl Strategy<Value = Urgency> {
    prop_oneof![Just(Urgency::Low), Just(Urgency::Medium), Just(Urgency::High), Just(Urgency::Critical)]
}

fn specialty() -> impl Strategy<Value = Specialty> {
    prop_oneof![
        Just(Specialty::GeneralMedicine),
        Just(Specialty::Pediatrics),
        Just(Specialty::ObGyn),
        Just(Specialty::Orthopedics),
        Just(Specialty::Surgery),
    ]
}

fn roster() -> impl Strategy<Value = Vec<Physician>> {
    prop::collection::vec((specialty(), 0u32..12, any::<bool>()), 1..8).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (s, q, busy))| {
                let mut p = Physician::new(format!("PHY-{:02}", i + 1), s);
                p.queue_length = q;
                if busy {
                    p.state = PhysicianState::Busy;
                }
                p
            })
            .collect()
    })
}

fn entry(u: Urgency, acuity: u8, enqueue: f64) -> QueueEntry {
    let (d, _) = default_inputs().unwrap();
    QueueEntry::new(0, &d.patients[0], enqueue, u, acuity)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn priority_is_monotone(u in urgency(), acuity in 1u8..10, wait in 0.0f64..300.0, extra in 0.0f64..60.0, load in 0.0f64..=1.0) {
        let w = PriorityWeights::default();
        let base = priority(&entry(u, acuity, 0.0), wait, load, &w);
        if let Some(up) = u.next() {
            prop_assert!(priority(&entry(up, acuity, 0.0), wait, load, &w) >= base);
        }
        prop_assert!(priority(&entry(u, acuity + 1, 0.0), wait, load, &w) >= base);
        prop_assert!(priority(&entry(u, acuity, 0.0), wait + extra, load, &w) >= base);
    }

    #[test]
    fn wait_contribution_is_capped(wait in 0.0f64..10_000.0) {
        let w = PriorityWeights::default();
        let c = w.w_w * w.wait_factor(wait);
        prop_assert!(c <= 0.06 + 1e-15);
        if wait >= w.wait_horizon {
            prop_assert_eq!(w.wait_factor(wait), w.wait_factor(w.wait_horizon));
        }
    }

    #[test]
    fn assignment_score_in_unit_interval(r in roster(), req in specialty()) {
        for p in &r {
            let s = score_with(&AssignmentWeights::default(), p, req, &r).total;
            prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
        }
    }

    #[test]
    fn argmax_invariant_under_weight_scaling(r in roster(), req in specialty(), k in 0.01f64..100.0) {
        let w = AssignmentWeights::default();
        let scaled = AssignmentWeights { specialty: w.specialty * k, load: w.load * k, availability: w.availability * k };
        let a = Assigner::new(w).assign(req, &r, Sched::Agentic);
        let b = Assigner::new(scaled).assign(req, &r, Sched::Agentic);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn round_robin_is_fair(n in 0usize..500, req in specialty()) {
        let r = default_roster();
        let mut a = Assigner::new(AssignmentWeights::default());
        let mut counts = vec![0usize; r.len()];
        for _ in 0..n {
            counts[a.assign(req, &r, Sched::Fcfs)] += 1;
        }
        prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
    }

    #[test]
    fn drift_never_skips_or_exceeds_ceiling(u in urgency(), hist in any::<bool>(), seed in any::<u64>()) {
        let params =
            DriftParams { p_low: 1.0, p_medium: 1.0, p_high: 1.0, history_multiplier: 1.0, ..DriftParams::default() };
        let mut rng = stream(seed, Stream::Drift);
        match assess_drift(u, hist, &mut rng, &params) {
            Some(next) => {
                prop_assert_eq!(Some(next), u.next());
                prop_assert!(next <= params.ceiling);
            }
            None => prop_assert!(u >= params.ceiling),
        }
    }

    #[test]
    fn wilson_narrows_with_n(p in 0.05f64..0.95, n in 10u64..2000) {
        let s1 = (p * n as f64).round() as u64;
        let a = wilson_ci(s1, n, 1.96).unwrap();
        let b = wilson_ci(s1 * 4, n * 4, 1.96).unwrap();
        prop_assert!(b.hi - b.lo < a.hi - a.lo);
        prop_assert!(a.lo <= a.point && a.point <= a.hi);
    }

    #[test]
    fn welch_is_antisymmetric(
        a in prop::collection::vec(-100.0f64..100.0, 3..20),
        b in prop::collection::vec(-100.0f64..100.0, 3..20),
    ) {
        let x = welch_t("m", &a, &b).unwrap();
        let y = welch_t("m", &b, &a).unwrap();
        prop_assume!(!x.degenerate);
        prop_assert!((x.t_stat + y.t_stat).abs() < 1e-9);
        prop_assert!((x.cohens_d + y.cohens_d).abs() < 1e-9);
        prop_assert!((x.p_value - y.p_value).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&x.p_value));
    }

    #[test]
    fn dataset_invariants_hold_for_any_seed(seed in any::<u64>()) {
        let d = Dataset::generate(seed).unwrap();
        prop_assert_eq!(d.face_counts(), [13, 36, 158, 161]);
        prop_assert_eq!(d.history_count(), HISTORY_SIZE);
        for p in &d.patients {
            if let Some(h) = &p.history {
                prop_assert!(h.escalation_rule.target > p.face_urgency);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn summary_ignores_run_order(seed in 0u64..1000, rot in 1usize..5) {
        let (d, r) = default_inputs().unwrap();
        let runs = run_experiment(&StrategyConfig::new(Sched::Agentic), &d, &r, 5, seed).unwrap();
        let mut shuffled = runs.clone();
        shuffled.rotate_left(rot);
        shuffled.swap(0, 1);
        prop_assert_eq!(summarize("a", &runs).unwrap(), summarize("a", &shuffled).unwrap());
    }
}
