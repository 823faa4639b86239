//! Multi-run summaries and the comparison tables built from them.

use serde::{Deserialize, Serialize};

use crate::engine::SessionMetrics;
use crate::error::{invalid, Result};
use crate::stats::{self, MeanStd};
use crate::types::Urgency;

pub const QUANTILE_METHOD: &str = "linear interpolation (type 7)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub label: String,
    pub n_runs: usize,
    pub avg_wait: Option<MeanStd>,
    pub median_wait: Option<MeanStd>,
    pub p95_wait: Option<MeanStd>,
    pub throughput: MeanStd,
    /// Percent.
    pub specialty_match: Option<MeanStd>,
    pub drifts: MeanStd,
    pub memory_escalations: MeanStd,
    /// Mean wait by final effective class, report order.
    pub wait_by_urgency: [Option<MeanStd>; 4],
    pub critical_per_session: MeanStd,
    pub composition: [f64; 4],
    /// Pooled counts across runs.
    pub critical_served: usize,
    pub critical_within_10: usize,
    pub critical_within_15: usize,
    pub pct_critical_within_10: Option<f64>,
    pub pct_critical_within_15: Option<f64>,
    /// Mean wait of critical patients per run, for significance tests.
    pub critical_wait: Option<MeanStd>,
}

fn collect(runs: &[SessionMetrics], f: impl Fn(&SessionMetrics) -> Option<f64>) -> Option<MeanStd> {
    let v: Vec<f64> = runs.iter().filter_map(f).collect();
    MeanStd::of(&v)
}

fn collect_all(runs: &[SessionMetrics], f: impl Fn(&SessionMetrics) -> f64) -> MeanStd {
    collect(runs, |m| Some(f(m))).expect("non-empty run list")
}

/// Mean critical wait of one run.
pub fn run_critical_wait(m: &SessionMetrics) -> Option<f64> {
    m.wait_by_urgency[Urgency::Critical.report_index()]
}

pub fn summarize(label: &str, runs: &[SessionMetrics]) -> Result<StrategySummary> {
    if runs.is_empty() {
        return Err(invalid("summarize needs at least one run"));
    }
    let mut wait_by_urgency = [None; 4];
    for (k, slot) in wait_by_urgency.iter_mut().enumerate() {
        *slot = collect(runs, |m| m.wait_by_urgency[k]);
    }
    let mut composition = [0.0; 4];
    for (k, slot) in composition.iter_mut().enumerate() {
        *slot = collect_all(runs, |m| m.final_composition[k] as f64).mean;
    }
    let critical_served: usize = runs.iter().map(|m| m.critical_served).sum();
    let c10: usize = runs.iter().map(|m| m.critical_within_10).sum();
    let c15: usize = runs.iter().map(|m| m.critical_within_15).sum();
    let pct = |k: usize| (critical_served > 0).then(|| 100.0 * k as f64 / critical_served as f64);
    Ok(StrategySummary {
        label: label.to_string(),
        n_runs: runs.len(),
        avg_wait: collect(runs, |m| m.avg_wait),
        median_wait: collect(runs, |m| m.median_wait),
        p95_wait: collect(runs, |m| m.p95_wait),
        throughput: collect_all(runs, |m| m.throughput_per_hour),
        specialty_match: collect(runs, |m| m.specialty_match_rate.map(|r| 100.0 * r)),
        drifts: collect_all(runs, |m| m.drift_event_count as f64),
        memory_escalations: collect_all(runs, |m| m.memory_escalation_count as f64),
        wait_by_urgency,
        critical_per_session: collect_all(runs, |m| m.critical_count_effective as f64),
        composition,
        critical_served,
        critical_within_10: c10,
        critical_within_15: c15,
        pct_critical_within_10: pct(c10),
        pct_critical_within_15: pct(c15),
        critical_wait: collect(runs, run_critical_wait),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("### {}\n\n", self.title);
        s.push_str(&format!("| {} |\n", self.headers.join(" | ")));
        let align: Vec<&str> = (0..self.headers.len()).map(|i| if i == 0 { ":--" } else { "--:" }).collect();
        s.push_str(&format!("|{}|\n", align.join("|")));
        for r in &self.rows {
            s.push_str(&format!("| {} |\n", r.join(" | ")));
        }
        for n in &self.notes {
            s.push_str(&format!("\n_{n}_\n"));
        }
        s
    }
}

fn ms(x: Option<MeanStd>) -> String {
    match x {
        Some(m) => format!("{:.1}±{:.1}", m.mean, m.std),
        None => "n/a".into(),
    }
}

fn one(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.1}")).unwrap_or_else(|| "n/a".into())
}

fn signed(x: Option<f64>) -> String {
    x.map(|v| format!("{v:+.1}")).unwrap_or_else(|| "n/a".into())
}

fn headers(first: &str, s: &[StrategySummary]) -> Vec<String> {
    std::iter::once(first.to_string()).chain(s.iter().map(|x| x.label.clone())).collect()
}

/// Overall waits, throughput, specialty match and drift counts.
pub fn performance_table(s: &[StrategySummary]) -> Table {
    let row = |name: &str, f: &dyn Fn(&StrategySummary) -> String| -> Vec<String> {
        std::iter::once(name.to_string()).chain(s.iter().map(f)).collect()
    };
    Table {
        title: "Comparative performance metrics (mean ± std)".into(),
        headers: headers("Metric", s),
        rows: vec![
            row("Avg Wait (min)", &|x| ms(x.avg_wait)),
            row("Median Wait (min)", &|x| ms(x.median_wait)),
            row("P95 Wait (min)", &|x| ms(x.p95_wait)),
            row("Throughput (pts/hr)", &|x| ms(Some(x.throughput))),
            row("Specialty Match (%)", &|x| ms(x.specialty_match)),
            row("Drifts Detected", &|x| ms(Some(x.drifts))),
        ],
        notes: vec![format!("Quantiles: {QUANTILE_METHOD}. Runs: {}.", run_counts(s))],
    }
}

fn run_counts(s: &[StrategySummary]) -> String {
    s.iter().map(|x| x.n_runs.to_string()).collect::<Vec<_>>().join("/")
}

/// Wait by urgency class. With three or more columns, the last column is
/// compared against each of the others.
pub fn urgency_wait_table(s: &[StrategySummary]) -> Table {
    let mut h = headers("Urgency", s);
    let last = s.len().saturating_sub(1);
    if s.len() >= 2 {
        for other in &s[..last] {
            h.push(format!("{} vs {}", s[last].label, other.label));
        }
    }
    let rows = Urgency::ALL
        .iter()
        .map(|u| {
            let k = u.report_index();
            let mut r = vec![u.label().to_string()];
            r.extend(s.iter().map(|x| ms(x.wait_by_urgency[k])));
            if s.len() >= 2 {
                for other in &s[..last] {
                    let d = s[last].wait_by_urgency[k].zip(other.wait_by_urgency[k]).map(|(a, b)| a.mean - b.mean);
                    r.push(signed(d));
                }
            }
            r
        })
        .collect();
    Table {
        title: "Average wait time by urgency level (minutes, mean ± std)".into(),
        headers: h,
        rows,
        notes: vec!["Grouped by final effective urgency.".into()],
    }
}

pub fn critical_table(s: &[StrategySummary]) -> Table {
    let row = |name: &str, f: &dyn Fn(&StrategySummary) -> String| -> Vec<String> {
        std::iter::once(name.to_string()).chain(s.iter().map(f)).collect()
    };
    Table {
        title: "Critical patient timeliness".into(),
        headers: headers("Metric", s),
        rows: vec![
            row("Critical <10 min (%)", &|x| one(x.pct_critical_within_10)),
            row("Critical <15 min (%)", &|x| one(x.pct_critical_within_15)),
            row("Mean critical/session", &|x| format!("{:.1}", x.critical_per_session.mean)),
            row("Critical served (count)", &|x| x.critical_served.to_string()),
            row("Critical <10 min (count)", &|x| x.critical_within_10.to_string()),
            row("Critical <15 min (count)", &|x| x.critical_within_15.to_string()),
        ],
        notes: vec!["Percentages pool counts across runs.".into()],
    }
}

pub fn composition_table(s: &[StrategySummary]) -> Table {
    let rows = Urgency::ALL
        .iter()
        .map(|u| {
            let mut r = vec![u.label().to_string()];
            r.extend(s.iter().map(|x| format!("{:.1}", x.composition[u.report_index()])));
            r
        })
        .collect();
    Table {
        title: "Final urgency composition (mean patients per session)".into(),
        headers: headers("Urgency", s),
        rows,
        notes: Vec::new(),
    }
}

/// One row per variant.
pub fn ablation_table(s: &[StrategySummary]) -> Table {
    Table {
        title: "Ablation study: component contributions".into(),
        headers: ["Variant", "Avg Wait", "Crit Wait", "Drifts", "Crit/Sess"].map(String::from).to_vec(),
        rows: s
            .iter()
            .map(|x| {
                vec![
                    x.label.clone(),
                    one(x.avg_wait.map(|m| m.mean)),
                    one(x.critical_wait.map(|m| m.mean)),
                    format!("{:.1}", x.drifts.mean),
                    format!("{:.1}", x.critical_per_session.mean),
                ]
            })
            .collect(),
        notes: vec![format!("Runs per variant: {}.", run_counts(s))],
    }
}

/// Extract a per-run metric by name for significance testing.
pub fn metric_series(runs: &[SessionMetrics], metric: &str) -> Result<Vec<f64>> {
    let f: fn(&SessionMetrics) -> Option<f64> = match metric {
        "avg-wait" => |m| m.avg_wait,
        "median-wait" => |m| m.median_wait,
        "p95-wait" => |m| m.p95_wait,
        "critical-wait" => run_critical_wait,
        "low-wait" => |m| m.wait_by_urgency[Urgency::Low.report_index()],
        "throughput" => |m| Some(m.throughput_per_hour),
        "specialty-match" => |m| m.specialty_match_rate,
        "drifts" => |m| Some(m.drift_event_count as f64),
        "critical-count" => |m| Some(m.critical_count_effective as f64),
        other => return Err(invalid(format!("unknown metric `{other}`"))),
    };
    Ok(runs.iter().filter_map(f).collect())
}

pub const METRICS: [&str; 9] = [
    "avg-wait",
    "median-wait",
    "p95-wait",
    "critical-wait",
    "low-wait",
    "throughput",
    "specialty-match",
    "drifts",
    "critical-count",
];

/// Welch comparison of one metric between two experiments.
pub fn compare_metric(metric: &str, a: &[SessionMetrics], b: &[SessionMetrics]) -> Result<stats::ComparisonResult> {
    stats::welch_t(metric, &metric_series(a, metric)?, &metric_series(b, metric)?)
}

pub fn comparison_table(label_a: &str, label_b: &str, rows: &[stats::ComparisonResult]) -> Table {
    Table {
        title: format!("{label_a} vs {label_b} (Welch's t-test, two-sided)"),
        headers: ["Metric", "Mean A", "Std A", "n A", "Mean B", "Std B", "n B", "t", "df", "p", "Cohen's d"]
            .map(String::from)
            .to_vec(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.metric.clone(),
                    format!("{:.3}", r.group_a.mean),
                    format!("{:.3}", r.group_a.std),
                    r.group_a.n.to_string(),
                    format!("{:.3}", r.group_b.mean),
                    format!("{:.3}", r.group_b.std),
                    r.group_b.n.to_string(),
                    format!("{:.3}", r.t_stat),
                    format!("{:.2}", r.df),
                    format!("{:.3e}", r.p_value),
                    format!("{:.3}", r.cohens_d),
                ]
            })
            .collect(),
        notes: vec!["Cohen's d uses the pooled standard deviation.".into()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_experiment, StrategyConfig};
    use crate::types::Strategy;

    fn runs(n: usize) -> Vec<SessionMetrics> {
        let (d, r) = crate::engine::default_inputs().unwrap();
        run_experiment(&StrategyConfig::new(Strategy::Agentic), &d, &r, n, 500).unwrap()
    }

    #[test]
    fn single_run_has_zero_std() {
        let s = summarize("x", &runs(1)).unwrap();
        assert_eq!(s.throughput.std, 0.0);
        assert_eq!(s.drifts.std, 0.0);
        assert_eq!(s.n_runs, 1);
    }

    #[test]
    fn empty_input_errors() {
        assert!(summarize("x", &[]).is_err());
    }

    #[test]
    fn tables_render() {
        let s = summarize("Agentic AI", &runs(2)).unwrap();
        let t = performance_table(&[s.clone(), s.clone(), s.clone()]);
        assert_eq!(t.rows.len(), 6);
        assert!(t.to_csv().unwrap().starts_with("Metric,Agentic AI"));
        assert!(t.to_markdown().contains("| Avg Wait (min) |"));
        let u = urgency_wait_table(&[s.clone(), s.clone(), s]);
        assert_eq!(u.headers.len(), 6);
        assert_eq!(u.rows[0][4], "+0.0");
    }

    #[test]
    fn unknown_metric_errors() {
        assert!(metric_series(&runs(1), "happiness").is_err());
        for m in METRICS {
            assert!(metric_series(&runs(1), m).is_ok());
        }
    }
}
