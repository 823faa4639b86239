//! CSV and JSON-lines writers for traces, escalation logs and run metrics.

use std::io::{BufRead, Write};

use crate::engine::{SessionMetrics, TraceRecord};
use crate::error::Result;
use crate::queue::{Escalation, EscalationCause};

fn minutes(t: f64) -> String {
    format!("{t:.6}")
}

/// Columns: time, kind, patient, physician.
pub fn write_trace_csv<W: Write>(trace: &[TraceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "kind", "patient", "physician"])?;
    for r in trace {
        w.write_record([
            minutes(r.time),
            r.kind.label().to_string(),
            r.patient.clone().unwrap_or_default(),
            r.physician.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns: time, patient_id, from, to, cause.
pub fn write_escalations_csv<W: Write>(log: &[Escalation], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "patient_id", "from", "to", "cause"])?;
    for e in log {
        let cause = match e.cause {
            EscalationCause::Drift => "drift",
            EscalationCause::Memory => "memory",
        };
        w.write_record([minutes(e.time), e.patient_id.clone(), e.from.to_string(), e.to.to_string(), cause.into()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_csv_string(trace: &[TraceRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn write_metrics_jsonl<W: Write>(runs: &[SessionMetrics], mut out: W) -> Result<()> {
    for m in runs {
        serde_json::to_writer(&mut out, m)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_metrics_jsonl<R: BufRead>(input: R) -> Result<Vec<SessionMetrics>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
