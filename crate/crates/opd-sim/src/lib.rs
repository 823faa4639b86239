//! Discrete-event simulation of a high-volume outpatient department.
//!
//! Patients arrive over a six-hour session, register at a bank of desks, wait
//! in a queue and see one of six physicians. Three queueing strategies are
//! modelled: token-order FCFS, static rule-based triage, and an agentic
//! triage system that re-prioritises the queue every few minutes, detects
//! deterioration while patients wait, and escalates patients whose history
//! hides a more serious condition.
//!
//! ```
//! use opd_sim::{engine, Strategy, StrategyConfig};
//!
//! let (dataset, roster) = engine::default_inputs()?;
//! let cfg = StrategyConfig::new(Strategy::Agentic).with_seed(7);
//! let run = engine::run_session(&cfg, &dataset, &roster)?;
//! assert_eq!(run.metrics.served_count + run.metrics.unserved_count, 368);
//! # Ok::<(), opd_sim::SimError>(())
//! ```

pub mod arrivals;
pub mod assignment;
pub mod engine;
pub mod error;
pub mod export;
pub mod manifest;
pub mod patientgen;
pub mod queue;
pub mod report;
pub mod rng;
pub mod stats;
pub mod triage;
pub mod types;

pub use engine::{run_session, SessionMetrics, StrategyConfig};
pub use error::{Result, SimError};
pub use patientgen::Dataset;
pub use types::{Specialty, Strategy, Urgency};
