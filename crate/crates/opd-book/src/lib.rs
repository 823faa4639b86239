//! The guide in `book/`, compiled here so its code listings run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/arrivals.md")]
pub mod arrivals {}

#[doc = include_str!("../../../book/src/triage.md")]
pub mod triage {}

#[doc = include_str!("../../../book/src/scoring.md")]
pub mod scoring {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
