use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Clinical urgency class. Variants are ordered from least to most urgent so
/// that `a > b` reads as "a is more urgent than b".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Urgency {
    Low,
    Medium,
    High,
    Critical,
}

impl Urgency {
    /// Report order: most urgent first.
    pub const ALL: [Urgency; 4] = [Urgency::Critical, Urgency::High, Urgency::Medium, Urgency::Low];

    /// Urgency score `U` used by the priority formula.
    pub fn score(self) -> f64 {
        match self {
            Urgency::Critical => 1.0,
            Urgency::High => 0.75,
            Urgency::Medium => 0.50,
            Urgency::Low => 0.25,
        }
    }

    pub fn acuity_band(self) -> RangeInclusive<u8> {
        match self {
            Urgency::Critical => 9..=10,
            Urgency::High => 7..=8,
            Urgency::Medium => 4..=6,
            Urgency::Low => 1..=3,
        }
    }

    /// Acuity assigned after an escalation into this class.
    pub fn band_midpoint(self) -> u8 {
        match self {
            Urgency::Critical => 9,
            Urgency::High => 7,
            Urgency::Medium => 5,
            Urgency::Low => 2,
        }
    }

    pub fn next(self) -> Option<Urgency> {
        match self {
            Urgency::Low => Some(Urgency::Medium),
            Urgency::Medium => Some(Urgency::High),
            Urgency::High => Some(Urgency::Critical),
            Urgency::Critical => None,
        }
    }

    /// Position in report order (Critical = 0 ... Low = 3).
    pub fn report_index(self) -> usize {
        match self {
            Urgency::Critical => 0,
            Urgency::High => 1,
            Urgency::Medium => 2,
            Urgency::Low => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Urgency::Critical => "Critical",
            Urgency::High => "High",
            Urgency::Medium => "Medium",
            Urgency::Low => "Low",
        }
    }
}

impl fmt::Display for Urgency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Specialty {
    GeneralMedicine,
    Pediatrics,
    ObGyn,
    Orthopedics,
    Surgery,
}

impl Specialty {
    pub const ALL: [Specialty; 5] = [
        Specialty::GeneralMedicine,
        Specialty::Pediatrics,
        Specialty::ObGyn,
        Specialty::Orthopedics,
        Specialty::Surgery,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Fcfs,
    RuleBased,
    Agentic,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Fcfs, Strategy::RuleBased, Strategy::Agentic];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Fcfs => "FCFS",
            Strategy::RuleBased => "Rule-Based",
            Strategy::Agentic => "Agentic AI",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Strategy::Fcfs => "fcfs",
            Strategy::RuleBased => "rule-based",
            Strategy::Agentic => "agentic",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fcfs" | "token" => Ok(Strategy::Fcfs),
            "rule-based" | "rule" | "rulebased" | "rb" => Ok(Strategy::RuleBased),
            "agentic" | "ai" => Ok(Strategy::Agentic),
            other => Err(format!("unknown strategy `{other}` (expected fcfs, rule-based or agentic)")),
        }
    }
}
