//! Run manifests. Reports embed a manifest hash so that experiments run on
//! different inputs are never compared by accident.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arrivals::IntensityProfile;
use crate::assignment::{roster_entries, AssignmentWeights, Physician};
use crate::engine::{ConsultBasis, ConsultParams, ServiceTime, StrategyConfig};
use crate::patientgen::Dataset;
use crate::queue::PriorityWeights;
use crate::triage::DriftParams;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of a value's JSON encoding.
pub fn fingerprint<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable value");
    hex::encode(Sha256::digest(&bytes))
}

pub fn fingerprint_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: StrategyConfig,
    pub dataset_fingerprint: String,
    pub roster_fingerprint: String,
    pub profile_fingerprint: String,
    pub code_version: String,
    pub seeds: Vec<u64>,
    /// Simulated session window in minutes.
    pub session_window: (f64, f64),
    pub manifest_hash: String,
}

/// The parts of a configuration that must agree for two experiments to be
/// comparable. Strategy and ablation flags are what a comparison varies, so
/// they are left out.
#[derive(Serialize)]
struct ComparableKey<'a> {
    dataset: &'a str,
    roster: &'a str,
    profile: &'a str,
    code_version: &'a str,
    seeds: &'a [u64],
    registration: ServiceTime,
    agentic_registration: ServiceTime,
    reg_desks: usize,
    consult: ConsultParams,
    consult_basis: ConsultBasis,
    session_length: f64,
    drift: DriftParams,
    priority: PriorityWeights,
    assignment: AssignmentWeights,
}

impl RunManifest {
    pub fn new(config: &StrategyConfig, dataset: &Dataset, roster: &[Physician], seeds: Vec<u64>) -> RunManifest {
        let mut m = RunManifest {
            config: config.clone(),
            dataset_fingerprint: dataset.fingerprint(),
            roster_fingerprint: fingerprint(&roster_entries(roster)),
            profile_fingerprint: profile_fingerprint(&config.profile),
            code_version: CODE_VERSION.to_string(),
            seeds,
            session_window: (0.0, config.session_length),
            manifest_hash: String::new(),
        };
        m.manifest_hash = m.compute_hash();
        m
    }

    pub fn compute_hash(&self) -> String {
        let c = &self.config;
        fingerprint(&ComparableKey {
            dataset: &self.dataset_fingerprint,
            roster: &self.roster_fingerprint,
            profile: &self.profile_fingerprint,
            code_version: &self.code_version,
            seeds: &self.seeds,
            registration: c.registration,
            agentic_registration: c.agentic_registration,
            reg_desks: c.reg_desks,
            consult: c.consult,
            consult_basis: c.consult_basis,
            session_length: c.session_length,
            drift: c.drift,
            priority: c.priority,
            assignment: c.assignment,
        })
    }

    /// True when the stored hash matches the manifest's contents.
    pub fn is_intact(&self) -> bool {
        self.manifest_hash == self.compute_hash()
    }
}

pub fn profile_fingerprint(p: &IntensityProfile) -> String {
    fingerprint(p)
}
