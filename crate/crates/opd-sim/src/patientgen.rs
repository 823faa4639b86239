//! Synthetic outpatient dataset: 368 patients with fixed face-value urgency
//! counts and a 120-record longitudinal history store.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SimError};
use crate::rng::{stream, Stream};
use crate::types::{Specialty, Urgency};

pub const DATASET_SIZE: usize = 368;
pub const HISTORY_SIZE: usize = 120;
pub const DATASET_VERSION: u32 = 1;
pub const DEFAULT_DATASET_SEED: u64 = 42;

/// Face-value urgency counts, identical for every seed.
pub const FACE_COUNTS: [(Urgency, usize); 4] =
    [(Urgency::Critical, 13), (Urgency::High, 36), (Urgency::Medium, 158), (Urgency::Low, 161)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgeBand {
    Pediatric,
    YoungAdult,
    Adult,
    MiddleAged,
    Elderly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gender {
    F,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Locality {
    Urban,
    SemiUrban,
    Rural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Language {
    Hindi,
    Bundeli,
    English,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Payment {
    AyushmanBharat,
    SelfPay,
    Other,
}

pub const AGE_MIX: [(AgeBand, f64); 5] = [
    (AgeBand::Pediatric, 0.15),
    (AgeBand::YoungAdult, 0.20),
    (AgeBand::Adult, 0.25),
    (AgeBand::MiddleAged, 0.22),
    (AgeBand::Elderly, 0.18),
];
pub const GENDER_MIX: [(Gender, f64); 2] = [(Gender::F, 0.62), (Gender::M, 0.38)];
pub const LOCALITY_MIX: [(Locality, f64); 3] =
    [(Locality::Urban, 0.45), (Locality::SemiUrban, 0.25), (Locality::Rural, 0.30)];
pub const LANGUAGE_MIX: [(Language, f64); 3] =
    [(Language::Hindi, 0.85), (Language::Bundeli, 0.10), (Language::English, 0.05)];
pub const PAYMENT_MIX: [(Payment, f64); 3] =
    [(Payment::AyushmanBharat, 0.35), (Payment::SelfPay, 0.40), (Payment::Other, 0.25)];

/// Specialty demand. General medicine carries the largest share; with the
/// default roster a uniformly random physician matches about a quarter of
/// patients.
pub const SPECIALTY_MIX: [(Specialty, f64); 5] = [
    (Specialty::GeneralMedicine, 0.35),
    (Specialty::Pediatrics, 0.1625),
    (Specialty::ObGyn, 0.1625),
    (Specialty::Orthopedics, 0.1625),
    (Specialty::Surgery, 0.1625),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    Diabetes,
    Hypertension,
    Copd,
    Ckd,
    Anaemia,
    HighRiskPregnancy,
    Tuberculosis,
    Ihd,
    SickleCell,
    Epilepsy,
    Cancer,
    LiverDisease,
    Sle,
}

/// Unique-patient count per condition in the history store.
pub const CONDITION_COUNTS: [(Condition, usize); 13] = [
    (Condition::Diabetes, 61),
    (Condition::Hypertension, 46),
    (Condition::Copd, 12),
    (Condition::Ckd, 12),
    (Condition::Anaemia, 11),
    (Condition::HighRiskPregnancy, 11),
    (Condition::Tuberculosis, 10),
    (Condition::Ihd, 5),
    (Condition::SickleCell, 5),
    (Condition::Epilepsy, 4),
    (Condition::Cancer, 3),
    (Condition::LiverDisease, 2),
    (Condition::Sle, 1),
];

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::Diabetes => "diabetes",
            Condition::Hypertension => "hypertension",
            Condition::Copd => "COPD",
            Condition::Ckd => "chronic kidney disease",
            Condition::Anaemia => "anaemia",
            Condition::HighRiskPregnancy => "high-risk pregnancy",
            Condition::Tuberculosis => "tuberculosis",
            Condition::Ihd => "ischaemic heart disease",
            Condition::SickleCell => "sickle cell disease",
            Condition::Epilepsy => "epilepsy",
            Condition::Cancer => "cancer",
            Condition::LiverDisease => "liver disease",
            Condition::Sle => "systemic lupus",
        }
    }

    fn medication(self) -> &'static str {
        match self {
            Condition::Diabetes => "Metformin",
            Condition::Hypertension => "Amlodipine",
            Condition::Copd => "Tiotropium inhaler",
            Condition::Ckd => "Furosemide",
            Condition::Anaemia => "Ferrous sulphate",
            Condition::HighRiskPregnancy => "Iron-folic acid",
            Condition::Tuberculosis => "Rifampicin-isoniazid",
            Condition::Ihd => "Atorvastatin",
            Condition::SickleCell => "Hydroxyurea",
            Condition::Epilepsy => "Levetiracetam",
            Condition::Cancer => "Capecitabine",
            Condition::LiverDisease => "Propranolol",
            Condition::Sle => "Mycophenolate mofetil",
        }
    }

    fn escalation_reason(self) -> &'static str {
        match self {
            Condition::Diabetes => "Diabetes on insulin/OHA: weakness may be DKA or hypoglycaemia",
            Condition::Hypertension => "Uncontrolled hypertension: headache may signal hypertensive urgency",
            Condition::Copd => "COPD with prior exacerbations: cough may herald acute decompensation",
            Condition::Ckd => "CKD: fatigue may reflect hyperkalaemia or uraemia",
            Condition::Anaemia => "Severe anaemia: dizziness may reflect haemodynamic compromise",
            Condition::HighRiskPregnancy => "High-risk pregnancy: abdominal symptoms need urgent obstetric review",
            Condition::Tuberculosis => "On anti-TB therapy: new symptoms may be drug hepatotoxicity",
            Condition::Ihd => "Known IHD: vague discomfort may be an anginal equivalent",
            Condition::SickleCell => "Sickle cell disease: pain may be an evolving crisis",
            Condition::Epilepsy => "Epilepsy: confusion may be post-ictal or non-convulsive status",
            Condition::Cancer => "On chemotherapy: fever may be neutropenic sepsis",
            Condition::LiverDisease => "Chronic liver disease: drowsiness may be encephalopathy",
            Condition::Sle => "Immunosuppressed (SLE): low-grade fever may be serious infection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscalationRule {
    pub target: Urgency,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub conditions: Vec<Condition>,
    pub medications: Vec<String>,
    pub allergies: Vec<String>,
    pub escalation_rule: EscalationRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patient {
    pub id: String,
    pub age_band: AgeBand,
    pub gender: Gender,
    pub locality: Locality,
    pub language: Language,
    pub payment: Payment,
    pub complaint: String,
    pub face_urgency: Urgency,
    pub face_acuity: u8,
    pub required_specialty: Specialty,
    /// Attached from the history store; serialized separately.
    #[serde(skip)]
    pub history: Option<HistoryRecord>,
}

impl Patient {
    /// The class the patient's condition actually warrants: face value, or the
    /// history rule's target when one exists.
    pub fn true_urgency(&self) -> Urgency {
        match &self.history {
            Some(h) => h.escalation_rule.target.max(self.face_urgency),
            None => self.face_urgency,
        }
    }
}

/// A presentation from the representative memory-escalation examples. These
/// seven patients are always present, always face-value Low, and always carry
/// the listed history.
#[derive(Debug, Clone, Copy)]
pub struct Archetype {
    pub complaint: &'static str,
    pub age_band: AgeBand,
    pub gender: Gender,
    pub specialty: Specialty,
    pub target: Urgency,
    pub condition: Condition,
    pub reason: &'static str,
    pub medications: &'static [&'static str],
    pub allergies: &'static [&'static str],
}

pub const ARCHETYPES: [Archetype; 7] = [
    Archetype {
        complaint: "Mild headache, dizziness",
        age_band: AgeBand::Elderly,
        gender: Gender::M,
        specialty: Specialty::GeneralMedicine,
        target: Urgency::Critical,
        condition: Condition::Hypertension,
        reason: "TIA 6 months ago: stroke warning",
        medications: &["Aspirin", "Amlodipine"],
        allergies: &[],
    },
    Archetype {
        complaint: "Minor bruising, bleeding",
        age_band: AgeBand::MiddleAged,
        gender: Gender::F,
        specialty: Specialty::GeneralMedicine,
        target: Urgency::Critical,
        condition: Condition::Ihd,
        reason: "On Warfarin: possible hemorrhage",
        medications: &["Warfarin"],
        allergies: &[],
    },
    Archetype {
        complaint: "Nausea, weakness",
        age_band: AgeBand::MiddleAged,
        gender: Gender::M,
        specialty: Specialty::GeneralMedicine,
        target: Urgency::High,
        condition: Condition::Ckd,
        reason: "CKD Stage 3: hyperkalemia risk",
        medications: &["Furosemide"],
        allergies: &[],
    },
    Archetype {
        complaint: "Mild abdominal pain",
        age_band: AgeBand::Adult,
        gender: Gender::F,
        specialty: Specialty::ObGyn,
        target: Urgency::Critical,
        condition: Condition::HighRiskPregnancy,
        reason: "High-risk pregnancy + prev. cesarean",
        medications: &["Iron-folic acid"],
        allergies: &[],
    },
    Archetype {
        complaint: "Cough, mild fever",
        age_band: AgeBand::Elderly,
        gender: Gender::M,
        specialty: Specialty::GeneralMedicine,
        target: Urgency::High,
        condition: Condition::Copd,
        reason: "Severe COPD, ICU admission history",
        medications: &["Tiotropium inhaler"],
        allergies: &[],
    },
    Archetype {
        complaint: "Drowsy, confused",
        age_band: AgeBand::YoungAdult,
        gender: Gender::M,
        specialty: Specialty::GeneralMedicine,
        target: Urgency::High,
        condition: Condition::Epilepsy,
        reason: "Status epilepticus + Phenytoin allergy",
        medications: &["Levetiracetam"],
        allergies: &["Phenytoin"],
    },
    Archetype {
        complaint: "Low-grade fever",
        age_band: AgeBand::MiddleAged,
        gender: Gender::F,
        specialty: Specialty::GeneralMedicine,
        target: Urgency::High,
        condition: Condition::Sle,
        reason: "Immunosuppressed (SLE on MMF)",
        medications: &["Mycophenolate mofetil"],
        allergies: &[],
    },
];

/// How the 120 history records split by face-value urgency and escalation
/// target. The seven archetypes are part of the Low rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryMix {
    pub high_to_critical: usize,
    pub medium_to_high: usize,
    pub low_to_critical: usize,
    pub low_to_high: usize,
    pub low_to_medium: usize,
}

impl Default for HistoryMix {
    fn default() -> Self {
        HistoryMix { high_to_critical: 7, medium_to_high: 31, low_to_critical: 9, low_to_high: 50, low_to_medium: 23 }
    }
}

impl HistoryMix {
    pub fn total(&self) -> usize {
        self.high_to_critical + self.medium_to_high + self.low_to_critical + self.low_to_high + self.low_to_medium
    }
}

const COMPLAINTS: &[(Urgency, Specialty, &[&str])] = &[
    (
        Urgency::Critical,
        Specialty::GeneralMedicine,
        &["Crushing chest pain radiating to left arm", "Sudden breathlessness, cold sweat"],
    ),
    (
        Urgency::Critical,
        Specialty::Pediatrics,
        &["Child unresponsive after high fever", "Infant with severe dehydration, lethargy"],
    ),
    (Urgency::Critical, Specialty::ObGyn, &["Heavy vaginal bleeding in pregnancy", "Seizure in late pregnancy"]),
    (Urgency::Critical, Specialty::Orthopedics, &["Open fracture with heavy bleeding", "Crush injury to pelvis"]),
    (Urgency::Critical, Specialty::Surgery, &["Rigid abdomen, vomiting blood", "Deep stab wound to abdomen"]),
    (Urgency::High, Specialty::GeneralMedicine, &["High fever with rigors", "Palpitations and fainting episode"]),
    (
        Urgency::High,
        Specialty::Pediatrics,
        &["Child with fast breathing and chest indrawing", "Toddler with persistent vomiting"],
    ),
    (Urgency::High, Specialty::ObGyn, &["Reduced fetal movements", "Severe pelvic pain"]),
    (Urgency::High, Specialty::Orthopedics, &["Suspected hip fracture after fall", "Dislocated shoulder"]),
    (Urgency::High, Specialty::Surgery, &["Right lower abdominal pain, fever", "Painful swollen groin lump"]),
    (Urgency::Medium, Specialty::GeneralMedicine, &["Fever for three days", "Burning urination", "Persistent cough"]),
    (Urgency::Medium, Specialty::Pediatrics, &["Child with ear pain and fever", "Diarrhoea for two days"]),
    (Urgency::Medium, Specialty::ObGyn, &["Irregular bleeding", "Antenatal check with swelling of feet"]),
    (Urgency::Medium, Specialty::Orthopedics, &["Swollen ankle after twist", "Low back pain radiating to leg"]),
    (Urgency::Medium, Specialty::Surgery, &["Infected wound on foot", "Painful boil on thigh"]),
    (Urgency::Low, Specialty::GeneralMedicine, &["Prescription refill", "Routine BP check", "Mild cold"]),
    (Urgency::Low, Specialty::Pediatrics, &["Vaccination visit", "Mild skin rash"]),
    (Urgency::Low, Specialty::ObGyn, &["Routine antenatal visit", "Contraception advice"]),
    (Urgency::Low, Specialty::Orthopedics, &["Chronic knee pain", "Plaster check"]),
    (Urgency::Low, Specialty::Surgery, &["Suture removal", "Small painless lump"]),
];

fn complaint_for(rng: &mut ChaCha8Rng, urgency: Urgency, specialty: Specialty) -> String {
    let list = COMPLAINTS
        .iter()
        .find(|(u, s, _)| *u == urgency && *s == specialty)
        .map(|(_, _, l)| *l)
        .expect("catalog covers every urgency/specialty pair");
    list.choose(rng).expect("non-empty catalog entry").to_string()
}

/// Integer counts that sum to `total` and follow `weights` (largest remainder).
pub fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let raw: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut left = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for i in order {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

fn pool<T: Copy>(mix: &[(T, f64)], rng: &mut ChaCha8Rng) -> Vec<T> {
    let weights: Vec<f64> = mix.iter().map(|(_, w)| *w).collect();
    let counts = apportion(DATASET_SIZE, &weights);
    let mut out = Vec::with_capacity(DATASET_SIZE);
    for ((value, _), n) in mix.iter().zip(counts) {
        out.extend(std::iter::repeat_n(*value, n));
    }
    out.shuffle(rng);
    out
}

/// Swap values in `slots` so that position `at` holds `want`, taking it from a
/// position not in `locked`. Marginal counts are unchanged.
fn swap_into<T: Copy + PartialEq>(slots: &mut [T], at: usize, want: T, locked: &BTreeSet<usize>) {
    if slots[at] == want {
        return;
    }
    let from = (0..slots.len())
        .find(|i| *i != at && !locked.contains(i) && slots[*i] == want)
        .expect("marginal pool holds the archetype value");
    slots.swap(at, from);
}

/// Generate the 368-patient dataset for `seed` (no history attached).
pub fn generate_dataset(seed: u64) -> Vec<Patient> {
    let mut rng = stream(seed, Stream::Dataset);

    let mut urgencies: Vec<Urgency> = FACE_COUNTS.iter().flat_map(|(u, n)| std::iter::repeat_n(*u, *n)).collect();
    urgencies.shuffle(&mut rng);

    let mut ages = pool(&AGE_MIX, &mut rng);
    let mut genders = pool(&GENDER_MIX, &mut rng);
    let localities = pool(&LOCALITY_MIX, &mut rng);
    let languages = pool(&LANGUAGE_MIX, &mut rng);
    let payments = pool(&PAYMENT_MIX, &mut rng);
    let mut specialties = pool(&SPECIALTY_MIX, &mut rng);

    // Archetypes take the first seven Low slots in shuffled order.
    let archetype_slots: Vec<usize> =
        (0..DATASET_SIZE).filter(|&i| urgencies[i] == Urgency::Low).take(ARCHETYPES.len()).collect();
    let locked: BTreeSet<usize> = archetype_slots.iter().copied().collect();
    for (slot, a) in archetype_slots.iter().zip(ARCHETYPES.iter()) {
        swap_into(&mut ages, *slot, a.age_band, &locked);
        swap_into(&mut genders, *slot, a.gender, &locked);
        swap_into(&mut specialties, *slot, a.specialty, &locked);
    }

    // Obstetric demand only from women; children go to pediatrics when they
    // can. Both fix-ups swap, so marginals stay exact.
    for i in 0..DATASET_SIZE {
        if locked.contains(&i) {
            continue;
        }
        if specialties[i] == Specialty::ObGyn && genders[i] == Gender::M {
            if let Some(j) = (0..DATASET_SIZE).find(|&j| {
                !locked.contains(&j)
                    && genders[j] == Gender::F
                    && specialties[j] != Specialty::ObGyn
                    && ages[j] != AgeBand::Pediatric
            }) {
                specialties.swap(i, j);
            }
        }
    }
    for i in 0..DATASET_SIZE {
        if locked.contains(&i) || ages[i] != AgeBand::Pediatric || specialties[i] == Specialty::Pediatrics {
            continue;
        }
        if let Some(j) = (0..DATASET_SIZE).find(|&j| {
            !locked.contains(&j)
                && specialties[j] == Specialty::Pediatrics
                && ages[j] != AgeBand::Pediatric
                && (specialties[i] != Specialty::ObGyn || genders[j] == Gender::F)
        }) {
            specialties.swap(i, j);
        }
    }

    let mut patients = Vec::with_capacity(DATASET_SIZE);
    for i in 0..DATASET_SIZE {
        let urgency = urgencies[i];
        let band = urgency.acuity_band();
        let acuity = rng.random_range(band);
        let complaint = match archetype_slots.iter().position(|s| *s == i) {
            Some(k) => ARCHETYPES[k].complaint.to_string(),
            None => complaint_for(&mut rng, urgency, specialties[i]),
        };
        patients.push(Patient {
            id: format!("OPD-{:03}", i + 1),
            age_band: ages[i],
            gender: genders[i],
            locality: localities[i],
            language: languages[i],
            payment: payments[i],
            complaint,
            face_urgency: urgency,
            face_acuity: acuity,
            required_specialty: specialties[i],
            history: None,
        });
    }
    patients
}

fn archetype_of(p: &Patient) -> Option<&'static Archetype> {
    if p.face_urgency != Urgency::Low {
        return None;
    }
    ARCHETYPES.iter().find(|a| a.complaint == p.complaint)
}

fn pregnancy_eligible(p: &Patient) -> bool {
    p.gender == Gender::F && matches!(p.age_band, AgeBand::YoungAdult | AgeBand::Adult)
}

/// Build the history store with the default [`HistoryMix`].
pub fn generate_history_store(patients: &[Patient], seed: u64) -> Result<BTreeMap<String, HistoryRecord>> {
    generate_history_store_with(patients, seed, HistoryMix::default())
}

pub fn generate_history_store_with(
    patients: &[Patient],
    seed: u64,
    mix: HistoryMix,
) -> Result<BTreeMap<String, HistoryRecord>> {
    if mix.total() != HISTORY_SIZE {
        return Err(SimError::Generation(format!("history mix sums to {}, expected {HISTORY_SIZE}", mix.total())));
    }
    let mut rng = stream(seed, Stream::History);
    let eligible = |p: &Patient| p.face_urgency != Urgency::Critical && p.age_band != AgeBand::Pediatric;

    let archetypes: Vec<usize> = (0..patients.len()).filter(|&i| archetype_of(&patients[i]).is_some()).collect();
    if archetypes.len() != ARCHETYPES.len() {
        return Err(SimError::Generation(format!(
            "expected {} archetype presentations, found {}",
            ARCHETYPES.len(),
            archetypes.len()
        )));
    }
    let arch_critical =
        archetypes.iter().filter(|&&i| archetype_of(&patients[i]).unwrap().target == Urgency::Critical).count();
    let arch_high = archetypes.len() - arch_critical;
    if mix.low_to_critical < arch_critical || mix.low_to_high < arch_high {
        return Err(SimError::Generation("history mix leaves no room for the archetypes".into()));
    }

    let pick = |face: Urgency, n: usize, rng: &mut ChaCha8Rng| -> Result<Vec<usize>> {
        let mut c: Vec<usize> = (0..patients.len())
            .filter(|&i| patients[i].face_urgency == face && eligible(&patients[i]) && !archetypes.contains(&i))
            .collect();
        if c.len() < n {
            return Err(SimError::Generation(format!(
                "only {} eligible {face} patients for {n} history records",
                c.len()
            )));
        }
        c.shuffle(rng);
        c.truncate(n);
        Ok(c)
    };

    let mut targets: BTreeMap<usize, Urgency> = BTreeMap::new();
    for i in pick(Urgency::High, mix.high_to_critical, &mut rng)? {
        targets.insert(i, Urgency::Critical);
    }
    for i in pick(Urgency::Medium, mix.medium_to_high, &mut rng)? {
        targets.insert(i, Urgency::High);
    }
    let extra_critical = mix.low_to_critical - arch_critical;
    let extra_high = mix.low_to_high - arch_high;
    let lows = pick(Urgency::Low, extra_critical + extra_high + mix.low_to_medium, &mut rng)?;
    for (k, &i) in lows.iter().enumerate() {
        let t = if k < extra_critical {
            Urgency::Critical
        } else if k < extra_critical + mix.low_to_medium {
            Urgency::Medium
        } else {
            Urgency::High
        };
        targets.insert(i, t);
    }
    for &i in &archetypes {
        targets.insert(i, archetype_of(&patients[i]).unwrap().target);
    }
    debug_assert_eq!(targets.len(), HISTORY_SIZE);

    // Conditions: archetypes first, then pregnancy (restricted), then the rest
    // in descending prevalence, always preferring patients with no tag yet.
    let chosen: Vec<usize> = targets.keys().copied().collect();
    let mut tags: BTreeMap<usize, Vec<Condition>> = chosen.iter().map(|&i| (i, Vec::new())).collect();
    for &i in &archetypes {
        tags.get_mut(&i).unwrap().push(archetype_of(&patients[i]).unwrap().condition);
    }
    let mut order: Vec<(Condition, usize)> = CONDITION_COUNTS.to_vec();
    order.sort_by_key(|(c, n)| (*c != Condition::HighRiskPregnancy, std::cmp::Reverse(*n)));
    for (cond, count) in order {
        let have = tags.values().filter(|t| t.contains(&cond)).count();
        let need = count.checked_sub(have).ok_or_else(|| SimError::Generation(format!("too many {}", cond.label())))?;
        let mut cands: Vec<usize> = chosen
            .iter()
            .copied()
            .filter(|i| !tags[i].contains(&cond))
            .filter(|&i| cond != Condition::HighRiskPregnancy || pregnancy_eligible(&patients[i]))
            .collect();
        cands.shuffle(&mut rng);
        cands.sort_by_key(|i| !tags[i].is_empty());
        if cands.len() < need {
            return Err(SimError::Generation(format!("not enough eligible patients for {}", cond.label())));
        }
        for &i in cands.iter().take(need) {
            tags.get_mut(&i).unwrap().push(cond);
        }
    }
    if let Some((i, _)) = tags.iter().find(|(_, t)| t.is_empty()) {
        return Err(SimError::Generation(format!("{} received no condition", patients[*i].id)));
    }

    const ALLERGENS: [&str; 4] = ["Penicillin", "Sulfonamides", "NSAIDs", "Iodinated contrast"];
    let mut store = BTreeMap::new();
    for &i in &chosen {
        let p = &patients[i];
        let conditions = tags[&i].clone();
        let (reason, medications, allergies) = match archetype_of(p) {
            Some(a) => (
                a.reason.to_string(),
                a.medications.iter().map(|s| s.to_string()).collect(),
                a.allergies.iter().map(|s| s.to_string()).collect(),
            ),
            None => {
                let meds = conditions.iter().map(|c| c.medication().to_string()).collect();
                let allergies = if rng.random_bool(0.08) {
                    vec![ALLERGENS.choose(&mut rng).unwrap().to_string()]
                } else {
                    Vec::new()
                };
                (conditions[0].escalation_reason().to_string(), meds, allergies)
            }
        };
        store.insert(
            p.id.clone(),
            HistoryRecord {
                conditions,
                medications,
                allergies,
                escalation_rule: EscalationRule { target: targets[&i], reason },
            },
        );
    }
    Ok(store)
}

/// Patients plus history store, as written to and read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub version: u32,
    pub patients: Vec<Patient>,
    pub history: BTreeMap<String, HistoryRecord>,
}

impl Dataset {
    pub fn generate(seed: u64) -> Result<Dataset> {
        let patients = generate_dataset(seed);
        let history = generate_history_store(&patients, seed)?;
        Dataset::from_parts(patients, history)
    }

    pub fn from_parts(patients: Vec<Patient>, history: BTreeMap<String, HistoryRecord>) -> Result<Dataset> {
        let mut ds = Dataset { version: DATASET_VERSION, patients, history };
        ds.attach_history();
        ds.validate()?;
        Ok(ds)
    }

    fn attach_history(&mut self) {
        for p in &mut self.patients {
            p.history = self.history.get(&p.id).cloned();
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != DATASET_VERSION {
            return Err(SimError::SchemaVersion { found: self.version, expected: DATASET_VERSION });
        }
        if self.patients.len() != DATASET_SIZE {
            return Err(invalid(format!("dataset has {} patients, expected {DATASET_SIZE}", self.patients.len())));
        }
        let ids: BTreeSet<&str> = self.patients.iter().map(|p| p.id.as_str()).collect();
        if ids.len() != self.patients.len() {
            return Err(invalid("duplicate patient ids"));
        }
        for p in &self.patients {
            if !p.face_urgency.acuity_band().contains(&p.face_acuity) {
                return Err(invalid(format!("{}: acuity {} outside the {} band", p.id, p.face_acuity, p.face_urgency)));
            }
        }
        for (u, n) in FACE_COUNTS {
            let got = self.patients.iter().filter(|p| p.face_urgency == u).count();
            if got != n {
                return Err(invalid(format!("{got} {u} patients, expected {n}")));
            }
        }
        if self.history.len() != HISTORY_SIZE {
            return Err(invalid(format!("{} history records, expected {HISTORY_SIZE}", self.history.len())));
        }
        for (id, rec) in &self.history {
            let p = self
                .patients
                .iter()
                .find(|p| &p.id == id)
                .ok_or_else(|| invalid(format!("history record for unknown patient {id}")))?;
            if rec.escalation_rule.target <= p.face_urgency {
                return Err(invalid(format!(
                    "{id}: escalation target {} is not above face urgency {}",
                    rec.escalation_rule.target, p.face_urgency
                )));
            }
            if rec.escalation_rule.reason.trim().is_empty() {
                return Err(invalid(format!("{id}: escalation rule has no reason")));
            }
        }
        Ok(())
    }

    pub fn history_count(&self) -> usize {
        self.patients.iter().filter(|p| p.history.is_some()).count()
    }

    pub fn face_counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for p in &self.patients {
            c[p.face_urgency.report_index()] += 1;
        }
        c
    }

    pub fn condition_count(&self, cond: Condition) -> usize {
        self.history.values().filter(|r| r.conditions.contains(&cond)).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Dataset> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if version != DATASET_VERSION {
            return Err(SimError::SchemaVersion { found: version, expected: DATASET_VERSION });
        }
        let mut ds: Dataset = serde_json::from_value(value)?;
        ds.attach_history();
        ds.validate()?;
        Ok(ds)
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        crate::manifest::fingerprint(self)
    }
}

pub fn export_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    fs::write(path, dataset.to_json()?)?;
    Ok(())
}

pub fn import_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    Dataset::from_json(&text)
}
