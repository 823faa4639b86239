use std::fs;
use std::path::{Path, PathBuf};

use opd_sim::assignment::{default_roster, roster_from_entries, Physician, RosterEntry};
use opd_sim::engine::{run_session, seed_ladder, AblationVariant, SessionMetrics, StrategyConfig};
use opd_sim::export::{read_metrics_jsonl, write_escalations_csv, write_metrics_jsonl, write_trace_csv};
use opd_sim::manifest::RunManifest;
use opd_sim::patientgen::{import_dataset, Dataset, DEFAULT_DATASET_SEED};
use opd_sim::report::{
    ablation_table, compare_metric, comparison_table, composition_table, critical_table, performance_table, summarize,
    urgency_wait_table, StrategySummary, Table, METRICS,
};
use opd_sim::{Strategy, Urgency};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use crate::fail::{emit, io_err, parse_json, write_atomic, CliResult, Failure};
use crate::{AblationArgs, CalibrateArgs, CompareArgs, ExperimentArgs, GenerateArgs, Inputs, RunArgs, StrategySet};

struct Loaded {
    base: StrategyConfig,
    dataset: Dataset,
    roster: Vec<Physician>,
}

fn load(inputs: &Inputs) -> CliResult<Loaded> {
    let base = match &inputs.config {
        Some(p) => parse_json::<StrategyConfig>(p)?,
        None => StrategyConfig::default(),
    };
    base.validate()?;
    let dataset = match &inputs.dataset {
        Some(p) => import_dataset(p).map_err(|e| match Failure::from(e) {
            Failure::Validation(m) => Failure::Validation(format!("{}: {m}", p.display())),
            Failure::Io(m) => Failure::Io(format!("{}: {m}", p.display())),
            other => other,
        })?,
        None => Dataset::generate(DEFAULT_DATASET_SEED)?,
    };
    let roster = match &inputs.roster {
        Some(p) => roster_from_entries(&parse_json::<Vec<RosterEntry>>(p)?)?,
        None => default_roster(),
    };
    Ok(Loaded { base, dataset, roster })
}

/// Apply the strategy and the disabling flags on top of the file config.
fn configure(base: &StrategyConfig, strategy: Strategy, no_memory: bool, no_drift: bool) -> StrategyConfig {
    if strategy != Strategy::Agentic && (no_memory || no_drift) {
        eprintln!(
            "warning: {} never reassesses the queue; --no-memory/--no-drift are redundant and ignored",
            strategy.label()
        );
    }
    let mut c = StrategyConfig { strategy, ..base.clone() };
    if no_memory {
        c.memory_enabled = false;
    }
    if no_drift {
        c.drift_enabled = false;
    }
    c.normalized()
}

fn label(cfg: &StrategyConfig) -> String {
    if cfg.strategy != Strategy::Agentic {
        return cfg.strategy.label().to_string();
    }
    match AblationVariant::ALL.iter().find(|v| v.flags() == (cfg.memory_enabled, cfg.drift_enabled)) {
        Some(AblationVariant::Full) | None => cfg.strategy.label().to_string(),
        Some(v) => format!("{} ({})", cfg.strategy.label(), v.label()),
    }
}

fn slug(cfg: &StrategyConfig) -> String {
    if cfg.strategy != Strategy::Agentic {
        return cfg.strategy.slug().to_string();
    }
    match AblationVariant::ALL.iter().find(|v| v.flags() == (cfg.memory_enabled, cfg.drift_enabled)) {
        Some(AblationVariant::Full) | None => cfg.strategy.slug().to_string(),
        Some(v) => format!("agentic-{}", v.slug()),
    }
}

fn pool(jobs: usize) -> CliResult<ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Failure::Validation(e.to_string()))
}

fn ladder(base_seed: u64, runs: usize) -> CliResult<Vec<u64>> {
    if runs == 0 {
        return Err(Failure::Validation("--runs must be at least 1".into()));
    }
    Ok(seed_ladder(base_seed, runs))
}

/// Runs in parallel; results come back in seed order regardless of `jobs`.
fn run_many(cfg: &StrategyConfig, l: &Loaded, seeds: &[u64], pool: &ThreadPool) -> CliResult<Vec<SessionMetrics>> {
    let out: Result<Vec<_>, _> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&s| run_session(&cfg.clone().with_seed(s), &l.dataset, &l.roster).map(|o| o.metrics))
            .collect()
    });
    Ok(out?)
}

fn pretty<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn write_run_set(dir: &Path, slug: &str, manifest: &RunManifest, runs: &[SessionMetrics]) -> CliResult {
    let mut buf = Vec::new();
    write_metrics_jsonl(runs, &mut buf)?;
    write_atomic(&dir.join(format!("{slug}.jsonl")), &buf)?;
    write_atomic(&dir.join(format!("{slug}.manifest.json")), &pretty(manifest))
}

/// Report header line: the manifest hash plus the calibration constants.
fn header(manifest: &RunManifest) -> String {
    let d = &manifest.config.drift;
    format!(
        "manifest {}; kappa {}; p_history_escalation {}",
        manifest.manifest_hash, d.history_multiplier, d.p_history_escalation
    )
}

fn csv_with_header(t: &Table, header: &str) -> CliResult<String> {
    Ok(format!("# {header}\n{}", t.to_csv()?))
}

fn markdown_with_header(t: &Table, header: &str) -> String {
    format!("{}\n_{header}_\n", t.to_markdown())
}

fn emit_tables(dir: &Path, tables: &[(&str, Table)], header: &str, markdown: bool) -> CliResult {
    for (name, t) in tables {
        write_atomic(&dir.join(format!("{name}.csv")), csv_with_header(t, header)?.as_bytes())?;
        if markdown {
            let md = markdown_with_header(t, header);
            write_atomic(&dir.join(format!("{name}.md")), md.as_bytes())?;
            emit(&format!("{md}\n"));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    manifest_hash: &'a str,
    summaries: &'a [StrategySummary],
}

pub fn generate(a: GenerateArgs) -> CliResult {
    let d = Dataset::generate(a.seed)?;
    write_atomic(&a.out, d.to_json()?.as_bytes())?;
    let c = d.face_counts();
    let classes: Vec<String> = Urgency::ALL.iter().zip(c).map(|(u, n)| format!("{} {n}", u.label())).collect();
    emit(&format!(
        "wrote {} patients ({} with history) to {}\nface urgency: {}\nfingerprint {}\n",
        d.patients.len(),
        d.history_count(),
        a.out.display(),
        classes.join(", "),
        d.fingerprint()
    ));
    Ok(())
}

pub fn run(a: RunArgs) -> CliResult {
    let l = load(&a.inputs)?;
    let cfg = configure(&l.base, a.strategy.into(), a.no_memory, a.no_drift).with_seed(a.seed);
    let out = run_session(&cfg, &l.dataset, &l.roster)?;
    let json = pretty(&out.metrics);
    match &a.out {
        Some(p) => write_atomic(p, &json)?,
        None => emit(&String::from_utf8(json).expect("JSON is UTF-8")),
    }
    if let Some(p) = &a.trace {
        let mut buf = Vec::new();
        write_trace_csv(&out.trace, &mut buf)?;
        write_atomic(p, &buf)?;
    }
    if let Some(p) = &a.escalations {
        let mut buf = Vec::new();
        write_escalations_csv(&out.escalations, &mut buf)?;
        write_atomic(p, &buf)?;
    }
    Ok(())
}

pub fn experiment(a: ExperimentArgs) -> CliResult {
    let l = load(&a.inputs)?;
    let seeds = ladder(a.base_seed, a.runs)?;
    let pool = pool(a.jobs)?;
    let strategies: Vec<Strategy> = match a.strategy {
        StrategySet::Fcfs => vec![Strategy::Fcfs],
        StrategySet::RuleBased => vec![Strategy::RuleBased],
        StrategySet::Agentic => vec![Strategy::Agentic],
        StrategySet::All => Strategy::ALL.to_vec(),
    };
    let mut summaries = Vec::new();
    let mut first: Option<RunManifest> = None;
    for s in strategies {
        let cfg = configure(&l.base, s, a.no_memory, a.no_drift);
        let manifest = RunManifest::new(&cfg, &l.dataset, &l.roster, seeds.clone());
        let runs = run_many(&cfg, &l, &seeds, &pool)?;
        write_run_set(&a.out_dir, &slug(&cfg), &manifest, &runs)?;
        summaries.push(summarize(&label(&cfg), &runs)?);
        first.get_or_insert(manifest);
    }
    let manifest = first.expect("at least one strategy");
    let head = header(&manifest);
    let tables = [
        ("performance", performance_table(&summaries)),
        ("urgency_waits", urgency_wait_table(&summaries)),
        ("critical", critical_table(&summaries)),
        ("composition", composition_table(&summaries)),
    ];
    emit_tables(&a.out_dir, &tables, &head, a.markdown)?;
    let summary = SummaryFile { manifest_hash: &manifest.manifest_hash, summaries: &summaries };
    write_atomic(&a.out_dir.join("summary.json"), &pretty(&summary))?;
    if !a.markdown {
        emit(&csv_with_header(&tables[0].1, &head)?);
    }
    eprintln!("wrote {} run(s) per strategy to {}", seeds.len(), a.out_dir.display());
    Ok(())
}

pub fn ablation(a: AblationArgs) -> CliResult {
    let l = load(&a.inputs)?;
    let seeds = ladder(a.base_seed, a.runs)?;
    let pool = pool(a.jobs)?;
    let base = StrategyConfig { strategy: Strategy::Agentic, ..l.base.clone() };
    let mut summaries = Vec::new();
    let mut first: Option<RunManifest> = None;
    for v in AblationVariant::ALL {
        let cfg = v.config(&base);
        let manifest = RunManifest::new(&cfg, &l.dataset, &l.roster, seeds.clone());
        let runs = run_many(&cfg, &l, &seeds, &pool)?;
        write_run_set(&a.out_dir, v.slug(), &manifest, &runs)?;
        summaries.push(summarize(v.label(), &runs)?);
        first.get_or_insert(manifest);
    }
    let manifest = first.expect("four variants");
    let head = header(&manifest);
    let table = ablation_table(&summaries);
    emit_tables(&a.out_dir, &[("ablation", table.clone())], &head, a.markdown)?;
    let summary = SummaryFile { manifest_hash: &manifest.manifest_hash, summaries: &summaries };
    write_atomic(&a.out_dir.join("summary.json"), &pretty(&summary))?;
    if !a.markdown {
        emit(&csv_with_header(&table, &head)?);
    }
    Ok(())
}

/// A run set is a `.jsonl` file with a `.manifest.json` sibling; a
/// directory stands for the single run set inside it.
fn resolve_run_set(path: &Path) -> CliResult<(PathBuf, PathBuf)> {
    let jsonl = if path.is_dir() {
        let mut found: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| io_err(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        found.sort();
        match found.len() {
            1 => found.remove(0),
            0 => return Err(Failure::Validation(format!("{}: no .jsonl run set", path.display()))),
            n => {
                return Err(Failure::Validation(format!(
                    "{}: {n} run sets; name the .jsonl file to compare",
                    path.display()
                )))
            }
        }
    } else {
        path.to_path_buf()
    };
    let stem = jsonl.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
    let manifest = jsonl.with_file_name(format!("{stem}.manifest.json"));
    Ok((jsonl, manifest))
}

fn load_run_set(path: &Path) -> CliResult<(RunManifest, Vec<SessionMetrics>)> {
    let (jsonl, mpath) = resolve_run_set(path)?;
    let manifest: RunManifest = parse_json(&mpath)?;
    if !manifest.is_intact() {
        return Err(Failure::Validation(format!("{}: manifest hash does not match its contents", mpath.display())));
    }
    let file = fs::File::open(&jsonl).map_err(|e| io_err(&jsonl, e))?;
    let runs = read_metrics_jsonl(std::io::BufReader::new(file))?;
    if runs.len() != manifest.seeds.len() {
        return Err(Failure::Validation(format!(
            "{}: {} runs but the manifest lists {} seeds",
            jsonl.display(),
            runs.len(),
            manifest.seeds.len()
        )));
    }
    Ok((manifest, runs))
}

pub fn compare(a: CompareArgs) -> CliResult {
    let metrics: Vec<&str> = if a.metric == "all" {
        METRICS.to_vec()
    } else if let Some(m) = METRICS.iter().find(|m| **m == a.metric) {
        vec![*m]
    } else {
        return Err(Failure::Usage(format!(
            "unknown metric `{}` (expected all or one of {})",
            a.metric,
            METRICS.join(", ")
        )));
    };
    let (ma, ra) = load_run_set(&a.a)?;
    let (mb, rb) = load_run_set(&a.b)?;
    if ma.manifest_hash != mb.manifest_hash {
        return Err(Failure::Validation(format!(
            "run sets come from different inputs (manifest {} vs {})",
            ma.manifest_hash, mb.manifest_hash
        )));
    }
    if ra.len() != rb.len() {
        return Err(Failure::Validation(format!("run counts differ: {} vs {}", ra.len(), rb.len())));
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for m in metrics {
        match compare_metric(m, &ra, &rb) {
            Ok(r) => rows.push(r),
            Err(_) => skipped.push(m),
        }
    }
    let mut table = comparison_table(&label(&ma.config), &label(&mb.config), &rows);
    if !skipped.is_empty() {
        table.notes.push(format!("Skipped (fewer than two values per side): {}.", skipped.join(", ")));
    }
    let head = header(&ma);
    let text = if a.markdown { markdown_with_header(&table, &head) } else { csv_with_header(&table, &head)? };
    if let Some(p) = &a.out {
        write_atomic(p, text.as_bytes())?;
    }
    emit(&text);
    Ok(())
}

#[derive(Serialize)]
struct Fragment {
    drift: opd_sim::triage::DriftParams,
}

pub fn calibrate(a: CalibrateArgs) -> CliResult {
    if a.kappa.is_empty() || a.p_hist.is_empty() {
        return Err(Failure::Validation("empty calibration grid".into()));
    }
    if a.target_drifts <= 0.0 || a.target_crit <= 0.0 {
        return Err(Failure::Validation("targets must be positive".into()));
    }
    let l = load(&a.inputs)?;
    let seeds = ladder(a.base_seed, a.runs)?;
    let pool = pool(a.jobs)?;
    let base =
        StrategyConfig { strategy: Strategy::Agentic, memory_enabled: true, drift_enabled: true, ..l.base.clone() };

    let mut cells = Vec::new();
    for &k in &a.kappa {
        for &p in &a.p_hist {
            let mut cfg = base.clone();
            cfg.drift.history_multiplier = k;
            cfg.drift.p_history_escalation = p;
            cfg.validate()?;
            let runs = run_many(&cfg, &l, &seeds, &pool)?;
            let s = summarize("cell", &runs)?;
            let (d, c) = (s.drifts.mean, s.critical_per_session.mean);
            let dist = (d - a.target_drifts).abs() / a.target_drifts + (c - a.target_crit).abs() / a.target_crit;
            cells.push((k, p, d, c, dist, cfg.drift));
        }
    }
    let best = cells
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .4.total_cmp(&y.1 .4).then(x.0.cmp(&y.0)))
        .map(|(i, _)| i)
        .expect("non-empty grid");

    let table = Table {
        title: format!(
            "Calibration grid ({} runs per cell, targets: {} drifts, {} critical/session)",
            seeds.len(),
            a.target_drifts,
            a.target_crit
        ),
        headers: ["kappa", "p_history_escalation", "Drifts", "Crit/Sess", "Distance", "Chosen"]
            .map(String::from)
            .to_vec(),
        rows: cells
            .iter()
            .enumerate()
            .map(|(i, (k, p, d, c, dist, _))| {
                vec![
                    k.to_string(),
                    p.to_string(),
                    format!("{d:.1}"),
                    format!("{c:.2}"),
                    format!("{dist:.4}"),
                    if i == best { "*".into() } else { String::new() },
                ]
            })
            .collect(),
        notes: vec!["Distance = |drifts − target| / target + |critical − target| / target.".into()],
    };
    if a.markdown {
        emit(&format!("{}\n", table.to_markdown()));
    } else {
        emit(&table.to_csv()?);
    }
    let chosen = cells[best].5;
    write_atomic(&a.out, &pretty(&Fragment { drift: chosen }))?;
    eprintln!(
        "chosen kappa {} and p_history_escalation {}; wrote {}",
        chosen.history_multiplier,
        chosen.p_history_escalation,
        a.out.display()
    );
    Ok(())
}
