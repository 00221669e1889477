//! Repeated-trial benchmark harness: runs the solver many times per
//! instance across a worker pool, aggregates solve counts, times, and
//! gaps, and renders the result as an aligned table or csv.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use crate::ga::{evolve, ConfigError, GaConfig};
use crate::instance::Instance;
use crate::oracle::percent_gap;
use crate::util::fmt_num;

/// One solver run within a benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub instance: String,
    pub trial: usize,
    pub seed: u64,
    pub best_value: f64,
    /// True iff the instance's optimum is known and this trial reached it.
    pub solved_exactly: bool,
    pub elapsed: Duration,
    pub generation_found: usize,
}

/// What the reported gap is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapReference {
    /// The instance's known optimum.
    Optimum,
    /// The Lagrangian dual bound; used when no optimum is known.
    Bound,
}

impl GapReference {
    fn label(self) -> &'static str {
        match self {
            GapReference::Optimum => "optimum",
            GapReference::Bound => "bound",
        }
    }
}

/// Aggregated result for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub solved: usize,
    pub mean_seconds: f64,
    /// Best value over all trials.
    pub best_value: f64,
    /// The value the gap is measured against.
    pub reference: f64,
    pub gap_percent: f64,
    pub gap_reference: GapReference,
}

/// A row either aggregated cleanly or failed with a diagnostic; failures
/// never abort the other instances.
#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Done(BenchRow),
    Failed { instance: String, message: String },
}

/// Full benchmark outcome: one row per instance in input order, plus
/// every per-trial record for verbose output.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub base_seed: u64,
    pub trials: usize,
    pub rows: Vec<RowOutcome>,
    pub records: Vec<TrialRecord>,
}

/// Output shape for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
}

/// Runs `trials` independent solver runs per instance, trial `t` seeded
/// with `config.seed + t`, spread over `workers` threads. Seeds derive
/// only from the base seed and trial index, and records are aggregated in
/// deterministic order, so the worker count cannot change any result.
pub fn run_benchmark(
    instances: &[Instance],
    config: &GaConfig,
    trials: usize,
    workers: usize,
) -> Result<BenchReport, ConfigError> {
    assert!(trials >= 1, "need at least one trial");
    assert!(workers >= 1, "need at least one worker");
    config.validate()?;

    struct Job {
        instance_idx: usize,
        trial: usize,
    }
    let jobs: Vec<Job> = (0..instances.len())
        .flat_map(|instance_idx| (0..trials).map(move |trial| Job { instance_idx, trial }))
        .collect();

    // One slot per job; workers race on the cursor, never on a slot.
    let results: Mutex<Vec<Option<(TrialRecord, f64)>>> = Mutex::new(vec![None; jobs.len()]);
    let cursor = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..workers.min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let at = cursor.fetch_add(1, Ordering::Relaxed);
                if at >= jobs.len() {
                    break;
                }
                let job = &jobs[at];
                let instance = &instances[job.instance_idx];
                let trial_config = GaConfig {
                    seed: config.seed.wrapping_add(job.trial as u64),
                    ..config.clone()
                };
                let result = evolve(instance, &trial_config)
                    .expect("config was validated before the run");
                let record = TrialRecord {
                    instance: instance.name().to_string(),
                    trial: job.trial,
                    seed: trial_config.seed,
                    best_value: result.best.value(),
                    solved_exactly: instance
                        .known_optimum()
                        .is_some_and(|opt| result.best.value() >= opt),
                    elapsed: result.elapsed,
                    generation_found: result.generation_found,
                };
                results.lock().unwrap()[at] = Some((record, result.upper_bound));
            });
        }
    });

    let results = results.into_inner().unwrap();
    let mut rows = Vec::with_capacity(instances.len());
    let mut records = Vec::with_capacity(jobs.len());
    for (instance_idx, instance) in instances.iter().enumerate() {
        let slots = &results[instance_idx * trials..(instance_idx + 1) * trials];
        let mut upper_bound = f64::INFINITY;
        let mut instance_records = Vec::with_capacity(trials);
        for slot in slots {
            let (record, bound) = slot.clone().expect("every job ran");
            upper_bound = bound;
            instance_records.push(record);
        }
        rows.push(aggregate_row(instance, &instance_records, upper_bound));
        records.extend(instance_records);
    }

    Ok(BenchReport { base_seed: config.seed, trials, rows, records })
}

fn aggregate_row(instance: &Instance, records: &[TrialRecord], upper_bound: f64) -> RowOutcome {
    let trials = records.len();
    let solved = records.iter().filter(|r| r.solved_exactly).count();
    let mean_seconds =
        records.iter().map(|r| r.elapsed.as_secs_f64()).sum::<f64>() / trials as f64;
    let best_value = records
        .iter()
        .map(|r| r.best_value)
        .fold(f64::NEG_INFINITY, f64::max);
    let (reference, gap_reference) = match instance.known_optimum() {
        Some(opt) => (opt, GapReference::Optimum),
        None => (upper_bound, GapReference::Bound),
    };
    match percent_gap(best_value, reference) {
        Ok(gap_percent) => RowOutcome::Done(BenchRow {
            instance: instance.name().to_string(),
            m: instance.m(),
            n: instance.n(),
            trials,
            solved,
            mean_seconds,
            best_value,
            reference,
            gap_percent,
            gap_reference,
        }),
        Err(err) => RowOutcome::Failed {
            instance: instance.name().to_string(),
            message: err.to_string(),
        },
    }
}

/// Renders the aggregated report. Csv rows follow the header
/// `instance,m,n,trials,solved,mean_seconds,best_value,reference,gap_percent,gap_reference`
/// with times as seconds to three decimals; failed instances become `#`
/// comment lines. The table form is for eyes, not parsers.
pub fn emit_report(report: &BenchReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Table => emit_table(report),
    }
}

fn emit_csv(report: &BenchReport) -> String {
    let mut out = String::from(
        "instance,m,n,trials,solved,mean_seconds,best_value,reference,gap_percent,gap_reference\n",
    );
    for row in &report.rows {
        match row {
            RowOutcome::Done(r) => {
                out.push_str(&format!(
                    "{},{},{},{},{},{:.3},{},{},{},{}\n",
                    r.instance,
                    r.m,
                    r.n,
                    r.trials,
                    r.solved,
                    r.mean_seconds,
                    fmt_num(r.best_value),
                    fmt_num(r.reference),
                    fmt_num(r.gap_percent),
                    r.gap_reference.label(),
                ));
            }
            RowOutcome::Failed { instance, message } => {
                out.push_str(&format!("# {instance} failed: {message}\n"));
            }
        }
    }
    out
}

fn emit_table(report: &BenchReport) -> String {
    let header = ["Instance", "m", "n", "Solved", "Time (mean s)", "% gap", "Seed"];
    let mut cells: Vec<[String; 7]> = Vec::with_capacity(report.rows.len());
    for row in &report.rows {
        match row {
            RowOutcome::Done(r) => {
                let gap = match r.gap_reference {
                    GapReference::Optimum => fmt_num(r.gap_percent),
                    GapReference::Bound => format!("{} (vs bound)", fmt_num(r.gap_percent)),
                };
                cells.push([
                    r.instance.clone(),
                    r.m.to_string(),
                    r.n.to_string(),
                    format!("{}/{}", r.solved, r.trials),
                    format!("{:.3}", r.mean_seconds),
                    gap,
                    report.base_seed.to_string(),
                ]);
            }
            RowOutcome::Failed { instance, message } => {
                cells.push([
                    instance.clone(),
                    "-".into(),
                    "-".into(),
                    "-".into(),
                    "-".into(),
                    format!("FAILED: {message}"),
                    report.base_seed.to_string(),
                ]);
            }
        }
    }
    let mut widths = [0usize; 7];
    for (k, h) in header.iter().enumerate() {
        widths[k] = h.len();
    }
    for row in &cells {
        for (k, cell) in row.iter().enumerate() {
            widths[k] = widths[k].max(cell.len());
        }
    }
    let render = |row: &[String]| -> String {
        row.iter()
            .enumerate()
            .map(|(k, cell)| format!("{:<width$}", cell, width = widths[k]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let header_row: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    let mut out = render(&header_row);
    out.push('\n');
    for row in &cells {
        out.push_str(&render(row));
        out.push('\n');
    }
    out
}

/// Per-trial csv for verbose inspection: one line per run with its seed,
/// value, and timing.
pub fn emit_trials_csv(report: &BenchReport) -> String {
    let mut out = String::from("instance,trial,seed,best_value,solved,seconds,generation_found\n");
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{},{},{:.3},{}\n",
            r.instance,
            r.trial,
            r.seed,
            fmt_num(r.best_value),
            r.solved_exactly,
            r.elapsed.as_secs_f64(),
            r.generation_found,
        ));
    }
    out
}
