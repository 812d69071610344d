//! Command implementations behind the `clinic-diagnose` binary: validate an
//! export, diagnose every provider-day, and write the aggregate reports.
//!
//! Every output file is written to a temporary file in the target directory
//! and renamed into place. File names and ordering depend only on
//! `(provider_id, date)`, so identical inputs produce byte-identical outputs.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnosis::{brute_force_diagnose, diagnose, DiagnosisError};
use crate::ingest::{parse_csv_path, preprocess, IngestError, Preprocessed, DEFAULT_MIN_PATIENTS};
use crate::model::{Minutes, ProviderDay};
use crate::report::{
    export_gantt, write_date_csv, write_exclusions_csv, write_half_csv, write_provider_csv,
    DatasetReport, DiagnosedDay, ExcludedDay,
};

/// Exit status for a clean run.
pub const EXIT_OK: i32 = 0;
/// Exit status for I/O, schema and configuration failures.
pub const EXIT_FATAL: i32 = 1;
/// Exit status when validation found problems in the data.
pub const EXIT_FINDINGS: i32 = 2;

/// Days up to this size are cross-checked when the oracle check is on.
pub const ORACLE_MAX_APPOINTMENTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReportKind {
    Provider,
    Date,
    Half,
    Gantt,
}

impl ReportKind {
    pub const ALL: [ReportKind; 4] = [
        ReportKind::Provider,
        ReportKind::Date,
        ReportKind::Half,
        ReportKind::Gantt,
    ];
}

impl FromStr for ReportKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "provider" => Ok(ReportKind::Provider),
            "date" => Ok(ReportKind::Date),
            "half" => Ok(ReportKind::Half),
            "gantt" => Ok(ReportKind::Gantt),
            other => Err(format!(
                "unknown report {other:?} (expected provider, date, half or gantt)"
            )),
        }
    }
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportKind::Provider => "provider",
            ReportKind::Date => "date",
            ReportKind::Half => "half",
            ReportKind::Gantt => "gantt",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub output_dir: PathBuf,
    pub epsilon: Minutes,
    pub min_patients: usize,
    pub oracle_check: bool,
    pub reports: BTreeSet<ReportKind>,
}

impl RunConfig {
    pub fn new(input_path: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input_path: input_path.into(),
            output_dir: output_dir.into(),
            epsilon: 0,
            min_patients: DEFAULT_MIN_PATIENTS,
            oracle_check: false,
            reports: ReportKind::ALL.into_iter().collect(),
        }
    }

    pub fn check(&self) -> Result<(), CliError> {
        if self.epsilon < 0 {
            return Err(CliError::Config(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if self.min_patients < 1 {
            return Err(CliError::Config("min-patients must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_FATAL
    }
}

fn load(config: &RunConfig) -> Result<(usize, Preprocessed), CliError> {
    config.check()?;
    let records = parse_csv_path(&config.input_path).map_err(|source| CliError::Input {
        path: config.input_path.clone(),
        source,
    })?;
    let pre = preprocess(&records, config.min_patients);
    Ok((records.len(), pre))
}

/// Findings from [`cmd_validate`].
#[derive(Debug)]
pub struct ValidationSummary {
    pub rows: usize,
    pub days: usize,
    pub violations: usize,
    /// Human-readable findings, one per line.
    pub lines: Vec<String>,
}

impl ValidationSummary {
    pub fn exit_code(&self) -> i32 {
        if self.violations == 0 {
            EXIT_OK
        } else {
            EXIT_FINDINGS
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} rows, {} provider-days, {} violations",
            self.rows, self.days, self.violations
        );
        out
    }
}

/// Parses and preprocesses the input without diagnosing it.
pub fn cmd_validate(config: &RunConfig) -> Result<ValidationSummary, CliError> {
    let (rows, pre) = load(config)?;
    let mut lines = Vec::new();
    for f in &pre.row_findings {
        lines.push(format!(
            "violation: row {} ({} {}): {}",
            f.row, f.provider_id, f.date, f.error
        ));
    }
    for f in &pre.day_findings {
        lines.push(format!("violation: {} {}: {}", f.provider_id, f.date, f.problem));
    }
    for s in &pre.splits {
        lines.push(format!(
            "info: {} {}: appointments {} and {} overlapped in [{}, {}], split at {}",
            s.provider_id,
            s.date,
            s.split.earlier,
            s.split.later,
            s.split.overlap_start,
            s.split.overlap_end,
            s.split.boundary
        ));
    }
    for (provider, date, n) in &pre.too_small {
        lines.push(format!(
            "info: {provider} {date}: {n} appointments, below minimum of {}",
            config.min_patients
        ));
    }
    Ok(ValidationSummary {
        rows,
        days: pre.days.len(),
        violations: pre.violation_count(),
        lines,
    })
}

/// Whether the exact solver agreed with exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleSummary {
    pub checked_days: usize,
    pub mismatches: usize,
}

impl OracleSummary {
    pub fn status(&self) -> &'static str {
        if self.mismatches == 0 {
            "agree"
        } else {
            "disagree"
        }
    }
}

/// Diagnoses of every provider-day in an input file.
#[derive(Debug)]
pub struct DiagnosisRun {
    pub rows: usize,
    pub preprocessed: Preprocessed,
    pub diagnosed: Vec<DiagnosedDay>,
    pub excluded: Vec<ExcludedDay>,
    pub oracle: Option<OracleSummary>,
}

/// Diagnoses days in parallel; results keep the input order.
pub fn diagnose_days(days: &[ProviderDay], epsilon: Minutes) -> (Vec<DiagnosedDay>, Vec<ExcludedDay>) {
    let results: Vec<_> = days.par_iter().map(|day| diagnose(day, epsilon)).collect();
    let mut diagnosed = Vec::new();
    let mut excluded = Vec::new();
    for (day, result) in days.iter().zip(results) {
        match result {
            Ok(diagnosis) => diagnosed.push(DiagnosedDay {
                day: day.clone(),
                diagnosis,
            }),
            Err(reason) => excluded.push(ExcludedDay {
                provider_id: day.provider_id.clone(),
                date: day.date,
                appointments: day.len(),
                reason,
            }),
        }
    }
    (diagnosed, excluded)
}

/// Compares [`diagnose`] with [`brute_force_diagnose`] on every day small
/// enough to enumerate.
pub fn oracle_check(days: &[ProviderDay], epsilon: Minutes) -> OracleSummary {
    let small: Vec<_> = days
        .iter()
        .filter(|d| d.len() <= ORACLE_MAX_APPOINTMENTS)
        .collect();
    let mismatches = small
        .par_iter()
        .filter(|day| diagnose(day, epsilon) != brute_force_diagnose(day, epsilon))
        .count();
    OracleSummary {
        checked_days: small.len(),
        mismatches,
    }
}

pub fn run_diagnosis(config: &RunConfig) -> Result<DiagnosisRun, CliError> {
    let (rows, preprocessed) = load(config)?;
    let (diagnosed, excluded) = diagnose_days(&preprocessed.days, config.epsilon);
    let oracle = config
        .oracle_check
        .then(|| oracle_check(&preprocessed.days, config.epsilon));
    Ok(DiagnosisRun {
        rows,
        preprocessed,
        diagnosed,
        excluded,
        oracle,
    })
}

#[derive(Debug, Serialize)]
struct ExclusionEntry<'a> {
    provider_id: &'a str,
    date: String,
    appointments: usize,
    reason: &'a DiagnosisError,
}

/// Run summary written next to the per-day timelines.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    input: String,
    epsilon: Minutes,
    min_patients: usize,
    rows: usize,
    rejected_rows: usize,
    rejected_days: usize,
    days_below_min_patients: usize,
    overlap_splits: usize,
    days: usize,
    diagnosed_days: usize,
    infeasible_days: usize,
    patients_seen: usize,
    sum_delta_ap: usize,
    sum_delta_ae: usize,
    objective: usize,
    oracle: &'static str,
    oracle_checked_days: usize,
    oracle_mismatches: usize,
    excluded: Vec<ExclusionEntry<'a>>,
    gantt_files: Vec<String>,
}

/// Output of [`cmd_diagnose`].
#[derive(Debug)]
pub struct DiagnoseOutcome {
    pub run: DiagnosisRun,
    pub gantt_files: Vec<PathBuf>,
    pub manifest_path: PathBuf,
}

impl DiagnoseOutcome {
    pub fn exit_code(&self) -> i32 {
        EXIT_OK
    }

    pub fn sum_delta_ap(&self) -> usize {
        self.run
            .diagnosed
            .iter()
            .map(|d| d.diagnosis.changes.arrival_flips())
            .sum()
    }

    pub fn sum_delta_ae(&self) -> usize {
        self.run
            .diagnosed
            .iter()
            .map(|d| d.diagnosis.changes.duration_flips())
            .sum()
    }
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Relative file names for each diagnosed day's timeline, unique even when
/// provider ids sanitize to the same string.
fn gantt_names(days: &[DiagnosedDay]) -> Vec<String> {
    let mut seen = HashSet::new();
    days.iter()
        .map(|d| {
            let stem = format!("{}_{}", sanitize(d.day.provider_id.as_str()), d.day.date);
            let mut name = format!("gantt/{stem}.json");
            let mut k = 2;
            while !seen.insert(name.clone()) {
                name = format!("gantt/{stem}-{k}.json");
                k += 1;
            }
            name
        })
        .collect()
}

fn write_gantt(out: &Path, days: &[DiagnosedDay]) -> Result<Vec<(String, PathBuf)>, CliError> {
    let names = gantt_names(days);
    let mut written = Vec::with_capacity(days.len());
    for (d, name) in days.iter().zip(names) {
        let path = out.join(&name);
        write_atomic(&path, export_gantt(&d.day, &d.diagnosis).to_json().as_bytes())?;
        written.push((name, path));
    }
    Ok(written)
}

/// Diagnoses every provider-day and writes one timeline JSON per diagnosed
/// day under `gantt/` plus `manifest.json`.
pub fn cmd_diagnose(config: &RunConfig) -> Result<DiagnoseOutcome, CliError> {
    let run = run_diagnosis(config)?;
    let out = &config.output_dir;
    let written = write_gantt(out, &run.diagnosed)?;

    let sum_ap = run.diagnosed.iter().map(|d| d.diagnosis.changes.arrival_flips()).sum();
    let sum_ae = run.diagnosed.iter().map(|d| d.diagnosis.changes.duration_flips()).sum();
    let pre = &run.preprocessed;
    let manifest = Manifest {
        input: config.input_path.display().to_string(),
        epsilon: config.epsilon,
        min_patients: config.min_patients,
        rows: run.rows,
        rejected_rows: pre.row_findings.len(),
        rejected_days: pre.day_findings.len(),
        days_below_min_patients: pre.too_small.len(),
        overlap_splits: pre.splits.len(),
        days: run.diagnosed.len() + run.excluded.len(),
        diagnosed_days: run.diagnosed.len(),
        infeasible_days: run
            .excluded
            .iter()
            .filter(|e| matches!(e.reason, DiagnosisError::Infeasible { .. }))
            .count(),
        patients_seen: run.diagnosed.iter().map(|d| d.day.len()).sum(),
        sum_delta_ap: sum_ap,
        sum_delta_ae: sum_ae,
        objective: run.diagnosed.iter().map(|d| d.diagnosis.objective).sum(),
        oracle: run.oracle.map_or("not run", |o| o.status()),
        oracle_checked_days: run.oracle.map_or(0, |o| o.checked_days),
        oracle_mismatches: run.oracle.map_or(0, |o| o.mismatches),
        excluded: run
            .excluded
            .iter()
            .map(|e| ExclusionEntry {
                provider_id: e.provider_id.as_str(),
                date: e.date.to_string(),
                appointments: e.appointments,
                reason: &e.reason,
            })
            .collect(),
        gantt_files: written.iter().map(|(name, _)| name.clone()).collect(),
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    let manifest_path = out.join("manifest.json");
    write_atomic(&manifest_path, json.as_bytes())?;

    Ok(DiagnoseOutcome {
        gantt_files: written.into_iter().map(|(_, p)| p).collect(),
        run,
        manifest_path,
    })
}

/// Output of [`cmd_report`].
#[derive(Debug)]
pub struct ReportOutcome {
    pub report: DatasetReport,
    pub files: Vec<PathBuf>,
}

impl ReportOutcome {
    pub fn exit_code(&self) -> i32 {
        EXIT_OK
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing CSV to memory cannot fail");
    buf
}

/// Writes the requested aggregate CSVs (`by_provider.csv`, `by_date.csv`,
/// `by_half.csv`) and, if `gantt` is requested, the per-day timelines.
/// `exclusions.csv` is written whenever some day could not be diagnosed.
pub fn cmd_report(config: &RunConfig) -> Result<ReportOutcome, CliError> {
    let run = run_diagnosis(config)?;
    let report = DatasetReport::new(&run.diagnosed, run.excluded.clone());
    let out = &config.output_dir;
    let mut files = Vec::new();

    for kind in &config.reports {
        let (name, bytes) = match kind {
            ReportKind::Provider => (
                "by_provider.csv",
                csv_bytes(|b| write_provider_csv(&report.by_provider, b)),
            ),
            ReportKind::Date => (
                "by_date.csv",
                csv_bytes(|b| write_date_csv(&report.by_date, b)),
            ),
            ReportKind::Half => (
                "by_half.csv",
                csv_bytes(|b| write_half_csv(&report.by_half, b)),
            ),
            ReportKind::Gantt => {
                files.extend(write_gantt(out, &run.diagnosed)?.into_iter().map(|(_, p)| p));
                continue;
            }
        };
        let path = out.join(name);
        write_atomic(&path, &bytes)?;
        files.push(path);
    }
    if !report.excluded.is_empty() {
        let path = out.join("exclusions.csv");
        write_atomic(&path, &csv_bytes(|b| write_exclusions_csv(&report.excluded, b)))?;
        files.push(path);
    }
    Ok(ReportOutcome { report, files })
}

/// Writes `bytes` to a temporary file beside `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
