//! Dataset-level summaries of diagnosed provider-days and per-day timeline
//! exports.
//!
//! Three aggregate shapes are produced: totals per provider, totals per
//! calendar date, and totals per half of the day's schedule. Days that could
//! not be diagnosed are listed separately and never enter the totals.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::diagnosis::{Diagnosis, DiagnosisError};
use crate::model::{compute_timeline, Minutes, ProviderDay, ProviderId};

/// A provider-day together with its successful diagnosis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosedDay {
    pub day: ProviderDay,
    pub diagnosis: Diagnosis,
}

/// A provider-day left out of every aggregate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedDay {
    pub provider_id: ProviderId,
    pub date: NaiveDate,
    pub appointments: usize,
    pub reason: DiagnosisError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderAggregate {
    pub provider_id: ProviderId,
    pub sum_delta_ap: usize,
    pub sum_delta_ae: usize,
    pub clinic_days: usize,
    pub patients_seen: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateAggregate {
    pub date: NaiveDate,
    pub sum_delta_ap: usize,
    pub sum_delta_ae: usize,
    pub patients_seen: usize,
    pub provider_count: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfAggregate {
    pub first_half_ap: usize,
    pub first_half_ae: usize,
    pub second_half_ap: usize,
    pub second_half_ae: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleHalf {
    First,
    Second,
}

/// The first `floor(n / 2)` appointments form the first half; an odd day
/// puts its middle appointment in the second half.
pub fn schedule_half(index: usize, n: usize) -> ScheduleHalf {
    if index < n / 2 {
        ScheduleHalf::First
    } else {
        ScheduleHalf::Second
    }
}

/// One row per provider, most patients seen first; ties by provider id.
pub fn aggregate_by_provider(days: &[DiagnosedDay]) -> Vec<ProviderAggregate> {
    let mut rows: BTreeMap<&ProviderId, ProviderAggregate> = BTreeMap::new();
    for d in days {
        let row = rows
            .entry(&d.day.provider_id)
            .or_insert_with(|| ProviderAggregate {
                provider_id: d.day.provider_id.clone(),
                sum_delta_ap: 0,
                sum_delta_ae: 0,
                clinic_days: 0,
                patients_seen: 0,
            });
        row.sum_delta_ap += d.diagnosis.changes.arrival_flips();
        row.sum_delta_ae += d.diagnosis.changes.duration_flips();
        row.clinic_days += 1;
        row.patients_seen += d.day.len();
    }
    let mut rows: Vec<_> = rows.into_values().collect();
    rows.sort_by(|a, b| {
        b.patients_seen
            .cmp(&a.patients_seen)
            .then_with(|| a.provider_id.cmp(&b.provider_id))
    });
    rows
}

/// One row per date in calendar order.
pub fn aggregate_by_date(days: &[DiagnosedDay]) -> Vec<DateAggregate> {
    let mut rows: BTreeMap<NaiveDate, (DateAggregate, BTreeSet<&ProviderId>)> = BTreeMap::new();
    for d in days {
        let (row, providers) = rows.entry(d.day.date).or_insert_with(|| {
            (
                DateAggregate {
                    date: d.day.date,
                    sum_delta_ap: 0,
                    sum_delta_ae: 0,
                    patients_seen: 0,
                    provider_count: 0,
                },
                BTreeSet::new(),
            )
        });
        row.sum_delta_ap += d.diagnosis.changes.arrival_flips();
        row.sum_delta_ae += d.diagnosis.changes.duration_flips();
        row.patients_seen += d.day.len();
        providers.insert(&d.day.provider_id);
    }
    rows.into_values()
        .map(|(mut row, providers)| {
            row.provider_count = providers.len();
            row
        })
        .collect()
}

pub fn aggregate_by_half(days: &[DiagnosedDay]) -> HalfAggregate {
    let mut out = HalfAggregate::default();
    for d in days {
        let changes = &d.diagnosis.changes;
        let n = changes.len();
        for i in 0..n {
            let (ap, ae) = (changes.delta_ap[i] as usize, changes.delta_ae[i] as usize);
            match schedule_half(i, n) {
                ScheduleHalf::First => {
                    out.first_half_ap += ap;
                    out.first_half_ae += ae;
                }
                ScheduleHalf::Second => {
                    out.second_half_ap += ap;
                    out.second_half_ae += ae;
                }
            }
        }
    }
    out
}

/// All three aggregates plus the days that were left out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub by_provider: Vec<ProviderAggregate>,
    pub by_date: Vec<DateAggregate>,
    pub by_half: HalfAggregate,
    pub excluded: Vec<ExcludedDay>,
}

impl DatasetReport {
    pub fn new(days: &[DiagnosedDay], excluded: Vec<ExcludedDay>) -> Self {
        let mut excluded = excluded;
        excluded.sort_by(|a, b| (&a.provider_id, a.date).cmp(&(&b.provider_id, b.date)));
        Self {
            by_provider: aggregate_by_provider(days),
            by_date: aggregate_by_date(days),
            by_half: aggregate_by_half(days),
            excluded,
        }
    }
}

#[derive(Debug, Serialize)]
struct HalfRow {
    half: ScheduleHalf,
    sum_delta_ap: usize,
    sum_delta_ae: usize,
}

#[derive(Debug, Serialize)]
struct ExclusionRow<'a> {
    provider_id: &'a ProviderId,
    date: NaiveDate,
    appointments: usize,
    reason: String,
}

fn write_rows<W: Write, T: Serialize>(rows: impl IntoIterator<Item = T>, writer: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Header `provider_id,sum_delta_ap,sum_delta_ae,clinic_days,patients_seen`.
pub fn write_provider_csv<W: Write>(rows: &[ProviderAggregate], writer: W) -> csv::Result<()> {
    if rows.is_empty() {
        return write_header(&["provider_id", "sum_delta_ap", "sum_delta_ae", "clinic_days", "patients_seen"], writer);
    }
    write_rows(rows, writer)
}

/// Header `date,sum_delta_ap,sum_delta_ae,patients_seen,provider_count`.
pub fn write_date_csv<W: Write>(rows: &[DateAggregate], writer: W) -> csv::Result<()> {
    if rows.is_empty() {
        return write_header(&["date", "sum_delta_ap", "sum_delta_ae", "patients_seen", "provider_count"], writer);
    }
    write_rows(rows, writer)
}

/// Header `half,sum_delta_ap,sum_delta_ae`; rows `first` and `second`.
pub fn write_half_csv<W: Write>(half: &HalfAggregate, writer: W) -> csv::Result<()> {
    write_rows(
        [
            HalfRow {
                half: ScheduleHalf::First,
                sum_delta_ap: half.first_half_ap,
                sum_delta_ae: half.first_half_ae,
            },
            HalfRow {
                half: ScheduleHalf::Second,
                sum_delta_ap: half.second_half_ap,
                sum_delta_ae: half.second_half_ae,
            },
        ],
        writer,
    )
}

/// Header `provider_id,date,appointments,reason`.
pub fn write_exclusions_csv<W: Write>(excluded: &[ExcludedDay], writer: W) -> csv::Result<()> {
    if excluded.is_empty() {
        return write_header(&["provider_id", "date", "appointments", "reason"], writer);
    }
    write_rows(
        excluded.iter().map(|e| ExclusionRow {
            provider_id: &e.provider_id,
            date: e.date,
            appointments: e.appointments,
            reason: e.reason.to_string(),
        }),
        writer,
    )
}

fn write_header<W: Write>(header: &[&str], writer: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(header)?;
    wtr.flush()?;
    Ok(())
}

/// Planned, observed and revised intervals of one appointment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GanttAppointment {
    pub index: usize,
    pub planned_start: Minutes,
    pub planned_end: Minutes,
    pub arrival: Minutes,
    pub observed_start: Minutes,
    pub observed_end: Minutes,
    pub revised_arrival: Minutes,
    pub revised_start: Minutes,
    pub revised_end: Minutes,
    pub flip_arrival: bool,
    pub flip_duration: bool,
}

/// Original-versus-revised timeline of one diagnosed provider-day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GanttDocument {
    pub provider_id: ProviderId,
    pub date: NaiveDate,
    pub epsilon: Minutes,
    pub objective: usize,
    pub appointments: Vec<GanttAppointment>,
}

impl GanttDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("gantt document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

pub fn export_gantt(day: &ProviderDay, diag: &Diagnosis) -> GanttDocument {
    let timeline = compute_timeline(day);
    let revised = &diag.revised;
    let appointments = day
        .appointments
        .iter()
        .enumerate()
        .map(|(i, a)| GanttAppointment {
            index: i,
            planned_start: a.planned.scheduled_start,
            planned_end: a.planned.scheduled_end(),
            arrival: a.observed.arrival,
            observed_start: a.observed.actual_start,
            observed_end: timeline.end_time[i],
            revised_arrival: revised.revised_arrival[i],
            revised_start: revised.revised_start[i],
            revised_end: revised.revised_end(i),
            flip_arrival: diag.changes.delta_ap[i],
            flip_duration: diag.changes.delta_ae[i],
        })
        .collect();
    GanttDocument {
        provider_id: day.provider_id.clone(),
        date: day.date,
        epsilon: diag.epsilon,
        objective: diag.objective,
        appointments,
    }
}
