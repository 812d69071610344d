//! Turning raw two-system timestamp exports into provider-days.
//!
//! Each checkpoint (arrival, room-in, room-out) may be recorded by either of
//! two tracking systems; the earlier of the recorded values is kept. Room
//! intervals that overlap within a provider-day are split at the midpoint of
//! the overlap so the provider sees one patient at a time.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::clock::{format_clock, parse_clock};
use crate::model::{
    validate_day, Appointment, Minutes, ObservedAppointment, PlannedAppointment, ProviderDay,
    ProviderId, Violation,
};

/// Columns of the input CSV, in canonical order.
pub const CSV_COLUMNS: [&str; 10] = [
    "provider_id",
    "date",
    "scheduled_start",
    "scheduled_duration_min",
    "arrival_sys1",
    "arrival_sys2",
    "roomin_sys1",
    "roomin_sys2",
    "roomout_sys1",
    "roomout_sys2",
];

/// Default minimum number of appointments for a provider-day to be analysed.
pub const DEFAULT_MIN_PATIENTS: usize = 5;

/// One exported appointment with the timestamps of both tracking systems.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawAppointmentRecord {
    pub provider_id: ProviderId,
    pub date: NaiveDate,
    pub scheduled_start: Minutes,
    pub scheduled_duration: Minutes,
    pub arrival_sys1: Option<Minutes>,
    pub arrival_sys2: Option<Minutes>,
    pub roomin_sys1: Option<Minutes>,
    pub roomin_sys2: Option<Minutes>,
    pub roomout_sys1: Option<Minutes>,
    pub roomout_sys2: Option<Minutes>,
}

/// A record with one timestamp per checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedRecord {
    pub provider_id: ProviderId,
    pub date: NaiveDate,
    pub scheduled_start: Minutes,
    pub scheduled_duration: Minutes,
    pub arrival: Minutes,
    pub room_in: Minutes,
    pub room_out: Minutes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Checkpoint {
    Arrival,
    RoomIn,
    RoomOut,
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Checkpoint::Arrival => "arrival",
            Checkpoint::RoomIn => "room-in",
            Checkpoint::RoomOut => "room-out",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("no {0} timestamp in either system")]
    MissingCheckpoint(Checkpoint),
    #[error("checkpoints out of order: arrival {arrival}, room-in {room_in}, room-out {room_out}")]
    OrderingViolation {
        arrival: Minutes,
        room_in: Minutes,
        room_out: Minutes,
    },
    #[error(
        "overlap between appointments {earlier} and {later} cannot be split into a \
         single-server timeline"
    )]
    NestedBeyondRepair { earlier: usize, later: usize },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("row {row}, column {column}: cannot parse {token:?}")]
    Parse {
        row: usize,
        column: String,
        token: String,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn earliest(a: Option<Minutes>, b: Option<Minutes>, checkpoint: Checkpoint) -> Result<Minutes, IngestError> {
    match (a, b) {
        (Some(a), Some(b)) => Ok(a.min(b)),
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (None, None) => Err(IngestError::MissingCheckpoint(checkpoint)),
    }
}

/// Keeps the earlier of the two systems' timestamps for every checkpoint.
pub fn merge_timestamps(record: &RawAppointmentRecord) -> Result<MergedRecord, IngestError> {
    let arrival = earliest(record.arrival_sys1, record.arrival_sys2, Checkpoint::Arrival)?;
    let room_in = earliest(record.roomin_sys1, record.roomin_sys2, Checkpoint::RoomIn)?;
    let room_out = earliest(record.roomout_sys1, record.roomout_sys2, Checkpoint::RoomOut)?;
    if arrival > room_in || room_in > room_out {
        return Err(IngestError::OrderingViolation {
            arrival,
            room_in,
            room_out,
        });
    }
    Ok(MergedRecord {
        provider_id: record.provider_id.clone(),
        date: record.date,
        scheduled_start: record.scheduled_start,
        scheduled_duration: record.scheduled_duration,
        arrival,
        room_in,
        room_out,
    })
}

/// One midpoint split performed by [`resolve_overlaps_logged`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapSplit {
    /// Positions of the two records within the provider-day slice.
    pub earlier: usize,
    pub later: usize,
    pub overlap_start: Minutes,
    pub overlap_end: Minutes,
    pub boundary: Minutes,
}

/// Splits overlapping room intervals of one provider-day at the midpoint of
/// each overlap. See [`resolve_overlaps_logged`].
pub fn resolve_overlaps(records: &[MergedRecord]) -> Result<Vec<MergedRecord>, IngestError> {
    resolve_overlaps_logged(records).map(|(records, _)| records)
}

/// Single left-to-right pass over records sorted by room-in. Whenever the
/// earlier patient is still in a room after the later patient is roomed, both
/// boundaries move to the floor of the overlap's midpoint. A split can push
/// the later patient's room-in past the next record's, which the pass handles
/// at the next pair.
///
/// Fails with [`IngestError::NestedBeyondRepair`] when the later interval lies
/// strictly inside the earlier one, or when a split leaves an empty interval.
pub fn resolve_overlaps_logged(
    records: &[MergedRecord],
) -> Result<(Vec<MergedRecord>, Vec<OverlapSplit>), IngestError> {
    let mut out = records.to_vec();
    let mut splits = Vec::new();
    for i in 1..out.len() {
        let (head, tail) = out.split_at_mut(i);
        let earlier = &mut head[i - 1];
        let later = &mut tail[0];
        if earlier.room_out <= later.room_in {
            continue;
        }
        let nested = NestedBeyondRepair(i - 1, i);
        if later.room_out < earlier.room_out {
            return Err(nested.into());
        }
        let (overlap_start, overlap_end) = (later.room_in, earlier.room_out);
        let boundary = (overlap_start + overlap_end).div_euclid(2);
        if boundary <= earlier.room_in || boundary >= later.room_out {
            return Err(nested.into());
        }
        earlier.room_out = boundary;
        later.room_in = boundary;
        splits.push(OverlapSplit {
            earlier: i - 1,
            later: i,
            overlap_start,
            overlap_end,
            boundary,
        });
    }
    Ok((out, splits))
}

struct NestedBeyondRepair(usize, usize);

impl From<NestedBeyondRepair> for IngestError {
    fn from(NestedBeyondRepair(earlier, later): NestedBeyondRepair) -> Self {
        IngestError::NestedBeyondRepair { earlier, later }
    }
}

fn sort_key(r: &MergedRecord) -> (Minutes, Minutes, Minutes, Minutes, Minutes) {
    (
        r.room_in,
        r.room_out,
        r.arrival,
        r.scheduled_start,
        r.scheduled_duration,
    )
}

fn group_records(
    records: impl IntoIterator<Item = MergedRecord>,
) -> BTreeMap<(ProviderId, NaiveDate), Vec<MergedRecord>> {
    let mut groups: BTreeMap<_, Vec<_>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.provider_id.clone(), r.date))
            .or_default()
            .push(r);
    }
    for group in groups.values_mut() {
        group.sort_by_key(sort_key);
    }
    groups
}

fn to_day(provider_id: ProviderId, date: NaiveDate, records: &[MergedRecord]) -> ProviderDay {
    let appointments = records
        .iter()
        .map(|r| {
            Appointment::new(
                PlannedAppointment::new(r.scheduled_start, r.scheduled_duration),
                ObservedAppointment::new(r.arrival, r.room_in, r.room_out - r.room_in),
            )
        })
        .collect();
    ProviderDay {
        provider_id,
        date,
        appointments,
    }
}

/// Groups overlap-resolved records by provider and date, orders each group by
/// actual start and drops groups with fewer than `min_patients` appointments.
/// Days come out ordered by `(provider_id, date)`.
pub fn build_provider_days(records: &[MergedRecord], min_patients: usize) -> Vec<ProviderDay> {
    group_records(records.iter().cloned())
        .into_iter()
        .filter(|(_, group)| group.len() >= min_patients.max(1))
        .map(|((provider_id, date), group)| to_day(provider_id, date, &group))
        .collect()
}

/// A record that could not be merged. `row` is the 1-based data row.
#[derive(Debug)]
pub struct RowFinding {
    pub row: usize,
    pub provider_id: ProviderId,
    pub date: NaiveDate,
    pub error: IngestError,
}

#[derive(Debug)]
pub enum DayProblem {
    Overlap(IngestError),
    Invalid(Vec<Violation>),
}

impl fmt::Display for DayProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DayProblem::Overlap(e) => e.fmt(f),
            DayProblem::Invalid(violations) => {
                for (k, v) in violations.iter().enumerate() {
                    if k > 0 {
                        f.write_str("; ")?;
                    }
                    v.fmt(f)?;
                }
                Ok(())
            }
        }
    }
}

/// A provider-day that could not be turned into a valid [`ProviderDay`].
#[derive(Debug)]
pub struct DayFinding {
    pub provider_id: ProviderId,
    pub date: NaiveDate,
    pub problem: DayProblem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaySplit {
    pub provider_id: ProviderId,
    pub date: NaiveDate,
    pub split: OverlapSplit,
}

/// Output of the whole ingest pipeline.
#[derive(Debug, Default)]
pub struct Preprocessed {
    pub days: Vec<ProviderDay>,
    /// Midpoint splits applied. Informational.
    pub splits: Vec<DaySplit>,
    pub row_findings: Vec<RowFinding>,
    pub day_findings: Vec<DayFinding>,
    /// Provider-days below the minimum patient count, with their size.
    pub too_small: Vec<(ProviderId, NaiveDate, usize)>,
}

impl Preprocessed {
    /// Row and day findings; splits and small days are not violations.
    pub fn violation_count(&self) -> usize {
        self.row_findings.len() + self.day_findings.len()
    }
}

/// Merge, group, resolve overlaps, filter and validate.
pub fn preprocess(records: &[RawAppointmentRecord], min_patients: usize) -> Preprocessed {
    let mut out = Preprocessed::default();
    let mut merged = Vec::with_capacity(records.len());
    for (i, raw) in records.iter().enumerate() {
        match merge_timestamps(raw) {
            Ok(m) => merged.push(m),
            Err(error) => out.row_findings.push(RowFinding {
                row: i + 1,
                provider_id: raw.provider_id.clone(),
                date: raw.date,
                error,
            }),
        }
    }

    for ((provider_id, date), group) in group_records(merged) {
        if group.len() < min_patients.max(1) {
            out.too_small.push((provider_id, date, group.len()));
            continue;
        }
        let (resolved, splits) = match resolve_overlaps_logged(&group) {
            Ok(r) => r,
            Err(e) => {
                out.day_findings.push(DayFinding {
                    provider_id,
                    date,
                    problem: DayProblem::Overlap(e),
                });
                continue;
            }
        };
        let day = to_day(provider_id.clone(), date, &resolved);
        let violations = validate_day(&day);
        if !violations.is_empty() {
            out.day_findings.push(DayFinding {
                provider_id,
                date,
                problem: DayProblem::Invalid(violations),
            });
            continue;
        }
        out.splits.extend(splits.into_iter().map(|split| DaySplit {
            provider_id: provider_id.clone(),
            date,
            split,
        }));
        out.days.push(day);
    }
    out
}

/// Reads input CSV rows. The header must name exactly [`CSV_COLUMNS`], in
/// any order.
pub fn parse_csv<R: Read>(reader: R) -> Result<Vec<RawAppointmentRecord>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut index = [usize::MAX; CSV_COLUMNS.len()];
    for (pos, name) in headers.iter().enumerate() {
        match CSV_COLUMNS.iter().position(|c| *c == name) {
            Some(k) if index[k] == usize::MAX => index[k] = pos,
            Some(_) => return Err(IngestError::Schema(format!("duplicate column {name:?}"))),
            None => return Err(IngestError::Schema(format!("unknown column {name:?}"))),
        }
    }
    if let Some(k) = index.iter().position(|&p| p == usize::MAX) {
        return Err(IngestError::Schema(format!(
            "missing column {:?}",
            CSV_COLUMNS[k]
        )));
    }

    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let row_no = i + 1;
        let cell = |k: usize| row.get(index[k]).unwrap_or("");
        let err = |k: usize| IngestError::Parse {
            row: row_no,
            column: CSV_COLUMNS[k].to_owned(),
            token: cell(k).to_owned(),
        };
        let clock = |k: usize| parse_clock(cell(k)).ok_or_else(|| err(k));
        let optional = |k: usize| {
            if cell(k).is_empty() {
                Ok(None)
            } else {
                clock(k).map(Some)
            }
        };

        if cell(0).is_empty() {
            return Err(err(0));
        }
        let date = NaiveDate::parse_from_str(cell(1), "%Y-%m-%d").map_err(|_| err(1))?;
        let scheduled_duration = cell(3)
            .parse::<Minutes>()
            .ok()
            .filter(|d| *d >= 0)
            .ok_or_else(|| err(3))?;
        out.push(RawAppointmentRecord {
            provider_id: ProviderId::new(cell(0)),
            date,
            scheduled_start: clock(2)?,
            scheduled_duration,
            arrival_sys1: optional(4)?,
            arrival_sys2: optional(5)?,
            roomin_sys1: optional(6)?,
            roomin_sys2: optional(7)?,
            roomout_sys1: optional(8)?,
            roomout_sys2: optional(9)?,
        });
    }
    Ok(out)
}

pub fn parse_csv_path(path: impl AsRef<Path>) -> Result<Vec<RawAppointmentRecord>, IngestError> {
    let file = std::fs::File::open(path)?;
    parse_csv(std::io::BufReader::new(file))
}

/// Writes records in the input CSV format, columns in canonical order.
pub fn write_csv<W: Write>(records: &[RawAppointmentRecord], writer: W) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(CSV_COLUMNS)?;
    let opt = |v: Option<Minutes>| v.map(format_clock).unwrap_or_default();
    for r in records {
        wtr.write_record([
            r.provider_id.as_str().to_owned(),
            r.date.format("%Y-%m-%d").to_string(),
            format_clock(r.scheduled_start),
            r.scheduled_duration.to_string(),
            opt(r.arrival_sys1),
            opt(r.arrival_sys2),
            opt(r.roomin_sys1),
            opt(r.roomin_sys2),
            opt(r.roomout_sys1),
            opt(r.roomout_sys2),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
