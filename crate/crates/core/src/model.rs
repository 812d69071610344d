//! Provider-day domain types and the replay of observed appointments
//! against the plan.
//!
//! All times are integer minutes from midnight in `[0, 1440]`. Durations and
//! deviations are integer minutes; duration and cycle deviations are signed
//! because an appointment that runs short deviates from the plan just as much
//! as one that runs long.

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Minutes since midnight, or a span of minutes.
pub type Minutes = i32;

/// Last representable minute of a day.
pub const MINUTES_PER_DAY: Minutes = 1440;

/// Opaque provider identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProviderId(pub String);

impl ProviderId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProviderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ProviderId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Scheduled start and allotted duration of one appointment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedAppointment {
    pub scheduled_start: Minutes,
    pub scheduled_duration: Minutes,
}

impl PlannedAppointment {
    pub fn new(scheduled_start: Minutes, scheduled_duration: Minutes) -> Self {
        Self {
            scheduled_start,
            scheduled_duration,
        }
    }

    pub fn scheduled_end(&self) -> Minutes {
        self.scheduled_start + self.scheduled_duration
    }
}

/// What actually happened: patient arrival, room-in, time spent with the provider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedAppointment {
    pub arrival: Minutes,
    pub actual_start: Minutes,
    pub actual_duration: Minutes,
}

impl ObservedAppointment {
    pub fn new(arrival: Minutes, actual_start: Minutes, actual_duration: Minutes) -> Self {
        Self {
            arrival,
            actual_start,
            actual_duration,
        }
    }

    pub fn actual_end(&self) -> Minutes {
        self.actual_start + self.actual_duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Appointment {
    pub planned: PlannedAppointment,
    pub observed: ObservedAppointment,
}

impl Appointment {
    pub fn new(planned: PlannedAppointment, observed: ObservedAppointment) -> Self {
        Self { planned, observed }
    }
}

/// All appointments one provider completed on one date, in order of actual start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderDay {
    pub provider_id: ProviderId,
    pub date: NaiveDate,
    pub appointments: Vec<Appointment>,
}

impl ProviderDay {
    /// Builds a day and rejects it if any invariant is violated.
    pub fn try_new(
        provider_id: ProviderId,
        date: NaiveDate,
        appointments: Vec<Appointment>,
    ) -> Result<Self, InvalidDay> {
        let day = Self {
            provider_id,
            date,
            appointments,
        };
        let violations = validate_day(&day);
        if violations.is_empty() {
            Ok(day)
        } else {
            Err(InvalidDay { violations })
        }
    }

    /// Builds a day from parallel planned/observed columns:
    /// `(T, D, Ap, At, Ad)`. Intended for tests and examples; the column
    /// slices must have equal length.
    pub fn from_columns(
        provider_id: impl Into<ProviderId>,
        date: NaiveDate,
        scheduled_start: &[Minutes],
        scheduled_duration: &[Minutes],
        arrival: &[Minutes],
        actual_start: &[Minutes],
        actual_duration: &[Minutes],
    ) -> Result<Self, InvalidDay> {
        let n = scheduled_start.len();
        assert!(
            [
                scheduled_duration.len(),
                arrival.len(),
                actual_start.len(),
                actual_duration.len()
            ]
            .iter()
            .all(|&len| len == n),
            "column lengths differ"
        );
        let appointments = (0..n)
            .map(|i| {
                Appointment::new(
                    PlannedAppointment::new(scheduled_start[i], scheduled_duration[i]),
                    ObservedAppointment::new(arrival[i], actual_start[i], actual_duration[i]),
                )
            })
            .collect();
        Self::try_new(provider_id.into(), date, appointments)
    }

    pub fn len(&self) -> usize {
        self.appointments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.appointments.is_empty()
    }

    pub fn planned(&self) -> impl Iterator<Item = &PlannedAppointment> + '_ {
        self.appointments.iter().map(|a| &a.planned)
    }

    pub fn observed(&self) -> impl Iterator<Item = &ObservedAppointment> + '_ {
        self.appointments.iter().map(|a| &a.observed)
    }

    /// True when every appointment is scheduled no earlier than the
    /// previous one's planned end.
    pub fn plan_is_consistent(&self) -> bool {
        self.appointments
            .windows(2)
            .all(|w| w[1].planned.scheduled_start >= w[0].planned.scheduled_end())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid provider-day: {}", display_violations(.violations))]
pub struct InvalidDay {
    pub violations: Vec<Violation>,
}

fn display_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Which field of an appointment a range violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    ScheduledStart,
    ScheduledDuration,
    ScheduledEnd,
    Arrival,
    ActualStart,
    ActualDuration,
    ActualEnd,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Field::ScheduledStart => "scheduled_start",
            Field::ScheduledDuration => "scheduled_duration",
            Field::ScheduledEnd => "scheduled_end",
            Field::Arrival => "arrival",
            Field::ActualStart => "actual_start",
            Field::ActualDuration => "actual_duration",
            Field::ActualEnd => "actual_end",
        };
        f.write_str(name)
    }
}

/// A broken provider-day invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyDay,
    /// Field outside `[0, 1440]`. End fields past midnight land here too.
    OutOfRange {
        index: usize,
        field: Field,
        value: Minutes,
    },
    /// The patient was roomed before arriving.
    RoomedBeforeArrival {
        index: usize,
        arrival: Minutes,
        actual_start: Minutes,
    },
    /// Appointments are not in ascending order of actual start.
    Unsorted { index: usize },
    /// Appointment starts before the previous one ended, so the provider
    /// would be seeing two patients at once.
    NotSequential {
        index: usize,
        previous_end: Minutes,
        actual_start: Minutes,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDay => write!(f, "day has no appointments"),
            Violation::OutOfRange {
                index,
                field,
                value,
            } => write!(
                f,
                "appointment {index}: {field} = {value} outside [0, {MINUTES_PER_DAY}]"
            ),
            Violation::RoomedBeforeArrival {
                index,
                arrival,
                actual_start,
            } => write!(
                f,
                "appointment {index}: roomed at {actual_start} before arrival at {arrival}"
            ),
            Violation::Unsorted { index } => {
                write!(f, "appointment {index}: not sorted by actual start")
            }
            Violation::NotSequential {
                index,
                previous_end,
                actual_start,
            } => write!(
                f,
                "appointment {index}: sequential service broken, starts at {actual_start} \
                 before previous appointment ends at {previous_end}"
            ),
        }
    }
}

/// Lists every violated invariant of `day`. An empty list means the day is valid.
pub fn validate_day(day: &ProviderDay) -> Vec<Violation> {
    let mut out = Vec::new();
    if day.appointments.is_empty() {
        out.push(Violation::EmptyDay);
        return out;
    }

    let in_day = |v: Minutes| (0..=MINUTES_PER_DAY).contains(&v);
    for (index, appt) in day.appointments.iter().enumerate() {
        let p = appt.planned;
        let o = appt.observed;
        let fields = [
            (Field::ScheduledStart, p.scheduled_start),
            (Field::ScheduledDuration, p.scheduled_duration),
            (Field::ScheduledEnd, p.scheduled_end()),
            (Field::Arrival, o.arrival),
            (Field::ActualStart, o.actual_start),
            (Field::ActualDuration, o.actual_duration),
            (Field::ActualEnd, o.actual_end()),
        ];
        for (field, value) in fields {
            if !in_day(value) {
                out.push(Violation::OutOfRange {
                    index,
                    field,
                    value,
                });
            }
        }
        if o.arrival > o.actual_start {
            out.push(Violation::RoomedBeforeArrival {
                index,
                arrival: o.arrival,
                actual_start: o.actual_start,
            });
        }
    }

    for (offset, pair) in day.appointments.windows(2).enumerate() {
        let index = offset + 1;
        let (prev, cur) = (pair[0].observed, pair[1].observed);
        if cur.actual_start < prev.actual_start {
            out.push(Violation::Unsorted { index });
        } else if cur.actual_start < prev.actual_end() {
            out.push(Violation::NotSequential {
                index,
                previous_end: prev.actual_end(),
                actual_start: cur.actual_start,
            });
        }
    }
    out
}

/// Per-appointment start deviation: how many minutes after the scheduled
/// start the appointment could begin, given the patient's arrival and the
/// previous appointment's actual end. Never negative.
pub fn compute_start_deviation(day: &ProviderDay) -> Vec<Minutes> {
    let mut out = Vec::with_capacity(day.len());
    let mut previous: Option<&ObservedAppointment> = None;
    for appt in &day.appointments {
        let t = appt.planned.scheduled_start;
        let late_arrival = appt.observed.arrival - t;
        let deviation = match previous {
            None => late_arrival.max(0),
            Some(prev) => 0.max(prev.actual_end() - t).max(late_arrival),
        };
        out.push(deviation);
        previous = Some(&appt.observed);
    }
    out
}

/// Per-appointment `actual_duration - scheduled_duration`. Negative when the
/// appointment ran short.
pub fn compute_duration_deviation(day: &ProviderDay) -> Vec<Minutes> {
    day.appointments
        .iter()
        .map(|a| a.observed.actual_duration - a.planned.scheduled_duration)
        .collect()
}

/// Replayed timeline of a provider-day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedTimeline {
    pub start_deviation: Vec<Minutes>,
    pub duration_deviation: Vec<Minutes>,
    pub end_time: Vec<Minutes>,
    /// Arrival to appointment end.
    pub cycle_time: Vec<Minutes>,
    /// Cycle time minus scheduled duration.
    pub cycle_deviation: Vec<Minutes>,
}

pub fn compute_timeline(day: &ProviderDay) -> DerivedTimeline {
    let start_deviation = compute_start_deviation(day);
    let duration_deviation = compute_duration_deviation(day);
    let n = day.len();
    let mut end_time = Vec::with_capacity(n);
    let mut cycle_time = Vec::with_capacity(n);
    let mut cycle_deviation = Vec::with_capacity(n);
    for (appt, &ae) in day.appointments.iter().zip(&duration_deviation) {
        let d = appt.planned.scheduled_duration;
        let end = appt.observed.actual_start + d + ae;
        let cycle = end - appt.observed.arrival;
        end_time.push(end);
        cycle_time.push(cycle);
        cycle_deviation.push(cycle - d);
    }
    DerivedTimeline {
        start_deviation,
        duration_deviation,
        end_time,
        cycle_time,
        cycle_deviation,
    }
}
