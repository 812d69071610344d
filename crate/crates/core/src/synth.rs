//! Synthetic provider-days and exports for testing, examples and benchmarks.
//!
//! Observed days are produced by replaying a single-server queue: each
//! patient is roomed at the later of their arrival and the previous
//! patient's departure, optionally after a short idle gap.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::ingest::RawAppointmentRecord;
use crate::model::{
    validate_day, Appointment, Minutes, ObservedAppointment, PlannedAppointment, ProviderDay,
    ProviderId,
};

/// Knobs for [`random_day`]. Probabilities are per appointment.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub first_start: (Minutes, Minutes),
    pub durations: Vec<Minutes>,
    /// Probability that a slot is scheduled some minutes after the previous
    /// slot's end rather than back-to-back.
    pub p_gap: f64,
    pub max_gap: Minutes,
    /// Probability that a slot is double-booked into the previous one.
    pub p_double_book: f64,
    pub p_late: f64,
    pub max_late: Minutes,
    pub p_early: f64,
    pub max_early: Minutes,
    pub p_overrun: f64,
    pub max_overrun: Minutes,
    pub p_underrun: f64,
    pub p_idle: f64,
    pub max_idle: Minutes,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            first_start: (480, 600),
            durations: vec![10, 15, 20, 30, 40, 45, 60],
            p_gap: 0.2,
            max_gap: 30,
            p_double_book: 0.08,
            p_late: 0.25,
            max_late: 30,
            p_early: 0.2,
            max_early: 20,
            p_overrun: 0.25,
            max_overrun: 25,
            p_underrun: 0.15,
            p_idle: 0.1,
            max_idle: 5,
        }
    }
}

impl SynthConfig {
    /// Observations that follow the plan exactly, with a consistent plan.
    pub fn on_plan() -> Self {
        Self {
            p_double_book: 0.0,
            p_late: 0.0,
            p_early: 0.0,
            p_overrun: 0.0,
            p_underrun: 0.0,
            p_idle: 0.0,
            ..Self::default()
        }
    }

    /// Perturbed observations over a plan where no slot overlaps the previous one.
    pub fn consistent_plan() -> Self {
        Self {
            p_double_book: 0.0,
            ..Self::default()
        }
    }
}

pub fn random_plan<R: Rng + ?Sized>(rng: &mut R, n: usize, config: &SynthConfig) -> Vec<PlannedAppointment> {
    let mut plan: Vec<PlannedAppointment> = Vec::with_capacity(n);
    for _ in 0..n {
        let duration = *config.durations.choose(rng).expect("at least one duration");
        let start = match plan.last() {
            None => {
                let (lo, hi) = config.first_start;
                lo + 5 * rng.gen_range(0..=(hi - lo) / 5)
            }
            Some(prev) => {
                let end = prev.scheduled_end();
                if rng.gen_bool(config.p_double_book) {
                    end - 5 * rng.gen_range(1..=(prev.scheduled_duration / 5).max(1))
                } else if rng.gen_bool(config.p_gap) {
                    end + 5 * rng.gen_range(1..=(config.max_gap / 5).max(1))
                } else {
                    end
                }
            }
        };
        plan.push(PlannedAppointment::new(start, duration));
    }
    plan
}

/// Replays arrivals and service durations through a single server.
pub fn replay(
    plan: &[PlannedAppointment],
    arrivals: &[Minutes],
    durations: &[Minutes],
    idle: &[Minutes],
) -> Vec<Appointment> {
    let mut prev_end: Option<Minutes> = None;
    plan.iter()
        .zip(arrivals)
        .zip(durations)
        .zip(idle)
        .map(|(((p, &arrival), &duration), &idle)| {
            let start = prev_end.map_or(arrival, |e| e.max(arrival)) + idle;
            prev_end = Some(start + duration);
            Appointment::new(*p, ObservedAppointment::new(arrival, start, duration))
        })
        .collect()
}

fn build_day(provider_id: &ProviderId, date: NaiveDate, appointments: Vec<Appointment>) -> Option<ProviderDay> {
    let day = ProviderDay {
        provider_id: provider_id.clone(),
        date,
        appointments,
    };
    validate_day(&day).is_empty().then_some(day)
}

/// A random valid provider-day with `n` appointments, perturbed per `config`.
/// Draws are repeated until the day fits inside `[0, 1440]`.
pub fn random_day<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    config: &SynthConfig,
    provider_id: &ProviderId,
    date: NaiveDate,
) -> ProviderDay {
    assert!(n > 0, "a provider-day needs at least one appointment");
    loop {
        let plan = random_plan(rng, n, config);
        let mut arrivals = Vec::with_capacity(n);
        let mut durations = Vec::with_capacity(n);
        let mut idle = Vec::with_capacity(n);
        for p in &plan {
            let roll: f64 = rng.gen();
            let offset = if roll < config.p_late {
                rng.gen_range(1..=config.max_late)
            } else if roll < config.p_late + config.p_early {
                -rng.gen_range(1..=config.max_early)
            } else {
                0
            };
            arrivals.push((p.scheduled_start + offset).max(0));

            let d = p.scheduled_duration;
            let roll: f64 = rng.gen();
            let delta = if roll < config.p_overrun {
                rng.gen_range(1..=config.max_overrun)
            } else if roll < config.p_overrun + config.p_underrun && d > 1 {
                -rng.gen_range(1..=d / 2)
            } else {
                0
            };
            durations.push(d + delta);

            idle.push(if rng.gen_bool(config.p_idle) {
                rng.gen_range(1..=config.max_idle)
            } else {
                0
            });
        }
        if let Some(day) = build_day(provider_id, date, replay(&plan, &arrivals, &durations, &idle)) {
            return day;
        }
    }
}

/// What was perturbed in a single-cause day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleCause {
    LateArrival,
    Overrun,
}

/// A consistent plan followed exactly except for one appointment, whose
/// patient arrives late or whose visit overruns, by 1 to 45 minutes. The
/// delay propagates down the queue. Returns the perturbed index.
pub fn single_cause_day<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    cause: SingleCause,
    provider_id: &ProviderId,
    date: NaiveDate,
) -> (ProviderDay, usize) {
    let config = SynthConfig::on_plan();
    loop {
        let plan = random_plan(rng, n, &config);
        let k = rng.gen_range(0..n);
        let amount = rng.gen_range(1..=45);
        let mut arrivals: Vec<_> = plan.iter().map(|p| p.scheduled_start).collect();
        let mut durations: Vec<_> = plan.iter().map(|p| p.scheduled_duration).collect();
        match cause {
            SingleCause::LateArrival => arrivals[k] += amount,
            SingleCause::Overrun => durations[k] += amount,
        }
        let appointments = replay(&plan, &arrivals, &durations, &vec![0; n]);
        if let Some(day) = build_day(provider_id, date, appointments) {
            return (day, k);
        }
    }
}

/// Splits a day's observations back into two-system raw records. One system
/// holds the true timestamp; the other is a few minutes later or missing.
pub fn day_to_records<R: Rng + ?Sized>(rng: &mut R, day: &ProviderDay) -> Vec<RawAppointmentRecord> {
    let mut pair = |truth: Minutes| -> (Option<Minutes>, Option<Minutes>) {
        let other = if rng.gen_bool(0.2) {
            None
        } else {
            Some((truth + rng.gen_range(0..=4)).min(crate::model::MINUTES_PER_DAY))
        };
        if rng.gen_bool(0.5) {
            (Some(truth), other)
        } else {
            (other, Some(truth))
        }
    };
    day.appointments
        .iter()
        .map(|a| {
            let o = a.observed;
            let (arrival_sys1, arrival_sys2) = pair(o.arrival);
            let (roomin_sys1, roomin_sys2) = pair(o.actual_start);
            let (roomout_sys1, roomout_sys2) = pair(o.actual_end());
            RawAppointmentRecord {
                provider_id: day.provider_id.clone(),
                date: day.date,
                scheduled_start: a.planned.scheduled_start,
                scheduled_duration: a.planned.scheduled_duration,
                arrival_sys1,
                arrival_sys2,
                roomin_sys1,
                roomin_sys2,
                roomout_sys1,
                roomout_sys2,
            }
        })
        .collect()
}

/// `count` consecutive weekdays starting at `first` (or the next weekday).
pub fn weekdays(first: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut d = first;
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}

/// Raw export for a clinic of `providers` providers over `days` weekdays,
/// each provider-day holding between `min_appointments` and
/// `max_appointments` appointments. Rows are shuffled.
pub fn synthetic_clinic<R: Rng + ?Sized>(
    rng: &mut R,
    providers: usize,
    days: usize,
    min_appointments: usize,
    max_appointments: usize,
) -> Vec<RawAppointmentRecord> {
    let config = SynthConfig::default();
    let start = NaiveDate::from_ymd_opt(2017, 3, 27).expect("valid date");
    let mut records = Vec::new();
    for p in 0..providers {
        let provider_id = ProviderId::new(format!("PROV{:02}", p + 1));
        for date in weekdays(start, days) {
            let n = rng.gen_range(min_appointments..=max_appointments);
            let day = random_day(rng, n, &config, &provider_id, date);
            records.extend(day_to_records(rng, &day));
        }
    }
    records.shuffle(rng);
    records
}
