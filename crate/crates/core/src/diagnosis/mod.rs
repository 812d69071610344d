//! Minimum-change diagnosis of a provider-day.
//!
//! Each appointment carries two binary change variables: revert the patient's
//! arrival to the scheduled start, and revert the appointment's duration to
//! the allotted block. Applying a set of changes yields a revised timeline;
//! a diagnosis is a smallest set of changes under which every appointment
//! ends within `epsilon` minutes of its planned end.

mod brute_force;
mod classify;
mod search;

use serde::{Deserialize, Serialize};

use crate::model::{Minutes, ObservedAppointment, PlannedAppointment, ProviderDay};

pub use brute_force::{brute_force_diagnose, MAX_BRUTE_FORCE_APPOINTMENTS};
pub use classify::{classify_diagnosis, ClassifyConfig, DiagnosisAnnotation, FlipPattern};

/// Per-appointment change flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChangeVector {
    /// Patient arrival reverted to scheduled start.
    pub delta_ap: Vec<bool>,
    /// Appointment duration reverted to scheduled duration.
    pub delta_ae: Vec<bool>,
}

impl ChangeVector {
    pub fn zeros(n: usize) -> Self {
        Self {
            delta_ap: vec![false; n],
            delta_ae: vec![false; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            delta_ap: vec![true; n],
            delta_ae: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.delta_ap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta_ap.is_empty()
    }

    /// Number of set flags across both vectors.
    pub fn count(&self) -> usize {
        self.delta_ap.iter().chain(&self.delta_ae).filter(|&&b| b).count()
    }

    pub fn arrival_flips(&self) -> usize {
        self.delta_ap.iter().filter(|&&b| b).count()
    }

    pub fn duration_flips(&self) -> usize {
        self.delta_ae.iter().filter(|&&b| b).count()
    }

    /// Flags in tie-break order: all arrival flags, then all duration flags.
    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        self.delta_ap.iter().chain(&self.delta_ae).copied()
    }
}

/// Counterfactual timeline obtained by applying a [`ChangeVector`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisedTimeline {
    pub revised_arrival: Vec<Minutes>,
    pub revised_duration: Vec<Minutes>,
    pub revised_start: Vec<Minutes>,
}

impl RevisedTimeline {
    pub fn revised_end(&self, i: usize) -> Minutes {
        self.revised_start[i] + self.revised_duration[i]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub changes: ChangeVector,
    pub revised: RevisedTimeline,
    /// Number of set flags; minimal over all change vectors.
    pub objective: usize,
    pub epsilon: Minutes,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagnosisError {
    /// No change vector puts every appointment on schedule. `index` is the
    /// first appointment that misses its planned end even when every flag is
    /// set.
    #[error("no change set puts the day on schedule (appointment {index} misses its planned end even with every flag set)")]
    Infeasible { index: usize },
    #[error("{n} appointments exceed the brute-force limit of {max}")]
    InstanceTooLarge { n: usize, max: usize },
    #[error("provider-day has no appointments")]
    EmptyDay,
    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(Minutes),
}

pub fn revise_arrival(
    planned: &PlannedAppointment,
    observed: &ObservedAppointment,
    flag: bool,
) -> Minutes {
    if flag {
        planned.scheduled_start
    } else {
        observed.arrival
    }
}

pub fn revise_duration(
    planned: &PlannedAppointment,
    observed: &ObservedAppointment,
    flag: bool,
) -> Minutes {
    let d = planned.scheduled_duration;
    if flag {
        d
    } else {
        let ae = observed.actual_duration - d;
        d + ae
    }
}

/// Applies `changes` and replays the day: the first appointment starts at the
/// revised arrival, each later one at the latest of the previous revised end
/// and its own revised arrival.
pub fn simulate_revised(day: &ProviderDay, changes: &ChangeVector) -> RevisedTimeline {
    assert_eq!(changes.len(), day.len(), "change vector length mismatch");
    let n = day.len();
    let mut revised_arrival = Vec::with_capacity(n);
    let mut revised_duration = Vec::with_capacity(n);
    let mut revised_start: Vec<Minutes> = Vec::with_capacity(n);
    for (i, appt) in day.appointments.iter().enumerate() {
        let arrival = revise_arrival(&appt.planned, &appt.observed, changes.delta_ap[i]);
        let duration = revise_duration(&appt.planned, &appt.observed, changes.delta_ae[i]);
        let start = if i == 0 {
            arrival
        } else {
            let prev_end = revised_start[i - 1] + revised_duration[i - 1];
            0.max(prev_end).max(arrival)
        };
        revised_arrival.push(arrival);
        revised_duration.push(duration);
        revised_start.push(start);
    }
    RevisedTimeline {
        revised_arrival,
        revised_duration,
        revised_start,
    }
}

/// Whether each appointment's revised end is within `epsilon` of its planned end.
pub fn is_on_schedule(day: &ProviderDay, revised: &RevisedTimeline, epsilon: Minutes) -> Vec<bool> {
    day.planned()
        .enumerate()
        .map(|(i, p)| (revised.revised_end(i) - p.scheduled_end()).abs() <= epsilon)
        .collect()
}

/// First appointment that fails the on-schedule test with every flag set.
/// Used to report infeasible days identically from every solver.
pub(crate) fn all_flips_failure(day: &ProviderDay, epsilon: Minutes) -> Option<usize> {
    let revised = simulate_revised(day, &ChangeVector::ones(day.len()));
    is_on_schedule(day, &revised, epsilon)
        .iter()
        .position(|ok| !ok)
}

pub(crate) fn check_inputs(day: &ProviderDay, epsilon: Minutes) -> Result<(), DiagnosisError> {
    if day.is_empty() {
        return Err(DiagnosisError::EmptyDay);
    }
    if epsilon < 0 {
        return Err(DiagnosisError::NegativeEpsilon(epsilon));
    }
    Ok(())
}

pub(crate) fn finish(day: &ProviderDay, changes: ChangeVector, epsilon: Minutes) -> Diagnosis {
    let revised = simulate_revised(day, &changes);
    debug_assert!(is_on_schedule(day, &revised, epsilon).iter().all(|&ok| ok));
    Diagnosis {
        objective: changes.count(),
        changes,
        revised,
        epsilon,
    }
}

/// Finds a minimum-cardinality change vector that puts every appointment of
/// `day` on schedule within `epsilon`. Among minimum solutions the one whose
/// flags, read as `delta_ap[0..n]` followed by `delta_ae[0..n]`, form the
/// lexicographically smallest bit-string is returned.
///
/// The search walks appointments in order carrying the previous revised end.
/// That end is pinned to a window of `2 * epsilon + 1` minutes around the
/// planned end, so the state space per appointment is small and the result is
/// provably optimal.
pub fn diagnose(day: &ProviderDay, epsilon: Minutes) -> Result<Diagnosis, DiagnosisError> {
    check_inputs(day, epsilon)?;
    match search::minimum_change_vector(day, epsilon) {
        Some(changes) => Ok(finish(day, changes, epsilon)),
        None => Err(DiagnosisError::Infeasible {
            index: all_flips_failure(day, epsilon).unwrap_or(0),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn day(t: &[i32], d: &[i32], ap: &[i32], at: &[i32], ad: &[i32]) -> ProviderDay {
        let date = NaiveDate::from_ymd_opt(2017, 3, 27).unwrap();
        ProviderDay::from_columns("P1", date, t, d, ap, at, ad).unwrap()
    }

    fn late_first() -> ProviderDay {
        day(&[540, 570], &[30, 30], &[555, 570], &[555, 585], &[30, 30])
    }

    fn cv(ap: &[u8], ae: &[u8]) -> ChangeVector {
        ChangeVector {
            delta_ap: ap.iter().map(|&b| b == 1).collect(),
            delta_ae: ae.iter().map(|&b| b == 1).collect(),
        }
    }

    #[test]
    fn revise_arrival_cases() {
        let p = PlannedAppointment::new(540, 30);
        let o = ObservedAppointment::new(555, 555, 30);
        assert_eq!(revise_arrival(&p, &o, true), 540);
        assert_eq!(revise_arrival(&p, &o, false), 555);
        let o = ObservedAppointment::new(540, 540, 30);
        assert_eq!(revise_arrival(&p, &o, true), 540);
    }

    #[test]
    fn revise_duration_cases() {
        let p = PlannedAppointment::new(540, 30);
        let long = ObservedAppointment::new(540, 540, 45);
        assert_eq!(revise_duration(&p, &long, true), 30);
        assert_eq!(revise_duration(&p, &long, false), 45);
        let short = ObservedAppointment::new(540, 540, 20);
        assert_eq!(revise_duration(&p, &short, true), 30);
    }

    #[test]
    fn simulate_no_change_identity() {
        let d = day(&[540, 570], &[30, 30], &[540, 570], &[540, 570], &[30, 30]);
        let r = simulate_revised(&d, &ChangeVector::zeros(2));
        assert_eq!(r.revised_arrival, vec![540, 570]);
        assert_eq!(r.revised_start, vec![540, 570]);
        assert_eq!(r.revised_duration, vec![30, 30]);
    }

    #[test]
    fn simulate_flip_late_first_patient() {
        let r = simulate_revised(&late_first(), &cv(&[1, 0], &[0, 0]));
        assert_eq!(r.revised_arrival, vec![540, 570]);
        assert_eq!(r.revised_duration, vec![30, 30]);
        assert_eq!(r.revised_start, vec![540, 570]);

        let r = simulate_revised(&late_first(), &cv(&[1, 1], &[1, 1]));
        assert_eq!(r.revised_start, vec![540, 570]);
        assert_eq!(r.revised_duration, vec![30, 30]);
    }

    fn single(rat: i32, rad: i32) -> (ProviderDay, RevisedTimeline) {
        let d = day(&[540], &[30], &[540], &[540], &[30]);
        let r = RevisedTimeline {
            revised_arrival: vec![rat],
            revised_duration: vec![rad],
            revised_start: vec![rat],
        };
        (d, r)
    }

    #[test]
    fn on_schedule_tolerance_is_symmetric() {
        let (d, r) = single(540, 30);
        assert_eq!(is_on_schedule(&d, &r, 0), vec![true]);
        let (d, r) = single(540, 45);
        assert_eq!(is_on_schedule(&d, &r, 0), vec![false]);
        assert_eq!(is_on_schedule(&d, &r, 15), vec![true]);
        let (d, r) = single(540, 20);
        assert_eq!(is_on_schedule(&d, &r, 5), vec![false]);
    }

    #[test]
    fn on_time_day_needs_no_changes() {
        let d = day(&[540, 570], &[30, 30], &[540, 570], &[540, 570], &[30, 30]);
        let diag = diagnose(&d, 0).unwrap();
        assert_eq!(diag.objective, 0);
        assert_eq!(diag.changes, ChangeVector::zeros(2));
    }

    #[test]
    fn late_patient_diagnosed() {
        let diag = diagnose(&late_first(), 0).unwrap();
        assert_eq!(diag.changes, cv(&[1, 0], &[0, 0]));
        assert_eq!(diag.objective, 1);
    }

    #[test]
    fn overrun_diagnosed() {
        let d = day(&[540, 570], &[30, 30], &[540, 570], &[540, 585], &[45, 30]);
        let diag = diagnose(&d, 0).unwrap();
        assert_eq!(diag.changes, cv(&[0, 0], &[1, 0]));
        assert_eq!(diag.objective, 1);
    }

    #[test]
    fn overlapping_plan_is_infeasible() {
        let d = day(&[540, 560], &[30, 30], &[540, 560], &[540, 570], &[30, 30]);
        assert_eq!(diagnose(&d, 0), Err(DiagnosisError::Infeasible { index: 1 }));
    }

    #[test]
    fn negative_epsilon_rejected() {
        assert_eq!(
            diagnose(&late_first(), -1),
            Err(DiagnosisError::NegativeEpsilon(-1))
        );
    }

    #[test]
    fn empty_day_rejected() {
        let d = ProviderDay {
            provider_id: "P1".into(),
            date: NaiveDate::from_ymd_opt(2017, 3, 27).unwrap(),
            appointments: vec![],
        };
        assert_eq!(diagnose(&d, 0), Err(DiagnosisError::EmptyDay));
    }

    #[test]
    fn tolerance_absorbs_small_lateness() {
        let d = day(&[540, 570], &[30, 30], &[545, 575], &[545, 575], &[30, 30]);
        assert_eq!(diagnose(&d, 5).unwrap().objective, 0);
        assert_eq!(diagnose(&d, 4).unwrap().objective, 2);
    }
}
