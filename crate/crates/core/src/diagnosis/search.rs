//! Exact minimum-change search.
//!
//! Depth-first over appointments in schedule order. The only state carried
//! between appointments is the previous revised end, and a branch is cut as
//! soon as its appointment ends outside the tolerance window, so the
//! reachable states at depth `i` lie in `[P_i - eps, P_i + eps]` where `P_i`
//! is the planned end. Minimal cost-to-go is memoised per `(depth, state)`.
//!
//! The lexicographic tie-break orders all arrival flags before all duration
//! flags, which is not the search order, so the chosen vector is fixed one
//! bit at a time: a bit stays 0 whenever the optimum is still reachable with
//! it pinned to 0.

use std::collections::HashMap;

use super::ChangeVector;
use crate::model::{Minutes, ProviderDay};

/// Flag assignments in the order tried at each appointment.
const CHOICES: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

struct Search<'a> {
    day: &'a ProviderDay,
    epsilon: Minutes,
    /// Pinned values, indexed like [`ChangeVector::bits`].
    pinned: Vec<Option<bool>>,
    memo: HashMap<(usize, Option<Minutes>), Option<u32>>,
}

impl<'a> Search<'a> {
    fn new(day: &'a ProviderDay, epsilon: Minutes) -> Self {
        Self {
            day,
            epsilon,
            pinned: vec![None; 2 * day.len()],
            memo: HashMap::new(),
        }
    }

    fn allows(&self, i: usize, ap: bool, ae: bool) -> bool {
        let n = self.day.len();
        self.pinned[i].is_none_or(|v| v == ap) && self.pinned[n + i].is_none_or(|v| v == ae)
    }

    /// Revised end of appointment `i` under the given flags, if it lands in
    /// the tolerance window.
    fn step(&self, i: usize, prev_end: Option<Minutes>, ap: bool, ae: bool) -> Option<Minutes> {
        let appt = &self.day.appointments[i];
        let arrival = if ap {
            appt.planned.scheduled_start
        } else {
            appt.observed.arrival
        };
        let duration = if ae {
            appt.planned.scheduled_duration
        } else {
            appt.observed.actual_duration
        };
        let start = match prev_end {
            None => arrival,
            Some(prev) => prev.max(arrival).max(0),
        };
        let end = start + duration;
        ((end - appt.planned.scheduled_end()).abs() <= self.epsilon).then_some(end)
    }

    /// Fewest flags needed for appointments `i..` given the previous revised end.
    fn cost_to_go(&mut self, i: usize, prev_end: Option<Minutes>) -> Option<u32> {
        if i == self.day.len() {
            return Some(0);
        }
        if let Some(&cached) = self.memo.get(&(i, prev_end)) {
            return cached;
        }
        let mut best: Option<u32> = None;
        for (ap, ae) in CHOICES {
            let flips = u32::from(ap) + u32::from(ae);
            if best.is_some_and(|b| flips >= b) || !self.allows(i, ap, ae) {
                continue;
            }
            let Some(end) = self.step(i, prev_end, ap, ae) else {
                continue;
            };
            if let Some(rest) = self.cost_to_go(i + 1, Some(end)) {
                let total = flips + rest;
                if best.is_none_or(|b| total < b) {
                    best = Some(total);
                }
            }
        }
        self.memo.insert((i, prev_end), best);
        best
    }

    fn optimum(&mut self) -> Option<u32> {
        self.memo.clear();
        self.cost_to_go(0, None)
    }
}

/// Minimum-cardinality, lexicographically smallest change vector, or `None`
/// when no vector puts the whole day on schedule.
pub(super) fn minimum_change_vector(day: &ProviderDay, epsilon: Minutes) -> Option<ChangeVector> {
    let n = day.len();
    let mut search = Search::new(day, epsilon);
    let best = search.optimum()?;
    for bit in 0..2 * n {
        search.pinned[bit] = Some(false);
        if search.optimum() != Some(best) {
            search.pinned[bit] = Some(true);
        }
    }
    let bits: Vec<bool> = search.pinned.iter().map(|b| b.unwrap_or(false)).collect();
    Some(ChangeVector {
        delta_ap: bits[..n].to_vec(),
        delta_ae: bits[n..].to_vec(),
    })
}
