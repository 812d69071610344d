//! Exhaustive reference solver.

use super::{
    all_flips_failure, check_inputs, finish, is_on_schedule, simulate_revised, ChangeVector,
    Diagnosis, DiagnosisError,
};
use crate::model::{Minutes, ProviderDay};

/// Largest day [`brute_force_diagnose`] accepts; it enumerates `4^n` vectors.
pub const MAX_BRUTE_FORCE_APPOINTMENTS: usize = 12;

/// Decodes `code` into a change vector. Bit `2n - 1` of `code` is
/// `delta_ap[0]`, bit 0 is `delta_ae[n - 1]`, so numeric order on codes is
/// lexicographic order on the concatenated flag string.
fn decode(code: u32, n: usize) -> ChangeVector {
    let bit = |k: usize| code >> (2 * n - 1 - k) & 1 == 1;
    ChangeVector {
        delta_ap: (0..n).map(bit).collect(),
        delta_ae: (n..2 * n).map(bit).collect(),
    }
}

/// Same contract as [`super::diagnose`], found by trying every change vector.
pub fn brute_force_diagnose(day: &ProviderDay, epsilon: Minutes) -> Result<Diagnosis, DiagnosisError> {
    check_inputs(day, epsilon)?;
    let n = day.len();
    if n > MAX_BRUTE_FORCE_APPOINTMENTS {
        return Err(DiagnosisError::InstanceTooLarge {
            n,
            max: MAX_BRUTE_FORCE_APPOINTMENTS,
        });
    }

    let mut best: Option<(u32, ChangeVector)> = None;
    for code in 0..1u32 << (2 * n) {
        let flips = code.count_ones();
        // codes ascend, so the first vector found at a given cost is the
        // lexicographically smallest one
        if best.as_ref().is_some_and(|(b, _)| flips >= *b) {
            continue;
        }
        let changes = decode(code, n);
        let revised = simulate_revised(day, &changes);
        if is_on_schedule(day, &revised, epsilon).iter().all(|&ok| ok) {
            best = Some((flips, changes));
        }
    }

    match best {
        Some((_, changes)) => Ok(finish(day, changes, epsilon)),
        None => Err(DiagnosisError::Infeasible {
            index: all_flips_failure(day, epsilon).unwrap_or(0),
        }),
    }
}
