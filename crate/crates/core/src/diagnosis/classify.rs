//! Reading a diagnosis: are late patients, under-sized appointment blocks,
//! or a few unpredictable visits behind the day's delays?

use serde::{Deserialize, Serialize};

use super::Diagnosis;
use crate::model::ProviderDay;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Duration-flip share at or above which block-time planning is blamed.
    pub pervasive_share: f64,
    /// Duration flips count as concentrated when at most
    /// `max(1, ceil(concentrated_share * n))`.
    pub concentrated_share: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            pervasive_share: 0.5,
            concentrated_share: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipPattern {
    /// No change needed.
    OnSchedule,
    /// Only arrivals were reverted.
    LatePatients,
    /// A handful of appointments ran off-plan.
    UnpredictableAppointment,
    /// Durations are off across much of the day.
    BlockTimePlanning,
    /// Duration flips neither concentrated nor pervasive.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisAnnotation {
    pub ap_share: f64,
    pub ae_share: f64,
    pub pattern: FlipPattern,
}

pub fn classify_diagnosis(
    diag: &Diagnosis,
    day: &ProviderDay,
    config: &ClassifyConfig,
) -> DiagnosisAnnotation {
    let n = day.len().max(1);
    let ap = diag.changes.arrival_flips();
    let ae = diag.changes.duration_flips();
    let ap_share = ap as f64 / n as f64;
    let ae_share = ae as f64 / n as f64;
    let concentrated_limit = ((config.concentrated_share * n as f64).ceil() as usize).max(1);

    let pattern = if ap + ae == 0 {
        FlipPattern::OnSchedule
    } else if ae_share >= config.pervasive_share {
        FlipPattern::BlockTimePlanning
    } else if ae == 0 {
        FlipPattern::LatePatients
    } else if ae <= concentrated_limit {
        FlipPattern::UnpredictableAppointment
    } else {
        FlipPattern::Mixed
    };
    DiagnosisAnnotation {
        ap_share,
        ae_share,
        pattern,
    }
}
