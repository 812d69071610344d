//! Finds the smallest set of corrections that puts a day back on schedule,
//! then labels the resulting flip pattern.
//!
//!     cargo run --example diagnose_day [-- epsilon]

use chrono::NaiveDate;
use clinic_diagnosis::clock::format_clock;
use clinic_diagnosis::diagnosis::ClassifyConfig;
use clinic_diagnosis::{classify_diagnosis, diagnose, DiagnosisError, ProviderDay};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epsilon: i32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let date = NaiveDate::from_ymd_opt(2017, 3, 27).unwrap();
    // At zero tolerance an early arrival is also off plan: the first patient
    // would have been roomed at 08:58 and finished two minutes early.
    let day = ProviderDay::from_columns(
        "DRA",
        date,
        &[540, 560, 580, 600, 620],
        &[20, 20, 20, 20, 20],
        &[538, 572, 580, 598, 621],
        &[540, 572, 592, 622, 642],
        &[20, 20, 30, 20, 15],
    )?;

    let diag = match diagnose(&day, epsilon) {
        Ok(d) => d,
        Err(DiagnosisError::Infeasible { index }) => {
            println!("no correction puts appointment {index} on schedule");
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };

    println!("epsilon {epsilon}, objective {}", diag.objective);
    println!("idx  planned_end  revised_end  late_patient  overran");
    for (i, p) in day.planned().enumerate() {
        println!(
            "{i:>3}  {}        {}        {:<12}  {}",
            format_clock(p.scheduled_end()),
            format_clock(diag.revised.revised_end(i)),
            diag.changes.delta_ap[i],
            diag.changes.delta_ae[i],
        );
    }
    let note = classify_diagnosis(&diag, &day, &ClassifyConfig::default());
    println!(
        "pattern {:?} (arrival share {:.2}, duration share {:.2})",
        note.pattern, note.ap_share, note.ae_share
    );
    Ok(())
}
