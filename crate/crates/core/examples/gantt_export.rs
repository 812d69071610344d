//! Prints the planned, observed and revised intervals of a diagnosed day as JSON.
//!
//!     cargo run --example gantt_export

use chrono::NaiveDate;
use clinic_diagnosis::{diagnose, export_gantt, GanttDocument, ProviderDay};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let date = NaiveDate::from_ymd_opt(2017, 3, 28).unwrap();
    let day = ProviderDay::from_columns(
        "DRB",
        date,
        &[480, 510, 540],
        &[30, 30, 30],
        &[475, 530, 540],
        &[480, 530, 560],
        &[30, 30, 25],
    )?;
    let diag = diagnose(&day, 5)?;
    let doc = export_gantt(&day, &diag);
    let json = doc.to_json();
    assert_eq!(GanttDocument::from_json(&json)?, doc);
    print!("{json}");
    Ok(())
}
