//! Parses a two-system CSV export, merges timestamps, splits overlapping room
//! times and groups rows into provider-days.
//!
//!     cargo run --example preprocess_csv [-- path/to/export.csv]

use std::path::PathBuf;

use clinic_diagnosis::ingest::{parse_csv_path, preprocess, DEFAULT_MIN_PATIENTS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/sample_clinic.csv"));
    let records = parse_csv_path(&path)?;
    let pre = preprocess(&records, DEFAULT_MIN_PATIENTS);

    println!("{} rows from {}", records.len(), path.display());
    for day in &pre.days {
        println!("  {} {}: {} appointments", day.provider_id, day.date, day.len());
    }
    for s in &pre.splits {
        println!(
            "  split {} {}: overlap {}..{} divided at {}",
            s.provider_id, s.date, s.split.overlap_start, s.split.overlap_end, s.split.boundary
        );
    }
    for (id, date, n) in &pre.too_small {
        println!("  skipped {id} {date}: only {n} appointments");
    }
    for f in &pre.row_findings {
        println!("  row {}: {}", f.row, f.error);
    }
    for f in &pre.day_findings {
        println!("  day {} {}: {:?}", f.provider_id, f.date, f.problem);
    }
    println!("{} violations", pre.violation_count());
    Ok(())
}
