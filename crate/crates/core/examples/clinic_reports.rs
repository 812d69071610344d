//! Runs the whole pipeline on a CSV export and writes the provider, date and
//! schedule-half reports plus per-day timelines.
//!
//!     cargo run --example clinic_reports [-- input.csv out_dir]

use std::path::PathBuf;

use clinic_diagnosis::cli::{cmd_diagnose, cmd_report, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args_os().skip(1);
    let input = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/sample_clinic.csv"));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("clinic-reports"));

    let mut config = RunConfig::new(&input, &out);
    config.oracle_check = true;
    let diag = cmd_diagnose(&config)?;
    let report = cmd_report(&config)?;

    println!(
        "{} days diagnosed, {} excluded, {} late-patient and {} duration flips",
        diag.run.diagnosed.len(),
        diag.run.excluded.len(),
        diag.sum_delta_ap(),
        diag.sum_delta_ae()
    );
    println!("provider  ap  ae  days  patients");
    for p in &report.report.by_provider {
        println!(
            "{:<8}  {:>2}  {:>2}  {:>4}  {:>8}",
            p.provider_id.as_str(), p.sum_delta_ap, p.sum_delta_ae, p.clinic_days, p.patients_seen
        );
    }
    let h = &report.report.by_half;
    println!("first half  ap {} ae {}", h.first_half_ap, h.first_half_ae);
    println!("second half ap {} ae {}", h.second_half_ap, h.second_half_ae);
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
