//! Replays one provider-day against its plan and prints the derived timeline.
//!
//!     cargo run --example replay_day

use chrono::NaiveDate;
use clinic_diagnosis::clock::format_clock;
use clinic_diagnosis::{compute_timeline, ProviderDay};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let date = NaiveDate::from_ymd_opt(2017, 3, 27).unwrap();
    // Four 20-minute slots from 09:00. The second patient is 12 minutes late
    // and the third visit runs 10 minutes over.
    let day = ProviderDay::from_columns(
        "DRA",
        date,
        &[540, 560, 580, 600],
        &[20, 20, 20, 20],
        &[538, 572, 580, 598],
        &[540, 572, 592, 622],
        &[20, 20, 30, 20],
    )?;
    let tl = compute_timeline(&day);

    println!("idx  sched  arrive  roomed  end    start_dev  dur_dev  cycle  cycle_dev");
    for (i, a) in day.appointments.iter().enumerate() {
        println!(
            "{i:>3}  {}  {}   {}   {}  {:>9}  {:>7}  {:>5}  {:>9}",
            format_clock(a.planned.scheduled_start),
            format_clock(a.observed.arrival),
            format_clock(a.observed.actual_start),
            format_clock(tl.end_time[i]),
            tl.start_deviation[i],
            tl.duration_deviation[i],
            tl.cycle_time[i],
            tl.cycle_deviation[i],
        );
    }
    Ok(())
}
