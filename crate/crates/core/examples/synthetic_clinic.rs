//! Writes a synthetic two-system export for a clinic, suitable as CLI input.
//!
//!     cargo run --example synthetic_clinic -- out.csv [providers] [days] [seed]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clinic_diagnosis::ingest::write_csv;
use clinic_diagnosis::synth::synthetic_clinic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: u64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let path = args.first().cloned().unwrap_or_else(|| "synthetic_clinic.csv".into());
    let (providers, days, seed) = (arg(1, 14) as usize, arg(2, 20) as usize, arg(3, 1));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = synthetic_clinic(&mut rng, providers, days, 5, 16);
    write_csv(&records, std::fs::File::create(&path)?)?;
    println!("wrote {} rows for {providers} providers over {days} weekdays to {path}", records.len());
    Ok(())
}
