//! Cross-checks the exact solver against exhaustive enumeration on random days.
//!
//!     cargo run --release --example oracle_check [-- days]

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clinic_diagnosis::synth::{random_day, SynthConfig};
use clinic_diagnosis::{brute_force_diagnose, diagnose};

fn main() {
    let days: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let date = NaiveDate::from_ymd_opt(2017, 3, 27).unwrap();
    let config = SynthConfig::default();

    let (mut agree, mut infeasible) = (0, 0);
    for trial in 0..days {
        let n = rng.gen_range(1..=8);
        let day = random_day(&mut rng, n, &config, &"SYN".into(), date);
        for eps in [0, 5, 15] {
            let fast = diagnose(&day, eps);
            let slow = brute_force_diagnose(&day, eps);
            if fast != slow {
                eprintln!("trial {trial} eps {eps}: solver {fast:?} vs enumeration {slow:?}");
                std::process::exit(1);
            }
            agree += 1;
            infeasible += usize::from(fast.is_err());
        }
    }
    println!("{agree} comparisons agree ({infeasible} infeasible on both sides)");
}
