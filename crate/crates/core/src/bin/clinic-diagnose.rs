use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clinic_diagnosis::cli::{cmd_diagnose, cmd_report, cmd_validate, ReportKind, RunConfig};

#[derive(Parser)]
#[command(version, about = "Diagnose why clinic schedules ran late")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and preprocess the input, listing findings.
    Validate(Flags),
    /// Diagnose every provider-day; writes timelines and a manifest.
    Diagnose(Flags),
    /// Write aggregate CSV reports.
    Report(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Tolerance in minutes around each planned end time.
    #[arg(long, default_value_t = 0)]
    epsilon: i32,
    #[arg(long, default_value_t = 5)]
    min_patients: usize,
    /// Cross-check the solver against exhaustive enumeration on small days.
    #[arg(long)]
    oracle_check: bool,
    #[arg(long, value_delimiter = ',', default_value = "provider,date,half,gantt")]
    reports: Vec<ReportKind>,
}

impl Flags {
    fn config(&self) -> RunConfig {
        RunConfig {
            input_path: self.input.clone(),
            output_dir: self.out.clone(),
            epsilon: self.epsilon,
            min_patients: self.min_patients,
            oracle_check: self.oracle_check,
            reports: self.reports.iter().copied().collect(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Validate(f) => cmd_validate(&f.config()).map(|s| {
            print!("{}", s.render());
            s.exit_code()
        }),
        Command::Diagnose(f) => cmd_diagnose(&f.config()).map(|o| {
            println!(
                "{} days diagnosed, {} excluded; sum delta_ap = {}, sum delta_ae = {}",
                o.run.diagnosed.len(),
                o.run.excluded.len(),
                o.sum_delta_ap(),
                o.sum_delta_ae()
            );
            if let Some(oracle) = o.run.oracle {
                println!("oracle: {} ({} days checked)", oracle.status(), oracle.checked_days);
            }
            println!("manifest: {}", o.manifest_path.display());
            o.exit_code()
        }),
        Command::Report(f) => cmd_report(&f.config()).map(|o| {
            for path in &o.files {
                println!("wrote {}", path.display());
            }
            o.exit_code()
        }),
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
