//! Schedule-breakdown diagnosis for outpatient clinics.
//!
//! A provider-day is replayed against its plan, then searched for the
//! smallest set of corrections (a late patient treated as on time, an
//! appointment treated as lasting its allotted block) under which every
//! appointment would have ended on schedule. The corrections attribute the
//! day's delays to late patients or to under-sized appointment blocks.
//!
//! ```
//! use chrono::NaiveDate;
//! use clinic_diagnosis::{diagnose, ProviderDay};
//!
//! let date = NaiveDate::from_ymd_opt(2017, 3, 27).unwrap();
//! // Two 30-minute slots at 09:00 and 09:30; the first patient is 15 minutes late.
//! let day = ProviderDay::from_columns(
//!     "P1", date,
//!     &[540, 570], &[30, 30],   // scheduled start, scheduled duration
//!     &[555, 570],              // arrival
//!     &[555, 585], &[30, 30],   // roomed at, minutes with provider
//! )?;
//! let diagnosis = diagnose(&day, 0)?;
//! assert_eq!(diagnosis.changes.delta_ap, vec![true, false]);
//! assert_eq!(diagnosis.objective, 1);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! See `examples/` for ingesting CSV exports, building reports and
//! exporting timelines.

pub mod cli;
pub mod clock;
pub mod diagnosis;
pub mod ingest;
pub mod model;
pub mod report;
pub mod synth;

pub use diagnosis::{
    brute_force_diagnose, classify_diagnosis, diagnose, is_on_schedule, simulate_revised,
    ChangeVector, Diagnosis, DiagnosisError, RevisedTimeline,
};
pub use ingest::{parse_csv, preprocess, IngestError, RawAppointmentRecord};
pub use model::{
    compute_timeline, validate_day, Appointment, DerivedTimeline, Minutes, ObservedAppointment,
    PlannedAppointment, ProviderDay, ProviderId,
};
pub use report::{export_gantt, DatasetReport, DiagnosedDay, GanttDocument};
