//! Scenario loading, run orchestration, trace/report emission and
//! comparison tables.

pub mod compare;
pub mod report;
pub mod scenario;
pub mod trace;

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sts::Strategy;

pub use compare::{compare, Comparison, ComparisonRow};
pub use report::{RunReport, TrialKind, TrialSummary};
pub use scenario::{load_scenario, parse_scenario, Scenario};
pub use trace::{
    emit_csv, read_csv, to_csv_string, CsvTraceWriter, Event, NullSink, TraceRecord, TraceSink,
};

/// Run `scenario` with the strategy it names.
pub fn run_simulation(scenario: &Scenario, sink: &mut dyn TraceSink) -> Result<RunReport> {
    match scenario.strategy {
        Strategy::Sts => crate::sts::run(scenario, sink),
        Strategy::Fixed => crate::oracle::baseline_fixed(scenario, sink),
        Strategy::FullSweep => crate::oracle::baseline_full_sweep(scenario, sink),
    }
}

/// Files written by [`run_to_dir`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace_path: PathBuf,
    pub report_path: PathBuf,
    pub report: RunReport,
}

/// Run and write `<name>.<strategy>.trace.csv` and `<name>.<strategy>.report.json`
/// into `out_dir`. The trace is streamed, so a failed run leaves its prefix.
pub fn run_to_dir(scenario: &Scenario, out_dir: impl AsRef<Path>) -> Result<RunOutput> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let stem = format!("{}.{}", scenario.name, scenario.strategy.as_str());
    let trace_path = out_dir.join(format!("{stem}.trace.csv"));
    let report_path = out_dir.join(format!("{stem}.report.json"));
    let mut writer = CsvTraceWriter::create(&trace_path)?;
    let report = run_simulation(scenario, &mut writer)?;
    writer.flush()?;
    report.write(&report_path)?;
    Ok(RunOutput {
        trace_path,
        report_path,
        report,
    })
}
