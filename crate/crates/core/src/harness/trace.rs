//! Time-stamped simulation trace and its CSV form.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! an emitted file reproduces every numeric field bit for bit.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sts::Phase;

pub const COLUMNS: [&str; 12] = [
    "t_s",
    "x_m",
    "phase",
    "event",
    "p_w",
    "g_best_w",
    "x_best_m",
    "inertia",
    "dx_m",
    "direction",
    "charge_j",
    "odometer_m",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Measure,
    MoveStart,
    MoveEnd,
    TrialStart,
    TrialEnd,
    Retrigger,
    Sleep,
    Wake,
    Clamp,
    Saturation,
}

impl Event {
    pub const ALL: [Event; 10] = [
        Event::Measure,
        Event::MoveStart,
        Event::MoveEnd,
        Event::TrialStart,
        Event::TrialEnd,
        Event::Retrigger,
        Event::Sleep,
        Event::Wake,
        Event::Clamp,
        Event::Saturation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Event::Measure => "measure",
            Event::MoveStart => "move_start",
            Event::MoveEnd => "move_end",
            Event::TrialStart => "trial_start",
            Event::TrialEnd => "trial_end",
            Event::Retrigger => "retrigger",
            Event::Sleep => "sleep",
            Event::Wake => "wake",
            Event::Clamp => "clamp",
            Event::Saturation => "saturation",
        }
    }
}

impl FromStr for Event {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Event::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown event `{s}`"))
    }
}

impl FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [Phase::Sleep, Phase::Searching, Phase::Monitoring]
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown phase `{s}`"))
    }
}

/// One row of the trace. `p_w` is the most recent panel reading at the time
/// of the event (for `saturation` rows: the energy clamped in that step).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t_s: f64,
    pub x_m: f64,
    pub phase: Phase,
    pub event: Event,
    pub p_w: f64,
    pub g_best_w: f64,
    pub x_best_m: f64,
    pub inertia: f64,
    pub dx_m: f64,
    pub direction: i8,
    pub charge_j: f64,
    pub odometer_m: f64,
}

impl TraceRecord {
    fn fields(&self) -> [String; 12] {
        [
            self.t_s.to_string(),
            self.x_m.to_string(),
            self.phase.as_str().to_string(),
            self.event.as_str().to_string(),
            self.p_w.to_string(),
            self.g_best_w.to_string(),
            self.x_best_m.to_string(),
            self.inertia.to_string(),
            self.dx_m.to_string(),
            self.direction.to_string(),
            self.charge_j.to_string(),
            self.odometer_m.to_string(),
        ]
    }

    fn from_fields(row: &csv::StringRecord) -> std::result::Result<Self, String> {
        if row.len() != COLUMNS.len() {
            return Err(format!(
                "expected {} columns, found {}",
                COLUMNS.len(),
                row.len()
            ));
        }
        let num = |i: usize| -> std::result::Result<f64, String> {
            row[i]
                .parse::<f64>()
                .map_err(|e| format!("column {}: {e}", COLUMNS[i]))
        };
        Ok(TraceRecord {
            t_s: num(0)?,
            x_m: num(1)?,
            phase: row[2].parse()?,
            event: row[3].parse()?,
            p_w: num(4)?,
            g_best_w: num(5)?,
            x_best_m: num(6)?,
            inertia: num(7)?,
            dx_m: num(8)?,
            direction: row[9]
                .parse()
                .map_err(|e| format!("column direction: {e}"))?,
            charge_j: num(10)?,
            odometer_m: num(11)?,
        })
    }
}

/// Destination for trace records as they are produced.
pub trait TraceSink {
    fn record(&mut self, rec: &TraceRecord) -> Result<()>;
}

impl TraceSink for Vec<TraceRecord> {
    fn record(&mut self, rec: &TraceRecord) -> Result<()> {
        self.push(*rec);
        Ok(())
    }
}

/// Discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _rec: &TraceRecord) -> Result<()> {
        Ok(())
    }
}

impl<A: TraceSink, B: TraceSink> TraceSink for (A, B) {
    fn record(&mut self, rec: &TraceRecord) -> Result<()> {
        self.0.record(rec)?;
        self.1.record(rec)
    }
}

/// Streams rows to a CSV file, flushing after each one so that an aborted
/// run leaves a readable prefix.
pub struct CsvTraceWriter<W: Write = File> {
    writer: csv::Writer<W>,
    path: PathBuf,
}

impl CsvTraceWriter<File> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        CsvTraceWriter::new(file, path)
    }
}

impl<W: Write> CsvTraceWriter<W> {
    pub fn new(inner: W, path: PathBuf) -> Result<Self> {
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(inner);
        let mut w = CsvTraceWriter { writer, path };
        w.writer.write_record(COLUMNS).map_err(|e| w.csv_err(e))?;
        w.flush()?;
        Ok(w)
    }

    fn csv_err(&self, source: csv::Error) -> Error {
        Error::Csv {
            path: self.path.clone(),
            source,
        }
    }

    pub fn flush(&mut self) -> Result<()> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }

    pub fn into_inner(self) -> Result<W> {
        let path = self.path.clone();
        self.writer
            .into_inner()
            .map_err(|e| Error::io(path, e.into_error()))
    }
}

impl<W: Write> TraceSink for CsvTraceWriter<W> {
    fn record(&mut self, rec: &TraceRecord) -> Result<()> {
        self.writer
            .write_record(rec.fields())
            .map_err(|e| self.csv_err(e))?;
        self.flush()
    }
}

pub fn emit_csv(trace: &[TraceRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = CsvTraceWriter::create(path)?;
    for rec in trace {
        w.record(rec)?;
    }
    w.flush()
}

pub fn to_csv_string(trace: &[TraceRecord]) -> Result<String> {
    let mut w = CsvTraceWriter::new(Vec::new(), PathBuf::from("<memory>"))?;
    for rec in trace {
        w.record(rec)?;
    }
    let bytes = w.into_inner()?;
    Ok(String::from_utf8(bytes).expect("trace CSV is ASCII"))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, path)
}

pub fn parse_csv<R: std::io::Read>(reader: R, path: &Path) -> Result<Vec<TraceRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    };
    let headers = rdr.headers().map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    if headers.iter().ne(COLUMNS) {
        return Err(parse_err(
            1,
            "trace header does not match the expected columns".into(),
        ));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        out.push(TraceRecord::from_fields(&row).map_err(|m| parse_err(i + 2, m))?);
    }
    Ok(out)
}
