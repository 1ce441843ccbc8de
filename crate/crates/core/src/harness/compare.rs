use std::fmt::Write as _;

use super::report::RunReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub scenario: String,
    pub strategy: String,
    pub trials: usize,
    pub net_j: f64,
    pub harvested_j: f64,
    pub consumed_j: f64,
    pub distance_m: f64,
    pub final_g_best_w: f64,
    /// Relative to the first report.
    pub delta_net_j: f64,
    pub delta_distance_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub family: String,
    pub seed: u64,
    pub rows: Vec<ComparisonRow>,
}

/// Tabulate reports of the same scenario family against the first one.
pub fn compare(reports: &[RunReport]) -> Result<Comparison> {
    let Some(first) = reports.first() else {
        return Err(Error::Usage {
            message: "compare needs at least two reports".into(),
        });
    };
    if reports.len() < 2 {
        return Err(Error::Usage {
            message: "compare needs at least two reports".into(),
        });
    }
    for r in &reports[1..] {
        if r.family != first.family {
            return Err(Error::FamilyMismatch {
                expected: first.family.clone(),
                found: r.family.clone(),
            });
        }
    }
    let rows = reports
        .iter()
        .map(|r| ComparisonRow {
            scenario: r.scenario.clone(),
            strategy: r.strategy.clone(),
            trials: r.trials,
            net_j: r.net_j,
            harvested_j: r.harvested_j,
            consumed_j: r.consumed_j,
            distance_m: r.distance_m,
            final_g_best_w: r.final_g_best_w,
            delta_net_j: r.net_j - first.net_j,
            delta_distance_m: r.distance_m - first.distance_m,
        })
        .collect();
    Ok(Comparison {
        family: first.family.clone(),
        seed: first.seed,
        rows,
    })
}

const HEADER: [&str; 10] = [
    "scenario",
    "strategy",
    "trials",
    "net_j",
    "harvested_j",
    "consumed_j",
    "distance_m",
    "final_g_best_w",
    "delta_net_j",
    "delta_distance_m",
];

impl ComparisonRow {
    fn cells(&self) -> [String; 10] {
        [
            self.scenario.clone(),
            self.strategy.clone(),
            self.trials.to_string(),
            self.net_j.to_string(),
            self.harvested_j.to_string(),
            self.consumed_j.to_string(),
            self.distance_m.to_string(),
            self.final_g_best_w.to_string(),
            self.delta_net_j.to_string(),
            self.delta_distance_m.to_string(),
        ]
    }
}

impl Comparison {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "family `{}`, seed {}\n", self.family, self.seed);
        let _ = writeln!(out, "| {} |", HEADER.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
        for row in &self.rows {
            let cells = row.cells();
            let shown: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(i, c)| match i {
                    3..=9 => format!("{:.3}", c.parse::<f64>().unwrap_or(f64::NAN)),
                    _ => c.clone(),
                })
                .collect();
            let _ = writeln!(out, "| {} |", shown.join(" | "));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(HEADER).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.cells()).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}
