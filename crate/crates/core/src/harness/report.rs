use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialKind {
    Coarse,
    Fine,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub index: usize,
    pub kind: TrialKind,
    pub dx_m: f64,
    pub start_t_s: f64,
    pub end_t_s: f64,
    pub iterations: u32,
    /// Distance covered by the search legs.
    pub search_distance_m: f64,
    /// Distance of the final move back to `x_best`.
    pub return_distance_m: f64,
    pub seed_g_best_w: f64,
    pub final_g_best_w: f64,
    pub x_best_m: f64,
    pub aborted: bool,
    pub truncated: bool,
}

impl TrialSummary {
    pub fn distance_m(&self) -> f64 {
        self.search_distance_m + self.return_distance_m
    }

    pub fn duration_s(&self) -> f64 {
        self.end_t_s - self.start_t_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub strategy: String,
    /// Fingerprint shared by scenarios that differ only in name/strategy.
    pub family: String,
    pub trials: usize,
    pub final_g_best_w: f64,
    pub final_x_best_m: f64,
    pub harvested_j: f64,
    pub consumed_j: f64,
    pub clamp_overflow_j: f64,
    pub clamp_deficit_j: f64,
    pub net_j: f64,
    pub initial_charge_j: f64,
    pub final_charge_j: f64,
    pub distance_m: f64,
    pub end_t_s: f64,
    pub trial_summaries: Vec<TrialSummary>,
}

impl RunReport {
    /// `net_j` minus what the ledger says it should be; zero up to rounding.
    pub fn ledger_residual_j(&self) -> f64 {
        self.net_j
            - (self.harvested_j - self.consumed_j - self.clamp_overflow_j + self.clamp_deficit_j)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}
