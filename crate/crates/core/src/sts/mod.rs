//! Mobile solar-tracking state machine.
//!
//! The robot sleeps until the panel reads above the wake threshold, then runs
//! an inertia-damped 1-D search along the wire:
//!
//! ```text
//! A      = (P0 < G_best - G_best * 0.2) or (G_best == 0)
//! x_i    = x_{i-1} + dir * (dx * I)
//! I      = I * zeta
//! ```
//!
//! After a trial it parks at `x_best` and keeps sampling. A drop of more than
//! the re-trigger fraction below `G_best` starts a new trial with the fine
//! step; the very first trial after boot uses the coarse step.

mod runner;
mod trial;

use serde::{Deserialize, Serialize};

use crate::envfield::WireSpan;
use crate::error::{Error, Result};

pub use runner::{monitor_step, run, Simulation, Strategy};
pub use trial::{search_trial, TrialOutcome};

pub const DEFAULT_WAKE_THRESHOLD_W: f64 = 0.05;
pub const DEFAULT_RETRIGGER_FRAC: f64 = 0.2;
pub const DEFAULT_DX_COARSE_M: f64 = 7.8;
pub const DEFAULT_DX_FINE_M: f64 = 2.25;
pub const DEFAULT_ZETA: f64 = 0.85;
pub const DEFAULT_MIN_STEP_M: f64 = 0.1;
pub const DEFAULT_MAX_ITERS: u32 = 50;
/// Lower bound on the MPPT settle time.
pub const MIN_SETTLE_S: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StsParams {
    pub wake_threshold_w: f64,
    pub retrigger_frac: f64,
    pub dx_coarse_m: f64,
    pub dx_fine_m: f64,
    pub inertia0: f64,
    pub zeta: f64,
    pub min_step_m: f64,
    pub max_iters: u32,
    pub t_p_s: f64,
    pub monitor_period_s: f64,
    pub sleep_recheck_s: f64,
    /// Keep `G_best` through Sleep. When false it is zeroed on entering Sleep.
    pub retain_g_best_across_sleep: bool,
}

impl Default for StsParams {
    fn default() -> Self {
        StsParams {
            wake_threshold_w: DEFAULT_WAKE_THRESHOLD_W,
            retrigger_frac: DEFAULT_RETRIGGER_FRAC,
            dx_coarse_m: DEFAULT_DX_COARSE_M,
            dx_fine_m: DEFAULT_DX_FINE_M,
            inertia0: 1.0,
            zeta: DEFAULT_ZETA,
            min_step_m: DEFAULT_MIN_STEP_M,
            max_iters: DEFAULT_MAX_ITERS,
            t_p_s: MIN_SETTLE_S,
            monitor_period_s: 60.0,
            sleep_recheck_s: 300.0,
            retain_g_best_across_sleep: true,
        }
    }
}

impl StsParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be finite and > 0"))
            }
        };
        if !(self.wake_threshold_w.is_finite() && self.wake_threshold_w >= 0.0) {
            return Err(Error::invalid(
                "sts.wake_threshold_w",
                "must be finite and >= 0",
            ));
        }
        if !(self.retrigger_frac > 0.0 && self.retrigger_frac < 1.0) {
            return Err(Error::invalid("sts.retrigger_frac", "must lie in (0, 1)"));
        }
        positive(self.dx_fine_m, "sts.dx_fine_m")?;
        positive(self.dx_coarse_m, "sts.dx_coarse_m")?;
        if self.dx_fine_m >= self.dx_coarse_m {
            return Err(Error::invalid(
                "sts.dx_fine_m",
                "must be smaller than sts.dx_coarse_m",
            ));
        }
        positive(self.inertia0, "sts.inertia0")?;
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return Err(Error::invalid("sts.zeta", "must lie in (0, 1)"));
        }
        positive(self.min_step_m, "sts.min_step_m")?;
        if self.max_iters == 0 {
            return Err(Error::invalid("sts.max_iters", "must be >= 1"));
        }
        if !(self.t_p_s.is_finite() && self.t_p_s >= MIN_SETTLE_S) {
            return Err(Error::invalid("sts.t_p_s", "must be >= 0.05 s"));
        }
        if !(self.monitor_period_s.is_finite() && self.monitor_period_s >= self.t_p_s) {
            return Err(Error::invalid(
                "sts.monitor_period_s",
                "must be >= sts.t_p_s",
            ));
        }
        if !(self.sleep_recheck_s.is_finite() && self.sleep_recheck_s >= self.t_p_s) {
            return Err(Error::invalid(
                "sts.sleep_recheck_s",
                "must be >= sts.t_p_s",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Sleep,
    Searching,
    Monitoring,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Sleep => "sleep",
            Phase::Searching => "searching",
            Phase::Monitoring => "monitoring",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Awake,
    Sleep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryHit {
    None,
    Low,
    High,
}

/// Live search state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StsState {
    pub phase: Phase,
    pub g_best_w: f64,
    pub x_best_m: f64,
    pub p0_w: f64,
    pub inertia: f64,
    pub dx_m: f64,
    pub direction: Direction,
    pub iter: u32,
    /// Set after the first trial; selects the fine reinitialization.
    pub ever_searched: bool,
}

impl StsState {
    pub fn boot(x_m: f64, params: &StsParams) -> Self {
        StsState {
            phase: Phase::Sleep,
            g_best_w: 0.0,
            x_best_m: x_m,
            p0_w: 0.0,
            inertia: params.inertia0,
            dx_m: params.dx_coarse_m,
            direction: Direction::Forward,
            iter: 0,
            ever_searched: false,
        }
    }
}

pub fn wake_gate(p0_w: f64, params: &StsParams) -> Gate {
    if p0_w > params.wake_threshold_w {
        Gate::Awake
    } else {
        Gate::Sleep
    }
}

/// Whether a new search trial is warranted.
pub fn condition_a(p0_w: f64, g_best_w: f64, params: &StsParams) -> bool {
    p0_w < g_best_w - g_best_w * params.retrigger_frac || g_best_w == 0.0
}

/// Unconstrained next position.
pub fn propose_next(x_prev_m: f64, dx_m: f64, inertia: f64, direction: Direction) -> f64 {
    x_prev_m + direction.sign() * (dx_m * inertia)
}

pub fn constrain_bounds(x_proposed_m: f64, span: WireSpan) -> (f64, BoundaryHit) {
    if x_proposed_m > span.length_m {
        (span.length_m, BoundaryHit::High)
    } else if x_proposed_m < 0.0 {
        (0.0, BoundaryHit::Low)
    } else {
        (x_proposed_m, BoundaryHit::None)
    }
}

pub fn update_inertia(inertia: f64, params: &StsParams) -> f64 {
    inertia * params.zeta
}

/// Keep heading on improvement, turn around otherwise (ties included).
pub fn decide_direction(p0_w: f64, p_i_w: f64, direction: Direction) -> Direction {
    if p_i_w > p0_w {
        direction
    } else {
        direction.flipped()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wake_gate_examples() {
        let p = StsParams::default();
        assert_eq!(wake_gate(0.07, &p), Gate::Awake);
        assert_eq!(wake_gate(0.05, &p), Gate::Sleep);
        assert_eq!(wake_gate(0.0, &p), Gate::Sleep);
    }

    #[test]
    fn condition_a_examples() {
        let p = StsParams::default();
        assert!(condition_a(1.0, 0.0, &p));
        assert!(condition_a(0.79, 1.0, &p));
        assert!(!condition_a(0.80, 1.0, &p));
        assert!(!condition_a(0.85, 1.0, &p));
        assert!(condition_a(0.5, 1.0, &p));
    }

    #[test]
    fn propose_next_examples() {
        assert_eq!(propose_next(5.0, 7.8, 1.0, Direction::Forward), 12.8);
        assert_eq!(propose_next(5.0, 2.25, 0.5, Direction::Backward), 3.875);
        assert!((propose_next(5.0, 7.8, 1e-12, Direction::Forward) - 5.0).abs() < 1e-10);
    }

    #[test]
    fn constrain_bounds_examples() {
        let span = WireSpan::new(16.0).unwrap();
        assert_eq!(constrain_bounds(18.0, span), (16.0, BoundaryHit::High));
        assert_eq!(constrain_bounds(-2.0, span), (0.0, BoundaryHit::Low));
        assert_eq!(constrain_bounds(7.0, span), (7.0, BoundaryHit::None));
    }

    #[test]
    fn inertia_damping() {
        let p = StsParams {
            zeta: 0.7,
            ..StsParams::default()
        };
        assert_eq!(update_inertia(1.0, &p), 0.7);
        let mut i = 1.0;
        for k in 1..=10 {
            i = update_inertia(i, &p);
            assert!((i - 0.7f64.powi(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn damping_updates_until_min_step() {
        // first k with 7.8 * 0.7^k < 0.1, by direct iteration
        let mut k = 0;
        let mut step = 7.8;
        while step >= 0.1 {
            step *= 0.7;
            k += 1;
        }
        assert_eq!(k, 13);
        let bound = ((0.1f64 / 7.8).ln() / 0.7f64.ln()).ceil() as u32;
        assert_eq!(bound, 13);
    }

    #[test]
    fn decide_direction_examples() {
        assert_eq!(
            decide_direction(1.0, 1.5, Direction::Forward),
            Direction::Forward
        );
        assert_eq!(
            decide_direction(1.0, 0.4, Direction::Forward),
            Direction::Backward
        );
        assert_eq!(
            decide_direction(1.0, 1.0, Direction::Backward),
            Direction::Forward
        );
    }

    #[test]
    fn params_validation_names_the_field() {
        let bad = StsParams {
            zeta: 1.2,
            ..StsParams::default()
        };
        let err = bad.validate().unwrap_err().to_string();
        assert!(err.contains("sts.zeta"), "{err}");
        let bad = StsParams {
            t_p_s: 0.04,
            ..StsParams::default()
        };
        assert!(bad
            .validate()
            .unwrap_err()
            .to_string()
            .contains("sts.t_p_s"));
        let bad = StsParams {
            dx_fine_m: 8.0,
            ..StsParams::default()
        };
        assert!(bad.validate().is_err());
        assert!(StsParams::default().validate().is_ok());
    }
}
