//! Kinematic robot on the wire with a battery and a fixed power draw per
//! operating mode. Owns the simulation clock.
//!
//! Integration is explicit fixed-step: the panel power is sampled at the
//! start of each step, the last step of a move or dwell is shortened so the
//! clock lands exactly on the arrival or measurement instant.

use serde::{Deserialize, Serialize};

use crate::envfield::PowerSource;
use crate::error::{Error, Result};

/// 1 m/min.
pub const DEFAULT_SPEED_MPS: f64 = 1.0 / 60.0;
pub const DEFAULT_STEP_S: f64 = 1.0;
pub const V_FULL: f64 = 8.2;
pub const V_EMPTY: f64 = 4.0;
pub const DEFAULT_ETA_CONV: f64 = 0.90;
pub const DEFAULT_CAPACITY_J: f64 = 16_000.0;
pub const DEFAULT_INITIAL_SOC: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Move,
    Idle,
    Sleep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    pub capacity_j: f64,
    pub charge_j: f64,
    pub v_full: f64,
    pub v_empty: f64,
}

impl Battery {
    pub fn with_soc(capacity_j: f64, soc: f64) -> Self {
        Battery {
            capacity_j,
            charge_j: capacity_j * soc,
            v_full: V_FULL,
            v_empty: V_EMPTY,
        }
    }

    pub fn soc(&self) -> f64 {
        self.charge_j / self.capacity_j
    }

    pub fn terminal_voltage(&self) -> f64 {
        self.v_empty + self.soc() * (self.v_full - self.v_empty)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacity_j.is_finite() && self.capacity_j > 0.0) {
            return Err(Error::invalid(
                "battery.capacity_j",
                "must be finite and > 0",
            ));
        }
        if !(0.0..=self.capacity_j).contains(&self.charge_j) {
            return Err(Error::invalid(
                "battery.initial_soc",
                "initial charge must lie in [0, capacity_j]",
            ));
        }
        if !(self.v_empty > 0.0 && self.v_empty < self.v_full) {
            return Err(Error::invalid(
                "battery.v_empty",
                "must satisfy 0 < v_empty < v_full",
            ));
        }
        Ok(())
    }
}

impl Default for Battery {
    fn default() -> Self {
        Battery::with_soc(DEFAULT_CAPACITY_J, DEFAULT_INITIAL_SOC)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    /// Motor plus logic while moving.
    pub p_move_w: f64,
    /// Logic awake, stationary.
    pub p_idle_w: f64,
    pub p_sleep_w: f64,
    /// DC-DC efficiency applied to harvested power.
    pub eta_conv: f64,
}

impl Default for PowerBudget {
    fn default() -> Self {
        PowerBudget {
            p_move_w: 2.0,
            p_idle_w: 0.25,
            p_sleep_w: 0.02,
            eta_conv: DEFAULT_ETA_CONV,
        }
    }
}

impl PowerBudget {
    pub fn draw(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Move => self.p_move_w,
            Mode::Idle => self.p_idle_w,
            Mode::Sleep => self.p_sleep_w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_sleep_w >= 0.0 && self.p_sleep_w.is_finite()) {
            return Err(Error::invalid("plant.p_sleep_w", "must be finite and >= 0"));
        }
        if self.p_idle_w.is_nan() || self.p_sleep_w > self.p_idle_w {
            return Err(Error::invalid(
                "plant.p_idle_w",
                "must be >= plant.p_sleep_w",
            ));
        }
        if !(self.p_idle_w <= self.p_move_w && self.p_move_w.is_finite()) {
            return Err(Error::invalid(
                "plant.p_move_w",
                "must be finite and >= plant.p_idle_w",
            ));
        }
        if !(self.eta_conv > 0.0 && self.eta_conv <= 1.0) {
            return Err(Error::invalid("plant.eta_conv", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub power_w: f64,
    pub x_m: f64,
    pub t_s: f64,
}

/// Running energy totals. `harvested_j` is after conversion losses.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub harvested_j: f64,
    pub consumed_j: f64,
    /// Energy discarded because the battery was full.
    pub overflow_j: f64,
    /// Demand that could not be met because the battery was empty.
    pub deficit_j: f64,
}

impl EnergyLedger {
    /// Expected change in stored charge.
    pub fn balance_j(&self) -> f64 {
        self.harvested_j - self.consumed_j - self.overflow_j + self.deficit_j
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    Empty,
    Full,
}

/// Onset of a clamping episode at one of the battery bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturation {
    pub t_s: f64,
    pub x_m: f64,
    pub bound: Bound,
    pub charge_j: f64,
    pub clamped_j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Travel {
    pub distance_m: f64,
    pub duration_s: f64,
    /// False when the battery ran out before arrival.
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotPlant {
    pub x_m: f64,
    pub t_s: f64,
    pub speed_mps: f64,
    pub step_s: f64,
    pub battery: Battery,
    pub budget: PowerBudget,
    pub odometer_m: f64,
    pub ledger: EnergyLedger,
    clamped: Option<Bound>,
    exhausted: bool,
    saturations: Vec<Saturation>,
}

impl RobotPlant {
    pub fn new(x_m: f64, speed_mps: f64, battery: Battery, budget: PowerBudget) -> Self {
        RobotPlant {
            x_m,
            t_s: 0.0,
            speed_mps,
            step_s: DEFAULT_STEP_S,
            battery,
            budget,
            odometer_m: 0.0,
            ledger: EnergyLedger::default(),
            clamped: None,
            exhausted: false,
            saturations: Vec::new(),
        }
    }

    pub fn with_step(mut self, step_s: f64) -> Self {
        self.step_s = step_s;
        self
    }

    /// True while the last integrated step could not cover its demand.
    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn drain_saturations(&mut self) -> Vec<Saturation> {
        std::mem::take(&mut self.saturations)
    }

    /// One explicit integrator step of length `dt_s` in `mode`. Position
    /// is not changed here; `travel_to` moves the robot between steps.
    pub fn advance<F: PowerSource + ?Sized>(
        &mut self,
        field: &F,
        dt_s: f64,
        mode: Mode,
    ) -> Result<()> {
        if dt_s.is_nan() || dt_s <= 0.0 {
            return Err(Error::invalid("dt_s", "integrator step must be > 0"));
        }
        let harvested =
            dt_s * (self.budget.eta_conv * field.available_power(self.x_m, self.t_s)?);
        let consumed = dt_s * self.budget.draw(mode);
        let unclamped = self.battery.charge_j + (harvested - consumed);

        self.ledger.harvested_j += harvested;
        self.ledger.consumed_j += consumed;
        self.t_s += dt_s;

        let (charge, bound, clamped_j) = if unclamped > self.battery.capacity_j {
            let over = unclamped - self.battery.capacity_j;
            self.ledger.overflow_j += over;
            (self.battery.capacity_j, Some(Bound::Full), over)
        } else if unclamped < 0.0 {
            self.ledger.deficit_j += -unclamped;
            (0.0, Some(Bound::Empty), -unclamped)
        } else {
            (unclamped, None, 0.0)
        };
        self.battery.charge_j = charge;
        self.exhausted = bound == Some(Bound::Empty);

        if let Some(b) = bound {
            if self.clamped != Some(b) {
                self.saturations.push(Saturation {
                    t_s: self.t_s,
                    x_m: self.x_m,
                    bound: b,
                    charge_j: charge,
                    clamped_j,
                });
            }
        }
        self.clamped = bound;
        Ok(())
    }

    /// Stay in place for `duration_s`. Returns false if the battery ran
    /// out, in which case the clock stops at that step.
    pub fn hold<F: PowerSource + ?Sized>(
        &mut self,
        field: &F,
        duration_s: f64,
        mode: Mode,
    ) -> Result<bool> {
        let mut remaining = duration_s;
        while remaining > 0.0 {
            let dt = if remaining > self.step_s {
                self.step_s
            } else {
                remaining
            };
            self.advance(field, dt, mode)?;
            remaining -= dt;
            if self.exhausted {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Move to `target_m` at constant speed in [`Mode::Move`].
    pub fn travel_to<F: PowerSource + ?Sized>(
        &mut self,
        field: &F,
        target_m: f64,
    ) -> Result<Travel> {
        field.span().check(target_m)?;
        let start = self.x_m;
        let distance = (target_m - start).abs();
        let t0 = self.t_s;
        if distance == 0.0 {
            return Ok(Travel {
                distance_m: 0.0,
                duration_s: 0.0,
                completed: true,
            });
        }
        let sign = if target_m > start { 1.0 } else { -1.0 };
        let duration = distance / self.speed_mps;
        let mut elapsed = 0.0;
        while elapsed < duration {
            let remaining = duration - elapsed;
            let dt = if remaining > self.step_s {
                self.step_s
            } else {
                remaining
            };
            self.advance(field, dt, Mode::Move)?;
            elapsed += dt;
            if elapsed >= duration {
                self.x_m = target_m;
            } else {
                self.x_m = start + sign * self.speed_mps * elapsed;
            }
            if self.exhausted && elapsed < duration {
                let covered = (self.x_m - start).abs();
                self.odometer_m += covered;
                return Ok(Travel {
                    distance_m: covered,
                    duration_s: self.t_s - t0,
                    completed: false,
                });
            }
        }
        self.odometer_m += distance;
        Ok(Travel {
            distance_m: distance,
            duration_s: self.t_s - t0,
            completed: true,
        })
    }

    /// Wait `dwell_s` in place for the MPPT to settle, then read the panel.
    /// The converter is treated as fully converged once `t_p_s` has passed.
    pub fn measure_power<F: PowerSource + ?Sized>(
        &mut self,
        field: &F,
        dwell_s: f64,
        t_p_s: f64,
    ) -> Result<Measurement> {
        if dwell_s.is_nan() || dwell_s < t_p_s {
            return Err(Error::SettleViolation { dwell_s, t_p_s });
        }
        self.hold(field, dwell_s, Mode::Idle)?;
        Ok(Measurement {
            power_w: field.available_power(self.x_m, self.t_s)?,
            x_m: self.x_m,
            t_s: self.t_s,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envfield::{PowerField, ShadowBand, SunEnvelope, WireSpan};
    use proptest::prelude::*;

    struct Constant(f64);

    impl PowerSource for Constant {
        fn span(&self) -> WireSpan {
            WireSpan { length_m: 16.0 }
        }
        fn available_power(&self, _x: f64, _t: f64) -> Result<f64> {
            Ok(self.0)
        }
    }

    fn plant() -> RobotPlant {
        RobotPlant::new(
            0.0,
            DEFAULT_SPEED_MPS,
            Battery::default(),
            PowerBudget::default(),
        )
    }

    #[test]
    fn idle_without_harvest_drains_exactly() {
        let mut p = plant();
        p.budget.p_idle_w = 0.2;
        let before = p.battery.charge_j;
        p.hold(&Constant(0.0), 100.0, Mode::Idle).unwrap();
        assert!((before - p.battery.charge_j - 20.0).abs() < 1e-9);
        assert!((p.t_s - 100.0).abs() < 1e-9);
    }

    #[test]
    fn idle_equilibrium_keeps_charge() {
        let mut p = plant();
        p.budget.eta_conv = 0.5;
        p.budget.p_idle_w = 0.25;
        let before = p.battery.charge_j;
        p.hold(&Constant(0.5), 500.0, Mode::Idle).unwrap();
        assert_eq!(p.battery.charge_j, before);
    }

    #[test]
    fn sleep_overnight() {
        let mut p = plant();
        let before = p.battery.charge_j;
        p.hold(&Constant(0.0), 36_000.0, Mode::Sleep).unwrap();
        assert!((before - p.battery.charge_j - 0.02 * 36_000.0).abs() < 1e-6);
    }

    #[test]
    fn travel_examples() {
        let field = Constant(0.0);
        let mut p = plant();
        p.x_m = 2.0;
        let t = p.travel_to(&field, 2.0).unwrap();
        assert_eq!(t.duration_s, 0.0);
        assert_eq!(p.t_s, 0.0);
        assert_eq!(p.odometer_m, 0.0);

        let mut p = plant();
        p.travel_to(&field, 1.0).unwrap();
        assert!((p.t_s - 60.0).abs() < 1e-9);
        assert_eq!(p.x_m, 1.0);

        let mut p = plant();
        let before = p.battery.charge_j;
        p.travel_to(&field, 3.0).unwrap();
        assert!((before - p.battery.charge_j - 360.0).abs() < 1e-9);
        assert!((p.t_s - 180.0).abs() < 1e-9);
        assert_eq!(p.x_m, 3.0);
        assert_eq!(p.odometer_m, 3.0);
    }

    #[test]
    fn travel_rejects_targets_off_the_wire() {
        let mut p = plant();
        assert!(matches!(
            p.travel_to(&Constant(0.0), 16.5),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn measure_power_enforces_settle_time() {
        let span = WireSpan::new(16.0).unwrap();
        let env = SunEnvelope {
            peak_power_w: 5.0,
            sunrise_s: -100.0,
            sunset_s: 100.0,
            diffuse_floor_w: 0.07,
        };
        let shade = ShadowBand {
            center0_m: 3.0,
            width_m: 2.0,
            penumbra_m: 0.0,
            drift_mps: 0.0,
            opacity: 1.0,
        };
        let field = PowerField::new(span, env, vec![shade]).unwrap();
        let mut p = plant();
        p.x_m = 10.0;
        p.t_s = -0.05;
        let m = p.measure_power(&field, 0.05, 0.05).unwrap();
        assert_eq!(m.power_w, 5.0);
        assert!(matches!(
            p.measure_power(&field, 0.04, 0.05),
            Err(Error::SettleViolation { .. })
        ));
        p.x_m = 3.0;
        let m = p.measure_power(&field, 1.0, 0.05).unwrap();
        assert_eq!(m.power_w, 0.07);
    }

    #[test]
    fn battery_voltage_endpoints() {
        let full = Battery::with_soc(100.0, 1.0);
        let empty = Battery::with_soc(100.0, 0.0);
        assert_eq!(full.terminal_voltage(), 8.2);
        assert_eq!(empty.terminal_voltage(), 4.0);
        assert!((Battery::with_soc(100.0, 0.5).terminal_voltage() - 6.1).abs() < 1e-12);
    }

    #[test]
    fn saturation_onsets_are_reported_once() {
        let mut p = RobotPlant::new(
            0.0,
            DEFAULT_SPEED_MPS,
            Battery::with_soc(10.0, 0.9),
            PowerBudget::default(),
        );
        p.hold(&Constant(5.0), 100.0, Mode::Idle).unwrap();
        let events = p.drain_saturations();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].bound, Bound::Full);
        assert_eq!(p.battery.charge_j, 10.0);
        assert!((p.ledger.balance_j() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exhaustion_stops_travel_in_place() {
        let mut p = RobotPlant::new(
            0.0,
            DEFAULT_SPEED_MPS,
            Battery::with_soc(100.0, 1.0),
            PowerBudget::default(),
        );
        let t = p.travel_to(&Constant(0.0), 10.0).unwrap();
        assert!(!t.completed);
        assert!(p.exhausted());
        assert!(p.x_m > 0.0 && p.x_m < 10.0);
        assert_eq!(p.battery.charge_j, 0.0);
        assert!((p.odometer_m - p.x_m).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn odometer_is_additive(targets in proptest::collection::vec(0.0..=16.0f64, 1..8)) {
            let mut p = plant();
            p.battery = Battery::with_soc(1e9, 0.5);
            let mut expected = 0.0;
            for t in targets {
                expected += (t - p.x_m).abs();
                let before = p.t_s;
                let leg = (t - p.x_m).abs();
                p.travel_to(&Constant(1.0), t).unwrap();
                prop_assert_eq!(p.x_m, t);
                prop_assert!((p.t_s - before - leg / p.speed_mps).abs() < 1e-6);
            }
            prop_assert!((p.odometer_m - expected).abs() < 1e-9);
        }

        #[test]
        fn energy_is_conserved(
            steps in proptest::collection::vec((0.01..50.0f64, 0..3usize, 0.0..6.0f64), 1..60),
            soc in 0.0..=1.0f64,
        ) {
            let mut p = RobotPlant::new(0.0, DEFAULT_SPEED_MPS, Battery::with_soc(500.0, soc), PowerBudget::default());
            let start = p.battery.charge_j;
            for (dt, m, pw) in steps {
                let mode = [Mode::Move, Mode::Idle, Mode::Sleep][m];
                p.advance(&Constant(pw), dt, mode).unwrap();
                prop_assert!(p.battery.charge_j >= 0.0 && p.battery.charge_j <= 500.0);
            }
            let net = p.battery.charge_j - start;
            prop_assert!((net - p.ledger.balance_j()).abs() < 1e-9 * 60.0);
        }
    }
}
