use serde::{Deserialize, Serialize};

use super::{condition_a, wake_gate, Gate, Phase, StsParams, StsState, TrialOutcome};
use crate::envfield::PowerSource;
use crate::error::Result;
use crate::harness::report::{RunReport, TrialKind, TrialSummary};
use crate::harness::scenario::Scenario;
use crate::harness::trace::{Event, TraceRecord, TraceSink};
use crate::plant::{Measurement, Mode, RobotPlant, Travel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Damped 1-D search.
    Sts,
    /// Never moves.
    Fixed,
    /// Exhaustive traverse of the wire.
    FullSweep,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Sts => "sts",
            Strategy::Fixed => "fixed",
            Strategy::FullSweep => "full_sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sts" => Some(Strategy::Sts),
            "fixed" => Some(Strategy::Fixed),
            "full_sweep" => Some(Strategy::FullSweep),
            _ => None,
        }
    }
}

/// One robot on one field, recording into a trace sink.
pub struct Simulation<'a, F: PowerSource + ?Sized> {
    pub field: &'a F,
    pub params: StsParams,
    pub plant: RobotPlant,
    pub state: StsState,
    pub strategy: Strategy,
    /// Trials stop issuing moves once the clock passes this instant.
    pub end_t_s: f64,
    pub trials: Vec<TrialSummary>,
    sink: &'a mut dyn TraceSink,
    last_p_w: f64,
    sleep_announced: bool,
}

impl<'a, F: PowerSource + ?Sized> Simulation<'a, F> {
    pub fn new(
        field: &'a F,
        params: StsParams,
        plant: RobotPlant,
        strategy: Strategy,
        sink: &'a mut dyn TraceSink,
    ) -> Self {
        let state = StsState::boot(plant.x_m, &params);
        Simulation {
            field,
            params,
            plant,
            state,
            strategy,
            end_t_s: f64::INFINITY,
            trials: Vec::new(),
            sink,
            last_p_w: 0.0,
            sleep_announced: false,
        }
    }

    fn snapshot(&self, event: Event) -> TraceRecord {
        TraceRecord {
            t_s: self.plant.t_s,
            x_m: self.plant.x_m,
            phase: self.state.phase,
            event,
            p_w: self.last_p_w,
            g_best_w: self.state.g_best_w,
            x_best_m: self.state.x_best_m,
            inertia: self.state.inertia,
            dx_m: self.state.dx_m,
            direction: self.state.direction.as_i8(),
            charge_j: self.plant.battery.charge_j,
            odometer_m: self.plant.odometer_m,
        }
    }

    fn flush_saturations(&mut self) -> Result<()> {
        for s in self.plant.drain_saturations() {
            let mut rec = self.snapshot(Event::Saturation);
            rec.t_s = s.t_s;
            rec.x_m = s.x_m;
            rec.charge_j = s.charge_j;
            rec.p_w = s.clamped_j;
            self.sink.record(&rec)?;
        }
        Ok(())
    }

    pub(crate) fn emit(&mut self, event: Event) -> Result<()> {
        self.flush_saturations()?;
        let rec = self.snapshot(event);
        self.sink.record(&rec)
    }

    /// Settle for `t_p_s` and read the panel. Does not emit.
    pub(crate) fn sample(&mut self) -> Result<Measurement> {
        let m = self
            .plant
            .measure_power(self.field, self.params.t_p_s, self.params.t_p_s)?;
        self.last_p_w = m.power_w;
        Ok(m)
    }

    pub(crate) fn travel(&mut self, target_m: f64) -> Result<Travel> {
        if target_m == self.plant.x_m {
            return self.plant.travel_to(self.field, target_m);
        }
        self.emit(Event::MoveStart)?;
        let travel = self.plant.travel_to(self.field, target_m)?;
        self.emit(Event::MoveEnd)?;
        Ok(travel)
    }

    pub(crate) fn past_end(&self) -> bool {
        self.plant.t_s >= self.end_t_s
    }

    fn hold(&mut self, duration_s: f64, mode: Mode) -> Result<bool> {
        let d = duration_s.min(self.end_t_s - self.plant.t_s);
        if d <= 0.0 {
            return Ok(!self.plant.exhausted());
        }
        self.plant.hold(self.field, d, mode)
    }

    pub(crate) fn enter_sleep(&mut self) -> Result<()> {
        self.state.phase = Phase::Sleep;
        if !self.params.retain_g_best_across_sleep {
            self.state.g_best_w = 0.0;
        }
        self.sleep_announced = true;
        self.emit(Event::Sleep)
    }

    fn start_trial(&mut self, seed: Measurement) -> Result<()> {
        let outcome = match self.strategy {
            Strategy::Sts => {
                let kind = if self.state.ever_searched {
                    TrialKind::Fine
                } else {
                    TrialKind::Coarse
                };
                self.search_trial(seed, kind)?
            }
            Strategy::FullSweep => crate::oracle::full_sweep_trial(self, seed)?,
            Strategy::Fixed => unreachable!("the fixed baseline never searches"),
        };
        if outcome.summary.aborted {
            self.enter_sleep()?;
        }
        Ok(())
    }

    /// Gate passed while sleeping (or at boot).
    fn wake(&mut self, m: Measurement) -> Result<()> {
        self.sleep_announced = false;
        let search = self.strategy != Strategy::Fixed
            && condition_a(m.power_w, self.state.g_best_w, &self.params);
        self.state.phase = if search {
            Phase::Searching
        } else {
            Phase::Monitoring
        };
        self.state.p0_w = m.power_w;
        if self.strategy == Strategy::Fixed && self.state.g_best_w == 0.0 {
            self.state.g_best_w = m.power_w;
            self.state.x_best_m = m.x_m;
        }
        self.emit(Event::Wake)?;
        if search {
            self.start_trial(m)?;
        }
        Ok(())
    }

    fn sleep_check(&mut self) -> Result<()> {
        let m = self.sample()?;
        self.emit(Event::Measure)?;
        let charged = !self.plant.exhausted() && self.plant.battery.charge_j > 0.0;
        if wake_gate(m.power_w, &self.params) == Gate::Awake && charged {
            self.wake(m)
        } else if !self.sleep_announced {
            self.enter_sleep()
        } else {
            Ok(())
        }
    }

    /// One Monitoring period: wait, sample at `x_best`, decide.
    pub fn monitor_step(&mut self) -> Result<Phase> {
        let wait = self.params.monitor_period_s - self.params.t_p_s;
        if !self.hold(wait, Mode::Idle)? {
            self.enter_sleep()?;
            return Ok(self.state.phase);
        }
        if self.past_end() {
            return Ok(self.state.phase);
        }
        let m = self.sample()?;
        self.state.p0_w = m.power_w;
        self.emit(Event::Measure)?;
        if self.plant.exhausted() || wake_gate(m.power_w, &self.params) == Gate::Sleep {
            self.enter_sleep()?;
        } else if self.strategy != Strategy::Fixed
            && condition_a(m.power_w, self.state.g_best_w, &self.params)
        {
            self.emit(Event::Retrigger)?;
            self.start_trial(m)?;
        }
        Ok(self.state.phase)
    }

    /// Drive the state machine until `end_t_s`.
    pub fn run_until(&mut self, end_t_s: f64) -> Result<()> {
        self.end_t_s = end_t_s;
        if self.plant.t_s == 0.0 && self.trials.is_empty() && self.state.phase == Phase::Sleep {
            self.sleep_check()?;
        }
        while !self.past_end() {
            match self.state.phase {
                Phase::Sleep => {
                    let wait = self.params.sleep_recheck_s - self.params.t_p_s;
                    self.hold(wait, Mode::Sleep)?;
                    if self.past_end() {
                        break;
                    }
                    self.sleep_check()?;
                }
                Phase::Monitoring => {
                    self.monitor_step()?;
                }
                Phase::Searching => {
                    // a trial was cut off by the end time
                    break;
                }
            }
        }
        self.flush_saturations()
    }

    pub fn last_power_w(&self) -> f64 {
        self.last_p_w
    }

    pub(crate) fn push_trial(&mut self, summary: TrialSummary) -> TrialOutcome {
        self.trials.push(summary.clone());
        TrialOutcome { summary }
    }
}

/// One Monitoring step as a free function over owned state.
pub fn monitor_step<F: PowerSource + ?Sized>(
    state: StsState,
    plant: RobotPlant,
    field: &F,
    params: &StsParams,
) -> Result<(Phase, StsState, RobotPlant, Vec<TraceRecord>)> {
    let mut trace = Vec::new();
    let mut sim = Simulation::new(field, *params, plant, Strategy::Sts, &mut trace);
    sim.state = state;
    sim.state.phase = Phase::Monitoring;
    let phase = sim.monitor_step()?;
    let state = sim.state;
    let plant = sim.plant;
    Ok((phase, state, plant, trace))
}

/// Run a scenario with its configured strategy.
pub fn run(scenario: &Scenario, sink: &mut dyn TraceSink) -> Result<RunReport> {
    let field = scenario.field()?;
    let plant = scenario.plant();
    let initial_charge = plant.battery.charge_j;
    let mut sim = Simulation::new(&field, scenario.sts, plant, scenario.strategy, sink);
    sim.run_until(scenario.duration_s)?;

    let plant = &sim.plant;
    Ok(RunReport {
        scenario: scenario.name.clone(),
        seed: scenario.seed,
        strategy: scenario.strategy.as_str().to_string(),
        family: scenario.family(),
        trials: sim.trials.len(),
        final_g_best_w: sim.state.g_best_w,
        final_x_best_m: sim.state.x_best_m,
        harvested_j: plant.ledger.harvested_j,
        consumed_j: plant.ledger.consumed_j,
        clamp_overflow_j: plant.ledger.overflow_j,
        clamp_deficit_j: plant.ledger.deficit_j,
        net_j: plant.battery.charge_j - initial_charge,
        initial_charge_j: initial_charge,
        final_charge_j: plant.battery.charge_j,
        distance_m: plant.odometer_m,
        end_t_s: plant.t_s,
        trial_summaries: sim.trials.clone(),
    })
}
