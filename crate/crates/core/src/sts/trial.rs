use super::{
    condition_a, constrain_bounds, decide_direction, propose_next, update_inertia, wake_gate,
    BoundaryHit, Direction, Gate, Phase, Simulation, Strategy, StsParams, StsState,
};
use crate::envfield::PowerSource;
use crate::error::{Error, Result};
use crate::harness::report::{TrialKind, TrialSummary};
use crate::harness::trace::{Event, TraceRecord};
use crate::plant::{Measurement, RobotPlant};

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub summary: TrialSummary,
}

impl<F: PowerSource + ?Sized> Simulation<'_, F> {
    /// The damped search, seeded with the measurement taken at the current
    /// position. Leaves the robot parked at `x_best` in Monitoring.
    pub fn search_trial(&mut self, seed: Measurement, kind: TrialKind) -> Result<TrialOutcome> {
        let params = self.params;
        let span = self.field.span();
        let dx = match kind {
            TrialKind::Fine => params.dx_fine_m,
            _ => params.dx_coarse_m,
        };

        self.state.phase = Phase::Searching;
        self.state.g_best_w = seed.power_w;
        self.state.x_best_m = seed.x_m;
        self.state.p0_w = seed.power_w;
        self.state.inertia = params.inertia0;
        self.state.dx_m = dx;
        self.state.direction = Direction::Forward;
        self.state.iter = 0;
        self.emit(Event::TrialStart)?;

        let start_t = self.plant.t_s;
        let start_odo = self.plant.odometer_m;
        let mut aborted = false;
        let mut truncated = false;

        loop {
            if self.state.dx_m * self.state.inertia < params.min_step_m
                || self.state.iter >= params.max_iters
            {
                break;
            }
            if self.past_end() {
                truncated = true;
                break;
            }
            let proposed = propose_next(
                self.plant.x_m,
                self.state.dx_m,
                self.state.inertia,
                self.state.direction,
            );
            let (target, hit) = constrain_bounds(proposed, span);
            if hit != BoundaryHit::None {
                self.emit(Event::Clamp)?;
            }
            if !self.travel(target)?.completed {
                aborted = true;
                break;
            }
            let m = self.sample()?;
            self.state.iter += 1;
            if m.power_w > self.state.g_best_w {
                self.state.g_best_w = m.power_w;
                self.state.x_best_m = m.x_m;
            } else {
                self.state.direction =
                    decide_direction(self.state.p0_w, m.power_w, self.state.direction);
            }
            match hit {
                BoundaryHit::Low => self.state.direction = Direction::Forward,
                BoundaryHit::High => self.state.direction = Direction::Backward,
                BoundaryHit::None => {}
            }
            self.state.inertia = update_inertia(self.state.inertia, &params);
            self.state.p0_w = m.power_w;
            self.emit(Event::Measure)?;
            if self.plant.exhausted() {
                aborted = true;
                break;
            }
        }

        let search_distance = self.plant.odometer_m - start_odo;
        let mut return_distance = 0.0;
        if !aborted && !truncated {
            let back = self.travel(self.state.x_best_m)?;
            return_distance = back.distance_m;
            aborted = !back.completed;
        }
        self.state.ever_searched = true;
        self.emit(Event::TrialEnd)?;
        self.state.phase = Phase::Monitoring;

        let summary = TrialSummary {
            index: self.trials.len(),
            kind,
            dx_m: dx,
            start_t_s: start_t,
            end_t_s: self.plant.t_s,
            iterations: self.state.iter,
            search_distance_m: search_distance,
            return_distance_m: return_distance,
            seed_g_best_w: seed.power_w,
            final_g_best_w: self.state.g_best_w,
            x_best_m: self.state.x_best_m,
            aborted,
            truncated,
        };
        Ok(self.push_trial(summary))
    }
}

/// Run one search trial on owned state. Takes the seed measurement at the
/// current position first; the wake gate and condition A must hold for it.
pub fn search_trial<F: PowerSource + ?Sized>(
    state: StsState,
    plant: RobotPlant,
    field: &F,
    params: &StsParams,
) -> Result<(StsState, RobotPlant, Vec<TraceRecord>, TrialOutcome)> {
    let mut trace = Vec::new();
    let mut sim = Simulation::new(field, *params, plant, Strategy::Sts, &mut trace);
    sim.state = state;
    let seed = sim.sample()?;
    if wake_gate(seed.power_w, params) != Gate::Awake {
        return Err(Error::Precondition(format!(
            "search trial requires the wake gate open, measured {} W",
            seed.power_w
        )));
    }
    if !condition_a(seed.power_w, state.g_best_w, params) {
        return Err(Error::Precondition(format!(
            "search trial requires condition A, measured {} W against G_best {} W",
            seed.power_w, state.g_best_w
        )));
    }
    let kind = if state.ever_searched {
        TrialKind::Fine
    } else {
        TrialKind::Coarse
    };
    let outcome = sim.search_trial(seed, kind)?;
    let state = sim.state;
    let plant = sim.plant;
    Ok((state, plant, trace, outcome))
}
