//! Ground truth and comparison strategies.
//!
//! [`sweep_argmax`] evaluates a frozen field on a fine grid without any
//! robot in the loop. The two baselines run the same Sleep/Monitoring
//! machine as the tracker but either never move or traverse the whole wire.

use serde::{Deserialize, Serialize};

use crate::envfield::{PowerSource, WireSpan};
use crate::error::{Error, Result};
use crate::harness::report::{RunReport, TrialKind, TrialSummary};
use crate::harness::scenario::Scenario;
use crate::harness::trace::{Event, TraceSink};
use crate::plant::Measurement;
use crate::sts::{Direction, Phase, Simulation, Strategy, TrialOutcome};

pub const DEFAULT_GRID_DELTA_M: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub x_star_m: f64,
    pub p_star_w: f64,
    pub grid_delta_m: f64,
}

/// Grid `{0, d, 2d, ..., L}`; `L` is appended when `d` does not divide it.
pub fn grid(span: WireSpan, delta_m: f64) -> Vec<f64> {
    let l = span.length_m;
    let n = (l / delta_m + 1e-9).floor() as usize;
    let mut xs: Vec<f64> = (0..=n).map(|k| (k as f64 * delta_m).min(l)).collect();
    if *xs.last().expect("grid has at least one point") < l {
        xs.push(l);
    }
    xs
}

/// Brute-force argmax over the grid at instant `t_s`, lowest x on ties.
pub fn sweep_argmax<F: PowerSource + ?Sized>(
    field: &F,
    t_s: f64,
    delta_m: f64,
) -> Result<SweepResult> {
    let span = field.span();
    if !(delta_m > 0.0 && delta_m <= span.length_m) {
        return Err(Error::invalid(
            "delta",
            format!("must lie in (0, {}] m", span.length_m),
        ));
    }
    let mut best = SweepResult {
        x_star_m: 0.0,
        p_star_w: f64::NEG_INFINITY,
        grid_delta_m: delta_m,
    };
    for x in grid(span, delta_m) {
        let p = field.available_power(x, t_s)?;
        if p > best.p_star_w {
            best.p_star_w = p;
            best.x_star_m = x;
        }
    }
    Ok(best)
}

/// Move to the nearer end, traverse the wire measuring every `min_step_m`,
/// then park at the best reading.
pub(crate) fn full_sweep_trial<F: PowerSource + ?Sized>(
    sim: &mut Simulation<'_, F>,
    seed: Measurement,
) -> Result<TrialOutcome> {
    let span = sim.field.span();
    let step = sim.params.min_step_m;

    sim.state.phase = Phase::Searching;
    sim.state.g_best_w = seed.power_w;
    sim.state.x_best_m = seed.x_m;
    sim.state.p0_w = seed.power_w;
    sim.state.inertia = sim.params.inertia0;
    sim.state.dx_m = step;
    sim.state.iter = 0;

    let mut points = grid(span, step);
    if sim.plant.x_m > 0.5 * span.length_m {
        points.reverse();
        sim.state.direction = Direction::Backward;
    } else {
        sim.state.direction = Direction::Forward;
    }
    sim.emit(Event::TrialStart)?;

    let start_t = sim.plant.t_s;
    let start_odo = sim.plant.odometer_m;
    let mut aborted = false;
    let mut truncated = false;
    for x in points {
        if sim.past_end() {
            truncated = true;
            break;
        }
        if !sim.travel(x)?.completed {
            aborted = true;
            break;
        }
        let m = sim.sample()?;
        sim.state.iter += 1;
        if m.power_w > sim.state.g_best_w {
            sim.state.g_best_w = m.power_w;
            sim.state.x_best_m = m.x_m;
        }
        sim.state.p0_w = m.power_w;
        sim.emit(Event::Measure)?;
        if sim.plant.exhausted() {
            aborted = true;
            break;
        }
    }

    let search_distance = sim.plant.odometer_m - start_odo;
    let mut return_distance = 0.0;
    if !aborted && !truncated {
        let back = sim.travel(sim.state.x_best_m)?;
        return_distance = back.distance_m;
        aborted = !back.completed;
    }
    sim.state.ever_searched = true;
    sim.emit(Event::TrialEnd)?;
    sim.state.phase = Phase::Monitoring;

    let summary = TrialSummary {
        index: sim.trials.len(),
        kind: TrialKind::Sweep,
        dx_m: step,
        start_t_s: start_t,
        end_t_s: sim.plant.t_s,
        iterations: sim.state.iter,
        search_distance_m: search_distance,
        return_distance_m: return_distance,
        seed_g_best_w: seed.power_w,
        final_g_best_w: sim.state.g_best_w,
        x_best_m: sim.state.x_best_m,
        aborted,
        truncated,
    };
    Ok(sim.push_trial(summary))
}

fn with_strategy(scenario: &Scenario, strategy: Strategy) -> Scenario {
    let mut s = scenario.clone();
    s.strategy = strategy;
    s
}

/// Control condition: the robot stays at its start position.
pub fn baseline_fixed(scenario: &Scenario, sink: &mut dyn TraceSink) -> Result<RunReport> {
    crate::sts::run(&with_strategy(scenario, Strategy::Fixed), sink)
}

/// Exhaustive physical sweep on every trigger.
pub fn baseline_full_sweep(scenario: &Scenario, sink: &mut dyn TraceSink) -> Result<RunReport> {
    crate::sts::run(&with_strategy(scenario, Strategy::FullSweep), sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envfield::{PowerField, ShadowBand, SunEnvelope};

    fn apex_field(shadows: Vec<ShadowBand>) -> PowerField {
        let env = SunEnvelope {
            peak_power_w: 5.0,
            sunrise_s: 0.0,
            sunset_s: 2000.0,
            diffuse_floor_w: 0.07,
        };
        PowerField::new(WireSpan::new(16.0).unwrap(), env, shadows).unwrap()
    }

    #[test]
    fn grid_covers_both_ends() {
        let g = grid(WireSpan::new(16.0).unwrap(), 0.01);
        assert_eq!(g.len(), 1601);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 16.0);
        let g = grid(WireSpan::new(1.0).unwrap(), 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
    }

    #[test]
    fn constant_field_ties_to_lowest_x() {
        let r = sweep_argmax(&apex_field(vec![]), 1000.0, 0.01).unwrap();
        assert_eq!(r.x_star_m, 0.0);
        assert_eq!(r.p_star_w, 5.0);
    }

    #[test]
    fn occluded_region_is_avoided() {
        let band = ShadowBand {
            center0_m: 6.0,
            width_m: 4.0,
            penumbra_m: 0.5,
            drift_mps: 0.0,
            opacity: 1.0,
        };
        let field = apex_field(vec![band]);
        let r = sweep_argmax(&field, 1000.0, 0.01).unwrap();
        assert!(!(3.5..=8.5).contains(&r.x_star_m));
        assert_eq!(r.p_star_w, 5.0);
    }

    #[test]
    fn two_peaks_pick_the_higher() {
        let band = |c: f64, w: f64, pen: f64, o: f64| ShadowBand {
            center0_m: c,
            width_m: w,
            penumbra_m: pen,
            drift_mps: 0.0,
            opacity: o,
        };
        // 3 W plateau on [0, 8], 4 W plateau on [8, 16], carved into two
        // tents peaking at x = 4 and x = 12 by opaque ramps
        let field = apex_field(vec![
            band(4.0, 8.0, 0.0, 0.4),
            band(12.0, 8.0, 0.0, 0.2),
            band(0.0, 4.0, 2.0, 1.0),
            band(8.0, 0.0, 4.0, 1.0),
            band(16.0, 4.0, 2.0, 1.0),
        ]);
        let p4 = field.available_power(4.0, 1000.0).unwrap();
        let p12 = field.available_power(12.0, 1000.0).unwrap();
        assert!((p4 - 3.0).abs() < 1e-12);
        assert!((p12 - 4.0).abs() < 1e-12);
        for x in [3.0, 3.9, 4.1, 5.0] {
            assert!(field.available_power(x, 1000.0).unwrap() < p4);
        }
        let r = sweep_argmax(&field, 1000.0, 0.01).unwrap();
        assert!((r.x_star_m - 12.0).abs() < 1e-9);
        assert!((r.p_star_w - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_delta() {
        let f = apex_field(vec![]);
        assert!(sweep_argmax(&f, 0.0, 0.0).is_err());
        assert!(sweep_argmax(&f, 0.0, 17.0).is_err());
    }
}
