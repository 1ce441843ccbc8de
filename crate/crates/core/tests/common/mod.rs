#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wiretrack::envfield::{PowerField, ShadowBand, SunEnvelope, WireSpan};
use wiretrack::harness::{load_scenario, Scenario};
use wiretrack::plant::{Battery, PowerBudget, RobotPlant, DEFAULT_SPEED_MPS};

pub const L: f64 = 16.0;
/// Instant of the envelope apex for [`apex_envelope`].
pub const APEX_T: f64 = 10_000.0;

pub fn apex_envelope() -> SunEnvelope {
    SunEnvelope {
        peak_power_w: 5.0,
        sunrise_s: 0.0,
        sunset_s: 2.0 * APEX_T,
        diffuse_floor_w: 0.07,
    }
}

/// Light falls off linearly on both sides of `peak_x`: two opaque-core bands
/// whose penumbrae (width `ramp_m` > L) reach exactly to the peak.
pub fn tent_bands(peak_x: f64, ramp_m: f64, op_left: f64, op_right: f64) -> Vec<ShadowBand> {
    vec![
        ShadowBand {
            center0_m: peak_x - ramp_m - 1.0,
            width_m: 2.0,
            penumbra_m: ramp_m,
            drift_mps: 0.0,
            opacity: op_left,
        },
        ShadowBand {
            center0_m: peak_x + ramp_m + 1.0,
            width_m: 2.0,
            penumbra_m: ramp_m,
            drift_mps: 0.0,
            opacity: op_right,
        },
    ]
}

pub fn tent_field(peak_x: f64, ramp_m: f64, op_left: f64, op_right: f64) -> PowerField {
    PowerField::new(
        WireSpan::new(L).unwrap(),
        apex_envelope(),
        tent_bands(peak_x, ramp_m, op_left, op_right),
    )
    .unwrap()
}

/// Strictly unimodal field drawn from `seed`: peak anywhere on the wire,
/// ramps longer than the wire so no point sits on the diffuse floor.
pub fn seeded_unimodal(seed: u64) -> (f64, PowerField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let peak = rng.gen_range(0.0..L);
    let ramp = rng.gen_range(L + 1.0..4.0 * L);
    let a = rng.gen_range(0.3..=1.0);
    let b = rng.gen_range(0.3..=1.0);
    (peak, tent_field(peak, ramp, a, b))
}

pub fn plant_at(x: f64) -> RobotPlant {
    RobotPlant::new(
        x,
        DEFAULT_SPEED_MPS,
        Battery::default(),
        PowerBudget::default(),
    )
}

pub fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn scenario(name: &str) -> Scenario {
    load_scenario(scenarios_dir().join(name)).unwrap()
}
