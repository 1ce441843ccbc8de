//! Scenario files: flat `key = value` text with dotted section prefixes.
//!
//! ```text
//! # comment
//! name = shaded_start
//! duration_s = 86400
//! wire.length_m = 16
//! sts.zeta = 0.85
//! shadow.1.center0_m = 8
//! shadow.1.width_m = 3
//! ```
//!
//! `name` and `duration_s` are required; everything else has a default.
//! Unknown keys and duplicate keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::envfield::{PowerField, ShadowBand, SunEnvelope, WireSpan};
use crate::error::{Error, Result};
use crate::plant::{
    Battery, PowerBudget, RobotPlant, DEFAULT_CAPACITY_J, DEFAULT_INITIAL_SOC, DEFAULT_SPEED_MPS,
    DEFAULT_STEP_S, V_EMPTY, V_FULL,
};
use crate::sts::{Strategy, StsParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatterySpec {
    pub capacity_j: f64,
    pub initial_soc: f64,
    pub v_full: f64,
    pub v_empty: f64,
}

impl Default for BatterySpec {
    fn default() -> Self {
        BatterySpec {
            capacity_j: DEFAULT_CAPACITY_J,
            initial_soc: DEFAULT_INITIAL_SOC,
            v_full: V_FULL,
            v_empty: V_EMPTY,
        }
    }
}

impl BatterySpec {
    pub fn battery(&self) -> Battery {
        Battery {
            capacity_j: self.capacity_j,
            charge_j: self.capacity_j * self.initial_soc,
            v_full: self.v_full,
            v_empty: self.v_empty,
        }
    }
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub duration_s: f64,
    pub strategy: Strategy,
    pub start_x_m: f64,
    pub span: WireSpan,
    pub envelope: SunEnvelope,
    pub shadows: Vec<ShadowBand>,
    /// Extra bands drawn from `seed`.
    pub random_shadows: usize,
    pub speed_mps: f64,
    pub step_s: f64,
    pub budget: PowerBudget,
    pub battery: BatterySpec,
    pub sts: StsParams,
}

impl Scenario {
    /// A scenario with every default applied.
    pub fn with_defaults(name: impl Into<String>, duration_s: f64) -> Self {
        let span = WireSpan::default();
        Scenario {
            name: name.into(),
            seed: 0,
            duration_s,
            strategy: Strategy::Sts,
            start_x_m: span.length_m / 2.0,
            span,
            envelope: SunEnvelope::default(),
            shadows: Vec::new(),
            random_shadows: 0,
            speed_mps: DEFAULT_SPEED_MPS,
            step_s: DEFAULT_STEP_S,
            budget: PowerBudget::default(),
            battery: BatterySpec::default(),
            sts: StsParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::invalid("name", "must not be empty"));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::invalid("duration_s", "must be finite and > 0"));
        }
        self.span.validate()?;
        if !self.span.contains(self.start_x_m) {
            return Err(Error::invalid(
                "start_x_m",
                format!("must lie in [0, {}] m", self.span.length_m),
            ));
        }
        self.envelope.validate()?;
        for (i, b) in self.shadows.iter().enumerate() {
            b.validate(i + 1)?;
        }
        if !(self.speed_mps.is_finite() && self.speed_mps > 0.0) {
            return Err(Error::invalid("plant.speed_mps", "must be finite and > 0"));
        }
        if !(self.step_s.is_finite() && self.step_s > 0.0) {
            return Err(Error::invalid("plant.step_s", "must be finite and > 0"));
        }
        self.budget.validate()?;
        if !(0.0..=1.0).contains(&self.battery.initial_soc) {
            return Err(Error::invalid("battery.initial_soc", "must lie in [0, 1]"));
        }
        self.battery.battery().validate()?;
        self.sts.validate()
    }

    /// The power field, including any seeded random shadows.
    pub fn field(&self) -> Result<PowerField> {
        let mut shadows = self.shadows.clone();
        if self.random_shadows > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            let l = self.span.length_m;
            // drift bounded so a band crosses at most about half the wire per day
            let max_drift = 0.5 * l / 86_400.0;
            for _ in 0..self.random_shadows {
                shadows.push(ShadowBand {
                    center0_m: rng.gen_range(0.0..l),
                    width_m: rng.gen_range(0.05..0.2) * l,
                    penumbra_m: rng.gen_range(0.0..0.06) * l,
                    drift_mps: rng.gen_range(-max_drift..max_drift),
                    opacity: rng.gen_range(0.5..=1.0),
                });
            }
        }
        PowerField::new(self.span, self.envelope, shadows)
    }

    pub fn plant(&self) -> RobotPlant {
        RobotPlant::new(
            self.start_x_m,
            self.speed_mps,
            self.battery.battery(),
            self.budget,
        )
        .with_step(self.step_s)
    }

    /// Every key with its effective value, in canonical order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, val: String| v.push((k.to_string(), val));
        put("name", self.name.clone());
        put("seed", self.seed.to_string());
        put("duration_s", self.duration_s.to_string());
        put("strategy", self.strategy.as_str().to_string());
        put("start_x_m", self.start_x_m.to_string());
        put("wire.length_m", self.span.length_m.to_string());
        put("sun.peak_power_w", self.envelope.peak_power_w.to_string());
        put("sun.sunrise_s", self.envelope.sunrise_s.to_string());
        put("sun.sunset_s", self.envelope.sunset_s.to_string());
        put(
            "sun.diffuse_floor_w",
            self.envelope.diffuse_floor_w.to_string(),
        );
        put("shadows.random_count", self.random_shadows.to_string());
        put("plant.speed_mps", self.speed_mps.to_string());
        put("plant.step_s", self.step_s.to_string());
        put("plant.p_move_w", self.budget.p_move_w.to_string());
        put("plant.p_idle_w", self.budget.p_idle_w.to_string());
        put("plant.p_sleep_w", self.budget.p_sleep_w.to_string());
        put("plant.eta_conv", self.budget.eta_conv.to_string());
        put("battery.capacity_j", self.battery.capacity_j.to_string());
        put("battery.initial_soc", self.battery.initial_soc.to_string());
        put("battery.v_full", self.battery.v_full.to_string());
        put("battery.v_empty", self.battery.v_empty.to_string());
        let s = &self.sts;
        put("sts.wake_threshold_w", s.wake_threshold_w.to_string());
        put("sts.retrigger_frac", s.retrigger_frac.to_string());
        put("sts.dx_coarse_m", s.dx_coarse_m.to_string());
        put("sts.dx_fine_m", s.dx_fine_m.to_string());
        put("sts.inertia0", s.inertia0.to_string());
        put("sts.zeta", s.zeta.to_string());
        put("sts.min_step_m", s.min_step_m.to_string());
        put("sts.max_iters", s.max_iters.to_string());
        put("sts.t_p_s", s.t_p_s.to_string());
        put("sts.monitor_period_s", s.monitor_period_s.to_string());
        put("sts.sleep_recheck_s", s.sleep_recheck_s.to_string());
        put(
            "sts.retain_g_best_across_sleep",
            s.retain_g_best_across_sleep.to_string(),
        );
        for (i, b) in self.shadows.iter().enumerate() {
            let n = i + 1;
            put(&format!("shadow.{n}.center0_m"), b.center0_m.to_string());
            put(&format!("shadow.{n}.width_m"), b.width_m.to_string());
            put(&format!("shadow.{n}.penumbra_m"), b.penumbra_m.to_string());
            put(&format!("shadow.{n}.drift_mps"), b.drift_mps.to_string());
            put(&format!("shadow.{n}.opacity"), b.opacity.to_string());
        }
        v
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Hex digest over everything except `name` and `strategy`.
    pub fn family(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.to_pairs() {
            if k == "name" || k == "strategy" {
                continue;
            }
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text, &path.display().to_string())
}

#[derive(Default)]
struct PartialShadow {
    center0_m: Option<f64>,
    width_m: Option<f64>,
    penumbra_m: Option<f64>,
    drift_mps: Option<f64>,
    opacity: Option<f64>,
}

/// Parse and validate scenario text. `origin` names the source in errors.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };

    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(parse_err(
                line_no,
                format!("expected `key = value`, found `{line}`"),
            ));
        };
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(parse_err(line_no, "empty key".into()));
        }
        if let Some((first, _)) = entries.get(&key) {
            return Err(parse_err(
                line_no,
                format!("duplicate key `{key}` (first set on line {first})"),
            ));
        }
        entries.insert(key, (line_no, v.trim().to_string()));
    }

    let f64_of = |line: usize, key: &str, v: &str| -> Result<f64> {
        v.parse::<f64>()
            .map_err(|_| parse_err(line, format!("`{key}` expects a number, found `{v}`")))
    };

    let (name_line, name) = entries
        .get("name")
        .cloned()
        .ok_or_else(|| Error::invalid("name", "is required"))?;
    let _ = name_line;
    let duration = match entries.get("duration_s") {
        Some((line, v)) => f64_of(*line, "duration_s", v)?,
        None => return Err(Error::invalid("duration_s", "is required")),
    };

    let mut sc = Scenario::with_defaults(name, duration);
    let mut start_x: Option<f64> = None;
    let mut shadows: BTreeMap<u32, PartialShadow> = BTreeMap::new();

    for (key, (line, v)) in &entries {
        let line = *line;
        let num = || f64_of(line, key, v);
        match key.as_str() {
            "name" | "duration_s" => {}
            "seed" => {
                sc.seed = v.parse().map_err(|_| {
                    parse_err(
                        line,
                        format!("`seed` expects an unsigned integer, found `{v}`"),
                    )
                })?
            }
            "strategy" => {
                sc.strategy = Strategy::parse(v).ok_or_else(|| {
                    parse_err(
                        line,
                        format!("`strategy` must be sts, fixed or full_sweep, found `{v}`"),
                    )
                })?
            }
            "start_x_m" => start_x = Some(num()?),
            "wire.length_m" => sc.span.length_m = num()?,
            "sun.peak_power_w" => sc.envelope.peak_power_w = num()?,
            "sun.sunrise_s" => sc.envelope.sunrise_s = num()?,
            "sun.sunset_s" => sc.envelope.sunset_s = num()?,
            "sun.diffuse_floor_w" => sc.envelope.diffuse_floor_w = num()?,
            "shadows.random_count" => {
                sc.random_shadows = v.parse().map_err(|_| {
                    parse_err(
                        line,
                        format!("`{key}` expects an unsigned integer, found `{v}`"),
                    )
                })?
            }
            "plant.speed_mps" => sc.speed_mps = num()?,
            "plant.step_s" => sc.step_s = num()?,
            "plant.p_move_w" => sc.budget.p_move_w = num()?,
            "plant.p_idle_w" => sc.budget.p_idle_w = num()?,
            "plant.p_sleep_w" => sc.budget.p_sleep_w = num()?,
            "plant.eta_conv" => sc.budget.eta_conv = num()?,
            "battery.capacity_j" => sc.battery.capacity_j = num()?,
            "battery.initial_soc" => sc.battery.initial_soc = num()?,
            "battery.v_full" => sc.battery.v_full = num()?,
            "battery.v_empty" => sc.battery.v_empty = num()?,
            "sts.wake_threshold_w" => sc.sts.wake_threshold_w = num()?,
            "sts.retrigger_frac" => sc.sts.retrigger_frac = num()?,
            "sts.dx_coarse_m" => sc.sts.dx_coarse_m = num()?,
            "sts.dx_fine_m" => sc.sts.dx_fine_m = num()?,
            "sts.inertia0" => sc.sts.inertia0 = num()?,
            "sts.zeta" => sc.sts.zeta = num()?,
            "sts.min_step_m" => sc.sts.min_step_m = num()?,
            "sts.max_iters" => {
                sc.sts.max_iters = v.parse().map_err(|_| {
                    parse_err(
                        line,
                        format!("`{key}` expects an unsigned integer, found `{v}`"),
                    )
                })?
            }
            "sts.t_p_s" => sc.sts.t_p_s = num()?,
            "sts.monitor_period_s" => sc.sts.monitor_period_s = num()?,
            "sts.sleep_recheck_s" => sc.sts.sleep_recheck_s = num()?,
            "sts.retain_g_best_across_sleep" => {
                sc.sts.retain_g_best_across_sleep = v.parse().map_err(|_| {
                    parse_err(line, format!("`{key}` expects true or false, found `{v}`"))
                })?
            }
            other => {
                let unknown = || Error::UnknownKey {
                    path: origin.to_string(),
                    line,
                    key: other.to_string(),
                };
                let mut parts = other.splitn(3, '.');
                let (Some("shadow"), Some(idx), Some(field)) =
                    (parts.next(), parts.next(), parts.next())
                else {
                    return Err(unknown());
                };
                let idx: u32 = match idx.parse() {
                    Ok(n) if n >= 1 => n,
                    _ => return Err(unknown()),
                };
                let entry = shadows.entry(idx).or_default();
                let value = Some(num()?);
                match field {
                    "center0_m" => entry.center0_m = value,
                    "width_m" => entry.width_m = value,
                    "penumbra_m" => entry.penumbra_m = value,
                    "drift_mps" => entry.drift_mps = value,
                    "opacity" => entry.opacity = value,
                    _ => return Err(unknown()),
                }
            }
        }
    }

    sc.start_x_m = start_x.unwrap_or(sc.span.length_m / 2.0);
    for (idx, s) in shadows {
        let require = |v: Option<f64>, f: &str| {
            v.ok_or_else(|| Error::invalid(format!("shadow.{idx}.{f}"), "is required"))
        };
        sc.shadows.push(ShadowBand {
            center0_m: require(s.center0_m, "center0_m")?,
            width_m: require(s.width_m, "width_m")?,
            penumbra_m: s.penumbra_m.unwrap_or(0.0),
            drift_mps: s.drift_mps.unwrap_or(0.0),
            opacity: s.opacity.unwrap_or(1.0),
        });
    }
    sc.validate()?;
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        parse_scenario(text, "test.scenario")
    }

    #[test]
    fn minimal_file_takes_defaults() {
        let sc = parse("name = minimal\nduration_s = 3600\n").unwrap();
        assert_eq!(sc.span.length_m, 16.0);
        assert_eq!(sc.start_x_m, 8.0);
        assert_eq!(sc.sts.dx_coarse_m, 7.8);
        assert_eq!(sc.sts.dx_fine_m, 2.25);
        assert_eq!(sc.sts.wake_threshold_w, 0.05);
        assert_eq!(sc.sts.retrigger_frac, 0.2);
        assert_eq!(sc.strategy, Strategy::Sts);
        assert_eq!(sc.envelope.diffuse_floor_w, 0.07);
    }

    #[test]
    fn start_outside_wire_is_named() {
        let err = parse("name = a\nduration_s = 10\nstart_x_m = 20\n").unwrap_err();
        assert!(
            matches!(err, Error::Invalid { ref field, .. } if field == "start_x_m"),
            "{err}"
        );
    }

    #[test]
    fn zeta_out_of_range_is_named() {
        let err = parse("name = a\nduration_s = 10\nsts.zeta = 1.2\n").unwrap_err();
        assert!(
            matches!(err, Error::Invalid { ref field, .. } if field == "sts.zeta"),
            "{err}"
        );
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let err = parse("name = a\nduration_s = 10\nsts.zeda = 0.5\n").unwrap_err();
        assert!(matches!(err, Error::UnknownKey { line: 3, .. }), "{err}");
        let err = parse("name = a\nduration_s = 10\nshadow.1.colour = 3\n").unwrap_err();
        assert!(matches!(err, Error::UnknownKey { .. }), "{err}");
        let err = parse("name = a\nduration_s = 10\nshadow.0.width_m = 3\n").unwrap_err();
        assert!(matches!(err, Error::UnknownKey { .. }), "{err}");
        let err = parse("name = a\nduration_s = ten\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("name = a\nduration_s 10\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
        let err = parse("name = a\nname = b\nduration_s = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("duration_s = 1\n").unwrap_err();
        assert!(matches!(err, Error::Invalid { ref field, .. } if field == "name"));
    }

    #[test]
    fn shadows_are_collected_in_index_order() {
        let sc = parse(
            "name = s\nduration_s = 10\n\
             shadow.2.center0_m = 12\nshadow.2.width_m = 1\n\
             # first band\n\
             shadow.1.center0_m = 3\nshadow.1.width_m = 2\nshadow.1.opacity = 0.5\n",
        )
        .unwrap();
        assert_eq!(sc.shadows.len(), 2);
        assert_eq!(sc.shadows[0].center0_m, 3.0);
        assert_eq!(sc.shadows[0].opacity, 0.5);
        assert_eq!(sc.shadows[1].opacity, 1.0);
        let err = parse("name = s\nduration_s = 10\nshadow.1.center0_m = 3\n").unwrap_err();
        assert!(err.to_string().contains("shadow.1.width_m"));
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut sc = parse("name = r\nduration_s = 100\nseed = 9\nshadows.random_count = 3\nshadow.1.center0_m = 3\nshadow.1.width_m = 2\n").unwrap();
        sc.sts.zeta = 0.8;
        let back = parse(&sc.to_text()).unwrap();
        assert_eq!(back, sc);
        assert_eq!(back.family(), sc.family());
    }

    #[test]
    fn family_ignores_name_and_strategy() {
        let a = parse("name = a\nduration_s = 100\n").unwrap();
        let b = parse("name = b\nduration_s = 100\nstrategy = fixed\n").unwrap();
        let c = parse("name = a\nduration_s = 101\n").unwrap();
        assert_eq!(a.family(), b.family());
        assert_ne!(a.family(), c.family());
    }

    #[test]
    fn random_shadows_follow_the_seed() {
        let a = parse("name = a\nduration_s = 100\nseed = 4\nshadows.random_count = 4\n").unwrap();
        let b = parse("name = b\nduration_s = 100\nseed = 4\nshadows.random_count = 4\n").unwrap();
        let c = parse("name = c\nduration_s = 100\nseed = 5\nshadows.random_count = 4\n").unwrap();
        assert_eq!(a.field().unwrap(), b.field().unwrap());
        assert_ne!(a.field().unwrap(), c.field().unwrap());
        assert_eq!(a.field().unwrap().shadows.len(), 4);
    }
}
