//! Available photovoltaic power along the wire.
//!
//! The field is a half-sine clear-sky envelope multiplied by the transmission
//! of any number of drifting shadow bands. A fully shaded panel still sees
//! diffuse light during the day, so the result is floored at
//! `diffuse_floor_w` between sunrise and sunset.
//!
//! ```text
//! P(x, t) = max(clear_sky(t) * shade_factor(x, t), daylight(t) * floor)
//! shade_factor(x, t) = prod_b (1 - opacity_b * occ_b(x, t))
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_WIRE_LENGTH_M: f64 = 16.0;
pub const DEFAULT_PEAK_POWER_W: f64 = 5.0;
/// Panel output under tree shade with the sun up.
pub const DEFAULT_DIFFUSE_FLOOR_W: f64 = 0.07;
pub const DEFAULT_SUNRISE_S: f64 = 6.0 * 3600.0;
pub const DEFAULT_SUNSET_S: f64 = 18.0 * 3600.0;

/// Anything that can report the power available to the panel at a position
/// and instant. Implemented by [`PowerField`] and by [`FrozenField`].
pub trait PowerSource {
    fn span(&self) -> WireSpan;

    fn available_power(&self, x_m: f64, t_s: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireSpan {
    pub length_m: f64,
}

impl WireSpan {
    pub fn new(length_m: f64) -> Result<Self> {
        let span = WireSpan { length_m };
        span.validate()?;
        Ok(span)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_m.is_finite() && self.length_m > 0.0) {
            return Err(Error::invalid("wire.length_m", "must be finite and > 0"));
        }
        Ok(())
    }

    pub fn contains(&self, x_m: f64) -> bool {
        (0.0..=self.length_m).contains(&x_m)
    }

    pub fn check(&self, x_m: f64) -> Result<()> {
        if self.contains(x_m) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x_m,
                length_m: self.length_m,
            })
        }
    }
}

impl Default for WireSpan {
    fn default() -> Self {
        WireSpan {
            length_m: DEFAULT_WIRE_LENGTH_M,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SunEnvelope {
    pub peak_power_w: f64,
    pub sunrise_s: f64,
    pub sunset_s: f64,
    pub diffuse_floor_w: f64,
}

impl Default for SunEnvelope {
    fn default() -> Self {
        SunEnvelope {
            peak_power_w: DEFAULT_PEAK_POWER_W,
            sunrise_s: DEFAULT_SUNRISE_S,
            sunset_s: DEFAULT_SUNSET_S,
            diffuse_floor_w: DEFAULT_DIFFUSE_FLOOR_W,
        }
    }
}

impl SunEnvelope {
    pub fn validate(&self) -> Result<()> {
        if !(self.peak_power_w.is_finite() && self.peak_power_w > 0.0) {
            return Err(Error::invalid("sun.peak_power_w", "must be finite and > 0"));
        }
        if !(self.diffuse_floor_w >= 0.0 && self.diffuse_floor_w < self.peak_power_w) {
            return Err(Error::invalid(
                "sun.diffuse_floor_w",
                "must satisfy 0 <= diffuse_floor_w < peak_power_w",
            ));
        }
        if !(self.sunrise_s.is_finite() && self.sunset_s.is_finite()) {
            return Err(Error::invalid(
                "sun.sunrise_s",
                "sunrise and sunset must be finite",
            ));
        }
        if self.sunrise_s >= self.sunset_s {
            return Err(Error::invalid(
                "sun.sunrise_s",
                "must be earlier than sun.sunset_s",
            ));
        }
        Ok(())
    }

    /// Strictly between sunrise and sunset.
    pub fn is_daylight(&self, t_s: f64) -> bool {
        t_s > self.sunrise_s && t_s < self.sunset_s
    }

    pub fn clear_sky(&self, t_s: f64) -> f64 {
        if !self.is_daylight(t_s) {
            return 0.0;
        }
        let phase = (t_s - self.sunrise_s) / (self.sunset_s - self.sunrise_s);
        (self.peak_power_w * (PI * phase).sin()).clamp(0.0, self.peak_power_w)
    }
}

/// A tree shadow: flat core of full occlusion with a linear penumbra on each
/// side, drifting at constant speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowBand {
    pub center0_m: f64,
    pub width_m: f64,
    pub penumbra_m: f64,
    pub drift_mps: f64,
    pub opacity: f64,
}

impl ShadowBand {
    pub fn validate(&self, index: usize) -> Result<()> {
        let name = |f: &str| format!("shadow.{index}.{f}");
        if !self.center0_m.is_finite() {
            return Err(Error::invalid(name("center0_m"), "must be finite"));
        }
        if !(self.width_m.is_finite() && self.width_m >= 0.0) {
            return Err(Error::invalid(name("width_m"), "must be finite and >= 0"));
        }
        if !(self.penumbra_m.is_finite() && self.penumbra_m >= 0.0) {
            return Err(Error::invalid(
                name("penumbra_m"),
                "must be finite and >= 0",
            ));
        }
        if !self.drift_mps.is_finite() {
            return Err(Error::invalid(name("drift_mps"), "must be finite"));
        }
        if !(0.0..=1.0).contains(&self.opacity) {
            return Err(Error::invalid(name("opacity"), "must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn center(&self, t_s: f64) -> f64 {
        self.center0_m + self.drift_mps * t_s
    }

    /// Occlusion in [0, 1]: 1 inside the core, linear falloff across the
    /// penumbra, 0 outside.
    pub fn occlusion(&self, x_m: f64, t_s: f64) -> f64 {
        let d = (x_m - self.center(t_s)).abs();
        let half = 0.5 * self.width_m;
        if d <= half {
            1.0
        } else if d < half + self.penumbra_m {
            1.0 - (d - half) / self.penumbra_m
        } else {
            0.0
        }
    }

    pub fn transmission(&self, x_m: f64, t_s: f64) -> f64 {
        1.0 - self.opacity * self.occlusion(x_m, t_s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PowerField {
    pub span: WireSpan,
    pub envelope: SunEnvelope,
    pub shadows: Vec<ShadowBand>,
}

impl PowerField {
    pub fn new(span: WireSpan, envelope: SunEnvelope, shadows: Vec<ShadowBand>) -> Result<Self> {
        let field = PowerField {
            span,
            envelope,
            shadows,
        };
        field.validate()?;
        Ok(field)
    }

    pub fn validate(&self) -> Result<()> {
        self.span.validate()?;
        self.envelope.validate()?;
        for (i, band) in self.shadows.iter().enumerate() {
            band.validate(i + 1)?;
        }
        Ok(())
    }

    pub fn clear_sky(&self, t_s: f64) -> f64 {
        self.envelope.clear_sky(t_s)
    }

    pub fn shade_factor(&self, x_m: f64, t_s: f64) -> Result<f64> {
        self.span.check(x_m)?;
        Ok(self
            .shadows
            .iter()
            .map(|b| b.transmission(x_m, t_s))
            .product())
    }

    /// Evaluate at a fixed instant, ignoring the time argument of later calls.
    pub fn frozen_at(&self, t_s: f64) -> FrozenField<'_> {
        FrozenField { field: self, t_s }
    }
}

impl PowerSource for PowerField {
    fn span(&self) -> WireSpan {
        self.span
    }

    fn available_power(&self, x_m: f64, t_s: f64) -> Result<f64> {
        let direct = self.clear_sky(t_s) * self.shade_factor(x_m, t_s)?;
        let floor = if self.envelope.is_daylight(t_s) {
            self.envelope.diffuse_floor_w
        } else {
            0.0
        };
        Ok(direct.max(floor))
    }
}

/// A [`PowerField`] pinned to one instant.
#[derive(Debug, Clone, Copy)]
pub struct FrozenField<'a> {
    pub field: &'a PowerField,
    pub t_s: f64,
}

impl PowerSource for FrozenField<'_> {
    fn span(&self) -> WireSpan {
        self.field.span
    }

    fn available_power(&self, x_m: f64, _t_s: f64) -> Result<f64> {
        self.field.available_power(x_m, self.t_s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn day() -> SunEnvelope {
        SunEnvelope {
            peak_power_w: 5.0,
            sunrise_s: 1000.0,
            sunset_s: 5000.0,
            diffuse_floor_w: 0.07,
        }
    }

    fn band(center: f64, width: f64, penumbra: f64, opacity: f64) -> ShadowBand {
        ShadowBand {
            center0_m: center,
            width_m: width,
            penumbra_m: penumbra,
            drift_mps: 0.0,
            opacity,
        }
    }

    #[test]
    fn clear_sky_half_sine() {
        let env = day();
        assert_eq!(env.clear_sky(1000.0), 0.0);
        assert_eq!(env.clear_sky(3000.0), 5.0);
        let quarter = env.clear_sky(2000.0);
        assert!((quarter - 5.0 * (PI / 4.0).sin()).abs() < 1e-12);
        assert!((quarter - 3.5355).abs() < 1e-4);
        assert_eq!(env.clear_sky(0.0), 0.0);
        assert_eq!(env.clear_sky(9000.0), 0.0);
    }

    #[test]
    fn shade_factor_product_rule() {
        let span = WireSpan::new(16.0).unwrap();
        let empty = PowerField::new(span, day(), vec![]).unwrap();
        assert_eq!(empty.shade_factor(3.3, 12.0).unwrap(), 1.0);

        let one = PowerField::new(span, day(), vec![band(6.0, 2.0, 1.0, 1.0)]).unwrap();
        assert_eq!(one.shade_factor(6.0, 0.0).unwrap(), 0.0);
        // halfway across the penumbra
        assert!((one.shade_factor(7.5, 0.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(one.shade_factor(9.0, 0.0).unwrap(), 1.0);

        let two = PowerField::new(
            span,
            day(),
            vec![band(6.0, 2.0, 0.0, 0.8), band(6.5, 2.0, 0.0, 0.5)],
        )
        .unwrap();
        assert!((two.shade_factor(6.2, 0.0).unwrap() - 0.10).abs() < 1e-12);
    }

    #[test]
    fn shade_factor_rejects_positions_off_the_wire() {
        let field = PowerField::default();
        assert!(matches!(
            field.shade_factor(-0.1, 0.0),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(field.available_power(16.01, 0.0).is_err());
        assert!(field.shade_factor(16.0, 0.0).is_ok());
    }

    #[test]
    fn available_power_examples() {
        let span = WireSpan::new(16.0).unwrap();
        let field = PowerField::new(span, day(), vec![band(4.0, 2.0, 0.5, 1.0)]).unwrap();
        assert_eq!(field.available_power(10.0, 6000.0).unwrap(), 0.0);
        assert_eq!(field.available_power(4.0, 3000.0).unwrap(), 0.07);
        assert_eq!(field.available_power(10.0, 3000.0).unwrap(), 5.0);
    }

    #[test]
    fn frozen_field_ignores_time() {
        let span = WireSpan::new(16.0).unwrap();
        let field = PowerField::new(span, day(), vec![]).unwrap();
        let frozen = field.frozen_at(3000.0);
        assert_eq!(frozen.available_power(1.0, 0.0).unwrap(), 5.0);
        assert_eq!(frozen.available_power(1.0, 1e9).unwrap(), 5.0);
    }

    #[test]
    fn invalid_envelopes_are_rejected() {
        let mut env = day();
        env.diffuse_floor_w = 5.0;
        assert!(env.validate().is_err());
        let mut env = day();
        env.sunset_s = env.sunrise_s;
        assert!(env.validate().is_err());
        assert!(band(1.0, 1.0, 1.0, 1.5).validate(1).is_err());
        assert!(WireSpan::new(0.0).is_err());
    }

    fn arb_band() -> impl Strategy<Value = ShadowBand> {
        (
            -5.0..21.0f64,
            0.0..6.0f64,
            0.0..3.0f64,
            -0.01..0.01f64,
            0.0..=1.0f64,
        )
            .prop_map(|(c, w, p, d, o)| ShadowBand {
                center0_m: c,
                width_m: w,
                penumbra_m: p,
                drift_mps: d,
                opacity: o,
            })
    }

    proptest! {
        #[test]
        fn power_within_bounds(
            bands in proptest::collection::vec(arb_band(), 0..5),
            x in 0.0..=16.0f64,
            t in 0.0..6000.0f64,
        ) {
            let field = PowerField::new(WireSpan::new(16.0).unwrap(), day(), bands).unwrap();
            let p = field.available_power(x, t).unwrap();
            prop_assert!((0.0..=5.0).contains(&p));
            if field.envelope.is_daylight(t) {
                prop_assert!(p >= 0.07);
            }
        }

        #[test]
        fn extra_band_never_adds_power(
            bands in proptest::collection::vec(arb_band(), 0..4),
            extra in arb_band(),
            x in 0.0..=16.0f64,
            t in 0.0..6000.0f64,
        ) {
            let span = WireSpan::new(16.0).unwrap();
            let base = PowerField::new(span, day(), bands.clone()).unwrap();
            let mut more = bands;
            more.push(extra);
            let shaded = PowerField::new(span, day(), more).unwrap();
            prop_assert!(shaded.available_power(x, t).unwrap() <= base.available_power(x, t).unwrap());
        }

        #[test]
        fn drift_is_a_translation(
            b in arb_band(),
            x in 0.0..=16.0f64,
            t in 0.0..3000.0f64,
            dt in 0.0..1000.0f64,
        ) {
            let field = PowerField::new(WireSpan::new(16.0).unwrap(), day(), vec![b]).unwrap();
            let shifted = x - b.drift_mps * dt;
            prop_assume!(field.span.contains(shifted));
            let later = field.shade_factor(x, t + dt).unwrap();
            let moved = field.shade_factor(shifted, t).unwrap();
            prop_assert!((later - moved).abs() < 1e-9);
        }
    }
}
