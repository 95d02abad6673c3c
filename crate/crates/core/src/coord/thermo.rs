use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Circadian core-temperature protocol and its coupling to the phase
/// equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TemperatureProtocol {
    /// Daily mean core temperature, °C.
    #[serde(rename = "T_mean")]
    pub t_mean: f64,
    /// Half the peak-to-trough swing, °C.
    pub amplitude: f64,
    /// Magnitude of the vest perturbation, °C.
    pub vest_offset: f64,
    /// Sensitivity of the first-harmonic asymmetric coupling to ε.
    pub gain_c: f64,
    /// Sensitivity of the second-harmonic asymmetric coupling to ε.
    pub gain_d: f64,
}

impl Default for TemperatureProtocol {
    fn default() -> Self {
        TemperatureProtocol {
            t_mean: 36.8,
            amplitude: 0.5,
            vest_offset: 1.0,
            gain_c: 0.0,
            gain_d: 0.3,
        }
    }
}

impl TemperatureProtocol {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid(format!(
                "amplitude = {} must be non-negative",
                self.amplitude
            )));
        }
        for (name, v) in [
            ("T_mean", self.t_mean),
            ("vest_offset", self.vest_offset),
            ("gain_c", self.gain_c),
            ("gain_d", self.gain_d),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} = {v} must be finite")));
            }
        }
        Ok(())
    }
}

fn check_hour(hour: f64) -> Result<()> {
    if !(0.0..24.0).contains(&hour) {
        return Err(Error::invalid(format!("hour = {hour} is outside [0, 24)")));
    }
    Ok(())
}

/// Daily temperature shape: −1 at 5:00, +1 at 17:00, 0 at 11:00 and 23:00.
fn circadian_shape(hour: f64) -> f64 {
    (TAU * (hour - 11.0) / 24.0).sin()
}

/// Unperturbed core temperature at `hour`, lowest at 5:00 and highest at
/// 17:00.
pub fn circadian_t0(hour: f64, proto: &TemperatureProtocol) -> Result<f64> {
    check_hour(hour)?;
    Ok(proto.t_mean + proto.amplitude * circadian_shape(hour))
}

/// Core temperature at `hour` under a vest of the given signed offset.
///
/// A vest of either sign disrupts thermoregulation and exaggerates the
/// daily swing: the body sits `|offset|` further from the daily mean in
/// whichever direction the circadian cycle is already pushing it.
pub fn body_temperature(hour: f64, vest_offset: f64, proto: &TemperatureProtocol) -> Result<f64> {
    Ok(circadian_t0(hour, proto)? + vest_offset.abs() * circadian_shape(hour))
}

/// Temperature deviation `T − T0`; positive values are the unstable,
/// overheated regime.
pub fn epsilon(t: f64, t0: f64) -> f64 {
    t - t0
}

/// Asymmetric couplings `(c, d)` shifted linearly by the temperature
/// deviation.
pub fn thermo_coefficients(
    eps: f64,
    base_c: f64,
    base_d: f64,
    proto: &TemperatureProtocol,
) -> (f64, f64) {
    (base_c + proto.gain_c * eps, base_d + proto.gain_d * eps)
}
