use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `sd_phi` reported when the resultant length vanishes.
pub const DEGENERATE_SD: f64 = f64::MAX;

/// Resultant lengths below this are treated as zero.
const RESULTANT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularStats {
    /// Circular mean minus the intended phase, in (−π, π].
    pub mean_shift: f64,
    /// Circular standard deviation `√(−2 ln R)`.
    pub sd_phi: f64,
    /// Mean resultant length R.
    pub resultant_r: f64,
    /// R is zero: no mean direction, `sd_phi` holds [`DEGENERATE_SD`].
    pub degenerate: bool,
}

/// Wraps an angle into `[−π, π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let w = x - TAU * ((x + PI) / TAU).floor();
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_to_pi(x: f64) -> f64 {
    let w = wrap_phase(x);
    if w == -PI {
        PI
    } else {
        w
    }
}

pub fn circular_stats(series: &[f64], phi0: f64) -> Result<CircularStats> {
    if series.is_empty() {
        return Err(Error::invalid("circular statistics of an empty series"));
    }
    let n = series.len() as f64;
    let (s, c) = series
        .iter()
        .fold((0.0, 0.0), |(s, c), x| (s + x.sin(), c + x.cos()));
    let (s, c) = (s / n, c / n);
    let r = s.hypot(c).min(1.0);
    if r < RESULTANT_FLOOR {
        return Ok(CircularStats {
            mean_shift: 0.0,
            sd_phi: DEGENERATE_SD,
            resultant_r: r,
            degenerate: true,
        });
    }
    Ok(CircularStats {
        mean_shift: wrap_to_pi(s.atan2(c) - phi0),
        // R = 1 gives ln R = 0 and would yield sqrt(-0) = -0
        sd_phi: (-2.0 * r.ln()).max(0.0).sqrt(),
        resultant_r: r,
        degenerate: false,
    })
}
