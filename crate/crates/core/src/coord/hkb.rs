use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::analysis::wrap_phase;
use crate::{Error, RandomStream, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HkbParams {
    /// Symmetric first-harmonic coupling.
    pub a: f64,
    /// Symmetric second-harmonic coupling.
    pub b: f64,
    /// Asymmetric first-harmonic coupling.
    pub c: f64,
    /// Asymmetric second-harmonic coupling.
    pub d: f64,
    /// Detuning between the two components, rad/s.
    pub delta_omega: f64,
    /// Noise strength.
    #[serde(rename = "Q")]
    pub q: f64,
}

impl Default for HkbParams {
    fn default() -> Self {
        HkbParams {
            a: 1.0,
            b: 0.5,
            c: 0.0,
            d: 0.0,
            delta_omega: 0.0,
            q: 1.0,
        }
    }
}

impl HkbParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("a", self.a), ("b", self.b), ("Q", self.q)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} = {value} must be finite and non-negative"
                )));
            }
        }
        for (name, value) in [
            ("c", self.c),
            ("d", self.d),
            ("delta_omega", self.delta_omega),
        ] {
            if !value.is_finite() {
                return Err(Error::invalid(format!("{name} = {value} must be finite")));
            }
        }
        Ok(())
    }
}

/// A relative-phase time series, stored unwrapped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSeries {
    pub dt: f64,
    pub samples: Vec<f64>,
    /// Seed of the stream that drove the noise.
    pub seed: u64,
}

impl PhaseSeries {
    /// Samples wrapped into `[−π, π)`.
    pub fn wrapped(&self) -> Vec<f64> {
        self.samples.iter().map(|&x| wrap_phase(x)).collect()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |i| i as f64 * self.dt)
    }
}

/// `V(φ) = −a cos φ − b cos 2φ`.
pub fn hkb_potential(phi: f64, a: f64, b: f64) -> f64 {
    -a * phi.cos() - b * (2.0 * phi).cos()
}

pub fn hkb_drift(phi: f64, p: &HkbParams) -> f64 {
    let (s1, s2) = (phi.sin(), (2.0 * phi).sin());
    p.delta_omega - (p.a * s1 + 2.0 * p.b * s2) - (p.c * s1 + 2.0 * p.d * s2)
}

/// Euler–Maruyama integration of `n` steps from `phi0`; the series holds
/// `n + 1` samples. Consumes one standard normal per step from `rng`
/// (none when `Q = 0`).
pub fn integrate_phase(
    p: &HkbParams,
    phi0: f64,
    dt: f64,
    n: usize,
    rng: &mut RandomStream,
) -> Result<PhaseSeries> {
    p.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("dt = {dt} must be positive")));
    }
    if n == 0 {
        return Err(Error::invalid("phase integration needs at least one step"));
    }
    if !phi0.is_finite() {
        return Err(Error::invalid(format!("phi0 = {phi0} must be finite")));
    }
    let noise_scale = (p.q * dt).sqrt();
    let mut samples = Vec::with_capacity(n + 1);
    let mut phi = phi0;
    samples.push(phi);
    let mut spare = None;
    for step in 1..=n {
        let mut next = phi + hkb_drift(phi, p) * dt;
        if p.q > 0.0 {
            let g = spare.take().unwrap_or_else(|| {
                let (g0, g1) = rng.normal_pair();
                spare = Some(g1);
                g0
            });
            next += noise_scale * g;
        }
        if !next.is_finite() {
            return Err(Error::Diverged {
                step,
                detail: format!("relative phase became {next}"),
            });
        }
        phi = next;
        samples.push(phi);
    }
    Ok(PhaseSeries {
        dt,
        samples,
        seed: rng.seed(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    /// Root of the drift in `[−π, π)`.
    pub phi: f64,
    pub stable: bool,
    /// Drift derivative at the root.
    pub slope: f64,
}

const SCAN_POINTS: usize = 721;
const ROOT_TOLERANCE: f64 = 1e-10;

/// All roots of the drift on the circle, ascending. Returns an empty list
/// when the detuning is large enough that no fixed point exists.
pub fn fixed_points(p: &HkbParams) -> Vec<FixedPoint> {
    let f = |x: f64| hkb_drift(x, p);
    let h = TAU / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS).map(|i| -PI + h * i as f64).collect();
    let mut roots: Vec<f64> = Vec::new();
    // The rounded ends of the scan straddle ±π, so a root there shows up as
    // a sign change across the seam.
    if f(grid[SCAN_POINTS - 1]) * f(grid[0]) < 0.0 {
        roots.push(-PI);
    }
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (mut flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo * fhi >= 0.0 {
            continue;
        }
        while hi - lo > ROOT_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(wrap_phase(0.5 * (lo + hi)));
    }
    roots.sort_by(f64::total_cmp);
    let mut unique: Vec<f64> = Vec::new();
    for r in roots {
        if !unique.iter().any(|&u| wrap_phase(r - u).abs() < 1e-8) {
            unique.push(r);
        }
    }
    const H: f64 = 1e-6;
    unique
        .into_iter()
        .map(|phi| {
            let slope = (f(phi + H) - f(phi - H)) / (2.0 * H);
            FixedPoint {
                phi,
                stable: slope < 0.0,
                slope,
            }
        })
        .collect()
}
