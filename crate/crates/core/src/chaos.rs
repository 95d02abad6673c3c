//! Logistic-map orbits and their sensitivity to initial conditions.
//!
//! The Lyapunov exponent is the long-run mean of `ln|f′(x)|` along an orbit,
//! so `e^λ` is the geometric-mean expansion factor per step. A second
//! estimator follows a twin orbit at fixed separation and renormalizes it
//! each step; the two agree for well-behaved maps and serve as a cross-check.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default number of transient iterates discarded before averaging.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Minimum averaging length for a Lyapunov estimate.
pub const MIN_LYAPUNOV_ITERATES: usize = 1000;

/// Offset applied to an orbit that lands exactly on 1, whose next image
/// would be the fixed point 0 and end all sensitivity.
const ESCAPE_NUDGE: f64 = 1e-12;

/// Logistic map `x ↦ r·x·(1 − x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub r: f64,
}

impl MapSpec {
    pub fn new(r: f64) -> Result<Self> {
        let spec = MapSpec { r };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=4.0).contains(&self.r) {
            return Err(Error::invalid(format!("r = {} is outside [0, 4]", self.r)));
        }
        Ok(())
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.r * x * (1.0 - x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.r * (1.0 - 2.0 * x)
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

/// The orbit `x0, f(x0), …, fⁿ(x0)`.
pub fn logistic_iterate(spec: &MapSpec, x0: f64, n: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    check_unit("x0", x0)?;
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut x = x0;
    out.push(x);
    for _ in 0..n {
        x = spec.apply(x);
        out.push(x);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTrace {
    pub epsilon0: f64,
    /// `|fᵏ(x0 + ε) − fᵏ(x0)|` for k = 0..=n.
    pub distances: Vec<f64>,
}

impl DivergenceTrace {
    pub fn final_distance(&self) -> f64 {
        *self.distances.last().expect("trace is never empty")
    }
}

pub fn orbit_divergence(
    spec: &MapSpec,
    x0: f64,
    epsilon0: f64,
    n: usize,
) -> Result<DivergenceTrace> {
    if !(epsilon0 > 0.0) {
        return Err(Error::invalid(format!(
            "epsilon0 = {epsilon0} must be positive"
        )));
    }
    check_unit("x0 + epsilon0", x0 + epsilon0)?;
    let base = logistic_iterate(spec, x0, n)?;
    let twin = logistic_iterate(spec, x0 + epsilon0, n)?;
    let mut distances: Vec<f64> = base.iter().zip(&twin).map(|(a, b)| (b - a).abs()).collect();
    distances[0] = epsilon0;
    Ok(DivergenceTrace {
        epsilon0,
        distances,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub lambda: f64,
    /// Iterates that entered the average.
    pub used: usize,
    /// Iterates skipped because the derivative (or separation) was zero.
    pub skipped: usize,
    /// Times the orbit was nudged off the escape point 1.
    pub nudged: usize,
}

/// Steps `x` once, keeping the orbit away from the escape point.
fn guarded_step(spec: &MapSpec, x: f64, nudged: &mut usize) -> f64 {
    let next = spec.apply(x);
    if next == 1.0 && spec.r > 0.0 {
        *nudged += 1;
        1.0 - ESCAPE_NUDGE
    } else {
        next
    }
}

fn check_lengths(n: usize) -> Result<()> {
    if n < MIN_LYAPUNOV_ITERATES {
        return Err(Error::invalid(format!(
            "Lyapunov estimates need at least {MIN_LYAPUNOV_ITERATES} iterates, got {n}"
        )));
    }
    Ok(())
}

/// Mean of `ln|r(1 − 2x)|` over `n` iterates following `burn_in`
/// transients. Points where the derivative vanishes are skipped and counted.
pub fn lyapunov(spec: &MapSpec, x0: f64, n: usize, burn_in: usize) -> Result<LyapunovEstimate> {
    spec.validate()?;
    check_unit("x0", x0)?;
    check_lengths(n)?;
    let mut nudged = 0;
    let mut x = x0;
    for _ in 0..burn_in {
        x = guarded_step(spec, x, &mut nudged);
    }
    let (mut sum, mut used, mut skipped) = (0.0, 0usize, 0usize);
    for _ in 0..n {
        let slope = spec.derivative(x).abs();
        if slope > 0.0 {
            sum += slope.ln();
            used += 1;
        } else {
            skipped += 1;
        }
        x = guarded_step(spec, x, &mut nudged);
    }
    if used == 0 {
        return Err(Error::DegenerateInput(
            "every iterate had zero derivative".into(),
        ));
    }
    Ok(LyapunovEstimate {
        lambda: sum / used as f64,
        used,
        skipped,
        nudged,
    })
}

/// Twin-orbit estimate: a partner started `separation` away is stepped
/// alongside the orbit, the log growth of the gap is accumulated, and the
/// partner is reset to the same separation after every step.
pub fn divergence_lyapunov(
    spec: &MapSpec,
    x0: f64,
    n: usize,
    burn_in: usize,
    separation: f64,
) -> Result<LyapunovEstimate> {
    spec.validate()?;
    check_unit("x0", x0)?;
    check_lengths(n)?;
    if !(separation > 0.0 && separation < 0.5) {
        return Err(Error::invalid(format!(
            "separation = {separation} must lie in (0, 0.5)"
        )));
    }
    let mut nudged = 0;
    let mut x = x0;
    for _ in 0..burn_in {
        x = guarded_step(spec, x, &mut nudged);
    }
    let (mut sum, mut used, mut skipped) = (0.0, 0usize, 0usize);
    for _ in 0..n {
        let twin = if x + separation <= 1.0 {
            x + separation
        } else {
            x - separation
        };
        let next = guarded_step(spec, x, &mut nudged);
        let gap = (spec.apply(twin) - next).abs();
        if gap > 0.0 {
            sum += (gap / separation).ln();
            used += 1;
        } else {
            skipped += 1;
        }
        x = next;
    }
    if used == 0 {
        return Err(Error::DegenerateInput("twin orbits never separated".into()));
    }
    Ok(LyapunovEstimate {
        lambda: sum / used as f64,
        used,
        skipped,
        nudged,
    })
}
