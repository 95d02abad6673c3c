//! Planar flocking population with social-network coupling.
//!
//! Each step every agent reads the previous population state and computes
//!
//! ```text
//! u     = v_avg + b_i
//! mix   = (1 − k)·v_i + k·v_avg
//! PI1:  v' = u ± mix
//! PI2:  v' = u ± (mix + v_ss·unit(v_i))
//! PI3:  v' = u ± mix·(id / v_ss)
//! ```
//!
//! where `±` is `−` for agents faster than the group heading, `b_i` is the
//! unit vector toward the centroid of neighbours within the vision radius
//! (or away from neighbours closer than the separation distance),
//! `v_ss = k′(1 − 3·ND)` with network density `ND`, and `id = (1 − 2k)/W`.
//! Speeds are capped at `speed`. After moving, each agent imitates its
//! nearest neighbour's velocity with Fermi probability on the speed gap.

mod rules;
mod sim;
mod space;
mod sweep;

pub use rules::{
    conditional_flip, fermi_probability, flip_sign, group_heading, index_of_difficulty,
    mutation_scalar, network_density, pursuit_step, tradeoff_update,
};
pub use sim::{
    agent_update, alignment_order, imitation_step, initial_state, run_flock, FlockMetrics,
    FlockRun, FlockSimulation,
};
pub use space::Neighbour;
pub use sweep::{
    fit_exponential_decay, mean_metric_per_point, sweep_flock, sweep_jobs, sweep_social_ties,
    threshold_estimate, DecayFit, SweepJob, SweepReport, SweepRun,
};

use serde::{Deserialize, Serialize};

use crate::{Error, RandomStream, Result, Vec2};

/// Velocity-update variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PayoffMode {
    #[serde(rename = "PI1")]
    Pi1,
    #[serde(rename = "PI2")]
    Pi2,
    #[serde(rename = "PI3")]
    Pi3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Toroidal world; distances use the minimum image.
    Wrap,
    /// Positions are clamped to the rectangle.
    Clamp,
}

/// World rectangle `[0, width) × [0, height)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub width: f64,
    pub height: f64,
}

/// Guard on `|v_ss|` when it divides the PI3 update.
pub const DIVISOR_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlockParams {
    /// Number of individuals (M).
    pub population: usize,
    /// Separation distance (D): neighbours closer than this repel.
    pub separation: f64,
    /// Vision radius (E) for cohesion, imitation and metrics.
    pub vision: f64,
    /// Speed cap (V); initial speeds are uniform in `(0, V)`.
    pub speed: f64,
    /// Individual/group trade-off k.
    #[serde(rename = "k")]
    pub tradeoff: f64,
    /// Mutation (exploration) rate k′.
    #[serde(rename = "k_prime")]
    pub mutation_rate: f64,
    /// Social ties t.
    #[serde(rename = "t_ties")]
    pub social_ties: f64,
    /// Width W ("size or reputation") in the index of difficulty.
    #[serde(rename = "w")]
    pub width: f64,
    /// Selection intensity ω of the imitation rule.
    pub omega_sel: f64,
    /// Node count N of the social network.
    pub nodes: usize,
    pub mode: PayoffMode,
    pub bounds: Bounds,
    pub boundary: Boundary,
    /// Apply the conditional direction reversal.
    pub flip: bool,
}

impl Default for FlockParams {
    fn default() -> Self {
        FlockParams {
            population: 1000,
            separation: 1.0,
            vision: 5.0,
            speed: 5.0,
            tradeoff: 0.1,
            mutation_rate: 0.5,
            social_ties: 0.55,
            width: 1.0,
            omega_sel: 5.0,
            nodes: 2,
            mode: PayoffMode::Pi3,
            bounds: Bounds {
                width: 100.0,
                height: 100.0,
            },
            boundary: Boundary::Wrap,
            flip: true,
        }
    }
}

/// Names accepted by [`FlockParams::set_numeric`], in declaration order.
pub const NUMERIC_PARAMS: &[&str] = &[
    "population",
    "separation",
    "vision",
    "speed",
    "k",
    "k_prime",
    "t_ties",
    "w",
    "omega_sel",
    "nodes",
];

impl FlockParams {
    pub fn validate(&self) -> Result<()> {
        fn range(key: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
            if (lo..=hi).contains(&value) {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "{key} = {value} is outside [{lo}, {hi}]"
                )))
            }
        }
        fn positive(key: &str, value: f64) -> Result<()> {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "{key} = {value} must be positive and finite"
                )))
            }
        }
        if self.population < 2 {
            return Err(Error::invalid(format!(
                "population = {} must be at least 2",
                self.population
            )));
        }
        if self.nodes < 2 {
            return Err(Error::invalid(format!(
                "nodes = {} must be at least 2",
                self.nodes
            )));
        }
        positive("separation", self.separation)?;
        positive("vision", self.vision)?;
        positive("speed", self.speed)?;
        positive("w", self.width)?;
        positive("bounds.width", self.bounds.width)?;
        positive("bounds.height", self.bounds.height)?;
        range("k", self.tradeoff, 0.0, 1.0)?;
        range("k_prime", self.mutation_rate, 0.0, 1.0)?;
        range("t_ties", self.social_ties, 0.0, 1.0)?;
        if !(self.omega_sel >= 0.0 && self.omega_sel.is_finite()) {
            return Err(Error::invalid(format!(
                "omega_sel = {} must be non-negative and finite",
                self.omega_sel
            )));
        }
        if self.mode == PayoffMode::Pi3 {
            range("k", self.tradeoff, 0.0, 0.5)?;
        }
        Ok(())
    }

    pub fn get_numeric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "population" => self.population as f64,
            "separation" => self.separation,
            "vision" => self.vision,
            "speed" => self.speed,
            "k" => self.tradeoff,
            "k_prime" => self.mutation_rate,
            "t_ties" => self.social_ties,
            "w" => self.width,
            "omega_sel" => self.omega_sel,
            "nodes" => self.nodes as f64,
            _ => return None,
        })
    }

    /// Sets the parameter with serialized name `name`. Integer parameters
    /// require an integral value.
    pub fn set_numeric(&mut self, name: &str, value: f64) -> Result<()> {
        let as_count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(Error::invalid(format!(
                    "{name} needs an integer value, got {v}"
                )))
            }
        };
        match name {
            "population" => self.population = as_count(value)?,
            "separation" => self.separation = value,
            "vision" => self.vision = value,
            "speed" => self.speed = value,
            "k" => self.tradeoff = value,
            "k_prime" => self.mutation_rate = value,
            "t_ties" => self.social_ties = value,
            "w" => self.width = value,
            "omega_sel" => self.omega_sel = value,
            "nodes" => self.nodes = as_count(value)?,
            _ => {
                return Err(Error::invalid(format!(
                    "unknown flock parameter `{name}` (expected one of {})",
                    NUMERIC_PARAMS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Wraps or clamps a position into the world.
    pub fn confine(&self, p: Vec2) -> Vec2 {
        let Bounds { width, height } = self.bounds;
        match self.boundary {
            Boundary::Wrap => {
                let wrap = |v: f64, len: f64| {
                    let w = v.rem_euclid(len);
                    // rem_euclid can round up to `len` for tiny negative inputs
                    if w >= len {
                        0.0
                    } else {
                        w
                    }
                };
                Vec2::new(wrap(p.x, width), wrap(p.y, height))
            }
            Boundary::Clamp => Vec2::new(p.x.clamp(0.0, width), p.y.clamp(0.0, height)),
        }
    }

    /// Displacement from `from` to `to`, using the minimum image on a torus.
    pub fn offset(&self, from: Vec2, to: Vec2) -> Vec2 {
        let d = to - from;
        match self.boundary {
            Boundary::Wrap => {
                let Bounds { width, height } = self.bounds;
                Vec2::new(
                    d.x - width * (d.x / width).round(),
                    d.y - height * (d.y / height).round(),
                )
            }
            Boundary::Clamp => d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub pos: Vec2,
    pub vel: Vec2,
    /// Payoff π: the agent's current speed.
    pub payoff: f64,
}

impl AgentState {
    pub fn new(pos: Vec2, vel: Vec2) -> Self {
        AgentState {
            pos,
            vel,
            payoff: vel.norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlockState {
    pub agents: Vec<AgentState>,
    pub step_index: usize,
    pub rng: RandomStream,
}
