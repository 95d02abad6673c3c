//! Synchronous stepping of the flock and per-step metrics.

use serde::{Deserialize, Serialize};

use crate::analysis::{histogram_probs, shannon_entropy, DEFAULT_BINS};
use crate::flock::rules::{
    fermi_probability, flip_sign, group_heading, index_of_difficulty, mutation_scalar,
    network_density, tradeoff_update,
};
use crate::flock::space::{neighbourhoods, Neighbour};
use crate::flock::{AgentState, FlockParams, FlockState, PayoffMode, DIVISOR_GUARD};
use crate::{Error, RandomStream, Result, Vec2};

/// Summary of one step, emitted as one CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlockMetrics {
    pub step: usize,
    /// Mean distance moved during the step.
    pub avg_displacement: f64,
    /// Smallest local clustering variance over agents.
    pub cluster_var_min: f64,
    /// Largest local clustering variance over agents.
    pub cluster_var_max: f64,
    /// Population standard deviation of the distances moved.
    pub sd_displacement: f64,
    /// Shannon entropy (bits) of the heading distribution.
    pub entropy_bits: f64,
}

pub struct FlockRun {
    /// Population after each step.
    pub trajectory: Vec<FlockState>,
    pub metrics: Vec<FlockMetrics>,
}

/// Quantities shared by every agent within one step.
#[derive(Debug, Clone, Copy)]
struct StepScalars {
    heading: Vec2,
    network_term: f64,
    pi3_scale: f64,
}

impl StepScalars {
    fn compute(agents: &[AgentState], params: &FlockParams) -> Result<Self> {
        let heading = group_heading(agents)?;
        let density = network_density(params.social_ties, params.nodes)?;
        let network_term = mutation_scalar(params.mutation_rate, density);
        let pi3_scale = if params.mode == PayoffMode::Pi3 {
            if network_term.abs() < DIVISOR_GUARD {
                return Err(Error::DegenerateDenominator(format!(
                    "|v_ss| = {:e} is below {DIVISOR_GUARD:e} (k_prime = {}, t_ties = {}, nodes = {})",
                    network_term.abs(),
                    params.mutation_rate,
                    params.social_ties,
                    params.nodes
                )));
            }
            index_of_difficulty(params.tradeoff, params.width)? / network_term
        } else {
            1.0
        };
        Ok(StepScalars {
            heading,
            network_term,
            pi3_scale,
        })
    }
}

/// Unit steering vector: away from neighbours inside the separation
/// distance if there are any, otherwise toward the centroid of all
/// neighbours, otherwise zero.
fn steering(neighbours: &[Neighbour], separation: f64) -> Vec2 {
    let sep_sq = separation * separation;
    let (close_sum, close_n) = neighbours
        .iter()
        .filter(|n| n.dist_sq < sep_sq)
        .fold((Vec2::ZERO, 0usize), |(s, c), n| (s + n.offset, c + 1));
    if close_n > 0 {
        return (-close_sum).unit();
    }
    neighbours
        .iter()
        .fold(Vec2::ZERO, |s, n| s + n.offset)
        .unit()
}

fn move_agent(
    agent: &AgentState,
    neighbours: &[Neighbour],
    scalars: &StepScalars,
    params: &FlockParams,
) -> Result<AgentState> {
    let v_i = agent.vel;
    let v_avg = scalars.heading;
    let base = v_avg + steering(neighbours, params.separation);
    let mut mix = tradeoff_update(v_i, v_avg, params.tradeoff)?;
    match params.mode {
        PayoffMode::Pi1 => {}
        PayoffMode::Pi2 => mix += v_i.unit() * scalars.network_term,
        PayoffMode::Pi3 => mix = mix * scalars.pi3_scale,
    }
    let sign = if params.flip {
        flip_sign(v_i, v_avg)
    } else {
        1.0
    };
    let vel = (base + mix * sign).clamp_norm(params.speed);
    if !vel.is_finite() {
        return Err(Error::invalid(format!("non-finite velocity {vel:?}")));
    }
    Ok(AgentState::new(params.confine(agent.pos + vel), vel))
}

/// Moves agent `index` one step from the population in `flock`, without
/// imitation. Computes the neighbourhoods of the whole population; stepping
/// code should use [`FlockSimulation`].
pub fn agent_update(index: usize, flock: &FlockState, params: &FlockParams) -> Result<AgentState> {
    let agent = flock.agents.get(index).ok_or_else(|| {
        Error::invalid(format!(
            "agent {index} not in a flock of {}",
            flock.agents.len()
        ))
    })?;
    let scalars = StepScalars::compute(&flock.agents, params)?;
    let neighbours = neighbourhoods(&flock.agents, params);
    move_agent(agent, &neighbours[index], &scalars, params)
}

fn adopt(focal: AgentState, role: &AgentState, omega_sel: f64, u: f64) -> AgentState {
    let p = fermi_probability(role.payoff - focal.payoff, omega_sel);
    if u < p {
        AgentState::new(focal.pos, role.vel)
    } else {
        focal
    }
}

/// Fermi imitation: with probability `p(π_role − π_focal)` the focal agent
/// takes the role model's velocity. Consumes exactly one uniform draw.
pub fn imitation_step(
    focal: AgentState,
    role: AgentState,
    params: &FlockParams,
    rng: RandomStream,
) -> (AgentState, RandomStream) {
    let (u, rng) = rng.next();
    (adopt(focal, &role, params.omega_sel, u), rng)
}

fn nearest(neighbours: &[Neighbour]) -> Option<&Neighbour> {
    // lists are index-sorted, so the first minimum is the lowest index
    neighbours
        .iter()
        .fold(None, |best: Option<&Neighbour>, n| match best {
            Some(b) if b.dist_sq <= n.dist_sq => Some(b),
            _ => Some(n),
        })
}

/// Random initial population: uniform positions, uniform headings and
/// speeds uniform in `[0, speed)`.
pub fn initial_state(params: &FlockParams, seed: u64) -> Result<FlockState> {
    params.validate()?;
    let mut rng = RandomStream::new(seed);
    let agents = (0..params.population)
        .map(|_| {
            let pos = Vec2::new(
                rng.uniform(0.0, params.bounds.width),
                rng.uniform(0.0, params.bounds.height),
            );
            let heading = rng.uniform(-std::f64::consts::PI, std::f64::consts::PI);
            let speed = rng.uniform(0.0, params.speed);
            AgentState::new(params.confine(pos), Vec2::from_angle(heading) * speed)
        })
        .collect();
    Ok(FlockState {
        agents,
        step_index: 0,
        rng,
    })
}

/// Norm of the mean unit heading; 1 for a perfectly aligned flock.
pub fn alignment_order(agents: &[AgentState]) -> f64 {
    if agents.is_empty() {
        return 0.0;
    }
    let sum = agents.iter().fold(Vec2::ZERO, |s, a| s + a.vel.unit());
    sum.norm() / agents.len() as f64
}

pub struct FlockSimulation {
    params: FlockParams,
    state: FlockState,
    neighbours: Vec<Vec<Neighbour>>,
}

impl FlockSimulation {
    pub fn new(params: FlockParams, seed: u64) -> Result<Self> {
        let state = initial_state(&params, seed)?;
        Self::from_state(params, state)
    }

    /// Continues from an explicit population.
    pub fn from_state(params: FlockParams, state: FlockState) -> Result<Self> {
        params.validate()?;
        if state.agents.len() != params.population {
            return Err(Error::invalid(format!(
                "state holds {} agents but population = {}",
                state.agents.len(),
                params.population
            )));
        }
        let neighbours = neighbourhoods(&state.agents, &params);
        Ok(FlockSimulation {
            params,
            state,
            neighbours,
        })
    }

    pub fn state(&self) -> &FlockState {
        &self.state
    }

    pub fn params(&self) -> &FlockParams {
        &self.params
    }

    /// One synchronous movement update followed by one imitation round.
    pub fn step(&mut self) -> Result<FlockMetrics> {
        let step = self.state.step_index + 1;
        let params = &self.params;
        let before = &self.state.agents;

        let scalars = StepScalars::compute(before, params)
            .map_err(|e| e.with_context(format!("flock step {step}")))?;
        let moved = before
            .iter()
            .zip(&self.neighbours)
            .enumerate()
            .map(|(i, (agent, nb))| {
                move_agent(agent, nb, &scalars, params)
                    .map_err(|e| e.with_context(format!("flock step {step}, agent {i}")))
            })
            .collect::<Result<Vec<_>>>()?;

        let neighbours = neighbourhoods(&moved, params);
        let mut rng = self.state.rng.clone();
        let agents: Vec<AgentState> = moved
            .iter()
            .zip(&neighbours)
            .map(|(focal, nb)| {
                let u = rng.draw();
                match nearest(nb) {
                    Some(role) => adopt(*focal, &moved[role.index], params.omega_sel, u),
                    None => *focal,
                }
            })
            .collect();

        let metrics = step_metrics(step, before, &agents, &neighbours, params);
        self.state = FlockState {
            agents,
            step_index: step,
            rng,
        };
        self.neighbours = neighbours;
        Ok(metrics)
    }
}

fn step_metrics(
    step: usize,
    before: &[AgentState],
    after: &[AgentState],
    neighbours: &[Vec<Neighbour>],
    params: &FlockParams,
) -> FlockMetrics {
    let n = after.len() as f64;
    let moves: Vec<f64> = before
        .iter()
        .zip(after)
        .map(|(a, b)| params.offset(a.pos, b.pos).norm())
        .collect();
    let avg = moves.iter().sum::<f64>() / n;
    let sd = (moves.iter().map(|d| (d - avg).powi(2)).sum::<f64>() / n).sqrt();

    let (mut var_min, mut var_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for nb in neighbours {
        // the focal agent sits at the origin of its own offsets
        let count = (nb.len() + 1) as f64;
        let centroid = nb.iter().fold(Vec2::ZERO, |s, x| s + x.offset) * (1.0 / count);
        let spread = nb
            .iter()
            .map(|x| (x.offset - centroid).norm_sq())
            .sum::<f64>()
            + centroid.norm_sq();
        let var = spread / count;
        var_min = var_min.min(var);
        var_max = var_max.max(var);
    }

    let headings: Vec<f64> = after.iter().map(|a| a.vel.angle()).collect();
    let entropy_bits = histogram_probs(&headings, DEFAULT_BINS)
        .and_then(|h| shannon_entropy(&h.probs, false))
        .map(|r| r.h_bits)
        .unwrap_or(0.0);

    FlockMetrics {
        step,
        avg_displacement: avg,
        cluster_var_min: var_min,
        cluster_var_max: var_max,
        sd_displacement: sd,
        entropy_bits,
    }
}

/// Runs `steps` updates from the seeded initial population, keeping every
/// post-step snapshot.
pub fn run_flock(params: &FlockParams, steps: usize, seed: u64) -> Result<FlockRun> {
    if steps == 0 {
        return Err(Error::invalid("run_flock needs at least one step"));
    }
    let mut sim = FlockSimulation::new(params.clone(), seed)?;
    let mut trajectory = Vec::with_capacity(steps);
    let mut metrics = Vec::with_capacity(steps);
    for _ in 0..steps {
        metrics.push(sim.step()?);
        trajectory.push(sim.state().clone());
    }
    Ok(FlockRun {
        trajectory,
        metrics,
    })
}
