//! Independent single-step flock reference written with plain tuples and
//! brute-force neighbour search, shared by the oracle tests.

use coordsim_core::flock::{
    AgentState, Boundary, Bounds, FlockParams, FlockSimulation, FlockState, PayoffMode,
};
use coordsim_core::{RandomStream, Vec2};

pub type P = (f64, f64);

pub fn sub(a: P, b: P) -> P {
    (a.0 - b.0, a.1 - b.1)
}
pub fn len(a: P) -> f64 {
    (a.0 * a.0 + a.1 * a.1).sqrt()
}
pub fn unit(a: P) -> P {
    let l = len(a);
    if l == 0.0 {
        (0.0, 0.0)
    } else {
        (a.0 / l, a.1 / l)
    }
}

pub struct World {
    pub w: f64,
    pub h: f64,
}

impl World {
    pub fn image(&self, from: P, to: P) -> P {
        let mut d = sub(to, from);
        if d.0 > self.w / 2.0 {
            d.0 -= self.w;
        } else if d.0 < -self.w / 2.0 {
            d.0 += self.w;
        }
        if d.1 > self.h / 2.0 {
            d.1 -= self.h;
        } else if d.1 < -self.h / 2.0 {
            d.1 += self.h;
        }
        d
    }

    pub fn wrap(&self, p: P) -> P {
        (p.0.rem_euclid(self.w), p.1.rem_euclid(self.h))
    }
}

/// Reference step: returns (positions, velocities) after movement and
/// imitation, drawing one uniform per agent from `draws`.
#[allow(clippy::too_many_arguments)]
pub fn reference_step(
    pos: &[P],
    vel: &[P],
    world: &World,
    sep: f64,
    vision: f64,
    k: f64,
    k_prime: f64,
    ties: f64,
    nodes: f64,
    width: f64,
    omega: f64,
    cap: f64,
    draws: &[f64],
) -> (Vec<P>, Vec<P>) {
    let n = pos.len();
    let avg = (
        vel.iter().map(|v| v.0).sum::<f64>() / n as f64,
        vel.iter().map(|v| v.1).sum::<f64>() / n as f64,
    );
    let density = (2.0 * ties / nodes) / (nodes * (nodes - 1.0) / 2.0);
    let v_ss = k_prime * (1.0 - density) - 2.0 * k_prime * density;
    let scale = ((1.0 - 2.0 * k) / width) / v_ss;

    let mut new_pos = Vec::new();
    let mut new_vel = Vec::new();
    for i in 0..n {
        let mut near = (0.0, 0.0);
        let mut near_n = 0;
        let mut all = (0.0, 0.0);
        let mut all_n = 0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = world.image(pos[i], pos[j]);
            let dist = len(d);
            if dist <= vision {
                all = (all.0 + d.0, all.1 + d.1);
                all_n += 1;
                if dist < sep {
                    near = (near.0 + d.0, near.1 + d.1);
                    near_n += 1;
                }
            }
        }
        let steer = if near_n > 0 {
            unit((-near.0, -near.1))
        } else if all_n > 0 {
            unit(all)
        } else {
            (0.0, 0.0)
        };
        let sign = if len(vel[i]) > len(avg) { -1.0 } else { 1.0 };
        let mix = (
            (1.0 - k) * vel[i].0 + k * avg.0,
            (1.0 - k) * vel[i].1 + k * avg.1,
        );
        let mut v = (
            avg.0 + steer.0 + sign * scale * mix.0,
            avg.1 + steer.1 + sign * scale * mix.1,
        );
        let speed = len(v);
        if speed > cap {
            v = (v.0 * cap / speed, v.1 * cap / speed);
        }
        new_pos.push(world.wrap((pos[i].0 + v.0, pos[i].1 + v.1)));
        new_vel.push(v);
    }

    let mut out_vel = new_vel.clone();
    for i in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if i == j {
                continue;
            }
            let dist = len(world.image(new_pos[i], new_pos[j]));
            if dist <= vision && best.is_none_or(|(_, b)| dist < b) {
                best = Some((j, dist));
            }
        }
        if let Some((j, _)) = best {
            let gap = len(new_vel[j]) - len(new_vel[i]);
            let p = 1.0 / (1.0 + (-omega * gap).exp());
            if draws[i] < p {
                out_vel[i] = new_vel[j];
            }
        }
    }
    (new_pos, out_vel)
}

/// Steps a hand-built 3-agent wrap-world population once with `seed` and
/// returns the largest component error against [`reference_step`] over
/// positions, velocities and payoffs.
pub fn three_agent_max_error(seed: u64) -> f64 {
    let params = FlockParams {
        population: 3,
        separation: 1.0,
        vision: 5.0,
        speed: 5.0,
        tradeoff: 0.1,
        mutation_rate: 0.5,
        social_ties: 0.55,
        width: 1.0,
        omega_sel: 2.0,
        nodes: 2,
        mode: PayoffMode::Pi3,
        bounds: Bounds {
            width: 20.0,
            height: 20.0,
        },
        boundary: Boundary::Wrap,
        flip: true,
    };
    // agent 2 sits across the periodic edge from agent 0 and inside its
    // separation distance
    let pos: Vec<P> = vec![(0.4, 10.0), (3.0, 11.0), (19.8, 10.2)];
    let vel: Vec<P> = vec![(1.0, 0.5), (-0.3, 0.2), (0.1, -0.4)];
    let agents = pos
        .iter()
        .zip(&vel)
        .map(|(p, v)| AgentState::new(Vec2::new(p.0, p.1), Vec2::new(v.0, v.1)))
        .collect();
    let state = FlockState {
        agents,
        step_index: 0,
        rng: RandomStream::new(seed),
    };
    let mut sim = FlockSimulation::from_state(params, state).unwrap();
    sim.step().unwrap();
    assert_eq!(sim.state().step_index, 1);

    let mut stream = RandomStream::new(seed);
    let draws: Vec<f64> = (0..3).map(|_| stream.draw()).collect();
    let world = World { w: 20.0, h: 20.0 };
    let (want_pos, want_vel) = reference_step(
        &pos, &vel, &world, 1.0, 5.0, 0.1, 0.5, 0.55, 2.0, 1.0, 2.0, 5.0, &draws,
    );

    let mut worst = 0.0f64;
    for (i, agent) in sim.state().agents.iter().enumerate() {
        let got = [
            agent.pos.x,
            agent.pos.y,
            agent.vel.x,
            agent.vel.y,
            agent.payoff,
        ];
        let want = [
            want_pos[i].0,
            want_pos[i].1,
            want_vel[i].0,
            want_vel[i].1,
            len(want_vel[i]),
        ];
        for (g, w) in got.iter().zip(want) {
            worst = worst.max((g - w).abs());
        }
    }
    worst
}
