//! Uniform-grid neighbour search.

use crate::flock::{AgentState, Boundary, FlockParams};
use crate::Vec2;

/// Another agent within the vision radius, seen from the focal agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbour {
    pub index: usize,
    /// Minimum-image displacement from the focal agent to this neighbour.
    pub offset: Vec2,
    pub dist_sq: f64,
}

/// Neighbours of every agent within `params.vision`, each list sorted by
/// agent index.
pub(crate) fn neighbourhoods(agents: &[AgentState], params: &FlockParams) -> Vec<Vec<Neighbour>> {
    let radius = params.vision;
    let r_sq = radius * radius;
    let nx = ((params.bounds.width / radius).floor() as usize).max(1);
    let ny = ((params.bounds.height / radius).floor() as usize).max(1);
    let cell_w = params.bounds.width / nx as f64;
    let cell_h = params.bounds.height / ny as f64;
    let cell_of = |p: Vec2| {
        let cx = ((p.x / cell_w).floor().max(0.0) as usize).min(nx - 1);
        let cy = ((p.y / cell_h).floor().max(0.0) as usize).min(ny - 1);
        (cx, cy)
    };

    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); nx * ny];
    for (i, a) in agents.iter().enumerate() {
        let (cx, cy) = cell_of(a.pos);
        cells[cy * nx + cx].push(i);
    }

    let wrap = params.boundary == Boundary::Wrap;
    let adjacent = |c: usize, n: usize| -> Vec<usize> {
        let mut out = Vec::with_capacity(3);
        for d in [-1i64, 0, 1] {
            let k = c as i64 + d;
            let k = if wrap {
                k.rem_euclid(n as i64)
            } else if k < 0 || k >= n as i64 {
                continue;
            } else {
                k
            };
            let k = k as usize;
            if !out.contains(&k) {
                out.push(k);
            }
        }
        out
    };

    agents
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (cx, cy) = cell_of(a.pos);
            let mut found = Vec::new();
            for yy in adjacent(cy, ny) {
                for xx in adjacent(cx, nx) {
                    for &j in &cells[yy * nx + xx] {
                        if j == i {
                            continue;
                        }
                        let offset = params.offset(a.pos, agents[j].pos);
                        let dist_sq = offset.norm_sq();
                        if dist_sq <= r_sq {
                            found.push(Neighbour {
                                index: j,
                                offset,
                                dist_sq,
                            });
                        }
                    }
                }
            }
            found.sort_by_key(|n| n.index);
            found
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RandomStream;

    fn brute_force(agents: &[AgentState], params: &FlockParams) -> Vec<Vec<usize>> {
        agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                (0..agents.len())
                    .filter(|&j| {
                        j != i
                            && params.offset(a.pos, agents[j].pos).norm_sq()
                                <= params.vision.powi(2)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn grid_matches_brute_force() {
        for boundary in [Boundary::Wrap, Boundary::Clamp] {
            let params = FlockParams {
                boundary,
                vision: 7.0,
                ..FlockParams::default()
            };
            let mut rng = RandomStream::new(11);
            let agents: Vec<AgentState> = (0..400)
                .map(|_| {
                    let pos = Vec2::new(rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0));
                    AgentState::new(pos, Vec2::ZERO)
                })
                .collect();
            let grid: Vec<Vec<usize>> = neighbourhoods(&agents, &params)
                .into_iter()
                .map(|ns| ns.into_iter().map(|n| n.index).collect())
                .collect();
            assert_eq!(grid, brute_force(&agents, &params));
        }
    }
}
