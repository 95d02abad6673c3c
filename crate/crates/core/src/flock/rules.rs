//! Scalar and vector update rules of the flocking model.

use crate::flock::AgentState;
use crate::{Error, Result, Vec2};

/// Mean velocity over the population (the group heading).
pub fn group_heading(agents: &[AgentState]) -> Result<Vec2> {
    if agents.is_empty() {
        return Err(Error::invalid("group heading of an empty population"));
    }
    let sum = agents.iter().fold(Vec2::ZERO, |acc, a| acc + a.vel);
    Ok(sum * (1.0 / agents.len() as f64))
}

/// Sign applied to an agent's own contribution: `-1` when the agent is
/// faster than the group heading, `+1` otherwise (ties included).
pub fn flip_sign(v_i: Vec2, v_avg: Vec2) -> f64 {
    if v_i.norm() > v_avg.norm() {
        -1.0
    } else {
        1.0
    }
}

/// `v_i` reversed when it outruns the group heading, unchanged otherwise.
pub fn conditional_flip(v_i: Vec2, v_avg: Vec2) -> Vec2 {
    v_i * flip_sign(v_i, v_avg)
}

/// `(1 − k)·v_i + k·v_avg` for `k ∈ [0, 1]`.
pub fn tradeoff_update(v_i: Vec2, v_avg: Vec2, k: f64) -> Result<Vec2> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::invalid(format!("k = {k} is outside [0, 1]")));
    }
    crate::vector::vec_combine(1.0 - k, v_i, k, v_avg)
}

/// Network density `AC / PC` with actual connections `AC = 2t / N` and
/// potential connections `PC = N(N − 1) / 2`.
pub fn network_density(social_ties: f64, nodes: usize) -> Result<f64> {
    if nodes < 2 {
        return Err(Error::invalid(format!(
            "network density needs at least 2 nodes, got {nodes}"
        )));
    }
    if !(social_ties >= 0.0) {
        return Err(Error::invalid(format!(
            "social ties must be non-negative, got {social_ties}"
        )));
    }
    let n = nodes as f64;
    let actual = 2.0 * social_ties / n;
    let potential = n * (n - 1.0) / 2.0;
    Ok(actual / potential)
}

/// Mutation-weighted network term `k′(1 − v_s) − 2k′·v_s`. Changes sign at
/// `v_s = 1/3` and may be negative.
pub fn mutation_scalar(k_prime: f64, density: f64) -> f64 {
    k_prime * (1.0 - density) - 2.0 * k_prime * density
}

/// Index of difficulty `(1 − 2k) / W` for `k ∈ [0, 0.5]` and `W > 0`.
pub fn index_of_difficulty(k: f64, width: f64) -> Result<f64> {
    if !(width > 0.0) {
        return Err(Error::invalid(format!("W = {width} must be positive")));
    }
    if !(0.0..=0.5).contains(&k) {
        return Err(Error::invalid(format!(
            "index of difficulty needs k in [0, 0.5], got {k}"
        )));
    }
    Ok((1.0 - 2.0 * k) / width)
}

/// Fermi imitation probability `1 / (1 + exp(−ω·Δπ))`.
pub fn fermi_probability(delta_payoff: f64, omega_sel: f64) -> f64 {
    let x = omega_sel * delta_payoff;
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Pursuit displacement `S + α·d²`.
pub fn pursuit_step(displacement: f64, alpha: f64, distance: f64) -> Result<f64> {
    if !(distance >= 0.0) {
        return Err(Error::invalid(format!(
            "pursuit distance must be non-negative, got {distance}"
        )));
    }
    Ok(displacement + alpha * distance * distance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn agent(vx: f64, vy: f64) -> AgentState {
        AgentState::new(Vec2::ZERO, Vec2::new(vx, vy))
    }

    #[test]
    fn group_heading_examples() {
        assert_eq!(
            group_heading(&[agent(1.0, 0.0); 4]).unwrap(),
            Vec2::new(1.0, 0.0)
        );
        assert_eq!(
            group_heading(&[agent(1.0, 0.0), agent(-1.0, 0.0)]).unwrap(),
            Vec2::ZERO
        );
        assert_eq!(
            group_heading(&[agent(4.0, 1.0), agent(1.0, 2.0), agent(1.0, 0.0)]).unwrap(),
            Vec2::new(2.0, 1.0)
        );
        assert!(group_heading(&[]).is_err());
    }

    #[test]
    fn flip_examples() {
        let v = |x, y| Vec2::new(x, y);
        assert_eq!(conditional_flip(v(1.0, 0.0), v(2.0, 0.0)), v(1.0, 0.0));
        assert_eq!(conditional_flip(v(3.0, 0.0), v(1.0, 0.0)), v(-3.0, 0.0));
        assert_eq!(conditional_flip(v(1.0, 0.0), v(0.0, 1.0)), v(1.0, 0.0));
    }

    #[test]
    fn tradeoff_examples() {
        let vi = Vec2::new(4.0, 1.0);
        let va = Vec2::new(1.0, 2.0);
        assert_eq!(tradeoff_update(vi, va, 0.0).unwrap(), vi);
        assert_eq!(tradeoff_update(vi, va, 1.0).unwrap(), va);
        assert_eq!(tradeoff_update(vi, va, 0.5).unwrap(), Vec2::new(2.5, 1.5));
        assert!(tradeoff_update(vi, va, 1.5).is_err());
        assert!(tradeoff_update(vi, va, -0.1).is_err());
    }

    #[test]
    fn network_density_examples() {
        assert_eq!(network_density(0.0, 10).unwrap(), 0.0);
        assert!((network_density(0.5, 10).unwrap() - 0.1 / 45.0).abs() < 1e-15);
        assert!((network_density(0.37, 2).unwrap() - 0.37).abs() < 1e-15);
        assert!(network_density(0.5, 1).is_err());
    }

    #[test]
    fn mutation_scalar_examples() {
        assert_eq!(mutation_scalar(0.0, 0.7), 0.0);
        assert!(mutation_scalar(0.8, 1.0 / 3.0).abs() < 1e-15);
        assert!((mutation_scalar(0.5, 0.2) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn mutation_scalar_root_by_bisection() {
        let f = |v| mutation_scalar(0.6, v);
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((0.5 * (lo + hi) - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn index_of_difficulty_examples() {
        assert!((index_of_difficulty(0.1, 1.0).unwrap() - 0.8).abs() < 1e-15);
        assert!((index_of_difficulty(0.4, 1.0).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(index_of_difficulty(0.5, 1.0).unwrap(), 0.0);
        assert!(index_of_difficulty(0.1, 0.0).is_err());
        assert!(index_of_difficulty(0.7, 1.0).is_err());
    }

    #[test]
    fn fermi_examples() {
        assert_eq!(fermi_probability(0.0, 3.0), 0.5);
        assert!((fermi_probability(3f64.ln(), 1.0) - 0.75).abs() < 1e-15);
        assert!((fermi_probability(1000.0, 1.0) - 1.0).abs() <= 1e-15);
        assert!(fermi_probability(-1000.0, 1.0) >= 0.0);
        assert_eq!(fermi_probability(123.0, 0.0), 0.5);
    }

    #[test]
    fn pursuit_examples() {
        assert_eq!(pursuit_step(1.3, 0.7, 0.0).unwrap(), 1.3);
        assert_eq!(pursuit_step(1.3, 0.0, 5.0).unwrap(), 1.3);
        assert_eq!(pursuit_step(1.0, 0.5, 2.0).unwrap(), 3.0);
        assert!(pursuit_step(1.0, 0.5, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn fermi_is_symmetric(dp in -50.0..50.0f64, w in 0.0..20.0f64) {
            let s = fermi_probability(dp, w) + fermi_probability(-dp, w);
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn density_increases_with_ties(t in 0.0..0.89f64, dt in 1e-3..0.1f64, n in 2usize..50) {
            prop_assert!(network_density(t + dt, n).unwrap() > network_density(t, n).unwrap());
        }

        #[test]
        fn density_decreases_with_nodes(t in 0.1..0.9f64, n in 2usize..500) {
            prop_assert!(network_density(t, n + 1).unwrap() < network_density(t, n).unwrap());
        }

        #[test]
        fn pursuit_monotone_in_distance(s in -5.0..5.0f64, a in 1e-3..5.0f64, d in 0.0..10.0f64, dd in 0.0..5.0f64) {
            prop_assert!(pursuit_step(s, a, d + dd).unwrap() >= pursuit_step(s, a, d).unwrap());
        }
    }
}
