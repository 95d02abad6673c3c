//! One synchronous flock step checked against a from-scratch reference,
//! plus whole-run determinism and alignment checks.

#[path = "support/reference_flock.rs"]
mod reference_flock;

use coordsim_core::flock::{alignment_order, run_flock, Boundary, FlockParams, PayoffMode};
use reference_flock::three_agent_max_error;

#[test]
fn three_agent_step_matches_reference() {
    for seed in 0..20u64 {
        let err = three_agent_max_error(seed);
        assert!(err < 1e-12, "seed {seed}: max error {err}");
    }
}

#[test]
fn full_coupling_aligns_quickly() {
    let params = FlockParams {
        tradeoff: 1.0,
        mode: PayoffMode::Pi1,
        flip: false,
        population: 300,
        ..Default::default()
    };
    let run = run_flock(&params, 10, 11).unwrap();
    let order = alignment_order(&run.trajectory.last().unwrap().agents);
    assert!(order >= 0.99, "alignment {order}");
}

#[test]
fn identical_seed_gives_identical_trajectory() {
    let params = FlockParams {
        population: 200,
        ..Default::default()
    };
    let a = serde_json::to_string(&run_flock(&params, 15, 4).unwrap().trajectory).unwrap();
    let b = serde_json::to_string(&run_flock(&params, 15, 4).unwrap().trajectory).unwrap();
    assert_eq!(a, b);
    let c = serde_json::to_string(&run_flock(&params, 15, 5).unwrap().trajectory).unwrap();
    assert_ne!(a, c);
}

#[test]
fn trajectory_keeps_population_and_bounds() {
    for boundary in [Boundary::Wrap, Boundary::Clamp] {
        let params = FlockParams {
            population: 150,
            boundary,
            ..Default::default()
        };
        let run = run_flock(&params, 12, 9).unwrap();
        for snap in &run.trajectory {
            assert_eq!(snap.agents.len(), 150);
            for a in &snap.agents {
                assert!((0.0..=100.0).contains(&a.pos.x) && (0.0..=100.0).contains(&a.pos.y));
            }
        }
        for m in &run.metrics {
            assert!(m.cluster_var_min <= m.cluster_var_max);
            assert!(m.entropy_bits >= 0.0);
        }
    }
}
