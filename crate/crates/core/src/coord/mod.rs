//! Coordination dynamics: a damped mass-spring oscillator, the relative-phase
//! potential with its stochastic phase equation, and a temperature-driven
//! synthetic experiment.
//!
//! The relative phase φ obeys
//!
//! ```text
//! dφ = [Δω − (a sin φ + 2b sin 2φ) − (c sin φ + 2d sin 2φ)] dt + √Q dW
//! ```
//!
//! whose deterministic part is `Δω − dV/dφ` for `V(φ) = −a cos φ − b cos 2φ`
//! when `c = d = 0`. Phases are stored unwrapped; wrapping happens only in
//! analysis.

mod experiment;
mod hkb;
mod spring;
mod thermo;

pub use experiment::{
    experiment_jobs, synthetic_experiment, Condition, ExperimentDesign, ExperimentRecord, TrialJob,
};
pub use hkb::{
    fixed_points, hkb_drift, hkb_potential, integrate_phase, FixedPoint, HkbParams, PhaseSeries,
};
pub use spring::{simulate_spring, spring_accel, spring_energy, SpringParams};
pub use thermo::{
    body_temperature, circadian_t0, epsilon, thermo_coefficients, TemperatureProtocol,
};
