//! Deterministic simulation and analysis of two coupled-behaviour models.
//!
//! * [`flock`]: a planar agent population whose velocity update mixes the
//!   individual heading with the group heading, modulated by social-network
//!   density and a mutation scalar, plus Fermi-rule imitation between
//!   neighbours.
//! * [`coord`]: relative-phase coordination dynamics (HKB potential with
//!   asymmetric, temperature-driven coupling), the damped mass-spring
//!   oscillator, and a synthetic circadian experiment generator.
//! * [`analysis`]: Shannon entropy of phase histograms, circular statistics,
//!   z-scores, Pearson correlation and balanced two-way ANOVA.
//! * [`chaos`]: logistic-map orbits, orbit divergence and Lyapunov exponents.
//!
//! Every stochastic routine consumes a [`RandomStream`], so any run is fully
//! determined by its parameters and seed.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod chaos;
pub mod coord;
mod error;
pub mod flock;
pub mod stream;
pub mod vector;

pub use error::{Error, Result};
pub use stream::{derive_seed, RandomStream};
pub use vector::Vec2;
