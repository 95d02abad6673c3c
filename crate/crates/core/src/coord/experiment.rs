use serde::{Deserialize, Serialize};

use super::hkb::{integrate_phase, HkbParams, PhaseSeries};
use super::thermo::{body_temperature, epsilon, thermo_coefficients, TemperatureProtocol};
use crate::{derive_seed, Error, RandomStream, Result};

/// Stream domain tags, so detuning and trial-noise keys never collide.
const JITTER_DOMAIN: u64 = 0;
const NOISE_DOMAIN: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Condition {
    Normal,
    Heat,
    Ice,
}

impl Condition {
    /// Signed vest offset for this condition, °C.
    pub fn offset(self, proto: &TemperatureProtocol) -> f64 {
        match self {
            Condition::Normal => 0.0,
            Condition::Heat => proto.vest_offset,
            Condition::Ice => -proto.vest_offset,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Normal => "NORMAL",
            Condition::Heat => "HEAT",
            Condition::Ice => "ICE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentDesign {
    /// Hours of day in `[0, 24)`; midnight is 0.
    pub circadian_points: Vec<f64>,
    pub participants: usize,
    pub trials_per_point: usize,
    pub condition: Condition,
    /// Integration step, seconds.
    pub dt: f64,
    /// Trial length, seconds.
    pub duration: f64,
    /// Half-width of the uniform per-participant detuning jitter, rad/s.
    pub detuning_jitter: f64,
    /// Instructed (and initial) relative phase.
    pub phi0: f64,
}

impl Default for ExperimentDesign {
    fn default() -> Self {
        ExperimentDesign {
            circadian_points: vec![5.0, 12.0, 17.0, 0.0],
            participants: 8,
            trials_per_point: 6,
            condition: Condition::Normal,
            dt: 0.005,
            duration: 60.0,
            detuning_jitter: 0.1,
            phi0: 0.0,
        }
    }
}

impl ExperimentDesign {
    pub fn validate(&self) -> Result<()> {
        if self.participants == 0 {
            return Err(Error::invalid("participants must be at least 1"));
        }
        if self.trials_per_point == 0 {
            return Err(Error::invalid("trials_per_point must be at least 1"));
        }
        if self.circadian_points.is_empty() {
            return Err(Error::invalid("circadian_points must not be empty"));
        }
        if let Some(h) = self
            .circadian_points
            .iter()
            .find(|h| !(0.0..24.0).contains(*h))
        {
            return Err(Error::invalid(format!(
                "circadian point {h} is outside [0, 24)"
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.duration >= self.dt && self.duration.is_finite()) {
            return Err(Error::invalid(format!(
                "duration = {} must be at least dt",
                self.duration
            )));
        }
        if !(self.detuning_jitter >= 0.0 && self.detuning_jitter.is_finite()) {
            return Err(Error::invalid("detuning_jitter must be non-negative"));
        }
        if !self.phi0.is_finite() {
            return Err(Error::invalid("phi0 must be finite"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn series_count(&self) -> usize {
        self.participants * self.circadian_points.len() * self.trials_per_point
    }
}

/// One simulated trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub participant: usize,
    pub hour: f64,
    pub trial: usize,
    pub condition: Condition,
    /// Effective coefficients the trial ran with.
    pub params: HkbParams,
    pub series: PhaseSeries,
}

/// A fully specified trial, ready to integrate independently of the others.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialJob {
    pub participant: usize,
    pub hour: f64,
    pub trial: usize,
    pub condition: Condition,
    pub params: HkbParams,
    pub phi0: f64,
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
}

impl TrialJob {
    pub fn run(&self) -> Result<ExperimentRecord> {
        let mut rng = RandomStream::new(self.seed);
        let series = integrate_phase(&self.params, self.phi0, self.dt, self.steps, &mut rng)
            .map_err(|e| {
                e.with_context(format!(
                    "experiment participant {}, hour {}, trial {}",
                    self.participant, self.hour, self.trial
                ))
            })?;
        Ok(ExperimentRecord {
            participant: self.participant,
            hour: self.hour,
            trial: self.trial,
            condition: self.condition,
            params: self.params,
            series,
        })
    }
}

/// Expands a design into trials ordered by participant, then circadian
/// point (in design order), then trial.
///
/// Each participant gets a fixed detuning offset drawn from its own
/// substream. Trial noise is keyed by participant, hour and trial but not
/// by condition, so conditions compared under one seed share their noise.
/// The vest condition shifts `(c, d)` through the deviation of body
/// temperature from the daily mean.
pub fn experiment_jobs(
    design: &ExperimentDesign,
    p: &HkbParams,
    proto: &TemperatureProtocol,
    seed: u64,
) -> Result<Vec<TrialJob>> {
    design.validate()?;
    p.validate()?;
    proto.validate()?;
    let offset = design.condition.offset(proto);
    let steps = design.steps();
    let mut jobs = Vec::with_capacity(design.series_count());
    for participant in 0..design.participants {
        let mut jitter_rng =
            RandomStream::new(seed).substream(&[JITTER_DOMAIN, participant as u64]);
        let delta_omega =
            p.delta_omega + jitter_rng.uniform(-design.detuning_jitter, design.detuning_jitter);
        for &hour in &design.circadian_points {
            let eps = epsilon(body_temperature(hour, offset, proto)?, proto.t_mean);
            let (c, d) = thermo_coefficients(eps, p.c, p.d, proto);
            let params = HkbParams {
                c,
                d,
                delta_omega,
                ..*p
            };
            for trial in 0..design.trials_per_point {
                jobs.push(TrialJob {
                    participant,
                    hour,
                    trial,
                    condition: design.condition,
                    params,
                    phi0: design.phi0,
                    dt: design.dt,
                    steps,
                    seed: derive_seed(
                        seed,
                        &[
                            NOISE_DOMAIN,
                            participant as u64,
                            hour.to_bits(),
                            trial as u64,
                        ],
                    ),
                });
            }
        }
    }
    Ok(jobs)
}

/// Runs every trial of the design in order.
pub fn synthetic_experiment(
    design: &ExperimentDesign,
    p: &HkbParams,
    proto: &TemperatureProtocol,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    experiment_jobs(design, p, proto, seed)?
        .iter()
        .map(TrialJob::run)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(condition: Condition) -> ExperimentDesign {
        ExperimentDesign {
            circadian_points: vec![5.0, 17.0],
            participants: 2,
            trials_per_point: 2,
            condition,
            duration: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn degenerate_design() {
        let design = ExperimentDesign {
            circadian_points: vec![12.0],
            participants: 1,
            trials_per_point: 1,
            duration: 5.0,
            phi0: 0.5,
            detuning_jitter: 0.0,
            ..Default::default()
        };
        let p = HkbParams {
            q: 0.0,
            ..Default::default()
        };
        let recs = synthetic_experiment(&design, &p, &TemperatureProtocol::default(), 1).unwrap();
        assert_eq!(recs.len(), 1);
        let s = &recs[0].series.samples;
        assert_eq!(s.len(), 1001);
        assert!(s.last().unwrap().abs() < s[0].abs() * 1e-2);
    }

    #[test]
    fn full_design_count() {
        let design = ExperimentDesign::default();
        let jobs = experiment_jobs(
            &design,
            &HkbParams::default(),
            &TemperatureProtocol::default(),
            3,
        )
        .unwrap();
        assert_eq!(jobs.len(), 192);
        assert_eq!(jobs[0].steps, 12_000);
        assert_eq!(
            (jobs[7].participant, jobs[7].hour, jobs[7].trial),
            (0, 12.0, 1)
        );
    }

    #[test]
    fn deterministic_and_condition_shares_noise() {
        let p = HkbParams::default();
        let proto = TemperatureProtocol::default();
        let a = synthetic_experiment(&short(Condition::Normal), &p, &proto, 8).unwrap();
        let b = synthetic_experiment(&short(Condition::Normal), &p, &proto, 8).unwrap();
        assert_eq!(a, b);
        let heat = experiment_jobs(&short(Condition::Heat), &p, &proto, 8).unwrap();
        let normal = experiment_jobs(&short(Condition::Normal), &p, &proto, 8).unwrap();
        for (h, n) in heat.iter().zip(&normal) {
            assert_eq!(h.seed, n.seed);
            assert_eq!(h.params.delta_omega, n.params.delta_omega);
        }
        assert!(heat[0].params.d < normal[0].params.d);
        assert!(heat[2].params.d > normal[2].params.d);
    }

    #[test]
    fn jitter_is_bounded_and_per_participant() {
        let jobs = experiment_jobs(
            &short(Condition::Normal),
            &HkbParams::default(),
            &TemperatureProtocol::default(),
            2,
        )
        .unwrap();
        assert!(jobs.iter().all(|j| j.params.delta_omega.abs() <= 0.1));
        assert_eq!(jobs[0].params.delta_omega, jobs[3].params.delta_omega);
        assert_ne!(jobs[0].params.delta_omega, jobs[4].params.delta_omega);
    }

    #[test]
    fn rejects_invalid_designs() {
        let p = HkbParams::default();
        let proto = TemperatureProtocol::default();
        for design in [
            ExperimentDesign {
                participants: 0,
                ..Default::default()
            },
            ExperimentDesign {
                trials_per_point: 0,
                ..Default::default()
            },
            ExperimentDesign {
                circadian_points: vec![24.0],
                ..Default::default()
            },
            ExperimentDesign {
                dt: 0.0,
                ..Default::default()
            },
        ] {
            assert!(experiment_jobs(&design, &p, &proto, 0).is_err());
        }
    }
}
