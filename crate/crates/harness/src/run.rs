//! Command dispatch: runs the configured model, writes its tables and
//! documents, then the manifest.
//!
//! Independent units of work (sweep runs, experiment trials, map
//! parameters) go to a rayon pool of `jobs` workers. Results are collected
//! in job order, so the pool size never changes an output byte.

use std::fs;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use coordsim_core::analysis::{
    anova_from_records, circular_stats, histogram_probs, mean, pearson_r, phase_entropy,
    shannon_entropy, zscore, AnovaTable, CircularStats,
};
use coordsim_core::chaos::{divergence_lyapunov, lyapunov, orbit_divergence, MapSpec};
use coordsim_core::coord::{
    body_temperature, experiment_jobs, fixed_points, integrate_phase, simulate_spring,
    spring_energy, Condition, TrialJob,
};
use coordsim_core::flock::{mean_metric_per_point, sweep_jobs, FlockSimulation, SweepReport};
use coordsim_core::{Error, RandomStream};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::manifest::{sha256_bytes, MANIFEST_FILE};
use crate::output::{read_column, write_file, Artifact, Table};
use crate::{CommandKind, HarnessError, OutputFile, RunConfig, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 lets rayon choose.
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { jobs: 1 }
    }
}

/// Runs `cfg`, writes every output into `cfg.output_dir` and returns the
/// manifest (also written there as `manifest.json`).
pub fn run_command(cfg: &RunConfig, opts: &RunOptions) -> Result<RunManifest, HarnessError> {
    cfg.validate()?;
    let started_at = now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start {} workers: {e}", opts.jobs)))?;
    let artifacts = pool.install(|| match cfg.command {
        CommandKind::Flock => flock(cfg),
        CommandKind::Hkb => hkb(cfg),
        CommandKind::Experiment => experiment(cfg),
        CommandKind::Entropy => entropy(cfg),
        CommandKind::Chaos => chaos(cfg),
        CommandKind::Sweep => sweep(cfg),
    })?;

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    let mut outputs = Vec::with_capacity(artifacts.len());
    for artifact in &artifacts {
        let file = artifact.file_name(cfg.format);
        let bytes = artifact.encode(cfg.format);
        write_file(&dir.join(&file), &bytes)?;
        outputs.push(OutputFile {
            file,
            sha256: sha256_bytes(&bytes),
            bytes: bytes.len() as u64,
        });
    }
    let manifest = RunManifest {
        artifact: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        started_at,
        finished_at: now(),
        outputs,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    write_file(&dir.join(MANIFEST_FILE), &bytes)?;
    Ok(manifest)
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Runs `f` over `items` on the current pool, keeping input order. The
/// first failure in input order wins, so error reports are deterministic.
fn par_map<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> Result<R, Error> + Sync + Send,
) -> Result<Vec<R>, Error> {
    items
        .par_iter()
        .map(f)
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn flock(cfg: &RunConfig) -> Result<Vec<Artifact>, HarnessError> {
    let mut sim = FlockSimulation::new(cfg.flock.clone(), cfg.seed)
        .map_err(HarnessError::module("flock", "init"))?;
    let mut metrics = Table::new(
        "flock_metrics",
        &[
            "step",
            "avg_displacement",
            "cluster_var_min",
            "cluster_var_max",
            "sd_displacement",
            "entropy_bits",
        ],
    );
    for _ in 0..cfg.steps {
        let m = sim.step().map_err(HarnessError::module("flock", "step"))?;
        metrics.push(vec![
            m.step.into(),
            m.avg_displacement.into(),
            m.cluster_var_min.into(),
            m.cluster_var_max.into(),
            m.sd_displacement.into(),
            m.entropy_bits.into(),
        ]);
    }
    let mut agents = Table::new("flock_agents", &["agent", "x", "y", "vx", "vy", "payoff"]);
    for (i, a) in sim.state().agents.iter().enumerate() {
        agents.push(vec![
            i.into(),
            a.pos.x.into(),
            a.pos.y.into(),
            a.vel.x.into(),
            a.vel.y.into(),
            a.payoff.into(),
        ]);
    }
    Ok(vec![Artifact::Table(metrics), Artifact::Table(agents)])
}

fn hkb(cfg: &RunConfig) -> Result<Vec<Artifact>, HarnessError> {
    let ph = &cfg.phase;
    let mut rng = RandomStream::new(cfg.seed);
    let series = integrate_phase(&cfg.hkb, ph.phi0, ph.dt, ph.steps, &mut rng)
        .map_err(HarnessError::module("coord", "integrate_phase"))?;
    let wrapped = series.wrapped();
    let mut phase = Table::new("phase_series", &["t_seconds", "phi_radians", "phi_wrapped"]);
    for ((t, &phi), &w) in series.times().zip(&series.samples).zip(&wrapped) {
        phase.push(vec![t.into(), phi.into(), w.into()]);
    }

    let roots = fixed_points(&cfg.hkb);
    let mut fixed = Table::new("fixed_points", &["phi", "stable", "slope"]);
    for fp in &roots {
        fixed.push(vec![fp.phi.into(), fp.stable.into(), fp.slope.into()]);
    }

    let entropy = phase_entropy(&series.samples, cfg.entropy.bins)
        .map_err(HarnessError::module("analysis", "phase_entropy"))?;
    let circular = circular_stats(&series.samples, ph.phi0)
        .map_err(HarnessError::module("analysis", "circular_stats"))?;
    let summary = json!({
        "params": cfg.hkb,
        "samples": series.samples.len(),
        "entropy_bits": entropy.h_bits,
        "circular": circular,
        "stable_points": roots.iter().filter(|f| f.stable).count(),
        "unstable_points": roots.iter().filter(|f| !f.stable).count(),
    });

    let mut out = vec![
        Artifact::Table(phase),
        Artifact::Table(fixed),
        Artifact::document("hkb_summary", &summary),
    ];
    if let Some(sp) = &cfg.spring {
        let params = sp.params();
        let states = simulate_spring(&params, sp.x0, sp.v0, sp.dt, sp.steps)
            .map_err(HarnessError::module("coord", "simulate_spring"))?;
        let mut table = Table::new("spring", &["t_seconds", "x", "v", "energy"]);
        for (i, &(x, v)) in states.iter().enumerate() {
            table.push(vec![
                (i as f64 * sp.dt).into(),
                x.into(),
                v.into(),
                spring_energy(x, v, &params).into(),
            ]);
        }
        out.push(Artifact::Table(table));
    }
    Ok(out)
}

/// Per-trial summary of one experiment series.
struct TrialSummary {
    job: TrialJob,
    entropy_bits: f64,
    circular: CircularStats,
    samples: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct HourRow {
    condition: Condition,
    hour: f64,
    body_temperature: f64,
    mean_entropy_bits: f64,
    mean_resultant_r: f64,
    trials: usize,
}

fn experiment(cfg: &RunConfig) -> Result<Vec<Artifact>, HarnessError> {
    let mut conditions = vec![cfg.experiment.condition];
    if let Some(other) = cfg.compare {
        if other != cfg.experiment.condition {
            conditions.push(other);
        }
    }
    let mut jobs = Vec::new();
    for &condition in &conditions {
        let design = coordsim_core::coord::ExperimentDesign {
            condition,
            ..cfg.experiment.clone()
        };
        jobs.extend(
            experiment_jobs(&design, &cfg.hkb, &cfg.temperature, cfg.seed)
                .map_err(HarnessError::module("coord", "experiment_jobs"))?,
        );
    }
    let bins = cfg.entropy.bins;
    let phi0 = cfg.experiment.phi0;
    let keep = cfg.write_series;
    let trials = par_map(&jobs, |job| {
        let record = job.run()?;
        let entropy_bits = phase_entropy(&record.series.samples, bins)?.h_bits;
        let circular = circular_stats(&record.series.samples, phi0)?;
        Ok(TrialSummary {
            job: job.clone(),
            entropy_bits,
            circular,
            samples: keep.then_some(record.series.samples),
        })
    })
    .map_err(HarnessError::module("coord", "run_trial"))?;

    let entropies: Vec<f64> = trials.iter().map(|t| t.entropy_bits).collect();
    // a design whose trials all land on one histogram has no spread to
    // standardize; report zeros rather than failing the run
    let z = match zscore(&entropies) {
        Ok(z) => z,
        Err(Error::DegenerateInput(_)) => vec![0.0; entropies.len()],
        Err(e) => return Err(HarnessError::module("analysis", "zscore")(e)),
    };

    let mut index = Table::new(
        "series_index",
        &[
            "participant",
            "hour",
            "trial",
            "condition",
            "seed",
            "delta_omega",
            "c",
            "d",
            "entropy_bits",
            "entropy_z",
            "mean_shift",
            "sd_phi",
            "resultant_r",
        ],
    );
    for (t, z) in trials.iter().zip(&z) {
        let j = &t.job;
        index.push(vec![
            j.participant.into(),
            j.hour.into(),
            j.trial.into(),
            j.condition.name().into(),
            j.seed.into(),
            j.params.delta_omega.into(),
            j.params.c.into(),
            j.params.d.into(),
            t.entropy_bits.into(),
            (*z).into(),
            t.circular.mean_shift.into(),
            t.circular.sd_phi.into(),
            t.circular.resultant_r.into(),
        ]);
    }

    let points = &cfg.experiment.circadian_points;
    let mut hour_rows = Vec::new();
    for &condition in &conditions {
        let offset = condition.offset(&cfg.temperature);
        for &hour in points {
            let cell: Vec<&TrialSummary> = trials
                .iter()
                .filter(|t| t.job.condition == condition && t.job.hour == hour)
                .collect();
            let h: Vec<f64> = cell.iter().map(|t| t.entropy_bits).collect();
            let r: Vec<f64> = cell.iter().map(|t| t.circular.resultant_r).collect();
            hour_rows.push(HourRow {
                condition,
                hour,
                body_temperature: body_temperature(hour, offset, &cfg.temperature)
                    .map_err(HarnessError::module("coord", "body_temperature"))?,
                mean_entropy_bits: mean(&h),
                mean_resultant_r: mean(&r),
                trials: cell.len(),
            });
        }
    }
    let mut hours = Table::new(
        "hour_summary",
        &[
            "condition",
            "hour",
            "body_temperature",
            "mean_entropy_bits",
            "mean_resultant_r",
            "trials",
        ],
    );
    for row in &hour_rows {
        hours.push(vec![
            row.condition.name().into(),
            row.hour.into(),
            row.body_temperature.into(),
            row.mean_entropy_bits.into(),
            row.mean_resultant_r.into(),
            row.trials.into(),
        ]);
    }

    // correlation of body temperature with entropy over every trial
    let temps: Vec<f64> = trials
        .iter()
        .map(|t| {
            body_temperature(
                t.job.hour,
                t.job.condition.offset(&cfg.temperature),
                &cfg.temperature,
            )
        })
        .collect::<Result<_, _>>()
        .map_err(HarnessError::module("coord", "body_temperature"))?;
    let temperature_entropy_r = pearson_r(&temps, &entropies).ok();
    let summary = json!({
        "conditions": conditions,
        "trials": trials.len(),
        "steps_per_trial": cfg.experiment.steps(),
        "mean_entropy_bits": mean(&entropies),
        "temperature_entropy_r": temperature_entropy_r,
        "hours": hour_rows,
    });

    let mut out = vec![
        Artifact::Table(index),
        Artifact::Table(hours),
        Artifact::document("experiment_summary", &summary),
    ];
    if conditions.len() == 2 {
        let table = condition_anova(&trials, points)?;
        out.push(Artifact::document(
            "anova",
            &json!({
                "factor_alpha": "condition",
                "factor_beta": "hour",
                "levels_alpha": conditions,
                "levels_beta": points,
                "response": "entropy_bits",
                "table": table,
            }),
        ));
    }
    if keep {
        let mut series = Table::new("phase_series", &["series", "t_seconds", "phi_radians"]);
        for (i, t) in trials.iter().enumerate() {
            let samples = t.samples.as_deref().unwrap_or_default();
            for (s, &phi) in samples.iter().enumerate() {
                series.push(vec![i.into(), (s as f64 * t.job.dt).into(), phi.into()]);
            }
        }
        out.push(Artifact::Table(series));
    }
    Ok(out)
}

fn condition_anova(trials: &[TrialSummary], points: &[f64]) -> Result<AnovaTable, HarnessError> {
    let records: Vec<(Condition, usize, f64)> = trials
        .iter()
        .map(|t| {
            let level = points
                .iter()
                .position(|&h| h == t.job.hour)
                .expect("hour from design");
            (t.job.condition, level, t.entropy_bits)
        })
        .collect();
    anova_from_records(&records).map_err(HarnessError::module("analysis", "anova_two_way"))
}

fn entropy(cfg: &RunConfig) -> Result<Vec<Artifact>, HarnessError> {
    let opts = &cfg.entropy;
    let mut summary = Table::new(
        "entropy",
        &["source", "bins", "h_bits", "prob_sum", "renormalized"],
    );
    if let Some(probs) = &opts.probs {
        let report = shannon_entropy(probs, opts.renormalize)
            .map_err(HarnessError::module("analysis", "shannon_entropy"))?;
        summary.push(vec![
            "probs".into(),
            probs.len().into(),
            report.h_bits.into(),
            report.prob_sum.into(),
            report.renormalized.into(),
        ]);
        return Ok(vec![Artifact::Table(summary)]);
    }
    let path = opts
        .series_csv
        .as_deref()
        .expect("validated: one input is set");
    let series = read_column(path, &opts.column)?;
    let hist = histogram_probs(&series, opts.bins)
        .map_err(HarnessError::module("analysis", "histogram_probs"))?;
    let report = shannon_entropy(&hist.probs, false)
        .map_err(HarnessError::module("analysis", "shannon_entropy"))?;
    let circular = circular_stats(&series, opts.phi0)
        .map_err(HarnessError::module("analysis", "circular_stats"))?;
    summary.push(vec![
        source_label(path).into(),
        opts.bins.into(),
        report.h_bits.into(),
        report.prob_sum.into(),
        report.renormalized.into(),
    ]);
    let mut histogram = Table::new("histogram", &["bin", "lower", "upper", "prob"]);
    for (i, p) in hist.probs.iter().enumerate() {
        histogram.push(vec![
            i.into(),
            hist.bin_edges[i].into(),
            hist.bin_edges[i + 1].into(),
            (*p).into(),
        ]);
    }
    Ok(vec![
        Artifact::Table(summary),
        Artifact::Table(histogram),
        Artifact::document(
            "circular_stats",
            &json!({ "samples": series.len(), "phi0": opts.phi0, "stats": circular }),
        ),
    ])
}

fn source_label(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

struct ChaosRow {
    r: f64,
    lambda: f64,
    lambda_divergence: f64,
    used: usize,
    skipped: usize,
    nudged: usize,
    distances: Vec<f64>,
}

fn chaos(cfg: &RunConfig) -> Result<Vec<Artifact>, HarnessError> {
    let c = &cfg.chaos;
    let rows = par_map(&c.r, |&r| {
        let spec = MapSpec::new(r)?;
        let est = lyapunov(&spec, c.x0, c.iterations, c.burn_in)?;
        let twin = divergence_lyapunov(&spec, c.x0, c.iterations, c.burn_in, c.epsilon0)?;
        let trace = orbit_divergence(&spec, c.x0, c.epsilon0, c.divergence_steps)?;
        Ok(ChaosRow {
            r,
            lambda: est.lambda,
            lambda_divergence: twin.lambda,
            used: est.used,
            skipped: est.skipped,
            nudged: est.nudged,
            distances: trace.distances,
        })
    })
    .map_err(HarnessError::module("chaos", "lyapunov"))?;

    let mut table = Table::new(
        "lyapunov",
        &[
            "r",
            "lambda",
            "lambda_divergence",
            "used",
            "skipped",
            "nudged",
            "epsilon0",
            "final_distance",
            "max_distance",
        ],
    );
    let mut trace = Table::new("divergence", &["r", "step", "distance"]);
    for row in &rows {
        let last = row.distances.last().copied().unwrap_or(c.epsilon0);
        let max = row.distances.iter().copied().fold(c.epsilon0, f64::max);
        table.push(vec![
            row.r.into(),
            row.lambda.into(),
            row.lambda_divergence.into(),
            row.used.into(),
            row.skipped.into(),
            row.nudged.into(),
            c.epsilon0.into(),
            last.into(),
            max.into(),
        ]);
        for (step, &d) in row.distances.iter().enumerate() {
            trace.push(vec![row.r.into(), step.into(), d.into()]);
        }
    }
    Ok(vec![Artifact::Table(table), Artifact::Table(trace)])
}

fn sweep(cfg: &RunConfig) -> Result<Vec<Artifact>, HarnessError> {
    let s = &cfg.sweep;
    let jobs = sweep_jobs(
        &cfg.flock,
        &s.axis,
        &s.grid,
        cfg.steps,
        s.replicates,
        cfg.seed,
    )
    .map_err(HarnessError::module("flock", "sweep_jobs"))?;
    let runs =
        par_map(&jobs, |job| job.clone().run()).map_err(HarnessError::module("flock", "sweep"))?;

    let mut table = Table::new(
        "sweep",
        &[
            "grid_index",
            "value",
            "replicate",
            "seed",
            "mean_displacement",
            "mean_entropy_bits",
        ],
    );
    for run in &runs {
        let entropy: Vec<f64> = run.metrics.iter().map(|m| m.entropy_bits).collect();
        table.push(vec![
            run.grid_index.into(),
            run.value.into(),
            run.replicate.into(),
            run.seed.into(),
            run.mean_displacement().into(),
            mean(&entropy).into(),
        ]);
    }
    let mut out = vec![Artifact::Table(table)];
    let ascending = s.grid.len() >= 2 && s.grid.windows(2).all(|w| w[1] > w[0]);
    if ascending {
        let metric = mean_metric_per_point(&runs, s.grid.len());
        let report = SweepReport::from_series(&s.grid, &metric)
            .map_err(HarnessError::module("flock", "sweep_report"))?;
        out.push(Artifact::document(
            "sweep_report",
            &json!({ "axis": s.axis, "replicates": s.replicates, "report": report }),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_keeps_order_and_first_error() {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let items: Vec<u32> = (0..50).collect();
        let out = pool.install(|| par_map(&items, |&i| Ok(i * 2))).unwrap();
        assert_eq!(out, items.iter().map(|i| i * 2).collect::<Vec<_>>());
        let err = pool
            .install(|| {
                par_map(&items, |&i| {
                    if i % 7 == 3 {
                        Err(Error::invalid(format!("item {i}")))
                    } else {
                        Ok(i)
                    }
                })
            })
            .unwrap_err();
        assert!(err.to_string().contains("item 3"), "{err}");
    }
}
