//! Parameter sweeps over the flock and the decay/threshold summary.

use serde::{Deserialize, Serialize};

use crate::flock::{FlockMetrics, FlockParams, FlockSimulation};
use crate::stream::derive_seed;
use crate::{Error, Result};

/// Metrics of one (grid point, replicate) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub grid_index: usize,
    pub value: f64,
    pub replicate: usize,
    pub seed: u64,
    pub metrics: Vec<FlockMetrics>,
}

impl SweepRun {
    /// Time-averaged mean displacement of the run.
    pub fn mean_displacement(&self) -> f64 {
        self.metrics.iter().map(|m| m.avg_displacement).sum::<f64>() / self.metrics.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// λ in `metric ≈ A·exp(−λ(x − x₀))`.
    pub rate: f64,
    /// A, the fitted value at the peak x₀.
    pub amplitude: f64,
    /// Grid value x₀ where the fitted region starts.
    pub origin: f64,
    /// No usable decay (flat metric, peak at the last point, or
    /// non-positive values); `rate` is then 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub ties_grid: Vec<f64>,
    pub metric_per_tie: Vec<f64>,
    pub decay_rate: f64,
    pub decay_amplitude: f64,
    pub degenerate_fit: bool,
    pub threshold_estimate: f64,
}

impl SweepReport {
    pub fn from_series(grid: &[f64], metric: &[f64]) -> Result<Self> {
        let fit = fit_exponential_decay(grid, metric)?;
        Ok(SweepReport {
            ties_grid: grid.to_vec(),
            metric_per_tie: metric.to_vec(),
            decay_rate: fit.rate,
            decay_amplitude: fit.amplitude,
            degenerate_fit: fit.degenerate,
            threshold_estimate: threshold_estimate(grid, metric)?,
        })
    }
}

fn check_series(grid: &[f64], metric: &[f64]) -> Result<()> {
    if grid.len() != metric.len() {
        return Err(Error::invalid(format!(
            "grid has {} points but metric has {}",
            grid.len(),
            metric.len()
        )));
    }
    if grid.len() < 2 {
        return Err(Error::invalid("a sweep needs at least two grid points"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("sweep grid must be strictly ascending"));
    }
    Ok(())
}

/// Least-squares fit of `ln metric` against the grid from the peak onward.
pub fn fit_exponential_decay(grid: &[f64], metric: &[f64]) -> Result<DecayFit> {
    check_series(grid, metric)?;
    let (peak, peak_value) =
        metric
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, m)| {
                if m > best.1 {
                    (i, m)
                } else {
                    best
                }
            });
    let low = metric.iter().copied().fold(f64::INFINITY, f64::min);
    let degenerate = |origin| DecayFit {
        rate: 0.0,
        amplitude: peak_value,
        origin,
        degenerate: true,
    };
    let origin = grid[peak];
    if peak_value - low <= 1e-12 * peak_value.abs().max(1.0) {
        return Ok(degenerate(origin));
    }
    let tail: Vec<(f64, f64)> = grid[peak..]
        .iter()
        .zip(&metric[peak..])
        .map(|(&x, &m)| (x - origin, m))
        .collect();
    if tail.len() < 2 || tail.iter().any(|&(_, m)| !(m > 0.0)) {
        return Ok(degenerate(origin));
    }
    let n = tail.len() as f64;
    let mean_x = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = tail.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = tail
        .iter()
        .map(|&(x, m)| (x - mean_x) * (m.ln() - mean_y))
        .sum();
    let sxx: f64 = tail.iter().map(|&(x, _)| (x - mean_x).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit {
        rate: -slope,
        amplitude: (mean_y - slope * mean_x).exp(),
        origin,
        degenerate: false,
    })
}

/// Grid point where the forward difference quotient of the metric has the
/// largest magnitude (the left end of the steepest interval).
pub fn threshold_estimate(grid: &[f64], metric: &[f64]) -> Result<f64> {
    check_series(grid, metric)?;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..grid.len() - 1 {
        let slope = ((metric[i + 1] - metric[i]) / (grid[i + 1] - grid[i])).abs();
        if slope > best.1 {
            best = (i, slope);
        }
    }
    Ok(grid[best.0])
}

/// Runs the flock for every (grid point, replicate) with `axis` set to the
/// grid value. Run `(g, r)` is seeded with `derive_seed(seed, [g, r])`.
/// Results come back ordered by grid index, then replicate.
pub fn sweep_flock(
    params: &FlockParams,
    axis: &str,
    grid: &[f64],
    steps: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<SweepRun>> {
    let jobs = sweep_jobs(params, axis, grid, steps, replicates, seed)?;
    jobs.into_iter().map(|job| job.run()).collect()
}

/// One independent run of a sweep.
#[derive(Debug, Clone)]
pub struct SweepJob {
    pub grid_index: usize,
    pub value: f64,
    pub replicate: usize,
    pub seed: u64,
    pub steps: usize,
    pub params: FlockParams,
}

impl SweepJob {
    pub fn run(self) -> Result<SweepRun> {
        let context = format!(
            "sweep point {} replicate {}",
            self.grid_index, self.replicate
        );
        let mut sim =
            FlockSimulation::new(self.params, self.seed).map_err(|e| e.with_context(&context))?;
        let metrics = (0..self.steps)
            .map(|_| sim.step())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.with_context(&context))?;
        Ok(SweepRun {
            grid_index: self.grid_index,
            value: self.value,
            replicate: self.replicate,
            seed: self.seed,
            metrics,
        })
    }
}

/// The job list of a sweep, in output order; useful for running the jobs
/// on a worker pool.
pub fn sweep_jobs(
    params: &FlockParams,
    axis: &str,
    grid: &[f64],
    steps: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<SweepJob>> {
    if steps == 0 || replicates == 0 || grid.is_empty() {
        return Err(Error::invalid(
            "a sweep needs a non-empty grid, at least one step and one replicate",
        ));
    }
    let mut jobs = Vec::with_capacity(grid.len() * replicates);
    for (g, &value) in grid.iter().enumerate() {
        let mut p = params.clone();
        p.set_numeric(axis, value)?;
        p.validate()
            .map_err(|e| e.with_context(format!("sweep point {g} ({axis} = {value})")))?;
        for r in 0..replicates {
            jobs.push(SweepJob {
                grid_index: g,
                value,
                replicate: r,
                seed: derive_seed(seed, &[g as u64, r as u64]),
                steps,
                params: p.clone(),
            });
        }
    }
    Ok(jobs)
}

/// Mean displacement per grid point, averaged over replicates.
pub fn mean_metric_per_point(runs: &[SweepRun], points: usize) -> Vec<f64> {
    let mut sum = vec![0.0; points];
    let mut count = vec![0usize; points];
    for run in runs {
        sum[run.grid_index] += run.mean_displacement();
        count[run.grid_index] += 1;
    }
    sum.iter()
        .zip(&count)
        .map(|(s, &c)| s / c.max(1) as f64)
        .collect()
}

/// Social-ties sensitivity sweep: mean displacement against `t_ties`,
/// summarized by an exponential decay fit and a threshold estimate.
pub fn sweep_social_ties(
    params: &FlockParams,
    grid: &[f64],
    steps: usize,
    replicates: usize,
    seed: u64,
) -> Result<SweepReport> {
    if grid.iter().any(|t| !(0.1..=0.9).contains(t)) {
        return Err(Error::invalid(
            "social-ties grid must lie within [0.1, 0.9]",
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(
            "social-ties grid must be strictly ascending",
        ));
    }
    let runs = sweep_flock(params, "t_ties", grid, steps, replicates, seed)?;
    SweepReport::from_series(grid, &mean_metric_per_point(&runs, grid.len()))
}
