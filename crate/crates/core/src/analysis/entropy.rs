use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::circular::wrap_phase;
use crate::{Error, Result};

/// Default histogram resolution: 36 bins of 10° over `[−π, π)`.
pub const DEFAULT_BINS: usize = 36;

/// Probability lists whose sum is within this distance of 1 are used as
/// given.
pub const PROB_SUM_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub h_bits: f64,
    pub prob_sum: f64,
    pub renormalized: bool,
}

/// `H = Σ p·log₂(1/p)` over the non-zero entries.
///
/// Lists summing to within [`PROB_SUM_TOLERANCE`] of 1 are used as given
/// (so `{0.16; 6}` yields 2.5381 bits). Anything further off is an error
/// unless `renormalize` is set, in which case the list is scaled to sum 1.
pub fn shannon_entropy(probs: &[f64], renormalize: bool) -> Result<EntropyReport> {
    if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
        return Err(Error::invalid(format!(
            "probabilities must be finite and non-negative, got {p}"
        )));
    }
    let prob_sum: f64 = probs.iter().sum();
    if !(prob_sum > 0.0) {
        return Err(Error::invalid(
            "entropy needs at least one positive probability",
        ));
    }
    let scale = if (prob_sum - 1.0).abs() <= PROB_SUM_TOLERANCE {
        None
    } else if renormalize {
        Some(prob_sum)
    } else {
        return Err(Error::invalid(format!(
            "probabilities sum to {prob_sum}, more than {PROB_SUM_TOLERANCE} from 1; \
             set renormalize to rescale them"
        )));
    };
    let h_bits = probs
        .iter()
        .map(|&p| scale.map_or(p, |s| p / s))
        .filter(|&p| p > 0.0)
        .map(|p| p * (1.0 / p).log2())
        .sum();
    Ok(EntropyReport {
        h_bits,
        prob_sum,
        renormalized: scale.is_some(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub probs: Vec<f64>,
}

/// Relative frequencies of `series` (wrapped into `[−π, π)`) over `bins`
/// equal bins.
pub fn histogram_probs(series: &[f64], bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::invalid(format!(
            "histogram needs at least 2 bins, got {bins}"
        )));
    }
    if series.is_empty() {
        return Err(Error::invalid("histogram of an empty series"));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(
            "histogram of a series with non-finite samples",
        ));
    }
    let width = 2.0 * PI / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in series {
        let w = wrap_phase(x);
        let idx = (((w + PI) / width).floor() as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = series.len() as f64;
    Ok(Histogram {
        bin_edges: (0..=bins).map(|i| -PI + width * i as f64).collect(),
        probs: counts.iter().map(|&c| c as f64 / n).collect(),
    })
}

/// Entropy of the phase histogram of `series`.
pub fn phase_entropy(series: &[f64], bins: usize) -> Result<EntropyReport> {
    shannon_entropy(&histogram_probs(series, bins)?.probs, false)
}
