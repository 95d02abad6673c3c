//! Entropy, circular statistics and significance-style summaries for phase
//! series and experiment tables.

mod anova;
mod circular;
mod entropy;
mod stats;

pub use anova::{anova_from_records, anova_two_way, AnovaDof, AnovaSs, AnovaTable};
pub use circular::{circular_stats, wrap_phase, wrap_to_pi, CircularStats, DEGENERATE_SD};
pub use entropy::{
    histogram_probs, phase_entropy, shannon_entropy, EntropyReport, Histogram, DEFAULT_BINS,
    PROB_SUM_TOLERANCE,
};
pub use stats::{mean, pearson_r, population_sd, zscore};
