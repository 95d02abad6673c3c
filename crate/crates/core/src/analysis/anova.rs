use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaDof {
    pub alpha: usize,
    pub beta: usize,
    pub interaction: usize,
    pub error: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaSs {
    pub alpha: f64,
    pub beta: f64,
    pub interaction: f64,
    pub error: f64,
    pub total: f64,
}

/// Balanced two-way ANOVA with replication.
///
/// An F ratio is 0 when both its effect and the error mean square vanish
/// and `+∞` when only the error mean square does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    pub f_alpha: f64,
    pub f_beta: f64,
    pub f_interaction: f64,
    pub dof: AnovaDof,
    pub ss: AnovaSs,
}

fn f_ratio(ms_effect: f64, ms_error: f64) -> f64 {
    if ms_error > 0.0 {
        ms_effect / ms_error
    } else if ms_effect > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// `cells[i][j]` holds the replicates for level i of factor α and level j
/// of factor β. Every cell needs the same number (≥ 2) of replicates.
pub fn anova_two_way(cells: &[Vec<Vec<f64>>]) -> Result<AnovaTable> {
    let a = cells.len();
    let b = cells.first().map_or(0, Vec::len);
    if a < 2 || b < 2 {
        return Err(Error::invalid(format!(
            "two-way ANOVA needs at least 2 levels per factor, got {a}x{b}"
        )));
    }
    if cells.iter().any(|row| row.len() != b) {
        return Err(Error::invalid(
            "ANOVA rows have different numbers of β levels",
        ));
    }
    let n = cells[0][0].len();
    if n < 2 {
        return Err(Error::invalid("ANOVA needs at least 2 replicates per cell"));
    }
    if cells.iter().flatten().any(|c| c.len() != n) {
        return Err(Error::invalid("ANOVA design is unbalanced"));
    }
    if cells.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::invalid("ANOVA data contains non-finite values"));
    }

    // Centre on one observation so identical data give exact zeros.
    let origin = cells[0][0][0];
    let centred: Vec<Vec<Vec<f64>>> = cells
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| c.iter().map(|x| x - origin).collect())
                .collect()
        })
        .collect();

    let cell_mean: Vec<Vec<f64>> = centred
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| c.iter().sum::<f64>() / n as f64)
                .collect()
        })
        .collect();
    let row_mean: Vec<f64> = cell_mean
        .iter()
        .map(|row| row.iter().sum::<f64>() / b as f64)
        .collect();
    let col_mean: Vec<f64> = (0..b)
        .map(|j| cell_mean.iter().map(|row| row[j]).sum::<f64>() / a as f64)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / a as f64;

    let ss_alpha = (b * n) as f64 * row_mean.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let ss_beta = (a * n) as f64 * col_mean.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let mut ss_inter = 0.0;
    let mut ss_error = 0.0;
    let mut ss_total = 0.0;
    for i in 0..a {
        for j in 0..b {
            let m = cell_mean[i][j];
            ss_inter += (m - row_mean[i] - col_mean[j] + grand).powi(2);
            for x in &centred[i][j] {
                ss_error += (x - m).powi(2);
                ss_total += (x - grand).powi(2);
            }
        }
    }
    ss_inter *= n as f64;

    let dof = AnovaDof {
        alpha: a - 1,
        beta: b - 1,
        interaction: (a - 1) * (b - 1),
        error: a * b * (n - 1),
        total: a * b * n - 1,
    };
    let ms_error = ss_error / dof.error as f64;
    Ok(AnovaTable {
        f_alpha: f_ratio(ss_alpha / dof.alpha as f64, ms_error),
        f_beta: f_ratio(ss_beta / dof.beta as f64, ms_error),
        f_interaction: f_ratio(ss_inter / dof.interaction as f64, ms_error),
        dof,
        ss: AnovaSs {
            alpha: ss_alpha,
            beta: ss_beta,
            interaction: ss_inter,
            error: ss_error,
            total: ss_total,
        },
    })
}

/// Builds the balanced cell table from `(level_α, level_β, value)` records,
/// ordering levels by their natural order, and runs [`anova_two_way`].
pub fn anova_from_records<A: Ord + Clone, B: Ord + Clone>(
    records: &[(A, B, f64)],
) -> Result<AnovaTable> {
    let mut grouped: BTreeMap<A, BTreeMap<B, Vec<f64>>> = BTreeMap::new();
    for (ka, kb, x) in records {
        grouped
            .entry(ka.clone())
            .or_default()
            .entry(kb.clone())
            .or_default()
            .push(*x);
    }
    let b_levels: Vec<&B> = grouped
        .values()
        .next()
        .map_or(Vec::new(), |m| m.keys().collect());
    let mut cells = Vec::with_capacity(grouped.len());
    for row in grouped.values() {
        if row.len() != b_levels.len() || !row.keys().eq(b_levels.iter().copied()) {
            return Err(Error::invalid("ANOVA records do not cover every cell"));
        }
        cells.push(row.values().cloned().collect());
    }
    anova_two_way(&cells)
}
