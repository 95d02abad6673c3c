use crate::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divisor n).
pub fn population_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Standard scores `(x − μ) / σ` with the population σ.
pub fn zscore(series: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(Error::invalid("z-scores need at least two values"));
    }
    let mu = mean(series);
    let sigma = population_sd(series);
    if !(sigma > 0.0) || sigma <= 1e-14 * mu.abs() {
        return Err(Error::DegenerateInput(
            "z-scores of a constant series".into(),
        ));
    }
    Ok(series.iter().map(|x| (x - mu) / sigma).collect())
}

/// Sample Pearson correlation coefficient.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "pearson_r needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::invalid("pearson_r needs at least three pairs"));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(Error::DegenerateInput(
            "pearson_r of a constant series".into(),
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
