use serde::Serialize;

use super::EvalError;

/// Summary used for completion-time tables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1). Zero when `n == 1`.
    pub sd: f64,
    /// False when `n == 1`, where the sample SD is undefined.
    pub sd_defined: bool,
    pub min: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub max: f64,
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Unbiased sample variance; `None` below two values.
pub fn sample_variance(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    Some(values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64)
}

/// Linear interpolation at position `(n - 1) * q` of an ascending slice.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn descriptive_stats(values: &[f64]) -> Result<DescriptiveStats, EvalError> {
    if values.is_empty() {
        return Err(EvalError::Empty("values"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::Invalid("non-finite value".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let variance = sample_variance(values);
    Ok(DescriptiveStats {
        n: values.len(),
        mean: mean(values).unwrap_or(0.0),
        sd: variance.map_or(0.0, f64::sqrt),
        sd_defined: variance.is_some(),
        min: sorted[0],
        p25: percentile_sorted(&sorted, 0.25),
        p50: percentile_sorted(&sorted, 0.5),
        p75: percentile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}
