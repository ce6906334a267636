//! Order-fixed summary statistics, so parallel runs reduce to identical bits.

use serde::Serialize;

/// Neumaier-compensated sum in slice order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub std_dev: f64,
    pub count: usize,
}

/// Two-pass mean and standard error (unbiased variance).
pub fn mean_estimate(values: &[f64]) -> MeanEstimate {
    let n = values.len();
    if n == 0 {
        return MeanEstimate { mean: f64::NAN, std_error: f64::NAN, std_dev: f64::NAN, count: 0 };
    }
    let mean = compensated_sum(values) / n as f64;
    if n == 1 {
        return MeanEstimate { mean, std_error: 0.0, std_dev: 0.0, count: 1 };
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = compensated_sum(&sq) / (n - 1) as f64;
    let std_dev = var.sqrt();
    MeanEstimate { mean, std_error: std_dev / (n as f64).sqrt(), std_dev, count: n }
}

/// Lag-1 sample autocorrelation.
pub fn lag1_autocorrelation(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = compensated_sum(values) / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let num: Vec<f64> = centered.windows(2).map(|w| w[0] * w[1]).collect();
    let den: Vec<f64> = centered.iter().map(|c| c * c).collect();
    compensated_sum(&num) / compensated_sum(&den)
}
