//! Small statistics toolkit for the experiment harness and acceptance checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

pub const Z_95: f64 = 1.96;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::arg("Wilson interval needs at least one trial"));
    }
    if successes > trials {
        return Err(Error::arg(format!("{successes} successes out of {trials} trials")));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) + z2 / (4.0 * n)) / n).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Standard deviation of the mean of `n` Bernoulli(`p`) draws.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// `½ Σ |P − Q|`. Both inputs must be normalized within 1e-9.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::arg("distributions have different supports"));
    }
    for (name, dist) in [("P", p), ("Q", q)] {
        let total: f64 = dist.iter().sum();
        if (total - 1.0).abs() > 1e-9 || dist.iter().any(|&x| x < 0.0) {
            return Err(Error::arg(format!("{name} is not a probability distribution (sum {total})")));
        }
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

pub fn normalize(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Four-sigma envelope for the TV distance between two independent
/// empirical histograms of `n1` and `n2` shots: `½ Σ_i 4 σ_i` with
/// `σ_i² = p_i (1 − p_i) (1/n1 + 1/n2)` and `p_i` the pooled frequency.
pub fn tv_four_sigma_bound(c1: &[u64], c2: &[u64]) -> f64 {
    let (n1, n2) = (c1.iter().sum::<u64>() as f64, c2.iter().sum::<u64>() as f64);
    0.5 * c1
        .iter()
        .zip(c2)
        .map(|(&a, &b)| {
            let p = (a + b) as f64 / (n1 + n2);
            4.0 * (p * (1.0 - p) * (1.0 / n1 + 1.0 / n2)).sqrt()
        })
        .sum::<f64>()
}

/// Pearson chi-square test of `counts` against the uniform distribution.
/// Returns `(statistic, p_value)`.
pub fn chi_square_uniform(counts: &[u64]) -> Result<(f64, f64)> {
    if counts.len() < 2 {
        return Err(Error::arg("chi-square test needs at least two categories"));
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).map_err(|e| Error::arg(e.to_string()))?;
    Ok((stat, 1.0 - dist.cdf(stat)))
}
