//! Goodness-of-fit checks for sampled outcomes.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Significance level for every uniformity test.
pub const ALPHA: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub passed: bool,
}

/// Pearson's test of `counts` against the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquareTest {
    let total: u64 = counts.iter().sum();
    let dof = counts.len().saturating_sub(1);
    if total == 0 || dof == 0 {
        return ChiSquareTest { statistic: 0.0, dof, p_value: 1.0, passed: true };
    }
    let expected = total as f64 / counts.len() as f64;
    let statistic: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = ChiSquared::new(dof as f64).expect("positive dof").sf(statistic);
    ChiSquareTest { statistic, dof, p_value, passed: p_value >= ALPHA }
}
