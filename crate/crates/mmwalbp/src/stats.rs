//! Sample pooling, one-way ANOVA and pooled confidence intervals.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("{values} values cannot be pooled into groups of {group_size}")]
    PoolError { values: usize, group_size: usize },
    #[error("ANOVA needs at least 2 groups with at least 2 samples each")]
    TooFewSamples,
}

/// Means of consecutive disjoint groups, in run order.
pub fn pool_samples(values: &[f64], group_size: usize) -> Result<Vec<f64>, StatsError> {
    if group_size == 0 || values.len() % group_size != 0 {
        return Err(StatsError::PoolError {
            values: values.len(),
            group_size,
        });
    }
    Ok(values
        .chunks_exact(group_size)
        .map(|chunk| chunk.iter().sum::<f64>() / group_size as f64)
        .collect())
}

/// One-way ANOVA decomposition plus the pooled-deviation confidence
/// intervals derived from the within-group mean square.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f_calculated: f64,
    /// Reference quantile F(0.95; df_between, df_within).
    pub f_ref: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub group_means: Vec<f64>,
    pub grand_mean: f64,
    pub ss_between: f64,
    pub ss_within: f64,
    pub ss_total: f64,
    pub pooled_sd: f64,
    /// 95% half-width per group: t(0.975; df_within) * sd / sqrt(n_i).
    pub ci_half_widths: Vec<f64>,
}

/// Standard between/within decomposition. With zero within-group
/// variance, F is 0 for identical group means and +inf otherwise.
pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<AnovaResult, StatsError> {
    if groups.len() < 2 || groups.iter().any(|g| g.len() < 2) {
        return Err(StatsError::TooFewSamples);
    }
    let k = groups.len();
    let n_total: usize = groups.iter().map(|g| g.len()).sum();
    let group_means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();
    let grand_mean = groups.iter().flatten().sum::<f64>() / n_total as f64;
    let ss_between: f64 = groups
        .iter()
        .zip(&group_means)
        .map(|(g, m)| g.len() as f64 * (m - grand_mean) * (m - grand_mean))
        .sum();
    let ss_within: f64 = groups
        .iter()
        .zip(&group_means)
        .map(|(g, m)| g.iter().map(|x| (x - m) * (x - m)).sum::<f64>())
        .sum();
    let df_between = k - 1;
    let df_within = n_total - k;
    let ms_between = ss_between / df_between as f64;
    let ms_within = ss_within / df_within as f64;

    let scale = groups
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(1.0);
    let f_calculated = if ms_within <= 1e-12 * scale * scale {
        if ss_between <= 1e-12 * scale * scale {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ms_between / ms_within
    };

    let pooled_sd = ms_within.sqrt();
    let t = t_quantile(0.975, df_within);
    let ci_half_widths = groups
        .iter()
        .map(|g| t * pooled_sd / (g.len() as f64).sqrt())
        .collect();
    Ok(AnovaResult {
        f_calculated,
        f_ref: f_quantile(0.95, df_between, df_within),
        df_between,
        df_within,
        group_means,
        grand_mean,
        ss_between,
        ss_within,
        ss_total: ss_between + ss_within,
        pooled_sd,
        ci_half_widths,
    })
}

/// Quantile of Student's t distribution.
pub fn t_quantile(p: f64, df: usize) -> f64 {
    StudentsT::new(0.0, 1.0, df as f64)
        .expect("valid t distribution")
        .inverse_cdf(p)
}

/// Quantile of the F distribution.
pub fn f_quantile(p: f64, d1: usize, d2: usize) -> f64 {
    FisherSnedecor::new(d1 as f64, d2 as f64)
        .expect("valid F distribution")
        .inverse_cdf(p)
}
