//! Chi-square and binomial helpers.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Default quantile for chi-square acceptance thresholds.
pub const DEFAULT_LEVEL: f64 = 0.999;

pub fn chi2_quantile(dof: usize, level: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(level)
}

/// Pearson statistic of observed counts against expected counts.
pub fn chi2_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum()
}

/// Contingency-table independence statistic and its degrees of freedom.
/// Empty rows and columns are dropped.
pub fn chi2_independence(table: &[Vec<u64>]) -> (f64, usize) {
    let rows: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let ncols = table.first().map_or(0, |r| r.len());
    let cols: Vec<u64> = (0..ncols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let total: u64 = rows.iter().sum();
    let mut stat = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            if rows[i] == 0 || cols[j] == 0 {
                continue;
            }
            let e = rows[i] as f64 * cols[j] as f64 / total as f64;
            stat += (o as f64 - e).powi(2) / e;
        }
    }
    let nr = rows.iter().filter(|&&r| r > 0).count();
    let nc = cols.iter().filter(|&&c| c > 0).count();
    (stat, nr.saturating_sub(1) * nc.saturating_sub(1))
}

/// Standardized deviation of a binomial count from `n p`.
pub fn binomial_z(count: u64, n: u64, p: f64) -> f64 {
    let n = n as f64;
    (count as f64 - n * p) / (n * p * (1.0 - p)).sqrt()
}
