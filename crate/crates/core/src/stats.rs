//! Spearman rank correlation with average ranks for ties.

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("need at least 3 paired observations, got {0}")]
    TooFew(usize),
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("constant input")]
    ConstantInput,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationResult {
    pub rho: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub n: usize,
}

/// 1-based ranks; tied values share the mean of the positions they occupy.
pub fn rank(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank mean of (i+1)..=j
        let shared = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = shared;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn validate(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFew(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// Spearman's rho with a two-sided p-value from the t approximation
/// `t = rho * sqrt((n - 2) / (1 - rho^2))` on `n - 2` degrees of freedom.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    validate(x, y)?;
    let rho = pearson(&rank(x), &rank(y))?;
    let n = x.len();
    Ok(CorrelationResult {
        rho,
        p_value: t_p_value(rho, n),
        n,
    })
}

fn t_p_value(rho: f64, n: usize) -> f64 {
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Largest `n` for which [`spearman_exact`] enumerates permutations.
pub const EXACT_MAX_N: usize = 10;

/// Spearman's rho with an exact two-sided permutation p-value: the fraction
/// of all `n!` rearrangements of `y` whose |rho| reaches the observed |rho|.
pub fn spearman_exact(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    validate(x, y)?;
    let n = x.len();
    assert!(n <= EXACT_MAX_N, "exact p-values are limited to n <= {EXACT_MAX_N}");
    let rx = rank(x);
    let mut ry = rank(y);
    let observed = pearson(&rx, &ry)?;
    let threshold = observed.abs() - 1e-12;
    let (mut hits, mut total) = (0u64, 0u64);
    // Heap's algorithm over the rank vector of y.
    let mut c = vec![0usize; n];
    let mut visit = |ry: &[f64]| {
        total += 1;
        if pearson(&rx, ry).map(f64::abs).unwrap_or(0.0) >= threshold {
            hits += 1;
        }
    };
    visit(&ry);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                ry.swap(0, i);
            } else {
                ry.swap(c[i], i);
            }
            visit(&ry);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(CorrelationResult {
        rho: observed,
        p_value: hits as f64 / total as f64,
        n,
    })
}
