//! Stratified bootstrap with percentile intervals.
//!
//! Each iteration draws `n` rows with replacement. Stratum sizes are fixed
//! per iteration by largest-remainder rounding of `n · N_k / N`, and rows are
//! drawn uniformly within each stratum. An iteration whose statistic is
//! undefined is redrawn once from a fresh stream; if it fails again it is
//! counted as failed. More than 5% failed iterations is an error.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::association::{theta_vector, WeightScheme};
use crate::dataset::CategoricalDataset;
use crate::{Error, Executor, Result};

/// Largest tolerated share of failed iterations.
pub const MAX_FAILURE_RATE: f64 = 0.05;

pub trait Statistic: Sync {
    fn evaluate(&self, dataset: &CategoricalDataset) -> Result<f64>;
}

impl<F> Statistic for F
where
    F: Fn(&CategoricalDataset) -> Result<f64> + Sync,
{
    fn evaluate(&self, dataset: &CategoricalDataset) -> Result<f64> {
        self(dataset)
    }
}

/// `τ_α^{Y|given}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauStatistic {
    pub y: usize,
    pub given: Vec<usize>,
    pub weights: WeightScheme,
}

impl Statistic for TauStatistic {
    fn evaluate(&self, dataset: &CategoricalDataset) -> Result<f64> {
        let x = dataset.compose(&self.given)?;
        theta_vector(&dataset.contingency(&x, self.y)?)?.tau(&self.weights)
    }
}

/// Percentage of the full-set association retained by a subset.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionStatistic {
    pub y: usize,
    pub subset: Vec<usize>,
    pub full: Vec<usize>,
    pub weights: WeightScheme,
}

impl Statistic for ReductionStatistic {
    fn evaluate(&self, dataset: &CategoricalDataset) -> Result<f64> {
        reduction_statistic(dataset, self.y, &self.subset, &self.full, &self.weights)
    }
}

/// `100 · τ_α^{Y|subset} / τ_α^{Y|full}`.
pub fn reduction_statistic(
    dataset: &CategoricalDataset,
    y: usize,
    subset: &[usize],
    full: &[usize],
    weights: &WeightScheme,
) -> Result<f64> {
    if !subset.iter().all(|v| full.contains(v)) {
        return Err(Error::NotSubset);
    }
    let tau = |given: &[usize]| {
        TauStatistic {
            y,
            given: given.to_vec(),
            weights: weights.clone(),
        }
        .evaluate(dataset)
    };
    let denominator = tau(full)?;
    if denominator <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(100.0 * tau(subset)? / denominator)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    pub iterations: usize,
    pub sample_size: usize,
    pub seed: u64,
    /// `None` draws from the whole dataset as one stratum.
    pub stratify_by: Option<usize>,
    pub confidence: f64,
}

impl BootstrapConfig {
    pub fn new(iterations: usize, sample_size: usize, seed: u64) -> Self {
        Self {
            iterations,
            sample_size,
            seed,
            stratify_by: None,
            confidence: 0.95,
        }
    }

    pub fn stratified(mut self, variable: usize) -> Self {
        self.stratify_by = Some(variable);
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSummary {
    pub point_estimate: f64,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub iterations: usize,
    pub failed: usize,
    pub sample_size: usize,
    pub seed: u64,
    pub confidence: f64,
    /// Successful replicate values in iteration order.
    pub replicates: Vec<f64>,
}

/// Stratum row lists and their allotted draw counts.
pub fn stratum_sizes(counts: &[usize], n: usize) -> Vec<usize> {
    let total: usize = counts.iter().sum();
    let mut sizes: Vec<usize> = counts.iter().map(|&c| c * n / total).collect();
    let mut short = n - sizes.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // largest remainder first, then lowest index
    order.sort_by_key(|&k| (core::cmp::Reverse((counts[k] * n) % total), k));
    for k in order {
        if short == 0 {
            break;
        }
        sizes[k] += 1;
        short -= 1;
    }
    sizes
}

/// Type-7 quantile of sorted values.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn draw_rows(strata: &[Vec<usize>], sizes: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut rows = Vec::with_capacity(sizes.iter().sum());
    for (members, &k) in strata.iter().zip(sizes) {
        for _ in 0..k {
            rows.push(members[rng.random_range(0..members.len())]);
        }
    }
    rows
}

pub fn bootstrap<S: Statistic + ?Sized, E: Executor>(
    dataset: &CategoricalDataset,
    statistic: &S,
    config: &BootstrapConfig,
    executor: &E,
) -> Result<BootstrapSummary> {
    if !dataset.is_unit_mass() {
        return Err(Error::WeightedRows);
    }
    if config.iterations == 0 || config.sample_size == 0 {
        return Err(Error::InvalidConfig(
            "iterations and sample size must be positive",
        ));
    }
    if !(config.confidence > 0.0 && config.confidence < 1.0) {
        return Err(Error::InvalidConfidence(config.confidence));
    }
    let strata: Vec<Vec<usize>> = match config.stratify_by {
        None => alloc::vec![(0..dataset.n_rows()).collect()],
        Some(v) => {
            if v >= dataset.n_variables() {
                return Err(Error::UnknownVariable(v));
            }
            let mut groups = alloc::vec![Vec::new(); dataset.variable(v).cardinality()];
            for (row, &c) in dataset.column(v).iter().enumerate() {
                groups[c as usize].push(row);
            }
            groups.retain(|g| !g.is_empty());
            groups
        }
    };
    if strata.is_empty() {
        return Err(Error::EmptyStratum);
    }
    let counts: Vec<usize> = strata.iter().map(Vec::len).collect();
    let sizes = stratum_sizes(&counts, config.sample_size);
    let point_estimate = statistic.evaluate(dataset)?;

    let outcomes = executor.map_indexed(config.iterations, |it| {
        for attempt in 0..2u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(2 * it as u64 + attempt);
            let rows = draw_rows(&strata, &sizes, &mut rng);
            if let Ok(value) = dataset
                .select_rows(&rows)
                .and_then(|sample| statistic.evaluate(&sample))
            {
                return Some(value);
            }
        }
        None
    });
    let replicates: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let failed = config.iterations - replicates.len();
    if failed as f64 > MAX_FAILURE_RATE * config.iterations as f64 || replicates.is_empty() {
        return Err(Error::TooManyFailures {
            failed,
            iterations: config.iterations,
        });
    }
    let mut sorted = replicates.clone();
    sorted.sort_by(f64::total_cmp);
    let tail = (1.0 - config.confidence) / 2.0;
    Ok(BootstrapSummary {
        point_estimate,
        mean: replicates.iter().sum::<f64>() / replicates.len() as f64,
        ci_low: quantile_sorted(&sorted, tail),
        ci_high: quantile_sorted(&sorted, 1.0 - tail),
        iterations: config.iterations,
        failed,
        sample_size: config.sample_size,
        seed: config.seed,
        confidence: config.confidence,
        replicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Sequential;
    use alloc::format;
    use alloc::vec;

    fn sample() -> CategoricalDataset {
        // Y determined by (A, B); A alone partially informative
        let mut scen = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                scen.push((
                    vec![
                        format!("{}", a * 2 + b),
                        format!("{a}"),
                        format!("{b}"),
                        format!("{}", (a + b) % 3),
                    ],
                    25.0,
                ));
            }
        }
        CategoricalDataset::from_scenarios(&["Y", "A", "B", "C"], scen)
            .unwrap()
            .expand_to_unit_rows()
            .unwrap()
    }

    #[test]
    fn largest_remainder_sizes() {
        assert_eq!(stratum_sizes(&[684, 256, 60], 500), vec![342, 128, 30]);
        assert_eq!(stratum_sizes(&[1, 1, 1], 10), vec![4, 3, 3]);
        assert_eq!(stratum_sizes(&[2, 1], 2), vec![1, 1]);
        let s = stratum_sizes(&[7, 13, 29, 51], 37);
        assert_eq!(s.iter().sum::<usize>(), 37);
        for (k, c) in [7usize, 13, 29, 51].iter().enumerate() {
            assert!((s[k] as f64 - *c as f64 * 37.0 / 100.0).abs() <= 1.0);
        }
    }

    #[test]
    fn type7_quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert!((quantile_sorted(&v, 0.5) - 2.5).abs() < 1e-12);
        assert!((quantile_sorted(&v, 0.025) - 1.075).abs() < 1e-12);
    }

    #[test]
    fn constant_statistic_collapses_interval() {
        let ds = sample();
        let stat = |_: &CategoricalDataset| Ok(3.5);
        let s = bootstrap(&ds, &stat, &BootstrapConfig::new(50, 20, 1), &Sequential).unwrap();
        assert_eq!((s.ci_low, s.mean, s.ci_high), (3.5, 3.5, 3.5));
    }

    #[test]
    fn reduction_bounds() {
        let ds = sample();
        let gk = WeightScheme::GoodmanKruskal;
        assert_eq!(
            reduction_statistic(&ds, 0, &[1, 2], &[1, 2], &gk).unwrap(),
            100.0
        );
        let r = reduction_statistic(&ds, 0, &[1], &[1, 2, 3], &gk).unwrap();
        assert!(r > 0.0 && r <= 100.0 + 1e-9);
        assert_eq!(
            reduction_statistic(&ds, 0, &[3], &[1], &gk).unwrap_err(),
            Error::NotSubset
        );
    }

    #[test]
    fn stratified_runs_repeat() {
        let ds = sample();
        let stat = ReductionStatistic {
            y: 0,
            subset: vec![1],
            full: vec![1, 2],
            weights: WeightScheme::Equal,
        };
        let config = BootstrapConfig::new(100, 40, 7).stratified(0);
        let a = bootstrap(&ds, &stat, &config, &Sequential).unwrap();
        let b = bootstrap(&ds, &stat, &config, &Sequential).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_low <= a.ci_high);
        assert_eq!(a.failed, 0);
    }

    #[test]
    fn stratum_proportions_hold_per_resample() {
        let ds = sample();
        let stat = |d: &CategoricalDataset| {
            let m = d.level_masses(0);
            Ok(if m.iter().all(|&c| c == 10.0) {
                1.0
            } else {
                0.0
            })
        };
        let s = bootstrap(
            &ds,
            &stat,
            &BootstrapConfig::new(30, 40, 3).stratified(0),
            &Sequential,
        )
        .unwrap();
        assert_eq!(s.mean, 1.0);
    }

    #[test]
    fn failures_are_counted() {
        let ds = sample();
        let always = |_: &CategoricalDataset| Err(Error::DegenerateResponse);
        assert_eq!(
            bootstrap(&ds, &always, &BootstrapConfig::new(10, 5, 0), &Sequential).unwrap_err(),
            Error::DegenerateResponse
        );
        // defined on the full data, undefined on small resamples of one stratum
        let fragile = |d: &CategoricalDataset| {
            if d.n_rows() == 100 {
                Ok(0.0)
            } else {
                Err(Error::DegenerateResponse)
            }
        };
        assert!(matches!(
            bootstrap(&ds, &fragile, &BootstrapConfig::new(10, 5, 0), &Sequential).unwrap_err(),
            Error::TooManyFailures {
                failed: 10,
                iterations: 10
            }
        ));
        let weighted = CategoricalDataset::from_scenarios(&["Y"], [(vec!["a"], 2.0)]).unwrap();
        assert_eq!(
            bootstrap(
                &weighted,
                &always,
                &BootstrapConfig::new(1, 1, 0),
                &Sequential
            )
            .unwrap_err(),
            Error::WeightedRows
        );
        assert!(matches!(
            bootstrap(
                &ds,
                &always,
                &BootstrapConfig::new(1, 1, 0).with_confidence(1.0),
                &Sequential
            ),
            Err(Error::InvalidConfidence(_))
        ));
    }
}
