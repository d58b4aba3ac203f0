//! Association matrix `γ(Y|X)`, association vector `Θ^{Y|X}` and weighted
//! global measures `τ_α`.
//!
//! With `P` the normalised joint table, `p_i` the scenario marginal of `X`
//! and `p_s` the response marginal:
//!
//! ```text
//! γ[s][t] = Σ_i P[i][s] · P[i][t] / (p_i · p_s)
//! θ_s     = (γ[s][s] - p_s) / (1 - p_s)
//!         = Σ_i (P[i][s] - p_i p_s)² / (p_i · p_s · (1 - p_s))
//! τ_α     = Σ_s α_s θ_s
//! ```
//!
//! Response levels with zero mass are dropped and reported; levels with
//! `p_s = 1` have no defined `θ_s`.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{CategoricalDataset, ContingencyTable};
use crate::{Error, Result};

/// Values this far outside `[0, 1]` are rounding and get clamped.
pub const CLAMP_SLACK: f64 = 1e-12;

/// Tolerance on `Σ α_s = 1`.
pub const SIMPLEX_TOL: f64 = 1e-12;

pub(crate) fn clamp_unit(quantity: &'static str, value: f64) -> Result<f64> {
    if !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&value) {
        return Err(Error::OutOfRange { quantity, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Response distribution and its Gini variation `1 - Σ p_s²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalStats {
    p: Vec<f64>,
    gini_variation: f64,
}

impl MarginalStats {
    pub fn from_probabilities(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::DegenerateResponse);
        }
        if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeights);
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotOnSimplex(sum));
        }
        let gini_variation = (1.0 - p.iter().map(|v| v * v).sum::<f64>()).max(0.0);
        Ok(Self { p, gini_variation })
    }

    pub fn from_table(table: &ContingencyTable) -> Self {
        let p = table.y_probabilities();
        let gini_variation = (1.0 - p.iter().map(|v| v * v).sum::<f64>()).max(0.0);
        Self { p, gini_variation }
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn gini_variation(&self) -> f64 {
        self.gini_variation
    }
}

/// A point on the probability simplex, used to weight `Θ` components.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    regular: bool,
}

impl WeightVector {
    /// Accepts weights that already sum to one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights);
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotOnSimplex(sum));
        }
        let regular = weights.iter().all(|&w| w > 0.0);
        Ok(Self { weights, regular })
    }

    /// Scales non-negative raw weights onto the simplex.
    pub fn normalized(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() || raw.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights);
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidWeights);
        }
        let weights: Vec<f64> = raw.iter().map(|w| w / sum).collect();
        let regular = weights.iter().all(|&w| w > 0.0);
        Ok(Self { weights, regular })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// All components strictly positive.
    pub fn is_regular(&self) -> bool {
        self.regular
    }
}

/// `α_s = p_s (1 - p_s) / V_G(Y)`; turns `τ_α` into the Goodman-Kruskal τ.
pub fn weights_gk(stats: &MarginalStats) -> Result<WeightVector> {
    if stats.gini_variation <= 0.0 {
        return Err(Error::DegenerateResponse);
    }
    let raw: Vec<f64> = stats.p.iter().map(|p| p * (1.0 - p)).collect();
    WeightVector::normalized(&raw)
}

pub fn weights_equal(levels: usize) -> Result<WeightVector> {
    if levels == 0 {
        return Err(Error::InvalidWeights);
    }
    WeightVector::normalized(&vec![1.0; levels])
}

/// `α_s ∝ 1 / p_s`, emphasising rare levels.
pub fn weights_invprob(stats: &MarginalStats) -> Result<WeightVector> {
    if stats.p.iter().any(|&p| p <= 0.0) {
        return Err(Error::ZeroProbabilityLevel);
    }
    let raw: Vec<f64> = stats.p.iter().map(|p| 1.0 / p).collect();
    WeightVector::normalized(&raw)
}

/// A weighting rule resolved against the response marginal at use time.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum WeightScheme {
    #[default]
    GoodmanKruskal,
    Equal,
    InverseProbability,
    /// Raw non-negative weights, one per response level (all levels,
    /// including any that turn out to have zero mass).
    Custom(Vec<f64>),
}

impl WeightScheme {
    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::GoodmanKruskal => "gk",
            WeightScheme::Equal => "equal",
            WeightScheme::InverseProbability => "invprob",
            WeightScheme::Custom(_) => "custom",
        }
    }

    /// Weights over the retained levels of a response. `levels` maps each
    /// entry of `p` back to the original level code, and `p` must be the
    /// (renormalised) marginal over exactly those levels.
    pub fn resolve(&self, p: &[f64], levels: &[usize]) -> Result<WeightVector> {
        let stats = MarginalStats::from_probabilities(p.to_vec())?;
        match self {
            WeightScheme::GoodmanKruskal => weights_gk(&stats),
            WeightScheme::Equal => weights_equal(p.len()),
            WeightScheme::InverseProbability => weights_invprob(&stats),
            WeightScheme::Custom(raw) => {
                let picked = levels
                    .iter()
                    .map(|&l| {
                        raw.get(l).copied().ok_or(Error::DimensionMismatch {
                            expected: levels.iter().max().map_or(0, |m| m + 1),
                            found: raw.len(),
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                WeightVector::normalized(&picked)
            }
        }
    }
}

/// Row-stochastic matrix `γ(Y|X)` over the response levels with positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationMatrix {
    levels: Vec<usize>,
    entries: Vec<f64>,
    y_marginal: Vec<f64>,
    dropped: Vec<usize>,
}

impl AssociationMatrix {
    /// Number of retained response levels.
    pub fn size(&self) -> usize {
        self.levels.len()
    }

    /// Original response level code of each row/column.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Response levels dropped for having zero mass.
    pub fn dropped_levels(&self) -> &[usize] {
        &self.dropped
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.entries[s * self.size() + t]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        let n = self.size();
        &self.entries[s * n..(s + 1) * n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `p(Y = s)` for the retained levels.
    pub fn y_marginal(&self) -> &[f64] {
        &self.y_marginal
    }

    /// Diagonal: expected per-level accuracy of proportional prediction.
    pub fn expected_accuracy(&self) -> Vec<f64> {
        (0..self.size()).map(|s| self.get(s, s)).collect()
    }

    /// Off-diagonal entries of row `s`: expected rates of assigning another
    /// level when the truth is `s` (type-I errors of level `s`).
    pub fn type_one_error_rates(&self, s: usize) -> Vec<(usize, f64)> {
        (0..self.size())
            .filter(|&t| t != s)
            .map(|t| (t, self.get(s, t)))
            .collect()
    }

    /// Off-diagonal entries of column `t`: expected rates of assigning `t`
    /// when the truth is another level (type-II errors of level `t`).
    pub fn type_two_error_rates(&self, t: usize) -> Vec<(usize, f64)> {
        (0..self.size())
            .filter(|&s| s != t)
            .map(|s| (s, self.get(s, t)))
            .collect()
    }
}

/// Computes `γ(Y|X)` from a joint mass table (rows `X`, columns `Y`).
pub fn gamma_matrix(table: &ContingencyTable) -> Result<AssociationMatrix> {
    let total = table.total();
    if total <= 0.0 {
        return Err(Error::EmptyMass);
    }
    let (levels, dropped): (Vec<usize>, Vec<usize>) =
        (0..table.y_levels()).partition(|&s| table.y_marginal()[s] > 0.0);
    let m = levels.len();
    let y_marginal: Vec<f64> = levels
        .iter()
        .map(|&s| table.y_marginal()[s] / total)
        .collect();

    let mut acc = vec![0.0; m * m];
    let mut row = vec![0.0; m];
    for i in 0..table.x_levels() {
        let px = table.x_marginal()[i] / total;
        if px <= 0.0 {
            continue;
        }
        for (k, &s) in levels.iter().enumerate() {
            row[k] = table.get(i, s) / total;
        }
        for s in 0..m {
            if row[s] == 0.0 {
                continue;
            }
            let lead = row[s] / px;
            for t in 0..m {
                acc[s * m + t] += lead * row[t];
            }
        }
    }
    for s in 0..m {
        for t in 0..m {
            let v = acc[s * m + t] / y_marginal[s];
            acc[s * m + t] = clamp_unit("gamma entry", v)?;
        }
    }
    Ok(AssociationMatrix {
        levels,
        entries: acc,
        y_marginal,
        dropped,
    })
}

/// Per-level association `θ_s` over the levels with `0 < p_s < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationVector {
    levels: Vec<usize>,
    components: Vec<f64>,
    y_marginal: Vec<f64>,
    excluded: Vec<usize>,
}

impl AssociationVector {
    /// Normalises the diagonal of `γ`: `θ_s = (γ_ss - p_s) / (1 - p_s)`.
    pub fn from_matrix(gamma: &AssociationMatrix) -> Result<Self> {
        let mut levels = Vec::new();
        let mut components = Vec::new();
        let mut y_marginal = Vec::new();
        let mut excluded = gamma.dropped_levels().to_vec();
        for (k, &s) in gamma.levels().iter().enumerate() {
            let p = gamma.y_marginal()[k];
            if p >= 1.0 {
                excluded.push(s);
                continue;
            }
            levels.push(s);
            y_marginal.push(p);
            components.push(clamp_unit("theta", (gamma.get(k, k) - p) / (1.0 - p))?);
        }
        excluded.sort_unstable();
        if levels.is_empty() {
            return Err(Error::DegenerateResponse);
        }
        Ok(Self {
            levels,
            components,
            y_marginal,
            excluded,
        })
    }

    /// Original response level code of each component.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// `p(Y = s)` for each component's level.
    pub fn y_marginal(&self) -> &[f64] {
        &self.y_marginal
    }

    /// Levels without a defined component (zero mass, or `p_s = 1`).
    pub fn excluded_levels(&self) -> &[usize] {
        &self.excluded
    }

    /// Marginal restricted to the component levels, rescaled to sum to one.
    pub fn renormalized_marginal(&self) -> Vec<f64> {
        let sum: f64 = self.y_marginal.iter().sum();
        self.y_marginal.iter().map(|p| p / sum).collect()
    }

    /// `τ_α` with weights resolved from `scheme` on this vector's levels.
    pub fn tau(&self, scheme: &WeightScheme) -> Result<f64> {
        let weights = scheme.resolve(&self.renormalized_marginal(), &self.levels)?;
        tau_alpha(self, &weights)
    }
}

/// Computes `Θ^{Y|X}` from a joint mass table.
pub fn theta_vector(table: &ContingencyTable) -> Result<AssociationVector> {
    let total = table.total();
    if total <= 0.0 {
        return Err(Error::EmptyMass);
    }
    let mut levels = Vec::new();
    let mut components = Vec::new();
    let mut y_marginal = Vec::new();
    let mut excluded = Vec::new();
    for s in 0..table.y_levels() {
        let p = table.y_marginal()[s] / total;
        if p <= 0.0 || p >= 1.0 {
            excluded.push(s);
            continue;
        }
        let denom = p * (1.0 - p);
        let mut sum = 0.0;
        for i in 0..table.x_levels() {
            let px = table.x_marginal()[i] / total;
            if px <= 0.0 {
                continue;
            }
            let d = table.get(i, s) / total - px * p;
            sum += d * d / px;
        }
        levels.push(s);
        y_marginal.push(p);
        components.push(clamp_unit("theta", sum / denom)?);
    }
    if levels.is_empty() {
        return Err(Error::DegenerateResponse);
    }
    Ok(AssociationVector {
        levels,
        components,
        y_marginal,
        excluded,
    })
}

/// `τ_α = Σ_s α_s θ_s`.
pub fn tau_alpha(theta: &AssociationVector, alpha: &WeightVector) -> Result<f64> {
    if theta.components.len() != alpha.len() {
        return Err(Error::DimensionMismatch {
            expected: theta.components.len(),
            found: alpha.len(),
        });
    }
    let v: f64 = theta
        .components
        .iter()
        .zip(alpha.as_slice())
        .map(|(t, a)| t * a)
        .sum();
    clamp_unit("tau", v)
}

/// `τ_α` of a table under a weight scheme.
pub fn tau(table: &ContingencyTable, scheme: &WeightScheme) -> Result<f64> {
    theta_vector(table)?.tau(scheme)
}

/// Goodman-Kruskal τ, computed directly as a normalised conditional Gini
/// concentration.
pub fn gk_tau(table: &ContingencyTable) -> Result<f64> {
    let total = table.total();
    if total <= 0.0 {
        return Err(Error::EmptyMass);
    }
    let stats = MarginalStats::from_table(table);
    if stats.gini_variation() <= 0.0 {
        return Err(Error::DegenerateResponse);
    }
    let mut concentration = 0.0;
    for i in 0..table.x_levels() {
        let px = table.x_marginal()[i] / total;
        if px <= 0.0 {
            continue;
        }
        for s in 0..table.y_levels() {
            let q = table.get(i, s) / total;
            concentration += q * q / px;
        }
    }
    let marginal: f64 = stats.p().iter().map(|p| p * p).sum();
    clamp_unit(
        "gk tau",
        (concentration - marginal) / stats.gini_variation(),
    )
}

/// `Ep = Σ p(scenario)²` over the observed joint scenarios of `indices`.
pub fn expected_concentration(dataset: &CategoricalDataset, indices: &[usize]) -> Result<f64> {
    let x = dataset.compose(indices)?;
    let total = dataset.total_mass();
    Ok(x.scenario_masses(dataset)
        .iter()
        .map(|m| {
            let p = m / total;
            p * p
        })
        .sum())
}
