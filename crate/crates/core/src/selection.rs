//! Basis construction.
//!
//! * Supervised: forward greedy on `τ_α^{Y|chosen ∪ {X}}`, then backward
//!   removal of members whose deletion leaves `τ_α` unchanged.
//! * Structural (no response): forward greedy minimising the expected
//!   concentration `Ep(chosen ∪ {X})`, then backward removal of members whose
//!   deletion leaves `Ep` unchanged. Every candidate is then a function of
//!   the basis.
//!
//! Both phases compare reals with an absolute tolerance `epsilon`. Ties
//! within `epsilon` go to the smallest observed composite cardinality, then
//! the smallest variable index.

use alloc::vec::Vec;

use crate::association::{theta_vector, WeightScheme, WeightVector};
use crate::dataset::CategoricalDataset;
use crate::{Error, Executor, Result};

pub const DEFAULT_EPSILON: f64 = 1e-9;
pub const DEFAULT_MAX_CELLS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub weights: WeightScheme,
    pub epsilon: f64,
    pub max_vars: Option<usize>,
    /// Candidates whose composite with the current basis would exceed this
    /// many observed scenarios are skipped.
    pub max_cells: Option<usize>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            weights: WeightScheme::GoodmanKruskal,
            epsilon: DEFAULT_EPSILON,
            max_vars: None,
            max_cells: Some(DEFAULT_MAX_CELLS),
        }
    }
}

impl SelectionConfig {
    fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::InvalidConfig("epsilon must be non-negative"));
        }
        if self.max_vars == Some(0) || self.max_cells == Some(0) {
            return Err(Error::InvalidConfig("caps must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    NoGain,
    MaxVars,
    MaxCells,
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub added: usize,
    /// `τ_α` (supervised) or `Ep` (structural) after adding the variable.
    pub value: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Surviving variables in selection order.
    pub basis: Vec<usize>,
    pub trace: Vec<TraceStep>,
    /// Variables removed as redundant in the backward phase.
    pub removed: Vec<usize>,
    /// Candidates skipped for exceeding `max_cells`, with the cell count.
    pub skipped: Vec<(usize, usize)>,
    /// Value at the end of the forward phase.
    pub forward_value: f64,
    /// Value of the returned basis.
    pub final_value: f64,
    pub terminated_by: Termination,
}

#[derive(Debug, Clone, Copy)]
struct Scored {
    index: usize,
    value: f64,
    cells: usize,
}

/// Chooses the best score; `higher` selects maximisation.
fn pick_best(scored: &[Scored], epsilon: f64, higher: bool) -> Option<Scored> {
    let best = scored
        .iter()
        .map(|s| s.value)
        .fold(None, |acc: Option<f64>, v| match acc {
            None => Some(v),
            Some(a) if (higher && v > a) || (!higher && v < a) => Some(v),
            keep => keep,
        })?;
    scored
        .iter()
        .filter(|s| {
            if higher {
                s.value >= best - epsilon
            } else {
                s.value <= best + epsilon
            }
        })
        .min_by_key(|s| (s.cells, s.index))
        .copied()
}

fn with(set: &[usize], extra: usize) -> Vec<usize> {
    let mut v = set.to_vec();
    v.push(extra);
    v
}

fn without(set: &[usize], drop: usize) -> Vec<usize> {
    set.iter().copied().filter(|&v| v != drop).collect()
}

fn check_candidates(dataset: &CategoricalDataset, candidates: &[usize]) -> Result<()> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    for (k, &c) in candidates.iter().enumerate() {
        if c >= dataset.n_variables() {
            return Err(Error::UnknownVariable(c));
        }
        if candidates[..k].contains(&c) {
            return Err(Error::RepeatedIndex(c));
        }
    }
    Ok(())
}

/// Scores a variable set with its observed cardinality.
trait Objective: Sync {
    fn empty_value(&self) -> f64;
    fn value(&self, set: &[usize]) -> Result<(f64, usize)>;
    fn higher_is_better(&self) -> bool;
}

struct Supervised<'a> {
    dataset: &'a CategoricalDataset,
    y: usize,
    weights: WeightVector,
}

impl Objective for Supervised<'_> {
    fn empty_value(&self) -> f64 {
        0.0
    }

    fn value(&self, set: &[usize]) -> Result<(f64, usize)> {
        if set.is_empty() {
            return Ok((0.0, 1));
        }
        let x = self.dataset.compose(set)?;
        let theta = theta_vector(&self.dataset.contingency(&x, self.y)?)?;
        Ok((
            crate::association::tau_alpha(&theta, &self.weights)?,
            x.observed_cardinality(),
        ))
    }

    fn higher_is_better(&self) -> bool {
        true
    }
}

struct Structural<'a> {
    dataset: &'a CategoricalDataset,
}

impl Objective for Structural<'_> {
    fn empty_value(&self) -> f64 {
        1.0
    }

    fn value(&self, set: &[usize]) -> Result<(f64, usize)> {
        if set.is_empty() {
            return Ok((1.0, 1));
        }
        let x = self.dataset.compose(set)?;
        let total = self.dataset.total_mass();
        let ep = x
            .scenario_masses(self.dataset)
            .iter()
            .map(|m| (m / total) * (m / total))
            .sum();
        Ok((ep, x.observed_cardinality()))
    }

    fn higher_is_better(&self) -> bool {
        false
    }
}

fn run<O: Objective, E: Executor>(
    objective: &O,
    candidates: &[usize],
    config: &SelectionConfig,
    executor: &E,
) -> Result<SelectionResult> {
    let eps = config.epsilon;
    let higher = objective.higher_is_better();
    let improves = |new: f64, cur: f64| {
        if higher {
            new - cur > eps
        } else {
            cur - new > eps
        }
    };

    let mut basis: Vec<usize> = Vec::new();
    let mut pool: Vec<usize> = candidates.to_vec();
    let mut trace = Vec::new();
    let mut skipped = Vec::new();
    let mut current = objective.empty_value();
    let terminated_by = loop {
        if pool.is_empty() {
            break Termination::Exhausted;
        }
        if config.max_vars.is_some_and(|m| basis.len() >= m) {
            break Termination::MaxVars;
        }
        let scores = executor.map_indexed(pool.len(), |k| {
            let set = with(&basis, pool[k]);
            objective.value(&set).map(|(value, cells)| Scored {
                index: pool[k],
                value,
                cells,
            })
        });
        let mut admissible = Vec::with_capacity(scores.len());
        for s in scores {
            let s = s?;
            if config.max_cells.is_some_and(|m| s.cells > m) {
                skipped.push((s.index, s.cells));
                pool.retain(|&v| v != s.index);
            } else {
                admissible.push(s);
            }
        }
        let Some(best) = pick_best(&admissible, eps, higher) else {
            break Termination::MaxCells;
        };
        if !improves(best.value, current) {
            break Termination::NoGain;
        }
        basis.push(best.index);
        pool.retain(|&v| v != best.index);
        current = best.value;
        trace.push(TraceStep {
            added: best.index,
            value: best.value,
            cells: best.cells,
        });
    };

    let forward_value = current;
    let mut removed = Vec::new();
    'scan: loop {
        for &member in &basis {
            let (value, _) = objective.value(&without(&basis, member))?;
            if !improves(forward_value, value) {
                removed.push(member);
                basis.retain(|&v| v != member);
                continue 'scan;
            }
        }
        break;
    }
    let (final_value, _) = objective.value(&basis)?;
    Ok(SelectionResult {
        basis,
        trace,
        removed,
        skipped,
        forward_value,
        final_value,
        terminated_by,
    })
}

fn response_weights(
    dataset: &CategoricalDataset,
    y: usize,
    scheme: &WeightScheme,
) -> Result<WeightVector> {
    let masses = dataset.level_masses(y);
    let levels: Vec<usize> = (0..masses.len()).filter(|&s| masses[s] > 0.0).collect();
    if levels.len() < 2 {
        return Err(Error::DegenerateResponse);
    }
    let total = dataset.total_mass();
    let p: Vec<f64> = levels.iter().map(|&s| masses[s] / total).collect();
    scheme.resolve(&p, &levels)
}

/// Builds an `α`-association basis for response `y` from `candidates`.
pub fn select_supervised<E: Executor>(
    dataset: &CategoricalDataset,
    y: usize,
    candidates: &[usize],
    config: &SelectionConfig,
    executor: &E,
) -> Result<SelectionResult> {
    config.validate()?;
    check_candidates(dataset, candidates)?;
    if candidates.contains(&y) {
        return Err(Error::Overlap(y));
    }
    let weights = response_weights(dataset, y, &config.weights)?;
    if !weights.is_regular() {
        return Err(Error::IrregularWeights);
    }
    let objective = Supervised {
        dataset,
        y,
        weights,
    };
    run(&objective, candidates, config, executor)
}

/// Builds a structural basis: an irredundant subset that determines every
/// candidate.
pub fn select_structural<E: Executor>(
    dataset: &CategoricalDataset,
    candidates: &[usize],
    config: &SelectionConfig,
    executor: &E,
) -> Result<SelectionResult> {
    config.validate()?;
    check_candidates(dataset, candidates)?;
    run(&Structural { dataset }, candidates, config, executor)
}

/// One checked condition of a basis definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    /// `TB1`, `TB2`, `aB1` or `aB2`.
    pub condition: &'static str,
    /// Variable the check concerns (removed member for TB2/aB2, determined
    /// variable for aB1).
    pub variable: Option<usize>,
    pub value: f64,
    pub reference: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisReport {
    pub checks: Vec<ConditionCheck>,
    /// Observed cardinality of the basis composite.
    pub basis_cells: usize,
}

impl BasisReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn condition_holds(&self, condition: &str) -> bool {
        self.checks
            .iter()
            .filter(|c| c.condition == condition)
            .all(|c| c.holds)
    }
}

/// `τ_α^{target|given}`, with a constant target counting as determined.
pub fn determination_degree(
    dataset: &CategoricalDataset,
    target: usize,
    given: &[usize],
    scheme: &WeightScheme,
) -> Result<f64> {
    if given.contains(&target) {
        return Ok(1.0);
    }
    if given.is_empty() {
        let masses = dataset.level_masses(target);
        return Ok(if masses.iter().filter(|&&m| m > 0.0).count() <= 1 {
            1.0
        } else {
            0.0
        });
    }
    let x = dataset.compose(given)?;
    let table = dataset.contingency(&x, target)?;
    match crate::association::tau(&table, scheme) {
        Err(Error::DegenerateResponse) => Ok(1.0),
        other => other,
    }
}

/// Checks the basis conditions explicitly.
///
/// With `y = Some(_)`: TB1 (`τ_α` of the basis equals that of all
/// candidates within `epsilon`) and TB2 (dropping any member loses more than
/// `epsilon`). With `y = None`: aB1 (every candidate outside the basis is
/// determined by it) and aB2 (no member is determined by the others).
pub fn verify_basis(
    dataset: &CategoricalDataset,
    basis: &[usize],
    y: Option<usize>,
    candidates: &[usize],
    config: &SelectionConfig,
) -> Result<BasisReport> {
    let eps = config.epsilon;
    let mut checks = Vec::new();
    let basis_cells = if basis.is_empty() {
        1
    } else {
        dataset.compose(basis)?.observed_cardinality()
    };
    match y {
        Some(y) => {
            let objective = Supervised {
                dataset,
                y,
                weights: response_weights(dataset, y, &config.weights)?,
            };
            let (full, _) = objective.value(candidates)?;
            let (value, _) = objective.value(basis)?;
            checks.push(ConditionCheck {
                condition: "TB1",
                variable: None,
                value,
                reference: full,
                holds: (value - full).abs() <= eps,
            });
            for &member in basis {
                let (v, _) = objective.value(&without(basis, member))?;
                checks.push(ConditionCheck {
                    condition: "TB2",
                    variable: Some(member),
                    value: v,
                    reference: full,
                    holds: v < full - eps,
                });
            }
        }
        None => {
            for &c in candidates.iter().filter(|c| !basis.contains(c)) {
                let v = determination_degree(dataset, c, basis, &config.weights)?;
                checks.push(ConditionCheck {
                    condition: "aB1",
                    variable: Some(c),
                    value: v,
                    reference: 1.0,
                    holds: (1.0 - v).abs() <= eps,
                });
            }
            for &member in basis {
                let v = determination_degree(
                    dataset,
                    member,
                    &without(basis, member),
                    &config.weights,
                )?;
                checks.push(ConditionCheck {
                    condition: "aB2",
                    variable: Some(member),
                    value: v,
                    reference: 1.0,
                    holds: v < 1.0 - eps,
                });
            }
        }
    }
    Ok(BasisReport {
        checks,
        basis_cells,
    })
}

/// Observed domain sizes of two structural bases; verified bases of the
/// same data have equal sizes.
pub fn compare_structural_bases(
    dataset: &CategoricalDataset,
    first: &[usize],
    second: &[usize],
) -> Result<(usize, usize)> {
    Ok((
        dataset.compose(first)?.observed_cardinality(),
        dataset.compose(second)?.observed_cardinality(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Sequential;
    use alloc::format;
    use alloc::string::String;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(names: &[&str], rows: Vec<Vec<String>>) -> CategoricalDataset {
        CategoricalDataset::from_scenarios(names, rows.into_iter().map(|r| (r, 1.0))).unwrap()
    }

    #[test]
    fn copy_of_response_is_selected_alone() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows = (0..200)
            .map(|_| {
                let x1: u32 = rng.random_range(0..3);
                vec![
                    format!("{x1}"),
                    format!("{x1}"),
                    format!("{}", rng.random_range(0..3)),
                    format!("{}", rng.random_range(0..2)),
                ]
            })
            .collect();
        let mut ds = table(&["Y", "X1", "N1", "N2"], rows);
        ds = ds.expand_to_unit_rows().unwrap();
        let r = select_supervised(&ds, 0, &[1, 2, 3], &SelectionConfig::default(), &Sequential)
            .unwrap();
        assert_eq!(r.basis, vec![1]);
        assert!((r.final_value - 1.0).abs() < 1e-12);
        assert_eq!(r.terminated_by, Termination::NoGain);
    }

    #[test]
    fn duplicate_candidate_never_added() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows = (0..300)
            .map(|_| {
                let x: u32 = rng.random_range(0..3);
                let y = if rng.random::<f64>() < 0.7 {
                    x
                } else {
                    rng.random_range(0..3)
                };
                vec![format!("{y}"), format!("{x}"), format!("{x}")]
            })
            .collect();
        let ds = table(&["Y", "X", "Xdup"], rows);
        let r =
            select_supervised(&ds, 0, &[1, 2], &SelectionConfig::default(), &Sequential).unwrap();
        assert_eq!(r.basis, vec![1]);
        let rep =
            verify_basis(&ds, &r.basis, Some(0), &[1, 2], &SelectionConfig::default()).unwrap();
        assert!(rep.holds());
    }

    #[test]
    fn independent_response_gives_empty_basis() {
        let rows = (0..4)
            .flat_map(|a| (0..3).map(move |b| vec![format!("{a}"), format!("{b}")]))
            .collect();
        let ds = table(&["Y", "X"], rows);
        let r = select_supervised(&ds, 0, &[1], &SelectionConfig::default(), &Sequential).unwrap();
        assert!(r.basis.is_empty());
        assert_eq!(r.final_value, 0.0);
    }

    #[test]
    fn structural_function_of_two_independent() {
        let rows = (0..3)
            .flat_map(|a| {
                (0..2)
                    .map(move |b| vec![format!("{a}"), format!("{b}"), format!("{}", (a + b) % 2)])
            })
            .collect();
        let ds = table(&["V1", "V2", "V3"], rows);
        let r =
            select_structural(&ds, &[0, 1, 2], &SelectionConfig::default(), &Sequential).unwrap();
        let mut b = r.basis.clone();
        b.sort_unstable();
        assert_eq!(b, vec![0, 1]);
        assert!(
            verify_basis(&ds, &r.basis, None, &[0, 1, 2], &SelectionConfig::default())
                .unwrap()
                .holds()
        );
        assert!(r.trace.windows(2).all(|w| w[1].value <= w[0].value));
    }

    #[test]
    fn structural_relabelings_collapse() {
        // B is a relabeling of A; C a coarsening of A
        let rows = (0..4)
            .map(|a| {
                vec![
                    format!("a{a}"),
                    format!("b{}", 3 - a),
                    format!("c{}", a / 2),
                ]
            })
            .collect();
        let ds = table(&["A", "B", "C"], rows);
        let r =
            select_structural(&ds, &[0, 1, 2], &SelectionConfig::default(), &Sequential).unwrap();
        assert_eq!(r.basis, vec![0]);
        for v in [1, 2] {
            let d = determination_degree(&ds, v, &[0], &WeightScheme::GoodmanKruskal).unwrap();
            assert!((d - 1.0).abs() < 1e-12);
        }
        // {B} is another structural basis with the same domain size
        let alt = verify_basis(&ds, &[1], None, &[0, 1, 2], &SelectionConfig::default()).unwrap();
        assert!(alt.holds());
        let (a, b) = compare_structural_bases(&ds, &[0], &[1]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn max_cells_skips_candidates() {
        let rows = (0..20)
            .map(|i| vec![format!("{}", i % 2), format!("{i}"), format!("{}", i % 4)])
            .collect();
        let ds = table(&["Y", "Id", "Q"], rows);
        let config = SelectionConfig {
            max_cells: Some(5),
            ..SelectionConfig::default()
        };
        let r = select_supervised(&ds, 0, &[1, 2], &config, &Sequential).unwrap();
        assert_eq!(r.skipped, vec![(1, 20)]);
        assert_eq!(r.basis, vec![2]);
    }

    #[test]
    fn errors() {
        let rows = (0..4)
            .map(|i| vec![format!("{}", i % 2), format!("{i}")])
            .collect();
        let ds = table(&["Y", "X"], rows);
        let c = SelectionConfig::default();
        assert_eq!(
            select_supervised(&ds, 0, &[], &c, &Sequential).unwrap_err(),
            Error::NoCandidates
        );
        assert_eq!(
            select_supervised(&ds, 0, &[0, 1], &c, &Sequential).unwrap_err(),
            Error::Overlap(0)
        );
        let irregular = SelectionConfig {
            weights: WeightScheme::Custom(vec![1.0, 0.0]),
            ..c.clone()
        };
        assert_eq!(
            select_supervised(&ds, 0, &[1], &irregular, &Sequential).unwrap_err(),
            Error::IrregularWeights
        );
        let bad = SelectionConfig { epsilon: -1.0, ..c };
        assert!(select_structural(&ds, &[0, 1], &bad, &Sequential).is_err());
    }

    #[test]
    fn dropping_a_member_breaks_tb2_side() {
        // Y = (A, B) jointly; both needed
        let rows = (0..3)
            .flat_map(|a| {
                (0..3).map(move |b| vec![format!("{a}{b}"), format!("{a}"), format!("{b}")])
            })
            .collect();
        let ds = table(&["Y", "A", "B"], rows);
        let c = SelectionConfig::default();
        let r = select_supervised(&ds, 0, &[1, 2], &c, &Sequential).unwrap();
        assert_eq!(r.basis.len(), 2);
        let full = verify_basis(&ds, &r.basis, Some(0), &[1, 2], &c).unwrap();
        assert!(full.holds());
        let partial = verify_basis(&ds, &[1], Some(0), &[1, 2], &c).unwrap();
        assert!(!partial.condition_holds("TB1"));
    }
}
