//! Pairwise equivalence of two explanatory variables with respect to a
//! response, from mutual determination (E-1) down to equal `τ_α` (E-5).

use alloc::vec::Vec;

use crate::association::{gamma_matrix, theta_vector, WeightScheme};
use crate::dataset::{CategoricalDataset, CompositeVariable};
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// The relations, strongest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// `τ^{X1|X2} = τ^{X2|X1} = τ^{Y|X1} = 1`.
    E1,
    /// `τ^{Y|X1} = τ^{Y|X2} = 1`.
    E2,
    /// `τ^{X1|X2} = τ^{X2|X1} = 1`.
    E2Prime,
    /// `γ(Y|X1) = γ(Y|X2)`.
    E3,
    /// `Θ^{Y|X1} = Θ^{Y|X2}`.
    E4,
    /// `τ_α^{Y|X1} = τ_α^{Y|X2}`.
    E5,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::E1,
        Relation::E2,
        Relation::E2Prime,
        Relation::E3,
        Relation::E4,
        Relation::E5,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Relation::E1 => "E1",
            Relation::E2 => "E2",
            Relation::E2Prime => "E2'",
            Relation::E3 => "E3",
            Relation::E4 => "E4",
            Relation::E5 => "E5",
        }
    }

    /// Relations directly implied by this one.
    pub fn implies(self) -> &'static [Relation] {
        match self {
            Relation::E1 => &[Relation::E2, Relation::E2Prime],
            Relation::E2 | Relation::E2Prime => &[Relation::E3],
            Relation::E3 => &[Relation::E4],
            Relation::E4 => &[Relation::E5],
            Relation::E5 => &[],
        }
    }
}

/// A relation together with how it is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceLevel {
    pub relation: Relation,
    /// Absolute tolerance for every real-valued equality.
    pub tolerance: f64,
    /// Weights for the `τ` used by E-1, E-2, E-2′ and E-5.
    pub weights: WeightScheme,
}

impl EquivalenceLevel {
    pub fn new(relation: Relation) -> Self {
        Self {
            relation,
            tolerance: DEFAULT_TOLERANCE,
            weights: WeightScheme::GoodmanKruskal,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_weights(mut self, weights: WeightScheme) -> Self {
        self.weights = weights;
        self
    }
}

/// Which determination a failed E-1/E-2/E-2′ comparison was about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Determination {
    X1GivenX2,
    X2GivenX1,
    YGivenX1,
    YGivenX2,
}

/// The first comparison that failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A `τ` that should have been 1.
    NotDetermined {
        which: Determination,
        tau: f64,
    },
    /// `γ` entry `(s, t)` (original response level codes) differs.
    GammaEntry {
        s: usize,
        t: usize,
        left: f64,
        right: f64,
    },
    /// `θ_s` differs.
    ThetaComponent {
        s: usize,
        left: f64,
        right: f64,
    },
    Tau {
        left: f64,
        right: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub relation: Relation,
    pub holds: bool,
    /// Present iff `holds` is false.
    pub witness: Option<Witness>,
    /// E-5 evaluated with a weight vector that is not regular.
    pub irregular_weights: bool,
}

impl EquivalenceReport {
    fn verdict(relation: Relation, witness: Option<Witness>) -> Self {
        Self {
            relation,
            holds: witness.is_none(),
            witness,
            irregular_weights: false,
        }
    }
}

struct Pair<'a> {
    dataset: &'a CategoricalDataset,
    x1: CompositeVariable,
    x2: CompositeVariable,
    y: usize,
    y_composite: CompositeVariable,
}

impl<'a> Pair<'a> {
    fn new(dataset: &'a CategoricalDataset, x1: &[usize], x2: &[usize], y: usize) -> Result<Self> {
        let x1 = dataset.compose(x1)?;
        let x2 = dataset.compose(x2)?;
        if x1.contains(y) || x2.contains(y) {
            return Err(Error::Overlap(y));
        }
        let y_composite = dataset.compose(&[y])?;
        Ok(Self {
            dataset,
            x1,
            x2,
            y,
            y_composite,
        })
    }

    fn response_is_constant(&self) -> bool {
        self.y_composite.observed_cardinality() <= 1
    }

    fn determination(
        &self,
        which: Determination,
        weights: &WeightScheme,
        tol: f64,
    ) -> Result<Option<Witness>> {
        let (target, given) = match which {
            Determination::X1GivenX2 => (&self.x1, &self.x2),
            Determination::X2GivenX1 => (&self.x2, &self.x1),
            Determination::YGivenX1 => (&self.y_composite, &self.x1),
            Determination::YGivenX2 => (&self.y_composite, &self.x2),
        };
        if target.observed_cardinality() <= 1 {
            return Ok(None);
        }
        let table = self.dataset.joint_table(given, target);
        let tau = crate::association::tau(&table, weights)?;
        Ok(((1.0 - tau).abs() > tol).then_some(Witness::NotDetermined { which, tau }))
    }

    fn first_undetermined(
        &self,
        list: &[Determination],
        weights: &WeightScheme,
        tol: f64,
    ) -> Result<Option<Witness>> {
        for &which in list {
            if let Some(w) = self.determination(which, weights, tol)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

/// Decides one relation between `x1` and `x2` (variable index sets) with
/// respect to response `y`.
pub fn check(
    dataset: &CategoricalDataset,
    x1: &[usize],
    x2: &[usize],
    y: usize,
    level: &EquivalenceLevel,
) -> Result<EquivalenceReport> {
    let pair = Pair::new(dataset, x1, x2, y)?;
    evaluate(&pair, level)
}

fn evaluate(pair: &Pair<'_>, level: &EquivalenceLevel) -> Result<EquivalenceReport> {
    use Determination::*;
    let tol = level.tolerance;
    let weights = &level.weights;
    let relation = level.relation;
    let witness = match relation {
        Relation::E1 => pair.first_undetermined(&[X1GivenX2, X2GivenX1, YGivenX1], weights, tol)?,
        Relation::E2 => pair.first_undetermined(&[YGivenX1, YGivenX2], weights, tol)?,
        Relation::E2Prime => pair.first_undetermined(&[X1GivenX2, X2GivenX1], weights, tol)?,
        Relation::E3 => {
            let g1 = gamma_matrix(&pair.dataset.contingency(&pair.x1, pair.y)?)?;
            let g2 = gamma_matrix(&pair.dataset.contingency(&pair.x2, pair.y)?)?;
            let n = g1.size();
            let mut found = None;
            'outer: for s in 0..n {
                for t in 0..n {
                    let (a, b) = (g1.get(s, t), g2.get(s, t));
                    if (a - b).abs() > tol {
                        found = Some(Witness::GammaEntry {
                            s: g1.levels()[s],
                            t: g1.levels()[t],
                            left: a,
                            right: b,
                        });
                        break 'outer;
                    }
                }
            }
            found
        }
        Relation::E4 => {
            if pair.response_is_constant() {
                None
            } else {
                let t1 = theta_vector(&pair.dataset.contingency(&pair.x1, pair.y)?)?;
                let t2 = theta_vector(&pair.dataset.contingency(&pair.x2, pair.y)?)?;
                t1.components()
                    .iter()
                    .zip(t2.components())
                    .zip(t1.levels())
                    .find(|((a, b), _)| (*a - *b).abs() > tol)
                    .map(|((a, b), &s)| Witness::ThetaComponent {
                        s,
                        left: *a,
                        right: *b,
                    })
            }
        }
        Relation::E5 => {
            if pair.response_is_constant() {
                None
            } else {
                let t1 = theta_vector(&pair.dataset.contingency(&pair.x1, pair.y)?)?;
                let t2 = theta_vector(&pair.dataset.contingency(&pair.x2, pair.y)?)?;
                let w = weights.resolve(&t1.renormalized_marginal(), t1.levels())?;
                let left = crate::association::tau_alpha(&t1, &w)?;
                let right = crate::association::tau_alpha(&t2, &w)?;
                let mut report = EquivalenceReport::verdict(
                    relation,
                    ((left - right).abs() > tol).then_some(Witness::Tau { left, right }),
                );
                report.irregular_weights = !w.is_regular();
                return Ok(report);
            }
        }
    };
    Ok(EquivalenceReport::verdict(relation, witness))
}

/// All relations evaluated in order, with any violated implication.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyScan {
    pub results: Vec<(Relation, bool)>,
    /// `(stronger, weaker)` pairs where the stronger relation held and the
    /// weaker did not; non-empty only under a misconfigured tolerance.
    pub inconsistencies: Vec<(Relation, Relation)>,
}

impl HierarchyScan {
    pub fn holds(&self, relation: Relation) -> bool {
        self.results
            .iter()
            .find(|(r, _)| *r == relation)
            .is_some_and(|(_, h)| *h)
    }
}

pub fn hierarchy_scan(
    dataset: &CategoricalDataset,
    x1: &[usize],
    x2: &[usize],
    y: usize,
    weights: &WeightScheme,
    tolerance: f64,
) -> Result<HierarchyScan> {
    let pair = Pair::new(dataset, x1, x2, y)?;
    let mut results = Vec::with_capacity(Relation::ALL.len());
    for relation in Relation::ALL {
        let level = EquivalenceLevel {
            relation,
            tolerance,
            weights: weights.clone(),
        };
        results.push((relation, evaluate(&pair, &level)?.holds));
    }
    let held = |r: Relation| results.iter().any(|&(q, h)| q == r && h);
    let mut inconsistencies = Vec::new();
    for relation in Relation::ALL {
        if held(relation) {
            for &weaker in relation.implies() {
                if !held(weaker) {
                    inconsistencies.push((relation, weaker));
                }
            }
        }
    }
    Ok(HierarchyScan {
        results,
        inconsistencies,
    })
}
