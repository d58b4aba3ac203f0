//! Proportional prediction and confusion matrices.
//!
//! A fitted predictor stores `p(Y | X = x)` for every training scenario `x`,
//! keyed by level labels so that test data with its own dictionaries maps
//! correctly. Predictions draw `Ŷ` from the stored conditional by inverse
//! CDF, using a ChaCha8 stream per test row.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::association::{gamma_matrix, AssociationMatrix};
use crate::dataset::{CategoricalDataset, ContingencyTable};
use crate::{Error, Executor, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProportionalPredictor {
    given: Vec<String>,
    response: String,
    levels: Vec<String>,
    conditionals: BTreeMap<Vec<String>, Vec<f64>>,
    fallback: Vec<f64>,
    seed: u64,
}

fn normalize(row: &[f64]) -> Vec<f64> {
    let total: f64 = row.iter().sum();
    row.iter().map(|m| m / total).collect()
}

fn draw(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (t, &q) in p.iter().enumerate() {
        acc += q;
        if u < acc {
            return t;
        }
    }
    // rounding left u above the final partial sum
    p.iter().rposition(|&q| q > 0.0).unwrap_or(0)
}

impl ProportionalPredictor {
    /// Plug-in conditionals of `y` given the composite of `given`.
    pub fn fit(train: &CategoricalDataset, given: &[usize], y: usize, seed: u64) -> Result<Self> {
        if y >= train.n_variables() {
            return Err(Error::UnknownVariable(y));
        }
        let x = train.compose(given)?;
        let table = train.contingency(&x, y)?;
        if table.y_marginal().iter().filter(|&&m| m > 0.0).count() < 2 {
            return Err(Error::DegenerateResponse);
        }
        let conditionals = (0..table.x_levels())
            .map(|i| {
                let key = x
                    .tuple(i)
                    .iter()
                    .zip(x.members())
                    .map(|(&c, &v)| train.variable(v).level(c as usize).to_string())
                    .collect();
                (key, normalize(table.row(i)))
            })
            .collect();
        Ok(Self {
            given: x
                .members()
                .iter()
                .map(|&v| train.variable(v).name().to_string())
                .collect(),
            response: train.variable(y).name().to_string(),
            levels: train.variable(y).levels().to_vec(),
            conditionals,
            fallback: normalize(table.y_marginal()),
            seed,
        })
    }

    pub fn given(&self) -> &[String] {
        &self.given
    }

    pub fn response(&self) -> &str {
        &self.response
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fallback(&self) -> &[f64] {
        &self.fallback
    }

    /// Stored conditional for a scenario, or `None` if unseen in training.
    pub fn conditional<S: AsRef<str>>(&self, labels: &[S]) -> Option<&[f64]> {
        let key: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        self.conditionals.get(&key).map(Vec::as_slice)
    }

    pub fn n_scenarios(&self) -> usize {
        self.conditionals.len()
    }

    /// Samples one prediction per test row and tallies `(true, predicted)`.
    /// Rows with mass `m > 1` are predicted `m` times; masses must be
    /// integral.
    pub fn predict_and_score<E: Executor>(
        &self,
        test: &CategoricalDataset,
        executor: &E,
    ) -> Result<ConfusionMatrix> {
        let expanded;
        let test = if test.is_unit_mass() {
            test
        } else {
            expanded = test.expand_to_unit_rows()?;
            &expanded
        };
        let given = test
            .indices_of(&self.given)
            .map_err(|_| self.missing_variable(test))?;
        let y = test
            .index_of(&self.response)
            .map_err(|_| Error::MissingTestVariable(self.response.clone()))?;

        // test code -> stored level, per variable
        let y_map = test
            .variable(y)
            .levels()
            .iter()
            .map(|label| self.levels.iter().position(|l| l == label))
            .collect::<Vec<_>>();
        for (code, mapped) in y_map.iter().enumerate() {
            if mapped.is_none() && test.level_masses(y)[code] > 0.0 {
                return Err(Error::UnseenResponseLevel(
                    test.variable(y).level(code).to_string(),
                ));
            }
        }
        let x = test.compose(&given)?;
        let scenario: Vec<&[f64]> = (0..x.observed_cardinality())
            .map(|i| {
                let labels: Vec<&str> = x
                    .tuple(i)
                    .iter()
                    .zip(x.members())
                    .map(|(&c, &v)| test.variable(v).level(c as usize))
                    .collect();
                // composite members are sorted; stored keys follow the fitted order
                let key: Vec<&str> = given
                    .iter()
                    .map(|v| labels[x.members().binary_search(v).unwrap_or(0)])
                    .collect();
                self.conditional(&key).unwrap_or(&self.fallback)
            })
            .collect();

        let codes = x.codes();
        let ycol = test.column(y);
        let pairs = executor.map_indexed(test.n_rows(), |row| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(row as u64);
            let u: f64 = rng.random();
            let truth = y_map[ycol[row] as usize].unwrap_or(0);
            (truth, draw(scenario[codes[row] as usize], u))
        });
        let k = self.levels.len();
        let mut counts = alloc::vec![0u64; k * k];
        for (s, t) in pairs {
            counts[s * k + t] += 1;
        }
        Ok(ConfusionMatrix {
            levels: self.levels.clone(),
            counts,
        })
    }

    fn missing_variable(&self, test: &CategoricalDataset) -> Error {
        let name = self
            .given
            .iter()
            .find(|n| test.index_of(n).is_err())
            .cloned()
            .unwrap_or_default();
        Error::MissingTestVariable(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    levels: Vec<String>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn size(&self) -> usize {
        self.levels.len()
    }

    /// Count of rows with true level `s` predicted as `t`.
    pub fn count(&self, s: usize, t: usize) -> u64 {
        self.counts[s * self.size() + t]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_total(&self, s: usize) -> u64 {
        let k = self.size();
        self.counts[s * k..(s + 1) * k].iter().sum()
    }

    /// Rows divided by their totals; rows without test cases are all zero.
    pub fn row_normalized(&self) -> Vec<Vec<f64>> {
        let k = self.size();
        (0..k)
            .map(|s| {
                let total = self.row_total(s);
                (0..k)
                    .map(|t| {
                        if total == 0 {
                            0.0
                        } else {
                            self.count(s, t) as f64 / total as f64
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn accuracy(&self) -> f64 {
        let diag: u64 = (0..self.size()).map(|s| self.count(s, s)).sum();
        diag as f64 / self.total() as f64
    }
}

/// The association matrix read as the expected confusion matrix of
/// proportional prediction. `type_one_error_rates(s)` gives row `s`
/// off-diagonals, `type_two_error_rates(t)` column `t` off-diagonals.
pub fn expected_confusion(table: &ContingencyTable) -> Result<AssociationMatrix> {
    gamma_matrix(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Sequential;
    use alloc::vec;
    use alloc::vec::Vec;

    fn rows(data: &[(&str, &str, f64)]) -> CategoricalDataset {
        CategoricalDataset::from_scenarios(
            &["X", "Y"],
            data.iter().map(|&(x, y, m)| (vec![x, y], m)),
        )
        .unwrap()
    }

    fn v6_by_v4() -> CategoricalDataset {
        let counts: [[u32; 6]; 7] = [
            [16, 1, 0, 0, 0, 0],
            [1199, 1274, 346, 66, 33, 1],
            [640, 2363, 1363, 343, 103, 7],
            [381, 2203, 2646, 949, 402, 18],
            [182, 1131, 2038, 1369, 762, 55],
            [79, 407, 937, 1047, 1286, 206],
            [2, 5, 14, 20, 51, 55],
        ];
        let mut scen = Vec::new();
        for (i, row) in counts.iter().enumerate() {
            for (s, &c) in row.iter().enumerate() {
                if c > 0 {
                    scen.push((
                        vec![alloc::format!("{}", i + 1), alloc::format!("{}", s + 1)],
                        c as f64,
                    ));
                }
            }
        }
        CategoricalDataset::from_scenarios(&["X", "Y"], scen).unwrap()
    }

    #[test]
    fn diagonal_table_is_one_hot_and_exact() {
        let ds = rows(&[("a", "0", 3.0), ("b", "1", 2.0), ("c", "2", 1.0)]);
        let p = ProportionalPredictor::fit(&ds, &[0], 1, 5).unwrap();
        assert_eq!(p.conditional(&["b"]).unwrap(), &[0.0, 1.0, 0.0]);
        let cm = p.predict_and_score(&ds, &Sequential).unwrap();
        assert_eq!(cm.total(), 6);
        assert_eq!(cm.counts(), &[3, 0, 0, 0, 2, 0, 0, 0, 1]);
        assert_eq!(cm.accuracy(), 1.0);
        assert_eq!(cm.row_normalized()[2], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn first_row_conditional() {
        let p = ProportionalPredictor::fit(&v6_by_v4(), &[0], 1, 0).unwrap();
        let c = p.conditional(&["1"]).unwrap();
        let want = [16.0 / 17.0, 1.0 / 17.0, 0.0, 0.0, 0.0, 0.0];
        for (a, b) in c.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        for (_, v) in p.conditionals.iter() {
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unseen_scenario_uses_fallback() {
        let train = rows(&[("a", "0", 1.0), ("a", "1", 1.0), ("b", "1", 2.0)]);
        let p = ProportionalPredictor::fit(&train, &[0], 1, 1).unwrap();
        assert!(p.conditional(&["z"]).is_none());
        assert_eq!(p.fallback(), &[0.25, 0.75]);
        let test = rows(&[("z", "1", 400.0)]);
        let cm = p.predict_and_score(&test, &Sequential).unwrap();
        let frac = cm.count(1, 0) as f64 / 400.0;
        assert!((frac - 0.25).abs() < 0.08, "{frac}");
    }

    #[test]
    fn labels_not_codes_drive_matching() {
        let train = rows(&[("a", "0", 1.0), ("b", "1", 1.0)]);
        // reversed first-appearance order in the test data
        let test = rows(&[("b", "1", 1.0), ("a", "0", 1.0)]);
        let p = ProportionalPredictor::fit(&train, &[0], 1, 9).unwrap();
        let cm = p.predict_and_score(&test, &Sequential).unwrap();
        assert_eq!(cm.counts(), &[1, 0, 0, 1]);
    }

    #[test]
    fn seeded_runs_repeat() {
        let ds = v6_by_v4().expand_to_unit_rows().unwrap();
        let p = ProportionalPredictor::fit(&ds, &[0], 1, 42).unwrap();
        let a = p.predict_and_score(&ds, &Sequential).unwrap();
        let b = p.predict_and_score(&ds, &Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total() as usize, ds.n_rows());
    }

    #[test]
    fn errors() {
        let train = rows(&[("a", "0", 1.0), ("b", "0", 1.0)]);
        assert_eq!(
            ProportionalPredictor::fit(&train, &[0], 1, 0).unwrap_err(),
            Error::DegenerateResponse
        );
        let train = rows(&[("a", "0", 1.0), ("b", "1", 1.0)]);
        let p = ProportionalPredictor::fit(&train, &[0], 1, 0).unwrap();
        let test = rows(&[("a", "7", 1.0)]);
        assert_eq!(
            p.predict_and_score(&test, &Sequential).unwrap_err(),
            Error::UnseenResponseLevel("7".into())
        );
        let other =
            CategoricalDataset::from_scenarios(&["W", "Y"], [(vec!["a", "0"], 1.0)]).unwrap();
        assert_eq!(
            p.predict_and_score(&other, &Sequential).unwrap_err(),
            Error::MissingTestVariable("X".into())
        );
    }

    #[test]
    fn independence_accuracy_is_marginal() {
        let t = ContingencyTable::from_rows(&[[2.0, 6.0], [1.0, 3.0]]).unwrap();
        let g = expected_confusion(&t).unwrap();
        let acc = g.expected_accuracy();
        assert!((acc[0] - 0.25).abs() < 1e-12 && (acc[1] - 0.75).abs() < 1e-12);
    }
}
