//! Column-encoded categorical data.
//!
//! Every variable stores dense level codes; every row carries a non-negative
//! mass so that counts, probabilities and exact scenario tables are all the
//! same kind of input.

mod composite;
mod table;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use composite::CompositeVariable;
pub use table::ContingencyTable;

use crate::{Error, Result};

/// Name and ordered level labels of one categorical variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableMeta {
    name: String,
    levels: Vec<String>,
    index: BTreeMap<String, u32>,
}

impl VariableMeta {
    pub fn new(name: impl Into<String>, levels: Vec<String>) -> Result<Self> {
        let name = name.into();
        if levels.is_empty() {
            return Err(Error::InvalidConfig("a variable needs at least one level"));
        }
        let mut index = BTreeMap::new();
        for (i, level) in levels.iter().enumerate() {
            if index.insert(level.clone(), i as u32).is_some() {
                return Err(Error::DuplicateName(level.clone()));
            }
        }
        Ok(Self {
            name,
            levels,
            index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn level(&self, code: usize) -> &str {
        &self.levels[code]
    }

    pub fn cardinality(&self) -> usize {
        self.levels.len()
    }

    pub fn code_of(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }
}

/// How a designated missing-value token is treated during ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// The token becomes its own level, appended after all observed labels.
    #[default]
    OwnCategory,
    /// Rows containing the token are excluded.
    DropRow,
}

/// Immutable categorical table: one code column per variable plus row masses.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalDataset {
    variables: Vec<VariableMeta>,
    columns: Vec<Vec<u32>>,
    mass: Vec<f64>,
    total_mass: f64,
    unit_mass: bool,
}

impl CategoricalDataset {
    /// Validates and wraps pre-encoded columns. `mass` defaults to 1 per row.
    pub fn new(
        variables: Vec<VariableMeta>,
        columns: Vec<Vec<u32>>,
        mass: Option<Vec<f64>>,
    ) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::NoVariables);
        }
        if columns.len() != variables.len() {
            return Err(Error::RaggedColumns);
        }
        let mut names = BTreeMap::new();
        for v in &variables {
            if names.insert(v.name(), ()).is_some() {
                return Err(Error::DuplicateName(v.name().to_string()));
            }
        }
        let n = columns[0].len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::RaggedColumns);
        }
        for (v, col) in variables.iter().zip(&columns) {
            if let Some(&code) = col.iter().find(|&&c| c as usize >= v.cardinality()) {
                return Err(Error::CodeOutOfRange {
                    variable: v.name().to_string(),
                    code,
                    cardinality: v.cardinality(),
                });
            }
        }
        let mass = match mass {
            Some(m) if m.len() != n => return Err(Error::RaggedColumns),
            Some(m) => m,
            None => vec![1.0; n],
        };
        if let Some(&bad) = mass.iter().find(|m| !m.is_finite() || **m <= 0.0) {
            return Err(Error::InvalidMass(bad));
        }
        let total_mass: f64 = mass.iter().sum();
        if total_mass <= 0.0 {
            return Err(Error::EmptyMass);
        }
        let unit_mass = mass.iter().all(|&m| m == 1.0);
        Ok(Self {
            variables,
            columns,
            mass,
            total_mass,
            unit_mass,
        })
    }

    /// Builds a dataset whose empirical distribution is exactly the given
    /// scenario masses. Duplicate tuples are merged by summing their mass.
    /// Levels appear in input order.
    pub fn from_scenarios<N, L, I>(names: &[N], scenarios: I) -> Result<Self>
    where
        N: AsRef<str>,
        L: AsRef<str>,
        I: IntoIterator<Item = (Vec<L>, f64)>,
    {
        let mut builder = DatasetBuilder::new(names)?;
        let mut seen: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        let mut rows: Vec<(Vec<u32>, f64)> = Vec::new();
        for (labels, mass) in scenarios {
            if !mass.is_finite() || mass <= 0.0 {
                return Err(Error::InvalidMass(mass));
            }
            let codes = builder.encode(&labels)?;
            match seen.get(&codes) {
                Some(&r) => rows[r].1 += mass,
                None => {
                    seen.insert(codes.clone(), rows.len());
                    rows.push((codes, mass));
                }
            }
        }
        for (codes, mass) in rows {
            builder.push_codes(codes, mass);
        }
        builder.finish()
    }

    pub fn n_rows(&self) -> usize {
        self.mass.len()
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[VariableMeta] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &VariableMeta {
        &self.variables[index]
    }

    pub fn column(&self, index: usize) -> &[u32] {
        &self.columns[index]
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// True when every row has mass exactly 1.
    pub fn is_unit_mass(&self) -> bool {
        self.unit_mass
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    /// Total mass per level of one variable.
    pub fn level_masses(&self, variable: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.variables[variable].cardinality()];
        for (&c, &m) in self.columns[variable].iter().zip(&self.mass) {
            out[c as usize] += m;
        }
        out
    }

    /// New dataset with the given rows (repetition allowed), sharing the level
    /// dictionaries.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMass);
        }
        let columns = self
            .columns
            .iter()
            .map(|col| rows.iter().map(|&r| col[r]).collect())
            .collect();
        let mass: Vec<f64> = rows.iter().map(|&r| self.mass[r]).collect();
        let total_mass = mass.iter().sum();
        Ok(Self {
            variables: self.variables.clone(),
            columns,
            unit_mass: self.unit_mass || mass.iter().all(|&m| m == 1.0),
            mass,
            total_mass,
        })
    }

    /// Repeats each row `mass` times with unit mass. Masses must be integral.
    pub fn expand_to_unit_rows(&self) -> Result<Self> {
        let mut rows = Vec::new();
        for (r, &m) in self.mass.iter().enumerate() {
            let k = m as u64;
            if k as f64 != m {
                return Err(Error::NonIntegralMass);
            }
            rows.extend(core::iter::repeat_n(r, k as usize));
        }
        let mut out = self.select_rows(&rows)?;
        out.mass.iter_mut().for_each(|m| *m = 1.0);
        out.total_mass = out.mass.len() as f64;
        out.unit_mass = true;
        Ok(out)
    }

    /// Seeded random partition into `(first, second)` with the first part
    /// holding `round(fraction · n)` rows. Both parts keep original row order.
    pub fn split(&self, fraction: f64, seed: u64) -> Result<(Self, Self)> {
        if !self.unit_mass {
            return Err(Error::WeightedRows);
        }
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::InvalidFraction(fraction));
        }
        let n = self.n_rows();
        let take = (fraction * n as f64 + 0.5) as usize;
        if take == 0 || take >= n {
            return Err(Error::InvalidFraction(fraction));
        }
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let (a, b) = order.split_at_mut(take);
        a.sort_unstable();
        b.sort_unstable();
        Ok((self.select_rows(a)?, self.select_rows(b)?))
    }

    /// Joint scenario index of the given variables.
    pub fn compose(&self, indices: &[usize]) -> Result<CompositeVariable> {
        CompositeVariable::build(self, indices)
    }

    /// Mass table of composite `x` against response variable `y`.
    pub fn contingency(&self, x: &CompositeVariable, y: usize) -> Result<ContingencyTable> {
        self.contingency_range(x, y, 0..self.n_rows())
    }

    /// Partial table over a row range; partial tables merge to the full one.
    pub fn contingency_range(
        &self,
        x: &CompositeVariable,
        y: usize,
        rows: Range<usize>,
    ) -> Result<ContingencyTable> {
        if y >= self.n_variables() {
            return Err(Error::UnknownVariable(y));
        }
        if x.contains(y) {
            return Err(Error::Overlap(y));
        }
        let mut table =
            ContingencyTable::zeros(x.observed_cardinality(), self.variables[y].cardinality());
        let ycol = &self.columns[y];
        let xcodes = x.codes();
        for r in rows {
            table.add(xcodes[r] as usize, ycol[r] as usize, self.mass[r]);
        }
        table.refresh_marginals();
        Ok(table)
    }

    /// Mass table between two composites; the second plays the response.
    /// Members may overlap.
    pub fn joint_table(&self, x: &CompositeVariable, y: &CompositeVariable) -> ContingencyTable {
        let mut table = ContingencyTable::zeros(x.observed_cardinality(), y.observed_cardinality());
        for ((&a, &b), &m) in x.codes().iter().zip(y.codes()).zip(&self.mass) {
            table.add(a as usize, b as usize, m);
        }
        table.refresh_marginals();
        table
    }
}

/// Incrementally encodes labelled records into a [`CategoricalDataset`].
///
/// Labels receive codes in first-appearance order. Rows with zero mass are
/// skipped.
#[derive(Debug, Clone)]
pub struct DatasetBuilder {
    names: Vec<String>,
    levels: Vec<Vec<String>>,
    lookup: Vec<BTreeMap<String, u32>>,
    columns: Vec<Vec<u32>>,
    mass: Vec<f64>,
    missing: Option<(String, MissingPolicy)>,
    dropped_rows: usize,
    dropped_mass: f64,
}

const MISSING_CODE: u32 = u32::MAX;

impl DatasetBuilder {
    pub fn new<N: AsRef<str>>(names: &[N]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::NoVariables);
        }
        let mut seen = BTreeMap::new();
        for n in names {
            if seen.insert(n.as_ref(), ()).is_some() {
                return Err(Error::DuplicateName(n.as_ref().to_string()));
            }
        }
        let k = names.len();
        Ok(Self {
            names: names.iter().map(|n| n.as_ref().to_string()).collect(),
            levels: vec![Vec::new(); k],
            lookup: vec![BTreeMap::new(); k],
            columns: vec![Vec::new(); k],
            mass: Vec::new(),
            missing: None,
            dropped_rows: 0,
            dropped_mass: 0.0,
        })
    }

    pub fn with_missing(mut self, token: impl Into<String>, policy: MissingPolicy) -> Self {
        self.missing = Some((token.into(), policy));
        self
    }

    fn encode<L: AsRef<str>>(&mut self, labels: &[L]) -> Result<Vec<u32>> {
        if labels.len() != self.names.len() {
            return Err(Error::Arity {
                expected: self.names.len(),
                found: labels.len(),
            });
        }
        let mut codes = Vec::with_capacity(labels.len());
        for (v, label) in labels.iter().enumerate() {
            let label = label.as_ref();
            if matches!(&self.missing, Some((tok, _)) if tok == label) {
                codes.push(MISSING_CODE);
                continue;
            }
            let code = match self.lookup[v].get(label) {
                Some(&c) => c,
                None => {
                    let c = self.levels[v].len() as u32;
                    self.levels[v].push(label.to_string());
                    self.lookup[v].insert(label.to_string(), c);
                    c
                }
            };
            codes.push(code);
        }
        Ok(codes)
    }

    fn push_codes(&mut self, codes: Vec<u32>, mass: f64) {
        for (col, c) in self.columns.iter_mut().zip(codes) {
            col.push(c);
        }
        self.mass.push(mass);
    }

    /// Adds one record. Returns `false` when the row was dropped (zero mass
    /// or a missing token under [`MissingPolicy::DropRow`]).
    pub fn push<L: AsRef<str>>(&mut self, labels: &[L], mass: f64) -> Result<bool> {
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::InvalidMass(mass));
        }
        if labels.len() != self.names.len() {
            return Err(Error::Arity {
                expected: self.names.len(),
                found: labels.len(),
            });
        }
        if mass == 0.0 {
            self.dropped_rows += 1;
            return Ok(false);
        }
        if let Some((tok, MissingPolicy::DropRow)) = &self.missing {
            if labels.iter().any(|l| l.as_ref() == tok) {
                self.dropped_rows += 1;
                self.dropped_mass += mass;
                return Ok(false);
            }
        }
        let codes = self.encode(labels)?;
        self.push_codes(codes, mass);
        Ok(true)
    }

    /// Rows dropped so far and their mass.
    pub fn dropped(&self) -> (usize, f64) {
        (self.dropped_rows, self.dropped_mass)
    }

    pub fn finish(mut self) -> Result<CategoricalDataset> {
        if self.mass.is_empty() {
            return Err(Error::EmptyMass);
        }
        let token = self.missing.as_ref().map(|(t, _)| t.clone());
        let mut variables = Vec::with_capacity(self.names.len());
        for (v, name) in self.names.iter().enumerate() {
            let col = &mut self.columns[v];
            if col.contains(&MISSING_CODE) {
                let na = self.levels[v].len() as u32;
                for c in col.iter_mut().filter(|c| **c == MISSING_CODE) {
                    *c = na;
                }
                self.levels[v].push(token.clone().unwrap_or_default());
            }
            variables.push(VariableMeta::new(
                name.clone(),
                core::mem::take(&mut self.levels[v]),
            )?);
        }
        CategoricalDataset::new(variables, self.columns, Some(self.mass))
    }
}
