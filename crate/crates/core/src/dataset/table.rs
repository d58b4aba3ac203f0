use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Joint mass table between an explanatory scenario index (rows) and a
/// response (columns), with cached marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    x_levels: usize,
    y_levels: usize,
    mass: Vec<f64>,
    x_marginal: Vec<f64>,
    y_marginal: Vec<f64>,
    total: f64,
}

impl ContingencyTable {
    /// Builds a table from a row-major `x_levels × y_levels` mass array.
    pub fn from_matrix(x_levels: usize, y_levels: usize, mass: Vec<f64>) -> Result<Self> {
        if x_levels == 0 || y_levels == 0 {
            return Err(Error::EmptyIndexSet);
        }
        if mass.len() != x_levels * y_levels {
            return Err(Error::DimensionMismatch {
                expected: x_levels * y_levels,
                found: mass.len(),
            });
        }
        if let Some(&bad) = mass.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::InvalidMass(bad));
        }
        let mut table = Self {
            x_levels,
            y_levels,
            mass,
            x_marginal: vec![0.0; x_levels],
            y_marginal: vec![0.0; y_levels],
            total: 0.0,
        };
        table.refresh_marginals();
        if table.total <= 0.0 {
            return Err(Error::EmptyMass);
        }
        Ok(table)
    }

    /// Builds a table from nested rows, one inner slice per explanatory level.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let y_levels = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut mass = Vec::with_capacity(rows.len() * y_levels);
        for row in rows {
            let row = row.as_ref();
            if row.len() != y_levels {
                return Err(Error::Arity {
                    expected: y_levels,
                    found: row.len(),
                });
            }
            mass.extend_from_slice(row);
        }
        Self::from_matrix(rows.len(), y_levels, mass)
    }

    /// Zero table, used as an accumulator.
    pub(crate) fn zeros(x_levels: usize, y_levels: usize) -> Self {
        Self {
            x_levels,
            y_levels,
            mass: vec![0.0; x_levels * y_levels],
            x_marginal: vec![0.0; x_levels],
            y_marginal: vec![0.0; y_levels],
            total: 0.0,
        }
    }

    pub(crate) fn add(&mut self, x: usize, y: usize, mass: f64) {
        self.mass[x * self.y_levels + y] += mass;
    }

    pub(crate) fn refresh_marginals(&mut self) {
        for m in self.x_marginal.iter_mut() {
            *m = 0.0;
        }
        for m in self.y_marginal.iter_mut() {
            *m = 0.0;
        }
        for i in 0..self.x_levels {
            for s in 0..self.y_levels {
                let v = self.mass[i * self.y_levels + s];
                self.x_marginal[i] += v;
                self.y_marginal[s] += v;
            }
        }
        self.total = self.x_marginal.iter().sum();
    }

    /// Adds another table with identical shape cell by cell.
    pub fn merge(&mut self, other: &ContingencyTable) -> Result<()> {
        if other.x_levels != self.x_levels || other.y_levels != self.y_levels {
            return Err(Error::DimensionMismatch {
                expected: self.mass.len(),
                found: other.mass.len(),
            });
        }
        for (a, b) in self.mass.iter_mut().zip(&other.mass) {
            *a += *b;
        }
        self.refresh_marginals();
        Ok(())
    }

    pub fn x_levels(&self) -> usize {
        self.x_levels
    }

    pub fn y_levels(&self) -> usize {
        self.y_levels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.mass[x * self.y_levels + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.mass[x * self.y_levels..(x + 1) * self.y_levels]
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn x_marginal(&self) -> &[f64] {
        &self.x_marginal
    }

    pub fn y_marginal(&self) -> &[f64] {
        &self.y_marginal
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Response distribution `p(Y)`.
    pub fn y_probabilities(&self) -> Vec<f64> {
        self.y_marginal.iter().map(|m| m / self.total).collect()
    }

    /// Swaps the roles of the two variables.
    pub fn transpose(&self) -> ContingencyTable {
        let mut mass = Vec::with_capacity(self.mass.len());
        for s in 0..self.y_levels {
            for i in 0..self.x_levels {
                mass.push(self.get(i, s));
            }
        }
        let mut t = Self {
            x_levels: self.y_levels,
            y_levels: self.x_levels,
            mass,
            x_marginal: Vec::new(),
            y_marginal: Vec::new(),
            total: 0.0,
        };
        t.x_marginal = vec![0.0; t.x_levels];
        t.y_marginal = vec![0.0; t.y_levels];
        t.refresh_marginals();
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginals_and_total() {
        let t = ContingencyTable::from_rows(&[[11.0, 2.0, 52.0], [306.0, 24.0, 255.0]]).unwrap();
        assert_eq!(t.x_marginal(), &[65.0, 585.0]);
        assert_eq!(t.y_marginal(), &[317.0, 26.0, 307.0]);
        assert_eq!(t.total(), 650.0);
        let tt = t.transpose();
        assert_eq!(tt.x_marginal(), t.y_marginal());
        assert_eq!(tt.get(2, 1), 255.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            ContingencyTable::from_rows(&[[1.0, -1.0]]),
            Err(Error::InvalidMass(_))
        ));
        assert_eq!(
            ContingencyTable::from_rows(&[[0.0, 0.0]]),
            Err(Error::EmptyMass)
        );
        assert!(ContingencyTable::from_rows::<[f64; 2]>(&[]).is_err());
    }

    #[test]
    fn merge_adds_cells() {
        let mut a = ContingencyTable::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let b = ContingencyTable::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        a.merge(&b).unwrap();
        assert_eq!(a.mass(), &[2.0, 2.0, 3.0, 5.0]);
        assert_eq!(a.total(), 12.0);
    }
}
