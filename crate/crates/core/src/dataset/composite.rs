use alloc::vec;
use alloc::vec::Vec;

use super::CategoricalDataset;
use crate::{Error, Result};

/// Several variables viewed as one categorical variable whose levels are the
/// observed joint tuples.
///
/// Codes enumerate only tuples that occur with positive mass, in
/// lexicographic order of the member level codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeVariable {
    members: Vec<usize>,
    codes: Vec<u32>,
    tuples: Vec<Vec<u32>>,
}

impl CompositeVariable {
    pub(crate) fn build(dataset: &CategoricalDataset, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        let mut members = indices.to_vec();
        members.sort_unstable();
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(Error::RepeatedIndex(w[0]));
            }
        }
        if let Some(&bad) = members.iter().find(|&&m| m >= dataset.n_variables()) {
            return Err(Error::UnknownVariable(bad));
        }

        let n = dataset.n_rows();
        let mut codes = vec![0u32; n];
        let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
        for &m in &members {
            let radix = dataset.variable(m).cardinality() as u64;
            let column = dataset.column(m);
            let keys: Vec<u64> = codes
                .iter()
                .zip(column)
                .map(|(&prev, &c)| u64::from(prev) * radix + u64::from(c))
                .collect();
            let (remap, observed) = dense_rank(&keys, tuples.len() as u64 * radix);
            for (code, key) in codes.iter_mut().zip(&keys) {
                *code = remap(*key);
            }
            tuples = observed
                .iter()
                .map(|&key| {
                    let mut t = tuples[(key / radix) as usize].clone();
                    t.push((key % radix) as u32);
                    t
                })
                .collect();
        }
        Ok(Self {
            members,
            codes,
            tuples,
        })
    }

    /// Member variable indices, strictly increasing.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Per-row scenario code.
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn observed_cardinality(&self) -> usize {
        self.tuples.len()
    }

    /// Member level codes of one scenario.
    pub fn tuple(&self, code: usize) -> &[u32] {
        &self.tuples[code]
    }

    pub fn tuples(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    pub fn contains(&self, variable: usize) -> bool {
        self.members.binary_search(&variable).is_ok()
    }

    /// Mass of every scenario, indexed by code.
    pub fn scenario_masses(&self, dataset: &CategoricalDataset) -> Vec<f64> {
        let mut out = vec![0.0; self.tuples.len()];
        for (&c, &m) in self.codes.iter().zip(dataset.mass()) {
            out[c as usize] += m;
        }
        out
    }
}

/// Maps keys in `[0, range)` to dense ranks in ascending key order.
fn dense_rank(keys: &[u64], range: u64) -> (impl Fn(u64) -> u32, Vec<u64>) {
    let use_table = range <= (4 * keys.len() as u64).max(1 << 16);
    let mut observed: Vec<u64>;
    let mut table: Vec<u32> = Vec::new();
    if use_table {
        let mut seen = vec![false; range as usize];
        for &k in keys {
            seen[k as usize] = true;
        }
        table = vec![u32::MAX; range as usize];
        observed = Vec::new();
        for (k, &hit) in seen.iter().enumerate() {
            if hit {
                table[k] = observed.len() as u32;
                observed.push(k as u64);
            }
        }
    } else {
        observed = keys.to_vec();
        observed.sort_unstable();
        observed.dedup();
    }
    let sorted = if use_table {
        Vec::new()
    } else {
        observed.clone()
    };
    let lookup = move |k: u64| -> u32 {
        if use_table {
            table[k as usize]
        } else {
            sorted.binary_search(&k).expect("key observed") as u32
        }
    };
    (lookup, observed)
}
