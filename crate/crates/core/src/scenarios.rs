//! Seeded generators for the flu-test simulation.
//!
//! Two binary tests `X1`, `X2` are independent with `P(Xi = 1) = 1/4`; the
//! three-level response `Y` follows a conditional table given `(X1, X2)`.
//! `R3`, `R4` are noisy copies of `X1`, `X2` and `S5 = X1 · X2 · Z` with
//! `Z ~ Bernoulli(s5_prob)`.
//!
//! Sampling is chunked: chunk `c` uses ChaCha8 stream `c` of the seed and
//! consumes six uniforms per row, so the output does not depend on how chunks
//! are scheduled.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{CategoricalDataset, ContingencyTable, VariableMeta};
use crate::{Error, Executor, Result};

pub const FLU_COLUMNS: [&str; 6] = ["Y", "X1", "X2", "R3", "R4", "S5"];

pub const Y: usize = 0;
pub const X1: usize = 1;
pub const X2: usize = 2;
pub const R3: usize = 3;
pub const R4: usize = 4;
pub const S5: usize = 5;

const CHUNK: usize = 4096;
const P_TEST: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct FluScenarioConfig {
    pub n: usize,
    pub seed: u64,
    pub flip_prob: f64,
    pub s5_prob: f64,
    /// `R3 = 0` whenever `X1 = 0`; otherwise zeros also flip with
    /// `flip_prob`.
    pub one_sided_noise: bool,
    /// Exchange the conditionals of `(1,0)` and `(0,1)` so that `X1` is the
    /// more informative test.
    pub swap_test_roles: bool,
}

impl Default for FluScenarioConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            seed: 0,
            flip_prob: 0.10,
            s5_prob: 0.8,
            one_sided_noise: true,
            swap_test_roles: true,
        }
    }
}

impl FluScenarioConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        for p in [self.flip_prob, self.s5_prob] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::OutOfRange {
                    quantity: "probability",
                    value: p,
                });
            }
        }
        Ok(())
    }

    /// `P(Y = s | X1 = a, X2 = b)`.
    pub fn conditional(&self, a: u32, b: u32) -> [f64; 3] {
        let (a, b) = if self.swap_test_roles { (b, a) } else { (a, b) };
        match (a, b) {
            (0, 0) => [0.95, 0.05, 0.0],
            (1, 0) => [0.5, 0.5, 0.0],
            (0, 1) => [0.3, 0.7, 0.0],
            _ => [0.0, 0.05, 0.95],
        }
    }

    /// `P(R = 1 | X = x)` for the noisy copies.
    pub fn copy_prob(&self, x: u32) -> f64 {
        match (x, self.one_sided_noise) {
            (1, _) => 1.0 - self.flip_prob,
            (_, true) => 0.0,
            (_, false) => self.flip_prob,
        }
    }
}

fn bernoulli(u: f64, p: f64) -> u32 {
    u32::from(u < p)
}

fn variables() -> Vec<VariableMeta> {
    FLU_COLUMNS
        .iter()
        .map(|&name| {
            let levels: Vec<String> = if name == "Y" {
                vec!["0".into(), "1".into(), "2".into()]
            } else {
                vec!["0".into(), "1".into()]
            };
            VariableMeta::new(name.to_string(), levels).expect("static levels")
        })
        .collect()
}

fn sample_row(config: &FluScenarioConfig, u: [f64; 6]) -> [u32; 6] {
    let x1 = bernoulli(u[0], P_TEST);
    let x2 = bernoulli(u[1], P_TEST);
    let p = config.conditional(x1, x2);
    let y = if u[2] < p[0] {
        0
    } else if u[2] < p[0] + p[1] {
        1
    } else {
        2
    };
    let r3 = bernoulli(u[3], config.copy_prob(x1));
    let r4 = bernoulli(u[4], config.copy_prob(x2));
    let s5 = x1 & x2 & bernoulli(u[5], config.s5_prob);
    [y, x1, x2, r3, r4, s5]
}

/// Samples `n` unit-mass rows with columns `Y, X1, X2, R3, R4, S5`.
pub fn generate_flu<E: Executor>(
    config: &FluScenarioConfig,
    executor: &E,
) -> Result<CategoricalDataset> {
    config.validate()?;
    if config.n == 0 {
        return Err(Error::EmptyMass);
    }
    let chunks = config.n.div_ceil(CHUNK);
    let parts = executor.map_indexed(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(c as u64);
        let rows = CHUNK.min(config.n - c * CHUNK);
        (0..rows)
            .map(|_| sample_row(config, core::array::from_fn(|_| rng.random())))
            .collect::<Vec<_>>()
    });
    let mut columns = (0..6)
        .map(|_| Vec::with_capacity(config.n))
        .collect::<Vec<_>>();
    for row in parts.iter().flatten() {
        for (col, &code) in columns.iter_mut().zip(row) {
            col.push(code);
        }
    }
    CategoricalDataset::new(variables(), columns, None)
}

/// The exact joint distribution as a weighted dataset, one row per
/// positive-probability scenario.
pub fn flu_population_dataset(config: &FluScenarioConfig) -> Result<CategoricalDataset> {
    config.validate()?;
    let mut columns = vec![Vec::new(); 6];
    let mut mass = Vec::new();
    let px = |x: u32| if x == 1 { P_TEST } else { 1.0 - P_TEST };
    let pb = |v: u32, p: f64| if v == 1 { p } else { 1.0 - p };
    for x1 in 0..2 {
        for x2 in 0..2 {
            let cond = config.conditional(x1, x2);
            for (y, &py) in cond.iter().enumerate() {
                for r3 in 0..2 {
                    for r4 in 0..2 {
                        for s5 in 0..2 {
                            let ps5 = if x1 == 1 && x2 == 1 {
                                pb(s5, config.s5_prob)
                            } else {
                                f64::from(u8::from(s5 == 0))
                            };
                            let m = px(x1)
                                * px(x2)
                                * py
                                * pb(r3, config.copy_prob(x1))
                                * pb(r4, config.copy_prob(x2))
                                * ps5;
                            if m > 0.0 {
                                for (col, code) in
                                    columns.iter_mut().zip([y as u32, x1, x2, r3, r4, s5])
                                {
                                    col.push(code);
                                }
                                mass.push(m);
                            }
                        }
                    }
                }
            }
        }
    }
    CategoricalDataset::new(variables(), columns, Some(mass))
}

/// Exact population tables with `Y` as the column variable.
#[derive(Debug, Clone, PartialEq)]
pub struct FluPopulationTables {
    pub x1: ContingencyTable,
    pub x2: ContingencyTable,
    /// Rows are the observed `(X1, X2)` tuples in lexicographic order.
    pub x1_x2: ContingencyTable,
}

pub fn flu_population_tables(config: &FluScenarioConfig) -> Result<FluPopulationTables> {
    let ds = flu_population_dataset(config)?;
    let table = |given: &[usize]| ds.contingency(&ds.compose(given)?, Y);
    Ok(FluPopulationTables {
        x1: table(&[X1])?,
        x2: table(&[X2])?,
        x1_x2: table(&[X1, X2])?,
    })
}
