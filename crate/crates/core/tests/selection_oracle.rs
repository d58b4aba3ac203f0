//! Greedy bases checked against exhaustive enumeration on random data.

use catassoc_core::selection::{determination_degree, verify_basis};
use catassoc_core::{
    select_structural, select_supervised, tau, CategoricalDataset, SelectionConfig, Sequential,
    WeightScheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DATASETS: u64 = 50;

/// `Y` depends on a random subset of up to five candidates, with noise.
fn random_dataset(seed: u64) -> (CategoricalDataset, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(2..=5);
    let cards: Vec<u32> = (0..k).map(|_| rng.random_range(2..=4)).collect();
    let drivers: Vec<bool> = (0..k).map(|_| rng.random_bool(0.5)).collect();
    let noise = rng.random_range(0.0..0.4);
    let n = rng.random_range(30..120);
    let mut names = vec!["Y".to_string()];
    names.extend((1..=k).map(|v| format!("X{v}")));
    let rows = (0..n).map(|_| {
        let xs: Vec<u32> = cards.iter().map(|&c| rng.random_range(0..c)).collect();
        let signal: u32 = xs
            .iter()
            .zip(&drivers)
            .filter(|(_, &d)| d)
            .map(|(x, _)| x)
            .sum();
        let y = if rng.random_bool(noise) {
            rng.random_range(0..3)
        } else {
            signal % 3
        };
        let mut row = vec![y.to_string()];
        row.extend(xs.iter().map(u32::to_string));
        (row, 1.0)
    });
    let ds = CategoricalDataset::from_scenarios(&names, rows).unwrap();
    (ds, (1..=k).collect())
}

fn subsets(items: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1u32..(1 << items.len())).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    })
}

#[test]
fn supervised_basis_attains_full_tau() {
    let config = SelectionConfig::default();
    let gk = WeightScheme::GoodmanKruskal;
    let mut checked = 0;
    for seed in 0..DATASETS {
        let (ds, candidates) = random_dataset(seed);
        if ds.level_masses(0).iter().filter(|&&m| m > 0.0).count() < 2 {
            continue;
        }
        let brute = subsets(&candidates)
            .map(|s| tau(&ds.contingency(&ds.compose(&s).unwrap(), 0).unwrap(), &gk).unwrap())
            .fold(0.0f64, f64::max);
        let full = tau(
            &ds.contingency(&ds.compose(&candidates).unwrap(), 0)
                .unwrap(),
            &gk,
        )
        .unwrap();
        assert!(
            (brute - full).abs() < 1e-12,
            "seed {seed}: subset exceeds full set"
        );

        let result = select_supervised(&ds, 0, &candidates, &config, &Sequential).unwrap();
        assert!(
            (result.final_value - full).abs() <= config.epsilon,
            "seed {seed}: basis {:?} tau {} vs full {}",
            result.basis,
            result.final_value,
            full
        );
        let report = verify_basis(&ds, &result.basis, Some(0), &candidates, &config).unwrap();
        assert!(report.condition_holds("TB1"), "seed {seed}: {report:?}");
        checked += 1;
    }
    assert!(checked >= 45);
}

#[test]
fn structural_basis_determines_every_variable() {
    let config = SelectionConfig::default();
    for seed in 0..DATASETS {
        let (ds, _) = random_dataset(1000 + seed);
        let all: Vec<usize> = (0..ds.n_variables()).collect();
        let result = select_structural(&ds, &all, &config, &Sequential).unwrap();
        for &v in &all {
            let d =
                determination_degree(&ds, v, &result.basis, &WeightScheme::GoodmanKruskal).unwrap();
            assert!(
                (d - 1.0).abs() <= 1e-9,
                "seed {seed}: variable {v} degree {d}"
            );
        }
        let report = verify_basis(&ds, &result.basis, None, &all, &config).unwrap();
        assert!(report.holds(), "seed {seed}: {report:?}");
        // no smaller subset identifies every row scenario
        let rows = ds.compose(&all).unwrap().observed_cardinality();
        assert_eq!(
            ds.compose(&result.basis).unwrap().observed_cardinality(),
            rows
        );
    }
}
