use catassoc_core::association::{weights_gk, MarginalStats};
use catassoc_core::equivalence::{hierarchy_scan, Relation};
use catassoc_core::{
    expected_concentration, gamma_matrix, gk_tau, tau, tau_alpha, theta_vector, CategoricalDataset,
    ContingencyTable, WeightScheme, WeightVector,
};
use proptest::prelude::*;

const CASES: u32 = 256;

fn table_strategy() -> impl Strategy<Value = ContingencyTable> {
    (1usize..=6, 2usize..=6)
        .prop_flat_map(|(nx, ny)| {
            prop::collection::vec(prop_oneof![2 => Just(0u32), 5 => 1u32..20], nx * ny)
                .prop_map(move |cells| (nx, ny, cells))
        })
        .prop_filter("needs two response levels", |(nx, ny, cells)| {
            (0..*ny)
                .filter(|&s| (0..*nx).any(|i| cells[i * ny + s] > 0))
                .count()
                >= 2
        })
        .prop_map(|(nx, ny, cells)| {
            ContingencyTable::from_matrix(nx, ny, cells.into_iter().map(f64::from).collect())
                .unwrap()
        })
}

/// Rows of `n` small-integer variables, each row with mass 1..4.
fn dataset_strategy(vars: usize) -> impl Strategy<Value = CategoricalDataset> {
    prop::collection::vec((prop::collection::vec(0u8..4, vars), 1u32..4), 2..40).prop_map(
        move |rows| {
            let names: Vec<String> = (0..vars).map(|v| format!("V{v}")).collect();
            CategoricalDataset::from_scenarios(
                &names,
                rows.into_iter().map(|(r, m)| {
                    (
                        r.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        f64::from(m),
                    )
                }),
            )
            .unwrap()
        },
    )
}

fn is_deterministic(t: &ContingencyTable) -> bool {
    (0..t.x_levels()).all(|i| t.row(i).iter().filter(|&&m| m > 0.0).count() <= 1)
}

fn is_independent(t: &ContingencyTable) -> bool {
    let n = t.total();
    (0..t.x_levels()).all(|i| {
        (0..t.y_levels()).all(|s| {
            let joint = t.get(i, s) / n;
            (joint - t.x_marginal()[i] / n * t.y_marginal()[s] / n).abs() < 1e-12
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn gamma_is_row_stochastic(t in table_strategy()) {
        let g = gamma_matrix(&t).unwrap();
        for s in 0..g.size() {
            prop_assert!((g.row(s).iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(g.row(s).iter().all(|&v| v >= -1e-15));
        }
    }

    #[test]
    fn identity_gamma_iff_deterministic(t in table_strategy()) {
        let g = gamma_matrix(&t).unwrap();
        let identity = (0..g.size())
            .all(|s| (0..g.size()).all(|u| (g.get(s, u) - f64::from(u8::from(s == u))).abs() < 1e-12));
        prop_assert_eq!(identity, is_deterministic(&t));
    }

    #[test]
    fn constructed_deterministic_table_gives_identity(
        map in prop::collection::vec(0usize..4, 2..7),
        weights in prop::collection::vec(1u32..9, 7),
    ) {
        prop_assume!(map.iter().collect::<std::collections::BTreeSet<_>>().len() >= 2);
        let mut cells = vec![0.0; map.len() * 4];
        for (i, &s) in map.iter().enumerate() {
            cells[i * 4 + s] = f64::from(weights[i]);
        }
        let t = ContingencyTable::from_matrix(map.len(), 4, cells).unwrap();
        let g = gamma_matrix(&t).unwrap();
        for s in 0..g.size() {
            prop_assert!((g.get(s, s) - 1.0).abs() < 1e-12);
        }
        for scheme in [WeightScheme::GoodmanKruskal, WeightScheme::Equal, WeightScheme::InverseProbability] {
            prop_assert!((tau(&t, &scheme).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_rows_iff_independent(t in table_strategy()) {
        let g = gamma_matrix(&t).unwrap();
        let p = g.y_marginal().to_vec();
        let marginal_rows = (0..g.size()).all(|s| (0..g.size()).all(|u| (g.get(s, u) - p[u]).abs() < 1e-12));
        prop_assert_eq!(marginal_rows, is_independent(&t));
    }

    #[test]
    fn outer_product_gives_marginal_rows(
        px in prop::collection::vec(1u32..9, 1..6),
        py in prop::collection::vec(1u32..9, 2..6),
    ) {
        let cells = px.iter().flat_map(|&a| py.iter().map(move |&b| f64::from(a * b))).collect();
        let t = ContingencyTable::from_matrix(px.len(), py.len(), cells).unwrap();
        let g = gamma_matrix(&t).unwrap();
        for s in 0..g.size() {
            for u in 0..g.size() {
                prop_assert!((g.get(s, u) - g.y_marginal()[u]).abs() < 1e-12);
            }
        }
        prop_assert!(tau(&t, &WeightScheme::Equal).unwrap().abs() < 1e-12);
    }

    #[test]
    fn diagonal_identity(t in table_strategy()) {
        let g = gamma_matrix(&t).unwrap();
        let theta = theta_vector(&t).unwrap();
        for (k, &s) in theta.levels().iter().enumerate() {
            let pos = g.levels().iter().position(|&l| l == s).unwrap();
            let p = g.y_marginal()[pos];
            let lhs = g.get(pos, pos);
            prop_assert!((lhs - ((1.0 - p) * theta.components()[k] + p)).abs() < 1e-12);
        }
    }

    #[test]
    fn gk_tau_is_tau_under_gk_weights(t in table_strategy()) {
        let direct = gk_tau(&t).unwrap();
        let theta = theta_vector(&t).unwrap();
        let alpha = weights_gk(&MarginalStats::from_probabilities(theta.renormalized_marginal()).unwrap()).unwrap();
        prop_assert!((direct - tau_alpha(&theta, &alpha).unwrap()).abs() < 1e-12);
        prop_assert!((direct - tau(&t, &WeightScheme::GoodmanKruskal).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn adding_variables_never_lowers_tau(ds in dataset_strategy(3)) {
        prop_assume!(ds.level_masses(0).iter().filter(|&&m| m > 0.0).count() >= 2);
        let small = ds.contingency(&ds.compose(&[1]).unwrap(), 0).unwrap();
        let large = ds.contingency(&ds.compose(&[1, 2]).unwrap(), 0).unwrap();
        for scheme in [WeightScheme::GoodmanKruskal, WeightScheme::Equal, WeightScheme::InverseProbability] {
            prop_assert!(tau(&large, &scheme).unwrap() >= tau(&small, &scheme).unwrap() - 1e-12);
        }
        let theta_small = theta_vector(&small).unwrap();
        let theta_large = theta_vector(&large).unwrap();
        for (a, b) in theta_small.components().iter().zip(theta_large.components()) {
            prop_assert!(*b >= *a - 1e-12);
        }
    }

    #[test]
    fn binary_response_collapses(
        rows in prop::collection::vec((1u32..20, 1u32..20), 1..6),
        w in 0.0f64..=1.0,
    ) {
        let cells = rows.iter().flat_map(|&(a, b)| [f64::from(a), f64::from(b)]).collect();
        let t = ContingencyTable::from_matrix(rows.len(), 2, cells).unwrap();
        let theta = theta_vector(&t).unwrap();
        let c = theta.components();
        prop_assert!((c[0] - c[1]).abs() < 1e-12);
        let alpha = WeightVector::new(vec![w, 1.0 - w]).unwrap();
        prop_assert!((tau_alpha(&theta, &alpha).unwrap() - c[0]).abs() < 1e-12);
    }

    #[test]
    fn concentration_chain(ds in dataset_strategy(3)) {
        let ep_x = expected_concentration(&ds, &[1, 2]).unwrap();
        let ep_xy = expected_concentration(&ds, &[0, 1, 2]).unwrap();
        let cells = ds.compose(&[0, 1, 2]).unwrap().observed_cardinality() as f64;
        prop_assert!(ep_x >= ep_xy - 1e-12);
        prop_assert!(ep_xy >= 1.0 / cells - 1e-12);
    }

    #[test]
    fn hierarchy_is_monotone(
        ds in dataset_strategy(3),
        relabel in prop::bool::ANY,
    ) {
        prop_assume!(ds.level_masses(0).iter().filter(|&&m| m > 0.0).count() >= 2);
        // optionally replace V2 by a relabeling of V1 so stronger relations occur
        let ds = if relabel {
            let names = ["V0", "V1", "V2"];
            let rows: Vec<(Vec<String>, f64)> = (0..ds.n_rows())
                .map(|r| {
                    let v0 = ds.variable(0).level(ds.column(0)[r] as usize).to_string();
                    let v1 = ds.variable(1).level(ds.column(1)[r] as usize).to_string();
                    (vec![v0, v1.clone(), format!("r{v1}")], ds.mass()[r])
                })
                .collect();
            CategoricalDataset::from_scenarios(&names, rows).unwrap()
        } else {
            ds
        };
        for scheme in [WeightScheme::GoodmanKruskal, WeightScheme::Equal] {
            let scan = hierarchy_scan(&ds, &[1], &[2], 0, &scheme, 1e-9).unwrap();
            prop_assert!(scan.inconsistencies.is_empty(), "{:?}", scan);
            if relabel {
                prop_assert!(scan.holds(Relation::E2Prime) && scan.holds(Relation::E3));
            }
        }
    }
}
