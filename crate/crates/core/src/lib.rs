//! Proportional local-to-global association for categorical data.
//!
//! The central object is the association matrix `γ(Y|X)`: for a response
//! `Y` and an explanatory (possibly composite) variable `X`, entry `(s, t)` is
//! the probability that a proportional prediction of `Y` from `X` assigns
//! level `t` when the truth is level `s`. Its normalised diagonal is the
//! association vector `Θ`, and any simplex weighting of `Θ` gives a global
//! measure `τ_α`, with the Goodman-Kruskal τ as the special case
//! `α_s ∝ p_s(1 - p_s)`.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`dataset`] | column-encoded categorical data, composites, contingency tables |
//! | [`association`] | `γ`, `Θ`, `τ_α`, GK-τ, weight schemes, expected concentration |
//! | [`equivalence`] | the E-1 … E-5 relations between two explanatory variables |
//! | [`selection`] | supervised association bases and unsupervised structural bases |
//! | [`prediction`] | proportional prediction and empirical confusion matrices |
//! | [`resampling`] | stratified bootstrap percentile intervals |
//! | [`scenarios`] | the seeded two-test flu simulation |
//!
//! The crate is `no_std` and only needs `alloc`. Work that may be spread over
//! threads goes through the [`Executor`] trait; [`Sequential`] is provided here
//! and a thread-pool implementation lives in the `catassoc` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod association;
pub mod dataset;
pub mod equivalence;
mod error;
mod exec;
pub mod prediction;
pub mod resampling;
pub mod scenarios;
pub mod selection;

pub use association::{
    expected_concentration, gamma_matrix, gk_tau, tau, tau_alpha, theta_vector, AssociationMatrix,
    AssociationVector, MarginalStats, WeightScheme, WeightVector,
};
pub use dataset::{
    CategoricalDataset, CompositeVariable, ContingencyTable, DatasetBuilder, MissingPolicy,
    VariableMeta,
};
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use prediction::{ConfusionMatrix, ProportionalPredictor};
pub use resampling::{bootstrap, BootstrapConfig, BootstrapSummary, Statistic};
pub use selection::{select_structural, select_supervised, SelectionConfig, SelectionResult};
