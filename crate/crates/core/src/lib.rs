//! Dependence structure learning with rank-based empirical copulas.
//!
//! Raw samples are reduced to per-column ranks ([`samples`]), from which the
//! empirical copula and its lattice cell masses are estimated
//! ([`empirical`]). Pairwise dependence measures derived from those grids
//! ([`measures`]) weight a complete graph whose maximum spanning tree is the
//! learned product-copula structure ([`structure`]). [`algebra`] and
//! [`synth`] provide evaluable copula densities and seeded synthetic data.

pub mod algebra;
pub mod empirical;
pub mod error;
pub mod measures;
pub mod normal;
pub mod samples;
pub mod structure;
pub mod synth;

pub use algebra::{
    push_margins, sample_gaussian_copula, CopulaDensity, MarginSpec, MixtureCopulaDensity,
    PairCopula, ProductCopulaDensity,
};
pub use empirical::{
    default_lattice_order, empirical_copula_eval, empirical_copula_grid, empirical_copula_mass,
    CopulaGrid, GridKind,
};
pub use error::{Error, Result};
pub use measures::{
    mutual_info_cell, mutual_info_kde, pair_measure, spearman_rho, weight_matrix, KdeMode,
    KernelDensity, Measure, WeightMatrix,
};
pub use samples::{load_dataset, rank_transform, rank_values, Dataset, RankMatrix, TieBreak};
pub use structure::{
    coverage_ratio, learn_structure, learn_with_weights, maximum_spanning_tree, DependenceEdge,
    DependenceTree, LearnOptions, TreeEdge,
};
pub use synth::SynthSpec;
