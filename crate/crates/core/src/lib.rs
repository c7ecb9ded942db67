//! Exact and randomized machinery for sampling and counting independent
//! sets in small graphs, together with the verification experiments that
//! measure how close the sampler gets to uniform.
//!
//! Layout:
//! - [`graph`]: bitset vertex sets, graphs, prefix graphs, brute-force
//!   independent-set enumeration.
//! - [`dist`]: finite distributions, separation and total variation
//!   distance, mixture decomposition.
//! - [`chain`]: the insert/delete Markov chain on independent sets.
//! - [`matching`]: 0-1 skeletons, Hopcroft-Karp, exact permanents, and
//!   uniform perfect-matching samplers.
//! - [`anchored`]: state-valued matrices built from chain realizations.
//! - [`pipeline`]: the end-to-end almost-uniform sampler.
//! - [`counting`]: the telescoping-product approximate counter.
//! - [`verify`]: seeded experiments with explicit verdicts.

pub mod anchored;
pub mod chain;
pub mod counting;
pub mod dist;
pub mod error;
pub mod graph;
pub mod matching;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod stats;
pub mod verify;

pub use anchored::AnchoredMatrix;
pub use chain::{bidc_step, run_realization, transition_matrix, Realization};
pub use counting::{boost_repetitions, count_fpras, estimate_ratio, median, CountEstimate};
pub use dist::{mixture_decompose, separation_distance, total_variation, Distribution};
pub use error::{Error, Result};
pub use graph::{format_graph, parse_graph, Graph, VertexSet};
pub use matching::{
    count_pm, enumerate_pms, has_perfect_matching, max_matching, sample_pm_exact, sample_pm_mcmc,
    PerfectMatching, Skeleton,
};
pub use pipeline::{
    derive_parameters, sample_independent_set, PmBackend, SamplerConfig, SamplerOutcome,
};
pub use report::{ExperimentReport, Verdict};
pub use verify::{
    connected_graphs_n_le_4, measure_sampler_uniformity, verify_distance_lemma,
    verify_independence_property, verify_p_robustness, verify_pm_bound,
};
