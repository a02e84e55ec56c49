//! born-lab-core: a desk-scale laboratory for Born-rule toy models.
//!
//! The crate represents superpositions symbolically — amplitude-weighted
//! labeled branches instead of dense tensors — and builds four bodies of
//! machinery on top of that algebra:
//!
//! - [`frequency`]: long-run product states, the frequency-operator
//!   eigenvalue/expectation identities, maverick-history measures and the
//!   typicality error.
//! - [`stochastic`]: the stochastic many-minds model with its exact
//!   binomial/multinomial mind distributions, hulk probabilities and
//!   fluctuation scaling.
//! - [`unitary`]: the deterministic unitary many-minds model driven by a
//!   molecular-chaos qubit gas, whose occupancy statistics converge to the
//!   Born weights.
//! - [`envariance`]: swap/counterswap symmetry checks, fine-graining of
//!   rational weights into equal branches, and the erasure chain.
//!
//! Exact rational weights propagate exactly end to end; float weights take
//! a compensated-float path. All state operations are pure and all sampling
//! flows through seed-derived streams, so every result is reproducible and
//! independent of scheduling.
//!
//! ```
//! use born_lab_core::weight::big_ratio;
//! use born_lab_core::{
//!     fine_grain, run_experiment, ExperimentScenario, RunMode, Symbol, SystemSpec,
//! };
//!
//! let spec = SystemSpec::from_rationals(vec![
//!     (Symbol::new("↑"), big_ratio(1, 3)),
//!     (Symbol::new("↓"), big_ratio(2, 3)),
//! ])?;
//!
//! // three equal-weight grains, grouped (1, 2)
//! let (map, state) = fine_grain(&spec)?;
//! assert_eq!(map.sizes(), vec![1, 2]);
//! assert!(state.norm_sqr().is_one());
//!
//! // a small seeded run of the unitary model
//! let report = run_experiment(&ExperimentScenario {
//!     spec,
//!     minds: 300,
//!     repetitions: 20,
//!     levels: None,
//!     seed: 7,
//!     mode: RunMode::MonteCarlo,
//! })?;
//! assert!((report.mean_fractions[0] - 1.0 / 3.0).abs() < 0.1);
//! # Ok::<(), born_lab_core::Error>(())
//! ```

pub mod amplitude;
pub mod comb;
pub mod envariance;
pub mod error;
pub mod frequency;
pub mod label;
pub mod rng;
pub mod state;
pub mod stochastic;
pub mod unitary;
pub mod weight;

pub use amplitude::Amplitude;
pub use envariance::{
    approximate_weights, coarse_probability, equiprobability_from_symmetry, fine_grain,
    fine_grain_with_levels, schmidt_state, strong_symmetry_check, verify_envariance,
    wallace_chain, EnvarianceReport, FineGrainMap, SymmetryCheck, WallaceReport,
};
pub use error::{Error, Result};
pub use frequency::{
    frequency_eigenvalue, frequency_expectation, frequency_expectation_all, history_state,
    maverick_measure, typicality_error, value_function, ExpectationMethod, History, HistoryStats,
    SystemSpec, DEFAULT_ENUMERATION_CAP,
};
pub use label::{BranchLabel, LabelSchema, MindSlot, Symbol};
pub use rng::SeededRng;
pub use state::{BranchState, LabelUnitary, SymbolField, DEFAULT_TOLERANCE};
pub use stochastic::{
    history_support_bound, hulk_probability, mode_tally, relative_fluctuation,
    sample_mind_assignments, sample_minds, sample_minds_batch, tally_pmf, MindTally,
};
pub use unitary::{
    branch_tally, evolve_many_minds, evolve_single_mind, evolve_t_level,
    exact_tally_distribution, mind_probability_table, qubit_symbols, run_experiment,
    ConvergenceReport, ExperimentScenario, ProbabilityRow, QubitGas, RunMode,
};
pub use weight::Weight;
