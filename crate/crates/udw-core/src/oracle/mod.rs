//! Brute-force truncated Fock space: explicit ladder operators, exact
//! expectation values of operator words, and direct time evolution.
//!
//! Each field id and each detector is its own algebra. Fermionic modes carry
//! Jordan-Wigner strings only within their algebra, in the listed order; a
//! detector is a single fermionic level with `σ⁻ = c`, and operators of
//! different algebras commute.

mod evolve;
mod interaction;
mod space;
mod sparse;
mod suite;

pub use evolve::{cap_sensitivity, evolve, evolve_model, model_space, Evolution, EvolveOptions};
pub use interaction::{
    detector_coupling, dyson_second_order, field_expansion, interaction_operator, model_table, monopole_operator, ordered_pair_integral,
    smeared_field_operator, tadpole_mode_sum, transition_amplitudes, ExpansionTerm, FieldFactor, SecondOrder,
};
pub use space::{apply_ladder, ladder_matrix, Ladder, ModeKey, ModeTable, OperatorSum, OracleMode, TruncatedSpace, DEFAULT_CAP, DENSE_LIMIT};
pub use sparse::{expand_symbol, matrix_element, vacuum_expectation, word_vev, FockVector};
pub use suite::{compare_word, random_word, run_word_suite, suite_config, Comparison, SuiteReport, COMPLEX, DIRAC, REAL};
