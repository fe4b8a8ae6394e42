//! Operator words in second quantization and their vacuum expectation values
//! as sums over full Wick contractions.
//!
//! Each field id and each detector id is an independent algebra; symbols of
//! different algebras commute. Within an algebra, spinor symbols and the
//! detector's `σ±`, `μ` are fermionic.

mod contract;
mod parse;
mod render;
mod symbol;
pub(crate) mod values;

pub use contract::{enumerate_full_contractions, fermion_sign, ContractionPairing};
pub use render::{render_terms, RenderedTerm};
pub use symbol::{Algebra, Event, FlatSymbol, Group, GroupItem, OperatorSymbol, OperatorWord, Point, Slot, SpinorIndex};
pub use values::{
    contraction_value, evaluate_vev, scalar_propagator_timedomain, scalar_wightman, spinor_propagator_timedomain,
    spinor_spin_sum, ContractionValue, Evaluation, FieldModes, Propagator, WickConfig,
};
