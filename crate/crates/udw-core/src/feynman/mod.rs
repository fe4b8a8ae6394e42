//! Feynman diagrams of detector-field processes: enumeration from the Wick
//! engine, symmetry factors, and time-domain amplitudes through second order.
//!
//! A process `⟨out| U |in⟩` at order `k` is the word
//! `⟨out| V(t₁) ⋯ V(t_k) |in⟩` on the ordered simplex `t₁ > ⋯ > t_k`, where
//! `V = μ ⊗ ∫p O` and every vertex belongs to one detector. Contractions that
//! differ only by which identical field operator of a vertex is used are
//! grouped into one diagram; their number is the symmetry factor.

mod amplitude;
mod diagram;
mod state;
mod time;

pub use amplitude::{
    amplitude, first_order_final_states, process_amplitude, two_detector_swap, unitarity_check, vnrp_second_order, Amplitude,
    UnitarityCheck, Vnrp,
};
pub use diagram::{adjacency_listing, contraction_count, enumerate_diagrams, process_word, Diagram, DiagramVertex, Edge, Endpoint, LineKind};
pub use state::{leg_energy, leg_factor, leg_phase, through_line_factor, ExternalLeg, ExternalState, LegFactor, LegKind, Level, Quantum, FIELD};
pub use time::{common_window, ordered_integral, single_integral, QuadOptions};

#[cfg(test)]
mod tests;
