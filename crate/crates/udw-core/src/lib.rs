//! Unruh-DeWitt detectors coupled to free fields in a periodic cavity.
//!
//! The crate computes leading-order detector responses, enumerates and evaluates
//! Wick contractions and Feynman diagrams, and checks both against a brute-force
//! truncated Fock space.

pub mod error;
pub mod feynman;
pub mod gamma;
pub mod lattice;
pub mod numeric;
pub mod oracle;
pub mod profile;
pub mod response;
pub mod spinor;
pub mod wick;

pub use error::{Error, Result};
pub use gamma::{GammaSet, Mat4, Spinor4};
pub use lattice::{dispersion, momentum_of, CavityField, FieldKind, ModeIndex, Vec3};
pub use num_complex::Complex64;
pub use profile::{chi, detector_propagator, profile_fourier, time_fourier, DetectorSpec, Model, SpatialProfile, Switching};
pub use spinor::{Charge, Spin, SpinLabel};
