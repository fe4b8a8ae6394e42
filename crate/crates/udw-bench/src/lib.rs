//! Shared fixtures for the benchmarks.

use udw_core::{CavityField, DetectorSpec, FieldKind, Model, SpatialProfile, Switching};

pub fn field(n: usize, kind: FieldKind) -> CavityField {
    let mass = if kind == FieldKind::Spinor { 0.7 } else { 0.5 };
    CavityField::new(n, 10.0, mass, kind).unwrap()
}

/// Pointlike detector at the origin with unit gap and λ = 0.1.
pub fn detector(model: Model, switching: Switching) -> DetectorSpec {
    DetectorSpec::new(model, 1.0, 0.1, switching, SpatialProfile::pointlike_at_origin()).unwrap()
}

pub fn gaussian(width: f64) -> Switching {
    Switching::gaussian(width).unwrap()
}

pub fn sudden(duration: f64) -> Switching {
    Switching::sudden(duration).unwrap()
}
