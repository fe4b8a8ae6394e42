//! Switching functions, spatial profiles, their Fourier transforms and the
//! detector's Feynman propagator.

use crate::error::{invalid, Error, Result};
use crate::lattice::{dot, CavityField, FieldKind, Vec3};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Half-width of the Gaussian switching window in units of `T`.
pub const GAUSSIAN_WINDOW: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Switching {
    /// Indicator of `[t0, t0 + duration]`.
    Sudden { t0: f64, duration: f64 },
    /// `exp(−t²/2T²)`.
    Gaussian { width: f64 },
}

impl Switching {
    /// Sudden window centred on `t = 0`.
    pub fn sudden(duration: f64) -> Result<Self> {
        Self::sudden_from(-0.5 * duration, duration)
    }

    pub fn sudden_from(t0: f64, duration: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) || !t0.is_finite() {
            return Err(invalid("T", format!("sudden switching needs a positive duration, got {duration}")));
        }
        Ok(Switching::Sudden { t0, duration })
    }

    pub fn gaussian(width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid("T", format!("gaussian switching needs a positive width, got {width}")));
        }
        Ok(Switching::Gaussian { width })
    }

    /// `T`
    pub fn timescale(&self) -> f64 {
        match *self {
            Switching::Sudden { duration, .. } => duration,
            Switching::Gaussian { width } => width,
        }
    }

    pub fn with_timescale(&self, t: f64) -> Result<Self> {
        match *self {
            Switching::Sudden { .. } => Self::sudden(t),
            Switching::Gaussian { .. } => Self::gaussian(t),
        }
    }

    /// Integration window: the exact support for sudden switching, `±8T` for Gaussian.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Switching::Sudden { t0, duration } => (t0, t0 + duration),
            Switching::Gaussian { width } => (-GAUSSIAN_WINDOW * width, GAUSSIAN_WINDOW * width),
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, Switching::Gaussian { .. })
    }
}

pub fn chi(sw: &Switching, t: f64) -> f64 {
    match *sw {
        Switching::Sudden { t0, duration } => {
            if t >= t0 && t <= t0 + duration {
                1.0
            } else {
                0.0
            }
        }
        Switching::Gaussian { width } => (-t * t / (2.0 * width * width)).exp(),
    }
}

/// `χ̃(ω) = ∫ χ(t) e^{iωt} dt`.
pub fn time_fourier(sw: &Switching, omega: f64) -> Complex64 {
    match *sw {
        Switching::Sudden { t0, duration } => {
            let half = 0.5 * omega * duration;
            let mag = if half.abs() < 1e-8 {
                duration * (1.0 - half * half / 6.0)
            } else {
                2.0 * half.sin() / omega
            };
            Complex64::from_polar(1.0, omega * (t0 + 0.5 * duration)) * mag
        }
        Switching::Gaussian { width } => {
            Complex64::from((2.0 * PI).sqrt() * width * (-0.5 * omega * omega * width * width).exp())
        }
    }
}

/// `|χ̃(ω)|²`, computed without the phase.
pub fn time_fourier_sq(sw: &Switching, omega: f64) -> f64 {
    match *sw {
        Switching::Sudden { duration, .. } => {
            let half = 0.5 * omega * duration;
            if half.abs() < 1e-8 {
                duration * duration
            } else {
                let s = 2.0 * half.sin() / omega;
                s * s
            }
        }
        Switching::Gaussian { width } => 2.0 * PI * width * width * (-omega * omega * width * width).exp(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialProfile {
    PointLike { x0: Vec3 },
    Gaussian { x0: Vec3, sigma: f64 },
}

impl SpatialProfile {
    pub fn pointlike_at_origin() -> Self {
        SpatialProfile::PointLike { x0: [0.0; 3] }
    }

    pub fn gaussian(x0: Vec3, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("profile width must be positive, got {sigma}")));
        }
        Ok(SpatialProfile::Gaussian { x0, sigma })
    }

    pub fn center(&self) -> Vec3 {
        match *self {
            SpatialProfile::PointLike { x0 } | SpatialProfile::Gaussian { x0, .. } => x0,
        }
    }

    pub fn sigma(&self) -> Option<f64> {
        match *self {
            SpatialProfile::PointLike { .. } => None,
            SpatialProfile::Gaussian { sigma, .. } => Some(sigma),
        }
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::gaussian(self.center(), sigma)
    }

    /// Density `p(y)` in `n` dimensions; `None` for a point-like profile.
    pub fn density(&self, y: &Vec3, n: usize) -> Option<f64> {
        match *self {
            SpatialProfile::PointLike { .. } => None,
            SpatialProfile::Gaussian { x0, sigma } => {
                let d = [y[0] - x0[0], y[1] - x0[1], y[2] - x0[2]];
                let norm = (2.0 * PI * sigma * sigma).powf(0.5 * n as f64);
                Some((-dot(&d, &d) / (2.0 * sigma * sigma)).exp() / norm)
            }
        }
    }

    /// Soft warning when the profile is too wide for the full-space Fourier transform.
    pub fn width_warning(&self, field: &CavityField) -> Option<String> {
        match self.sigma() {
            Some(s) if s > field.length() / 10.0 => Some(format!(
                "profile width {s} exceeds L/10 = {}; periodic images are neglected",
                field.length() / 10.0
            )),
            _ => None,
        }
    }
}

/// `p̃(k) = ∫ p(y) e^{−ik·y} dⁿy`.
pub fn profile_fourier(profile: &SpatialProfile, k: &Vec3) -> Complex64 {
    match *profile {
        SpatialProfile::PointLike { x0 } => Complex64::from_polar(1.0, -dot(k, &x0)),
        SpatialProfile::Gaussian { x0, sigma } => {
            Complex64::from_polar((-0.5 * dot(k, k) * sigma * sigma).exp(), -dot(k, &x0))
        }
    }
}

/// `|p̃(k)|²`
pub fn profile_fourier_sq(profile: &SpatialProfile, k: &Vec3) -> f64 {
    match *profile {
        SpatialProfile::PointLike { .. } => 1.0,
        SpatialProfile::Gaussian { sigma, .. } => (-dot(k, k) * sigma * sigma).exp(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    /// `μ Φ` with a real scalar.
    Linear,
    /// `μ :Φ²:` with a real scalar.
    RealQuadratic,
    /// `μ :Φ†Φ:` with a complex scalar.
    ComplexQuadratic,
    /// `μ :Ψ̄Ψ:` with a Dirac field.
    Spinor,
}

impl Model {
    pub const ALL: [Model; 4] = [Model::Linear, Model::RealQuadratic, Model::ComplexQuadratic, Model::Spinor];

    pub fn id(self) -> u8 {
        match self {
            Model::Linear => 1,
            Model::RealQuadratic => 2,
            Model::ComplexQuadratic => 3,
            Model::Spinor => 4,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Model::Linear),
            2 => Ok(Model::RealQuadratic),
            3 => Ok(Model::ComplexQuadratic),
            4 => Ok(Model::Spinor),
            _ => Err(invalid("model", format!("model id must be 1..=4, got {id}"))),
        }
    }

    pub fn field_kind(self) -> FieldKind {
        match self {
            Model::Linear | Model::RealQuadratic => FieldKind::RealScalar,
            Model::ComplexQuadratic => FieldKind::ComplexScalar,
            Model::Spinor => FieldKind::Spinor,
        }
    }

    pub fn is_quadratic(self) -> bool {
        !matches!(self, Model::Linear)
    }

    pub fn check_field(self, field: &CavityField) -> Result<()> {
        if field.kind() != self.field_kind() {
            return Err(Error::ModelFieldMismatch {
                model: self.id(),
                field: field.kind().name(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    pub gap: f64,
    pub coupling: f64,
    pub model: Model,
    pub switching: Switching,
    pub profile: SpatialProfile,
}

impl DetectorSpec {
    pub fn new(model: Model, gap: f64, coupling: f64, switching: Switching, profile: SpatialProfile) -> Result<Self> {
        if !(gap > 0.0 && gap.is_finite()) {
            return Err(invalid("Omega", format!("gap must be positive, got {gap}")));
        }
        if !coupling.is_finite() {
            return Err(invalid("lambda", "coupling must be finite"));
        }
        Ok(Self {
            gap,
            coupling,
            model,
            switching,
            profile,
        })
    }

    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self { coupling, ..*self }
    }

    pub fn with_switching(&self, switching: Switching) -> Self {
        Self { switching, ..*self }
    }

    pub fn with_profile(&self, profile: SpatialProfile) -> Self {
        Self { profile, ..*self }
    }

    pub fn with_gap(&self, gap: f64) -> Result<Self> {
        Self::new(self.model, gap, self.coupling, self.switching, self.profile)
    }

    /// `f̃(ω, k) = χ̃(ω) p̃(k)`, the factor entering `|f̃(ω_k + Ω, k)|²`.
    pub fn spacetime_fourier(&self, omega: f64, k: &Vec3) -> Complex64 {
        time_fourier(&self.switching, omega) * profile_fourier(&self.profile, k)
    }

    pub fn spacetime_fourier_sq(&self, omega: f64, k: &Vec3) -> f64 {
        time_fourier_sq(&self.switching, omega) * profile_fourier_sq(&self.profile, k)
    }

    /// Detector propagator with this gap.
    pub fn propagator(&self, t: f64) -> Result<Complex64> {
        detector_propagator(self.gap, t)
    }
}

/// `D_F(t) = e^{−iΩt}` for `t > 0`, `−e^{iΩt}` for `t < 0`.
pub fn detector_propagator(gap: f64, t: f64) -> Result<Complex64> {
    if t > 0.0 {
        Ok(Complex64::from_polar(1.0, -gap * t))
    } else if t < 0.0 {
        Ok(-Complex64::from_polar(1.0, gap * t))
    } else {
        Err(Error::CoincidenceLimit)
    }
}
