//! Dirac-representation gamma matrices on C⁴.

use crate::lattice::Vec3;
use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

pub type Mat4 = Matrix4<Complex64>;
pub type Spinor4 = Vector4<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Minkowski metric `diag(+1, −1, −1, −1)`.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

pub fn pauli(i: usize) -> Matrix2<Complex64> {
    match i {
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => Matrix2::identity(),
    }
}

fn blocks(a: Matrix2<Complex64>, b: Matrix2<Complex64>, c: Matrix2<Complex64>, d: Matrix2<Complex64>) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&d);
    m
}

/// The four gamma matrices. One spatial dimension uses only `γ⁰` and `γ³`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub g: [Mat4; 4],
}

impl Default for GammaSet {
    fn default() -> Self {
        Self::dirac()
    }
}

impl GammaSet {
    pub fn dirac() -> Self {
        let id = Matrix2::identity();
        let z = Matrix2::zeros();
        let g0 = blocks(id, z, z, -id);
        let gi = |i| blocks(z, pauli(i), -pauli(i), z);
        Self {
            g: [g0, gi(1), gi(2), gi(3)],
        }
    }

    /// Indices in use for `n` spatial dimensions.
    pub fn used_indices(n: usize) -> Vec<usize> {
        if n == 1 {
            vec![0, 3]
        } else {
            (0..=3).collect()
        }
    }

    /// `k̸ = ω γ⁰ − k·γ`.
    pub fn slash(&self, omega: f64, k: &Vec3) -> Mat4 {
        self.g[0] * Complex64::from(omega)
            - self.g[1] * Complex64::from(k[0])
            - self.g[2] * Complex64::from(k[1])
            - self.g[3] * Complex64::from(k[2])
    }

    /// `ψ̄ = ψ† γ⁰`, returned as a row vector.
    pub fn bar(&self, psi: &Spinor4) -> nalgebra::RowVector4<Complex64> {
        psi.adjoint() * self.g[0]
    }

    /// Largest elementwise deviation of `{γ^μ, γ^ν} − 2η^{μν}` over the used indices.
    pub fn clifford_defect(&self, n: usize) -> f64 {
        let idx = Self::used_indices(n);
        let mut worst: f64 = 0.0;
        for &a in &idx {
            for &b in &idx {
                let anti = self.g[a] * self.g[b] + self.g[b] * self.g[a];
                let eta = if a == b { 2.0 * METRIC[a] } else { 0.0 };
                let want = Mat4::identity() * Complex64::from(eta);
                worst = worst.max((anti - want).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }
}

/// `ψ̄ χ`.
pub fn bar_product(g: &GammaSet, psi: &Spinor4, chi: &Spinor4) -> Complex64 {
    (g.bar(psi) * chi)[(0, 0)]
}

/// `ψ ψ̄` as a 4×4 matrix.
pub fn outer_bar(g: &GammaSet, psi: &Spinor4) -> Mat4 {
    psi * g.bar(psi)
}

pub fn max_abs(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_relations() {
        let g = GammaSet::dirac();
        assert!(g.clifford_defect(3) < 1e-15);
        assert!(g.clifford_defect(1) < 1e-15);
    }

    #[test]
    fn traceless_and_hermiticity() {
        let g = GammaSet::dirac();
        for mu in 0..4 {
            assert!(g.g[mu].trace().norm() < 1e-15);
            let herm = g.g[0] * g.g[mu].adjoint() * g.g[0];
            assert!(max_abs(&(herm - g.g[mu])) < 1e-15);
        }
    }

    #[test]
    fn slash_squares_to_mass_shell() {
        let g = GammaSet::dirac();
        let k = [0.3, -1.2, 0.7];
        let w = 2.5;
        let s = g.slash(w, &k);
        let k2 = w * w - k.iter().map(|c| c * c).sum::<f64>();
        assert!(max_abs(&(s * s - Mat4::identity() * Complex64::from(k2))) < 1e-13);
    }
}
