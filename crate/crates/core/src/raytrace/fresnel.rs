//! Fresnel reflection off a lossy dielectric half-space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scene::Material;

pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Electric field perpendicular to the plane of incidence.
    #[default]
    Te,
    /// Electric field parallel to the plane of incidence.
    Tm,
}

/// Complex relative permittivity `eps_r - j sigma / (omega eps0)`.
pub fn complex_permittivity(material: &Material, frequency: f64) -> Complex64 {
    let omega = 2.0 * std::f64::consts::PI * frequency;
    Complex64::new(
        material.relative_permittivity,
        -material.conductivity / (omega * VACUUM_PERMITTIVITY),
    )
}

/// Reflection coefficient for a wave arriving from free space at
/// `incidence_angle` (radians from the surface normal).
pub fn reflection_coefficient(
    material: &Material,
    incidence_angle: f64,
    polarization: Polarization,
    frequency: f64,
) -> Complex64 {
    let eta = complex_permittivity(material, frequency);
    let (sin, cos) = incidence_angle.sin_cos();
    let cos = cos.max(0.0);
    let root = (eta - sin * sin).sqrt();
    match polarization {
        Polarization::Te => (cos - root) / (cos + root),
        Polarization::Tm => (eta * cos - root) / (eta * cos + root),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn vacuum_has_no_reflection() {
        let m = Material::vacuum();
        for k in 0..20 {
            let a = k as f64 / 20.0 * FRAC_PI_2 * 0.999;
            for pol in [Polarization::Te, Polarization::Tm] {
                assert!(reflection_coefficient(&m, a, pol, 3.75e9).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn grazing_incidence_is_total() {
        let m = Material::wood();
        for pol in [Polarization::Te, Polarization::Tm] {
            let g = reflection_coefficient(&m, FRAC_PI_2 - 1e-7, pol, 3.75e9);
            assert!((g.norm() - 1.0).abs() < 1e-5, "{pol:?} {g}");
        }
    }

    // Frozen from an independent complex-arithmetic evaluation of the
    // textbook formula (eta = 1.99 - j 0.012 / (2 pi f eps0)).
    #[test]
    fn wood_at_normal_incidence() {
        let g = reflection_coefficient(&Material::wood(), 0.0, Polarization::Te, 3.75e9);
        assert!((g.re - -0.170_466_365_635_645_46).abs() < 1e-12);
        assert!((g.im - 0.007_014_368_206_645_455).abs() < 1e-12);
        let tm = reflection_coefficient(&Material::wood(), 0.0, Polarization::Tm, 3.75e9);
        // TM and TE differ only by sign convention at normal incidence
        assert!((tm + g).norm() < 1e-12);
    }

    #[test]
    fn wood_at_45_degrees() {
        let a = std::f64::consts::FRAC_PI_4;
        let te = reflection_coefficient(&Material::wood(), a, Polarization::Te, 3.75e9);
        let tm = reflection_coefficient(&Material::wood(), a, Polarization::Tm, 3.75e9);
        assert!((te - Complex64::new(-0.266_592_284_523_501_9, 0.008_961_035_000_950_699)).norm() < 1e-12);
        assert!((tm - Complex64::new(0.070_991_146_019_171_57, -0.004_777_885_585_197_016)).norm() < 1e-12);
    }

    #[test]
    fn magnitude_bounded_by_one() {
        let m = Material::new("lossy", 5.0, 2.0).unwrap();
        for k in 0..100 {
            let a = k as f64 / 100.0 * FRAC_PI_2;
            for pol in [Polarization::Te, Polarization::Tm] {
                assert!(reflection_coefficient(&m, a, pol, 1e9).norm() <= 1.0 + 1e-12);
            }
        }
    }
}
