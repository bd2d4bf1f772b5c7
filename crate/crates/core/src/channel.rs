//! Spherical-wavefront array responses and field-region boundaries.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods once std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{Point3, UniformPlanarArray};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Distances below this are treated as a point sitting on an element.
pub const MIN_ELEMENT_DISTANCE_M: f64 = 1e-9;

pub fn wavelength_for(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Amplitude model `g(d)` applied to each element-to-point path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainModel {
    /// `g(d) = 1`: phase-only response.
    Unit,
    /// Free-space amplitude `g(d) = lambda / (4 pi d)`.
    #[default]
    InverseDistance,
}

impl GainModel {
    #[inline]
    pub fn amplitude(self, distance_m: f64, wavelength_m: f64) -> f64 {
        match self {
            GainModel::Unit => 1.0,
            GainModel::InverseDistance => wavelength_m / (4.0 * PI * distance_m),
        }
    }
}

/// Single-path response `g(d) exp(-j 2 pi d / lambda)`.
#[inline]
pub fn path_response(distance_m: f64, wavelength_m: f64, gain: GainModel) -> Complex64 {
    let (s, c) = (2.0 * PI * distance_m / wavelength_m).sin_cos();
    Complex64::new(c, -s) * gain.amplitude(distance_m, wavelength_m)
}

/// Per-element near-field response of an array towards one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
    distances_m: Vec<f64>,
    wavelength_m: f64,
    point: Point3,
    gain: GainModel,
}

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn distances_m(&self) -> &[f64] {
        &self.distances_m
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }

    pub fn point(&self) -> Point3 {
        self.point
    }

    pub fn gain(&self) -> GainModel {
        self.gain
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Entries scaled to unit Euclidean norm.
    pub fn normalized(&self) -> Vec<Complex64> {
        let n = self.norm();
        self.entries.iter().map(|a| a / n).collect()
    }

    #[cfg(test)]
    pub(crate) fn with_entries(mut self, entries: Vec<Complex64>) -> Self {
        self.entries = entries;
        self
    }

    /// `a^T w` (no conjugation).
    pub fn response(&self, weights: &[Complex64]) -> Result<Complex64> {
        if weights.len() != self.entries.len() {
            return Err(Error::LengthMismatch {
                left: self.entries.len(),
                right: weights.len(),
            });
        }
        Ok(self.entries.iter().zip(weights).map(|(a, w)| a * w).sum())
    }
}

/// Exact spherical-wavefront response of every element towards `point`.
pub fn steering_vector(array: &UniformPlanarArray, point: Point3, gain: GainModel) -> Result<SteeringVector> {
    let wavelength_m = array.wavelength_m();
    let distances_m: Vec<f64> = array.element_positions().iter().map(|p| p.distance(&point)).collect();
    let closest = distances_m.iter().copied().fold(f64::INFINITY, f64::min);
    if closest < MIN_ELEMENT_DISTANCE_M {
        return Err(Error::PointOnAperture { distance_m: closest });
    }
    let entries = distances_m.iter().map(|&d| path_response(d, wavelength_m, gain)).collect();
    Ok(SteeringVector {
        entries,
        distances_m,
        wavelength_m,
        point,
        gain,
    })
}

/// Boundaries of the radiative near-field region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRegions {
    pub fraunhofer_m: f64,
    pub reactive_bound_m: f64,
}

impl FieldRegions {
    pub fn is_radiative_near_field(&self, range_m: f64) -> bool {
        range_m > self.reactive_bound_m && range_m < self.fraunhofer_m
    }
}

/// `2 D^2 / lambda` with `D` the aperture diagonal.
pub fn fraunhofer_distance(array: &UniformPlanarArray) -> f64 {
    let d = array.aperture_diameter_m();
    2.0 * d * d / array.wavelength_m()
}

/// Reactive bound fixed at one wavelength.
pub fn field_regions(array: &UniformPlanarArray) -> FieldRegions {
    FieldRegions {
        fraunhofer_m: fraunhofer_distance(array),
        reactive_bound_m: array.wavelength_m(),
    }
}

/// Normalised correlation `(1/N) |sum_n u1_n conj(u2_n)|` of the phase-only
/// (unit-modulus) versions of two steering vectors.
///
/// Amplitudes are discarded so identical points give exactly 1 regardless of
/// the gain model used to build the vectors.
pub fn correlation(a1: &SteeringVector, a2: &SteeringVector) -> Result<f64> {
    if a1.len() != a2.len() {
        return Err(Error::LengthMismatch {
            left: a1.len(),
            right: a2.len(),
        });
    }
    if a1.is_empty() {
        return Err(Error::InvalidParameter("empty steering vectors"));
    }
    let sum: Complex64 = a1
        .entries
        .iter()
        .zip(&a2.entries)
        .map(|(x, y)| {
            let ux = x / x.norm();
            let uy = y / y.norm();
            ux * uy.conj()
        })
        .sum();
    Ok((sum.norm() / a1.len() as f64).min(1.0))
}

/// Correlation between the responses to `r1` and `r2` for each array size,
/// keeping every other parameter of `template`.
pub fn orthogonality_profile(
    template: &UniformPlanarArray,
    r1: Point3,
    r2: Point3,
    sizes: &[(usize, usize)],
) -> Result<Vec<(usize, f64)>> {
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("sizes must be nonempty"));
    }
    sizes
        .iter()
        .map(|&(rows, cols)| {
            let array = template.with_size(rows, cols)?;
            let a1 = steering_vector(&array, r1, GainModel::Unit)?;
            let a2 = steering_vector(&array, r2, GainModel::Unit)?;
            Ok((array.num_elements(), correlation(&a1, &a2)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ArrayPlane;
    use approx::assert_relative_eq;

    fn lambda28() -> f64 {
        wavelength_for(28e9)
    }

    #[test]
    fn single_element_unit_gain() {
        let lambda = lambda28();
        let arr = UniformPlanarArray::square(1, 0.5, lambda).unwrap();
        let a = steering_vector(&arr, Point3::new(0.0, 1.0, 0.0), GainModel::Unit).unwrap();
        let expected = Complex64::from_polar(1.0, -2.0 * PI / lambda);
        assert_relative_eq!(a.entries()[0].re, expected.re, epsilon = 1e-9);
        assert_relative_eq!(a.entries()[0].im, expected.im, epsilon = 1e-9);
    }

    #[test]
    fn symmetric_pair_on_boresight() {
        let arr = UniformPlanarArray::new(2, 1, 0.2, Point3::ORIGIN, ArrayPlane::XZ, 0.05).unwrap();
        let a = steering_vector(&arr, Point3::new(0.0, 3.0, 0.0), GainModel::InverseDistance).unwrap();
        assert_eq!(a.entries()[0], a.entries()[1]);
    }

    #[test]
    fn point_on_aperture() {
        let arr = UniformPlanarArray::new(2, 2, 1.0, Point3::ORIGIN, ArrayPlane::XZ, 0.5).unwrap();
        let err = steering_vector(&arr, Point3::new(0.5, 0.0, 0.5), GainModel::Unit).unwrap_err();
        assert!(matches!(err, Error::PointOnAperture { .. }));
    }

    #[test]
    fn fraunhofer_scaling() {
        let lambda = lambda28();
        assert_eq!(fraunhofer_distance(&UniformPlanarArray::square(1, 0.5, lambda).unwrap()), 0.0);
        let small = UniformPlanarArray::square(11, 0.5, lambda).unwrap();
        let big = UniformPlanarArray::square(21, 0.5, lambda).unwrap();
        assert_relative_eq!(fraunhofer_distance(&big), 4.0 * fraunhofer_distance(&small), max_relative = 1e-12);
        let elaa = UniformPlanarArray::square(60, 0.5, lambda).unwrap();
        let df = fraunhofer_distance(&elaa);
        assert!((df - 37.3).abs() < 0.05, "D^F = {df}");
        let regions = field_regions(&elaa);
        assert!(regions.is_radiative_near_field(Point3::new(0.0, 1.0, -0.5).norm()));
    }

    #[test]
    fn correlation_identities() {
        let lambda = lambda28();
        let arr = UniformPlanarArray::square(6, 0.5, lambda).unwrap();
        let a = steering_vector(&arr, Point3::new(0.1, 1.0, 0.0), GainModel::InverseDistance).unwrap();
        assert_relative_eq!(correlation(&a, &a).unwrap(), 1.0, epsilon = 1e-12);
        let one = UniformPlanarArray::square(1, 0.5, lambda).unwrap();
        let b1 = steering_vector(&one, Point3::new(0.0, 1.0, 0.0), GainModel::Unit).unwrap();
        let b2 = steering_vector(&one, Point3::new(3.0, 1.0, 2.0), GainModel::Unit).unwrap();
        assert_relative_eq!(correlation(&b1, &b2).unwrap(), 1.0, epsilon = 1e-12);
        assert!(matches!(correlation(&a, &b1), Err(Error::LengthMismatch { left: 36, right: 1 })));
    }

    #[test]
    fn profile_of_identical_points_is_one() {
        let arr = UniformPlanarArray::square(2, 0.5, lambda28()).unwrap();
        let r = Point3::new(0.0, 1.0, 0.0);
        let prof = orthogonality_profile(&arr, r, r, &[(6, 6), (20, 20)]).unwrap();
        for (_, c) in prof {
            assert_relative_eq!(c, 1.0, epsilon = 1e-12);
        }
        assert!(orthogonality_profile(&arr, r, r, &[]).is_err());
    }
}
