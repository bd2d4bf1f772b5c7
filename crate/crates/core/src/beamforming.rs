//! Single- and multi-focal MRT beamformers and phase quantisation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods once std is linked
use num_traits::Float;

use crate::channel::SteeringVector;
use crate::error::{Error, Result};

/// Focal points closer than this are considered the same point.
pub const DUPLICATE_FOCUS_M: f64 = 1e-6;

/// Largest supported phase-shifter resolution.
pub const MAX_PHASE_BITS: u32 = 16;

/// Per-element complex weights, stored per RF chain.
///
/// `weights` is always the element-wise sum of `per_chain`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights {
    weights: Vec<Complex64>,
    per_chain: Vec<Vec<Complex64>>,
    phase_bits: Option<u32>,
}

impl BeamWeights {
    /// Builds weights from per-chain vectors of equal length.
    pub fn from_chains(per_chain: Vec<Vec<Complex64>>) -> Result<Self> {
        let first = per_chain
            .first()
            .ok_or(Error::InvalidParameter("at least one RF chain is required"))?;
        let n = first.len();
        if let Some(bad) = per_chain.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: bad.len(),
            });
        }
        let mut weights = alloc::vec![Complex64::new(0.0, 0.0); n];
        for chain in &per_chain {
            for (w, c) in weights.iter_mut().zip(chain) {
                *w += c;
            }
        }
        Ok(Self {
            weights,
            per_chain,
            phase_bits: None,
        })
    }

    pub fn single(weights: Vec<Complex64>) -> Self {
        Self {
            per_chain: alloc::vec![weights.clone()],
            weights,
            phase_bits: None,
        }
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn per_chain(&self) -> &[Vec<Complex64>] {
        &self.per_chain
    }

    pub fn rf_chains(&self) -> usize {
        self.per_chain.len()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn phase_bits(&self) -> Option<u32> {
        self.phase_bits
    }

    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every weight of every chain by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let scale = |v: &Vec<Complex64>| v.iter().map(|w| w * factor).collect::<Vec<_>>();
        Self {
            weights: scale(&self.weights),
            per_chain: self.per_chain.iter().map(scale).collect(),
            phase_bits: self.phase_bits,
        }
    }
}

/// Maximum-ratio transmission towards the point of `a`.
///
/// Weights are `conj(a) / |a|`, or with `phase_only` the unit-magnitude
/// conjugate phases scaled by `1/sqrt(N)`. Either way the norm is 1.
pub fn mrt_weights(a: &SteeringVector, phase_only: bool) -> BeamWeights {
    BeamWeights::single(conjugate_beam(a, phase_only))
}

fn conjugate_beam(a: &SteeringVector, phase_only: bool) -> Vec<Complex64> {
    if phase_only {
        let scale = 1.0 / (a.len() as f64).sqrt();
        a.entries().iter().map(|x| (x.conj() / x.norm()) * scale).collect()
    } else {
        let norm = a.norm();
        a.entries().iter().map(|x| x.conj() / norm).collect()
    }
}

/// Per-stream powers for an equal split of a unit budget over `m` chains.
pub fn equal_split(m: usize) -> Vec<f64> {
    alloc::vec![1.0 / m as f64; m]
}

/// Fully connected analog beamformer: chain `m` carries MRT towards
/// `focals[m]` with power `stream_powers[m]`; the chains add in the analog
/// domain.
pub fn multi_focal_weights(focals: &[SteeringVector], stream_powers: &[f64]) -> Result<BeamWeights> {
    if focals.is_empty() {
        return Err(Error::InvalidParameter("at least one focal point is required"));
    }
    if focals.len() != stream_powers.len() {
        return Err(Error::LengthMismatch {
            left: focals.len(),
            right: stream_powers.len(),
        });
    }
    if stream_powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidParameter("stream powers must be finite and nonnegative"));
    }
    for (i, a) in focals.iter().enumerate() {
        for b in &focals[i + 1..] {
            if a.len() != b.len() {
                return Err(Error::LengthMismatch {
                    left: a.len(),
                    right: b.len(),
                });
            }
            if a.point().distance(&b.point()) < DUPLICATE_FOCUS_M {
                return Err(Error::DuplicateFocalPoint {
                    first: a.point(),
                    second: b.point(),
                });
            }
        }
    }
    let chains = focals
        .iter()
        .zip(stream_powers)
        .map(|(a, p)| {
            let amp = p.sqrt();
            conjugate_beam(a, false).into_iter().map(|w| w * amp).collect()
        })
        .collect();
    BeamWeights::from_chains(chains)
}

/// Index of the nearest point of the `2^bits` grid `{2 pi k / 2^bits}`.
/// Ties round towards the larger index.
pub fn nearest_phase_index(phase: f64, bits: u32) -> u32 {
    let levels = 1u64 << bits;
    let turns = phase / (2.0 * PI);
    let wrapped = turns - turns.floor();
    let k = (wrapped * levels as f64 + 0.5).floor() as u64;
    (k % levels) as u32
}

/// Phase of grid index `k` at resolution `bits`.
pub fn grid_phase(k: u32, bits: u32) -> f64 {
    2.0 * PI * k as f64 / (1u64 << bits) as f64
}

/// Rounds every per-chain entry's phase to the nearest `2^bits` grid point,
/// keeping magnitudes; the combined weights are re-summed from the chains.
pub fn quantize_phases(w: &BeamWeights, bits: u32) -> Result<BeamWeights> {
    if bits == 0 || bits > MAX_PHASE_BITS {
        return Err(Error::InvalidParameter("phase bits must be in 1..=16"));
    }
    let chains = w
        .per_chain
        .iter()
        .map(|chain| {
            chain
                .iter()
                .map(|x| {
                    let k = nearest_phase_index(x.arg(), bits);
                    Complex64::from_polar(x.norm(), grid_phase(k, bits))
                })
                .collect()
        })
        .collect();
    let mut out = BeamWeights::from_chains(chains)?;
    out.phase_bits = Some(bits);
    Ok(out)
}

/// Received power `|a^T w|^2` of the combined weights.
pub fn focal_power(a: &SteeringVector, w: &BeamWeights) -> Result<f64> {
    Ok(a.response(w.weights())?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{steering_vector, wavelength_for, GainModel};
    use crate::geometry::{Point3, UniformPlanarArray};
    use approx::assert_relative_eq;

    fn wrap(x: f64) -> f64 {
        x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor()
    }

    #[test]
    fn mrt_aligns_phases() {
        let arr = UniformPlanarArray::square(4, 0.5, wavelength_for(28e9)).unwrap();
        let a = steering_vector(&arr, Point3::new(0.05, 0.7, -0.1), GainModel::InverseDistance).unwrap();
        let w = mrt_weights(&a, false);
        assert_relative_eq!(w.norm(), 1.0, epsilon = 1e-12);
        for (x, y) in a.entries().iter().zip(w.weights()) {
            assert!((x * y).arg().abs() < 1e-12);
        }
        let r = a.response(w.weights()).unwrap();
        assert_relative_eq!(r.re, a.norm(), max_relative = 1e-12);
    }

    #[test]
    fn mrt_two_element_phases() {
        let arr = UniformPlanarArray::square(1, 0.5, 0.01).unwrap().with_size(2, 1).unwrap();
        let a = steering_vector(&arr, Point3::new(0.0, 1.0, 0.0), GainModel::Unit)
            .unwrap()
            .with_entries(alloc::vec![Complex64::from_polar(1.0, PI / 3.0), Complex64::from_polar(1.0, -PI / 4.0)]);
        let w = mrt_weights(&a, true);
        assert_relative_eq!(w.weights()[0].arg(), -PI / 3.0, epsilon = 1e-12);
        assert_relative_eq!(w.weights()[1].arg(), PI / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn multi_focal_reduces_to_mrt() {
        let arr = UniformPlanarArray::square(5, 0.5, wavelength_for(28e9)).unwrap();
        let a = steering_vector(&arr, Point3::new(0.0, 1.0, 0.0), GainModel::InverseDistance).unwrap();
        let mf = multi_focal_weights(core::slice::from_ref(&a), &[1.0]).unwrap();
        assert_eq!(mf.weights(), mrt_weights(&a, false).weights());
        assert_eq!(mf.rf_chains(), 1);
    }

    #[test]
    fn multi_focal_rejects_duplicates() {
        let arr = UniformPlanarArray::square(5, 0.5, wavelength_for(28e9)).unwrap();
        let a = steering_vector(&arr, Point3::new(0.0, 1.0, 0.0), GainModel::Unit).unwrap();
        let b = steering_vector(&arr, Point3::new(0.0, 1.0 + 1e-7, 0.0), GainModel::Unit).unwrap();
        let err = multi_focal_weights(&[a, b], &equal_split(2)).unwrap_err();
        assert!(matches!(err, Error::DuplicateFocalPoint { .. }));
    }

    #[test]
    fn multi_focal_chains_sum() {
        let arr = UniformPlanarArray::square(6, 0.5, wavelength_for(28e9)).unwrap();
        let a = steering_vector(&arr, Point3::new(-0.3, 1.0, 0.0), GainModel::Unit).unwrap();
        let b = steering_vector(&arr, Point3::new(0.3, 1.0, 0.0), GainModel::Unit).unwrap();
        let w = multi_focal_weights(&[a, b], &[0.25, 1.0]).unwrap();
        for (n, total) in w.weights().iter().enumerate() {
            let sum = w.per_chain()[0][n] + w.per_chain()[1][n];
            assert!((sum - total).norm() < 1e-12);
        }
        let p0: f64 = w.per_chain()[0].iter().map(|x| x.norm_sqr()).sum();
        assert_relative_eq!(p0, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn quantize_one_bit_rounding() {
        let w = BeamWeights::single(alloc::vec![Complex64::from_polar(2.0, 0.3 * PI)]);
        let q = quantize_phases(&w, 1).unwrap();
        assert!(q.weights()[0].arg().abs() < 1e-12);
        assert_relative_eq!(q.weights()[0].norm(), 2.0);
        assert_eq!(q.phase_bits(), Some(1));
    }

    #[test]
    fn quantize_tie_goes_up() {
        // pi/2 is exactly halfway between 0 and pi at one bit.
        assert_eq!(nearest_phase_index(PI / 2.0, 1), 1);
        assert_eq!(nearest_phase_index(-PI / 4.0 + 1e-15, 2), 0);
        assert_eq!(nearest_phase_index(2.0 * PI - 1e-12, 3), 0);
    }

    #[test]
    fn quantize_error_bound_and_idempotence() {
        let arr = UniformPlanarArray::square(8, 0.5, wavelength_for(28e9)).unwrap();
        let a = steering_vector(&arr, Point3::new(0.1, 0.8, 0.2), GainModel::InverseDistance).unwrap();
        let w = mrt_weights(&a, false);
        for bits in 1..=6 {
            let q = quantize_phases(&w, bits).unwrap();
            for (x, y) in w.weights().iter().zip(q.weights()) {
                assert!(wrap(y.arg() - x.arg()).abs() <= PI / f64::from(1u32 << bits) + 1e-12);
                assert_relative_eq!(x.norm(), y.norm(), max_relative = 1e-12);
            }
            let qq = quantize_phases(&q, bits).unwrap();
            for (x, y) in q.weights().iter().zip(qq.weights()) {
                assert!((x - y).norm() < 1e-15);
            }
        }
        assert!(quantize_phases(&w, 0).is_err());
    }
}
