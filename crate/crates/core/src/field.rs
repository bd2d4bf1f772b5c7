//! Received power over sampling grids.
//!
//! For each grid point `r` and RF chain `m` the stream power is
//! `s_m(r) = |a(r)^T w_m|^2`; independent streams add in power.
//! [`FieldEvaluator`] holds everything needed to evaluate one point, so
//! callers can split the grid across threads and reassemble with
//! [`FieldMap::from_stream_powers`] without changing any result bit.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods once std is linked
use num_traits::Float;

use crate::beamforming::BeamWeights;
use crate::channel::{GainModel, MIN_ELEMENT_DISTANCE_M};
use crate::error::{Error, Result};
use crate::geometry::{GridKind, Point3, SamplingGrid, UniformPlanarArray};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    Raw,
    /// Scaled so the maximum sample equals 1.
    PeakOne,
}

/// Per-point stream power evaluator for one array and set of weights.
#[derive(Debug, Clone)]
pub struct FieldEvaluator {
    positions: Vec<Point3>,
    chains: Vec<Vec<Complex64>>,
    wavenumber: f64,
    wavelength_m: f64,
    gain: GainModel,
}

impl FieldEvaluator {
    pub fn new(array: &UniformPlanarArray, weights: &BeamWeights, gain: GainModel) -> Result<Self> {
        if weights.len() != array.num_elements() {
            return Err(Error::LengthMismatch {
                left: array.num_elements(),
                right: weights.len(),
            });
        }
        Ok(Self {
            positions: array.element_positions(),
            chains: weights.per_chain().to_vec(),
            wavenumber: 2.0 * PI / array.wavelength_m(),
            wavelength_m: array.wavelength_m(),
            gain,
        })
    }

    pub fn streams(&self) -> usize {
        self.chains.len()
    }

    /// Writes `|a(point)^T w_m|^2` for every chain into `out`.
    pub fn stream_powers_into(&self, point: &Point3, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.chains.len());
        let mut acc = [Complex64::new(0.0, 0.0); 4];
        let mut heap;
        let sums: &mut [Complex64] = if self.chains.len() <= acc.len() {
            &mut acc[..self.chains.len()]
        } else {
            heap = alloc::vec![Complex64::new(0.0, 0.0); self.chains.len()];
            &mut heap
        };
        for (n, pos) in self.positions.iter().enumerate() {
            let d = pos.distance(point);
            if d < MIN_ELEMENT_DISTANCE_M {
                return Err(Error::PointOnAperture { distance_m: d });
            }
            let (s, c) = (self.wavenumber * d).sin_cos();
            let a = Complex64::new(c, -s) * self.gain.amplitude(d, self.wavelength_m);
            for (sum, chain) in sums.iter_mut().zip(&self.chains) {
                *sum += a * chain[n];
            }
        }
        for (o, s) in out.iter_mut().zip(sums.iter()) {
            *o = s.norm_sqr();
        }
        Ok(())
    }

    pub fn stream_powers(&self, point: &Point3) -> Result<Vec<f64>> {
        let mut out = alloc::vec![0.0; self.chains.len()];
        self.stream_powers_into(point, &mut out)?;
        Ok(out)
    }

    /// Total power at `point` (sum over streams).
    pub fn power(&self, point: &Point3) -> Result<f64> {
        Ok(self.stream_powers(point)?.iter().sum())
    }
}

/// Sampled power over a grid, in the grid's row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    grid: SamplingGrid,
    power: Vec<f64>,
    per_stream: Option<Vec<Vec<f64>>>,
    normalization: Normalization,
}

impl FieldMap {
    /// Assembles a raw map from point-major stream powers (`samples[i][m]`).
    /// Per-stream maps are kept when there is more than one stream.
    pub fn from_stream_powers(grid: SamplingGrid, samples: Vec<Vec<f64>>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: grid.len(),
                right: samples.len(),
            });
        }
        let streams = samples.first().map_or(1, Vec::len);
        let power = samples.iter().map(|s| s.iter().sum()).collect();
        let per_stream = (streams > 1).then(|| {
            (0..streams)
                .map(|m| samples.iter().map(|s| s[m]).collect())
                .collect()
        });
        Ok(Self {
            grid,
            power,
            per_stream,
            normalization: Normalization::Raw,
        })
    }

    /// Map with a single combined power layer.
    pub fn from_power(grid: SamplingGrid, power: Vec<f64>) -> Result<Self> {
        if power.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: grid.len(),
                right: power.len(),
            });
        }
        if power.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter("power samples must be finite and nonnegative"));
        }
        Ok(Self {
            grid,
            power,
            per_stream: None,
            normalization: Normalization::Raw,
        })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn per_stream(&self) -> Option<&[Vec<f64>]> {
        self.per_stream.as_deref()
    }

    /// Power of stream `m`; for single-stream maps stream 0 is the total.
    pub fn stream(&self, m: usize) -> Option<&[f64]> {
        match &self.per_stream {
            Some(layers) => layers.get(m).map(Vec::as_slice),
            None => (m == 0).then_some(self.power.as_slice()),
        }
    }

    pub fn streams(&self) -> usize {
        self.per_stream.as_ref().map_or(1, Vec::len)
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn max_power(&self) -> f64 {
        self.power.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the largest sample (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.power.iter().enumerate() {
            if p > self.power[best] {
                best = i;
            }
        }
        best
    }

    /// Copy rescaled according to `normalization`. All layers share the
    /// combined map's scale factor.
    pub fn normalized(&self, normalization: Normalization) -> FieldMap {
        let scale = match normalization {
            Normalization::Raw => 1.0,
            Normalization::PeakOne => {
                let peak = self.max_power();
                if peak > 0.0 {
                    1.0 / peak
                } else {
                    1.0
                }
            }
        };
        let mut out = self.clone();
        if normalization == Normalization::PeakOne {
            let peak_idx = self.argmax();
            for p in &mut out.power {
                *p *= scale;
            }
            if self.power[peak_idx] > 0.0 {
                out.power[peak_idx] = 1.0;
            }
            if let Some(layers) = &mut out.per_stream {
                for layer in layers {
                    for p in layer {
                        *p *= scale;
                    }
                }
            }
        }
        out.normalization = normalization;
        out
    }
}

/// Evaluates the received power of `weights` at every point of `grid`.
pub fn evaluate_field(
    array: &UniformPlanarArray,
    weights: &BeamWeights,
    grid: &SamplingGrid,
    gain: GainModel,
) -> Result<FieldMap> {
    let eval = FieldEvaluator::new(array, weights, gain)?;
    let samples = grid
        .points()
        .iter()
        .map(|p| eval.stream_powers(p))
        .collect::<Result<Vec<_>>>()?;
    FieldMap::from_stream_powers(grid.clone(), samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub point: Point3,
    pub power: f64,
}

/// Interior local maxima (8-neighbourhood) at or above
/// `relative_threshold * max(power)`, strongest first.
///
/// On plateaus only the first sample in row-major order counts.
pub fn find_focal_peaks(map: &FieldMap, relative_threshold: f64) -> Result<Vec<Peak>> {
    let grid = map.grid();
    if grid.kind() != GridKind::Plane {
        return Err(Error::NotPlanar);
    }
    if !(relative_threshold > 0.0 && relative_threshold <= 1.0) {
        return Err(Error::InvalidParameter("relative threshold must be in (0, 1]"));
    }
    let (n1, n2) = (grid.axes()[0].samples, grid.axes()[1].samples);
    if n1 < 3 || n2 < 3 {
        return Err(Error::GridTooSmall {
            resolution: n1.min(n2),
        });
    }
    let p = map.power();
    let floor = relative_threshold * map.max_power();
    let mut peaks = Vec::new();
    for i in 1..n1 - 1 {
        for j in 1..n2 - 1 {
            let idx = i * n2 + j;
            let v = p[idx];
            if v < floor || v <= 0.0 {
                continue;
            }
            let mut is_max = true;
            'nb: for di in 0..3 {
                for dj in 0..3 {
                    if di == 1 && dj == 1 {
                        continue;
                    }
                    let nidx = (i + di - 1) * n2 + (j + dj - 1);
                    let q = p[nidx];
                    if q > v || (q == v && nidx < idx) {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                peaks.push(Peak {
                    index: idx,
                    point: grid.point(idx),
                    power: v,
                });
            }
        }
    }
    peaks.sort_by(|a, b| b.power.total_cmp(&a.power).then(a.index.cmp(&b.index)));
    Ok(peaks)
}
