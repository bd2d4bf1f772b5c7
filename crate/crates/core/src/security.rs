//! Physical-layer security regions for multi-focal transmissions.
//!
//! Each focal point gets its own RF chain carrying an independent stream
//! with unit-norm MRT weights; transmit powers `P_m` are calibrated so
//! stream `m` reaches the target SINR at its own focal point:
//!
//! `SINR_m(r) = P_m s_m(r) / (sum_{k != m} P_k s_k(r) + noise)`.
//!
//! A point is secure when no stream can be decoded there, i.e. the largest
//! SINR over streams is below the threshold.

use alloc::vec::Vec;

use num_traits::Float;

use crate::beamforming::{multi_focal_weights, BeamWeights, DUPLICATE_FOCUS_M};
use crate::channel::{steering_vector, GainModel};
use crate::contour::{enclosing, iso_lines, Polyline};
use crate::error::{Error, Result};
use crate::field::{evaluate_field, FieldEvaluator, FieldMap};
use crate::geometry::{GridKind, Point3, SamplingGrid, UniformPlanarArray};

pub const MAX_CALIBRATION_ITERATIONS: usize = 1000;

/// Depth below the threshold at which SINR values are clipped before contour
/// extraction, so `-inf` samples interpolate cleanly.
const CONTOUR_FLOOR_DB: f64 = 300.0;

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn from_db(db: f64) -> f64 {
    10.0.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecurityScenario {
    pub array: UniformPlanarArray,
    pub dfps: Vec<Point3>,
    pub noise_power: f64,
    pub target_snr_db: f64,
    pub threshold_db: f64,
    pub grid: SamplingGrid,
    pub gain: GainModel,
}

impl SecurityScenario {
    pub fn validate(&self) -> Result<()> {
        if self.dfps.is_empty() {
            return Err(Error::InvalidParameter("at least one focal point is required"));
        }
        for (i, a) in self.dfps.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::InvalidParameter("focal points must be finite"));
            }
            for b in &self.dfps[i + 1..] {
                if a.distance(b) < DUPLICATE_FOCUS_M {
                    return Err(Error::DuplicateFocalPoint { first: *a, second: *b });
                }
            }
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::InvalidParameter("noise power must be positive"));
        }
        if !(self.target_snr_db.is_finite() && self.threshold_db.is_finite()) {
            return Err(Error::InvalidParameter("SNR target and threshold must be finite"));
        }
        if self.target_snr_db <= self.threshold_db {
            return Err(Error::InvalidParameter("target SNR must exceed the decoding threshold"));
        }
        Ok(())
    }

    /// One unit-norm MRT chain per focal point.
    pub fn weights(&self) -> Result<BeamWeights> {
        let focals = self
            .dfps
            .iter()
            .map(|p| steering_vector(&self.array, *p, self.gain))
            .collect::<Result<Vec<_>>>()?;
        multi_focal_weights(&focals, &alloc::vec![1.0; focals.len()])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub powers: Vec<f64>,
    /// `coupling[m][k] = s_k(dfp_m)`.
    pub coupling: Vec<Vec<f64>>,
    pub iterations: usize,
}

impl Calibration {
    /// SINR (dB) of stream `m` given unit-power stream gains at a point.
    pub fn sinr_db(&self, stream_gains: &[f64], noise_power: f64, m: usize) -> f64 {
        let interference: f64 = stream_gains
            .iter()
            .zip(&self.powers)
            .enumerate()
            .filter(|(k, _)| *k != m)
            .map(|(_, (s, p))| s * p)
            .sum();
        to_db(self.powers[m] * stream_gains[m] / (interference + noise_power))
    }

    /// SINR of each stream at its own focal point.
    pub fn focal_sinr_db(&self, noise_power: f64) -> Vec<f64> {
        (0..self.powers.len())
            .map(|m| self.sinr_db(&self.coupling[m], noise_power, m))
            .collect()
    }
}

/// Fixed-point iteration `P_m <- g (sum_{k != m} P_k s_k(dfp_m) + noise) / s_m(dfp_m)`
/// for the per-stream powers reaching the target SINR `g` at every focal point.
pub fn calibrate_power(scenario: &SecurityScenario) -> Result<Calibration> {
    scenario.validate()?;
    let eval = FieldEvaluator::new(&scenario.array, &scenario.weights()?, scenario.gain)?;
    let coupling = scenario
        .dfps
        .iter()
        .map(|p| eval.stream_powers(p))
        .collect::<Result<Vec<_>>>()?;
    calibrate_with_coupling(coupling, scenario.noise_power, scenario.target_snr_db)
}

pub fn calibrate_with_coupling(coupling: Vec<Vec<f64>>, noise_power: f64, target_db: f64) -> Result<Calibration> {
    let m = coupling.len();
    let gamma = from_db(target_db);
    if coupling.iter().enumerate().any(|(i, row)| !(row[i] > 0.0)) {
        return Err(Error::InvalidParameter("a focal point receives no power from its own stream"));
    }
    let mut powers: Vec<f64> = (0..m).map(|i| gamma * noise_power / coupling[i][i]).collect();
    for iteration in 1..=MAX_CALIBRATION_ITERATIONS {
        let next: Vec<f64> = (0..m)
            .map(|i| {
                let interference: f64 = (0..m).filter(|&k| k != i).map(|k| powers[k] * coupling[i][k]).sum();
                gamma * (interference + noise_power) / coupling[i][i]
            })
            .collect();
        if next.iter().any(|p| !p.is_finite()) {
            return Err(Error::CalibrationDiverged { iterations: iteration });
        }
        let converged = next
            .iter()
            .zip(&powers)
            .all(|(a, b)| (a - b).abs() <= 1e-13 * a.abs());
        powers = next;
        if converged {
            return Ok(Calibration {
                powers,
                coupling,
                iterations: iteration,
            });
        }
    }
    Err(Error::CalibrationDiverged {
        iterations: MAX_CALIBRATION_ITERATIONS,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecurityMap {
    pub grid: SamplingGrid,
    /// `sinr_db[m][i]` for stream `m` at grid point `i`.
    pub sinr_db: Vec<Vec<f64>>,
    pub max_sinr_db: Vec<f64>,
    pub secure: Vec<bool>,
    pub secure_area_fraction: f64,
    pub threshold_db: f64,
    pub calibration: Calibration,
}

/// Calibrates the scenario and evaluates its SINR map on the scenario grid.
pub fn security_map(scenario: &SecurityScenario) -> Result<SecurityMap> {
    let calibration = calibrate_power(scenario)?;
    let field = evaluate_field(&scenario.array, &scenario.weights()?, &scenario.grid, scenario.gain)?;
    security_map_from_field(scenario, calibration, &field)
}

/// Builds the SINR map from a per-stream field map of the unit-power chains.
pub fn security_map_from_field(
    scenario: &SecurityScenario,
    calibration: Calibration,
    field: &FieldMap,
) -> Result<SecurityMap> {
    let streams = scenario.dfps.len();
    if field.streams() != streams || calibration.powers.len() != streams {
        return Err(Error::ShapeMismatch("stream count differs from focal point count"));
    }
    let n = field.grid().len();
    let layers: Vec<&[f64]> = (0..streams).map(|m| field.stream(m).unwrap_or(&[])).collect();
    let mut sinr_db = alloc::vec![Vec::with_capacity(n); streams];
    let mut gains = alloc::vec![0.0; streams];
    for i in 0..n {
        for (g, layer) in gains.iter_mut().zip(&layers) {
            *g = layer[i];
        }
        for (m, out) in sinr_db.iter_mut().enumerate() {
            out.push(calibration.sinr_db(&gains, scenario.noise_power, m));
        }
    }
    let max_sinr_db: Vec<f64> = (0..n)
        .map(|i| sinr_db.iter().map(|s| s[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let secure: Vec<bool> = max_sinr_db.iter().map(|&s| s < scenario.threshold_db).collect();
    let secure_area_fraction = secure.iter().filter(|&&s| s).count() as f64 / n as f64;
    Ok(SecurityMap {
        grid: field.grid().clone(),
        sinr_db,
        max_sinr_db,
        secure,
        secure_area_fraction,
        threshold_db: scenario.threshold_db,
        calibration,
    })
}

/// Closed iso-contours of the max-stream SINR at the decoding threshold,
/// in the map's axis offsets. Insecure regions touching the window edge are
/// closed along the border.
pub fn secure_boundary(map: &SecurityMap) -> Result<Vec<Polyline>> {
    if map.grid.kind() != GridKind::Plane {
        return Err(Error::NotPlanar);
    }
    let floor = map.threshold_db - CONTOUR_FLOOR_DB;
    let values: Vec<f64> = map.max_sinr_db.iter().map(|v| v.max(floor)).collect();
    let xs = map.grid.axes()[0].offsets();
    let ys = map.grid.axes()[1].offsets();
    Ok(iso_lines(&values, &xs, &ys, map.threshold_db))
}

/// Area of the smallest boundary polyline enclosing `dfp`, if any.
pub fn enclosed_area(map: &SecurityMap, boundary: &[Polyline], dfp: Point3) -> Option<f64> {
    enclosing(boundary, map.grid.project(&dfp)).map(Polyline::area)
}
