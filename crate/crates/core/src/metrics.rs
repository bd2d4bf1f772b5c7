//! Spot-quality measures: half-power beamwidth, beamfocusing radius and the
//! spacing / array-size trade-off sweeps.

use alloc::vec::Vec;


use crate::beamforming::mrt_weights;
use crate::channel::{steering_vector, GainModel};
use crate::error::{Error, Result, Side};
use crate::field::{evaluate_field, find_focal_peaks, FieldEvaluator, FieldMap};
use crate::geometry::{GridAxis, GridKind, Point3, SamplingGrid, UniformPlanarArray};

/// Result of a half-power beamwidth measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hpbw {
    pub width_m: f64,
    /// Interpolated half-power crossings.
    pub left_m: f64,
    pub right_m: f64,
    pub peak_position_m: f64,
    /// More than one local maximum above 0.9 of the peak.
    pub multiple_peaks: bool,
}

/// Width between the two half-power crossings around the global maximum of
/// a sampled profile, each crossing found by linear interpolation.
pub fn hpbw(positions: &[f64], powers: &[f64]) -> Result<Hpbw> {
    if positions.len() != powers.len() {
        return Err(Error::LengthMismatch {
            left: positions.len(),
            right: powers.len(),
        });
    }
    let n = powers.len();
    if n < 5 {
        return Err(Error::InvalidParameter("profile needs at least 5 samples"));
    }
    if positions.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("profile positions must be strictly increasing"));
    }
    if powers.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("profile powers must be finite"));
    }
    let mut peak = 0;
    for (i, &p) in powers.iter().enumerate() {
        if p > powers[peak] {
            peak = i;
        }
    }
    let half = powers[peak] / 2.0;
    if peak == 0 || powers[..peak].iter().all(|&p| p >= half) {
        return Err(Error::NoCrossing { side: Side::Left });
    }
    if peak == n - 1 || powers[peak + 1..].iter().all(|&p| p >= half) {
        return Err(Error::NoCrossing { side: Side::Right });
    }

    let interp = |i: usize, j: usize| {
        let (p0, p1) = (powers[i], powers[j]);
        positions[i] + (half - p0) / (p1 - p0) * (positions[j] - positions[i])
    };
    let mut j = peak;
    while powers[j] >= half {
        j -= 1;
    }
    let left_m = interp(j, j + 1);
    let mut k = peak;
    while powers[k] >= half {
        k += 1;
    }
    let right_m = interp(k - 1, k);

    let strong = 0.9 * powers[peak];
    let local_maxima = (1..n - 1)
        .filter(|&i| powers[i] >= strong && powers[i] >= powers[i - 1] && powers[i] > powers[i + 1])
        .count();
    Ok(Hpbw {
        width_m: right_m - left_m,
        left_m,
        right_m,
        peak_position_m: positions[peak],
        multiple_peaks: local_maxima > 1,
    })
}

/// Beamfocusing radius on a planar reference window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bfr {
    pub radius_m: f64,
    pub eta: f64,
    /// Share of the window power sitting on the outermost ring of samples.
    pub boundary_fraction: f64,
}

impl Bfr {
    /// Fraction of boundary power above which the window likely truncates
    /// the reference plane.
    pub const BOUNDARY_WARNING: f64 = 0.1;

    pub fn truncated(&self) -> bool {
        self.boundary_fraction > Self::BOUNDARY_WARNING
    }
}

/// Smallest radius around `dfp` whose enclosed samples carry at least `eta`
/// of the window's total power. Samples are ordered by distance, ties by
/// row-major index.
pub fn bfr(map: &FieldMap, dfp: Point3, eta: f64) -> Result<Bfr> {
    let grid = map.grid();
    if grid.kind() != GridKind::Plane {
        return Err(Error::NotPlanar);
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter("eta must lie in (0, 1)"));
    }
    if !grid.contains_projection(&dfp) {
        return Err(Error::InvalidParameter("focal point lies outside the window"));
    }
    let power = map.power();
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("map carries no power"));
    }
    let mut order: Vec<(f64, usize)> = (0..grid.len()).map(|i| (grid.point(i).distance(&dfp), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let target = eta * total;
    let mut acc = 0.0;
    let mut radius_m = order.last().map_or(0.0, |o| o.0);
    for &(d, i) in &order {
        acc += power[i];
        if acc >= target {
            radius_m = d;
            break;
        }
    }
    let (n1, n2) = (grid.axes()[0].samples, grid.axes()[1].samples);
    let boundary: f64 = (0..grid.len())
        .filter(|&i| {
            let (a, b) = grid.unflatten(i);
            a == 0 || b == 0 || a == n1 - 1 || b == n2 - 1
        })
        .map(|i| power[i])
        .sum();
    Ok(Bfr {
        radius_m,
        eta,
        boundary_fraction: boundary / total,
    })
}

/// How the line profile through the focal point is laid out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileMode {
    /// Straight line through the focal point along a fixed direction.
    Axis(Point3),
    /// Ray from the array centre through the focal point.
    Radial,
}

/// Line profile specification: `samples` points spanning `half_length_m`
/// either side of the focal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileLine {
    pub mode: ProfileMode,
    pub half_length_m: f64,
    pub samples: usize,
}

impl Default for ProfileLine {
    fn default() -> Self {
        Self {
            mode: ProfileMode::Axis(Point3::Y),
            half_length_m: 0.5,
            samples: 1001,
        }
    }
}

impl ProfileLine {
    pub fn grid(&self, array: &UniformPlanarArray, dfp: Point3) -> Result<SamplingGrid> {
        let direction = match self.mode {
            ProfileMode::Axis(dir) => dir
                .normalized()
                .ok_or(Error::InvalidParameter("profile direction must be nonzero"))?,
            ProfileMode::Radial => (dfp - array.center())
                .normalized()
                .ok_or(Error::InvalidParameter("focal point coincides with the array centre"))?,
        };
        SamplingGrid::line(
            dfp,
            GridAxis::new(direction, -self.half_length_m, self.half_length_m, self.samples),
        )
    }

    pub fn widened(&self, factor: f64) -> Self {
        Self {
            half_length_m: self.half_length_m * factor,
            ..*self
        }
    }
}

/// Power along `line` for MRT focused at `dfp`. Positions are the line
/// offsets relative to the focal point.
pub fn mrt_profile(
    array: &UniformPlanarArray,
    dfp: Point3,
    line: &ProfileLine,
    gain: GainModel,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = line.grid(array, dfp)?;
    let a = steering_vector(array, dfp, gain)?;
    let map = evaluate_field(array, &mrt_weights(&a, false), &grid, gain)?;
    Ok((grid.axes()[0].offsets(), map.power().to_vec()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingPoint {
    pub spacing_wavelengths: f64,
    /// Power at the focal point with unit-norm MRT weights.
    pub dfp_power: f64,
    /// `dfp_power` relative to the reference spacing (0.5 when swept).
    pub relative_power: f64,
    pub hpbw_m: f64,
}

/// Peak power and HPBW of MRT at `dfp` for each interelement spacing
/// (in wavelengths) applied to `template`.
pub fn spacing_tradeoff(
    template: &UniformPlanarArray,
    dfp: Point3,
    spacings: &[f64],
    line: &ProfileLine,
    gain: GainModel,
) -> Result<Vec<SpacingPoint>> {
    if spacings.is_empty() {
        return Err(Error::InvalidParameter("spacing list must be nonempty"));
    }
    if spacings.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidParameter("spacings must be positive"));
    }
    let mut rows = Vec::with_capacity(spacings.len());
    for &s in spacings {
        let array = template.with_spacing(s * template.wavelength_m())?;
        let a = steering_vector(&array, dfp, gain)?;
        let w = mrt_weights(&a, false);
        let dfp_power = FieldEvaluator::new(&array, &w, gain)?.power(&dfp)?;
        let (pos, pow) = mrt_profile(&array, dfp, line, gain)?;
        rows.push(SpacingPoint {
            spacing_wavelengths: s,
            dfp_power,
            relative_power: 0.0,
            hpbw_m: hpbw(&pos, &pow)?.width_m,
        });
    }
    let reference = rows
        .iter()
        .find(|r| (r.spacing_wavelengths - 0.5).abs() < 1e-12)
        .unwrap_or(&rows[0])
        .dfp_power;
    for r in &mut rows {
        r.relative_power = r.dfp_power / reference;
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizePoint {
    pub side: usize,
    pub hpbw: Result<Hpbw>,
}

/// HPBW of MRT at `dfp` for square arrays of each side length. A profile
/// without a half-power crossing is retried once on a line twice as long.
pub fn size_tradeoff(
    template: &UniformPlanarArray,
    dfp: Point3,
    sides: &[usize],
    line: &ProfileLine,
    gain: GainModel,
) -> Result<Vec<SizePoint>> {
    if sides.is_empty() {
        return Err(Error::InvalidParameter("size list must be nonempty"));
    }
    let mut out = Vec::with_capacity(sides.len());
    for &side in sides {
        let array = template.with_size(side, side)?;
        let measure = |l: &ProfileLine| -> Result<Hpbw> {
            let (pos, pow) = mrt_profile(&array, dfp, l, gain)?;
            hpbw(&pos, &pow)
        };
        let hpbw = match measure(line) {
            Err(Error::NoCrossing { .. }) => measure(&line.widened(2.0)),
            other => other,
        };
        out.push(SizePoint { side, hpbw });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotMetrics {
    pub peak_power: f64,
    pub peak_location: Point3,
    /// HPBW along the map's second axis through the peak.
    pub hpbw_m: Option<f64>,
    pub bfr: Option<Bfr>,
    pub num_significant_peaks: usize,
}

/// Collects the spot measures of a planar map around `dfp`.
pub fn spot_metrics(map: &FieldMap, dfp: Point3, eta: f64, peak_threshold: f64) -> Result<SpotMetrics> {
    let grid = map.grid();
    if grid.kind() != GridKind::Plane {
        return Err(Error::NotPlanar);
    }
    let peak_idx = map.argmax();
    let (i, _) = grid.unflatten(peak_idx);
    let n2 = grid.axes()[1].samples;
    let row = &map.power()[i * n2..(i + 1) * n2];
    let hpbw_m = hpbw(&grid.axes()[1].offsets(), row).ok().map(|h| h.width_m);
    let bfr = bfr(map, dfp, eta).ok();
    Ok(SpotMetrics {
        peak_power: map.max_power(),
        peak_location: grid.point(peak_idx),
        hpbw_m,
        bfr,
        num_significant_peaks: find_focal_peaks(map, peak_threshold)?.len(),
    })
}
