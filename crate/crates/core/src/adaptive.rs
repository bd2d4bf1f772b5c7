//! CSI-free spot focusing with sub-array power feedback.
//!
//! The array is split into congruent rectangular tiles. In every epoch each
//! tile improves its own pre-synchronisation phases `raw_phases` using only
//! power feedback from the user equipment (see [`PowerFeedback`]); then the
//! measured arrival phase `theta_m` of every tile is subtracted from its
//! elements so all tiles add coherently at the focal point.
//!
//! Phases are stored as indices `k` on the `2^bits` grid `2 pi k / 2^bits`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods once std is linked
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beamforming::{grid_phase, mrt_weights, nearest_phase_index, quantize_phases, MAX_PHASE_BITS};
use crate::channel::{steering_vector, GainModel};
use crate::error::{Error, Result};
use crate::geometry::{Point3, UniformPlanarArray};

/// Congruent rectangular tiling of an array's element grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubArrayPartition {
    rows: usize,
    cols: usize,
    tile_rows: usize,
    tile_cols: usize,
    tiles: Vec<Vec<usize>>,
}

impl SubArrayPartition {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tile_rows(&self) -> usize {
        self.tile_rows
    }

    pub fn tile_cols(&self) -> usize {
        self.tile_cols
    }

    pub fn num_tiles(&self) -> usize {
        self.tiles.len()
    }

    pub fn num_elements(&self) -> usize {
        self.rows * self.cols
    }

    /// Row-major element indices of tile `m`.
    pub fn tile(&self, m: usize) -> &[usize] {
        &self.tiles[m]
    }

    pub fn tiles(&self) -> &[Vec<usize>] {
        &self.tiles
    }

    fn same_shape(&self, other: &SubArrayPartition) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.tile_rows == other.tile_rows
            && self.tile_cols == other.tile_cols
    }
}

/// Row-major tiling of `array` into `tile_rows x tile_cols` blocks.
pub fn partition(array: &UniformPlanarArray, tile_rows: usize, tile_cols: usize) -> Result<SubArrayPartition> {
    let (rows, cols) = (array.rows(), array.cols());
    if tile_rows == 0 || tile_cols == 0 || rows % tile_rows != 0 || cols % tile_cols != 0 {
        return Err(Error::IndivisibleTiling {
            rows,
            cols,
            tile_rows,
            tile_cols,
        });
    }
    let mut tiles = Vec::with_capacity((rows / tile_rows) * (cols / tile_cols));
    for ti in 0..rows / tile_rows {
        for tj in 0..cols / tile_cols {
            let mut tile = Vec::with_capacity(tile_rows * tile_cols);
            for i in ti * tile_rows..(ti + 1) * tile_rows {
                for j in tj * tile_cols..(tj + 1) * tile_cols {
                    tile.push(i * cols + j);
                }
            }
            tiles.push(tile);
        }
    }
    Ok(SubArrayPartition {
        rows,
        cols,
        tile_rows,
        tile_cols,
        tiles,
    })
}

/// One feedback report from the user equipment.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub combined_power: f64,
    /// `p_m`: power the tile alone would deliver.
    pub tile_power: Vec<f64>,
    /// `theta_m`: arrival phase of the tile's contribution, in `(-pi, pi]`.
    pub tile_phase: Vec<f64>,
}

/// Black-box power feedback. This is the only channel access the optimiser
/// gets; every call counts as one query.
pub trait PowerFeedback {
    fn num_elements(&self) -> usize;

    fn measure(&mut self, phases: &[u16]) -> Measurement;
}

/// Simulated UE at a focal point, reporting the power of phase-only weights
/// `exp(j phi_n) / sqrt(N)` (the same unit-norm budget as MRT).
#[derive(Debug, Clone)]
pub struct SimulatedUe {
    channel: Vec<Complex64>,
    tiles: Vec<Vec<usize>>,
    phasors: Vec<Complex64>,
    queries: u64,
}

impl SimulatedUe {
    pub fn new(
        array: &UniformPlanarArray,
        partition: &SubArrayPartition,
        dfp: Point3,
        gain: GainModel,
        bits: u32,
    ) -> Result<Self> {
        check_bits(bits)?;
        if partition.rows != array.rows() || partition.cols != array.cols() {
            return Err(Error::ShapeMismatch("partition does not match the array"));
        }
        let a = steering_vector(array, dfp, gain)?;
        let scale = 1.0 / (a.len() as f64).sqrt();
        let levels = 1u32 << bits;
        Ok(Self {
            channel: a.entries().iter().map(|x| x * scale).collect(),
            tiles: partition.tiles.clone(),
            phasors: (0..levels).map(|k| Complex64::from_polar(1.0, grid_phase(k, bits))).collect(),
            queries: 0,
        })
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl PowerFeedback for SimulatedUe {
    fn num_elements(&self) -> usize {
        self.channel.len()
    }

    fn measure(&mut self, phases: &[u16]) -> Measurement {
        assert_eq!(phases.len(), self.channel.len(), "phase vector length");
        self.queries += 1;
        let mut total = Complex64::new(0.0, 0.0);
        let mut tile_power = Vec::with_capacity(self.tiles.len());
        let mut tile_phase = Vec::with_capacity(self.tiles.len());
        for tile in &self.tiles {
            let sum: Complex64 = tile
                .iter()
                .map(|&n| self.channel[n] * self.phasors[phases[n] as usize])
                .sum();
            total += sum;
            tile_power.push(sum.norm_sqr());
            tile_phase.push(sum.arg());
        }
        Measurement {
            combined_power: total.norm_sqr(),
            tile_power,
            tile_phase,
        }
    }
}

fn check_bits(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_PHASE_BITS {
        return Err(Error::InvalidParameter("phase bits must be in 1..=16"));
    }
    Ok(())
}

/// Single simulated feedback report for `phases` at `dfp`.
pub fn measure_power(
    array: &UniformPlanarArray,
    partition: &SubArrayPartition,
    phases: &[u16],
    bits: u32,
    dfp: Point3,
    gain: GainModel,
) -> Result<Measurement> {
    let mut ue = SimulatedUe::new(array, partition, dfp, gain, bits)?;
    if phases.len() != ue.num_elements() {
        return Err(Error::LengthMismatch {
            left: ue.num_elements(),
            right: phases.len(),
        });
    }
    if phases.iter().any(|&k| u32::from(k) >= 1 << bits) {
        return Err(Error::InvalidParameter("phase index outside the grid"));
    }
    Ok(ue.measure(phases))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub combined_power: f64,
    /// Cumulative feedback queries at the end of the epoch.
    pub queries: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRun {
    pub partition: SubArrayPartition,
    pub phase_bits: u32,
    /// Pre-synchronisation phases, as tuned by the tile agents.
    pub raw_phases: Vec<u16>,
    /// Deployed phases after synchronisation.
    pub phases: Vec<u16>,
    pub tile_power: Vec<f64>,
    pub tile_phase: Vec<f64>,
    /// Rough channel estimate used for initialisation, if any.
    pub rough_csi: Option<Vec<Complex64>>,
    pub log: Vec<EpochRecord>,
    pub seed: u64,
    pub queries: u64,
}

impl AdaptiveRun {
    pub fn new(partition: SubArrayPartition, phase_bits: u32, raw_phases: Vec<u16>, seed: u64) -> Result<Self> {
        check_bits(phase_bits)?;
        if raw_phases.len() != partition.num_elements() {
            return Err(Error::LengthMismatch {
                left: partition.num_elements(),
                right: raw_phases.len(),
            });
        }
        if raw_phases.iter().any(|&k| u32::from(k) >= 1 << phase_bits) {
            return Err(Error::InvalidParameter("phase index outside the grid"));
        }
        let tiles = partition.num_tiles();
        Ok(Self {
            phases: raw_phases.clone(),
            partition,
            phase_bits,
            raw_phases,
            tile_power: alloc::vec![0.0; tiles],
            tile_phase: alloc::vec![0.0; tiles],
            rough_csi: None,
            log: Vec::new(),
            seed,
            queries: 0,
        })
    }

    pub fn final_power(&self) -> f64 {
        self.log.last().map_or(0.0, |r| r.combined_power)
    }

    /// Records a feedback report taken on the raw phases.
    pub fn observe(&mut self, m: &Measurement) {
        self.tile_power.clone_from(&m.tile_power);
        self.tile_phase.clone_from(&m.tile_phase);
    }
}

/// Deployed phases `phi_mn = raw_mn - theta_m`, with `theta_m` rounded to the
/// nearest grid point so the result stays on the grid.
pub fn synchronized_phases(run: &AdaptiveRun) -> Vec<u16> {
    let levels = 1u32 << run.phase_bits;
    let mut out = run.raw_phases.clone();
    for (tile, &theta) in run.partition.tiles().iter().zip(&run.tile_phase) {
        let shift = nearest_phase_index(theta, run.phase_bits);
        for &n in tile {
            out[n] = ((u32::from(out[n]) + levels - shift) % levels) as u16;
        }
    }
    out
}

/// Replaces the deployed phases with the synchronised raw phases.
pub fn synchronize(run: &mut AdaptiveRun) {
    run.phases = synchronized_phases(run);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TileOutcome {
    pub queries: u64,
    pub accepted_moves: usize,
    pub converged: bool,
}

/// Per-tile policy producing the next raw phases from power feedback.
pub trait TileAgent {
    /// Improves the raw phases of tile `tile` using at most `budget` queries.
    /// Queries must use `snapshot` for every element outside the tile.
    fn optimize_tile(
        &mut self,
        feedback: &mut dyn PowerFeedback,
        partition: &SubArrayPartition,
        snapshot: &[u16],
        raw_phases: &mut [u16],
        tile: usize,
        budget: u64,
    ) -> TileOutcome;
}

#[derive(Debug, Clone, Default)]
struct Cursor {
    pass: u64,
    position: usize,
    order: Vec<usize>,
    changed: bool,
    converged: bool,
    current: Option<f64>,
    // State of the element sweep in progress.
    trial: u32,
    best: Option<(u16, f64)>,
}

/// Greedy coordinate ascent: visit the tile's elements in a seeded random
/// order, try every grid phase for the element and keep the one with the
/// largest tile power. Passes repeat until one changes nothing.
///
/// Sweeps may be split across calls; state persists between epochs.
#[derive(Debug, Clone)]
pub struct CoordinateAscent {
    bits: u32,
    seed: u64,
    cursors: Vec<Cursor>,
}

impl CoordinateAscent {
    pub fn new(bits: u32, seed: u64, tiles: usize) -> Self {
        Self {
            bits,
            seed,
            cursors: alloc::vec![Cursor::default(); tiles],
        }
    }

    pub fn converged(&self, tile: usize) -> bool {
        self.cursors[tile].converged
    }

    pub fn all_converged(&self) -> bool {
        self.cursors.iter().all(|c| c.converged)
    }
}

fn mix(seed: u64, tile: u64, pass: u64) -> u64 {
    // splitmix64 finaliser over a combined key
    let mut z = seed ^ tile.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ pass.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl TileAgent for CoordinateAscent {
    fn optimize_tile(
        &mut self,
        feedback: &mut dyn PowerFeedback,
        partition: &SubArrayPartition,
        snapshot: &[u16],
        raw_phases: &mut [u16],
        tile: usize,
        budget: u64,
    ) -> TileOutcome {
        let levels = 1u32 << self.bits;
        let elements = partition.tile(tile);
        let mut config = snapshot.to_vec();
        for &n in elements {
            config[n] = raw_phases[n];
        }
        let cursor = &mut self.cursors[tile];
        let mut out = TileOutcome::default();
        let mut query = |config: &[u16], out: &mut TileOutcome| {
            out.queries += 1;
            feedback.measure(config).tile_power[tile]
        };

        if cursor.current.is_none() {
            if budget == 0 {
                return out;
            }
            cursor.current = Some(query(&config, &mut out));
        }
        while !cursor.converged && out.queries < budget {
            if cursor.position == 0 && cursor.trial == 0 {
                cursor.order = elements.to_vec();
                let mut rng = ChaCha8Rng::seed_from_u64(mix(self.seed, tile as u64, cursor.pass));
                cursor.order.shuffle(&mut rng);
                cursor.changed = false;
            }
            let n = cursor.order[cursor.position];
            let start = config[n];
            let current = cursor.current.unwrap_or(0.0);
            if cursor.trial == 0 {
                cursor.best = Some((start, current));
                cursor.trial = 1;
            }
            while cursor.trial < levels && out.queries < budget {
                let k = ((u32::from(start) + cursor.trial) % levels) as u16;
                config[n] = k;
                let p = query(&config, &mut out);
                if let Some((_, best)) = cursor.best {
                    if p > best {
                        cursor.best = Some((k, p));
                    }
                }
                cursor.trial += 1;
            }
            let (best_k, best_p) = cursor.best.unwrap_or((start, current));
            if cursor.trial < levels {
                // Budget ran out mid-sweep; resume next call.
                config[n] = start;
                break;
            }
            config[n] = best_k;
            if best_k != start {
                raw_phases[n] = best_k;
                cursor.current = Some(best_p);
                cursor.changed = true;
                out.accepted_moves += 1;
            }
            cursor.trial = 0;
            cursor.best = None;
            cursor.position += 1;
            if cursor.position == cursor.order.len() {
                cursor.position = 0;
                cursor.pass += 1;
                if !cursor.changed {
                    cursor.converged = true;
                }
            }
        }
        out.converged = cursor.converged;
        out
    }
}

/// Initial raw phases for a run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitMode {
    /// Uniformly random grid indices.
    Random,
    /// Conjugate phases of a rough channel estimate whose per-element phase
    /// error is uniform in `[-noise_rad, noise_rad]`.
    RoughCsi { noise_rad: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SbfConfig {
    pub tile_rows: usize,
    pub tile_cols: usize,
    pub phase_bits: u32,
    /// Feedback queries each tile may spend per epoch.
    pub queries_per_epoch: u64,
    pub max_epochs: usize,
    pub seed: u64,
    pub init: InitMode,
    pub gain: GainModel,
    /// Stop once the logged power improves by less than this relative amount
    /// over [`SbfConfig::STALL_EPOCHS`] epochs.
    pub stall_tolerance: f64,
}

impl SbfConfig {
    pub const STALL_EPOCHS: usize = 3;

    pub fn new(tile_rows: usize, tile_cols: usize) -> Self {
        Self {
            tile_rows,
            tile_cols,
            phase_bits: 4,
            queries_per_epoch: 64,
            max_epochs: 200,
            seed: 0,
            init: InitMode::Random,
            gain: GainModel::InverseDistance,
            stall_tolerance: 1e-4,
        }
    }
}

/// Runs lockstep epochs of tile optimisation and synchronisation against
/// `feedback`, starting from `initial` raw phases.
///
/// Epoch 0 records the synchronised initial configuration. A new
/// configuration is deployed only if it does not lower the measured power,
/// so the log is nondecreasing.
pub fn run_sbf_with<F, A>(
    feedback: &mut F,
    agent: &mut A,
    partition: SubArrayPartition,
    config: &SbfConfig,
    initial: Vec<u16>,
) -> Result<AdaptiveRun>
where
    F: PowerFeedback,
    A: TileAgent,
{
    if config.queries_per_epoch == 0 || config.max_epochs == 0 {
        return Err(Error::InvalidParameter("query budget and epoch count must be positive"));
    }
    if feedback.num_elements() != partition.num_elements() {
        return Err(Error::ShapeMismatch("feedback and partition sizes differ"));
    }
    let mut run = AdaptiveRun::new(partition, config.phase_bits, initial, config.seed)?;

    let m = feedback.measure(&run.raw_phases);
    run.observe(&m);
    synchronize(&mut run);
    let deployed = feedback.measure(&run.phases);
    run.queries += 2;
    run.log.push(EpochRecord {
        epoch: 0,
        combined_power: deployed.combined_power,
        queries: run.queries,
    });

    for epoch in 1..=config.max_epochs {
        let snapshot = run.phases.clone();
        let mut converged = true;
        for tile in 0..run.partition.num_tiles() {
            let outcome = agent.optimize_tile(
                feedback,
                &run.partition,
                &snapshot,
                &mut run.raw_phases,
                tile,
                config.queries_per_epoch,
            );
            run.queries += outcome.queries;
            converged &= outcome.converged;
        }
        let m = feedback.measure(&run.raw_phases);
        run.observe(&m);
        let candidate = synchronized_phases(&run);
        let power = feedback.measure(&candidate).combined_power;
        run.queries += 2;
        let last = run.final_power();
        let logged = if power >= last {
            run.phases = candidate;
            power
        } else {
            last
        };
        run.log.push(EpochRecord {
            epoch,
            combined_power: logged,
            queries: run.queries,
        });
        if converged {
            break;
        }
        if epoch >= SbfConfig::STALL_EPOCHS {
            let before = run.log[epoch - SbfConfig::STALL_EPOCHS].combined_power;
            if logged - before <= config.stall_tolerance * before {
                break;
            }
        }
    }
    Ok(run)
}

/// Simulated adaptive focusing of `array` at `dfp`.
///
/// A `warm_start` run supplies the initial raw phases (its deployed phases)
/// and must share the tiling and phase resolution; otherwise the phases come
/// from `config.init`.
pub fn run_sbf(
    array: &UniformPlanarArray,
    dfp: Point3,
    config: &SbfConfig,
    warm_start: Option<&AdaptiveRun>,
) -> Result<AdaptiveRun> {
    let partition = partition(array, config.tile_rows, config.tile_cols)?;
    let mut ue = SimulatedUe::new(array, &partition, dfp, config.gain, config.phase_bits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let levels = 1u32 << config.phase_bits;
    let mut rough = None;
    let initial: Vec<u16> = match warm_start {
        Some(prev) => {
            if !prev.partition.same_shape(&partition) || prev.phase_bits != config.phase_bits {
                return Err(Error::ShapeMismatch("warm start uses a different tiling or resolution"));
            }
            prev.phases.clone()
        }
        None => match config.init {
            InitMode::Random => (0..partition.num_elements())
                .map(|_| rng.random_range(0..levels) as u16)
                .collect(),
            InitMode::RoughCsi { noise_rad } => {
                if !(noise_rad >= 0.0 && noise_rad.is_finite()) {
                    return Err(Error::InvalidParameter("CSI noise must be finite and nonnegative"));
                }
                let a = steering_vector(array, dfp, config.gain)?;
                let estimate: Vec<Complex64> = a
                    .entries()
                    .iter()
                    .map(|x| {
                        let err = if noise_rad > 0.0 {
                            rng.random_range(-noise_rad..=noise_rad)
                        } else {
                            0.0
                        };
                        Complex64::from_polar(1.0, x.arg() + err)
                    })
                    .collect();
                let phases = estimate
                    .iter()
                    .map(|h| nearest_phase_index(-h.arg(), config.phase_bits) as u16)
                    .collect();
                rough = Some(estimate);
                phases
            }
        },
    };
    let mut agent = CoordinateAscent::new(config.phase_bits, config.seed, partition.num_tiles());
    let mut run = run_sbf_with(&mut ue, &mut agent, partition, config, initial)?;
    run.rough_csi = rough;
    Ok(run)
}

/// Focal power of phase-only MRT quantised to `bits`, the reference the
/// adaptive scheme is measured against.
pub fn quantized_mrt_bound(array: &UniformPlanarArray, dfp: Point3, bits: u32, gain: GainModel) -> Result<f64> {
    let a = steering_vector(array, dfp, gain)?;
    let w = quantize_phases(&mrt_weights(&a, true), bits)?;
    Ok(a.response(w.weights())?.norm_sqr())
}

/// Grid indices of quantised phase-only MRT at `dfp`.
pub fn quantized_mrt_phases(array: &UniformPlanarArray, dfp: Point3, bits: u32, gain: GainModel) -> Result<Vec<u16>> {
    check_bits(bits)?;
    let a = steering_vector(array, dfp, gain)?;
    Ok(a.entries()
        .iter()
        .map(|x| nearest_phase_index(-x.arg(), bits) as u16)
        .collect())
}

/// First epoch whose logged power reaches `fraction` of the run's final power.
pub fn epochs_to_fraction(log: &[EpochRecord], fraction: f64) -> Option<usize> {
    let target = fraction * log.last()?.combined_power;
    log.iter().find(|r| r.combined_power >= target).map(|r| r.epoch)
}

/// Upper bound `(sum_m sqrt(p_m))^2` on the combined power.
pub fn coherent_bound(tile_power: &[f64]) -> f64 {
    let s: f64 = tile_power.iter().map(|p| p.sqrt()).sum();
    s * s
}

/// Largest arrival-phase residual after synchronisation at `bits`.
pub fn sync_tolerance(bits: u32) -> f64 {
    PI / f64::from(1u32 << bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::wavelength_for;
    use approx::assert_relative_eq;

    fn array(side: usize) -> UniformPlanarArray {
        UniformPlanarArray::square(side, 0.5, wavelength_for(28e9)).unwrap()
    }

    #[test]
    fn tiling_counts() {
        assert_eq!(partition(&array(60), 6, 6).unwrap().num_tiles(), 100);
        let id = partition(&array(2), 2, 2).unwrap();
        assert_eq!(id.num_tiles(), 1);
        assert_eq!(id.tile(0), &[0, 1, 2, 3]);
        assert!(matches!(partition(&array(60), 7, 7), Err(Error::IndivisibleTiling { .. })));
    }

    #[test]
    fn tiles_cover_exactly_once() {
        let p = partition(&array(12), 3, 4).unwrap();
        let mut seen = alloc::vec![0u8; 144];
        for t in p.tiles() {
            assert_eq!(t.len(), 12);
            for &n in t {
                seen[n] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn single_element_measurement() {
        let arr = array(1);
        let p = partition(&arr, 1, 1).unwrap();
        let dfp = Point3::new(0.0, 1.0, 0.0);
        let m = measure_power(&arr, &p, &[3], 2, dfp, GainModel::InverseDistance).unwrap();
        let a = steering_vector(&arr, dfp, GainModel::InverseDistance).unwrap().entries()[0];
        assert_relative_eq!(m.tile_power[0], a.norm_sqr(), max_relative = 1e-12);
        let expected = a.arg() + 3.0 * PI / 2.0;
        let diff = (m.tile_phase[0] - expected) / (2.0 * PI);
        assert!((diff - diff.round()).abs() < 1e-12);
        assert!(measure_power(&arr, &p, &[4], 2, dfp, GainModel::Unit).is_err());
    }

    #[test]
    fn one_element_one_bit_converges_in_two_queries() {
        let arr = array(1);
        let p = partition(&arr, 1, 1).unwrap();
        let dfp = Point3::new(0.0, 1.0, 0.0);
        let mut ue = SimulatedUe::new(&arr, &p, dfp, GainModel::Unit, 1).unwrap();
        // With one element both phases give equal power; the agent keeps the start.
        let mut agent = CoordinateAscent::new(1, 7, 1);
        let mut raw = alloc::vec![1u16];
        let out = agent.optimize_tile(&mut ue, &p, &[1], &mut raw, 0, 2);
        assert!(out.queries <= 2);
        assert_eq!(out.accepted_moves, 0);
    }

    #[test]
    fn destructive_pair_fixed_within_two_queries() {
        // Two boresight-symmetric elements: equal entries, so phases {0, pi}
        // cancel and the better choice is to align them.
        let arr = UniformPlanarArray::square(1, 0.5, 0.01).unwrap().with_size(2, 1).unwrap();
        let p = partition(&arr, 2, 1).unwrap();
        let dfp = Point3::new(0.0, 1.0, 0.0);
        let mut ue = SimulatedUe::new(&arr, &p, dfp, GainModel::Unit, 1).unwrap();
        let mut agent = CoordinateAscent::new(1, 3, 1);
        let mut raw = alloc::vec![0u16, 1];
        let out = agent.optimize_tile(&mut ue, &p, &[0, 1], &mut raw, 0, 2);
        assert_eq!(out.queries, 2);
        assert_eq!(out.accepted_moves, 1);
        assert_eq!(raw[0], raw[1]);
        // Channel entries carry 1/sqrt(N), so two aligned elements give 2.
        assert_relative_eq!(ue.measure(&raw).combined_power, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn sync_shifts_by_rounded_theta() {
        let arr = array(2);
        let p = partition(&arr, 1, 2).unwrap();
        let mut run = AdaptiveRun::new(p, 3, alloc::vec![0, 1, 2, 7], 0).unwrap();
        run.tile_phase = alloc::vec![PI / 4.0, -PI / 2.0];
        synchronize(&mut run);
        assert_eq!(run.phases, alloc::vec![7, 0, 4, 1]);
    }

    #[test]
    fn shape_mismatch_for_warm_start() {
        let arr = array(4);
        let dfp = Point3::new(0.0, 1.0, 0.0);
        let mut cfg = SbfConfig::new(2, 2);
        cfg.max_epochs = 2;
        let prev = run_sbf(&arr, dfp, &cfg, None).unwrap();
        let other = SbfConfig::new(4, 4);
        assert!(matches!(run_sbf(&arr, dfp, &other, Some(&prev)), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn epochs_to_fraction_finds_first() {
        let log: Vec<EpochRecord> = [0.1, 0.5, 0.96, 1.0]
            .iter()
            .enumerate()
            .map(|(epoch, &combined_power)| EpochRecord {
                epoch,
                combined_power,
                queries: 0,
            })
            .collect();
        assert_eq!(epochs_to_fraction(&log, 0.95), Some(2));
        assert_eq!(epochs_to_fraction(&[], 0.95), None);
    }
}
