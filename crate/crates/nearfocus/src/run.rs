//! Dataset commands, computed in memory.

use nearfocus_core::adaptive::{
    epochs_to_fraction, partition, quantized_mrt_bound, run_sbf, AdaptiveRun, EpochRecord, PowerFeedback,
    SimulatedUe,
};
use nearfocus_core::beamforming::{mrt_weights, BeamWeights};
use nearfocus_core::channel::{fraunhofer_distance, steering_vector, GainModel};
use nearfocus_core::field::{FieldEvaluator, FieldMap};
use nearfocus_core::geometry::{Point3, SamplingGrid, UniformPlanarArray};
use nearfocus_core::metrics::{
    size_tradeoff, spacing_tradeoff, spot_metrics, Bfr, ProfileLine, SizePoint, SpacingPoint, SpotMetrics,
};
use nearfocus_core::security::{
    enclosed_area, secure_boundary, security_map_from_field, calibrate_power, to_db, SecurityScenario,
};
use rayon::prelude::*;

use crate::error::{CoreContext, RunError};
use crate::output::{num, opt_num, Dataset, Table};
use crate::scenario::{AdaptiveSpec, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    FieldMap,
    Tradeoffs,
    Security,
    Adaptive,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::FieldMap => "field-map",
            Command::Tradeoffs => "tradeoffs",
            Command::Security => "security",
            Command::Adaptive => "adaptive",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Replaces the scenario's adaptive seed list with this single seed.
    pub seed: Option<u64>,
}

/// Result of one command: the files to write, human-readable summary lines
/// and any failed built-in checks.
#[derive(Debug, Default)]
pub struct Outcome {
    pub data: Dataset,
    pub summary: Vec<String>,
    pub failures: Vec<String>,
}

pub fn execute(cmd: Command, s: &Scenario, opts: RunOptions) -> Result<Outcome, RunError> {
    match cmd {
        Command::FieldMap => {
            let (r, data) = field_map(s)?;
            let summary = r
                .arrays
                .iter()
                .map(|a| {
                    format!(
                        "{}: peak {}, BFR {} m",
                        a.label,
                        num(a.grids[0].spot.peak_power),
                        opt_num(a.bfr.map(|b| b.radius_m))
                    )
                })
                .collect();
            Ok(Outcome {
                data,
                summary,
                failures: vec![],
            })
        }
        Command::Tradeoffs => {
            let (r, data) = tradeoffs(s)?;
            let mut summary: Vec<String> = r
                .spacing
                .iter()
                .map(|p| {
                    format!(
                        "spacing {} lambda: HPBW {} m, relative power {}",
                        p.spacing_wavelengths,
                        num(p.hpbw_m),
                        num(p.relative_power)
                    )
                })
                .collect();
            summary.extend(r.sizes.iter().map(|p| match &p.hpbw {
                Ok(h) => format!("side {}: HPBW {} m", p.side, num(h.width_m)),
                Err(e) => format!("side {}: {e}", p.side),
            }));
            Ok(Outcome {
                data,
                summary,
                failures: vec![],
            })
        }
        Command::Security => {
            let (r, data) = security(s)?;
            let summary = r
                .arrays
                .iter()
                .map(|a| format!("{}: secure fraction {}", a.label, num(a.secure_area_fraction)))
                .collect();
            Ok(Outcome {
                data,
                summary,
                failures: vec![],
            })
        }
        Command::Adaptive => {
            let (r, data) = adaptive(s, opts)?;
            let mut summary = vec![format!(
                "median final/bound {} over {} seeds",
                num(r.median_ratio()),
                r.runs.len()
            )];
            if let (Some(c), Some(w)) = (r.median_transfer_cold(), r.median_transfer_warm()) {
                summary.push(format!("transfer epochs to 95%: cold {c}, warm {w}"));
            }
            Ok(Outcome {
                data,
                summary,
                failures: r.failures(),
            })
        }
    }
}

fn section<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T, RunError> {
    value
        .as_ref()
        .ok_or_else(|| RunError::invalid(name, "section is required for this command"))
}

pub fn label(a: &UniformPlanarArray) -> String {
    format!("{}x{}", a.rows(), a.cols())
}

/// Power of `weights` at every grid point, evaluated in parallel. The result
/// does not depend on the thread count.
pub fn evaluate_field_par(
    array: &UniformPlanarArray,
    weights: &BeamWeights,
    grid: &SamplingGrid,
    gain: GainModel,
) -> nearfocus_core::Result<FieldMap> {
    let eval = FieldEvaluator::new(array, weights, gain)?;
    let samples = (0..grid.len())
        .into_par_iter()
        .map(|i| eval.stream_powers(&grid.point(i)))
        .collect::<nearfocus_core::Result<Vec<_>>>()?;
    FieldMap::from_stream_powers(grid.clone(), samples)
}

fn field_table(map: &FieldMap) -> Table {
    let streams = if map.per_stream().is_some() { map.streams() } else { 0 };
    let mut header = vec!["axis1_m".to_string(), "axis2_m".to_string(), "power".to_string()];
    header.extend((0..streams).map(|k| format!("stream_{k}")));
    let mut t = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let grid = map.grid();
    for i in 0..grid.len() {
        let (u, v) = grid.offsets_of(i);
        let mut row = vec![num(u), num(v), num(map.power()[i])];
        row.extend((0..streams).map(|k| num(map.stream(k).map_or(f64::NAN, |s| s[i]))));
        t.row(row);
    }
    t
}

fn weights_table(array: &UniformPlanarArray, w: &BeamWeights) -> Table {
    let mut t = Table::new(&["element", "row", "col", "chain", "re", "im"]);
    for (c, chain) in w.per_chain().iter().enumerate() {
        for (n, z) in chain.iter().enumerate() {
            t.row([
                n.to_string(),
                (n / array.cols()).to_string(),
                (n % array.cols()).to_string(),
                c.to_string(),
                num(z.re),
                num(z.im),
            ]);
        }
    }
    t
}

#[derive(Debug, Clone)]
pub struct GridReport {
    pub name: String,
    /// Measures of the raw (unnormalized) map.
    pub spot: SpotMetrics,
}

#[derive(Debug, Clone)]
pub struct ArrayFieldReport {
    pub label: String,
    pub rows: usize,
    pub cols: usize,
    pub dfp_power: f64,
    pub fraunhofer_m: f64,
    pub grids: Vec<GridReport>,
    /// Beamfocusing radius on the scenario's BFR grid.
    pub bfr: Option<Bfr>,
}

#[derive(Debug, Clone)]
pub struct FieldMapReport {
    pub arrays: Vec<ArrayFieldReport>,
}

pub fn field_map(s: &Scenario) -> Result<(FieldMapReport, Dataset), RunError> {
    let spec = section(&s.field_map, "field_map")?;
    let gain = s.gain_model();
    let dfp = spec.dfp();
    let arrays = s.arrays(&spec.sides).ctx("array")?;
    let grids = spec
        .grids
        .iter()
        .map(|g| g.grid().ctx("field_map.grids"))
        .collect::<Result<Vec<_>, _>>()?;
    let bfr_name = spec.bfr_grid().name.clone();
    let mut data = Dataset::default();
    let mut metrics = Table::new(&["scenario_id", "array", "grid", "metric", "value", "unit"]);
    let mut reports = Vec::new();
    for array in &arrays {
        let l = label(array);
        let a = steering_vector(array, dfp, gain).ctx("field_map.dfp")?;
        let w = mrt_weights(&a, false);
        let dfp_power = FieldEvaluator::new(array, &w, gain)
            .and_then(|e| e.power(&dfp))
            .ctx("field_map.dfp")?;
        data.add(format!("weights_{l}.csv"), weights_table(array, &w));
        let mut grid_reports = Vec::new();
        let mut bfr = None;
        for (g, grid) in spec.grids.iter().zip(&grids) {
            let map = evaluate_field_par(array, &w, grid, gain).ctx("field_map.grids")?;
            let spot = spot_metrics(&map, dfp, spec.eta, spec.peak_threshold).ctx("field_map.grids")?;
            if g.name == bfr_name {
                bfr = spot.bfr;
            }
            data.add(
                format!("field_{}_{l}.csv", g.name),
                field_table(&map.normalized(s.normalization())),
            );
            let mut m = |metric: &str, value: String, unit: &str| {
                metrics.row([s.id.as_str(), &l, &g.name, metric, &value, unit]);
            };
            m("peak_power", num(spot.peak_power), "a.u.");
            m("peak_x", num(spot.peak_location.x), "m");
            m("peak_y", num(spot.peak_location.y), "m");
            m("peak_z", num(spot.peak_location.z), "m");
            m("hpbw_axis2", opt_num(spot.hpbw_m), "m");
            m("significant_peaks", spot.num_significant_peaks.to_string(), "count");
            m("bfr_radius", opt_num(spot.bfr.map(|b| b.radius_m)), "m");
            m("bfr_boundary_fraction", opt_num(spot.bfr.map(|b| b.boundary_fraction)), "1");
            grid_reports.push(GridReport {
                name: g.name.clone(),
                spot,
            });
        }
        let fraunhofer_m = fraunhofer_distance(array);
        metrics.row([s.id.as_str(), &l, "", "dfp_power", &num(dfp_power), "a.u."]);
        metrics.row([s.id.as_str(), &l, "", "fraunhofer_distance", &num(fraunhofer_m), "m"]);
        metrics.row([s.id.as_str(), &l, "", "aperture_diameter", &num(array.aperture_diameter_m()), "m"]);
        reports.push(ArrayFieldReport {
            label: l,
            rows: array.rows(),
            cols: array.cols(),
            dfp_power,
            fraunhofer_m,
            grids: grid_reports,
            bfr,
        });
    }
    data.add("field_metrics.csv", metrics);
    Ok((FieldMapReport { arrays: reports }, data))
}

#[derive(Debug, Clone)]
pub struct TradeoffReport {
    pub spacing: Vec<SpacingPoint>,
    pub sizes: Vec<SizePoint>,
}

fn profile_table(array: &UniformPlanarArray, dfp: Point3, line: &ProfileLine, gain: GainModel) -> Result<Table, RunError> {
    let grid = line.grid(array, dfp).ctx("tradeoffs.profile")?;
    let a = steering_vector(array, dfp, gain).ctx("tradeoffs.dfp")?;
    let map = evaluate_field_par(array, &mrt_weights(&a, false), &grid, gain).ctx("tradeoffs.profile")?;
    let offsets = grid.axes()[0].offsets();
    let mut t = Table::new(&["offset_m", "x_m", "y_m", "z_m", "power"]);
    for (i, off) in offsets.iter().enumerate() {
        let p = grid.point(i);
        t.row([num(*off), num(p.x), num(p.y), num(p.z), num(map.power()[i])]);
    }
    Ok(t)
}

pub fn tradeoffs(s: &Scenario) -> Result<(TradeoffReport, Dataset), RunError> {
    let spec = section(&s.tradeoffs, "tradeoffs")?;
    let gain = s.gain_model();
    let dfp = spec.dfp();
    let line = spec.line();
    let template = s.base_array().ctx("array")?;
    let mut data = Dataset::default();
    let mut spacing = Vec::new();
    if !spec.spacings.is_empty() {
        spacing = spacing_tradeoff(&template, dfp, &spec.spacings, &line, gain).ctx("tradeoffs.spacings")?;
        let mut t = Table::new(&["spacing_wavelengths", "dfp_power", "relative_power", "hpbw_m"]);
        for p in &spacing {
            t.row([
                num(p.spacing_wavelengths),
                num(p.dfp_power),
                num(p.relative_power),
                num(p.hpbw_m),
            ]);
            let array = template
                .with_spacing(p.spacing_wavelengths * template.wavelength_m())
                .ctx("tradeoffs.spacings")?;
            data.add(
                format!("profile_spacing_{}.csv", p.spacing_wavelengths),
                profile_table(&array, dfp, &line, gain)?,
            );
        }
        data.add("spacing_tradeoff.csv", t);
    }
    let mut sizes = Vec::new();
    if !spec.sides.is_empty() {
        sizes = size_tradeoff(&template, dfp, &spec.sides, &line, gain).ctx("tradeoffs.sides")?;
        let mut t = Table::new(&["side", "hpbw_m", "left_m", "right_m", "multiple_peaks", "status"]);
        for p in &sizes {
            match &p.hpbw {
                Ok(h) => t.row([
                    p.side.to_string(),
                    num(h.width_m),
                    num(h.left_m),
                    num(h.right_m),
                    h.multiple_peaks.to_string(),
                    "ok".to_string(),
                ]),
                Err(e) => t.row([
                    p.side.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.to_string(),
                ]),
            }
            let array = template.with_size(p.side, p.side).ctx("tradeoffs.sides")?;
            data.add(format!("profile_side_{}.csv", p.side), profile_table(&array, dfp, &line, gain)?);
        }
        data.add("size_tradeoff.csv", t);
    }
    Ok((TradeoffReport { spacing, sizes }, data))
}

#[derive(Debug, Clone)]
pub struct SecurityArrayReport {
    pub label: String,
    pub side: usize,
    pub powers: Vec<f64>,
    /// SINR at each focal point, recomputed from the calibrated powers.
    pub focal_sinr_db: Vec<f64>,
    pub secure_area_fraction: f64,
    pub enclosed_area_m2: Vec<Option<f64>>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SecurityReport {
    pub target_snr_db: f64,
    pub arrays: Vec<SecurityArrayReport>,
}

pub fn security(s: &Scenario) -> Result<(SecurityReport, Dataset), RunError> {
    let spec = section(&s.security, "security")?;
    let gain = s.gain_model();
    let dfps = spec.dfps();
    let grid = spec.grid.grid().ctx("security.grid")?;
    let arrays = s.arrays(&spec.sides).ctx("array")?;
    let mut data = Dataset::default();
    let mut metrics = Table::new(&["scenario_id", "array", "metric", "value", "unit"]);
    let mut reports = Vec::new();
    for array in arrays {
        let l = label(&array);
        let sc = SecurityScenario {
            array,
            dfps: dfps.clone(),
            noise_power: spec.noise_power,
            target_snr_db: spec.target_snr_db,
            threshold_db: spec.threshold_db,
            grid: grid.clone(),
            gain,
        };
        sc.validate().ctx("security")?;
        let calibration = calibrate_power(&sc).ctx("security")?;
        let weights = sc.weights().ctx("security")?;
        let field = evaluate_field_par(&sc.array, &weights, &grid, gain).ctx("security.grid")?;
        let eval = FieldEvaluator::new(&sc.array, &weights, gain).ctx("security")?;
        let mut focal_sinr_db = Vec::new();
        for (m, p) in dfps.iter().enumerate() {
            let g = eval.stream_powers(p).ctx("security.dfps")?;
            let interference: f64 = (0..g.len())
                .filter(|&k| k != m)
                .map(|k| calibration.powers[k] * g[k])
                .sum();
            focal_sinr_db.push(to_db(calibration.powers[m] * g[m] / (interference + spec.noise_power)));
        }
        let powers = calibration.powers.clone();
        let iterations = calibration.iterations;
        let map = security_map_from_field(&sc, calibration, &field).ctx("security")?;
        let boundary = secure_boundary(&map).ctx("security.grid")?;
        let enclosed: Vec<Option<f64>> = dfps.iter().map(|p| enclosed_area(&map, &boundary, *p)).collect();

        let streams = dfps.len();
        let mut header = vec!["axis1_m".to_string(), "axis2_m".to_string()];
        header.extend((0..streams).map(|m| format!("sinr_db_{m}")));
        header.extend(["max_sinr_db".to_string(), "secure".to_string()]);
        let mut t = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
        for i in 0..grid.len() {
            let (u, v) = grid.offsets_of(i);
            let mut row = vec![num(u), num(v)];
            row.extend((0..streams).map(|m| num(map.sinr_db[m][i])));
            row.push(num(map.max_sinr_db[i]));
            row.push(u8::from(map.secure[i]).to_string());
            t.row(row);
        }
        data.add(format!("sinr_{l}.csv"), t);

        let mut b = Table::new(&["polyline_id", "vertex_index", "axis1_m", "axis2_m"]);
        for (id, line) in boundary.iter().enumerate() {
            for (k, (u, v)) in line.vertices.iter().enumerate() {
                b.row([id.to_string(), k.to_string(), num(*u), num(*v)]);
            }
        }
        data.add(format!("boundary_{l}.csv"), b);

        let mut m = |metric: String, value: String, unit: &str| {
            metrics.row([s.id.as_str(), &l, &metric, &value, unit]);
        };
        for k in 0..streams {
            m(format!("stream_power_{k}"), num(powers[k]), "a.u.");
            m(format!("focal_sinr_{k}"), num(focal_sinr_db[k]), "dB");
            m(
                format!("plugback_residual_{k}"),
                num((focal_sinr_db[k] - spec.target_snr_db).abs()),
                "dB",
            );
            m(format!("enclosed_area_{k}"), opt_num(enclosed[k]), "m^2");
        }
        m("calibration_iterations".into(), iterations.to_string(), "count");
        m("secure_area_fraction".into(), num(map.secure_area_fraction), "1");
        m("boundary_polylines".into(), boundary.len().to_string(), "count");

        reports.push(SecurityArrayReport {
            label: l,
            side: sc.array.rows(),
            powers,
            focal_sinr_db,
            secure_area_fraction: map.secure_area_fraction,
            enclosed_area_m2: enclosed,
            iterations,
        });
    }
    data.add("security_metrics.csv", metrics);
    Ok((
        SecurityReport {
            target_snr_db: spec.target_snr_db,
            arrays: reports,
        },
        data,
    ))
}

/// Relative tolerance for the exhaustive-search comparison.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

/// Largest combined power over every phase code of a single-tile array.
pub fn exhaustive_max(
    array: &UniformPlanarArray,
    dfp: Point3,
    gain: GainModel,
    bits: u32,
) -> nearfocus_core::Result<f64> {
    let whole = partition(array, array.rows(), array.cols())?;
    let mut ue = SimulatedUe::new(array, &whole, dfp, gain, bits)?;
    let n = array.num_elements();
    let levels = 1u64 << bits;
    let total = levels
        .checked_pow(n as u32)
        .ok_or(nearfocus_core::Error::InvalidParameter("too many phase codes"))?;
    let mut phases = vec![0u16; n];
    let mut best = 0.0f64;
    for code in 0..total {
        let mut c = code;
        for p in phases.iter_mut() {
            *p = (c % levels) as u16;
            c /= levels;
        }
        best = best.max(ue.measure(&phases).combined_power);
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct TransferReport {
    pub cold_final: f64,
    pub warm_final: f64,
    pub cold_epochs95: Option<usize>,
    pub warm_epochs95: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SeedReport {
    pub seed: u64,
    pub final_power: f64,
    pub epochs: usize,
    pub queries: u64,
    pub log_nondecreasing: bool,
    pub transfer: Option<TransferReport>,
    pub oracle_match: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct AdaptiveReport {
    pub bound: f64,
    pub transfer_bound: Option<f64>,
    pub oracle_max: Option<f64>,
    pub runs: Vec<SeedReport>,
}

pub fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len();
    Some(if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) })
}

impl AdaptiveReport {
    pub fn median_ratio(&self) -> f64 {
        median(self.runs.iter().map(|r| r.final_power / self.bound).collect()).unwrap_or(f64::NAN)
    }

    fn median_epochs(&self, pick: impl Fn(&TransferReport) -> Option<usize>) -> Option<f64> {
        let v: Option<Vec<f64>> = self
            .runs
            .iter()
            .map(|r| r.transfer.as_ref().and_then(&pick).map(|e| e as f64))
            .collect();
        median(v?)
    }

    pub fn median_transfer_cold(&self) -> Option<f64> {
        self.median_epochs(|t| t.cold_epochs95)
    }

    pub fn median_transfer_warm(&self) -> Option<f64> {
        self.median_epochs(|t| t.warm_epochs95)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.runs {
            if r.oracle_match == Some(false) {
                out.push(format!(
                    "seed {}: final power {} differs from the exhaustive maximum {}",
                    r.seed,
                    num(r.final_power),
                    opt_num(self.oracle_max)
                ));
            }
            if !r.log_nondecreasing {
                out.push(format!("seed {}: epoch log decreases", r.seed));
            }
        }
        out
    }
}

fn nondecreasing(log: &[EpochRecord]) -> bool {
    log.windows(2).all(|w| w[1].combined_power >= w[0].combined_power)
}

fn epochs_table(log: &[EpochRecord], bound: f64) -> Table {
    let mut t = Table::new(&["epoch", "combined_power", "quantized_mrt_bound"]);
    for r in log {
        t.row([r.epoch.to_string(), num(r.combined_power), num(bound)]);
    }
    t
}

fn phases_table(array: &UniformPlanarArray, run: &AdaptiveRun) -> Table {
    let mut t = Table::new(&["element", "row", "col", "phase_index", "phase_rad"]);
    let levels = f64::from(1u32 << run.phase_bits);
    for (n, &k) in run.phases.iter().enumerate() {
        t.row([
            n.to_string(),
            (n / array.cols()).to_string(),
            (n % array.cols()).to_string(),
            k.to_string(),
            num(2.0 * std::f64::consts::PI * f64::from(k) / levels),
        ]);
    }
    t
}

struct SeedRuns {
    main: AdaptiveRun,
    transfer: Option<(AdaptiveRun, AdaptiveRun)>,
}

pub fn adaptive(s: &Scenario, opts: RunOptions) -> Result<(AdaptiveReport, Dataset), RunError> {
    let spec: &AdaptiveSpec = section(&s.adaptive, "adaptive")?;
    let gain = s.gain_model();
    let array = s.base_array().ctx("array")?;
    let dfp = spec.dfp();
    let seeds = match opts.seed {
        Some(seed) => vec![seed],
        None => spec.seeds.clone(),
    };
    partition(&array, spec.tile_rows, spec.tile_cols).ctx("adaptive.tile_rows")?;
    let bound = quantized_mrt_bound(&array, dfp, spec.phase_bits, gain).ctx("adaptive")?;
    let transfer_bound = spec
        .transfer_to()
        .map(|p| quantized_mrt_bound(&array, p, spec.phase_bits, gain))
        .transpose()
        .ctx("adaptive.transfer_to")?;
    let oracle_max = if spec.oracle {
        Some(exhaustive_max(&array, dfp, gain, spec.phase_bits).ctx("adaptive.oracle")?)
    } else {
        None
    };

    let runs = seeds
        .par_iter()
        .map(|&seed| -> nearfocus_core::Result<SeedRuns> {
            let cfg = spec.config(seed, gain);
            let main = run_sbf(&array, dfp, &cfg, None)?;
            let transfer = match spec.transfer_to() {
                Some(target) => {
                    let cold = run_sbf(&array, target, &cfg, None)?;
                    let warm = run_sbf(&array, target, &cfg, Some(&main))?;
                    Some((cold, warm))
                }
                None => None,
            };
            Ok(SeedRuns { main, transfer })
        })
        .collect::<nearfocus_core::Result<Vec<_>>>()
        .ctx("adaptive")?;

    let mut data = Dataset::default();
    let mut summary = Table::new(&[
        "seed",
        "final_power",
        "quantized_mrt_bound",
        "ratio",
        "epochs",
        "queries",
        "transfer_cold_epochs95",
        "transfer_warm_epochs95",
        "oracle_max",
        "oracle_match",
    ]);
    let mut reports = Vec::new();
    for (seed, r) in seeds.iter().zip(&runs) {
        let final_power = r.main.final_power();
        data.add(format!("epochs_seed{seed}.csv"), epochs_table(&r.main.log, bound));
        data.add(format!("phases_seed{seed}.csv"), phases_table(&array, &r.main));
        let mut ok = nondecreasing(&r.main.log);
        let transfer = r.transfer.as_ref().map(|(cold, warm)| {
            let tb = transfer_bound.unwrap_or(f64::NAN);
            data.add(format!("transfer_cold_seed{seed}.csv"), epochs_table(&cold.log, tb));
            data.add(format!("transfer_warm_seed{seed}.csv"), epochs_table(&warm.log, tb));
            ok &= nondecreasing(&cold.log) && nondecreasing(&warm.log);
            TransferReport {
                cold_final: cold.final_power(),
                warm_final: warm.final_power(),
                cold_epochs95: epochs_to_fraction(&cold.log, 0.95),
                warm_epochs95: epochs_to_fraction(&warm.log, 0.95),
            }
        });
        let oracle_match = oracle_max.map(|m| (final_power - m).abs() <= ORACLE_TOLERANCE * m);
        let opt_usize = |v: Option<usize>| v.map(|e| e.to_string()).unwrap_or_default();
        summary.row([
            seed.to_string(),
            num(final_power),
            num(bound),
            num(final_power / bound),
            (r.main.log.len() - 1).to_string(),
            r.main.queries.to_string(),
            opt_usize(transfer.as_ref().and_then(|t| t.cold_epochs95)),
            opt_usize(transfer.as_ref().and_then(|t| t.warm_epochs95)),
            opt_num(oracle_max),
            oracle_match.map(|b| b.to_string()).unwrap_or_default(),
        ]);
        reports.push(SeedReport {
            seed: *seed,
            final_power,
            epochs: r.main.log.len() - 1,
            queries: r.main.queries,
            log_nondecreasing: ok,
            transfer,
            oracle_match,
        });
    }
    data.add("adaptive_summary.csv", summary);
    let report = AdaptiveReport {
        bound,
        transfer_bound,
        oracle_max,
        runs: reports,
    };
    let mut metrics = Table::new(&["scenario_id", "metric", "value", "unit"]);
    metrics.row([s.id.as_str(), "quantized_mrt_bound", &num(bound), "a.u."]);
    metrics.row([s.id.as_str(), "median_ratio", &num(report.median_ratio()), "1"]);
    if let (Some(c), Some(w)) = (report.median_transfer_cold(), report.median_transfer_warm()) {
        metrics.row([s.id.as_str(), "median_transfer_cold_epochs95", &num(c), "epochs"]);
        metrics.row([s.id.as_str(), "median_transfer_warm_epochs95", &num(w), "epochs"]);
    }
    if let Some(m) = oracle_max {
        metrics.row([s.id.as_str(), "oracle_max", &num(m), "a.u."]);
    }
    data.add("adaptive_metrics.csv", metrics);
    Ok((report, data))
}
