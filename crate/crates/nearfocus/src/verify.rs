//! Acceptance suite over the builtin scenarios.

use std::fmt;
use std::time::Instant;

use nearfocus_core::beamforming::{mrt_weights, BeamWeights};
use nearfocus_core::channel::{correlation, steering_vector, wavelength_for, GainModel};
use nearfocus_core::field::{find_focal_peaks, FieldMap};
use nearfocus_core::geometry::{Point3, SamplingGrid, UniformPlanarArray};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::RunError;
use crate::output::{sha256_hex, Dataset, Table};
use crate::run::{self, evaluate_field_par};
use crate::scenario::{Scenario, ScenarioSource};

/// Criteria known not to hold for the implemented physics. They are still
/// evaluated and reported.
pub const KNOWN_UNATTAINABLE: &[&str] = &["grating lobes"];

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub name: String,
    pub claim: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub pass: bool,
}

impl Criterion {
    fn new(name: &str, claim: &str, expected: String, observed: String, tolerance: &str, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            claim: claim.to_string(),
            expected,
            observed,
            tolerance: tolerance.to_string(),
            pass,
        }
    }

    pub fn known_unattainable(&self) -> bool {
        KNOWN_UNATTAINABLE.contains(&self.name.as_str())
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} | expected {} | observed {} | tolerance {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.claim,
            self.expected,
            self.observed,
            self.tolerance
        )
    }
}

pub fn load_builtin(name: &str) -> Result<Scenario, RunError> {
    let text = crate::scenario::builtin(name).ok_or_else(|| RunError::invalid(name, "unknown builtin"))?;
    ScenarioSource::from_text(name, text)
        .load_scenario()
        .map_err(|e| RunError::invalid(name, e.to_string()))
}

fn core<T>(r: nearfocus_core::Result<T>) -> Result<T, RunError> {
    r.map_err(RunError::Numerical)
}

fn cm(m: f64) -> String {
    format!("{:.3} cm", m * 100.0)
}

fn within(observed: f64, expected: f64, rel: f64) -> bool {
    (observed - expected).abs() <= rel * expected
}

fn fig4(out: &mut Vec<Criterion>) -> Result<(), RunError> {
    let start = Instant::now();
    let (a, _) = run::tradeoffs(&load_builtin("fig4a")?)?;
    let secs = start.elapsed().as_secs_f64();
    let at = |s: f64| a.spacing.iter().find(|p| p.spacing_wavelengths == s);
    let (h05, h1) = match (at(0.5), at(1.0)) {
        (Some(x), Some(y)) => (x.hpbw_m, y.hpbw_m),
        _ => return Err(RunError::invalid("fig4a", "spacings 0.5 and 1 are required")),
    };
    out.push(Criterion::new(
        "fig4a hpbw",
        "HPBW of a 60x60 UPA focused at (0,1,-0.5) for spacing 0.5 and 1 wavelengths",
        "8.5 cm, 4.9 cm; runtime < 60 s".into(),
        format!("{}, {}; {secs:.1} s", cm(h05), cm(h1)),
        "15% relative",
        within(h05, 0.085, 0.15) && within(h1, 0.049, 0.15) && secs < 60.0,
    ));

    let best = a
        .spacing
        .iter()
        .max_by(|x, y| x.dfp_power.total_cmp(&y.dfp_power))
        .map_or(f64::NAN, |p| p.spacing_wavelengths);
    let drop_pp = at(1.0).map_or(f64::NAN, |p| (1.0 - p.relative_power) * 100.0);
    out.push(Criterion::new(
        "fig4a peak power",
        "focal power is largest at spacing 0.5 and drops about 4% at spacing 1",
        "argmax 0.5; drop 4 pp".into(),
        format!("argmax {best}; drop {drop_pp:.3} pp"),
        "3 pp",
        best == 0.5 && (drop_pp - 4.0).abs() <= 3.0,
    ));

    let (b, _) = run::tradeoffs(&load_builtin("fig4b")?)?;
    let widths: Vec<f64> = b
        .sizes
        .iter()
        .map(|p| p.hpbw.as_ref().map_or(f64::NAN, |h| h.width_m))
        .collect();
    let decreasing = widths.windows(2).all(|w| w[1] < w[0]);
    let last = b.sizes.last().map(|p| (p.side, widths[widths.len() - 1]));
    out.push(Criterion::new(
        "fig4b trend",
        "HPBW strictly decreases with array side; side 60 matches 8.5 cm",
        "strictly decreasing; 8.5 cm at side 60".into(),
        format!(
            "[{}]",
            widths.iter().map(|w| cm(*w)).collect::<Vec<_>>().join(", ")
        ),
        "15% relative",
        decreasing && matches!(last, Some((60, w)) if within(w, 0.085, 0.15)),
    ));
    Ok(())
}

fn fig1b(out: &mut Vec<Criterion>) -> Result<(), RunError> {
    let (r, _) = run::field_map(&load_builtin("fig1b")?)?;
    let find = |rows| r.arrays.iter().find(|a| a.rows == rows);
    let (small, large) = match (find(6), find(60)) {
        (Some(s), Some(l)) => (s, l),
        _ => return Err(RunError::invalid("fig1b", "sides 6 and 60 are required")),
    };
    let bfr = |a: &run::ArrayFieldReport| a.bfr.map_or(f64::NAN, |b| b.radius_m);
    let peak = |a: &run::ArrayFieldReport| a.grids.iter().map(|g| g.spot.peak_power).fold(0.0, f64::max);
    let ratio = bfr(large) / bfr(small);
    let power_ratio = peak(large) / peak(small);
    out.push(Criterion::new(
        "fig1b contrast",
        "60x60 ELAA focuses tighter and stronger than a 6x6 SPA (eta 0.9)",
        "BFR ratio < 0.5; peak ratio > 1".into(),
        format!(
            "BFR {:.4} m vs {:.4} m (ratio {ratio:.4}); peak ratio {power_ratio:.4e}",
            bfr(large),
            bfr(small)
        ),
        "strict",
        ratio < 0.5 && power_ratio > 1.0,
    ));
    Ok(())
}

fn correlation_trend(out: &mut Vec<Criterion>) -> Result<(), RunError> {
    let lambda = wavelength_for(28e9);
    let r1 = Point3::new(0.0, 1.0, 0.0);
    let r2 = Point3::new(0.3, 1.0, 0.0);
    let corr = |side| -> Result<f64, RunError> {
        let a = core(UniformPlanarArray::square(side, 0.5, lambda))?;
        core(correlation(
            &core(steering_vector(&a, r1, GainModel::Unit))?,
            &core(steering_vector(&a, r2, GainModel::Unit))?,
        ))
    };
    let (c6, c60) = (corr(6)?, corr(60)?);
    out.push(Criterion::new(
        "correlation trend",
        "correlation between (0,1,0) and (0.3,1,0) falls with array size",
        "c(60x60) < c(6x6); c(60x60) < 0.1".into(),
        format!("c(6x6) {c6:.4}, c(60x60) {c60:.4}"),
        "strict",
        c60 < c6 && c60 < 0.1,
    ));
    Ok(())
}

fn fig2(out: &mut Vec<Criterion>) -> Result<(), RunError> {
    let (r, _) = run::security(&load_builtin("fig2")?)?;
    let target = r.target_snr_db;
    let worst = r
        .arrays
        .iter()
        .flat_map(|a| a.focal_sinr_db.iter().map(move |s| (s - target).abs()))
        .fold(0.0, f64::max);
    let sinrs: Vec<String> = r
        .arrays
        .iter()
        .map(|a| {
            format!(
                "{}: {}",
                a.label,
                a.focal_sinr_db.iter().map(|s| format!("{s:.6}")).collect::<Vec<_>>().join("/")
            )
        })
        .collect();
    out.push(Criterion::new(
        "fig2 calibration",
        "calibrated powers give the target SINR at every focal point",
        format!("{target} dB at each DFP; plug-back residual < 0.01 dB"),
        format!("{}; max residual {worst:.2e} dB", sinrs.join(", ")),
        "0.01 dB",
        worst < 0.01,
    ));

    let fractions: Vec<f64> = r.arrays.iter().map(|a| a.secure_area_fraction).collect();
    out.push(Criterion::new(
        "fig2 secure fraction",
        "secure area fraction grows from 5x5 to 15x15 to 60x60",
        "strictly increasing".into(),
        format!(
            "[{}]",
            fractions.iter().map(|f| format!("{f:.4}")).collect::<Vec<_>>().join(", ")
        ),
        "strict",
        fractions.len() >= 2 && fractions.windows(2).all(|w| w[1] > w[0]),
    ));

    let enclosed = r
        .arrays
        .iter()
        .map(|a| a.enclosed_area_m2.iter().filter(|e| e.is_some()).count())
        .sum::<usize>();
    let total = r.arrays.iter().map(|a| a.enclosed_area_m2.len()).sum::<usize>();
    out.push(Criterion::new(
        "fig2 enclosure",
        "every DFP lies inside a threshold contour for every array size",
        format!("{total} of {total}"),
        format!("{enclosed} of {total}"),
        "exact",
        enclosed == total,
    ));
    Ok(())
}

fn adaptive(out: &mut Vec<Criterion>) -> Result<(), RunError> {
    let (o, _) = run::adaptive(&load_builtin("adaptive-oracle-2x2")?, Default::default())?;
    let matched = o.runs.iter().filter(|r| r.oracle_match == Some(true)).count();
    out.push(Criterion::new(
        "adaptive oracle",
        "2x2 array, 2-bit phases: final power equals the exhaustive maximum over 256 codes",
        format!("{} of {} seeds", o.runs.len(), o.runs.len()),
        format!("{matched} of {}", o.runs.len()),
        "1e-12 relative",
        o.runs.len() == 10 && matched == o.runs.len(),
    ));

    let (a, _) = run::adaptive(&load_builtin("adaptive-16x16")?, Default::default())?;
    let ratio = a.median_ratio();
    let monotone = a.runs.iter().all(|r| r.log_nondecreasing);
    out.push(Criterion::new(
        "adaptive quality",
        "16x16 array, 4x4 tiles, 4 bits, cold start: median final power vs quantized MRT",
        ">= 0.9; epoch logs nondecreasing".into(),
        format!(
            "median {ratio:.4} over {} seeds; logs {}",
            a.runs.len(),
            if monotone { "nondecreasing" } else { "decreasing" }
        ),
        "threshold",
        a.runs.len() == 10 && ratio >= 0.9 && monotone,
    ));

    let (cold, warm) = (a.median_transfer_cold(), a.median_transfer_warm());
    out.push(Criterion::new(
        "transfer speedup",
        "warm start from a DFP 5 cm away reaches 95% of its final power in fewer epochs",
        "median warm < median cold".into(),
        format!(
            "cold {}, warm {}",
            cold.map_or("n/a".into(), |c| c.to_string()),
            warm.map_or("n/a".into(), |w| w.to_string())
        ),
        "strict",
        matches!((cold, warm), (Some(c), Some(w)) if w < c),
    ));
    Ok(())
}

/// Unit-norm MRT against random unit-norm weights on arrays up to 16x16.
fn mrt_optimality(out: &mut Vec<Criterion>) -> Result<(), RunError> {
    const DRAWS: usize = 10_000;
    let lambda = wavelength_for(28e9);
    let dfp = Point3::new(0.0, 1.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for side in [2, 4, 8, 16] {
        let array = core(UniformPlanarArray::square(side, 0.5, lambda))?;
        let a = core(steering_vector(&array, dfp, GainModel::InverseDistance))?;
        let best = core(a.response(mrt_weights(&a, false).weights()))?.norm_sqr();
        for _ in 0..DRAWS {
            let mut w: Vec<Complex64> = (0..a.len())
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            w.iter_mut().for_each(|z| *z /= norm);
            worst = worst.max(core(a.response(&w))?.norm_sqr() / best);
        }
    }
    out.push(Criterion::new(
        "mrt optimality",
        "no random unit-norm weight vector beats MRT (10^4 draws, sides 2 to 16)",
        "max ratio <= 1".into(),
        format!("max ratio {worst:.6}"),
        "1e-12 relative",
        worst <= 1.0 + 1e-12,
    ));
    Ok(())
}

fn elaa(side: usize, spacing: f64) -> Result<UniformPlanarArray, RunError> {
    core(UniformPlanarArray::square(side, spacing, wavelength_for(28e9)))
}

fn mrt_map(array: &UniformPlanarArray, dfp: Point3, grid: &SamplingGrid, gain: GainModel) -> Result<FieldMap, RunError> {
    let a = core(steering_vector(array, dfp, gain))?;
    core(evaluate_field_par(array, &mrt_weights(&a, false), grid, gain))
}

fn max_rel_diff(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) })
        .fold(0.0, f64::max)
}

fn field_invariances(out: &mut Vec<Criterion>) -> Result<(), RunError> {
    let dfp = Point3::new(0.0, 1.0, 0.0);
    let array = elaa(12, 0.5)?;
    let grid = core(SamplingGrid::window(
        Point3::ORIGIN,
        (Point3::X, -0.5, 0.5),
        (Point3::Y, 0.5, 1.5),
        41,
    ))?;
    let a = core(steering_vector(&array, dfp, GainModel::InverseDistance))?;
    let w = mrt_weights(&a, false);
    let base = core(evaluate_field_par(&array, &w, &grid, GainModel::InverseDistance))?;
    let mut worst: f64 = 0.0;
    for theta in [0.3, 1.7, -2.9] {
        let rotated: BeamWeights = w.scaled(Complex64::from_polar(1.0, theta));
        let map = core(evaluate_field_par(&array, &rotated, &grid, GainModel::InverseDistance))?;
        worst = worst.max(max_rel_diff(base.power(), map.power()));
    }
    out.push(Criterion::new(
        "global phase",
        "a common phase on all weights leaves the power map unchanged",
        "identical maps".into(),
        format!("max relative difference {worst:.2e}"),
        "1e-9 relative",
        worst <= 1e-9,
    ));

    let n = 81;
    let grid = core(SamplingGrid::window(
        Point3::ORIGIN,
        (Point3::X, -0.5, 0.5),
        (Point3::Y, 0.5, 1.5),
        n,
    ))?;
    let map = mrt_map(&elaa(20, 0.5)?, dfp, &grid, GainModel::InverseDistance)?;
    let p = map.power();
    let mirrored: Vec<f64> = (0..n * n).map(|idx| p[(n - 1 - idx / n) * n + idx % n]).collect();
    let worst = max_rel_diff(p, &mirrored);
    out.push(Criterion::new(
        "mirror symmetry",
        "boresight focus gives a power map symmetric under x -> -x",
        "symmetric".into(),
        format!("max relative difference {worst:.2e}"),
        "1e-9 relative",
        worst <= 1e-9,
    ));
    Ok(())
}

fn grating_lobes(out: &mut Vec<Criterion>) -> Result<(), RunError> {
    let dfp = Point3::new(0.0, 1.0, 0.0);
    let grid = core(SamplingGrid::window(
        Point3::ORIGIN,
        (Point3::X, -1.5, 1.5),
        (Point3::Y, 0.2, 2.0),
        121,
    ))?;
    let dense = mrt_map(&elaa(60, 0.5)?, dfp, &grid, GainModel::Unit)?;
    let sparse = mrt_map(&elaa(60, 1.5)?, dfp, &grid, GainModel::Unit)?;
    let n_dense = core(find_focal_peaks(&dense, 0.5))?.len();
    let n_sparse = core(find_focal_peaks(&sparse, 0.5))?.len();
    let weak = core(find_focal_peaks(&sparse, 0.02))?;
    let lobe = weak.get(1).map_or(0.0, |p| p.power / weak[0].power);
    out.push(Criterion::new(
        "grating lobes",
        "peaks at threshold 0.5: exactly 1 at spacing 0.5, at least 2 at spacing 1.5 (60x60)",
        "1 and >= 2".into(),
        format!(
            "{n_dense} and {n_sparse}; strongest grating lobe {lobe:.4} of the main peak ({} peaks above 0.02)",
            weak.len()
        ),
        "exact",
        n_dense == 1 && n_sparse >= 2,
    ));
    Ok(())
}

fn dataset_digest(d: &Dataset) -> String {
    let mut all = Vec::new();
    for (name, bytes) in &d.files {
        all.extend_from_slice(name.as_bytes());
        all.extend_from_slice(sha256_hex(bytes).as_bytes());
    }
    sha256_hex(&all)
}

fn determinism(out: &mut Vec<Criterion>) -> Result<(), RunError> {
    let s = load_builtin("fig4a")?;
    let (_, d1) = run::tradeoffs(&s)?;
    let (_, d2) = run::tradeoffs(&s)?;
    let a = load_builtin("adaptive-oracle-2x2")?;
    let (_, a1) = run::adaptive(&a, Default::default())?;
    let (_, a2) = run::adaptive(&a, Default::default())?;

    let mut small: Scenario = load_builtin("fig1b")?;
    if let Some(f) = small.field_map.as_mut() {
        f.sides = vec![6, 20];
        for g in &mut f.grids {
            g.axis1.samples = 41;
            g.axis2.samples = 41;
        }
    }
    let in_pool = |threads: usize| -> Result<Dataset, RunError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| RunError::invalid("threads", e.to_string()))?;
        pool.install(|| run::field_map(&small).map(|r| r.1))
    };
    let (t1, t3) = (in_pool(1)?, in_pool(3)?);

    let same = [(&d1, &d2), (&a1, &a2), (&t1, &t3)]
        .iter()
        .all(|(x, y)| dataset_digest(x) == dataset_digest(y));
    out.push(Criterion::new(
        "determinism",
        "reruns and different thread counts give byte-identical datasets",
        "identical digests".into(),
        format!(
            "fig4a {}, oracle {}, threads {}",
            &dataset_digest(&d1)[..12],
            &dataset_digest(&a1)[..12],
            if dataset_digest(&t1) == dataset_digest(&t3) { "1 = 3" } else { "1 != 3" }
        ),
        "exact",
        same,
    ));
    Ok(())
}

/// Runs every criterion in order.
pub fn run_all() -> Result<Vec<Criterion>, RunError> {
    let mut out = Vec::new();
    fig4(&mut out)?;
    fig1b(&mut out)?;
    correlation_trend(&mut out)?;
    fig2(&mut out)?;
    adaptive(&mut out)?;
    mrt_optimality(&mut out)?;
    field_invariances(&mut out)?;
    grating_lobes(&mut out)?;
    determinism(&mut out)?;
    Ok(out)
}

pub fn report_table(rows: &[Criterion]) -> Table {
    let mut t = Table::new(&["criterion", "claim", "expected", "observed", "tolerance", "verdict"]);
    for c in rows {
        t.row([
            c.name.as_str(),
            &c.claim,
            &c.expected,
            &c.observed,
            &c.tolerance,
            if c.pass { "pass" } else { "fail" },
        ]);
    }
    t
}
