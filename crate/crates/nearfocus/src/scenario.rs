//! Scenario files: schema, parsing, validation and the builtin set.

use std::fmt;
use std::path::Path;

use nearfocus_core::adaptive::{InitMode, SbfConfig};
use nearfocus_core::channel::{wavelength_for, GainModel};
use nearfocus_core::field::Normalization;
use nearfocus_core::geometry::{ArrayPlane, GridAxis, Point3, SamplingGrid, UniformPlanarArray};
use nearfocus_core::metrics::{ProfileLine, ProfileMode};
use serde::{Deserialize, Serialize};

pub const BUILTINS: &[(&str, &str)] = &[
    ("fig1b", include_str!("../scenarios/fig1b.toml")),
    ("fig2", include_str!("../scenarios/fig2.toml")),
    ("fig4a", include_str!("../scenarios/fig4a.toml")),
    ("fig4b", include_str!("../scenarios/fig4b.toml")),
    ("adaptive-16x16", include_str!("../scenarios/adaptive-16x16.toml")),
    ("adaptive-oracle-2x2", include_str!("../scenarios/adaptive-oracle-2x2.toml")),
];

pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gain {
    Unit,
    #[default]
    InverseDistance,
}

impl From<Gain> for GainModel {
    fn from(g: Gain) -> Self {
        match g {
            Gain::Unit => GainModel::Unit,
            Gain::InverseDistance => GainModel::InverseDistance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    #[default]
    Raw,
    PeakOne,
}

impl From<Norm> for Normalization {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Raw => Normalization::Raw,
            Norm::PeakOne => Normalization::PeakOne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    #[default]
    Xz,
    Xy,
    Yz,
}

impl From<Plane> for ArrayPlane {
    fn from(p: Plane) -> Self {
        match p {
            Plane::Xz => ArrayPlane::XZ,
            Plane::Xy => ArrayPlane::XY,
            Plane::Yz => ArrayPlane::YZ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub frequency_hz: f64,
    #[serde(default)]
    pub gain: Gain,
    #[serde(default)]
    pub normalization: Norm,
    pub array: ArraySpec,
    pub field_map: Option<FieldMapSpec>,
    pub tradeoffs: Option<TradeoffSpec>,
    pub security: Option<SecuritySpec>,
    pub adaptive: Option<AdaptiveSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySpec {
    pub rows: usize,
    pub cols: usize,
    pub spacing_wavelengths: f64,
    #[serde(default)]
    pub center: [f64; 3],
    #[serde(default)]
    pub plane: Plane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub direction: [f64; 3],
    pub start_m: f64,
    pub end_m: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub name: String,
    #[serde(default)]
    pub origin: [f64; 3],
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMapSpec {
    pub dfp: [f64; 3],
    /// Square array sides to evaluate; defaults to the `[array]` shape.
    #[serde(default)]
    pub sides: Vec<usize>,
    pub grids: Vec<GridSpec>,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_peak_threshold")]
    pub peak_threshold: f64,
    /// Grid used for the beamfocusing radius; defaults to the first grid.
    pub bfr_grid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    #[default]
    Axis,
    Radial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(default)]
    pub mode: ProfileKind,
    #[serde(default = "default_profile_direction")]
    pub direction: [f64; 3],
    #[serde(default = "default_half_length")]
    pub half_length_m: f64,
    #[serde(default = "default_profile_samples")]
    pub samples: usize,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            mode: ProfileKind::Axis,
            direction: default_profile_direction(),
            half_length_m: default_half_length(),
            samples: default_profile_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TradeoffSpec {
    pub dfp: [f64; 3],
    /// Interelement spacings in wavelengths.
    #[serde(default)]
    pub spacings: Vec<f64>,
    /// Square array sides at the `[array]` spacing.
    #[serde(default)]
    pub sides: Vec<usize>,
    #[serde(default)]
    pub profile: ProfileSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecuritySpec {
    pub dfps: Vec<[f64; 3]>,
    #[serde(default)]
    pub sides: Vec<usize>,
    #[serde(default = "default_noise")]
    pub noise_power: f64,
    #[serde(default = "default_target_snr")]
    pub target_snr_db: f64,
    #[serde(default = "default_threshold")]
    pub threshold_db: f64,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveSpec {
    pub dfp: [f64; 3],
    pub tile_rows: usize,
    pub tile_cols: usize,
    #[serde(default = "default_bits")]
    pub phase_bits: u32,
    #[serde(default = "default_queries")]
    pub queries_per_epoch: u64,
    #[serde(default = "default_epochs")]
    pub max_epochs: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Per-element phase error bound of the rough CSI initialisation; random
    /// initialisation when absent.
    pub rough_csi_noise_rad: Option<f64>,
    #[serde(default = "default_stall")]
    pub stall_tolerance: f64,
    /// Second focal point, solved both cold and warm-started from the runs
    /// at `dfp`.
    pub transfer_to: Option<[f64; 3]>,
    /// Compare every run against exhaustive search over all phase codes.
    #[serde(default)]
    pub oracle: bool,
}

fn default_eta() -> f64 {
    0.9
}
fn default_peak_threshold() -> f64 {
    0.5
}
fn default_profile_direction() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}
fn default_half_length() -> f64 {
    0.5
}
fn default_profile_samples() -> usize {
    1001
}
fn default_noise() -> f64 {
    1.0
}
fn default_target_snr() -> f64 {
    10.0
}
fn default_threshold() -> f64 {
    5.0
}
fn default_bits() -> u32 {
    4
}
fn default_queries() -> u64 {
    64
}
fn default_epochs() -> usize {
    200
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_stall() -> f64 {
    1e-4
}

/// Largest number of phase codes the exhaustive oracle will enumerate.
pub const ORACLE_MAX_CODES: u64 = 1 << 20;

/// Validation failure pinned to a line of the scenario source.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub source: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.source, self.line, self.message)
    }
}

impl std::error::Error for ValidationError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Toml,
    Json,
}

/// Scenario text together with where it came from.
#[derive(Debug, Clone)]
pub struct ScenarioSource {
    pub name: String,
    pub text: String,
    format: Format,
}

impl ScenarioSource {
    pub fn from_text(name: &str, text: &str) -> Self {
        let format = if name.ends_with(".json") || text.trim_start().starts_with('{') {
            Format::Json
        } else {
            Format::Toml
        };
        Self {
            name: name.to_string(),
            text: text.to_string(),
            format,
        }
    }

    /// Reads `arg` as a file path, falling back to a builtin scenario name.
    pub fn load(arg: &str) -> Result<Self, ValidationError> {
        let path = Path::new(arg);
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| ValidationError {
                source: arg.to_string(),
                line: 1,
                message: format!("cannot read scenario: {e}"),
            })?;
            return Ok(Self::from_text(arg, &text));
        }
        match builtin(arg) {
            Some(text) => Ok(Self::from_text(&format!("builtin:{arg}"), text)),
            None => Err(ValidationError {
                source: arg.to_string(),
                line: 1,
                message: format!(
                    "no such scenario file or builtin (builtins: {})",
                    BUILTINS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
                ),
            }),
        }
    }

    pub fn parse(&self) -> Result<Scenario, ValidationError> {
        let scenario: Scenario = match self.format {
            Format::Toml => toml::from_str(&self.text).map_err(|e| {
                let line = e.span().map_or(1, |s| line_of_offset(&self.text, s.start));
                self.error(line, e.message().trim().to_string())
            })?,
            Format::Json => serde_json::from_str(&self.text).map_err(|e| {
                let msg = e.to_string();
                let msg = msg.split(" at line").next().unwrap_or(&msg).to_string();
                self.error(e.line().max(1), msg)
            })?,
        };
        Ok(scenario)
    }

    /// Parses and runs the semantic checks.
    pub fn load_scenario(&self) -> Result<Scenario, ValidationError> {
        let s = self.parse()?;
        s.validate().map_err(|(path, msg)| self.error(self.locate(&path), format!("{path}: {msg}")))?;
        Ok(s)
    }

    /// Reports a problem with the field at `path` (dotted, e.g.
    /// `adaptive.tile_rows`).
    pub fn field_error(&self, path: &str, message: &str) -> ValidationError {
        self.error(self.locate(path), format!("{path}: {message}"))
    }

    fn error(&self, line: usize, message: String) -> ValidationError {
        ValidationError {
            source: self.name.clone(),
            line,
            message,
        }
    }

    /// Best-effort line of the field at a dotted path; falls back to the
    /// enclosing section, then to line 1.
    pub fn locate(&self, path: &str) -> usize {
        let parts: Vec<(&str, usize)> = path
            .split('.')
            .map(|p| match p.split_once('[') {
                Some((name, idx)) => (name, idx.trim_end_matches(']').parse().unwrap_or(0)),
                None => (p, 0),
            })
            .collect();
        let lines: Vec<&str> = self.text.lines().collect();
        let mut from = 0;
        let mut found = None;
        for (name, idx) in &parts {
            let needle = match self.format {
                Format::Toml => None,
                Format::Json => Some(format!("\"{name}\"")),
            };
            let mut seen = 0;
            let hit = lines.iter().enumerate().skip(from).find(|(_, l)| {
                let m = match &needle {
                    Some(n) => l.contains(n.as_str()),
                    None => toml_mentions(l, name),
                };
                if m {
                    seen += 1;
                }
                m && seen > *idx
            });
            match hit {
                Some((i, _)) => {
                    found = Some(i);
                    from = i;
                }
                None => break,
            }
        }
        found.map_or(1, |i| i + 1)
    }
}

fn toml_mentions(line: &str, name: &str) -> bool {
    let t = line.trim_start();
    if t.starts_with('#') {
        return false;
    }
    if t.starts_with('[') {
        let header = t.trim_start_matches('[').split(']').next().unwrap_or("");
        return header.split('.').any(|h| h.trim() == name);
    }
    t.split(['{', ',', ' '])
        .filter(|s| !s.is_empty())
        .any(|tok| tok.split('=').next().map(str::trim) == Some(name) && (tok.contains('=') || t[t.find(tok).unwrap_or(0) + tok.len()..].trim_start().starts_with('=')))
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

type Check = Result<(), (String, String)>;

fn fail(path: impl Into<String>, msg: impl Into<String>) -> Check {
    Err((path.into(), msg.into()))
}

fn point(p: [f64; 3]) -> Point3 {
    Point3::new(p[0], p[1], p[2])
}

fn check_point(path: &str, p: [f64; 3]) -> Check {
    if p.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        fail(path, "coordinates must be finite")
    }
}

fn check_axis(path: &str, a: &AxisSpec) -> Check {
    check_point(&format!("{path}.direction"), a.direction)?;
    let n = point(a.direction).norm();
    if (n - 1.0).abs() > 1e-12 {
        return fail(format!("{path}.direction"), format!("must be a unit vector (norm {n})"));
    }
    if a.samples < 2 {
        return fail(format!("{path}.samples"), "at least 2 samples are required");
    }
    if !(a.start_m.is_finite() && a.end_m.is_finite() && a.end_m > a.start_m) {
        return fail(format!("{path}.end_m"), "end_m must be finite and greater than start_m");
    }
    Ok(())
}

fn check_grid(path: &str, g: &GridSpec) -> Check {
    check_point(&format!("{path}.origin"), g.origin)?;
    check_axis(&format!("{path}.axis1"), &g.axis1)?;
    check_axis(&format!("{path}.axis2"), &g.axis2)?;
    if point(g.axis1.direction).dot(&point(g.axis2.direction)).abs() > 1e-12 {
        return fail(format!("{path}.axis2.direction"), "axes must be orthogonal");
    }
    Ok(())
}

fn check_sides(path: &str, sides: &[usize]) -> Check {
    if sides.contains(&0) {
        return fail(path, "array sides must be at least 1");
    }
    Ok(())
}

impl Scenario {
    pub fn validate(&self) -> Check {
        if self.id.trim().is_empty() {
            return fail("id", "must be nonempty");
        }
        if self.id.contains(['/', '\\']) {
            return fail("id", "must not contain path separators");
        }
        if !(self.frequency_hz.is_finite() && self.frequency_hz > 0.0) {
            return fail("frequency_hz", "must be positive");
        }
        let a = &self.array;
        if a.rows == 0 {
            return fail("array.rows", "must be at least 1");
        }
        if a.cols == 0 {
            return fail("array.cols", "must be at least 1");
        }
        if !(a.spacing_wavelengths.is_finite() && a.spacing_wavelengths > 0.0) {
            return fail("array.spacing_wavelengths", "must be positive");
        }
        check_point("array.center", a.center)?;
        if let Some(f) = &self.field_map {
            check_point("field_map.dfp", f.dfp)?;
            check_sides("field_map.sides", &f.sides)?;
            if f.grids.is_empty() {
                return fail("field_map.grids", "at least one grid is required");
            }
            for (i, g) in f.grids.iter().enumerate() {
                check_grid(&format!("field_map.grids[{i}]"), g)?;
                if f.grids[..i].iter().any(|h| h.name == g.name) {
                    return fail(format!("field_map.grids[{i}].name"), format!("duplicate grid name `{}`", g.name));
                }
                if g.name.is_empty() || g.name.contains(['/', '\\']) {
                    return fail(format!("field_map.grids[{i}].name"), "must be a nonempty plain name");
                }
            }
            if !(f.eta > 0.0 && f.eta < 1.0) {
                return fail("field_map.eta", "must lie in (0, 1)");
            }
            if !(f.peak_threshold > 0.0 && f.peak_threshold <= 1.0) {
                return fail("field_map.peak_threshold", "must lie in (0, 1]");
            }
            if let Some(name) = &f.bfr_grid {
                if !f.grids.iter().any(|g| &g.name == name) {
                    return fail("field_map.bfr_grid", format!("no grid named `{name}`"));
                }
            }
        }
        if let Some(t) = &self.tradeoffs {
            check_point("tradeoffs.dfp", t.dfp)?;
            if t.spacings.is_empty() && t.sides.is_empty() {
                return fail("tradeoffs", "needs `spacings`, `sides` or both");
            }
            if t.spacings.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                return fail("tradeoffs.spacings", "spacings must be positive");
            }
            check_sides("tradeoffs.sides", &t.sides)?;
            let p = &t.profile;
            if p.samples < 5 {
                return fail("tradeoffs.profile.samples", "at least 5 samples are required");
            }
            if !(p.half_length_m.is_finite() && p.half_length_m > 0.0) {
                return fail("tradeoffs.profile.half_length_m", "must be positive");
            }
            check_point("tradeoffs.profile.direction", p.direction)?;
            if p.mode == ProfileKind::Axis && point(p.direction).normalized().is_none() {
                return fail("tradeoffs.profile.direction", "must be nonzero");
            }
        }
        if let Some(s) = &self.security {
            if s.dfps.is_empty() {
                return fail("security.dfps", "at least one focal point is required");
            }
            for (i, p) in s.dfps.iter().enumerate() {
                check_point(&format!("security.dfps[{i}]"), *p)?;
                if let Some(j) = s.dfps[..i].iter().position(|q| point(*q).distance(&point(*p)) < 1e-6) {
                    return fail("security.dfps", format!("focal points {j} and {i} coincide"));
                }
            }
            check_sides("security.sides", &s.sides)?;
            if !(s.noise_power.is_finite() && s.noise_power > 0.0) {
                return fail("security.noise_power", "must be positive");
            }
            if !(s.target_snr_db.is_finite() && s.threshold_db.is_finite()) {
                return fail("security.target_snr_db", "must be finite");
            }
            if s.target_snr_db <= s.threshold_db {
                return fail("security.threshold_db", "must be below target_snr_db");
            }
            check_grid("security.grid", &s.grid)?;
        }
        if let Some(ad) = &self.adaptive {
            check_point("adaptive.dfp", ad.dfp)?;
            if ad.tile_rows == 0 || a.rows % ad.tile_rows != 0 {
                return fail("adaptive.tile_rows", format!("must divide array.rows = {}", a.rows));
            }
            if ad.tile_cols == 0 || a.cols % ad.tile_cols != 0 {
                return fail("adaptive.tile_cols", format!("must divide array.cols = {}", a.cols));
            }
            if !(1..=16).contains(&ad.phase_bits) {
                return fail("adaptive.phase_bits", "must be in 1..=16");
            }
            if ad.queries_per_epoch == 0 {
                return fail("adaptive.queries_per_epoch", "must be positive");
            }
            if ad.max_epochs == 0 {
                return fail("adaptive.max_epochs", "must be positive");
            }
            if ad.seeds.is_empty() {
                return fail("adaptive.seeds", "at least one seed is required");
            }
            if let Some(e) = ad.rough_csi_noise_rad {
                if !(e.is_finite() && e >= 0.0) {
                    return fail("adaptive.rough_csi_noise_rad", "must be finite and nonnegative");
                }
            }
            if !(ad.stall_tolerance.is_finite() && ad.stall_tolerance >= 0.0) {
                return fail("adaptive.stall_tolerance", "must be finite and nonnegative");
            }
            if let Some(w) = ad.transfer_to {
                check_point("adaptive.transfer_to", w)?;
            }
            if ad.oracle {
                let codes = (a.rows * a.cols) as f64 * f64::from(ad.phase_bits);
                if codes > (ORACLE_MAX_CODES as f64).log2() {
                    return fail("adaptive.oracle", "exhaustive search limited to 2^20 phase codes");
                }
            }
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        wavelength_for(self.frequency_hz)
    }

    pub fn gain_model(&self) -> GainModel {
        self.gain.into()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization.into()
    }

    pub fn base_array(&self) -> nearfocus_core::Result<UniformPlanarArray> {
        let a = &self.array;
        let lambda = self.wavelength_m();
        UniformPlanarArray::new(
            a.rows,
            a.cols,
            a.spacing_wavelengths * lambda,
            point(a.center),
            a.plane.into(),
            lambda,
        )
    }

    /// The base array, or one square array per listed side.
    pub fn arrays(&self, sides: &[usize]) -> nearfocus_core::Result<Vec<UniformPlanarArray>> {
        let base = self.base_array()?;
        if sides.is_empty() {
            return Ok(vec![base]);
        }
        sides.iter().map(|&s| base.with_size(s, s)).collect()
    }
}

impl GridSpec {
    pub fn grid(&self) -> nearfocus_core::Result<SamplingGrid> {
        let axis = |a: &AxisSpec| GridAxis::new(point(a.direction), a.start_m, a.end_m, a.samples);
        SamplingGrid::plane(point(self.origin), axis(&self.axis1), axis(&self.axis2))
    }
}

impl FieldMapSpec {
    pub fn dfp(&self) -> Point3 {
        point(self.dfp)
    }

    pub fn bfr_grid(&self) -> &GridSpec {
        self.bfr_grid
            .as_ref()
            .and_then(|n| self.grids.iter().find(|g| &g.name == n))
            .unwrap_or(&self.grids[0])
    }
}

impl TradeoffSpec {
    pub fn dfp(&self) -> Point3 {
        point(self.dfp)
    }

    pub fn line(&self) -> ProfileLine {
        ProfileLine {
            mode: match self.profile.mode {
                ProfileKind::Axis => ProfileMode::Axis(point(self.profile.direction)),
                ProfileKind::Radial => ProfileMode::Radial,
            },
            half_length_m: self.profile.half_length_m,
            samples: self.profile.samples,
        }
    }
}

impl SecuritySpec {
    pub fn dfps(&self) -> Vec<Point3> {
        self.dfps.iter().copied().map(point).collect()
    }
}

impl AdaptiveSpec {
    pub fn dfp(&self) -> Point3 {
        point(self.dfp)
    }

    pub fn transfer_to(&self) -> Option<Point3> {
        self.transfer_to.map(point)
    }

    pub fn config(&self, seed: u64, gain: GainModel) -> SbfConfig {
        let mut c = SbfConfig::new(self.tile_rows, self.tile_cols);
        c.phase_bits = self.phase_bits;
        c.queries_per_epoch = self.queries_per_epoch;
        c.max_epochs = self.max_epochs;
        c.seed = seed;
        c.gain = gain;
        c.stall_tolerance = self.stall_tolerance;
        c.init = match self.rough_csi_noise_rad {
            Some(noise_rad) => InitMode::RoughCsi { noise_rad },
            None => InitMode::Random,
        };
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_validate() {
        for (name, text) in BUILTINS {
            let src = ScenarioSource::from_text(name, text);
            let s = src.load_scenario().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&s.id, name);
        }
    }

    #[test]
    fn empty_file_names_missing_field() {
        let err = ScenarioSource::from_text("empty.toml", "").parse().unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("missing field"), "{}", err.message);
    }

    #[test]
    fn syntax_error_has_line() {
        let text = "id = \"x\"\nfrequency_hz = 28e9\n[array]\nrows = = 3\n";
        let err = ScenarioSource::from_text("bad.toml", text).parse().unwrap_err();
        assert_eq!(err.line, 4);
    }

    #[test]
    fn semantic_error_points_at_field() {
        let text = "id = \"x\"\nfrequency_hz = 28e9\n\n[array]\nrows = 60\ncols = 60\nspacing_wavelengths = 0.5\n\n[adaptive]\ndfp = [0.0, 1.0, 0.0]\ntile_rows = 7\ntile_cols = 6\n";
        let err = ScenarioSource::from_text("t.toml", text).load_scenario().unwrap_err();
        assert_eq!(err.line, 11, "{err}");
        assert!(err.message.contains("adaptive.tile_rows"));
    }

    #[test]
    fn json_scenarios_are_accepted() {
        let text = r#"{
  "id": "j",
  "frequency_hz": 28e9,
  "array": {"rows": 4, "cols": 4, "spacing_wavelengths": -1.0}
}"#;
        let err = ScenarioSource::from_text("s.json", text).load_scenario().unwrap_err();
        assert_eq!(err.line, 4, "{err}");
        let ok = text.replace("-1.0", "0.5");
        assert!(ScenarioSource::from_text("s.json", &ok).load_scenario().is_ok());
    }

    #[test]
    fn grid_array_index_is_located() {
        let text = "id = \"x\"\nfrequency_hz = 28e9\n[array]\nrows = 6\ncols = 6\nspacing_wavelengths = 0.5\n[field_map]\ndfp = [0.0, 1.0, 0.0]\n\n[[field_map.grids]]\nname = \"a\"\naxis1 = { direction = [1.0, 0.0, 0.0], start_m = -0.5, end_m = 0.5, samples = 11 }\naxis2 = { direction = [0.0, 1.0, 0.0], start_m = 0.5, end_m = 1.5, samples = 11 }\n\n[[field_map.grids]]\nname = \"b\"\naxis1 = { direction = [1.0, 0.0, 0.0], start_m = -0.5, end_m = 0.5, samples = 1 }\naxis2 = { direction = [0.0, 1.0, 0.0], start_m = 0.5, end_m = 1.5, samples = 11 }\n";
        let err = ScenarioSource::from_text("g.toml", text).load_scenario().unwrap_err();
        assert_eq!(err.line, 17, "{err}");
    }
}
