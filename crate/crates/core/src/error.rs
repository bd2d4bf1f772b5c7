use core::fmt;

use crate::geometry::Point3;

/// Side of a peak on a line profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidArray(&'static str),
    InvalidGrid(&'static str),
    InvalidParameter(&'static str),
    /// An evaluation point lies on (or numerically at) an element position.
    PointOnAperture { distance_m: f64 },
    LengthMismatch { left: usize, right: usize },
    DuplicateFocalPoint { first: Point3, second: Point3 },
    GridTooSmall { resolution: usize },
    NotPlanar,
    NoCrossing { side: Side },
    CalibrationDiverged { iterations: usize },
    IndivisibleTiling {
        rows: usize,
        cols: usize,
        tile_rows: usize,
        tile_cols: usize,
    },
    ShapeMismatch(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArray(msg) => write!(f, "invalid array: {msg}"),
            Error::InvalidGrid(msg) => write!(f, "invalid sampling grid: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::PointOnAperture { distance_m } => write!(
                f,
                "evaluation point coincides with an element (distance {distance_m:e} m)"
            ),
            Error::LengthMismatch { left, right } => {
                write!(f, "vector length mismatch: {left} vs {right}")
            }
            Error::DuplicateFocalPoint { first, second } => {
                write!(f, "duplicate focal points {first} and {second}")
            }
            Error::GridTooSmall { resolution } => {
                write!(f, "grid resolution {resolution} too small (need >= 3)")
            }
            Error::NotPlanar => f.write_str("operation requires a two-dimensional grid"),
            Error::NoCrossing { side } => {
                write!(f, "profile never falls below half power on the {side} side")
            }
            Error::CalibrationDiverged { iterations } => write!(
                f,
                "power calibration did not converge after {iterations} iterations"
            ),
            Error::IndivisibleTiling {
                rows,
                cols,
                tile_rows,
                tile_cols,
            } => write!(
                f,
                "{tile_rows}x{tile_cols} tiles do not divide a {rows}x{cols} array"
            ),
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
