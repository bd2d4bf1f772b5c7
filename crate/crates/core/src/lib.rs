//! Near-field spot beamfocusing for large planar phased arrays.
//!
//! The crate is `no_std` with `alloc`. It covers spherical-wavefront array
//! responses ([`channel`]), MRT beamformers ([`beamforming`]), power maps
//! ([`field`]), spot metrics such as HPBW and beamfocusing radius
//! ([`metrics`]), SINR-based physical-layer security regions ([`security`])
//! and CSI-free adaptive focusing with sub-array power feedback
//! ([`adaptive`]).
//!
//! ```
//! use nearfocus_core::prelude::*;
//!
//! let lambda = wavelength_for(28e9);
//! let array = UniformPlanarArray::square(16, 0.5, lambda).unwrap();
//! let dfp = Point3::new(0.0, 1.0, 0.0);
//! let a = steering_vector(&array, dfp, GainModel::Unit).unwrap();
//! let w = mrt_weights(&a, false);
//! let p = focal_power(&a, &w).unwrap();
//! assert!((p - 256.0).abs() < 1e-9);
//! ```
#![no_std]

extern crate alloc;

pub mod adaptive;
pub mod beamforming;
pub mod channel;
pub mod contour;
pub mod error;
pub mod field;
pub mod geometry;
pub mod metrics;
pub mod security;

pub use error::{Error, Result, Side};

pub mod prelude {
    pub use crate::adaptive::{
        epochs_to_fraction, measure_power, partition, quantized_mrt_bound, run_sbf, synchronize, AdaptiveRun,
        InitMode, SbfConfig, SubArrayPartition,
    };
    pub use crate::beamforming::{focal_power, mrt_weights, multi_focal_weights, quantize_phases, BeamWeights};
    pub use crate::channel::{
        correlation, fraunhofer_distance, steering_vector, wavelength_for, GainModel, SteeringVector,
    };
    pub use crate::field::{evaluate_field, find_focal_peaks, FieldMap, Normalization};
    pub use crate::geometry::{ArrayPlane, GridAxis, Point3, SamplingGrid, UniformPlanarArray};
    pub use crate::metrics::{bfr, hpbw, size_tradeoff, spacing_tradeoff, ProfileLine, ProfileMode};
    pub use crate::security::{calibrate_power, secure_boundary, security_map, SecurityScenario};
    pub use crate::{Error, Result};
}
