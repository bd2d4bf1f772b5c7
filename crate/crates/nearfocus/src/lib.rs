//! Scenario-driven front end for `nearfocus-core`: scenario files, parallel
//! field evaluation, CSV datasets with checksummed manifests, and the
//! acceptance suite behind `nearfocus verify`.

pub mod error;
pub mod output;
pub mod run;
pub mod scenario;
pub mod verify;

pub use nearfocus_core as core;
