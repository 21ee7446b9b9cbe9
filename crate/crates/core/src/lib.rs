//! Virtual magnetic near-field scanner.
//!
//! The crate simulates the magnetic field radiated by microstrip traces over a
//! ground plane, models the response of a square loop probe, implements the
//! antenna-factor calibration chain used by IEC 61967-1 style scanners, and
//! reads/writes the file formats a scan produces (Touchstone v1, map CSV,
//! binary PGM).
//!
//! Frame convention: the ground plane is `z = 0`, the trace lies at
//! `z = substrate.h`, and the scan surface is `z = substrate.h + z_height`.
//! All phasors are RMS with an `exp(+jωt)` time factor.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod config;
pub mod error;
pub mod field;
pub mod io;
pub mod model;
pub mod probe;
pub mod quadrature;
pub mod scan;

pub use error::{Error, Result};
pub use model::{
    db20, undb20, DriveSpec, FrequencySweep, LoopProbe, Phasor, ScanGrid, Spacing, Substrate,
    Termination, TracePath, Vec3,
};
