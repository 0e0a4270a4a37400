//! Coupled-mode model of an electron switch built from two parallel graphene
//! electron waveguides.
//!
//! The pipeline runs bottom-up:
//!
//! 1. [`device`] turns a flat configuration into a validated [`CouplerSpec`].
//! 2. [`modes`] finds the guided transverse modes of each well.
//! 3. [`coupling`] evaluates mode overlaps and the coupling coefficients.
//! 4. [`cmt`] propagates the two-level amplitude equations and extracts the
//!    transfer length and transition frequency.
//! 5. [`sweep`] maps those metrics over a `(d, D)` design grid and fits the
//!    exponential separation law.
//!
//! Units throughout: energies in meV, lengths in nm, wavevectors in nm⁻¹,
//! frequencies in s⁻¹.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmt;
pub mod coupling;
pub mod device;
mod error;
pub mod modes;
pub mod quantities;
pub mod sweep;

pub use cmt::{
    analytic_rabi, transfer_metrics, Amplitudes, CmtSystem, PropagationTrace, Propagator,
    PropagatorRegistry, TransferMetrics,
};
pub use coupling::{coupling_coefficients, overlap_integral, CouplingResult};
pub use device::{build_spec, Channel, CouplerGeometry, CouplerSpec, DeviceConfig, WaveguideSpec};
pub use error::{Error, Result};
pub use modes::{find_modes, DispersionContext, GuidedMode, Parity};
pub use sweep::{fit_exponential, sweep_grid, ExponentialFit, SweepGrid, SweepResult};
