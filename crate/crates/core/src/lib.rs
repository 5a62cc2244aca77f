//! Numerical core for nonadiabatic holonomic gates on capacitively coupled
//! three-level transmons.
//!
//! The crate is `no_std` (with `alloc`) and contains everything that does not
//! touch the file system: dense operator algebra, Bessel coefficients, the
//! interaction-picture Hamiltonian builders, gate synthesis, a fixed-step
//! Lindblad integrator and the fidelity metrics. Configuration files, the
//! scenario runner and the CLI live in the `nhqc-sim` companion crate.
//!
//! Conventions used throughout:
//!
//! * frequencies and rates are angular (rad/s), times are seconds;
//! * multi-transmon basis states are ordered row-major, so `|m⟩_A ⊗ |n⟩_B`
//!   has index `d_B·m + n`;
//! * operators are dense [`ComplexMatrix`] values; the largest register is
//!   three transmons with three levels each (27 states).
#![no_std]
#![deny(rust_2018_idioms, unused_must_use)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod bessel;
pub mod device;
pub mod frame;
pub mod holonomy;
pub mod lindblad;
pub mod metrics;
pub mod operator;
pub mod svd;

pub use device::{Coupling, DeviceError, LatticeModel, Role, TransmonSpec};
pub use frame::{DriveSpec, Hamiltonian, ModulationSpec, TimeDependentHamiltonian};
pub use holonomy::{GateKind, GateRecipe, SegmentSchedule};
pub use lindblad::{DensityMatrix, NoiseSpec, ProcessMatrix};
pub use metrics::FidelityCurve;
pub use operator::{ComplexMatrix, OperatorError, StateVector, C64};

/// Two pi, spelled out once.
pub const TAU: f64 = core::f64::consts::TAU;

/// Converts an ordinary frequency in MHz to an angular frequency in rad/s.
pub fn mhz(value: f64) -> f64 {
    TAU * value * 1e6
}

/// Converts an ordinary frequency in kHz to an angular frequency in rad/s.
pub fn khz(value: f64) -> f64 {
    TAU * value * 1e3
}
