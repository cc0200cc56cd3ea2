//! Interference and secret-key-rate models for classical-quantum coexistence
//! over single-mode fiber.
//!
//! The crate is organized in four layers:
//!
//! * [`fiber`] — wavelength-dependent fiber physics (refractive index, mode
//!   field, dispersion, attenuation, Rayleigh and Raman efficiencies).
//! * [`interference`] — closed-form co-/counter-propagating interference
//!   power from spontaneous Raman scattering, four-wave mixing and linear
//!   leakage, together with a longitudinal ODE reference integrator, FWM
//!   combinatorics, and characteristic lengths.
//! * [`qkd`] — conversion of interference power into protocol-level
//!   quantities (QBER, excess noise in shot-noise units) and asymptotic
//!   secret-key rates for two-state BB84 and Gaussian-modulated
//!   coherent-state protocols.
//! * [`scenario`] — executable scenarios binding a fiber, a channel plan and
//!   receiver parameters; wavelength/length sweeps, band averaging, and
//!   quantum-channel placement optimization.
//!
//! All internal quantities are SI (W, m, s, Hz); decibel and kilometre forms
//! appear only at I/O boundaries via [`units`].

pub mod constants;
pub mod error;
pub mod fiber;
pub mod interference;
pub mod qkd;
pub mod scenario;
pub mod units;

pub use error::{Error, Result};
pub use fiber::{
    AttenuationModel, FiberProfile, OhPeak, RamanGainTable, SellmeierCoefficients,
    StepIndexGeometry,
};
pub use interference::{
    Channel, ChannelPlan, ChannelRole, Direction, NoiseBreakdown, PhaseMismatch,
};
pub use qkd::{ChannelCondition, CvReceiverParams, Detection, DvReceiverParams, GaussianCm};
pub use scenario::{Band, Protocol, Scenario, SweepRecord, SweepResult};
