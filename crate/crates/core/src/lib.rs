//! Steady-state Maxwell-Bloch simulation of a weak probe beam crossing a cold
//! atomic cloud under ladder-type (Rydberg) EIT.
//!
//! The crate is organised in three layers:
//!
//! * [`atomic`]: single-atom response of the g–e–r ladder, both the closed-form
//!   linear susceptibility and the nonperturbative Liouvillian steady state.
//! * [`propagation`]: symmetric split-step integration of the paraxial
//!   equation for the probe Rabi-frequency envelope.
//! * [`scenario`]: cloud and beam geometry, parameter presets, exit-plane
//!   images, transmission spectra and the thin-cloud analytic transmission.
//!
//! Sign convention: the susceptibility carries a `+i` prefactor so that
//! `k·Im χ > 0` is absorption and `T = exp(-k ∫ Im χ dz)` never exceeds one
//! for a passive medium. The propagation equation `∂z Ω_p = i η ρ_eg` and the
//! relation `χ = 2 η ρ_eg / (k Ω_p)` are consistent with this choice.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN. Index
// loops are the clearest form for the fixed-size dense linear algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod atomic;
pub mod error;
pub mod propagation;
pub mod scenario;

pub use num_complex::Complex64 as C64;

/// Version of this library, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use atomic::{
    build_liouvillian, chi_linear, coherence_eg, refractive_index, steady_state, DensityMatrix3, DirectResponse,
    FieldPoint, LevelScheme, LinearResponse, Liouvillian, LocalResponse, ResponseTable, Susceptibility,
};
pub use error::{Error, Result};
pub use propagation::{
    apply_absorber, diffraction_step, medium_step, propagate, ComplexField2D, Diffractor, Medium, PropagationSettings,
    TransverseGrid,
};
pub use scenario::{
    preset, run_image, run_spectrum, thin_cloud_center_transmission, thin_cloud_transmission, AtomicCloud,
    CouplingBeam, ImageResult, ProbeBeam, ProbeProfile, ResponseMode, Scenario, SolverOptions, SpectrumResult,
};
