//! Split-step integration of the steady-state paraxial probe equation
//! `∂z Ω_p = i (λ/4π) ∇⊥² Ω_p + i η ρ_eg(Ω_p)`.

mod absorber;
mod diffraction;
mod field;
mod medium;
mod stepper;

pub use absorber::{apply_absorber, Absorber};
pub use diffraction::{diffraction_step, Diffractor};
pub use field::{ComplexField2D, TransverseGrid};
pub use medium::{medium_step, Medium, UniformSlab};
pub use stepper::{propagate, propagate_with, PropagationSettings};
