//! Single-atom response of the three-level ladder g → e → r.

mod density;
mod levels;
mod linalg;
mod liouvillian;
mod response;
mod susceptibility;

pub use density::DensityMatrix3;
pub use levels::{FieldPoint, Level, LevelScheme, DEFAULT_FIELD_CAP};
pub use liouvillian::{build_liouvillian, coherence_eg, steady_state, Liouvillian};
pub use response::{DirectResponse, LinearResponse, LocalResponse, ResponseTable};
pub use susceptibility::{chi_linear, refractive_index, susceptibility_denominator, Susceptibility};
