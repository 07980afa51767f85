//! Cloud and beam geometry, measurement presets, and the drivers that turn a
//! scenario into exit-plane images and center-transmission spectra.

mod beams;
mod document;
mod presets;
pub mod quadrature;
mod results;
mod runner;
mod thin;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use beams::{AtomicCloud, CouplingBeam, ProbeBeam, ProbeProfile};
pub use document::ScenarioDocument;
pub use presets::{preset, PRESET_NAMES};
pub use results::{ImageResult, SpectrumResult};
pub use runner::{
    run_image, run_image_with, run_scan, run_spectrum, run_spectrum_with, simulate, spectrum_from_images, Diagnostics,
    ResponseMode, SolverOptions,
};
pub use thin::{optical_depth, thin_cloud_center_transmission, thin_cloud_transmission};

use crate::atomic::{LevelScheme, LocalResponse};
use crate::error::{Error, Result};
use crate::propagation::{Medium, PropagationSettings, TransverseGrid};

/// Everything needed to simulate one experimental configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub cloud: AtomicCloud,
    pub coupling: CouplingBeam,
    pub probe: ProbeBeam,
    pub levels: LevelScheme,
    /// Coupling detuning [rad/s].
    pub delta_c: f64,
    pub grid: TransverseGrid,
    pub settings: PropagationSettings,
    /// Radius of the disk averaged for the center transmission [m].
    pub center_radius: f64,
    /// One-sigma uncertainties of the preset parameters, SI units, keyed by field name.
    #[serde(default)]
    pub uncertainties: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.levels.validate()?;
        self.cloud.validate()?;
        self.coupling.validate()?;
        self.probe.validate()?;
        self.grid.validate()?;
        self.grid.check_window(self.coupling.w_c)?;
        self.settings.validate()?;
        if !self.delta_c.is_finite() {
            return Err(Error::InvalidParameter("delta_c must be finite".into()));
        }
        if !(self.center_radius >= 0.0) {
            return Err(Error::InvalidParameter("center radius must be >= 0".into()));
        }
        if self.settings.absorber_width >= 0.5 * self.grid.lx.min(self.grid.ly) {
            return Err(Error::InvalidParameter("absorber band must be narrower than half the window".into()));
        }
        Ok(())
    }

    /// Converts a rate in units of Γ_e to rad/s.
    pub fn gamma_units(&self, value: f64) -> f64 {
        value * self.levels.gamma_e
    }
}

/// Medium built from a scenario's cloud and coupling beam.
pub struct ScenarioMedium<'a> {
    cloud: &'a AtomicCloud,
    coupling: &'a CouplingBeam,
    eta_per_density: f64,
    wavelength: f64,
    response: Box<dyn LocalResponse + 'a>,
}

impl<'a> ScenarioMedium<'a> {
    pub fn new(scenario: &'a Scenario, response: Box<dyn LocalResponse + 'a>) -> Self {
        ScenarioMedium {
            cloud: &scenario.cloud,
            coupling: &scenario.coupling,
            eta_per_density: scenario.levels.eta(1.0),
            wavelength: scenario.levels.lambda_probe,
            response,
        }
    }
}

impl Medium for ScenarioMedium<'_> {
    fn eta(&self, x: f64, y: f64, z: f64) -> f64 {
        self.eta_per_density * self.cloud.density((x * x + y * y).sqrt(), z)
    }

    fn coupling(&self, x: f64, y: f64, z: f64) -> f64 {
        self.coupling.magnitude((x * x + y * y).sqrt(), z)
    }

    fn response(&self) -> &dyn LocalResponse {
        self.response.as_ref()
    }

    fn probe_wavelength(&self) -> f64 {
        self.wavelength
    }
}
