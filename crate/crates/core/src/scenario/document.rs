//! Structured-text (TOML) form of a [`Scenario`].
//!
//! All quantities are SI. Rates that are usually quoted relative to Γ_e may
//! instead (or additionally) be given through an `*_in_gamma_e` key; when
//! both forms are present they must agree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::beams::{AtomicCloud, CouplingBeam, ProbeBeam, ProbeProfile};
use super::Scenario;
use crate::atomic::LevelScheme;
use crate::error::{Error, Result};
use crate::propagation::{PropagationSettings, TransverseGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    pub delta_c: Option<f64>,
    pub delta_c_in_gamma_e: Option<f64>,
    pub center_radius: Option<f64>,
    pub levels: LevelsSection,
    pub cloud: CloudSection,
    pub coupling: CouplingSection,
    pub probe: ProbeSection,
    pub grid: TransverseGrid,
    pub propagation: PropagationSettings,
    #[serde(default)]
    pub uncertainties: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsSection {
    pub gamma_e: f64,
    pub gamma_r: f64,
    pub gamma_p: f64,
    pub gamma_c: Option<f64>,
    /// Target g–r coherence decay; sets `gamma_c` when that key is absent.
    pub gamma_gr: Option<f64>,
    pub lambda_probe: f64,
    pub lambda_coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudSection {
    pub n0: f64,
    pub w_r: f64,
    pub w_z: f64,
    #[serde(default)]
    pub center_z: f64,
    #[serde(default)]
    pub radially_uniform: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub omega_c0: Option<f64>,
    pub omega_c0_in_gamma_e: Option<f64>,
    pub w_c: f64,
    #[serde(default)]
    pub z_focus: f64,
    pub wavelength: Option<f64>,
    /// Derived, informational.
    pub rayleigh_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub omega_p0: Option<f64>,
    pub omega_p0_in_gamma_e: Option<f64>,
    /// `"uniform"` or `"gaussian"`.
    pub profile: String,
    pub w_p: Option<f64>,
}

fn agree(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-12 * scale)
}

fn resolve(name: &str, si: Option<f64>, relative: Option<f64>, gamma_e: f64) -> Result<f64> {
    match (si, relative) {
        (Some(v), None) => Ok(v),
        (None, Some(r)) => Ok(r * gamma_e),
        (Some(v), Some(r)) if agree(v, r * gamma_e, gamma_e) => Ok(v),
        (Some(v), Some(r)) => {
            Err(Error::InvalidParameter(format!("{name} = {v:e} rad/s disagrees with {name}_in_gamma_e = {r}")))
        }
        (None, None) => Err(Error::InvalidParameter(format!("missing {name} (or {name}_in_gamma_e)"))),
    }
}

impl ScenarioDocument {
    pub fn from_scenario(s: &Scenario) -> Self {
        let g = s.levels.gamma_e;
        ScenarioDocument {
            name: s.name.clone(),
            delta_c: Some(s.delta_c),
            delta_c_in_gamma_e: Some(s.delta_c / g),
            center_radius: Some(s.center_radius),
            levels: LevelsSection {
                gamma_e: s.levels.gamma_e,
                gamma_r: s.levels.gamma_r,
                gamma_p: s.levels.gamma_p,
                gamma_c: Some(s.levels.gamma_c),
                gamma_gr: Some(s.levels.gamma_gr()),
                lambda_probe: s.levels.lambda_probe,
                lambda_coupling: s.levels.lambda_coupling,
            },
            cloud: CloudSection {
                n0: s.cloud.n0,
                w_r: s.cloud.w_r,
                w_z: s.cloud.w_z,
                center_z: s.cloud.center_z,
                radially_uniform: s.cloud.radially_uniform,
            },
            coupling: CouplingSection {
                omega_c0: Some(s.coupling.omega_c0),
                omega_c0_in_gamma_e: Some(s.coupling.omega_c0 / g),
                w_c: s.coupling.w_c,
                z_focus: s.coupling.z_focus,
                wavelength: Some(s.coupling.wavelength),
                rayleigh_length: Some(s.coupling.rayleigh_length()),
            },
            probe: ProbeSection {
                omega_p0: Some(s.probe.omega_p0),
                omega_p0_in_gamma_e: Some(s.probe.omega_p0 / g),
                profile: match s.probe.profile {
                    ProbeProfile::Uniform => "uniform".into(),
                    ProbeProfile::Gaussian { .. } => "gaussian".into(),
                },
                w_p: match s.probe.profile {
                    ProbeProfile::Uniform => None,
                    ProbeProfile::Gaussian { w_p } => Some(w_p),
                },
            },
            grid: s.grid,
            propagation: s.settings,
            uncertainties: s.uncertainties.clone(),
        }
    }

    pub fn into_scenario(self) -> Result<Scenario> {
        let l = &self.levels;
        let mut levels = LevelScheme {
            gamma_e: l.gamma_e,
            gamma_r: l.gamma_r,
            gamma_p: l.gamma_p,
            gamma_c: l.gamma_c.unwrap_or(0.0),
            lambda_probe: l.lambda_probe,
            lambda_coupling: l.lambda_coupling,
        };
        match (l.gamma_c, l.gamma_gr) {
            (Some(_), Some(target)) if !agree(levels.gamma_gr(), target, l.gamma_e) => {
                return Err(Error::InvalidParameter(format!(
                    "levels.gamma_gr = {target:e} is inconsistent with gamma_r, gamma_p and gamma_c"
                )));
            }
            (None, Some(target)) => levels = levels.with_gamma_gr(target)?,
            (None, None) => return Err(Error::InvalidParameter("levels need gamma_c or gamma_gr".into())),
            _ => {}
        }
        let g = levels.gamma_e;
        let coupling = CouplingBeam {
            omega_c0: resolve("omega_c0", self.coupling.omega_c0, self.coupling.omega_c0_in_gamma_e, g)?,
            w_c: self.coupling.w_c,
            z_focus: self.coupling.z_focus,
            wavelength: self.coupling.wavelength.unwrap_or(levels.lambda_coupling),
        };
        if let Some(z0) = self.coupling.rayleigh_length {
            if !agree(z0, coupling.rayleigh_length(), 1.0) {
                return Err(Error::InvalidParameter(
                    "coupling.rayleigh_length disagrees with w_c and wavelength".into(),
                ));
            }
        }
        let profile = match (self.probe.profile.as_str(), self.probe.w_p) {
            ("uniform", None) => ProbeProfile::Uniform,
            ("gaussian", Some(w_p)) => ProbeProfile::Gaussian { w_p },
            ("uniform", Some(_)) => return Err(Error::InvalidParameter("probe.w_p given for a uniform probe".into())),
            ("gaussian", None) => return Err(Error::InvalidParameter("gaussian probe needs probe.w_p".into())),
            (other, _) => return Err(Error::InvalidParameter(format!("unknown probe profile `{other}`"))),
        };
        let probe = ProbeBeam {
            omega_p0: resolve("omega_p0", self.probe.omega_p0, self.probe.omega_p0_in_gamma_e, g)?,
            profile,
        };
        let scenario = Scenario {
            name: self.name,
            cloud: AtomicCloud {
                n0: self.cloud.n0,
                w_r: self.cloud.w_r,
                w_z: self.cloud.w_z,
                center_z: self.cloud.center_z,
                radially_uniform: self.cloud.radially_uniform,
            },
            coupling,
            probe,
            levels,
            delta_c: resolve("delta_c", self.delta_c, self.delta_c_in_gamma_e, g)?,
            grid: self.grid,
            settings: self.propagation,
            center_radius: self.center_radius.unwrap_or(self.coupling.w_c / 5.0),
            uncertainties: self.uncertainties,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl Scenario {
    pub fn to_toml(&self) -> String {
        toml::to_string(&ScenarioDocument::from_scenario(self)).expect("scenario document serialises")
    }

    pub fn from_toml(text: &str) -> Result<Scenario> {
        let doc: ScenarioDocument = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_scenario()
    }
}
