//! Parameter sets of the reference measurements (mean values).

use std::collections::BTreeMap;

use super::beams::{AtomicCloud, CouplingBeam, ProbeBeam, ProbeProfile};
use super::Scenario;
use crate::atomic::LevelScheme;
use crate::error::{Error, Result};
use crate::propagation::{PropagationSettings, TransverseGrid};

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3a", "fig3b", "fig3c", "fig4"];

/// Object plane of the imaging system, measured from the molasses cloud center [m].
const OBJECT_PLANE: f64 = 1.1e-3;
/// Radial 1/e² radius of the molasses cloud, middle of 2.0–2.2 mm [m].
const MOLASSES_W_R: f64 = 2.1e-3;
const WINDOW: f64 = 512e-6;
const GRID_POINTS: usize = 256;
const DZ: f64 = 25e-6;
const THIN_DZ: f64 = 5e-6;

struct Measurement {
    n0: f64,
    w_z: f64,
    w_c: f64,
    omega_c0: f64,
    delta_c: f64,
    omega_p0: f64,
    uncertainties: Vec<(&'static str, f64)>,
}

fn measurement(name: &str) -> Option<Measurement> {
    // Rates in units of Γ_e, lengths in metres, densities in m⁻³.
    let molasses = |n0, dn0, w_z, w_c, omega_c0, delta_c, dw_z| Measurement {
        n0,
        w_z,
        w_c,
        omega_c0,
        delta_c,
        omega_p0: 0.16,
        uncertainties: vec![
            ("n0", dn0),
            ("w_z", dw_z),
            ("w_c", 1e-6),
            ("omega_c0_in_gamma_e", 0.05),
            ("delta_c_in_gamma_e", 0.05),
            ("omega_p0_in_gamma_e", 0.01),
        ],
    };
    Some(match name {
        "fig2" | "fig3b" => molasses(0.59e16, 0.06e16, 1.1e-3, 49e-6, 1.98, 0.0, 0.1e-3),
        "fig3a" => molasses(1.40e16, 0.15e16, 1.2e-3, 49e-6, 1.98, 0.16, 0.1e-3),
        "fig3c" => molasses(0.69e16, 0.07e16, 1.1e-3, 34e-6, 3.18, 0.0, 0.1e-3),
        // Coupling parameters of the thin-cloud run were not reported; the
        // 49 µm / 1.98 Γ_e beam of the molasses runs is reused.
        "fig4" => Measurement {
            n0: 3.30e16,
            w_z: 55e-6,
            w_c: 49e-6,
            omega_c0: 1.98,
            delta_c: 0.0,
            omega_p0: 0.05,
            uncertainties: vec![("n0", 0.03e16), ("w_z", 0.5e-6)],
        },
        _ => return None,
    })
}

/// Scenario for one of [`PRESET_NAMES`].
pub fn preset(name: &str) -> Result<Scenario> {
    let c = measurement(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    let levels = LevelScheme::default();
    let gamma = levels.gamma_e;
    let thin = name == "fig4";

    let cloud = AtomicCloud { n0: c.n0, w_r: MOLASSES_W_R, w_z: c.w_z, center_z: 0.0, radially_uniform: false };
    let coupling =
        CouplingBeam { omega_c0: c.omega_c0 * gamma, w_c: c.w_c, z_focus: 0.0, wavelength: levels.lambda_coupling };
    let probe = ProbeBeam { omega_p0: c.omega_p0 * gamma, profile: ProbeProfile::Uniform };
    let grid = TransverseGrid::square(GRID_POINTS, WINDOW)?;
    // The thin cloud sits at the object plane: it is crossed completely and
    // the exit field is imaged back onto the cloud center. The molasses cloud
    // is cut by the object plane, where the field is reported directly.
    let (z_start, z_end, dz, image_plane) =
        if thin { (-4.0 * c.w_z, 4.0 * c.w_z, THIN_DZ, Some(0.0)) } else { (-2.5 * c.w_z, OBJECT_PLANE, DZ, None) };
    let settings = PropagationSettings {
        dz,
        z_start,
        z_end,
        lensing: true,
        absorber_order: 8,
        absorber_width: 0.1 * WINDOW,
        medium_substeps: 1,
        image_plane,
    };
    let uncertainties: BTreeMap<String, f64> = c
        .uncertainties
        .iter()
        .map(|(k, v)| {
            let value = if k.ends_with("_in_gamma_e") { v * gamma } else { *v };
            (k.trim_end_matches("_in_gamma_e").to_string(), value)
        })
        .collect();
    let scenario = Scenario {
        name: name.to_string(),
        cloud,
        coupling,
        probe,
        levels,
        delta_c: c.delta_c * gamma,
        grid,
        settings,
        center_radius: c.w_c / 5.0,
        uncertainties,
    };
    scenario.validate()?;
    Ok(scenario)
}
