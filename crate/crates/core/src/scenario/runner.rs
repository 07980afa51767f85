use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::results::{ImageResult, SpectrumResult};
use super::{Scenario, ScenarioMedium};
use crate::atomic::{DirectResponse, LinearResponse, LocalResponse, ResponseTable};
use crate::error::{Error, Result};
use crate::propagation::{propagate, ComplexField2D};
use crate::C64;

/// How the local atomic response is evaluated during propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ResponseMode {
    /// Interpolated master-equation steady state on a `size × size` table.
    Table { size: usize },
    /// Master-equation solve at every grid point and step.
    Direct,
    /// Weak-probe closed form.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub response: ResponseMode,
    /// Initial table range in |Ω_p| as a multiple of the incoming peak Ω_p0;
    /// doubled and the run repeated whenever the field outgrows it.
    pub probe_headroom: f64,
    /// Upper bound on table range doublings.
    pub max_table_extensions: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { response: ResponseMode::Table { size: 128 }, probe_headroom: 4.0, max_table_extensions: 6 }
    }
}

/// Bookkeeping of one propagation, reported in run manifests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub table_extensions: u32,
    /// Upper |Ω_p| limit of the final response table [rad/s] (0 without a table).
    pub table_omega_p_max: f64,
    /// Largest |Ω_p| at the exit plane [rad/s].
    pub exit_omega_p_max: f64,
    /// Exit-plane power over incoming power.
    pub power_ratio: f64,
}

fn initial_field(s: &Scenario) -> ComplexField2D {
    let mut f = ComplexField2D::from_fn(s.grid, s.settings.z_start, |x, y| {
        C64::new(s.probe.amplitude((x * x + y * y).sqrt()), 0.0)
    });
    f.z = s.settings.z_start;
    f
}

/// Propagates the probe through the cloud at detuning `delta_p` and reports
/// the exit-plane image together with run diagnostics.
pub fn simulate(s: &Scenario, delta_p: f64, opts: &SolverOptions) -> Result<(ImageResult, Diagnostics)> {
    s.validate()?;
    if !delta_p.is_finite() {
        return Err(Error::InvalidParameter("probe detuning must be finite".into()));
    }
    let f0 = initial_field(s);
    let incoming = s.probe.omega_p0;
    let mut extensions = 0;
    let mut headroom = opts.probe_headroom;
    let (exit, table_max) = loop {
        let (response, table_max): (Box<dyn LocalResponse>, f64) = match opts.response {
            ResponseMode::Table { size } => {
                let p_max = headroom * incoming;
                let c_max = (s.coupling.omega_c0 * (1.0 + 1e-9)).max(1e-6 * s.levels.gamma_e);
                let table = ResponseTable::graded(size, p_max, c_max, delta_p, s.delta_c, &s.levels)?;
                (Box::new(table), p_max)
            }
            ResponseMode::Direct => (Box::new(DirectResponse::new(s.levels, delta_p, s.delta_c)), 0.0),
            ResponseMode::Linear => (Box::new(LinearResponse::new(s.levels, delta_p, s.delta_c)), 0.0),
        };
        let medium = ScenarioMedium::new(s, response);
        match propagate(&f0, &medium, &s.settings) {
            Ok(field) => break (field, table_max),
            Err(Error::ResponseOutOfRange { .. }) if extensions < opts.max_table_extensions => {
                extensions += 1;
                headroom *= 2.0;
                log::debug!("probe outgrew response table; retrying with headroom {headroom}");
            }
            Err(e) => return Err(e),
        }
    };
    let norm = incoming * incoming;
    let image = ImageResult {
        scenario: s.name.clone(),
        delta_p,
        lensing: s.settings.lensing,
        grid: s.grid,
        intensity: exit.values.iter().map(|v| v.norm_sqr() / norm).collect(),
    };
    let diagnostics = Diagnostics {
        table_extensions: extensions,
        table_omega_p_max: table_max,
        exit_omega_p_max: exit.max_abs(),
        power_ratio: exit.power() / f0.power(),
    };
    Ok((image, diagnostics))
}

/// Exit-plane image with the default solver options.
pub fn run_image(s: &Scenario, delta_p: f64) -> Result<ImageResult> {
    run_image_with(s, delta_p, &SolverOptions::default())
}

pub fn run_image_with(s: &Scenario, delta_p: f64, opts: &SolverOptions) -> Result<ImageResult> {
    simulate(s, delta_p, opts).map(|(image, _)| image)
}

fn check_detunings(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(Error::InvalidParameter("detuning list is empty".into()));
    }
    if deltas.iter().any(|d| !d.is_finite()) || deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("detunings must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Runs every detuning concurrently; results come back in input order.
pub fn run_scan(s: &Scenario, deltas: &[f64], opts: &SolverOptions) -> Result<Vec<(ImageResult, Diagnostics)>> {
    check_detunings(deltas)?;
    s.validate()?;
    deltas.par_iter().map(|&d| simulate(s, d, opts)).collect()
}

/// Center transmission (disk of radius `s.center_radius`) for each detuning.
pub fn run_spectrum(s: &Scenario, deltas: &[f64]) -> Result<SpectrumResult> {
    run_spectrum_with(s, deltas, &SolverOptions::default())
}

pub fn run_spectrum_with(s: &Scenario, deltas: &[f64], opts: &SolverOptions) -> Result<SpectrumResult> {
    let images = run_scan(s, deltas, opts)?;
    Ok(spectrum_from_images(s, images.iter().map(|(img, _)| img)))
}

pub fn spectrum_from_images<'a>(s: &Scenario, images: impl Iterator<Item = &'a ImageResult>) -> SpectrumResult {
    SpectrumResult {
        scenario: s.name.clone(),
        lensing: s.settings.lensing,
        entries: images.map(|img| (img.delta_p, img.center_transmission(s.center_radius))).collect(),
    }
}
