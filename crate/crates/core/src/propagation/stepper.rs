use serde::{Deserialize, Serialize};

use super::absorber::Absorber;
use super::diffraction::Diffractor;
use super::field::ComplexField2D;
use super::medium::{advance_medium, Medium};
use crate::error::{Error, Result};

/// Axial discretisation and boundary treatment for one propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationSettings {
    /// Axial step [m].
    pub dz: f64,
    pub z_start: f64,
    pub z_end: f64,
    /// When false every diffraction step is skipped (no transverse transport).
    pub lensing: bool,
    pub absorber_order: u32,
    /// Width of the absorbing edge band [m]; zero disables it.
    pub absorber_width: f64,
    /// Midpoint sub-intervals per medium step.
    pub medium_substeps: usize,
    /// Plane imaged by the detection optics. When set, the field leaving
    /// `z_end` is carried back (or forward) through free space to this plane,
    /// which is where an imaging system reproduces it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_plane: Option<f64>,
}

impl PropagationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.dz > 0.0 && self.dz.is_finite()) {
            return Err(Error::InvalidParameter(format!("dz must be positive, got {}", self.dz)));
        }
        if !(self.z_end > self.z_start) {
            return Err(Error::InvalidParameter("z_end must exceed z_start".into()));
        }
        if self.medium_substeps == 0 {
            return Err(Error::InvalidParameter("medium_substeps must be at least 1".into()));
        }
        if !(self.absorber_width >= 0.0) {
            return Err(Error::InvalidParameter("absorber width must be >= 0".into()));
        }
        if self.image_plane.is_some_and(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter("image plane must be finite".into()));
        }
        Ok(())
    }

    /// True when `dz` resolves a feature with Rayleigh length `rayleigh`
    /// (`dz <= rayleigh / 20`); logs a warning otherwise.
    pub fn check_step(&self, rayleigh: f64) -> bool {
        let ok = self.dz <= rayleigh / 20.0;
        if !ok {
            log::warn!("dz = {:.3e} m exceeds 1/20 of the Rayleigh length {:.3e} m", self.dz, rayleigh);
        }
        ok
    }

    /// Step lengths covering `[z_start, z_end]`; all equal to `dz` except a
    /// shorter final step when the span is not a multiple of `dz`.
    pub fn steps(&self) -> Vec<f64> {
        let span = self.z_end - self.z_start;
        let full = ((span / self.dz) * (1.0 + 1e-12)).floor() as usize;
        let mut steps = vec![self.dz; full];
        let rest = span - full as f64 * self.dz;
        if rest > 1e-9 * self.dz {
            steps.push(rest);
        }
        steps
    }
}

/// Symmetric split-step propagation from `settings.z_start` to `settings.z_end`.
pub fn propagate(f0: &ComplexField2D, medium: &dyn Medium, settings: &PropagationSettings) -> Result<ComplexField2D> {
    propagate_with(f0, medium, settings, |_| {})
}

/// [`propagate`] with a callback invoked on the field after every step.
///
/// Each step is half a diffraction step, a full medium step, half a
/// diffraction step and the edge absorber, which damps only the departure of
/// the field from its edge-band mean. Without lensing, the diffraction
/// halves and the absorber are skipped. The observer sees the field before
/// any final free-space transfer to `settings.image_plane`.
pub fn propagate_with(
    f0: &ComplexField2D,
    medium: &dyn Medium,
    settings: &PropagationSettings,
    mut observer: impl FnMut(&ComplexField2D),
) -> Result<ComplexField2D> {
    settings.validate()?;
    if (f0.z - settings.z_start).abs() > 1e-9 * settings.dz {
        return Err(Error::InvalidParameter(format!(
            "initial field sits at z = {:e} m, expected z_start = {:e} m",
            f0.z, settings.z_start
        )));
    }
    let mut field = f0.clone();
    field.z = settings.z_start;

    let diffractor = settings.lensing.then(|| Diffractor::new(field.grid, medium.probe_wavelength()));
    let absorber = (settings.lensing && settings.absorber_width > 0.0)
        .then(|| Absorber::new(&field.grid, settings.absorber_order, settings.absorber_width));
    let mut cached: Option<(f64, Vec<crate::C64>)> = None;

    for h in settings.steps() {
        if let Some(d) = &diffractor {
            if cached.as_ref().map(|(step, _)| *step) != Some(h) {
                cached = Some((h, d.transfer(0.5 * h)));
            }
            let transfer = &cached.as_ref().unwrap().1;
            d.apply(&mut field.values, transfer);
            advance_medium(&mut field, medium, h, settings.medium_substeps)?;
            d.apply(&mut field.values, transfer);
        } else {
            advance_medium(&mut field, medium, h, settings.medium_substeps)?;
        }
        if let Some(a) = &absorber {
            a.apply_to_scattered(&mut field);
        }
        if !field.is_finite() {
            return Err(Error::NonFiniteField(field.z));
        }
        observer(&field);
    }
    field.z = settings.z_end;
    if let (Some(d), Some(plane)) = (&diffractor, settings.image_plane) {
        d.step(&mut field, plane - settings.z_end);
        if !field.is_finite() {
            return Err(Error::NonFiniteField(plane));
        }
    }
    if let Some(plane) = settings.image_plane {
        field.z = plane;
    }
    Ok(field)
}
