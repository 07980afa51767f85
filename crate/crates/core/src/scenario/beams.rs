use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Gaussian atomic cloud described by its 1/e² radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicCloud {
    /// Peak density [m⁻³].
    pub n0: f64,
    /// Radial 1/e² radius [m].
    pub w_r: f64,
    /// Axial 1/e² radius [m].
    pub w_z: f64,
    /// Axial position of the density peak [m].
    pub center_z: f64,
    /// Ignore the radial profile (the transverse window is ≪ `w_r`).
    #[serde(default)]
    pub radially_uniform: bool,
}

impl AtomicCloud {
    pub fn validate(&self) -> Result<()> {
        if !(self.n0 >= 0.0 && self.n0.is_finite()) {
            return Err(Error::InvalidParameter(format!("cloud density n0 must be >= 0, got {}", self.n0)));
        }
        if !(self.w_r > 0.0 && self.w_z > 0.0) {
            return Err(Error::InvalidParameter("cloud radii must be positive".into()));
        }
        Ok(())
    }

    /// `n0 · exp(−2r²/w_r²) · exp(−2(z − center_z)²/w_z²)`.
    pub fn density(&self, r: f64, z: f64) -> f64 {
        let dz = z - self.center_z;
        let axial = (-2.0 * dz * dz / (self.w_z * self.w_z)).exp();
        if self.radially_uniform {
            self.n0 * axial
        } else {
            self.n0 * axial * (-2.0 * r * r / (self.w_r * self.w_r)).exp()
        }
    }

    /// Full on-axis column density `n0 · w_z · √(π/2)` [m⁻²].
    pub fn column_density(&self) -> f64 {
        self.n0 * self.w_z * (PI / 2.0).sqrt()
    }
}

/// Focused coupling beam of the paraxial Gaussian form
/// `Ω_c = i Ω_c0 z_0/(z + i z_0) · exp(−i z_0 r² / [w_c² (z + i z_0)])`,
/// with `z` measured from the focus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingBeam {
    /// Peak Rabi frequency [rad/s].
    pub omega_c0: f64,
    /// Focal waist (1/e² intensity radius) [m].
    pub w_c: f64,
    pub z_focus: f64,
    pub wavelength: f64,
}

impl CouplingBeam {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c0 >= 0.0 && self.omega_c0.is_finite()) {
            return Err(Error::InvalidParameter("omega_c0 must be >= 0".into()));
        }
        if !(self.w_c > 0.0 && self.wavelength > 0.0) {
            return Err(Error::InvalidParameter("coupling waist and wavelength must be positive".into()));
        }
        Ok(())
    }

    /// Rayleigh length `π w_c² / λ_c`.
    pub fn rayleigh_length(&self) -> f64 {
        PI * self.w_c * self.w_c / self.wavelength
    }

    /// Complex Rabi frequency at radius `r` and lab position `z`.
    pub fn field(&self, r: f64, z: f64) -> C64 {
        let z0 = self.rayleigh_length();
        let q = C64::new(z - self.z_focus, z0);
        let amplitude = C64::new(0.0, self.omega_c0 * z0) / q;
        let phase = C64::new(0.0, -z0 * r * r / (self.w_c * self.w_c)) / q;
        amplitude * phase.exp()
    }

    /// `|Ω_c|` without forming the complex field.
    pub fn magnitude(&self, r: f64, z: f64) -> f64 {
        let z0 = self.rayleigh_length();
        let dz = z - self.z_focus;
        let q2 = dz * dz + z0 * z0;
        let w2 = self.w_c * self.w_c * q2 / (z0 * z0);
        self.omega_c0 * z0 / q2.sqrt() * (-r * r / w2).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "lowercase")]
pub enum ProbeProfile {
    Uniform,
    /// Collimated Gaussian with 1/e² intensity radius `w_p` [m].
    Gaussian {
        w_p: f64,
    },
}

/// Incoming weak probe beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeBeam {
    /// Incoming Rabi frequency [rad/s].
    pub omega_p0: f64,
    pub profile: ProbeProfile,
}

impl ProbeBeam {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_p0 > 0.0 && self.omega_p0.is_finite()) {
            return Err(Error::InvalidParameter("omega_p0 must be positive".into()));
        }
        if let ProbeProfile::Gaussian { w_p } = self.profile {
            if !(w_p > 0.0) {
                return Err(Error::InvalidParameter("probe waist must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn amplitude(&self, r: f64) -> f64 {
        match self.profile {
            ProbeProfile::Uniform => self.omega_p0,
            ProbeProfile::Gaussian { w_p } => self.omega_p0 * (-r * r / (w_p * w_p)).exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beam() -> CouplingBeam {
        CouplingBeam { omega_c0: 1.2e7, w_c: 49e-6, z_focus: 0.0, wavelength: 480e-9 }
    }

    #[test]
    fn density_profile() {
        let c = AtomicCloud { n0: 0.59e16, w_r: 2.1e-3, w_z: 1.1e-3, center_z: 0.0, radially_uniform: false };
        assert_eq!(c.density(0.0, 0.0), 0.59e16);
        let at_wz = c.density(0.0, 1.1e-3);
        assert!((at_wz / (0.59e16 * (-2.0f64).exp()) - 1.0).abs() < 1e-14);
        assert!((c.density(2.1e-3, 0.0) / (0.59e16 * (-2.0f64).exp()) - 1.0).abs() < 1e-14);
        let flat = AtomicCloud { radially_uniform: true, ..c };
        assert_eq!(flat.density(1e-3, 0.0), 0.59e16);
    }

    #[test]
    fn coupling_profile_landmarks() {
        let b = beam();
        assert!((b.field(0.0, 0.0).norm() - b.omega_c0).abs() < 1e-9 * b.omega_c0);
        assert!((b.field(0.0, 0.0) - C64::new(b.omega_c0, 0.0)).norm() < 1e-9 * b.omega_c0);
        let e = (-1.0f64).exp();
        assert!((b.field(b.w_c, 0.0).norm() / b.omega_c0 - e).abs() < 1e-14);
        let z0 = b.rayleigh_length();
        assert!((b.field(0.0, z0).norm() / b.omega_c0 - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn magnitude_matches_complex_field_and_is_even() {
        let b = CouplingBeam { z_focus: 0.2e-3, ..beam() };
        for &(r, z) in &[(0.0, 0.0), (30e-6, 1e-3), (80e-6, -2e-3), (10e-6, 5e-3)] {
            let m = b.magnitude(r, z);
            assert!((m - b.field(r, z).norm()).abs() <= 1e-12 * b.omega_c0);
            let mirrored = b.magnitude(r, 2.0 * b.z_focus - z);
            assert!((m - mirrored).abs() <= 1e-12 * b.omega_c0);
        }
    }

    #[test]
    fn probe_profiles() {
        let p = ProbeBeam { omega_p0: 1.0, profile: ProbeProfile::Uniform };
        assert_eq!(p.amplitude(1.0), 1.0);
        let g = ProbeBeam { omega_p0: 1.0, profile: ProbeProfile::Gaussian { w_p: 3.45e-3 } };
        assert!((g.amplitude(3.45e-3) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(ProbeBeam { omega_p0: 0.0, ..p }.validate().is_err());
    }
}
