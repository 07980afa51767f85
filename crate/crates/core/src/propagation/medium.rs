use rayon::prelude::*;

use super::field::ComplexField2D;
use crate::atomic::LocalResponse;
use crate::error::Result;
use crate::C64;

/// Spatially varying atomic medium seen by the probe.
pub trait Medium: Sync {
    /// Coupling constant η = n_at σ_0 Γ_e / 2 at `(x, y, z)` [rad s⁻¹ m⁻¹].
    fn eta(&self, x: f64, y: f64, z: f64) -> f64;

    /// Coupling Rabi-frequency magnitude |Ω_c| at `(x, y, z)` [rad/s].
    fn coupling(&self, x: f64, y: f64, z: f64) -> f64;

    /// Local steady-state response for the detunings of this run.
    fn response(&self) -> &dyn LocalResponse;

    /// Probe wavelength used by the diffraction term [m].
    fn probe_wavelength(&self) -> f64;
}

/// Homogeneous slab occupying `z_min <= z < z_max`; empty elsewhere.
pub struct UniformSlab<R> {
    pub eta: f64,
    pub omega_c: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub wavelength: f64,
    pub response: R,
}

impl<R: LocalResponse> Medium for UniformSlab<R> {
    fn eta(&self, _x: f64, _y: f64, z: f64) -> f64 {
        if z >= self.z_min && z < self.z_max {
            self.eta
        } else {
            0.0
        }
    }

    fn coupling(&self, _x: f64, _y: f64, _z: f64) -> f64 {
        self.omega_c
    }

    fn response(&self) -> &dyn LocalResponse {
        &self.response
    }

    fn probe_wavelength(&self) -> f64 {
        self.wavelength
    }
}

/// Integrates `dΩ_p/dz = i η ρ_eg(Ω_p)` pointwise over `[z, z + dz]` with the
/// explicit midpoint rule on `substeps` equal sub-intervals.
pub fn medium_step(f: &ComplexField2D, medium: &dyn Medium, dz: f64, substeps: usize) -> Result<ComplexField2D> {
    let mut out = f.clone();
    advance_medium(&mut out, medium, dz, substeps)?;
    Ok(out)
}

pub(crate) fn advance_medium(f: &mut ComplexField2D, medium: &dyn Medium, dz: f64, substeps: usize) -> Result<()> {
    let substeps = substeps.max(1);
    let h = dz / substeps as f64;
    let z0 = f.z;
    let grid = f.grid;
    let response = medium.response();
    f.values.par_iter_mut().enumerate().try_for_each(|(idx, value)| -> Result<()> {
        let (x, y) = grid.position(idx);
        let mut omega = *value;
        for s in 0..substeps {
            let z = z0 + s as f64 * h;
            let zm = z + 0.5 * h;
            let eta_start = medium.eta(x, y, z);
            let eta_mid = medium.eta(x, y, zm);
            if eta_start == 0.0 && eta_mid == 0.0 {
                continue;
            }
            let slope = |eta: f64, z: f64, omega: C64| -> Result<C64> {
                if eta == 0.0 {
                    return Ok(C64::new(0.0, 0.0));
                }
                let rho = response.rho_eg(omega, medium.coupling(x, y, z))?;
                Ok(C64::i() * eta * rho)
            };
            let half = omega + slope(eta_start, z, omega)? * (0.5 * h);
            omega += slope(eta_mid, zm, half)? * h;
        }
        *value = omega;
        Ok(())
    })?;
    f.z = z0 + dz;
    Ok(())
}
