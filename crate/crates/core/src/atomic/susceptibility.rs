use serde::{Deserialize, Serialize};

use super::levels::{FieldPoint, LevelScheme};
use crate::error::{Error, Result};
use crate::C64;

/// Dimensionless linear susceptibility of the probe transition.
///
/// `Im(chi) > 0` is absorption; a passive medium never has `Im(chi) < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Susceptibility {
    pub chi: C64,
}

impl Susceptibility {
    pub fn new(chi: C64) -> Self {
        Susceptibility { chi }
    }

    /// Intensity absorption coefficient k·Im χ [1/m].
    pub fn absorption_coefficient(&self, k: f64) -> f64 {
        k * self.chi.im
    }
}

/// Denominator `γ_ge − iΔ_p + |Ω_c|² / (4(γ_gr − i(Δ_c + Δ_p)))` of the weak-probe
/// susceptibility. Returns `None` when the two-photon term diverges (perfect EIT).
pub fn susceptibility_denominator(fp: &FieldPoint, ls: &LevelScheme) -> Option<C64> {
    let omega_c_sq = fp.omega_c.norm_sqr();
    let two_photon = C64::new(ls.gamma_gr(), -(fp.delta_c + fp.delta_p));
    let dressing = if omega_c_sq == 0.0 {
        C64::new(0.0, 0.0)
    } else if two_photon.norm_sqr() == 0.0 {
        return None;
    } else {
        omega_c_sq / (4.0 * two_photon)
    };
    Some(C64::new(ls.gamma_ge(), -fp.delta_p) + dressing)
}

/// Weak-probe susceptibility `χ = i n σ_0 Γ_e λ / (4π D)`.
///
/// The probe Rabi frequency in `fp` is ignored. `|Ω_c|²` is used so the result
/// depends only on the local coupling intensity.
pub fn chi_linear(n_at: f64, fp: &FieldPoint, ls: &LevelScheme) -> Result<Susceptibility> {
    if !(n_at >= 0.0) {
        return Err(Error::InvalidParameter(format!("atomic density must be >= 0, got {n_at}")));
    }
    let Some(denominator) = susceptibility_denominator(fp, ls) else {
        return Ok(Susceptibility::new(C64::new(0.0, 0.0)));
    };
    let scale = if ls.gamma_e > 0.0 { ls.gamma_e } else { 1.0 };
    if denominator.norm() < 1e-30 * scale {
        return Err(Error::DegenerateDenominator(denominator.norm()));
    }
    // Evaluate in units of Γ_e so the complex division stays O(1).
    let d = denominator / scale;
    let amplitude = n_at * ls.sigma_0() * ls.lambda_probe / (4.0 * std::f64::consts::PI) * (ls.gamma_e / scale);
    Ok(Susceptibility::new(C64::i() * amplitude / d))
}

/// Refractive index `1 + Re(χ)/2`.
pub fn refractive_index(chi: Susceptibility) -> f64 {
    if chi.chi.norm() > 0.1 {
        log::warn!("refractive index requested for |chi| = {:.3}, outside the dilute regime", chi.chi.norm());
    }
    1.0 + 0.5 * chi.chi.re
}
