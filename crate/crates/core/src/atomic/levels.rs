use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Index of each level in the `(g, e, r)` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Ground = 0,
    Excited = 1,
    Rydberg = 2,
}

/// Largest Rabi frequency accepted by [`FieldPoint::validate`], in rad/s.
pub const DEFAULT_FIELD_CAP: f64 = 1.0e12;

/// Decay and dephasing rates plus the two wavelengths of the ladder.
///
/// All rates are angular rates in rad/s. Dephasing of the g–r coherence from
/// sources other than laser linewidth has no separate Lindblad channel; it is
/// carried by `gamma_c` (see [`LevelScheme::with_gamma_gr`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    /// Full decay rate of |e⟩.
    pub gamma_e: f64,
    /// Decay rate of |r⟩ into |e⟩.
    pub gamma_r: f64,
    /// Probe laser linewidth.
    pub gamma_p: f64,
    /// Coupling laser linewidth (plus any folded-in extra dephasing).
    pub gamma_c: f64,
    /// Probe wavelength [m].
    pub lambda_probe: f64,
    /// Coupling wavelength [m].
    pub lambda_coupling: f64,
}

impl LevelScheme {
    /// ⁸⁷Rb 5s → 5p₃/₂ → 27s ladder with γ_gr = 2π × 100 kHz.
    pub fn rubidium_27s() -> Self {
        let base = LevelScheme {
            gamma_e: 2.0 * PI * 6.067e6,
            gamma_r: 2.0 * PI * 10.0e3,
            gamma_p: 0.0,
            gamma_c: 0.0,
            lambda_probe: 780.0e-9,
            lambda_coupling: 480.0e-9,
        };
        base.with_gamma_gr(2.0 * PI * 100.0e3).expect("default coherence decay is attainable")
    }

    /// Returns a copy whose `gamma_c` is chosen so that
    /// `gamma_gr() == target` while `gamma_r` and `gamma_p` are kept.
    pub fn with_gamma_gr(mut self, target: f64) -> Result<Self> {
        let gamma_c = 2.0 * target - self.gamma_r - self.gamma_p;
        if !(gamma_c >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma_gr target {target:e} rad/s is below (gamma_r + gamma_p)/2"
            )));
        }
        self.gamma_c = gamma_c;
        Ok(self)
    }

    /// Decay rate of the g–e coherence, Γ_e/2 + γ_p/2.
    pub fn gamma_ge(&self) -> f64 {
        0.5 * (self.gamma_e + self.gamma_p)
    }

    /// Decay rate of the g–r coherence, (Γ_r + γ_p + γ_c)/2.
    pub fn gamma_gr(&self) -> f64 {
        0.5 * (self.gamma_r + self.gamma_p + self.gamma_c)
    }

    /// Resonant absorption cross-section 3λ²/2π.
    pub fn sigma_0(&self) -> f64 {
        3.0 * self.lambda_probe * self.lambda_probe / (2.0 * PI)
    }

    /// Probe wavenumber 2π/λ.
    pub fn k(&self) -> f64 {
        2.0 * PI / self.lambda_probe
    }

    /// Coupling constant η = n σ_0 Γ_e / 2 for atomic density `n_at`.
    pub fn eta(&self, n_at: f64) -> f64 {
        0.5 * n_at * self.sigma_0() * self.gamma_e
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("gamma_e", self.gamma_e),
            ("gamma_r", self.gamma_r),
            ("gamma_p", self.gamma_p),
            ("gamma_c", self.gamma_c),
        ];
        for (name, value) in rates {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be a finite rate >= 0, got {value}")));
            }
        }
        if self.gamma_e > 0.0 && !(self.gamma_r < self.gamma_e) {
            return Err(Error::InvalidParameter("gamma_r must be smaller than gamma_e".into()));
        }
        for (name, value) in [("lambda_probe", self.lambda_probe), ("lambda_coupling", self.lambda_coupling)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

impl Default for LevelScheme {
    fn default() -> Self {
        Self::rubidium_27s()
    }
}

/// Local field values seen by one atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    /// Probe Rabi frequency Ω_p [rad/s].
    pub omega_p: C64,
    /// Coupling Rabi frequency Ω_c [rad/s].
    pub omega_c: C64,
    /// Probe detuning Δ_p = ω_p − ω_e [rad/s].
    pub delta_p: f64,
    /// Coupling detuning Δ_c = ω_c − ω_r [rad/s].
    pub delta_c: f64,
}

impl FieldPoint {
    pub fn new(omega_p: C64, omega_c: C64, delta_p: f64, delta_c: f64) -> Self {
        FieldPoint { omega_p, omega_c, delta_p, delta_c }
    }

    /// Real, in-phase fields.
    pub fn real(omega_p: f64, omega_c: f64, delta_p: f64, delta_c: f64) -> Self {
        Self::new(C64::new(omega_p, 0.0), C64::new(omega_c, 0.0), delta_p, delta_c)
    }

    pub fn validate(&self, cap: f64) -> Result<()> {
        let finite = [self.omega_p.re, self.omega_p.im, self.omega_c.re, self.omega_c.im, self.delta_p, self.delta_c]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("field point has non-finite components".into()));
        }
        if self.omega_p.norm() > cap || self.omega_c.norm() > cap {
            return Err(Error::InvalidParameter(format!("Rabi frequency exceeds cap {cap:e} rad/s")));
        }
        Ok(())
    }
}
