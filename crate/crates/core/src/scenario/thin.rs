use super::quadrature::integrate;
use super::Scenario;
use crate::atomic::{chi_linear, FieldPoint};
use crate::error::{Error, Result};
use crate::C64;

const TARGET_TOLERANCE: f64 = 1e-10;
const ACCEPTED_TOLERANCE: f64 = 1e-8;

/// Weak-probe optical depth `k ∫ Im χ(r, z) dz` over `[z_from, z_to]`.
pub fn optical_depth(s: &Scenario, r: f64, delta_p: f64, z_from: f64, z_to: f64) -> Result<f64> {
    let k = s.levels.k();
    let failure = std::cell::RefCell::new(None);
    let integrand = |z: f64| -> f64 {
        let fp = FieldPoint::new(C64::new(0.0, 0.0), C64::new(s.coupling.magnitude(r, z), 0.0), delta_p, s.delta_c);
        match chi_linear(s.cloud.density(r, z), &fp, &s.levels) {
            Ok(chi) => k * chi.chi.im,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let result = integrate(integrand, z_from, z_to, TARGET_TOLERANCE, 4000);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if result.abs_error > ACCEPTED_TOLERANCE * result.value.abs() {
        return Err(Error::QuadratureNonConvergence(result.abs_error / result.value.abs()));
    }
    Ok(result.value)
}

/// Linear-response transmission `exp(−k ∫ Im χ dz)` through the whole cloud
/// (`±4 w_z` about its center) at radius `r`; diffraction is ignored.
pub fn thin_cloud_transmission(s: &Scenario, r: f64, delta_p: f64) -> Result<f64> {
    let half = 4.0 * s.cloud.w_z;
    let od = optical_depth(s, r, delta_p, s.cloud.center_z - half, s.cloud.center_z + half)?;
    Ok((-od).exp())
}

/// Thin-cloud counterpart of [`ImageResult::center_transmission`]: the
/// analytic transmission averaged over the same disk of grid pixels.
///
/// [`ImageResult::center_transmission`]: super::ImageResult::center_transmission
pub fn thin_cloud_center_transmission(s: &Scenario, delta_p: f64) -> Result<f64> {
    let grid = &s.grid;
    let r2max = s.center_radius * s.center_radius;
    // Pixels sharing a radius share a transmission; evaluate each radius once.
    let mut radii: Vec<(u64, usize)> = Vec::new();
    for idx in 0..grid.len() {
        let (x, y) = grid.position(idx);
        let r2 = x * x + y * y;
        if r2 <= r2max {
            let key = r2.to_bits();
            match radii.iter_mut().find(|(k, _)| *k == key) {
                Some(entry) => entry.1 += 1,
                None => radii.push((key, 1)),
            }
        }
    }
    if radii.is_empty() {
        let (x, y) = grid.position(grid.center_index());
        return thin_cloud_transmission(s, (x * x + y * y).sqrt(), delta_p);
    }
    let mut sum = 0.0;
    let mut count = 0;
    for (key, n) in radii {
        sum += n as f64 * thin_cloud_transmission(s, f64::from_bits(key).sqrt(), delta_p)?;
        count += n;
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::preset;

    #[test]
    fn empty_cloud_is_transparent() {
        let mut s = preset("fig4").unwrap();
        s.cloud.n0 = 0.0;
        assert_eq!(thin_cloud_transmission(&s, 0.0, 0.2 * s.levels.gamma_e).unwrap(), 1.0);
    }

    #[test]
    fn resonant_two_level_column() {
        let mut s = preset("fig3b").unwrap();
        s.coupling.omega_c0 = 0.0;
        let t = thin_cloud_transmission(&s, 0.0, 0.0).unwrap();
        // ±4 w_z captures the Gaussian column up to erfc(4√2) ≈ 1e-15.
        let od = s.levels.sigma_0() * s.cloud.column_density();
        assert!((t - (-od).exp()).abs() / t < 1e-10, "{t} vs {}", (-od).exp());
    }
}
