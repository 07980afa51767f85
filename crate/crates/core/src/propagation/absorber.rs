use super::field::{ComplexField2D, TransverseGrid};
use crate::C64;

/// Super-Gaussian edge mask: exactly 1 in the interior, rolling off to
/// `exp(−2^order)` at the window edge across a band of `width`.
#[derive(Debug, Clone)]
pub struct Absorber {
    mask: Vec<f64>,
}

impl Absorber {
    /// `width == 0` gives an all-ones mask.
    pub fn new(grid: &TransverseGrid, order: u32, width: f64) -> Self {
        let profile = |n: usize, coord: &dyn Fn(usize) -> f64, extent: f64| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let overshoot = coord(i).abs() - (0.5 * extent - width);
                    if width <= 0.0 || overshoot <= 0.0 {
                        1.0
                    } else {
                        (-(overshoot / (0.5 * width)).powi(order as i32)).exp()
                    }
                })
                .collect()
        };
        let mx = profile(grid.nx, &|i| grid.x(i), grid.lx);
        let my = profile(grid.ny, &|i| grid.y(i), grid.ly);
        let mask = my.iter().flat_map(|&vy| mx.iter().map(move |&vx| vx * vy)).collect();
        Absorber { mask }
    }

    pub fn apply(&self, field: &mut ComplexField2D) {
        for (v, m) in field.values.iter_mut().zip(&self.mask) {
            if *m != 1.0 {
                *v *= *m;
            }
        }
    }

    /// Damps only the part of the field that departs from its mean over the
    /// edge band: `f ← f̄ + m·(f − f̄)`. A uniform incident wave, which
    /// extends far beyond the window, passes untouched instead of being
    /// clipped to an aperture whose edge fringes would diffract inward,
    /// while light scattered toward the edge is still absorbed.
    pub fn apply_to_scattered(&self, field: &mut ComplexField2D) {
        let (mut sum, mut weight) = (C64::new(0.0, 0.0), 0.0);
        for (v, m) in field.values.iter().zip(&self.mask) {
            let w = 1.0 - m;
            sum += v * w;
            weight += w;
        }
        if weight == 0.0 {
            return;
        }
        let mean = sum / weight;
        for (v, m) in field.values.iter_mut().zip(&self.mask) {
            if *m != 1.0 {
                *v = mean + (*v - mean) * *m;
            }
        }
    }

    pub fn mask(&self) -> &[f64] {
        &self.mask
    }
}

/// Applies the edge mask to a copy of `f`.
pub fn apply_absorber(f: &ComplexField2D, order: u32, width: f64) -> ComplexField2D {
    let mut out = f.clone();
    Absorber::new(&f.grid, order, width).apply(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_field_is_untouched() {
        let grid = TransverseGrid::square(128, 512e-6).unwrap();
        let f = ComplexField2D::from_fn(grid, 0.0, |x, y| {
            if x.abs() < 150e-6 && y.abs() < 150e-6 {
                C64::new(1.0 + x * 1e3, y * 1e3)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let out = apply_absorber(&f, 8, 51.2e-6);
        for (a, b) in f.values.iter().zip(&out.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_field_attenuated_only_in_band() {
        let grid = TransverseGrid::square(128, 512e-6).unwrap();
        let width = 51.2e-6;
        let f = ComplexField2D::constant(grid, C64::new(1.0, 0.0), 0.0);
        let out = apply_absorber(&f, 8, width);
        for idx in 0..grid.len() {
            let (x, y) = grid.position(idx);
            let inside = x.abs().max(y.abs()) <= 256e-6 - width;
            let v = out.values[idx].re;
            if inside {
                assert_eq!(v, 1.0);
            } else {
                assert!(v < 1.0);
            }
        }
        // The outermost sample is essentially extinguished.
        assert!(out.values[0].re < 1e-60);
    }

    #[test]
    fn scattered_mode_keeps_uniform_wave_and_damps_deviations() {
        let grid = TransverseGrid::square(128, 512e-6).unwrap();
        let absorber = Absorber::new(&grid, 8, 51.2e-6);
        let background = C64::from_polar(0.4, 1.1);
        let mut f = ComplexField2D::constant(grid, background, 0.0);
        absorber.apply_to_scattered(&mut f);
        assert!(f.values.iter().all(|v| (v - background).norm() < 1e-14));
        // A wave tilted across the band keeps only its band mean at the edge.
        let mut g = ComplexField2D::from_fn(grid, 0.0, |x, _| background + C64::from_polar(0.1, 2e5 * x));
        absorber.apply_to_scattered(&mut g);
        let edge = g.values[0];
        assert!((edge - background).norm() < 0.02, "edge {edge}");
        let centre = g.values[grid.len() / 2 + grid.nx / 2];
        assert!(((centre - background).norm() - 0.1).abs() < 1e-12);
    }
}
