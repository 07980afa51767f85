use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Uniform periodic sampling of the transverse plane.
///
/// Sample `(ix, iy)` sits at `x = (ix − nx/2)·dx`, `y = (iy − ny/2)·dy`, so the
/// pixel `(nx/2, ny/2)` lies exactly on the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseGrid {
    pub nx: usize,
    pub ny: usize,
    /// Window extent along x [m].
    pub lx: f64,
    /// Window extent along y [m].
    pub ly: f64,
}

impl TransverseGrid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        let grid = TransverseGrid { nx, ny, lx, ly };
        grid.validate()?;
        Ok(grid)
    }

    pub fn square(n: usize, width: f64) -> Result<Self> {
        Self::new(n, n, width, width)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 16 || self.ny < 16 {
            return Err(Error::InvalidParameter(format!(
                "transverse grid must be at least 16×16, got {}×{}",
                self.nx, self.ny
            )));
        }
        if !(self.lx > 0.0 && self.ly > 0.0 && self.lx.is_finite() && self.ly.is_finite()) {
            return Err(Error::InvalidParameter("transverse window extents must be positive".into()));
        }
        Ok(())
    }

    /// Checks that the window is wider than six coupling waists.
    pub fn check_window(&self, coupling_waist: f64) -> Result<()> {
        if self.lx.min(self.ly) <= 6.0 * coupling_waist {
            return Err(Error::InvalidParameter(format!(
                "window {:.3e} m must exceed 6 coupling waists ({:.3e} m)",
                self.lx.min(self.ly),
                6.0 * coupling_waist
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, ix: usize) -> f64 {
        (ix as f64 - (self.nx / 2) as f64) * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        (iy as f64 - (self.ny / 2) as f64) * self.dy()
    }

    /// Coordinates of flat index `idx = iy·nx + ix`.
    pub fn position(&self, idx: usize) -> (f64, f64) {
        (self.x(idx % self.nx), self.y(idx / self.nx))
    }

    pub fn center_index(&self) -> usize {
        (self.ny / 2) * self.nx + self.nx / 2
    }

    /// Angular spatial frequencies in FFT order for `n` samples of spacing `d`.
    pub(crate) fn frequencies(n: usize, d: f64) -> Vec<f64> {
        let step = 2.0 * std::f64::consts::PI / (n as f64 * d);
        (0..n)
            .map(|i| {
                let k = if i < n.div_ceil(2) { i as f64 } else { i as f64 - n as f64 };
                k * step
            })
            .collect()
    }
}

/// Probe Rabi-frequency envelope on one transverse plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    pub grid: TransverseGrid,
    /// Row-major samples, `values[iy * nx + ix]` [rad/s].
    pub values: Vec<C64>,
    /// Axial position [m].
    pub z: f64,
}

impl ComplexField2D {
    pub fn constant(grid: TransverseGrid, value: C64, z: f64) -> Self {
        ComplexField2D { grid, values: vec![value; grid.len()], z }
    }

    pub fn from_fn(grid: TransverseGrid, z: f64, f: impl Fn(f64, f64) -> C64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.position(idx);
                f(x, y)
            })
            .collect();
        ComplexField2D { grid, values, z }
    }

    /// `Σ |Ω_p|² dx dy`.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx() * self.grid.dy()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn center(&self) -> C64 {
        self.values[self.grid.center_index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = TransverseGrid::square(64, 512e-6).unwrap();
        assert_eq!(g.dx(), 8e-6);
        assert_eq!(g.x(32), 0.0);
        assert_eq!(g.position(g.center_index()), (0.0, 0.0));
        assert!(TransverseGrid::square(8, 1e-3).is_err());
        assert!(TransverseGrid::square(32, 0.0).is_err());
        assert!(g.check_window(49e-6).is_ok());
        assert!(g.check_window(100e-6).is_err());
    }

    #[test]
    fn frequencies_follow_fft_order() {
        let k = TransverseGrid::frequencies(4, 1.0);
        let s = std::f64::consts::PI / 2.0;
        assert_eq!(k, vec![0.0, s, -2.0 * s, -s]);
    }

    #[test]
    fn power_of_constant_field() {
        let g = TransverseGrid::square(32, 1e-3).unwrap();
        let f = ComplexField2D::constant(g, C64::new(0.0, 2.0), 0.0);
        assert!((f.power() - 4.0 * 1e-6).abs() < 1e-18);
    }
}
