use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::field::{ComplexField2D, TransverseGrid};
use crate::atomic::LevelScheme;
use crate::C64;

/// Free-space paraxial propagator on a periodic transverse grid.
///
/// Advancing by `dz` multiplies each spatial-frequency component by
/// `exp(−i λ/(4π) |k⊥|² dz)`.
pub struct Diffractor {
    grid: TransverseGrid,
    wavelength: f64,
    /// `|k⊥|²` in the transposed layout used between the two transform passes
    /// (`[ix * ny + iy]`).
    k_perp_sq: Vec<f64>,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Diffractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Diffractor").field("grid", &self.grid).field("wavelength", &self.wavelength).finish()
    }
}

impl Diffractor {
    pub fn new(grid: TransverseGrid, wavelength: f64) -> Self {
        let mut planner = FftPlanner::new();
        let kx = TransverseGrid::frequencies(grid.nx, grid.dx());
        let ky = TransverseGrid::frequencies(grid.ny, grid.dy());
        let mut k_perp_sq = Vec::with_capacity(grid.len());
        for kxv in &kx {
            for kyv in &ky {
                k_perp_sq.push(kxv * kxv + kyv * kyv);
            }
        }
        Diffractor {
            grid,
            wavelength,
            k_perp_sq,
            fwd_x: planner.plan_fft_forward(grid.nx),
            inv_x: planner.plan_fft_inverse(grid.nx),
            fwd_y: planner.plan_fft_forward(grid.ny),
            inv_y: planner.plan_fft_inverse(grid.ny),
        }
    }

    pub fn grid(&self) -> &TransverseGrid {
        &self.grid
    }

    /// Transfer function for a step `dz`, normalisation of the inverse
    /// transform included.
    pub fn transfer(&self, dz: f64) -> Vec<C64> {
        let norm = 1.0 / self.grid.len() as f64;
        let coeff = -self.wavelength / (4.0 * PI) * dz;
        self.k_perp_sq.iter().map(|&k2| C64::from_polar(norm, coeff * k2)).collect()
    }

    /// Applies a precomputed [`transfer`](Self::transfer) in place.
    pub fn apply(&self, values: &mut [C64], transfer: &[C64]) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        assert_eq!(values.len(), nx * ny);
        run_rows(values, nx, &self.fwd_x);
        let mut t = transpose(values, nx, ny);
        run_rows(&mut t, ny, &self.fwd_y);
        t.par_iter_mut().zip(transfer.par_iter()).for_each(|(v, h)| *v *= h);
        run_rows(&mut t, ny, &self.inv_y);
        let back = transpose(&t, ny, nx);
        values.copy_from_slice(&back);
        run_rows(values, nx, &self.inv_x);
    }

    /// Advances `field` by `dz` in free space.
    pub fn step(&self, field: &mut ComplexField2D, dz: f64) {
        let transfer = self.transfer(dz);
        self.apply(&mut field.values, &transfer);
        field.z += dz;
    }
}

fn run_rows(data: &mut [C64], row_len: usize, plan: &Arc<dyn Fft<f64>>) {
    let scratch_len = plan.get_inplace_scratch_len();
    data.par_chunks_mut(row_len).for_each_init(
        || vec![C64::new(0.0, 0.0); scratch_len],
        |scratch, row| plan.process_with_scratch(row, scratch),
    );
}

/// Transposes a row-major `rows × cols` matrix given as `cols`-long rows.
fn transpose(data: &[C64], cols: usize, rows: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(c, dst)| {
        for (r, v) in dst.iter_mut().enumerate() {
            *v = data[r * cols + c];
        }
    });
    out
}

/// One free-space step of the probe envelope at the probe wavelength.
pub fn diffraction_step(f: &ComplexField2D, dz: f64, ls: &LevelScheme) -> ComplexField2D {
    let mut out = f.clone();
    Diffractor::new(f.grid, ls.lambda_probe).step(&mut out, dz);
    out
}
