use serde::{Deserialize, Serialize};

use crate::propagation::TransverseGrid;

/// Exit-plane probe intensity normalised to the incoming peak intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageResult {
    pub scenario: String,
    /// Probe detuning [rad/s].
    pub delta_p: f64,
    pub lensing: bool,
    pub grid: TransverseGrid,
    /// Row-major `I/I₀`, `intensity[iy * nx + ix]`.
    pub intensity: Vec<f64>,
}

impl ImageResult {
    /// Mean of `I/I₀` over pixels within `radius` of the axis (at least the
    /// axis pixel itself).
    pub fn center_transmission(&self, radius: f64) -> f64 {
        let grid = &self.grid;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (idx, v) in self.intensity.iter().enumerate() {
            let (x, y) = grid.position(idx);
            if x * x + y * y <= radius * radius {
                sum += v;
                count += 1;
            }
        }
        if count == 0 {
            self.intensity[grid.center_index()]
        } else {
            sum / count as f64
        }
    }

    /// Mean `I/I₀` over the four square patches `0.25 L ≤ |x|, |y| ≤ 0.35 L`,
    /// far from the coupling beam and inside the absorber-free interior.
    pub fn background(&self) -> f64 {
        let grid = &self.grid;
        let (mut sum, mut count) = (0.0, 0usize);
        for (idx, v) in self.intensity.iter().enumerate() {
            let (x, y) = grid.position(idx);
            let ux = x.abs() / grid.lx;
            let uy = y.abs() / grid.ly;
            if (0.25..=0.35).contains(&ux) && (0.25..=0.35).contains(&uy) {
                sum += v;
                count += 1;
            }
        }
        sum / count.max(1) as f64
    }

    /// Azimuthal average of `I/I₀` in rings of one pixel width; entry `i`
    /// covers radii `[i·dr, (i+1)·dr)` with `dr = min(dx, dy)`.
    pub fn radial_profile(&self) -> Vec<f64> {
        let grid = &self.grid;
        let dr = grid.dx().min(grid.dy());
        let max_r = 0.5 * grid.lx.min(grid.ly);
        let bins = (max_r / dr) as usize;
        let mut sum = vec![0.0; bins];
        let mut count = vec![0usize; bins];
        for (idx, v) in self.intensity.iter().enumerate() {
            let (x, y) = grid.position(idx);
            let bin = ((x * x + y * y).sqrt() / dr) as usize;
            if bin < bins {
                sum[bin] += v;
                count[bin] += 1;
            }
        }
        sum.iter().zip(&count).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect()
    }

    /// Radius at which the azimuthally averaged excess over the background
    /// first falls to `1/e²` of its on-axis value, linearly interpolated
    /// between rings. `None` when the spot is not brighter than the background.
    pub fn spot_radius(&self) -> Option<f64> {
        let profile = self.radial_profile();
        let background = self.background();
        let peak = profile[0] - background;
        if peak <= 0.0 {
            return None;
        }
        let threshold = peak * (-2.0f64).exp();
        let dr = self.grid.dx().min(self.grid.dy());
        // Ring i is centred on radius (i + 0.5)·dr, except the axis bin.
        let radius_of = |i: usize| if i == 0 { 0.0 } else { (i as f64 + 0.5) * dr };
        for i in 1..profile.len() {
            let (a, b) = (profile[i - 1] - background, profile[i] - background);
            if b <= threshold {
                let t = (a - threshold) / (a - b);
                return Some(radius_of(i - 1) + t * (radius_of(i) - radius_of(i - 1)));
            }
        }
        None
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.intensity.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Pixel index of the brightest sample.
    pub fn argmax(&self) -> usize {
        self.intensity.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0)
    }
}

/// Center transmission versus probe detuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub scenario: String,
    pub lensing: bool,
    /// `(Δ_p [rad/s], I/I₀)` in increasing detuning order.
    pub entries: Vec<(f64, f64)>,
}

impl SpectrumResult {
    pub fn detunings(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn transmissions(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.1).collect()
    }

    /// Largest transmission among entries whose detuning satisfies `keep`.
    pub fn max_where(&self, keep: impl Fn(f64) -> bool) -> Option<f64> {
        self.entries.iter().filter(|e| keep(e.0)).map(|e| e.1).reduce(f64::max)
    }

    /// Detunings of strict interior local minima of the transmission.
    pub fn local_minima(&self) -> Vec<f64> {
        self.entries.windows(3).filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1).map(|w| w[1].0).collect()
    }
}
