//! Local atomic response providers consumed by the propagation step.
//!
//! Every provider maps the local probe Rabi frequency and the coupling
//! magnitude to the steady-state coherence ρ_eg for fixed detunings. The phase
//! of Ω_p factors out exactly, `ρ_eg(Ω_p e^{iφ}) = e^{iφ} ρ_eg(|Ω_p|)`, and the
//! phase of Ω_c does not enter at all.

use super::levels::{FieldPoint, LevelScheme};
use super::liouvillian::steady_coherence_fast;
use super::susceptibility::susceptibility_denominator;
use crate::error::{Error, Result};
use crate::C64;

pub trait LocalResponse: Send + Sync {
    /// Steady-state ρ_eg for local probe `omega_p` and coupling magnitude `omega_c`.
    fn rho_eg(&self, omega_p: C64, omega_c: f64) -> Result<C64>;
}

/// Weak-probe closed form `ρ_eg = i Ω_p / (2 D)`.
#[derive(Debug, Clone)]
pub struct LinearResponse {
    pub levels: LevelScheme,
    pub delta_p: f64,
    pub delta_c: f64,
}

impl LinearResponse {
    pub fn new(levels: LevelScheme, delta_p: f64, delta_c: f64) -> Self {
        LinearResponse { levels, delta_p, delta_c }
    }
}

impl LocalResponse for LinearResponse {
    fn rho_eg(&self, omega_p: C64, omega_c: f64) -> Result<C64> {
        let fp = FieldPoint::new(omega_p, C64::new(omega_c, 0.0), self.delta_p, self.delta_c);
        match susceptibility_denominator(&fp, &self.levels) {
            None => Ok(C64::new(0.0, 0.0)),
            Some(d) if d.norm() == 0.0 => Err(Error::DegenerateDenominator(0.0)),
            Some(d) => Ok(C64::i() * omega_p / (2.0 * d)),
        }
    }
}

/// Solves the full master equation at every query.
#[derive(Debug, Clone)]
pub struct DirectResponse {
    pub levels: LevelScheme,
    pub delta_p: f64,
    pub delta_c: f64,
}

impl DirectResponse {
    pub fn new(levels: LevelScheme, delta_p: f64, delta_c: f64) -> Self {
        DirectResponse { levels, delta_p, delta_c }
    }
}

impl LocalResponse for DirectResponse {
    fn rho_eg(&self, omega_p: C64, omega_c: f64) -> Result<C64> {
        let magnitude = omega_p.norm();
        if magnitude == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let fp = FieldPoint::real(magnitude, omega_c, self.delta_p, self.delta_c);
        let rho = steady_coherence_fast(&fp, &self.levels)?;
        Ok(rho * (omega_p / magnitude))
    }
}

/// Cached nonperturbative response on a `(|Ω_p|, |Ω_c|)` grid.
///
/// Stores `g = ρ_eg / |Ω_p|` (its weak-probe limit on the `|Ω_p| = 0` row),
/// interpolated with four-point cubic Lagrange polynomials in `|Ω_p|` (linear
/// when fewer than four rows exist) and with a cubic spline in `|Ω_c|`. The
/// spline has zero slope at `|Ω_c| = 0` when the grid starts there (the
/// response is even in Ω_c) and a four-point one-sided slope at the far end.
#[derive(Debug, Clone)]
pub struct ResponseTable {
    omega_p: Vec<f64>,
    omega_c: Vec<f64>,
    /// Row-major: `values[ip * n_c + ic]`.
    values: Vec<C64>,
    /// Spline second derivatives along Ω_c, same layout.
    curvature: Vec<C64>,
    pub levels: LevelScheme,
    pub delta_p: f64,
    pub delta_c: f64,
}

impl ResponseTable {
    /// Builds the table by solving the master equation at every node.
    pub fn new(
        omega_p_samples: &[f64],
        omega_c_samples: &[f64],
        delta_p: f64,
        delta_c: f64,
        levels: &LevelScheme,
    ) -> Result<Self> {
        check_grid("omega_p", omega_p_samples, 2)?;
        check_grid("omega_c", omega_c_samples, 4)?;
        let n_c = omega_c_samples.len();
        let probe_floor = 1e-6 * levels.gamma_e.max(f64::MIN_POSITIVE);
        let nodes: Vec<(f64, f64)> =
            omega_p_samples.iter().flat_map(|&p| omega_c_samples.iter().map(move |&c| (p, c))).collect();
        use rayon::prelude::*;
        let values = nodes
            .par_iter()
            .map(|&(p, c)| {
                let probe = if p == 0.0 { probe_floor } else { p };
                let fp = FieldPoint::real(probe, c, delta_p, delta_c);
                steady_coherence_fast(&fp, levels).map(|rho| rho / probe)
            })
            .collect::<Result<Vec<C64>>>()?;
        let left_clamped = omega_c_samples[0] == 0.0;
        let curvature =
            values.chunks_exact(n_c).flat_map(|row| spline_curvature(omega_c_samples, row, left_clamped)).collect();
        Ok(ResponseTable {
            omega_p: omega_p_samples.to_vec(),
            omega_c: omega_c_samples.to_vec(),
            values,
            curvature,
            levels: *levels,
            delta_p,
            delta_c,
        })
    }

    /// Uniform grids `[0, omega_p_max]` × `[0, omega_c_max]` with `n` nodes each.
    pub fn uniform(
        n: usize,
        omega_p_max: f64,
        omega_c_max: f64,
        delta_p: f64,
        delta_c: f64,
        levels: &LevelScheme,
    ) -> Result<Self> {
        let grid = |max: f64| (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect::<Vec<_>>();
        if n < 4 {
            return Err(Error::InvalidParameter("response table needs at least 4 nodes per axis".into()));
        }
        Self::new(&grid(omega_p_max), &grid(omega_c_max), delta_p, delta_c, levels)
    }

    /// `n × n` nodes: uniform in `|Ω_p|` over `[0, omega_p_max]`, and graded
    /// in `|Ω_c|` as `Ω_c = omega_c_max·(β u + (1 − β) u²)` with uniform `u`
    /// and `β = 1/4`. Nodes near `Ω_c = 0` are four times denser than a
    /// uniform grid, resolving the narrow Rydberg-shelving feature that a
    /// strong probe produces at weak coupling (width ~ `sqrt(Γ_r Γ_e)`).
    pub fn graded(
        n: usize,
        omega_p_max: f64,
        omega_c_max: f64,
        delta_p: f64,
        delta_c: f64,
        levels: &LevelScheme,
    ) -> Result<Self> {
        const BETA: f64 = 0.25;
        if n < 4 {
            return Err(Error::InvalidParameter("response table needs at least 4 nodes per axis".into()));
        }
        let u = |i: usize| i as f64 / (n - 1) as f64;
        let p: Vec<f64> = (0..n).map(|i| omega_p_max * u(i)).collect();
        let c: Vec<f64> = (0..n).map(|i| omega_c_max * (BETA * u(i) + (1.0 - BETA) * u(i) * u(i))).collect();
        Self::new(&p, &c, delta_p, delta_c, levels)
    }

    pub fn omega_p_max(&self) -> f64 {
        *self.omega_p.last().unwrap()
    }

    pub fn omega_c_max(&self) -> f64 {
        *self.omega_c.last().unwrap()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.omega_p.len(), self.omega_c.len())
    }

    fn spline_row(&self, row: usize, c: f64, j: usize) -> C64 {
        let n_c = self.omega_c.len();
        let y = &self.values[row * n_c..(row + 1) * n_c];
        let m = &self.curvature[row * n_c..(row + 1) * n_c];
        let h = self.omega_c[j + 1] - self.omega_c[j];
        let a = (self.omega_c[j + 1] - c) / h;
        let b = 1.0 - a;
        y[j] * a + y[j + 1] * b + (m[j] * (a * a * a - a) + m[j + 1] * (b * b * b - b)) * (h * h / 6.0)
    }
}

impl LocalResponse for ResponseTable {
    fn rho_eg(&self, omega_p: C64, omega_c: f64) -> Result<C64> {
        let p = omega_p.norm();
        let c = omega_c.abs();
        let out_of_range = || Error::ResponseOutOfRange { omega_p: p, omega_c: c };
        let i = locate(&self.omega_p, p).ok_or_else(out_of_range)?;
        let j = locate(&self.omega_c, c).ok_or_else(out_of_range)?;
        if p == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let n_p = self.omega_p.len();
        let g = if n_p < 4 {
            let t = (p - self.omega_p[i]) / (self.omega_p[i + 1] - self.omega_p[i]);
            self.spline_row(i, c, j) * (1.0 - t) + self.spline_row(i + 1, c, j) * t
        } else {
            // Stencil of four rows around the interval, shifted inward at the ends.
            let first = i.saturating_sub(1).min(n_p - 4);
            let x = &self.omega_p[first..first + 4];
            let mut g = C64::new(0.0, 0.0);
            for k in 0..4 {
                let weight: f64 = (0..4).filter(|&m| m != k).map(|m| (p - x[m]) / (x[k] - x[m])).product();
                g += self.spline_row(first + k, c, j) * weight;
            }
            g
        };
        Ok(g * omega_p)
    }
}

fn check_grid(name: &str, samples: &[f64], min_len: usize) -> Result<()> {
    if samples.len() < min_len {
        return Err(Error::InvalidParameter(format!("{name} grid needs at least {min_len} samples")));
    }
    if samples.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter(format!("{name} grid must hold finite magnitudes >= 0")));
    }
    if samples.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("{name} grid must be strictly increasing")));
    }
    Ok(())
}

/// Index `i` of the interval `[x_i, x_{i+1}]` holding `v`; `None` outside the grid.
fn locate(grid: &[f64], v: f64) -> Option<usize> {
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    let slack = 1e-12 * (last - first);
    if !(v >= first - slack && v <= last + slack) {
        return None;
    }
    let idx = grid.partition_point(|&x| x <= v);
    Some(idx.saturating_sub(1).min(grid.len() - 2))
}

/// Second derivatives of the cubic spline through `(x, y)`.
///
/// Left end: zero slope when `left_clamped`, natural otherwise. Right end:
/// slope from the cubic through the last four nodes.
fn spline_curvature(x: &[f64], y: &[C64], left_clamped: bool) -> Vec<C64> {
    let n = x.len();
    let zero = C64::new(0.0, 0.0);
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let slope = |i: usize| (y[i + 1] - y[i]) / h[i];

    // Tridiagonal system a_i M_{i-1} + b_i M_i + c_i M_{i+1} = d_i.
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut c = vec![0.0; n];
    let mut d = vec![zero; n];
    if left_clamped {
        b[0] = h[0] / 3.0;
        c[0] = h[0] / 6.0;
        d[0] = slope(0);
    } else {
        b[0] = 1.0;
    }
    for i in 1..n - 1 {
        a[i] = h[i - 1] / 6.0;
        b[i] = (h[i - 1] + h[i]) / 3.0;
        c[i] = h[i] / 6.0;
        d[i] = slope(i) - slope(i - 1);
    }
    let end_slope = lagrange_end_slope(&x[n - 4..], &y[n - 4..]);
    a[n - 1] = h[n - 2] / 6.0;
    b[n - 1] = h[n - 2] / 3.0;
    d[n - 1] = end_slope - slope(n - 2);

    // Thomas algorithm.
    for i in 1..n {
        let w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        let prev = d[i - 1];
        d[i] -= prev * w;
    }
    let mut m = vec![zero; n];
    m[n - 1] = d[n - 1] / b[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (d[i] - m[i + 1] * c[i]) / b[i];
    }
    m
}

/// Derivative at `x[3]` of the cubic interpolating four points.
fn lagrange_end_slope(x: &[f64], y: &[C64]) -> C64 {
    let t = x[3];
    let mut total = C64::new(0.0, 0.0);
    for j in 0..4 {
        // d/dt of the j-th Lagrange basis polynomial, evaluated at t.
        let mut denom = 1.0;
        for m in 0..4 {
            if m != j {
                denom *= x[j] - x[m];
            }
        }
        let mut deriv = 0.0;
        for k in 0..4 {
            if k == j {
                continue;
            }
            let mut prod = 1.0;
            for m in 0..4 {
                if m != j && m != k {
                    prod *= t - x[m];
                }
            }
            deriv += prod;
        }
        total += y[j] * (deriv / denom);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::{build_liouvillian, coherence_eg, steady_state};

    fn levels() -> LevelScheme {
        LevelScheme::default()
    }

    #[test]
    fn spline_reproduces_cubic() {
        let x: Vec<f64> = (0..12).map(|i| i as f64 * 0.3).collect();
        // Even cubic-ish function with zero slope at 0: y = 1 + x² − 0.1 x³
        let f = |x: f64| 1.0 + x * x - 0.1 * x * x * x;
        let y: Vec<C64> = x.iter().map(|&v| C64::new(f(v), -f(v))).collect();
        let m = spline_curvature(&x, &y, true);
        // Curvature of the interpolant at interior nodes approaches 2 − 0.6x.
        for (i, mi) in m.iter().enumerate().take(10).skip(2) {
            assert!((mi.re - (2.0 - 0.6 * x[i])).abs() < 5e-2, "node {i}: {}", mi.re);
        }
        assert!(
            (lagrange_end_slope(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 8.0, 27.0].map(|v| C64::new(v, 0.0))).re - 27.0)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn grid_validation() {
        let ls = levels();
        assert!(ResponseTable::new(&[0.0, 1.0], &[0.0, 2.0, 1.0, 3.0], 0.0, 0.0, &ls).is_err());
        assert!(ResponseTable::new(&[0.0], &[0.0, 1.0, 2.0, 3.0], 0.0, 0.0, &ls).is_err());
        assert!(ResponseTable::new(&[0.0, 1.0], &[0.0, 1.0, 2.0], 0.0, 0.0, &ls).is_err());
    }

    #[test]
    fn node_query_equals_direct_solve() {
        let ls = levels();
        let g = ls.gamma_e;
        let table = ResponseTable::uniform(16, 0.5 * g, 2.5 * g, -0.28 * g, 0.0, &ls).unwrap();
        for &(ip, ic) in &[(3usize, 7usize), (15, 15), (1, 0), (0, 5)] {
            let p = 0.5 * g * ip as f64 / 15.0;
            let c = 2.5 * g * ic as f64 / 15.0;
            let got = table.rho_eg(C64::new(p, 0.0), c).unwrap();
            let fp = FieldPoint::real(p, c, -0.28 * g, 0.0);
            let direct = coherence_eg(&steady_state(&build_liouvillian(&fp, &ls)).unwrap());
            assert!((got - direct).norm() <= 1e-12 * direct.norm().max(1e-30), "({ip},{ic}): {got} vs {direct}");
        }
    }

    #[test]
    fn probe_phase_rotates_response() {
        let ls = levels();
        let g = ls.gamma_e;
        let table = ResponseTable::uniform(16, 0.5 * g, 2.5 * g, 0.3 * g, 0.0, &ls).unwrap();
        let real = table.rho_eg(C64::new(0.21 * g, 0.0), 1.1 * g).unwrap();
        let rotated = table.rho_eg(C64::new(0.0, 0.21 * g), 1.1 * g).unwrap();
        assert!((rotated - C64::i() * real).norm() < 1e-15);
    }

    #[test]
    fn out_of_range_is_reported() {
        let ls = levels();
        let g = ls.gamma_e;
        let table = ResponseTable::uniform(8, 0.5 * g, 2.5 * g, 0.0, 0.0, &ls).unwrap();
        assert!(matches!(table.rho_eg(C64::new(0.6 * g, 0.0), g), Err(Error::ResponseOutOfRange { .. })));
        assert!(table.rho_eg(C64::new(0.1 * g, 0.0), 2.6 * g).is_err());
    }

    #[test]
    fn linear_and_direct_agree_for_weak_probe() {
        let ls = levels();
        let g = ls.gamma_e;
        let lin = LinearResponse::new(ls, 0.4 * g, 0.0);
        let direct = DirectResponse::new(ls, 0.4 * g, 0.0);
        let probe = C64::from_polar(1e-4 * g, 0.3);
        let a = lin.rho_eg(probe, 1.5 * g).unwrap();
        let b = direct.rho_eg(probe, 1.5 * g).unwrap();
        assert!((a - b).norm() / a.norm() < 1e-6);
        assert_eq!(direct.rho_eg(C64::new(0.0, 0.0), g).unwrap(), C64::new(0.0, 0.0));
    }
}
