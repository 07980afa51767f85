use crate::error::{Error, Result};
use crate::C64;

use super::levels::Level;

/// Atomic density matrix in the `(g, e, r)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3 {
    pub rho: [[C64; 3]; 3],
}

impl DensityMatrix3 {
    /// Pure state |level⟩⟨level|.
    pub fn pure(level: Level) -> Self {
        let mut rho = [[C64::new(0.0, 0.0); 3]; 3];
        let i = level as usize;
        rho[i][i] = C64::new(1.0, 0.0);
        DensityMatrix3 { rho }
    }

    /// Rebuilds the matrix from its column-major vectorisation
    /// (`vec[i + 3 j] = ρ_ij`).
    pub fn from_vec(v: &[C64; 9]) -> Self {
        let mut rho = [[C64::new(0.0, 0.0); 3]; 3];
        for (j, column) in v.chunks_exact(3).enumerate() {
            for (i, value) in column.iter().enumerate() {
                rho[i][j] = *value;
            }
        }
        DensityMatrix3 { rho }
    }

    pub fn to_vec(&self) -> [C64; 9] {
        let mut v = [C64::new(0.0, 0.0); 9];
        for j in 0..3 {
            for i in 0..3 {
                v[i + 3 * j] = self.rho[i][j];
            }
        }
        v
    }

    pub fn get(&self, row: Level, col: Level) -> C64 {
        self.rho[row as usize][col as usize]
    }

    pub fn trace(&self) -> C64 {
        self.rho[0][0] + self.rho[1][1] + self.rho[2][2]
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.rho[0][0].re, self.rho[1][1].re, self.rho[2][2].re]
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        hermitian_eigenvalues_3x3(&self.rho)
    }

    /// Checks Hermiticity and unit trace to 1e-12, diagonal entries in `[0, 1]`
    /// and positive semidefiniteness to 1e-10.
    pub fn check(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::InvalidParameter(format!("density matrix not Hermitian ({herm:e})")));
        }
        let trace_err = (self.trace() - 1.0).norm();
        if trace_err > 1e-12 {
            return Err(Error::InvalidParameter(format!("density matrix trace deviates by {trace_err:e}")));
        }
        for p in self.populations() {
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::InvalidParameter(format!("population {p} outside [0, 1]")));
            }
        }
        if !self.is_positive_semidefinite(1e-10) {
            let min_eig = self.eigenvalues()[0];
            return Err(Error::InvalidParameter(format!("density matrix has eigenvalue {min_eig:e}")));
        }
        Ok(())
    }

    /// True when every eigenvalue of the Hermitian part is `>= -tol`, tested
    /// through the principal minors of `ρ + tol·I` (Sylvester's criterion).
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let a = |i: usize, j: usize| {
            let v = 0.5 * (self.rho[i][j] + self.rho[j][i].conj());
            if i == j {
                v + tol
            } else {
                v
            }
        };
        let diag_ok = (0..3).all(|i| a(i, i).re >= 0.0);
        let pairs_ok =
            [(0, 1), (0, 2), (1, 2)].iter().all(|&(i, j)| a(i, i).re * a(j, j).re - a(i, j).norm_sqr() >= 0.0);
        let det = a(0, 0).re * (a(1, 1).re * a(2, 2).re - a(1, 2).norm_sqr())
            - a(1, 1).re * a(0, 2).norm_sqr()
            - a(2, 2).re * a(0, 1).norm_sqr()
            + 2.0 * (a(0, 1) * a(1, 2) * a(0, 2).conj()).re;
        diag_ok && pairs_ok && det >= 0.0
    }
}

/// Closed-form (trigonometric) eigenvalues of the Hermitian part of a 3×3 matrix.
fn hermitian_eigenvalues_3x3(m: &[[C64; 3]; 3]) -> [f64; 3] {
    let a = |i: usize, j: usize| 0.5 * (m[i][j] + m[j][i].conj());
    let (a00, a11, a22) = (a(0, 0).re, a(1, 1).re, a(2, 2).re);
    let (a01, a02, a12) = (a(0, 1), a(0, 2), a(1, 2));
    let p1 = a01.norm_sqr() + a02.norm_sqr() + a12.norm_sqr();
    let q = (a00 + a11 + a22) / 3.0;
    let p2 = (a00 - q).powi(2) + (a11 - q).powi(2) + (a22 - q).powi(2) + 2.0 * p1;
    if p2 <= f64::MIN_POSITIVE {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    // B = (A − qI)/p; r = det(B)/2
    let b00 = (a00 - q) / p;
    let b11 = (a11 - q) / p;
    let b22 = (a22 - q) / p;
    let b01 = a01 / p;
    let b02 = a02 / p;
    let b12 = a12 / p;
    let det = b00 * b11 * b22 + 2.0 * (b01 * b12 * b02.conj()).re
        - b00 * b12.norm_sqr()
        - b11 * b02.norm_sqr()
        - b22 * b01.norm_sqr();
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    [smallest, middle, largest]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_ground_state_is_valid() {
        let rho = DensityMatrix3::pure(Level::Ground);
        rho.check().unwrap();
        assert_eq!(rho.populations(), [1.0, 0.0, 0.0]);
        let ev = rho.eigenvalues();
        assert!(ev[0].abs() < 1e-7 && (ev[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vectorisation_is_column_major() {
        let mut rho = DensityMatrix3::pure(Level::Ground);
        rho.rho[1][0] = C64::new(0.1, 0.2);
        let v = rho.to_vec();
        assert_eq!(v[1], C64::new(0.1, 0.2));
        assert_eq!(DensityMatrix3::from_vec(&v), rho);
    }

    #[test]
    fn eigenvalues_of_mixed_state() {
        // diag(0.5, 0.3, 0.2) rotated by a coherence between g and e
        let mut rho = DensityMatrix3::pure(Level::Ground);
        rho.rho[0][0] = C64::new(0.5, 0.0);
        rho.rho[1][1] = C64::new(0.3, 0.0);
        rho.rho[2][2] = C64::new(0.2, 0.0);
        rho.rho[0][1] = C64::new(0.0, 0.1);
        rho.rho[1][0] = C64::new(0.0, -0.1);
        let ev = rho.eigenvalues();
        // 2×2 block eigenvalues: 0.4 ± sqrt(0.01 + 0.01)
        let s = 0.02_f64.sqrt();
        assert!((ev[0] - 0.2).abs() < 1e-12);
        assert!((ev[1] - (0.4 - s)).abs() < 1e-12);
        assert!((ev[2] - (0.4 + s)).abs() < 1e-12);
        rho.check().unwrap();
    }

    #[test]
    fn non_positive_matrix_is_rejected() {
        let mut rho = DensityMatrix3::pure(Level::Ground);
        rho.rho[0][0] = C64::new(0.5, 0.0);
        rho.rho[1][1] = C64::new(0.5, 0.0);
        rho.rho[0][1] = C64::new(0.8, 0.0);
        rho.rho[1][0] = C64::new(0.8, 0.0);
        assert!(rho.check().is_err());
    }
}
