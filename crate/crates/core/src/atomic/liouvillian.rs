//! Master-equation generator and its steady state.
//!
//! The density matrix is vectorised column-major over `(row, col)` in level
//! order `(g, e, r)`, so `vec[i + 3 j] = ρ_ij` and `vec(A ρ B) = (Bᵀ ⊗ A) vec ρ`.

use super::density::DensityMatrix3;
use super::levels::{FieldPoint, Level, LevelScheme};
use super::linalg::{mat_vec, Lu9, Mat9, Vec9, N};
use crate::error::{Error, Result};
use crate::C64;

type Op3 = [[C64; 3]; 3];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Largest admissible condition number of the trace-constrained system.
pub const MAX_CONDITION: f64 = 1e14;

/// Generator `L` with `d vec(ρ)/dt = L vec(ρ)`, in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub matrix: [[C64; 9]; 9],
}

impl Liouvillian {
    pub fn zeros() -> Self {
        Liouvillian { matrix: [[ZERO; N]; N] }
    }

    pub fn apply(&self, v: &[C64; 9]) -> [C64; 9] {
        mat_vec(&self.matrix, v)
    }

    /// `L` applied to a density matrix, returned as a matrix.
    pub fn apply_to(&self, rho: &DensityMatrix3) -> DensityMatrix3 {
        DensityMatrix3::from_vec(&self.apply(&rho.to_vec()))
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Adds `coeff · A ρ B` to the generator.
    fn add_sandwich(&mut self, coeff: C64, a: &Op3, b: &Op3) {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if a[i][k] == ZERO {
                        continue;
                    }
                    for l in 0..3 {
                        let c = a[i][k] * b[l][j];
                        if c != ZERO {
                            self.matrix[i + 3 * j][k + 3 * l] += coeff * c;
                        }
                    }
                }
            }
        }
    }

    fn add_commutator(&mut self, h: &Op3) {
        self.add_sandwich(-C64::i(), h, &identity());
        self.add_sandwich(C64::i(), &identity(), h);
    }

    /// Adds `rate · (J ρ J† − ½{J†J, ρ})`.
    fn add_dissipator(&mut self, rate: f64, jump: &Op3) {
        if rate == 0.0 {
            return;
        }
        let dag = adjoint(jump);
        let n = product(&dag, jump);
        let rate = C64::new(rate, 0.0);
        self.add_sandwich(rate, jump, &dag);
        self.add_sandwich(-0.5 * rate, &n, &identity());
        self.add_sandwich(-0.5 * rate, &identity(), &n);
    }
}

fn identity() -> Op3 {
    let mut m = [[ZERO; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

/// `|to⟩⟨from|`
fn ket_bra(to: Level, from: Level) -> Op3 {
    let mut m = [[ZERO; 3]; 3];
    m[to as usize][from as usize] = ONE;
    m
}

fn adjoint(a: &Op3) -> Op3 {
    let mut m = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[j][i].conj();
        }
    }
    m
}

fn product(a: &Op3, b: &Op3) -> Op3 {
    let mut m = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

/// Rotating-frame Hamiltonian divided by ħ:
/// `−Δ_p|e⟩⟨e| − (Δ_c+Δ_p)|r⟩⟨r| − (Ω_p/2 |e⟩⟨g| + Ω_c/2 |r⟩⟨e| + h.c.)`.
fn hamiltonian(fp: &FieldPoint) -> Op3 {
    use Level::*;
    let mut h = [[ZERO; 3]; 3];
    h[Excited as usize][Excited as usize] = C64::new(-fp.delta_p, 0.0);
    h[Rydberg as usize][Rydberg as usize] = C64::new(-(fp.delta_c + fp.delta_p), 0.0);
    h[Excited as usize][Ground as usize] = -0.5 * fp.omega_p;
    h[Ground as usize][Excited as usize] = -0.5 * fp.omega_p.conj();
    h[Rydberg as usize][Excited as usize] = -0.5 * fp.omega_c;
    h[Excited as usize][Rydberg as usize] = -0.5 * fp.omega_c.conj();
    h
}

/// Assembles the full generator: coherent evolution, spontaneous decay
/// e → g (Γ_e) and r → e (Γ_r), and laser-noise dephasing on the projectors
/// onto |r⟩ (γ_c) and |g⟩ (γ_p).
pub fn build_liouvillian(fp: &FieldPoint, ls: &LevelScheme) -> Liouvillian {
    use Level::*;
    let mut l = Liouvillian::zeros();
    l.add_commutator(&hamiltonian(fp));
    l.add_dissipator(ls.gamma_e, &ket_bra(Ground, Excited));
    l.add_dissipator(ls.gamma_r, &ket_bra(Excited, Rydberg));
    l.add_dissipator(ls.gamma_c, &ket_bra(Rydberg, Rydberg));
    l.add_dissipator(ls.gamma_p, &ket_bra(Ground, Ground));
    l
}

/// Rescales `l` to O(1) entries and swaps its first row (d ρ_gg/dt) for the
/// trace condition.
fn constrained_system(l: &Liouvillian) -> Option<Mat9> {
    let scale = l.max_abs();
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let mut m = l.matrix;
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v /= scale;
        }
    }
    m[0] = [ZERO; N];
    for d in 0..3 {
        m[0][d + 3 * d] = ONE;
    }
    Some(m)
}

fn unit_rhs() -> Vec9 {
    let mut b = [ZERO; N];
    b[0] = ONE;
    b
}

/// Unit-trace null vector of `l`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix3> {
    let m = constrained_system(l).ok_or(Error::NonUniqueSteadyState(f64::INFINITY))?;
    let lu = Lu9::factor(m).ok_or(Error::NonUniqueSteadyState(f64::INFINITY))?;
    let cond = lu.condition_number(&m);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::NonUniqueSteadyState(cond));
    }
    Ok(DensityMatrix3::from_vec(&lu.solve(&unit_rhs())))
}

/// Steady-state ρ_eg without the full condition-number estimate; singularity
/// is flagged through the pivot ratio instead. Used for bulk evaluation.
pub(crate) fn steady_coherence_fast(fp: &FieldPoint, ls: &LevelScheme) -> Result<C64> {
    let l = build_liouvillian(fp, ls);
    let m = constrained_system(&l).ok_or(Error::NonUniqueSteadyState(f64::INFINITY))?;
    let lu = Lu9::factor(m).ok_or(Error::NonUniqueSteadyState(f64::INFINITY))?;
    let ratio = lu.pivot_ratio();
    if !(ratio <= MAX_CONDITION) {
        return Err(Error::NonUniqueSteadyState(ratio));
    }
    let v = lu.solve(&unit_rhs());
    Ok(v[Level::Excited as usize + 3 * Level::Ground as usize])
}

/// The (e, g) coherence that drives the probe field.
pub fn coherence_eg(rho: &DensityMatrix3) -> C64 {
    rho.get(Level::Excited, Level::Ground)
}
