//! Dense LU with partial pivoting for the 9×9 steady-state systems.

use crate::C64;

pub(crate) const N: usize = 9;
pub(crate) type Mat9 = [[C64; N]; N];
pub(crate) type Vec9 = [C64; N];

pub(crate) struct Lu9 {
    lu: Mat9,
    perm: [usize; N],
    min_pivot: f64,
    max_pivot: f64,
}

impl Lu9 {
    /// Factorises `a`. Returns `None` when a pivot is exactly zero.
    pub(crate) fn factor(mut a: Mat9) -> Option<Self> {
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0_f64;
        for k in 0..N {
            let mut pivot_row = k;
            let mut pivot_abs = a[k][k].norm();
            for (i, row) in a.iter().enumerate().skip(k + 1) {
                let v = row[k].norm();
                if v > pivot_abs {
                    pivot_abs = v;
                    pivot_row = i;
                }
            }
            if pivot_abs == 0.0 {
                return None;
            }
            min_pivot = min_pivot.min(pivot_abs);
            max_pivot = max_pivot.max(pivot_abs);
            if pivot_row != k {
                a.swap(k, pivot_row);
                perm.swap(k, pivot_row);
            }
            let inv = a[k][k].inv();
            for i in (k + 1)..N {
                let factor = a[i][k] * inv;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                a[i][k] = factor;
                for j in (k + 1)..N {
                    let t = factor * a[k][j];
                    a[i][j] -= t;
                }
            }
        }
        Some(Lu9 { lu: a, perm, min_pivot, max_pivot })
    }

    pub(crate) fn solve(&self, b: &Vec9) -> Vec9 {
        let mut x = [C64::new(0.0, 0.0); N];
        for i in 0..N {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..N).rev() {
            let mut s = x[i];
            for j in (i + 1)..N {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s / self.lu[i][i];
        }
        x
    }

    /// Ratio of largest to smallest pivot magnitude; a cheap singularity flag.
    pub(crate) fn pivot_ratio(&self) -> f64 {
        self.max_pivot / self.min_pivot
    }

    /// 1-norm condition number `‖A‖₁ ‖A⁻¹‖₁` of the factorised matrix.
    pub(crate) fn condition_number(&self, a: &Mat9) -> f64 {
        let mut inv_norm = 0.0_f64;
        for j in 0..N {
            let mut e = [C64::new(0.0, 0.0); N];
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e);
            inv_norm = inv_norm.max(col.iter().map(|v| v.norm()).sum());
        }
        one_norm(a) * inv_norm
    }
}

pub(crate) fn one_norm(a: &Mat9) -> f64 {
    (0..N).map(|j| (0..N).map(|i| a[i][j].norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub(crate) fn mat_vec(a: &Mat9, x: &Vec9) -> Vec9 {
    let mut y = [C64::new(0.0, 0.0); N];
    for (yi, row) in y.iter_mut().zip(a.iter()) {
        *yi = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    }
    y
}
