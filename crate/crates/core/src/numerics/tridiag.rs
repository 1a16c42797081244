//! Tridiagonal kernels: Sturm inertia counts, pivoted LU solves, inverse
//! iteration and complex log-determinants.
//!
//! Every matrix assembled from the piecewise-linear nodal basis has bandwidth
//! one, so these O(n) kernels carry the whole spectral module.

use num_complex::Complex64;

/// Symmetric tridiagonal matrix: `diag` has length n, `off` length n-1.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// x^T A x
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// c0*self + c1*other, entrywise.
    pub fn scaled_add(&self, c0: f64, other: &SymTridiag, c1: f64) -> SymTridiag {
        SymTridiag {
            diag: self
                .diag
                .iter()
                .zip(&other.diag)
                .map(|(a, b)| c0 * a + c1 * b)
                .collect(),
            off: self
                .off
                .iter()
                .zip(&other.off)
                .map(|(a, b)| c0 * a + c1 * b)
                .collect(),
        }
    }

    /// Infinity norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Number of negative pivots in the (unpivoted) LDL^T factorization,
    /// i.e. the number of eigenvalues below zero by Sylvester's law.
    ///
    /// Zero pivots are nudged to a tiny negative value, the usual Sturm
    /// tie-break; the count function stays monotone in a shift.
    pub fn negative_pivots(&self) -> usize {
        let n = self.n();
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let tiny = scale * 1e-300f64.max(f64::EPSILON * f64::EPSILON);
        let mut count = 0usize;
        let mut q_prev = 0.0f64;
        for i in 0..n {
            let mut q = self.diag[i];
            if i > 0 {
                q -= self.off[i - 1] * self.off[i - 1] / q_prev;
            }
            if q == 0.0 || q.abs() < tiny {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
            q_prev = q;
        }
        count
    }

    /// Count of pencil eigenvalues of (A, B) strictly below `sigma`,
    /// where B is positive definite: inertia of A - sigma B.
    pub fn pencil_count_below(&self, b: &SymTridiag, sigma: f64) -> usize {
        self.scaled_add(1.0, b, -sigma).negative_pivots()
    }

    /// Like [`Self::negative_pivots`], but refuses to classify when a pivot
    /// is too small relative to the matrix scale. Callers fall back to a
    /// full symmetric eigensolve in that case.
    pub fn negative_pivots_checked(&self) -> Option<usize> {
        let n = self.n();
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let mut count = 0usize;
        let mut q_prev = 0.0f64;
        for i in 0..n {
            let mut q = self.diag[i];
            if i > 0 {
                q -= self.off[i - 1] * self.off[i - 1] / q_prev;
            }
            if q.abs() < 1e-13 * scale {
                return None;
            }
            if q < 0.0 {
                count += 1;
            }
            q_prev = q;
        }
        Some(count)
    }

    /// ln det(A + i*0) of the complex symmetric tridiagonal matrix obtained
    /// by evaluating a matrix polynomial; `diag`/`off` given as complex.
    /// Returns the sum of principal logs of the LDL^T pivots, which
    /// exponentiates to the true determinant. `None` on pivot breakdown.
    pub fn ln_det_complex(diag: &[Complex64], off: &[Complex64]) -> Option<Complex64> {
        let n = diag.len();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut q_prev = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut q = diag[i];
            if i > 0 {
                if q_prev.norm() == 0.0 {
                    return None;
                }
                q -= off[i - 1] * off[i - 1] / q_prev;
            }
            if q.norm() == 0.0 {
                return None;
            }
            acc += q.ln();
            q_prev = q;
        }
        Some(acc)
    }
}

/// General tridiagonal matrix (`sub`, `diag`, `sup`; `sub`/`sup` length n-1).
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn from_sym(s: &SymTridiag) -> Self {
        Self {
            sub: s.off.clone(),
            diag: s.diag.clone(),
            sup: s.off.clone(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.sup[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }
}

/// LU factorization of a tridiagonal matrix with partial pivoting.
/// Fill-in is a single extra superdiagonal.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    n: usize,
    low: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    /// Factor; returns `None` if the matrix is numerically singular.
    pub fn factor(t: &Tridiag) -> Option<Self> {
        let n = t.n();
        let mut u0 = t.diag.clone();
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut low = vec![0.0; n];
        let mut swapped = vec![false; n];
        for i in 0..n - 1 {
            u1[i] = t.sup[i];
        }
        let scale: f64 = u0
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
            .max(t.sub.iter().chain(t.sup.iter()).map(|v| v.abs()).fold(0.0, f64::max));
        if scale == 0.0 {
            return None;
        }
        for i in 0..n - 1 {
            let a21 = t.sub[i];
            if a21.abs() > u0[i].abs() {
                swapped[i] = true;
                // swap row i with row i+1
                let (p0, p1) = (u0[i], u1[i]);
                u0[i] = a21;
                u1[i] = u0[i + 1];
                u2[i] = if i + 2 < n { t.sup[i + 1] } else { 0.0 };
                let m = p0 / u0[i];
                low[i] = m;
                u0[i + 1] = p1 - m * u1[i];
                u1[i + 1] = if i + 2 < n { -m * u2[i] } else { 0.0 };
            } else {
                if u0[i] == 0.0 {
                    return None;
                }
                let m = a21 / u0[i];
                low[i] = m;
                u0[i + 1] -= m * u1[i];
                // u2 row i stays zero; u1[i+1] already holds sup[i+1]
            }
        }
        if u0[n - 1] == 0.0 {
            return None;
        }
        Some(Self {
            n,
            low,
            u0,
            u1,
            u2,
            swapped,
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut b = rhs.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.low[i] * b[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
        }
        x
    }

    /// Smallest pivot magnitude relative to the largest; a crude singularity
    /// indicator for shifted solves.
    pub fn pivot_ratio(&self) -> f64 {
        let max = self.u0.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let min = self.u0.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }
}

/// Inverse iteration on the pencil (A, B): find the eigenvector of
/// A x = lambda B x for the eigenvalue nearest `shift`.
/// Returns (refined eigenvalue, eigenvector normalized so x^T B x = 1).
pub fn pencil_inverse_iteration(
    a: &SymTridiag,
    b: &SymTridiag,
    shift: f64,
    iters: usize,
) -> Option<(f64, Vec<f64>)> {
    let n = a.n();
    // small relative offset keeps the shifted matrix factorable
    let scale = a.norm_inf().max(shift.abs());
    let mut sh = shift;
    let mut lu = None;
    for attempt in 0..6 {
        let shifted = a.scaled_add(1.0, b, -sh);
        if let Some(f) = TridiagLu::factor(&Tridiag::from_sym(&shifted)) {
            if f.pivot_ratio() > 1e-300 {
                lu = Some(f);
                break;
            }
        }
        sh = shift + scale * 1e-12 * 10f64.powi(attempt);
    }
    let lu = lu?;
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.37).sin() * 0.01).collect();
    let mut lambda = shift;
    for _ in 0..iters {
        let bx = b.matvec(&x);
        let y = lu.solve(&bx);
        let ynorm = (b.quad_form(&y)).abs().sqrt();
        if !ynorm.is_finite() || ynorm == 0.0 {
            return None;
        }
        x = y.iter().map(|v| v / ynorm).collect();
        lambda = a.quad_form(&x) / b.quad_form(&x);
    }
    Some((lambda, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiag {
        SymTridiag {
            diag: vec![2.0; n],
            off: vec![-1.0; n - 1],
        }
    }

    #[test]
    fn sturm_count_matches_known_spectrum() {
        // eigenvalues of the n-point 1D Laplacian: 2 - 2 cos(k pi / (n+1))
        let n = 25;
        let a = laplacian(n);
        let id = SymTridiag {
            diag: vec![1.0; n],
            off: vec![0.0; n - 1],
        };
        for k in 1..=n {
            let lam = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_eq!(a.pencil_count_below(&id, lam - 1e-9), k - 1);
            assert_eq!(a.pencil_count_below(&id, lam + 1e-9), k);
        }
    }

    #[test]
    fn lu_solve_recovers_rhs() {
        let n = 40;
        let t = Tridiag {
            sub: (0..n - 1).map(|i| -1.0 + 0.01 * i as f64).collect(),
            diag: (0..n).map(|i| 0.1 + (i as f64 * 0.7).cos()).collect(),
            sup: (0..n - 1).map(|i| 2.0 - 0.03 * i as f64).collect(),
        };
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let rhs = t.matvec(&x_true);
        let lu = TridiagLu::factor(&t).unwrap();
        let x = lu.solve(&rhs);
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-9, "i = {i}");
        }
    }

    #[test]
    fn inverse_iteration_finds_extreme_mode() {
        let n = 30;
        let a = laplacian(n);
        let id = SymTridiag {
            diag: vec![1.0; n],
            off: vec![0.0; n - 1],
        };
        let lam_min = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let (lam, _x) = pencil_inverse_iteration(&a, &id, lam_min * 0.9, 8).unwrap();
        assert!((lam - lam_min).abs() < 1e-10);
    }

    #[test]
    fn complex_ln_det_matches_direct_product() {
        // 2x2: det = d0*d1 - o^2
        let d = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.3)];
        let o = [Complex64::new(0.7, -0.1)];
        let ld = SymTridiag::ln_det_complex(&d, &o).unwrap();
        let det = d[0] * d[1] - o[0] * o[0];
        assert!((ld.exp() - det).norm() < 1e-12 * det.norm());
    }
}
