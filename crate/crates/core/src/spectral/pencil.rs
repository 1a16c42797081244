//! Eigenvalues of the symmetric-definite pencil (K, M) by Sylvester-inertia
//! bisection, exact to bracket width at every matrix size.

use crate::error::{Error, Result};
use crate::numerics::tridiag::{pencil_inverse_iteration, SymTridiag};

/// Bisection workhorse over the counting function
/// `count(sigma) = #\{pencil eigenvalues < sigma\}`.
pub struct SymPencil<'a> {
    pub k: &'a SymTridiag,
    pub m: &'a SymTridiag,
}

impl<'a> SymPencil<'a> {
    pub fn new(k: &'a SymTridiag, m: &'a SymTridiag) -> Self {
        Self { k, m }
    }

    pub fn n(&self) -> usize {
        self.k.n()
    }

    pub fn count_below(&self, sigma: f64) -> usize {
        self.k.pencil_count_below(self.m, sigma)
    }

    /// Symmetric interval `[-bound, bound]` containing the whole spectrum,
    /// found by doubling until the Sylvester count saturates on both sides.
    pub fn spectrum_bound(&self) -> f64 {
        let n = self.n();
        let mut bound = 1.0f64;
        for _ in 0..2000 {
            if self.count_below(-bound) == 0 && self.count_below(bound) == n {
                return bound;
            }
            bound *= 2.0;
            if !bound.is_finite() {
                break;
            }
        }
        f64::MAX / 4.0
    }

    /// The `idx`-th pencil eigenvalue (ascending, 0-based), bisected to
    /// machine precision relative to its own magnitude.
    pub fn eigenvalue(&self, idx: usize) -> Result<f64> {
        if idx >= self.n() {
            return Err(Error::Eigen(format!(
                "eigenvalue index {idx} out of range (n = {})",
                self.n()
            )));
        }
        let bound = self.spectrum_bound();
        let (mut lo, mut hi) = (-bound, bound);
        // invariant: count(lo) <= idx < count(hi)
        for _ in 0..2100 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) <= idx {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenvector for the eigenvalue nearest `sigma`, normalized in M.
    pub fn eigenvector_near(&self, sigma: f64) -> Result<(f64, Vec<f64>)> {
        pencil_inverse_iteration(self.k, self.m, sigma, 10)
            .ok_or_else(|| Error::Eigen("inverse iteration failed to converge".into()))
    }

    /// Smallest |eigenvalue| of the pencil — the kernel margin used to flag
    /// the `M'(mu) = 0` degenerate case.
    pub fn kernel_margin(&self) -> Result<f64> {
        let n_minus = self.count_below(0.0);
        let mut best = f64::INFINITY;
        if n_minus > 0 {
            best = best.min(self.eigenvalue(n_minus - 1)?.abs());
        }
        if n_minus < self.n() {
            best = best.min(self.eigenvalue(n_minus)?.abs());
        }
        Ok(best)
    }

    /// Largest |eigenvalue|, used to scale degeneracy thresholds.
    pub fn spectral_radius(&self) -> Result<f64> {
        let lo = self.eigenvalue(0)?;
        let hi = self.eigenvalue(self.n() - 1)?;
        Ok(lo.abs().max(hi.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pencil_eigenvalues_of_scaled_identity() {
        // K = diag(-4, 1, 9), M = I: eigenvalues exactly -4, 1, 9
        let k = SymTridiag {
            diag: vec![-4.0, 1.0, 9.0],
            off: vec![0.0, 0.0],
        };
        let m = SymTridiag {
            diag: vec![1.0; 3],
            off: vec![0.0, 0.0],
        };
        let p = SymPencil::new(&k, &m);
        assert_eq!(p.count_below(0.0), 1);
        assert!((p.eigenvalue(0).unwrap() + 4.0).abs() < 1e-12);
        assert!((p.eigenvalue(1).unwrap() - 1.0).abs() < 1e-12);
        assert!((p.eigenvalue(2).unwrap() - 9.0).abs() < 1e-12);
        assert!((p.kernel_margin().unwrap() - 1.0).abs() < 1e-12);
        assert!((p.spectral_radius().unwrap() - 9.0).abs() < 1e-11);
    }

    #[test]
    fn mass_scaling_shifts_spectrum() {
        // K x = sigma M x with M = 2I halves the eigenvalues of K
        let k = SymTridiag {
            diag: vec![2.0; 10],
            off: vec![-1.0; 9],
        };
        let m = SymTridiag {
            diag: vec![2.0; 10],
            off: vec![0.0; 9],
        };
        let p = SymPencil::new(&k, &m);
        let lam1 = 2.0 - 2.0 * (std::f64::consts::PI / 11.0).cos();
        assert!((p.eigenvalue(0).unwrap() - lam1 / 2.0).abs() < 1e-12);
    }
}
