//! Dense helpers over `faer`: inertia with an eigensolve fallback and the
//! companion-form eigenvalue solve used to cross-check the banded paths.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use super::tridiag::SymTridiag;
use crate::error::{Error, Result};

/// Negative-pivot count of an unpivoted dense LDL^T factorization.
/// Returns `None` when a pivot is too small to classify, in which case the
/// caller should fall back to a full symmetric eigensolve.
pub fn ldlt_negative_count(a: &Mat<f64>) -> Option<usize> {
    let n = a.nrows();
    let mut work = a.clone();
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| work[(i, j)].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut count = 0;
    for k in 0..n {
        let d = work[(k, k)];
        if d.abs() <= scale * 1e-13 {
            return None;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in k + 1..n {
            let l = work[(i, k)] / d;
            for j in k + 1..=i {
                let v = work[(i, j)] - l * work[(j, k)];
                work[(i, j)] = v;
                work[(j, i)] = v;
            }
        }
    }
    Some(count)
}

/// Expand a symmetric tridiagonal matrix into dense storage.
pub fn sym_tridiag_to_mat(t: &SymTridiag) -> Mat<f64> {
    let n = t.n();
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            t.diag[i]
        } else if i == j + 1 {
            t.off[j]
        } else if j == i + 1 {
            t.off[i]
        } else {
            0.0
        }
    })
}

/// Negative eigenvalue count via a full self-adjoint eigensolve.
pub fn sym_negative_count(a: &Mat<f64>) -> Result<usize> {
    let ev = a
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("self-adjoint eigensolve failed: {e:?}")))?;
    Ok(ev.iter().filter(|&&v| v < 0.0).count())
}

/// All eigenvalues of the damped pencil
/// `lambda^2 M + lambda tau D + K` via the dense companion form.
///
/// The pencil is reduced to a standard eigenproblem in the mass-scaled
/// variable: with S = diag(M_ii^{-1/2}), the scaled blocks are well
/// equilibrated and the companion reads [[0, I], [-Mr\Kr, -tau Mr\Dr]].
pub fn companion_eigenvalues(
    m: &SymTridiag,
    d: &SymTridiag,
    k: &SymTridiag,
    tau: f64,
) -> Result<Vec<Complex64>> {
    let n = m.n();
    let s: Vec<f64> = m.diag.iter().map(|&v| 1.0 / v.max(f64::MIN_POSITIVE).sqrt()).collect();
    let scal = |t: &SymTridiag| -> Mat<f64> {
        Mat::from_fn(n, n, |i, j| {
            let v = if i == j {
                t.diag[i]
            } else if i == j + 1 {
                t.off[j]
            } else if j == i + 1 {
                t.off[i]
            } else {
                0.0
            };
            v * s[i] * s[j]
        })
    };
    let ms = scal(m);
    let ds = scal(d);
    let ks = scal(k);
    let llt = ms
        .llt(faer::Side::Lower)
        .map_err(|_| Error::Eigen("mass matrix not positive definite".into()))?;
    let mk = llt.solve(&ks);
    let md = llt.solve(&ds);
    let mut c = Mat::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        c[(i, n + i)] = 1.0;
        for j in 0..n {
            c[(n + i, j)] = -mk[(i, j)];
            c[(n + i, n + j)] = -tau * md[(i, j)];
        }
    }
    let ev = c
        .eigenvalues()
        .map_err(|e| Error::Eigen(format!("companion eigensolve failed: {e:?}")))?;
    let mut out: Vec<Complex64> = ev.into_iter().map(|z| Complex64::new(z.re, z.im)).collect();
    out.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ldlt_counts_indefinite_matrix() {
        // diag(3, -2, 5) in a rotated basis keeps inertia (1 negative)
        let a = Mat::from_fn(3, 3, |i, j| {
            let d = [3.0, -2.0, 5.0];
            let q: [[f64; 3]; 3] = [
                [0.8, -0.6, 0.0],
                [0.6, 0.8, 0.0],
                [0.0, 0.0, 1.0],
            ];
            (0..3).map(|k| q[i][k] * d[k] * q[j][k]).sum()
        });
        assert_eq!(ldlt_negative_count(&a), Some(1));
        assert_eq!(sym_negative_count(&a).unwrap(), 1);
    }

    #[test]
    fn scalar_companion_roots() {
        // M = 1, D = 1, K = -1: lambda^2 + lambda - 1 = 0
        let one = SymTridiag {
            diag: vec![1.0],
            off: vec![],
        };
        let kneg = SymTridiag {
            diag: vec![-1.0],
            off: vec![],
        };
        let ev = companion_eigenvalues(&one, &one, &kneg, 1.0).unwrap();
        let gold = (5.0f64.sqrt() - 1.0) / 2.0;
        assert!((ev[0].re - gold).abs() < 1e-12 && ev[0].im.abs() < 1e-14);
    }
}
