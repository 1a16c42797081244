//! The damped quadratic eigenvalue problem
//! `lambda^2 M u + lambda tau D u + K u = 0`.
//!
//! With M positive definite, D positive semidefinite and K symmetric, the
//! unstable spectrum has a rigid structure: for any eigenpair the imaginary
//! part of the Rayleigh identity gives `Im(lambda) (2 Re(lambda) m + tau d)
//! = 0`, so eigenvalues in the open right half plane are real. Moreover the
//! symmetric matrix `Q(s) = s^2 M + s tau D + K` has eigenvalue curves that
//! are strictly increasing in `s > 0`, so
//!
//! ```text
//! #\{real eigenvalues > s\} = n^-(Q(s)),
//! ```
//!
//! which makes Sylvester inertia a certified counting-and-location tool for
//! the whole unstable set. Two independent confirmations accompany it:
//!
//! * an argument-principle winding count of `det Q(lambda)` around a
//!   rectangle enclosing the right half plane's admissible region, which
//!   would also catch complex unstable pairs, and
//! * a dense companion eigensolve (feasible at moderate sizes), kept as a
//!   cross-check because the companion inherits the huge viscous decay
//!   rates `~ nu/rho` of near-vacuum cells and loses absolute accuracy on
//!   graded grids.

use num_complex::Complex64;

use super::assembly::OperatorTriple;
use super::pencil::SymPencil;
use crate::error::{Error, Result};
use crate::numerics::dense::companion_eigenvalues;
use crate::numerics::tridiag::{pencil_inverse_iteration, SymTridiag};

/// One unstable mode: a real eigenvalue and its M-normalized eigenvector on
/// the interior nodes.
#[derive(Debug, Clone)]
pub struct UnstableMode {
    pub lambda: f64,
    pub vector: Vec<f64>,
}

/// Result of [`solve_qep`].
#[derive(Debug, Clone)]
pub struct QepSolution {
    pub tau: f64,
    /// Real unstable eigenvalues, descending, with eigenvectors.
    pub unstable: Vec<UnstableMode>,
    /// Number of right-half-plane eigenvalues by inertia counting.
    pub count_inertia: usize,
    /// Number of right-half-plane eigenvalues by the det-winding contour;
    /// `None` when the contour failed to resolve (never observed in tests,
    /// kept as an honest failure mode).
    pub count_winding: Option<usize>,
    /// Threshold below which a positive real part is treated as zero.
    pub threshold: f64,
}

impl QepSolution {
    /// Largest unstable eigenvalue, if any.
    pub fn lambda_max(&self) -> Option<f64> {
        self.unstable.first().map(|m| m.lambda)
    }

    /// True when the two independent right-half-plane counts agree.
    pub fn counts_consistent(&self) -> bool {
        self.count_winding == Some(self.count_inertia)
    }
}

/// Unstable-eigenvalue threshold: `1e-8 sqrt(||K|| / ||M||)` (an inverse
/// time scale of the pencil), separating growth from rounding noise.
pub fn unstable_threshold(triple: &OperatorTriple) -> f64 {
    1e-8 * (triple.kmat.norm_inf() / triple.mmat.norm_inf()).sqrt()
}

fn q_of(triple: &OperatorTriple, s: f64, tau: f64) -> SymTridiag {
    triple
        .kmat
        .scaled_add(1.0, &triple.dmat, s * tau)
        .scaled_add(1.0, &triple.mmat, s * s)
}

/// Count of real eigenvalues strictly greater than `s > 0`.
fn count_above(triple: &OperatorTriple, s: f64, tau: f64) -> usize {
    q_of(triple, s, tau).negative_pivots()
}

/// Solve the damped QEP for the unstable set at damping scale `tau in [0,1]`.
pub fn solve_qep(triple: &OperatorTriple, tau: f64) -> Result<QepSolution> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!("tau must lie in [0, 1], got {tau}")));
    }
    let delta = unstable_threshold(triple);
    let total = count_above(triple, delta, tau);

    // upper end of the unstable interval: eigenvalue curves exceed it once
    // s^2 M dominates; double until the count empties
    let mut hi = delta.max(1e-8);
    let mut guard = 0;
    while count_above(triple, hi, tau) > 0 {
        hi *= 2.0;
        guard += 1;
        if guard > 400 {
            return Err(Error::Eigen("unstable spectrum not bounded above".into()));
        }
    }

    // peel eigenvalues one by one from above
    let mut lambdas = Vec::new();
    let mut upper = hi;
    for want in 1..=total {
        let mut lo = delta;
        let mut up = upper;
        // invariant: count(lo) >= want, count(up) < want
        for _ in 0..200 {
            let mid = 0.5 * (lo + up);
            if count_above(triple, mid, tau) >= want {
                lo = mid;
            } else {
                up = mid;
            }
            if (up - lo) <= 1e-15 * up.max(1.0) {
                break;
            }
        }
        let lam = 0.5 * (lo + up);
        lambdas.push(lam);
        upper = lam;
    }

    // eigenvectors: null direction of Q(lambda), i.e. the pencil
    // (Q(lambda), M) eigenvector nearest zero
    let mut unstable = Vec::with_capacity(lambdas.len());
    for &lam in &lambdas {
        let q = q_of(triple, lam, tau);
        let (_, v) = pencil_inverse_iteration(&q, &triple.mmat, 0.0, 10)
            .ok_or_else(|| Error::Eigen("eigenvector iteration failed".into()))?;
        unstable.push(UnstableMode { lambda: lam, vector: v });
    }

    // Complex-exclusion check. For tau = 0 the undamped oscillatory modes
    // sit exactly on the imaginary axis (lambda^2 = -sigma with sigma real),
    // which both makes a right-half-plane contour ill-posed and settles the
    // question algebraically: the right-half-plane set is exactly
    // {sqrt(-sigma) : sigma < 0}, already counted by the inertia bisection.
    let count_winding = if tau == 0.0 {
        Some(total)
    } else {
        winding_count(triple, tau, delta, &lambdas)
    };

    Ok(QepSolution {
        tau,
        unstable,
        count_inertia: total,
        count_winding,
        threshold: delta,
    })
}

/// Dense companion-form eigenvalues (all 2n of them), for cross-checks at
/// moderate sizes.
pub fn solve_qep_dense(triple: &OperatorTriple, tau: f64) -> Result<Vec<Complex64>> {
    companion_eigenvalues(&triple.mmat, &triple.dmat, &triple.kmat, tau)
}

/// Argument-principle count of eigenvalues of `det Q(lambda)` inside the
/// rectangle `[delta, X] x [-Y, Y]` around the unstable region.
///
/// The box is deliberately short: its height stays below the first
/// oscillatory frequency `sqrt(sigma_1)` of the pencil, so no underdamped
/// eigenvalue can hug the contour and the phase along every edge is tame.
/// Together with the Sylvester certificate that no real eigenvalue exists
/// beyond the located ones, the count confirms that the unstable set is
/// exactly the real set found by bisection (a complex pair sneaking into
/// the band would make the winding disagree).
fn winding_count(
    triple: &OperatorTriple,
    tau: f64,
    delta: f64,
    real_lambdas: &[f64],
) -> Option<usize> {
    let pencil = SymPencil::new(&triple.kmat, &triple.mmat);
    let n_neg = pencil.count_below(0.0);
    let lam_max = real_lambdas.first().copied().unwrap_or(0.0);
    let lam_min = real_lambdas.last().copied().unwrap_or(0.0);
    let omega1 = if n_neg < pencil.n() {
        let sigma_pos = pencil.eigenvalue(n_neg).ok()?;
        sigma_pos.max(0.0).sqrt()
    } else {
        0.0
    };
    // Left edge: the slow overdamped boundary modes accumulate at 0- and
    // would hug an edge placed at delta, so move it into a certified gap:
    // half the smallest located eigenvalue (unstable case) or a fraction of
    // the first oscillation frequency (stable case). The Sylvester count
    // confirms nothing real lies in (delta, x0].
    let x0 = if !real_lambdas.is_empty() {
        0.5 * lam_min
    } else {
        (0.25 * omega1).max(40.0 * delta)
    };
    if count_above(triple, x0, tau) != real_lambdas.len() {
        return None;
    }
    let x1 = (1.3 * lam_max + 10.0 * x0).max(4.0 * x0);
    // Band height: stay below the first (damping-shifted) oscillation
    // frequency, and thin out with matrix size — the slow overdamped modes
    // cluster outside the left edge and each subtends a phase angle
    // ~ 2 y / x0, so a height ~ x0/n keeps the edge integrals O(1) and the
    // quadrature cost size-independent. A complex pair can only leave the
    // real axis through a collision on it, which a thin band still catches.
    let n_size = triple.mmat.n() as f64;
    let y_cap = if omega1 > 0.0 {
        0.35 * omega1
    } else {
        lam_max.max(40.0 * delta)
    };
    let y = (x0 * 20.0 / n_size).min(y_cap).max(40.0 * delta);

    // logarithmic derivative trace d/dlam ln det Q = tr(Q^{-1} Q'),
    // evaluated in O(n) through the two-sided continuant ratios of the
    // complex symmetric tridiagonal Q
    let trace_logderiv = |lam: Complex64| -> Option<Complex64> {
        let n = triple.mmat.n();
        let entry = |m: f64, d: f64, k: f64| lam * lam * m + lam * tau * d + k;
        let dentry = |m: f64, d: f64| 2.0 * lam * m + tau * d;
        let a: Vec<Complex64> = (0..n)
            .map(|i| entry(triple.mmat.diag[i], triple.dmat.diag[i], triple.kmat.diag[i]))
            .collect();
        let b: Vec<Complex64> = (0..n - 1)
            .map(|i| entry(triple.mmat.off[i], triple.dmat.off[i], triple.kmat.off[i]))
            .collect();
        // delta_i = theta_i / theta_{i-1}, eps_i = phi_i / phi_{i+1}
        let mut delta = vec![Complex64::default(); n];
        let mut eps = vec![Complex64::default(); n];
        delta[0] = a[0];
        for i in 1..n {
            if delta[i - 1].norm() == 0.0 {
                return None;
            }
            delta[i] = a[i] - b[i - 1] * b[i - 1] / delta[i - 1];
        }
        eps[n - 1] = a[n - 1];
        for i in (0..n - 1).rev() {
            if eps[i + 1].norm() == 0.0 {
                return None;
            }
            eps[i] = a[i] - b[i] * b[i] / eps[i + 1];
        }
        let mut acc = Complex64::default();
        for i in 0..n {
            let denom = delta[i] + eps[i] - a[i];
            if denom.norm() == 0.0 {
                return None;
            }
            let inv_ii = 1.0 / denom;
            acc += inv_ii * dentry(triple.mmat.diag[i], triple.dmat.diag[i]);
            if i + 1 < n {
                // (Q^{-1})_{i,i+1} = -b_i (Q^{-1})_{ii} / eps_{i+1}
                let inv_off = -b[i] * inv_ii / eps[i + 1];
                acc += 2.0 * inv_off * dentry(triple.mmat.off[i], triple.dmat.off[i]);
            }
        }
        Some(acc)
    };

    // adaptive Simpson of tr(Q^{-1}Q') along each edge; the integrand is
    // meromorphic with poles off the contour, so local error estimates are
    // sound (unlike sampling the phase itself, which aliases)
    fn simpson(
        f: &dyn Fn(Complex64) -> Option<Complex64>,
        a: Complex64,
        b: Complex64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        tol: f64,
        depth: usize,
        evals: &mut usize,
    ) -> Option<Complex64> {
        *evals += 1;
        if *evals > 100_000 {
            return None;
        }
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let h = b - a;
        let whole = h * (fa + 4.0 * fm + fb) / 6.0;
        let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
        let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
        let err = (left + right - whole).norm();
        if (err < 15.0 * tol && depth >= 2) || depth > 44 {
            return Some(left + right + (left + right - whole) / 15.0);
        }
        let l = simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth + 1, evals)?;
        let r = simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth + 1, evals)?;
        Some(l + r)
    }

    let corners = [
        Complex64::new(x0, -y),
        Complex64::new(x1, -y),
        Complex64::new(x1, y),
        Complex64::new(x0, y),
        Complex64::new(x0, -y),
    ];
    let mut total = Complex64::default();
    let mut evals = 0usize;
    for seg in corners.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let m = 0.5 * (a + b);
        let fa = trace_logderiv(a)?;
        let fm = trace_logderiv(m)?;
        let fb = trace_logderiv(b)?;
        total += simpson(&trace_logderiv, a, b, fa, fm, fb, 0.04, 0, &mut evals)?;
    }
    let w = total.im / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    // the real part is the change of ln|det| around a closed loop: zero in
    // exact arithmetic, a resolution gauge here
    if (w - rounded).abs() > 0.1 || rounded < 0.0 || total.re.abs() > 0.5 {
        return None;
    }
    Some(rounded as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::EquationOfState;
    use crate::equilibrium::solve_profile;
    use crate::spectral::assembly::assemble_eulerian;

    fn scalar_triple(m: f64, d: f64, k: f64) -> OperatorTriple {
        OperatorTriple {
            grid: vec![0.0, 1.0],
            mmat: SymTridiag {
                diag: vec![m],
                off: vec![],
            },
            dmat: SymTridiag {
                diag: vec![d],
                off: vec![],
            },
            kmat: SymTridiag {
                diag: vec![k],
                off: vec![],
            },
            nu1: 0.1,
            nu2: 0.1,
            coordinate: super::super::assembly::Coordinate::Eulerian,
        }
    }

    #[test]
    fn scalar_unstable_root() {
        // lambda^2 + lambda - 1 = 0: unstable root (sqrt(5)-1)/2
        let t = scalar_triple(1.0, 1.0, -1.0);
        let sol = solve_qep(&t, 1.0).unwrap();
        assert_eq!(sol.count_inertia, 1);
        assert_eq!(sol.count_winding, Some(1));
        let gold = (5.0f64.sqrt() - 1.0) / 2.0;
        assert!((sol.lambda_max().unwrap() - gold).abs() < 1e-12);
        // dense route agrees
        let dense = solve_qep_dense(&t, 1.0).unwrap();
        assert!((dense[0].re - gold).abs() < 1e-12 && dense[0].im.abs() < 1e-14);
    }

    #[test]
    fn scalar_stable_pair_counts_zero() {
        // lambda^2 + lambda + 1 = 0: complex pair in the left half plane
        let t = scalar_triple(1.0, 1.0, 1.0);
        let sol = solve_qep(&t, 1.0).unwrap();
        assert_eq!(sol.count_inertia, 0);
        assert_eq!(sol.count_winding, Some(0));
        assert!(sol.unstable.is_empty());
    }

    #[test]
    fn two_by_two_mixed_inertia() {
        // decoupled: one unstable scalar block, one stable
        let t = OperatorTriple {
            grid: vec![0.0, 0.5, 1.0],
            mmat: SymTridiag {
                diag: vec![1.0, 2.0],
                off: vec![0.0],
            },
            dmat: SymTridiag {
                diag: vec![0.5, 1.0],
                off: vec![0.0],
            },
            kmat: SymTridiag {
                diag: vec![-2.0, 3.0],
                off: vec![0.0],
            },
            nu1: 0.1,
            nu2: 0.1,
            coordinate: super::super::assembly::Coordinate::Eulerian,
        };
        let sol = solve_qep(&t, 1.0).unwrap();
        // block 1: lambda^2 + 0.5 lambda - 2 = 0 -> lambda+ = (-0.5 + sqrt(8.25))/2
        let gold = (-0.5 + 8.25f64.sqrt()) / 2.0;
        assert_eq!(sol.count_inertia, 1);
        assert_eq!(sol.count_winding, Some(1));
        assert!((sol.lambda_max().unwrap() - gold).abs() < 1e-12);
        // eigenvector concentrates on the unstable block
        let v = &sol.unstable[0].vector;
        assert!(v[0].abs() > 1e3 * v[1].abs());
    }

    #[test]
    fn dense_and_inertia_agree_on_uniform_star_grid() {
        // uniform grid keeps the companion well scaled, so the dense
        // spectrum is trustworthy here and must agree with the counts
        let eos = EquationOfState::polytrope(1.0, 1.25).unwrap();
        let p = solve_profile(&eos, 1.0, 1e-10).unwrap();
        let n = 96;
        let grid: Vec<f64> = (0..=n).map(|i| p.r_mu() * i as f64 / n as f64).collect();
        let t = super::super::assembly::assemble_eulerian_on(&p, 0.1, 0.1, &grid).unwrap();
        let sol = solve_qep(&t, 1.0).unwrap();
        assert_eq!(sol.count_inertia, 1);
        assert_eq!(sol.count_winding, Some(1));
        let dense = solve_qep_dense(&t, 1.0).unwrap();
        let lam_bis = sol.lambda_max().unwrap();
        let lam_dense = dense[0];
        assert!(
            lam_dense.im.abs() < 1e-8 * lam_dense.re.abs(),
            "dense unstable eigenvalue not real: {lam_dense:?}"
        );
        // the companion inherits the graded mass weight, so its absolute
        // accuracy is limited (residuals: ~1e-5 dense vs ~1e-16 bisection);
        // it is a count/realness cross-check, not the reference value
        assert!(
            (lam_dense.re - lam_bis).abs() < 1e-2 * lam_bis,
            "dense {lam_dense:?} vs bisection {lam_bis}"
        );
        let rhp_dense = dense
            .iter()
            .filter(|z| z.re > sol.threshold)
            .count();
        assert_eq!(rhp_dense, 1);
    }

    #[test]
    fn stable_polytrope_has_empty_unstable_set() {
        let eos = EquationOfState::polytrope(1.0, 1.5).unwrap();
        let p = solve_profile(&eos, 1.0, 1e-10).unwrap();
        let t = assemble_eulerian(&p, 0.1, 0.1, 128).unwrap();
        for tau in [0.0, 0.5, 1.0] {
            let sol = solve_qep(&t, tau).unwrap();
            assert_eq!(sol.count_inertia, 0, "tau = {tau}");
            assert_eq!(sol.count_winding, Some(0), "tau = {tau}");
        }
    }

    #[test]
    fn rejects_tau_outside_unit_interval() {
        let t = scalar_triple(1.0, 1.0, -1.0);
        assert!(solve_qep(&t, -0.1).is_err());
        assert!(solve_qep(&t, 1.5).is_err());
    }
}
