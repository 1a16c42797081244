//! Inertia counting, the inviscid spectrum, and the full consistency battery
//! tying the unstable-mode counts together.

use super::assembly::OperatorTriple;
use super::pencil::SymPencil;
use super::qep::{solve_qep, unstable_threshold, QepSolution, UnstableMode};
use crate::equilibrium::StarProfile;
use crate::error::{Error, Result};
use crate::numerics::dense::{ldlt_negative_count, sym_negative_count, sym_tridiag_to_mat};

/// Negative-direction count of the stiffness form plus the kernel margin of
/// the (K, M) pencil.
#[derive(Debug, Clone, Copy)]
pub struct Inertia {
    pub n_minus: usize,
    /// Smallest |pencil eigenvalue|; values below `1e-8 ||K||` flag the
    /// degenerate case (a mass extremum, where the count may jump).
    pub ker_margin: f64,
    /// ||K|| (infinity norm), the scale the margin is judged against.
    pub k_norm: f64,
}

impl Inertia {
    pub fn is_degenerate(&self) -> bool {
        self.ker_margin < 1e-8 * self.k_norm
    }
}

/// Count n^-(K) by Sylvester inertia (negative LDL^T pivots); the count is
/// valid for the pencil because M is positive definite. Falls back to a
/// dense symmetric eigensolve when a pivot is too small to classify.
pub fn inertia_nminus(triple: &OperatorTriple) -> Result<Inertia> {
    let n_minus = match triple.kmat.negative_pivots_checked() {
        Some(c) => c,
        None => {
            let dense = sym_tridiag_to_mat(&triple.kmat);
            match ldlt_negative_count(&dense) {
                Some(c) => c,
                None => sym_negative_count(&dense)?,
            }
        }
    };
    let pencil = SymPencil::new(&triple.kmat, &triple.mmat);
    Ok(Inertia {
        n_minus,
        ker_margin: pencil.kernel_margin()?,
        k_norm: triple.kmat.norm_inf(),
    })
}

/// Unstable spectrum of the inviscid (tau = 0) problem: for each negative
/// pencil eigenvalue `sigma` of (K, M), an unstable growth rate
/// `lambda = sqrt(-sigma)`. Sorted descending in lambda.
pub fn euler_poisson_spectrum(triple: &OperatorTriple) -> Result<Vec<UnstableMode>> {
    let pencil = SymPencil::new(&triple.kmat, &triple.mmat);
    let n_minus = pencil.count_below(0.0);
    let mut out = Vec::with_capacity(n_minus);
    for idx in 0..n_minus {
        let sigma = pencil.eigenvalue(idx)?;
        let (sigma_ref, vector) = pencil.eigenvector_near(sigma)?;
        let s = if sigma_ref < 0.0 { sigma_ref } else { sigma };
        out.push(UnstableMode {
            lambda: (-s).max(0.0).sqrt(),
            vector,
        });
    }
    out.sort_by(|a, b| b.lambda.partial_cmp(&a.lambda).unwrap());
    Ok(out)
}

/// Verification record for one configuration.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub mu: f64,
    pub n_cells: usize,
    pub nu1: f64,
    pub nu2: f64,
    pub n_minus: usize,
    pub ker_margin: f64,
    /// Real unstable eigenvalues of the damped problem at the largest tau in
    /// the grid (the physical configuration), with eigenvectors.
    pub unstable: Vec<UnstableMode>,
    /// Unstable growth rates of the inviscid problem.
    pub ep_unstable: Vec<UnstableMode>,
    /// (tau, unstable count) along the damping homotopy.
    pub homotopy_counts: Vec<(f64, usize)>,
    /// `Some(true)` when every count agrees; `None` when the kernel margin
    /// flags a degenerate configuration and the identity is indeterminate.
    pub ktc_verified: Option<bool>,
    /// Threshold below which a positive real part counts as zero.
    pub threshold: f64,
}

impl SpectrumReport {
    pub fn lambda_max(&self) -> Option<f64> {
        self.unstable.first().map(|m| m.lambda)
    }
}

/// Default damping homotopy grid.
pub const DEFAULT_TAU_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Run the full counting battery on one profile: inertia of K, the damped
/// unstable set along the tau grid, and the inviscid spectrum; the report's
/// `ktc_verified` is the conjunction of all count agreements.
pub fn verify_ktc(
    profile: &StarProfile,
    nu1: f64,
    nu2: f64,
    n_cells: usize,
    tau_grid: &[f64],
) -> Result<SpectrumReport> {
    if tau_grid.is_empty() {
        return Err(Error::Config("tau grid must be nonempty".into()));
    }
    let triple = super::assembly::assemble_eulerian(profile, nu1, nu2, n_cells)?;
    let inertia = inertia_nminus(&triple)?;
    let ep = euler_poisson_spectrum(&triple)?;

    let mut taus: Vec<f64> = tau_grid.to_vec();
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut homotopy = Vec::with_capacity(taus.len());
    let mut last: Option<QepSolution> = None;
    let mut counts_ok = true;
    for &tau in &taus {
        let sol = solve_qep(&triple, tau)?;
        counts_ok &= sol.counts_consistent();
        homotopy.push((tau, sol.count_inertia));
        last = Some(sol);
    }
    let last = last.expect("tau grid nonempty");

    let all_equal = homotopy.iter().all(|&(_, c)| c == inertia.n_minus)
        && ep.len() == inertia.n_minus
        && last.unstable.len() == inertia.n_minus;
    let ktc_verified = if inertia.is_degenerate() {
        None
    } else {
        Some(all_equal && counts_ok)
    };

    Ok(SpectrumReport {
        mu: profile.mu(),
        n_cells,
        nu1,
        nu2,
        n_minus: inertia.n_minus,
        ker_margin: inertia.ker_margin,
        unstable: last.unstable,
        ep_unstable: ep,
        homotopy_counts: homotopy,
        ktc_verified,
        threshold: unstable_threshold(&triple),
    })
}
