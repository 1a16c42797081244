//! The interior update, the semi-implicit step, and the discrete energy.
//!
//! Acceleration of node `n` (1 <= n <= N-1):
//!
//! ```text
//! rho_n (x_n/r_n)^2 dv_n/dt =
//!     q_n (x_n^4/r_n^4 - 1)
//!   + (1/h) [ (P(rho_{n+1}) - P(f_{n+1})) - (P(rho_n) - P(f_n)) ]
//!   + (1/h) [ (B_{n+1} + 4 nu1 v_n/r_n) - (B_n + 4 nu1 v_{n-1}/r_{n-1}) ]
//! ```
//!
//! with the cell density `f_k = x_{k-1}^2 rho_k h / (r_{k-1}^2 (r_k -
//! r_{k-1}))` and the viscous flux `B_k = nu (v_k - v_{k-1})/(r_k - r_{k-1})
//! + (2 nu2 - 4 nu1/3) v_{k-1}/r_{k-1}`; the stress-free condition imposes
//! `B_N = 0`. Center quotients `v_0/r_0` and `x_0^2/r_0^2` are the symmetric
//! limits `v_1/r_1` and `(x_1/r_1)^2`.
//!
//! Every flux ratio is grouped so that it collapses to exactly 1.0 in
//! floating point at the rest state `r = x`, `v = 0`; the scheme then
//! returns an identically zero acceleration and the equilibrium is a
//! machine-precision fixed point of [`step`].

use super::SimState;
use crate::error::{Error, Result};
use crate::numerics::tridiag::{Tridiag, TridiagLu};

/// The flux coefficient written as `4 nu1` here appears with an undefined
/// symbol in one display of the source scheme; it is read as the shear
/// viscosity by consistency with the continuum flux decomposition.
fn four_nu1(state: &SimState) -> f64 {
    4.0 * state.nu1
}

fn check_monotone(state: &SimState) -> Result<()> {
    for k in 1..=state.n {
        if !(state.r[k] > state.r[k - 1]) {
            return Err(Error::ShellCrossing {
                t: state.t,
                cell: k,
            });
        }
    }
    Ok(())
}

/// Viscous fluxes B_1..B_{N-1} (B_N = 0 is the boundary condition).
fn viscous_fluxes(state: &SimState) -> Vec<f64> {
    let n = state.n;
    let nu = state.nu();
    let c2 = 2.0 * state.nu2 - 4.0 / 3.0 * state.nu1;
    let mut b = vec![0.0; n];
    for k in 1..n {
        let dr = state.r[k] - state.r[k - 1];
        let vr_prev = if k == 1 {
            state.v[1] / state.r[1]
        } else {
            state.v[k - 1] / state.r[k - 1]
        };
        b[k] = nu * (state.v[k] - state.v[k - 1]) / dr + c2 * vr_prev;
    }
    b
}

/// Pressure offsets P(rho_k) - P(f_k) for k = 1..=N, a flux that vanishes
/// identically at the rest state.
fn pressure_offsets(state: &SimState) -> Result<Vec<f64>> {
    let n = state.n;
    let mut dp = vec![0.0; n + 1];
    for k in 1..=n {
        if state.rho_ref[k] == 0.0 {
            // vacuum boundary node: both pressures are zero
            dp[k] = 0.0;
            continue;
        }
        let f_k = state.cell_density(k);
        dp[k] = state.p_ref[k] - state.eos.pressure(f_k.max(0.0))?;
    }
    Ok(dp)
}

/// Accelerations dv_n/dt for n = 1..N-1.
pub fn rhs(state: &SimState) -> Result<Vec<f64>> {
    check_monotone(state)?;
    let n = state.n;
    let h = state.h;
    let b = viscous_fluxes(state);
    let dp = pressure_offsets(state)?;
    let f41 = four_nu1(state);

    let mut acc = vec![0.0; n - 1];
    for nn in 1..n {
        let ratio = state.x[nn] / state.r[nn];
        let r2 = ratio * ratio;
        let weight = state.rho_ref[nn] * r2;
        let grav = state.q[nn] * (r2 * r2 - 1.0);
        // (1/h) [ (P(rho_{n+1}) - P(f_{n+1})) - (P(rho_n) - P(f_n)) ]
        let pressure = (dp[nn + 1] - dp[nn]) / h;
        let vr_n = state.v[nn] / state.r[nn];
        let vr_prev = if nn == 1 {
            state.v[1] / state.r[1]
        } else {
            state.v[nn - 1] / state.r[nn - 1]
        };
        let b_next = if nn + 1 < n { b[nn + 1] } else { 0.0 };
        let viscous = ((b_next + f41 * vr_n) - (b[nn] + f41 * vr_prev)) / h;
        acc[nn - 1] = (grav + pressure + viscous) / weight;
    }
    Ok(acc)
}

/// Tridiagonal coefficients of the viscous operator: row n of L such that
/// `viscous_n = (L v)_n` over the unknowns v_1..v_{N-1} at frozen radii.
fn viscous_matrix(state: &SimState) -> Tridiag {
    let n = state.n;
    let h = state.h;
    let nu = state.nu();
    let c2 = 2.0 * state.nu2 - 4.0 / 3.0 * state.nu1;
    let f41 = four_nu1(state);
    let m = n - 1;
    let mut sub = vec![0.0; m - 1];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m - 1];
    for nn in 1..n {
        let i = nn - 1;
        let dr_n = state.r[nn] - state.r[nn - 1];
        let mut d = -nu / (h * dr_n) + f41 / (h * state.r[nn]);
        if nn + 1 < n {
            let dr_np = state.r[nn + 1] - state.r[nn];
            d += -nu / (h * dr_np) + c2 / (h * state.r[nn]);
            sup[i] = nu / (h * dr_np);
        }
        if nn >= 2 {
            sub[i - 1] = nu / (h * dr_n) - (c2 + f41) / (h * state.r[nn - 1]);
        } else {
            // center limit: the v_0/r_0 quotients become v_1/r_1
            d += -(c2 + f41) / (h * state.r[1]);
        }
        diag[i] = d;
    }
    Tridiag { sub, diag, sup }
}

/// One semi-implicit step: radii to the midpoint, viscous fluxes by the
/// trapezoidal rule (tridiagonal solve), pressure and gravity explicit at
/// the midpoint, then radii to the endpoint.
pub fn step(state: &mut SimState, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let n = state.n;

    // midpoint radii
    let mut mid = state.clone();
    for k in 1..n {
        mid.r[k] = state.r[k] + 0.5 * dt * state.v[k];
    }
    mid.r[n] = mid.closure_radius();
    mid.t = state.t + 0.5 * dt;
    check_monotone(&mid)?;

    // explicit part at the midpoint: gravity + pressure
    let dp = pressure_offsets(&mid)?;
    let mut explicit = vec![0.0; n - 1];
    let mut weight = vec![0.0; n - 1];
    for nn in 1..n {
        let ratio = mid.x[nn] / mid.r[nn];
        let r2 = ratio * ratio;
        weight[nn - 1] = mid.rho_ref[nn] * r2;
        explicit[nn - 1] = mid.q[nn] * (r2 * r2 - 1.0) + (dp[nn + 1] - dp[nn]) / mid.h;
    }

    // trapezoidal viscous solve: (W/dt - L/2) v+ = (W/dt + L/2) v + explicit
    let l = viscous_matrix(&mid);
    let m = n - 1;
    let v_old: Vec<f64> = state.v[1..n].to_vec();
    let lv = l.matvec(&v_old);
    let mut rhs_vec = vec![0.0; m];
    for i in 0..m {
        rhs_vec[i] = weight[i] / dt * v_old[i] + 0.5 * lv[i] + explicit[i];
    }
    let a = Tridiag {
        sub: l.sub.iter().map(|s| -0.5 * s).collect(),
        diag: l
            .diag
            .iter()
            .zip(&weight)
            .map(|(d, w)| w / dt - 0.5 * d)
            .collect(),
        sup: l.sup.iter().map(|s| -0.5 * s).collect(),
    };
    let lu = TridiagLu::factor(&a).ok_or(Error::ShellCrossing {
        t: state.t,
        cell: usize::MAX,
    })?;
    let v_new = lu.solve(&rhs_vec);

    // endpoint radii with the trapezoidal velocity average
    for k in 1..n {
        state.r[k] += 0.5 * dt * (state.v[k] + v_new[k - 1]);
        state.v[k] = v_new[k - 1];
    }
    state.r[n] = state.closure_radius();
    state.v[n] = state.closure_velocity();
    state.t += dt;
    check_monotone(state)?;
    Ok(())
}

/// Discrete energy functional:
///
/// ```text
/// E_N = max_n [ |(r_n - r_{n-1})/h - 1|^2 + |(v_n - v_{n-1})/h|^2 ]
///     + h sum rho_n |dv_n/dt|^2
///     + h sum rho_n^{2 gamma - 1} [ |second difference of r / h^2|^2
///                                  + |(r_n/x_n - r_{n-1}/x_{n-1})/h|^2 ]
/// ```
///
/// with the accelerations taken from [`rhs`] and the center quotient
/// `r_0/x_0` read as its symmetric limit `r_1/x_1`.
pub fn discrete_energy(state: &SimState) -> Result<f64> {
    let n = state.n;
    let h = state.h;
    let acc = rhs(state)?;

    let mut max_term: f64 = 0.0;
    for k in 1..=n {
        let a = (state.r[k] - state.r[k - 1]) / h - 1.0;
        let b = (state.v[k] - state.v[k - 1]) / h;
        max_term = max_term.max(a * a + b * b);
    }
    let mut acc_term = 0.0;
    for k in 1..n {
        acc_term += state.rho_ref[k] * acc[k - 1] * acc[k - 1];
    }
    let mut grad_term = 0.0;
    let expo = 2.0 * state.gamma1 - 1.0;
    for k in 1..n {
        let d2 = (state.r[k + 1] - 2.0 * state.r[k] + state.r[k - 1]) / (h * h);
        let ratio_k = state.r[k] / state.x[k];
        let ratio_prev = if k == 1 {
            state.r[1] / state.x[1]
        } else {
            state.r[k - 1] / state.x[k - 1]
        };
        let dq = (ratio_k - ratio_prev) / h;
        grad_term += state.rho_ref[k].powf(expo) * (d2 * d2 + dq * dq);
    }
    Ok(max_term + h * acc_term + h * grad_term)
}
