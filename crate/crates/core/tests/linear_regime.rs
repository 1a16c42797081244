//! Small-amplitude consistency between the nonlinear scheme and the
//! linearized evolution, plus the scheme's convergence toward the spectral
//! growth rate.

use starspec_core::numerics::tridiag::{Tridiag, TridiagLu};
use starspec_core::simulator::Row;
use starspec_core::*;

/// Trapezoidal linear evolution on an explicit grid, tracking sup|u|.
fn linear_sup_trajectory(
    triple: &OperatorTriple,
    u0: Vec<f64>,
    v0: Vec<f64>,
    tmax: f64,
    dt: f64,
    record_every: usize,
) -> Vec<f64> {
    let a_plus = triple
        .mmat
        .scaled_add(1.0, &triple.dmat, 0.5 * dt)
        .scaled_add(1.0, &triple.kmat, 0.25 * dt * dt);
    let a_minus = triple
        .mmat
        .scaled_add(1.0, &triple.dmat, -0.5 * dt)
        .scaled_add(1.0, &triple.kmat, -0.25 * dt * dt);
    let lu = TridiagLu::factor(&Tridiag::from_sym(&a_plus)).unwrap();
    let mut u = u0;
    let mut v = v0;
    let mut sup = vec![0.0f64];
    for step in 1..=(tmax / dt).round() as usize {
        let mut rhs_vec = a_minus.matvec(&v);
        let ku = triple.kmat.matvec(&u);
        for i in 0..u.len() {
            rhs_vec[i] -= dt * ku[i];
        }
        let v_new = lu.solve(&rhs_vec);
        for i in 0..u.len() {
            u[i] += 0.5 * dt * (v[i] + v_new[i]);
        }
        v = v_new;
        if step % record_every == 0 {
            sup.push(u.iter().map(|x| x.abs()).fold(0.0, f64::max));
        }
    }
    sup
}

/// Stable case: the simulator's sup|r - x| trajectory matches the linear
/// solver on the same uniform grid within 5% over a decade of decay, for a
/// small velocity kick. The two discretizations differ at first order in
/// the cell width, so the comparison runs at a resolution where that gap
/// is inside the tolerance.
#[test]
fn stable_trajectory_matches_linear_solver() {
    let eos = EquationOfState::polytrope(1.0, 1.5).unwrap();
    let p = solve_profile(&eos, 1.0, 1e-10).unwrap();
    let n = 1600usize;
    let a = 1e-6;
    let dt = 2.5e-4;
    let tmax = 16.0;
    let cfg = RunConfig::new(n, 0.1, 0.1, Perturbation::Velocity { amplitude: a }, tmax, dt);
    let ts = run(&p, &cfg).unwrap();
    assert_eq!(ts.status, RunStatus::Completed);

    let grid: Vec<f64> = (0..=n).map(|i| p.r_mu() * i as f64 / n as f64).collect();
    let triple = assemble_eulerian_on(&p, 0.1, 0.1, &grid).unwrap();
    let v0: Vec<f64> = grid[1..].iter().map(|&r| a * r).collect();
    let record_every = ((0.1 / dt).round() as usize).max(1);
    let fem = linear_sup_trajectory(&triple, vec![0.0; triple.n()], v0, tmax, dt, record_every);

    let peak = ts
        .rows
        .iter()
        .map(|r| r.sup_r_err)
        .fold(0.0f64, f64::max);
    let mut worst: f64 = 0.0;
    for (k, row) in ts.rows.iter().enumerate() {
        if k == 0 || k >= fem.len() {
            continue;
        }
        // compare until the signal has decayed by one decade
        if row.sup_r_err < 0.1 * peak {
            break;
        }
        if row.t < 0.5 {
            continue; // skip the impulsive start where sup is near zero
        }
        worst = worst.max((row.sup_r_err - fem[k]).abs() / fem[k]);
    }
    assert!(
        worst <= 0.05,
        "simulator and linear solver disagree by {worst:.4} within the first decade"
    );
}

/// Unstable case: the simulator reproduces the growth rate of its own
/// linearization to well under a percent, and the gap to the spectral
/// eigenvalue shrinks at first order in the cell width.
#[test]
fn growth_rate_converges_to_spectral_eigenvalue() {
    let eos = EquationOfState::polytrope(1.0, 1.25).unwrap();
    let p = solve_profile(&eos, 1.0, 1e-10).unwrap();
    let a = 1e-8;
    let amp = |r: &Row| (r.e0_sigma + r.e0_v).sqrt();
    let mut gaps = Vec::new();
    for n in [200usize, 400] {
        let triple = assemble_eulerian(&p, 0.1, 0.1, n).unwrap();
        let lam_fem = solve_qep(&triple, 1.0).unwrap().lambda_max().unwrap();
        let cfg = RunConfig::new(n, 0.1, 0.1, Perturbation::Eigenmode { amplitude: a }, 120.0, 1e-3);
        let ts = run(&p, &cfg).unwrap();
        let t_lo = ts
            .rows
            .iter()
            .find(|r| amp(r) >= 4.0 * a)
            .map(|r| r.t)
            .unwrap();
        let fit = fit_growth(&ts, (t_lo, 120.0)).unwrap();
        gaps.push((fit.value - lam_fem).abs());
        assert!(fit.rms_residual < 1e-3, "non-exponential window at n = {n}");
    }
    // first-order convergence: halving the cell width about halves the gap
    let ratio = gaps[0] / gaps[1];
    assert!(
        ratio > 1.6 && ratio < 2.6,
        "rate gap should shrink at first order, got {gaps:?}"
    );
}
