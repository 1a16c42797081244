//! Nonlinear free-boundary evolution in Lagrangian particle coordinates.
//!
//! The reference coordinate is the equilibrium radius `x in [0, R]` on the
//! uniform grid `x_n = n h`, `h = R/N`; the unknowns are the moving radii
//! `r_n(t)` and velocities `v_n(t)` with `r_0 = 0`, `v_0 = 0`. The interior
//! update is a conservative flux-difference scheme that is exactly
//! well-balanced: at `r = x`, `v = 0` every flux difference cancels in
//! floating point, so the equilibrium is a machine-precision fixed point.
//!
//! The free surface is closed by the zero-stress condition, which integrates
//! exactly to
//!
//! ```text
//! r_N = r_{N-1} + [r0(x_N) - r0(x_{N-1})] (r0(x_{N-1}) / r_{N-1})^beta,
//! beta = 2 nu2/nu - 4 nu1/(3 nu),
//! ```
//!
//! and `v_N` follows by differentiating the closure in time.

mod diag;
mod scheme;

pub use diag::{fit_decay, fit_growth, run, FitKind, FitResult, Row, RunConfig, RunStatus, TimeSeries};
pub use scheme::{discrete_energy, rhs, step};

use crate::eos::EquationOfState;
use crate::equilibrium::StarProfile;
use crate::error::{Error, Result};
use crate::spectral::{assemble_eulerian, solve_qep};

/// Initial perturbation of the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    /// `r0(x) = x (1 + a sin(k pi x / R))`, zero initial velocity.
    Displacement { amplitude: f64, mode: u32 },
    /// `v0(x) = a x`, unperturbed radii.
    Velocity { amplitude: f64 },
    /// Velocity seeded with the most unstable discrete eigenvector,
    /// scaled so that the initial kinetic energy amplitude
    /// `sqrt(E0_v)` equals `a`.
    Eigenmode { amplitude: f64 },
}

/// Lagrangian grid state.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    /// Cell count N; arrays run over nodes 0..=N.
    pub n: usize,
    /// Reference spacing h = R/N.
    pub h: f64,
    /// Reference radii x_n = n h.
    pub x: Vec<f64>,
    /// Stored floating-point cell widths x_{n+1} - x_n; using these instead
    /// of the symbol h inside flux ratios is what makes the rest state an
    /// exact fixed point.
    pub dx: Vec<f64>,
    /// Equilibrium density at the reference nodes; rho[N] = 0.
    pub rho_ref: Vec<f64>,
    /// Equilibrium pressure at the reference nodes.
    pub p_ref: Vec<f64>,
    /// P'(rho_ref) at the reference nodes (diagnostics weight).
    pub p_prime_ref: Vec<f64>,
    /// Pressure gradient q_n = dP(rho_mu)/dx (x_n) = -rho_n m(x_n)/x_n^2.
    pub q: Vec<f64>,
    /// Shell masses m(x_{n+1}) - m(x_n) (diagnostics weight).
    pub dm: Vec<f64>,
    /// Moving radii r_n(t).
    pub r: Vec<f64>,
    /// Velocities v_n(t); v[0] = 0, v[N] is the differentiated closure.
    pub v: Vec<f64>,
    /// Initial radii r0(x_n), entering the boundary closure for all time.
    pub r0: Vec<f64>,
    pub nu1: f64,
    pub nu2: f64,
    /// Near-vacuum exponent of the equation of state (weights in E_N).
    pub gamma1: f64,
    pub(crate) eos: EquationOfState,
    /// r0(x_N) - r0(x_{N-1}), frozen at initialization.
    pub(crate) d0: f64,
}

impl SimState {
    /// Effective viscosity nu = 4/3 nu1 + nu2.
    pub fn nu(&self) -> f64 {
        4.0 / 3.0 * self.nu1 + self.nu2
    }

    /// Closure exponent beta = 2 nu2/nu - 4 nu1/(3 nu).
    pub fn beta(&self) -> f64 {
        (2.0 * self.nu2 - 4.0 / 3.0 * self.nu1) / self.nu()
    }

    /// Boundary radius demanded by the zero-stress closure for the current
    /// interior state.
    pub fn closure_radius(&self) -> f64 {
        let nm1 = self.n - 1;
        self.r[nm1] + self.d0 * (self.r0[nm1] / self.r[nm1]).powf(self.beta())
    }

    /// Boundary velocity from the differentiated closure.
    pub fn closure_velocity(&self) -> f64 {
        let nm1 = self.n - 1;
        let beta = self.beta();
        self.v[nm1]
            * (1.0 - beta * self.d0 * (self.r0[nm1] / self.r[nm1]).powf(beta) / self.r[nm1])
    }

    /// sup_n |r_n - x_n|.
    pub fn sup_r_err(&self) -> f64 {
        self.r
            .iter()
            .zip(&self.x)
            .map(|(r, x)| (r - x).abs())
            .fold(0.0, f64::max)
    }

    /// sup_n |v_n|.
    pub fn sup_v(&self) -> f64 {
        self.v.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// sup over cells of |(r_n - r_{n-1})/(x_n - x_{n-1}) - 1| (the
    /// discrete |r_x - 1|, the epsilon_1 smallness monitor).
    pub fn sup_rx_dev(&self) -> f64 {
        (1..=self.n)
            .map(|k| ((self.r[k] - self.r[k - 1]) / self.dx[k - 1] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// sup over cells of |(v_n - v_{n-1})/(x_n - x_{n-1})| (the discrete
    /// |v_x|, the epsilon_2 smallness monitor).
    pub fn sup_vx(&self) -> f64 {
        (1..=self.n)
            .map(|k| ((self.v[k] - self.v[k - 1]) / self.dx[k - 1]).abs())
            .fold(0.0, f64::max)
    }

    /// Lagrangian cell density f = x^2 rho_mu dx / (r^2 dr) on cell
    /// `k in 1..=N` (between nodes k-1 and k), the discrete (mass-exact)
    /// density; equals rho_ref[k] at the rest state.
    pub fn cell_density(&self, k: usize) -> f64 {
        debug_assert!((1..=self.n).contains(&k));
        let dr = self.r[k] - self.r[k - 1];
        if k == 1 {
            // center cell: x_0 = r_0 = 0; the symmetric limit of x^2/r^2 is
            // (x_1/r_1)^2
            let ratio = self.x[1] / self.r[1];
            self.rho_ref[1] * ratio * ratio * (self.dx[0] / dr)
        } else {
            let ratio = self.x[k - 1] / self.r[k - 1];
            self.rho_ref[k] * ratio * ratio * (self.dx[k - 1] / dr)
        }
    }

    /// Mass-coordinate perturbation energies
    /// `E0_sigma = 1/2 int P'(rho)/(1 + s) s^2 dm`, `s = sigma/rho`, and
    /// `E0_v = 1/2 int v^2 dm` (trapezoid in the shell masses).
    pub fn e0_energies(&self) -> (f64, f64) {
        let mut e_sigma = 0.0;
        let mut e_v = 0.0;
        for k in 1..=self.n {
            e_v += 0.5 * self.dm[k - 1] * 0.5
                * (self.v[k - 1] * self.v[k - 1] + self.v[k] * self.v[k]);
            if self.rho_ref[k] > 0.0 {
                let s = self.cell_density(k) / self.rho_ref[k] - 1.0;
                let denom = 1.0 + s;
                if denom > 0.0 {
                    e_sigma += 0.5 * self.dm[k - 1] * self.p_prime_ref[k] / denom * s * s;
                }
            }
        }
        (e_sigma, e_v)
    }
}

/// Build the initial state for a run.
pub fn init_sim(
    profile: &StarProfile,
    n: usize,
    nu1: f64,
    nu2: f64,
    perturbation: Perturbation,
) -> Result<SimState> {
    if n < 32 {
        return Err(Error::Config("N must be at least 32".into()));
    }
    if !(nu1 > 0.0 && nu2 > 0.0) {
        return Err(Error::Config("viscosities must be positive".into()));
    }
    let r_mu = profile.r_mu();
    let h = r_mu / n as f64;
    let x: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mut x = x;
    x[n] = r_mu;
    let dx: Vec<f64> = (0..n).map(|i| x[i + 1] - x[i]).collect();

    let mut rho_ref = Vec::with_capacity(n + 1);
    let mut p_ref = Vec::with_capacity(n + 1);
    let mut p_prime_ref = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    let mut m_nodes = Vec::with_capacity(n + 1);
    for (i, &xi) in x.iter().enumerate() {
        let s = profile.query(xi)?;
        rho_ref.push(s.rho);
        p_ref.push(s.p);
        p_prime_ref.push(s.p_prime);
        m_nodes.push(s.m);
        q.push(if i == 0 {
            0.0
        } else {
            -s.rho * s.m / (xi * xi)
        });
    }
    let dm: Vec<f64> = (0..n).map(|i| m_nodes[i + 1] - m_nodes[i]).collect();

    // initial data
    let (r0, v): (Vec<f64>, Vec<f64>) = match perturbation {
        Perturbation::Displacement { amplitude, mode } => {
            if mode == 0 {
                return Err(Error::Config("displacement mode must be >= 1".into()));
            }
            let r0: Vec<f64> = x
                .iter()
                .map(|&xi| {
                    xi * (1.0
                        + amplitude * (mode as f64 * std::f64::consts::PI * xi / r_mu).sin())
                })
                .collect();
            (r0, vec![0.0; n + 1])
        }
        Perturbation::Velocity { amplitude } => {
            let v: Vec<f64> = x.iter().map(|&xi| amplitude * xi).collect();
            (x.clone(), v)
        }
        Perturbation::Eigenmode { .. } => {
            let triple = assemble_eulerian(profile, nu1, nu2, n)?;
            let sol = solve_qep(&triple, 1.0)?;
            let mode = sol.unstable.first().ok_or_else(|| {
                Error::Config("eigenmode seeding requires an unstable configuration".into())
            })?;
            // nodal values live on the cosine spectral grid (interior
            // nodes); interpolate linearly onto the uniform grid
            let sg = &triple.grid;
            let mut full = vec![0.0; sg.len()];
            full[1..].copy_from_slice(&mode.vector);
            let mut v = vec![0.0; n + 1];
            for (i, &xi) in x.iter().enumerate() {
                let j = sg.partition_point(|&g| g <= xi).clamp(1, sg.len() - 1);
                let (g0, g1) = (sg[j - 1], sg[j]);
                let w = ((xi - g0) / (g1 - g0)).clamp(0.0, 1.0);
                v[i] = full[j - 1] * (1.0 - w) + full[j] * w;
            }
            (x.clone(), v)
        }
    };

    for k in 1..=n {
        if r0[k] <= r0[k - 1] {
            return Err(Error::Config(format!(
                "perturbation breaks monotonicity of r0 at node {k}"
            )));
        }
    }

    let d0 = r0[n] - r0[n - 1];
    let mut state = SimState {
        t: 0.0,
        n,
        h,
        x,
        dx,
        rho_ref,
        p_ref,
        p_prime_ref,
        q,
        dm,
        r: r0.clone(),
        v,
        r0,
        nu1,
        nu2,
        gamma1: profile.eos().gamma1(),
        eos: *profile.eos(),
        d0,
    };
    // the boundary node follows the closure from the start
    state.r[n] = state.closure_radius();
    state.v[0] = 0.0;
    state.v[n] = state.closure_velocity();

    // eigenmode scaling: sqrt(E0_v) = amplitude
    if let Perturbation::Eigenmode { amplitude } = perturbation {
        let (_, e_v) = state.e0_energies();
        if e_v <= 0.0 {
            return Err(Error::Config("eigenmode has zero kinetic energy".into()));
        }
        let scale = amplitude / e_v.sqrt();
        for vi in state.v.iter_mut() {
            *vi *= scale;
        }
    }
    Ok(state)
}
