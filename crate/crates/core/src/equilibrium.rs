//! Hydrostatic equilibria of self-gravitating barotropic gas spheres.
//!
//! With `G = 1` and the potential convention `lap V = 4 pi rho`, hydrostatic
//! balance integrates to an enthalpy equation: writing `H` for the specific
//! enthalpy and `m(r)` for the enclosed mass,
//!
//! ```text
//! dm/dr = 4 pi r^2 rho(H),      dH/dr = -m / r^2,
//! ```
//!
//! started from the center value `H(0) = enthalpy(mu)`. The support radius
//! `R` is the first zero of `H`; the density vanishes there like
//! `(R - r)^{1/(gamma1 - 1)}`.

use crate::eos::EquationOfState;
use crate::error::{Error, Result};
use crate::numerics::interp::CubicHermite;
use crate::numerics::rk::dopri5_step;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Options for [`solve_profile_with`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Relative tolerance of the adaptive integrator.
    pub tol: f64,
    /// Number of nodes of the graded output grid.
    pub grid_points: usize,
    /// Radius cap in units of `sqrt(H_c / mu)`; integration past this without
    /// the enthalpy reaching zero raises [`Error::NonCompactStar`].
    pub radius_cap: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            grid_points: 800,
            radius_cap: 1e4,
        }
    }
}

/// Radial equilibrium for one center density.
#[derive(Debug, Clone)]
pub struct StarProfile {
    eos: EquationOfState,
    mu: f64,
    r_mu: f64,
    mass: f64,
    grid: Vec<f64>,
    rho: Vec<f64>,
    drho: Vec<f64>,
    m: Vec<f64>,
    h: Vec<f64>,
    h_fit: CubicHermite,
    m_fit: CubicHermite,
}

/// Pointwise profile data returned by [`StarProfile::query`].
#[derive(Debug, Clone, Copy)]
pub struct ProfileSample {
    pub rho: f64,
    pub drho: f64,
    pub m: f64,
    pub h: f64,
    pub p: f64,
    pub p_prime: f64,
    pub phi2: f64,
}

impl StarProfile {
    pub fn eos(&self) -> &EquationOfState {
        &self.eos
    }

    /// Center density.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Support radius.
    pub fn r_mu(&self) -> f64 {
        self.r_mu
    }

    /// Total mass.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Graded radial nodes, `grid[0] = 0`, `grid[last] = r_mu`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn drho(&self) -> &[f64] {
        &self.drho
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Interpolated profile values at `0 <= r <= r_mu`.
    ///
    /// The enthalpy and enclosed mass are interpolated (they stay smooth up
    /// to the boundary); the density is recovered through the equation of
    /// state so that `rho` is exactly zero at `r = r_mu` and the
    /// near-boundary Holder behavior is inherited from the enthalpy rather
    /// than from polynomial interpolation. `drho` comes from hydrostatic
    /// balance, never from differencing.
    pub fn query(&self, r: f64) -> Result<ProfileSample> {
        if !(0.0..=self.r_mu).contains(&r) {
            return Err(Error::Domain(format!(
                "profile query at r = {r} outside [0, {}]",
                self.r_mu
            )));
        }
        if r == 0.0 {
            let p = self.eos.pressure(self.mu)?;
            return Ok(ProfileSample {
                rho: self.mu,
                drho: 0.0,
                m: 0.0,
                h: self.eos.enthalpy(self.mu)?,
                p,
                p_prime: self.eos.dpressure(self.mu)?,
                phi2: self.eos.phi2(self.mu)?,
            });
        }
        let h = if r == self.r_mu {
            0.0
        } else {
            self.h_fit.eval(r).max(0.0)
        };
        let m = if r == self.r_mu {
            self.mass
        } else {
            self.m_fit.eval(r).clamp(0.0, self.mass)
        };
        let rho = self.eos.rho_from_enthalpy(h)?;
        let (p, p_prime, phi2, drho) = if rho > 0.0 {
            let pp = self.eos.dpressure(rho)?;
            (
                self.eos.pressure(rho)?,
                pp,
                pp / rho,
                -rho * m / (r * r * pp),
            )
        } else {
            (0.0, 0.0, f64::INFINITY, 0.0)
        };
        Ok(ProfileSample {
            rho,
            drho,
            m,
            h,
            p,
            p_prime,
            phi2,
        })
    }

    /// Radius enclosing mass `x` (inverse of `m(r)`), `0 <= x <= mass`.
    pub fn radius_of_mass(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.mass).contains(&x) {
            return Err(Error::Domain(format!("enclosed mass {x} outside [0, M]")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        if x == self.mass {
            return Ok(self.r_mu);
        }
        // near the center m(r) = (4 pi / 3) mu r^3 to leading order and the
        // bracketing root find loses all relative accuracy; invert the
        // asymptotic instead
        if x < 1e-9 * self.mass {
            return Ok((3.0 * x / (FOUR_PI * self.mu)).cbrt());
        }
        let f = |r: f64| self.m_fit.eval(r) - x;
        let mut r = crate::numerics::roots::illinois(f, 0.0, self.r_mu, self.r_mu * 1e-13, 200);
        // Newton polish on the exact relation m'(r) = 4 pi r^2 rho
        for _ in 0..3 {
            let s = self.query(r.clamp(0.0, self.r_mu))?;
            let slope = FOUR_PI * r * r * s.rho;
            if slope <= 0.0 {
                break;
            }
            r -= (s.m - x) / slope;
            r = r.clamp(0.0, self.r_mu);
        }
        Ok(r)
    }
}

/// Solve the equilibrium for center density `mu` with default grid options.
pub fn solve_profile(eos: &EquationOfState, mu: f64, tol: f64) -> Result<StarProfile> {
    solve_profile_with(
        eos,
        mu,
        SolveOptions {
            tol,
            ..Default::default()
        },
    )
}

/// Solve the equilibrium with explicit options.
pub fn solve_profile_with(
    eos: &EquationOfState,
    mu: f64,
    opts: SolveOptions,
) -> Result<StarProfile> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    if opts.grid_points < 16 {
        return Err(Error::Config("grid_points must be at least 16".into()));
    }
    let tol = opts.tol.clamp(1e-14, 1e-4);
    let h_c = eos.enthalpy(mu)?;
    let len_scale = (h_c / mu).sqrt();
    let r_cap = opts.radius_cap * len_scale;

    // rho(H) extended by vacuum for H <= 0 so trial steps may overshoot
    let rho_of = |h: f64| -> f64 {
        if h <= 0.0 {
            0.0
        } else {
            eos.rho_from_enthalpy(h).unwrap_or(0.0)
        }
    };
    let rhs = |r: f64, y: &[f64; 2]| -> [f64; 2] {
        let rho = rho_of(y[1]);
        [FOUR_PI * r * r * rho, -y[0] / (r * r)]
    };

    // Center series start: the ODE has a removable singularity at r = 0 and
    // H = H_c - (2 pi / 3) mu r^2 is its exact second-order expansion.
    let r_start = 1e-4 * len_scale;
    let mut r = r_start;
    let mut y = [
        FOUR_PI / 3.0 * mu * r_start.powi(3),
        h_c - 2.0 * std::f64::consts::PI / 3.0 * mu * r_start * r_start,
    ];

    let mut nodes_r = vec![0.0, r];
    let mut nodes_m = vec![0.0, y[0]];
    let mut nodes_h = vec![h_c, y[1]];

    let max_step = 0.01 * len_scale;
    let mut step = 1e-2 * r_start;
    let atol_m = tol * mu * len_scale.powi(3);
    let atol_h = tol * h_c;

    let mut crossed = false;
    while !crossed {
        if r > r_cap {
            return Err(Error::NonCompactStar {
                mu,
                r_cap,
                h_at_cap: y[1],
            });
        }
        step = step.min(max_step);
        let (y_new, err) = dopri5_step(&rhs, r, &y, step);
        let e_m = err[0].abs() / (atol_m + tol * y[0].abs());
        let e_h = err[1].abs() / (atol_h + tol * y[1].abs().max(0.01 * h_c));
        let e = e_m.max(e_h).max(1e-30);
        if e > 1.0 {
            step *= (0.9 * e.powf(-0.2)).clamp(0.2, 1.0);
            continue;
        }
        if y_new[1] <= 0.0 {
            // Vacuum detection: bisection in the step width on the smooth
            // event function H, down to |H| <= 1e-12 H_c.
            let (mut lo, mut hi) = (0.0, step);
            let mut s_hit = step;
            let mut y_hit = y_new;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let (y_mid, _) = dopri5_step(&rhs, r, &y, mid);
                if y_mid[1] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                s_hit = mid;
                y_hit = y_mid;
                if y_mid[1].abs() <= 1e-12 * h_c {
                    break;
                }
                if (hi - lo) <= f64::EPSILON * step {
                    break;
                }
            }
            if y_hit[1].abs() > 1e-9 * h_c {
                return Err(Error::Tolerance(format!(
                    "vacuum bisection stalled with H = {:.3e}",
                    y_hit[1]
                )));
            }
            r += s_hit;
            y = y_hit;
            crossed = true;
        } else {
            r += step;
            y = y_new;
            step *= (0.9 * e.powf(-0.2)).clamp(0.2, 5.0);
        }
        nodes_r.push(r);
        nodes_m.push(y[0]);
        nodes_h.push(y[1].max(0.0));
    }

    let r_mu = r;
    let mass = y[0];
    *nodes_h.last_mut().unwrap() = 0.0;

    // Hermite interpolants with the exact ODE slopes at every node.
    let dm: Vec<f64> = nodes_r
        .iter()
        .zip(nodes_h.iter())
        .map(|(&ri, &hi)| FOUR_PI * ri * ri * rho_of(hi))
        .collect();
    let dh: Vec<f64> = nodes_r
        .iter()
        .zip(nodes_m.iter())
        .map(|(&ri, &mi)| if ri == 0.0 { 0.0 } else { -mi / (ri * ri) })
        .collect();
    let h_fit = CubicHermite::with_slopes(nodes_r.clone(), nodes_h, dh);
    let m_fit = CubicHermite::with_slopes(nodes_r, nodes_m, dm);

    // Cosine-clustered output grid: dense near both the center and the
    // vacuum boundary, where downstream quadrature needs resolution.
    let n = opts.grid_points;
    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let xi = i as f64 / (n - 1) as f64;
        grid.push(r_mu * 0.5 * (1.0 - (std::f64::consts::PI * xi).cos()));
    }
    grid[0] = 0.0;
    *grid.last_mut().unwrap() = r_mu;

    let mut rho_g = Vec::with_capacity(n);
    let mut drho_g = Vec::with_capacity(n);
    let mut m_g = Vec::with_capacity(n);
    let mut h_g = Vec::with_capacity(n);
    for (i, &ri) in grid.iter().enumerate() {
        let (hi, mi) = if i == 0 {
            (h_c, 0.0)
        } else if i == n - 1 {
            (0.0, mass)
        } else {
            (h_fit.eval(ri).max(0.0), m_fit.eval(ri).clamp(0.0, mass))
        };
        let rho_i = eos.rho_from_enthalpy(hi)?;
        let drho_i = if i == 0 || rho_i == 0.0 {
            0.0
        } else {
            -rho_i * mi / (ri * ri * eos.dpressure(rho_i)?)
        };
        rho_g.push(rho_i);
        drho_g.push(drho_i);
        m_g.push(mi);
        h_g.push(hi);
    }

    Ok(StarProfile {
        eos: *eos,
        mu,
        r_mu,
        mass,
        grid,
        rho: rho_g,
        drho: drho_g,
        m: m_g,
        h: h_g,
        h_fit,
        m_fit,
    })
}
