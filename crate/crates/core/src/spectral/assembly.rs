//! Galerkin assembly of the mass, damping and stiffness forms on
//! piecewise-linear nodal bases.
//!
//! Eulerian (radial) variant, on `0 = r_0 < ... < r_n = R`:
//!
//! ```text
//! m(u,v) = int rho r^2 u v dr
//! d(u,v) = int [ nu2 (2u + r u')(2v + r v') + (4/3) nu1 (r u' - u)(r v' - v) ] dr
//! k(u,v) = int H''(rho) g_u g_v dr - 4 pi int r^2 rho^2 u v dr,
//!          g_u = 2 rho u + r rho' u + r rho u'
//! ```
//!
//! which are the weighted inner product, the viscous dissipation form and
//! the stiffness form written so that only first derivatives appear; the
//! free-surface stress condition is the natural boundary condition of the
//! damping form and is not imposed on the basis.
//!
//! Lagrangian mass-coordinate variant, on `0 = x_0 < ... < x_n = M` with
//! `r(x)` the radius enclosing mass `x`:
//!
//! ```text
//! m(a,b) = int a b / (16 pi^2 r^4) dx
//! d(a,b) = int rho [ nu2 a' b' + (4/3) nu1 (a' - 3a/(4 pi r^3 rho))(b' - 3b/(4 pi r^3 rho)) ] dx
//! k(a,b) = int [ P'(rho) rho^2 a' b' - x/(4 pi^2 r^7) a b ] dx
//! ```
//!
//! using the equilibrium relation `dP(rho)/dx = -x/(4 pi r^4)`. The two
//! assemblies discretize the same operator pencil through independent
//! integration-by-parts routes, so they serve as cross-oracles for each
//! other.
//!
//! In both variants the only essential condition is `u = 0` at the center
//! node, imposed by dropping the first basis function.

use std::f64::consts::PI;

use crate::equilibrium::StarProfile;
use crate::error::{Error, Result};
use crate::numerics::gauss::{gauss3_graded, EndSingularity};
use crate::numerics::tridiag::SymTridiag;

/// Which independent variable the grid and forms live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    /// Radial coordinate on `[0, R]`.
    Eulerian,
    /// Enclosed-mass coordinate on `[0, M]`.
    Mass,
}

/// Discretized (M, D, K) triple over one grid.
///
/// Matrices carry the nodal unknowns `1..=n` (the center node is dropped by
/// the essential condition) and have bandwidth one; they are stored in
/// symmetric tridiagonal form.
#[derive(Debug, Clone)]
pub struct OperatorTriple {
    /// Full node set including the center node.
    pub grid: Vec<f64>,
    pub mmat: SymTridiag,
    pub dmat: SymTridiag,
    pub kmat: SymTridiag,
    pub nu1: f64,
    pub nu2: f64,
    pub coordinate: Coordinate,
}

impl OperatorTriple {
    /// Effective radial viscosity `nu = 4/3 nu1 + nu2`.
    pub fn nu(&self) -> f64 {
        4.0 / 3.0 * self.nu1 + self.nu2
    }

    /// Number of unknowns.
    pub fn n(&self) -> usize {
        self.mmat.n()
    }
}

/// Geometric-refinement depth for end cells carrying degenerate weights.
const END_LEVELS: usize = 240;

fn check_viscosities(nu1: f64, nu2: f64) -> Result<()> {
    if !(nu1 > 0.0 && nu2 > 0.0) || !nu1.is_finite() || !nu2.is_finite() {
        return Err(Error::Config(format!(
            "viscosities must be positive, got nu1 = {nu1}, nu2 = {nu2}"
        )));
    }
    Ok(())
}

/// Cosine-clustered nodes on `[0, len]`.
fn cosine_grid(len: f64, n_cells: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(n_cells + 1);
    for i in 0..=n_cells {
        let xi = i as f64 / n_cells as f64;
        g.push(len * 0.5 * (1.0 - (PI * xi).cos()));
    }
    g[0] = 0.0;
    g[n_cells] = len;
    g
}

/// Assemble the Eulerian forms on a cosine-graded grid with `n_cells` cells.
pub fn assemble_eulerian(
    profile: &StarProfile,
    nu1: f64,
    nu2: f64,
    n_cells: usize,
) -> Result<OperatorTriple> {
    if n_cells < 16 {
        return Err(Error::Config("n_cells must be at least 16".into()));
    }
    assemble_eulerian_on(profile, nu1, nu2, &cosine_grid(profile.r_mu(), n_cells))
}

/// Assemble the Eulerian forms on an explicit node set
/// (`grid[0] = 0`, strictly increasing, `grid[last] = R`).
pub fn assemble_eulerian_on(
    profile: &StarProfile,
    nu1: f64,
    nu2: f64,
    grid: &[f64],
) -> Result<OperatorTriple> {
    check_viscosities(nu1, nu2)?;
    let n_cells = grid.len() - 1;
    if grid[0] != 0.0 || (grid[n_cells] - profile.r_mu()).abs() > 1e-12 * profile.r_mu() {
        return Err(Error::Assembly("grid must span [0, R]".into()));
    }
    let mut m = SymTridiag::zeros(n_cells);
    let mut d = SymTridiag::zeros(n_cells);
    let mut k = SymTridiag::zeros(n_cells);

    for cell in 0..n_cells {
        let (a, b) = (grid[cell], grid[cell + 1]);
        let w = b - a;
        if w <= 0.0 {
            return Err(Error::Assembly(format!("non-increasing grid at cell {cell}")));
        }
        let sing = if cell == n_cells - 1 {
            EndSingularity::Right
        } else {
            EndSingularity::None
        };
        if s_negative_density(profile, a, b) {
            return Err(Error::Assembly(
                "interpolated density negative inside a cell".into(),
            ));
        }
        // local index 0 = falling hat at node `cell`, 1 = rising hat
        let mut m_loc = [[0.0f64; 2]; 2];
        let mut d_loc = [[0.0f64; 2]; 2];
        let mut k_loc = [[0.0f64; 2]; 2];
        for i in 0..2 {
            for j in 0..=i {
                let integrate = |f: &dyn Fn(f64, &crate::equilibrium::ProfileSample) -> f64| {
                    gauss3_graded(a, b, sing, END_LEVELS, |r| {
                        let s = profile
                            .query(r)
                            .expect("quadrature point inside profile support");
                        f(r, &s)
                    })
                };
                let phi = |l: usize, r: f64| if l == 0 { (b - r) / w } else { (r - a) / w };
                let dphi = |l: usize| if l == 0 { -1.0 / w } else { 1.0 / w };
                m_loc[i][j] = integrate(&|r, s| s.rho * r * r * phi(i, r) * phi(j, r));
                d_loc[i][j] = integrate(&|r, _| {
                    let di = 2.0 * phi(i, r) + r * dphi(i);
                    let dj = 2.0 * phi(j, r) + r * dphi(j);
                    let si = r * dphi(i) - phi(i, r);
                    let sj = r * dphi(j) - phi(j, r);
                    nu2 * di * dj + 4.0 / 3.0 * nu1 * si * sj
                });
                k_loc[i][j] = integrate(&|r, s| {
                    let gi = 2.0 * s.rho * phi(i, r) + r * s.drho * phi(i, r) + r * s.rho * dphi(i);
                    let gj = 2.0 * s.rho * phi(j, r) + r * s.drho * phi(j, r) + r * s.rho * dphi(j);
                    let phi2 = if s.rho > 0.0 { s.phi2 } else { 0.0 };
                    phi2 * gi * gj - 4.0 * PI * r * r * s.rho * s.rho * phi(i, r) * phi(j, r)
                });
            }
        }
        scatter(cell, &m_loc, &mut m);
        scatter(cell, &d_loc, &mut d);
        scatter(cell, &k_loc, &mut k);
    }

    Ok(OperatorTriple {
        grid: grid.to_vec(),
        mmat: m,
        dmat: d,
        kmat: k,
        nu1,
        nu2,
        coordinate: Coordinate::Eulerian,
    })
}

fn s_negative_density(profile: &StarProfile, a: f64, b: f64) -> bool {
    // rho is recovered through the equation of state, so it cannot go
    // negative; keep the guard for the assembly contract regardless.
    for t in [0.25, 0.5, 0.75] {
        let r = a + t * (b - a);
        if let Ok(s) = profile.query(r) {
            if s.rho < 0.0 {
                return true;
            }
        }
    }
    false
}

/// Assemble the mass-coordinate forms.
///
/// The mass nodes come from enclosed-mass evaluation of the profile at
/// uniformly spaced radii, which resolves the vacuum boundary layer
/// (cosine spacing directly in mass leaves it under-resolved because
/// `M - x ~ (R - r)^{gamma/(gamma-1)}`). Each cell integral is evaluated in
/// the radius parametrization `x = m(r)`, `dx = 4 pi r^2 rho dr`: the
/// forward map is well conditioned everywhere, whereas inverting the flat
/// `m(r)` inside the boundary layer amplifies interpolation error by
/// `1/rho` and plants spurious negative directions in the stiffness form.
/// In `r` every integrand is bounded up to the surface (the `1/rho` shear
/// weight cancels against the Jacobian).
pub fn assemble_mass_coord(
    profile: &StarProfile,
    nu1: f64,
    nu2: f64,
    n_cells: usize,
) -> Result<OperatorTriple> {
    check_viscosities(nu1, nu2)?;
    if n_cells < 16 {
        return Err(Error::Config("n_cells must be at least 16".into()));
    }
    let mass = profile.mass();
    let r_mu = profile.r_mu();
    let r_nodes: Vec<f64> = (0..=n_cells)
        .map(|i| r_mu * i as f64 / n_cells as f64)
        .collect();
    let mut grid = Vec::with_capacity(n_cells + 1);
    for &r in &r_nodes {
        grid.push(profile.query(r)?.m);
    }
    grid[0] = 0.0;
    grid[n_cells] = mass;

    let mut m = SymTridiag::zeros(n_cells);
    let mut d = SymTridiag::zeros(n_cells);
    let mut k = SymTridiag::zeros(n_cells);

    for cell in 0..n_cells {
        let (ra, rb) = (r_nodes[cell], r_nodes[cell + 1]);
        let (xa, xb) = (grid[cell], grid[cell + 1]);
        let w = xb - xa;
        if w <= 0.0 {
            return Err(Error::Assembly(format!(
                "empty mass cell {cell}; grid too fine for this profile"
            )));
        }
        // fractional powers of rho at the surface limit the quadrature order
        let sing = if cell == n_cells - 1 {
            EndSingularity::Right
        } else {
            EndSingularity::None
        };
        let mut m_loc = [[0.0f64; 2]; 2];
        let mut d_loc = [[0.0f64; 2]; 2];
        let mut k_loc = [[0.0f64; 2]; 2];
        for i in 0..2 {
            for j in 0..=i {
                // f(x, r, rho, p_prime) integrated with the Jacobian 4 pi r^2 rho
                let integrate = |f: &dyn Fn(f64, f64, f64, f64) -> f64| {
                    gauss3_graded(ra, rb, sing, END_LEVELS, |r| {
                        let s = profile.query(r).expect("radius inside profile support");
                        if s.rho <= 0.0 {
                            return 0.0;
                        }
                        f(s.m.clamp(xa, xb), r, s.rho, s.p_prime) * 4.0 * PI * r * r * s.rho
                    })
                };
                let theta = |l: usize, x: f64| if l == 0 { (xb - x) / w } else { (x - xa) / w };
                let dtheta = |l: usize| if l == 0 { -1.0 / w } else { 1.0 / w };
                m_loc[i][j] = integrate(&|x, r, _, _| {
                    theta(i, x) * theta(j, x) / (16.0 * PI * PI * r.powi(4))
                });
                d_loc[i][j] = integrate(&|x, r, rho, _| {
                    let si = dtheta(i) - 3.0 * theta(i, x) / (4.0 * PI * r.powi(3) * rho);
                    let sj = dtheta(j) - 3.0 * theta(j, x) / (4.0 * PI * r.powi(3) * rho);
                    rho * (nu2 * dtheta(i) * dtheta(j) + 4.0 / 3.0 * nu1 * si * sj)
                });
                k_loc[i][j] = integrate(&|x, r, rho, p_prime| {
                    p_prime * rho * rho * dtheta(i) * dtheta(j)
                        - x / (4.0 * PI * PI * r.powi(7)) * theta(i, x) * theta(j, x)
                });
            }
        }
        scatter(cell, &m_loc, &mut m);
        scatter(cell, &d_loc, &mut d);
        scatter(cell, &k_loc, &mut k);
    }

    Ok(OperatorTriple {
        grid,
        mmat: m,
        dmat: d,
        kmat: k,
        nu1,
        nu2,
        coordinate: Coordinate::Mass,
    })
}

/// Add a symmetric 2x2 cell block into the global tridiagonal matrix,
/// dropping the center node (global unknown index = node index - 1).
fn scatter(cell: usize, loc: &[[f64; 2]; 2], out: &mut SymTridiag) {
    let diag_full = [loc[0][0], loc[1][1]];
    let off_full = loc[1][0];
    for l in 0..2 {
        let node = cell + l;
        if node == 0 {
            continue;
        }
        out.diag[node - 1] += diag_full[l];
    }
    if cell >= 1 {
        out.off[cell - 1] += off_full;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::EquationOfState;
    use crate::equilibrium::solve_profile;
    use approx::assert_relative_eq;

    fn profile_15() -> StarProfile {
        let eos = EquationOfState::polytrope(1.0, 1.5).unwrap();
        solve_profile(&eos, 1.0, 1e-10).unwrap()
    }

    #[test]
    fn mass_matrix_partition_of_unity() {
        let p = profile_15();
        let t = assemble_eulerian(&p, 0.1, 0.1, 64).unwrap();
        // sum_{ij} m_ij = int rho r^2 (1 - phi_0)^2 dr; phi_0 is supported on
        // the first cell only, so compare against the direct quadrature.
        let total: f64 = t.mmat.diag.iter().sum::<f64>() + 2.0 * t.mmat.off.iter().sum::<f64>();
        let mut direct = 0.0;
        for c in 0..t.grid.len() - 1 {
            let (a, b) = (t.grid[c], t.grid[c + 1]);
            let phi0 = |r: f64| if c == 0 { (b - r) / (b - a) } else { 0.0 };
            direct += crate::numerics::gauss::gauss3_graded(
                a,
                b,
                if c == t.grid.len() - 2 {
                    EndSingularity::Right
                } else {
                    EndSingularity::None
                },
                60,
                |r| {
                    let s = p.query(r).unwrap();
                    let z = 1.0 - phi0(r);
                    s.rho * r * r * z * z
                },
            );
        }
        assert_relative_eq!(total, direct, max_relative = 1e-10);
        // and the full partition integrates to M / 4 pi
        let m_over_4pi: f64 = p.mass() / (4.0 * PI);
        let whole = direct
            + crate::numerics::gauss::gauss3_graded(0.0, t.grid[1], EndSingularity::None, 1, |r| {
                let s = p.query(r).unwrap();
                let phi0 = (t.grid[1] - r) / t.grid[1];
                s.rho * r * r * phi0 * (2.0 - phi0)
            });
        assert_relative_eq!(whole, m_over_4pi, max_relative = 1e-6);
    }

    #[test]
    fn damping_form_on_linear_velocity_field() {
        // u(r) = r: the shear part vanishes identically and
        // d(u,u) = nu2 int (3r)^2 / r^2 ... = 9 nu2 int r^2 dr = 3 nu2 R^3.
        let p = profile_15();
        let (nu1, nu2) = (0.37, 0.21);
        let t = assemble_eulerian(&p, nu1, nu2, 48).unwrap();
        let u: Vec<f64> = t.grid[1..].to_vec();
        let quad = t.dmat.quad_form(&u);
        assert_relative_eq!(quad, 3.0 * nu2 * p.r_mu().powi(3), max_relative = 1e-10);
    }

    #[test]
    fn matrices_are_spd_where_required() {
        let p = profile_15();
        let t = assemble_eulerian(&p, 0.1, 0.1, 128).unwrap();
        // M strictly positive definite, D positive definite after the
        // essential condition, K nonnegative for the stable polytrope
        assert_eq!(t.mmat.negative_pivots(), 0);
        assert_eq!(t.dmat.negative_pivots(), 0);
        assert_eq!(t.kmat.negative_pivots(), 0);
        let probe: Vec<f64> = (0..t.n()).map(|i| ((i * 7 % 13) as f64) - 6.0).collect();
        assert!(t.mmat.quad_form(&probe) > 0.0);
        assert!(t.dmat.quad_form(&probe) > 0.0);
    }

    #[test]
    fn mass_coordinate_forms_vanish_on_zero() {
        let p = profile_15();
        let t = assemble_mass_coord(&p, 0.1, 0.1, 32).unwrap();
        let zero = vec![0.0; t.n()];
        assert_eq!(t.mmat.quad_form(&zero), 0.0);
        assert_eq!(t.dmat.quad_form(&zero), 0.0);
        assert_eq!(t.kmat.quad_form(&zero), 0.0);
        assert_eq!(t.coordinate, Coordinate::Mass);
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = profile_15();
        assert!(assemble_eulerian(&p, 0.0, 0.1, 64).is_err());
        assert!(assemble_eulerian(&p, 0.1, -0.1, 64).is_err());
        assert!(assemble_eulerian(&p, 0.1, 0.1, 8).is_err());
    }
}
