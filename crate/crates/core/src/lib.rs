//! Equilibria, spectral stability and nonlinear free-boundary dynamics of
//! non-rotating viscous gaseous stars.
//!
//! The crate is organized along the pipeline
//!
//! 1. [`eos`] — barotropic pressure laws (polytrope, white dwarf) with
//!    enthalpy and its inverse;
//! 2. [`equilibrium`] — the hydrostatic profile `rho_mu(r)` for a center
//!    density `mu`, its support radius and total mass;
//! 3. [`mrcurve`] — the mass-radius curve over `mu` and the turning-point
//!    unstable-mode count per segment;
//! 4. [`spectral`] — Galerkin discretizations of the weighted inner product,
//!    damping and stiffness forms; inertia counts, the damped quadratic
//!    eigenvalue problem, and linearized evolution;
//! 5. [`simulator`] — the nonlinear free-boundary Lagrangian
//!    finite-difference scheme with decay/growth diagnostics.

pub mod eos;
pub mod equilibrium;
pub mod error;
pub mod mrcurve;
pub mod numerics;
pub mod simulator;
pub mod spectral;

pub use eos::{EosModel, EquationOfState};
pub use equilibrium::{solve_profile, solve_profile_with, ProfileSample, SolveOptions, StarProfile};
pub use error::{Error, Result};
pub use mrcurve::{sweep_curve, turning_point_counts, Bend, Extremum, ExtremumKind, MassRadiusCurve};
pub use simulator::{
    discrete_energy, fit_decay, fit_growth, init_sim, run, FitResult, Perturbation, RunConfig,
    RunStatus, SimState, TimeSeries,
};
pub use spectral::{
    assemble_eulerian, assemble_eulerian_on, assemble_mass_coord, euler_poisson_spectrum,
    evolve_linear, inertia_nminus, solve_qep, verify_ktc, Coordinate, EvolveSeries, Inertia,
    OperatorTriple, QepSolution, SpectrumReport,
};
