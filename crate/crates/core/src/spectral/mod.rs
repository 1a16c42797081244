//! Spectral stability of the linearized problem: Galerkin forms, inertia
//! counts, the damped quadratic eigenvalue problem, the inviscid spectrum,
//! the counting-identity battery, and linearized evolution.

mod assembly;
mod evolve;
mod pencil;
mod qep;
mod report;

pub use assembly::{assemble_eulerian, assemble_eulerian_on, assemble_mass_coord, Coordinate, OperatorTriple};
pub use evolve::{evolve_linear, EvolveSeries};
pub use pencil::SymPencil;
pub use qep::{solve_qep, solve_qep_dense, unstable_threshold, QepSolution, UnstableMode};
pub use report::{
    euler_poisson_spectrum, inertia_nminus, verify_ktc, Inertia, SpectrumReport, DEFAULT_TAU_GRID,
};
