//! Shared numerical kernels: quadrature, interpolation, tridiagonal and
//! dense linear algebra, an embedded Runge-Kutta step, root finding and
//! least-squares fitting.

pub mod dense;
pub mod gauss;
pub mod interp;
pub mod lsq;
pub mod rk;
pub mod roots;
pub mod tridiag;
