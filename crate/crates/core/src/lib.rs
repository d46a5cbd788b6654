//! Lagrangian time-Taylor solver for 3D incompressible Euler flow on the
//! periodic box `[0, 2π]³`, together with the analyticity-bound calculus for
//! the radius of convergence of the particle-displacement series.
//!
//! Layout:
//!
//! * [`fields`]: grids, Fourier representations, exact spectral operators,
//!   dealiased products, off-grid evaluation and the binary field format.
//! * [`hodge`]: inverse Laplacian and the curl/gradient decomposition.
//! * [`taylor`]: the recursion for the displacement coefficients and the
//!   series diagnostics (unit Jacobian, Cauchy invariants, radius).
//! * [`bounds`]: Hölder norms, the cubic `p(ζ)`, its roots and the
//!   guaranteed analyticity time.
//! * [`stepper`]: restart-based time stepping through the Taylor series.
//! * [`oracle`]: an Eulerian pseudo-spectral reference solver and particle
//!   tracker used to cross-check Taylor trajectories.
//! * [`presets`]: initial conditions.

pub mod bounds;
mod error;
pub mod fields;
pub mod hodge;
pub mod oracle;
mod par;
pub mod presets;
pub mod stepper;
pub mod taylor;

pub use error::{Error, Result};
pub use fields::{GridSpec, Rank, RealField, SpectralField};
