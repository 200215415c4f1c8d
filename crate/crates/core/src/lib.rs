//! Radially symmetric degenerate Cahn–Hilliard equation with a confining
//! potential.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: uniform radial mesh, quadrature against `(r+ε) dr` and the
//!   discrete radial operators.
//! * [`model`]: pressure law, truncated mobility, entropy density, chemical
//!   potential and confining potentials.
//! * [`evolution`]: explicit flux-form time stepping of the regularised
//!   parabolic system, with an optional growth source and dissipation
//!   diagnostics.
//! * [`stationary`]: finite-stiffness free-boundary stationary states
//!   (Newton on the boundary value problem, bisection on the multiplier,
//!   root-finding on the support radius).
//! * [`limit`]: closed-form incompressible-limit profile for `V(r) = r²`
//!   and the pressure-jump asymptote.
//! * [`general`]: the same limit machinery for a general increasing
//!   potential.
//! * [`app`]: configuration files, CSV output and run manifests behind the
//!   `chradial` binary.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod app;
pub mod error;
pub mod evolution;
pub mod general;
pub mod grid;
pub mod limit;
pub mod model;
pub mod par;
pub mod quadrature;
pub mod roots;
pub mod stationary;
mod tridiag;

pub use error::{Error, Result};
pub use grid::{BoundaryCondition, DensityField, RadialGrid};
pub use model::{Params, PotentialSpec};
