//! Symmetric-hyperbolic toolkit for barotropic relativistic flow with
//! vacuum regions.
//!
//! The crate is organized around a change of variables that keeps the fluid
//! equations symmetric-hyperbolic all the way into the vacuum: the density
//! is replaced by a transform `w` with a finite vacuum limit, the velocity
//! by a rapidity-like speed `v`, and the state is carried as the pair of
//! characteristic combinations `z = v ± w` together with the unit flow
//! direction. On top of that sit an explicit positivity certificate for the
//! boosted symmetrizer, Lorentz-frame utilities, and finite-difference
//! solvers that exploit the construction: near-vacuum runs are performed in
//! a boosted frame where the symmetrizer stays uniformly positive definite.

pub mod eos;
pub mod error;
pub mod kinematics;
pub mod linalg;
pub mod lorentz;
pub mod solver;
pub mod symmetric_system;

pub use eos::{EquationOfState, GrowthReport};
pub use error::{Error, Result};
pub use kinematics::{PhysicalState, SymmetricState};
pub use linalg::{SmallMatrix, SpatialVec};
pub use lorentz::Boost;
pub use solver::{FluidField, Grid, SolveOptions, SymmetricField, TameRunReport, Trajectory};
pub use symmetric_system::{PositivityCertificate, SystemMatrices, VerificationReport};
