//! Finite-difference and finite-volume evolution of the fluid equations.
//!
//! Two discretizations are provided:
//! - `rhs` + `timestep` + `frames`: central second-order differences with
//!   fourth-difference dissipation applied to the first-order symmetric
//!   form, marched with SSP-RK3. The `frames` drivers wrap this with the
//!   boost (or Galilean-shift) pipeline that keeps the time matrix
//!   uniformly definite across vacuum regions.
//! - `conservative`: a local Lax-Friedrichs finite-volume scheme on the
//!   conserved variables, used as an independent reference solution.
//!
//! `grid` and `field` hold the shared containers, `diagnostics` the
//! post-processing probes, and `csv` deterministic text output.

pub mod conservative;
pub mod csv;
pub mod diagnostics;
pub mod field;
pub mod frames;
pub mod grid;
pub mod rhs;
pub mod timestep;

pub use conservative::{solve_conservative, ConsBoundary, Reconstruction};
pub use diagnostics::{support_radius, trace_characteristics, CharacteristicTrace};
pub use field::{ConservativeField, FluidField, SymmetricField};
pub use frames::{
    solve_boosted, solve_lab, solve_nonrelativistic, SolveOptions, TameRunReport, Trajectory,
};
pub use grid::Grid;
pub use rhs::{rhs_symmetric, Boundary, Frame, RhsOptions};
pub use timestep::{max_stable_dt, step};
