//! Cell-centered fields in physical, characteristic, and conserved
//! variables, with conversions and linear sampling.

use crate::eos::EquationOfState;
use crate::error::{Error, Result};
use crate::kinematics::{from_symmetric, to_symmetric_with_fallback, PhysicalState, SymmetricState};
use crate::linalg::SpatialVec;
use crate::solver::grid::Grid;

/// Density and velocity per cell.
#[derive(Clone, Debug)]
pub struct FluidField {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub u: Vec<SpatialVec>,
}

/// Characteristic pair and flow direction per cell.
#[derive(Clone, Debug)]
pub struct SymmetricField {
    pub grid: Grid,
    pub values: Vec<SymmetricState>,
}

/// Conserved mass and momentum densities per cell.
#[derive(Clone, Debug)]
pub struct ConservativeField {
    pub grid: Grid,
    pub d: Vec<f64>,
    pub s: Vec<SpatialVec>,
}

/// How sampling and stencils treat points outside the box.
#[derive(Clone, Debug)]
pub enum SampleBoundary {
    Periodic,
    /// Constant ghost state (density, velocity) outside the box.
    Ghost(f64, SpatialVec),
}

impl FluidField {
    /// Builds a field by evaluating `f` at every cell center.
    pub fn from_fn(grid: Grid, f: impl Fn(&SpatialVec) -> (f64, SpatialVec)) -> Result<Self> {
        let total = grid.total_cells();
        let mut rho = Vec::with_capacity(total);
        let mut u = Vec::with_capacity(total);
        for flat in 0..total {
            let (r, vel) = f(&grid.cell_center(flat));
            if !(r.is_finite() && vel.is_finite()) || r < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "initial data has rho = {r}, u = {:?} at cell {flat}",
                    vel.as_slice()
                )));
            }
            if vel.dim() != grid.n() {
                return Err(Error::InvalidInput(format!(
                    "velocity dimension {} does not match grid dimension {}",
                    vel.dim(),
                    grid.n()
                )));
            }
            rho.push(r);
            u.push(vel);
        }
        Ok(Self { grid, rho, u })
    }

    pub fn max_speed(&self) -> f64 {
        self.u.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_rho(&self) -> f64 {
        self.rho.iter().cloned().fold(0.0, f64::max)
    }

    /// Converts to characteristic variables cell by cell; stagnant cells
    /// take `fallback` as their direction.
    pub fn to_symmetric(
        &self,
        eos: &EquationOfState,
        fallback: &SpatialVec,
    ) -> Result<SymmetricField> {
        let mut values = Vec::with_capacity(self.rho.len());
        for (r, vel) in self.rho.iter().zip(&self.u) {
            values.push(to_symmetric_with_fallback(
                eos,
                &PhysicalState { rho: *r, u: *vel },
                fallback,
            )?);
        }
        Ok(SymmetricField {
            grid: self.grid.clone(),
            values,
        })
    }

    fn locate(&self, x: f64, axis: usize, boundary: &SampleBoundary) -> Option<(usize, usize, f64)> {
        // returns bracketing cell indices along `axis` and the interpolation
        // weight of the right one; None means fully outside (ghost)
        let g = &self.grid;
        let t = (x - g.lo(axis)) / g.h(axis) - 0.5;
        match boundary {
            SampleBoundary::Periodic => {
                let i0 = t.floor();
                let frac = t - i0;
                let a = g.wrap(i0 as isize, axis);
                let b = g.wrap(i0 as isize + 1, axis);
                Some((a, b, frac))
            }
            SampleBoundary::Ghost(..) => {
                let m = g.cells(axis) as f64;
                if t < -1.0 || t > m {
                    return None;
                }
                let i0 = t.floor().clamp(0.0, m - 2.0);
                let frac = (t - i0).clamp(0.0, 1.0);
                Some((i0 as usize, i0 as usize + 1, frac))
            }
        }
    }

    /// Linear (1-D) or bilinear (2-D) interpolation of `(rho, u)` at a
    /// point. Outside the box the ghost state applies (or the point wraps,
    /// for periodic sampling).
    pub fn sample_linear(&self, x: &SpatialVec, boundary: &SampleBoundary) -> (f64, SpatialVec) {
        let ghost = match boundary {
            SampleBoundary::Ghost(r, v) => Some((*r, *v)),
            SampleBoundary::Periodic => None,
        };
        let n = self.grid.n();
        let Some((i_a, i_b, fx)) = self.locate(x[0], 0, boundary) else {
            return ghost.expect("locate only fails with a ghost boundary");
        };
        if n == 1 {
            let (ra, ua) = (self.rho[i_a], self.u[i_a]);
            let (rb, ub) = (self.rho[i_b], self.u[i_b]);
            return (ra + (rb - ra) * fx, ua + (ub - ua) * fx);
        }
        let Some((j_a, j_b, fy)) = self.locate(x[1], 1, boundary) else {
            return ghost.expect("locate only fails with a ghost boundary");
        };
        let at = |i: usize, j: usize| (self.rho[self.grid.idx(i, j)], self.u[self.grid.idx(i, j)]);
        let (r00, u00) = at(i_a, j_a);
        let (r10, u10) = at(i_b, j_a);
        let (r01, u01) = at(i_a, j_b);
        let (r11, u11) = at(i_b, j_b);
        let r0 = r00 + (r10 - r00) * fx;
        let r1 = r01 + (r11 - r01) * fx;
        let u0 = u00 + (u10 - u00) * fx;
        let u1 = u01 + (u11 - u01) * fx;
        (r0 + (r1 - r0) * fy, u0 + (u1 - u0) * fy)
    }
}

impl SymmetricField {
    pub fn to_fluid(&self, eos: &EquationOfState) -> Result<FluidField> {
        let mut rho = Vec::with_capacity(self.values.len());
        let mut u = Vec::with_capacity(self.values.len());
        for sym in &self.values {
            let ps = from_symmetric(eos, sym)?;
            rho.push(ps.rho);
            u.push(ps.u);
        }
        Ok(FluidField {
            grid: self.grid.clone(),
            rho,
            u,
        })
    }

    pub fn min_w(&self) -> f64 {
        self.values.iter().map(|s| s.w()).fold(f64::INFINITY, f64::min)
    }
}
