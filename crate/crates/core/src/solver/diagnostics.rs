//! Run diagnostics: support radius of compactly supported fields and
//! material characteristics traced through a stored trajectory.

use crate::eos::EquationOfState;
use crate::error::{Error, Result};
use crate::kinematics::speed_of_modified;
use crate::linalg::SpatialVec;
use crate::solver::field::{FluidField, SampleBoundary, SymmetricField};
use crate::solver::frames::Trajectory;

/// Default `w` level below which a cell does not count as support.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

/// Radius of the smallest origin-centered ball containing every cell whose
/// `w` exceeds `threshold`; zero for a vacuum field.
pub fn support_radius_sym(field: &SymmetricField, threshold: f64) -> f64 {
    let mut r = 0.0_f64;
    for (flat, s) in field.values.iter().enumerate() {
        if s.w() > threshold {
            r = r.max(field.grid.cell_center(flat).norm());
        }
    }
    r
}

/// Same measurement on a physical-variable field.
pub fn support_radius(eos: &EquationOfState, field: &FluidField, threshold: f64) -> Result<f64> {
    let mut r = 0.0_f64;
    for (flat, rho) in field.rho.iter().enumerate() {
        if eos.w_of_rho(*rho)? > threshold {
            r = r.max(field.grid.cell_center(flat).norm());
        }
    }
    Ok(r)
}

/// One material characteristic `dy/dt = u(t, y)` with the transform value
/// recorded along it.
#[derive(Clone, Debug)]
pub struct CharacteristicTrace {
    pub times: Vec<f64>,
    pub positions: Vec<SpatialVec>,
    pub w_values: Vec<f64>,
    /// `max_t w(t, y(t)) / w(0, y(0))` for seeds with matter; the absolute
    /// maximum of `w` along the path for seeds in vacuum.
    pub growth_ratio: f64,
}

fn velocity_at(traj: &Trajectory, boundary: &SampleBoundary, t: f64, y: &SpatialVec) -> SpatialVec {
    let (k, theta) = bracket(&traj.times, t);
    let (_, u0) = traj.slices[k].sample_linear(y, boundary);
    if theta == 0.0 {
        return u0;
    }
    let (_, u1) = traj.slices[k + 1].sample_linear(y, boundary);
    u0 + (u1 - u0) * theta
}

fn rho_at(traj: &Trajectory, boundary: &SampleBoundary, t: f64, y: &SpatialVec) -> f64 {
    let (k, theta) = bracket(&traj.times, t);
    let (r0, _) = traj.slices[k].sample_linear(y, boundary);
    if theta == 0.0 {
        return r0;
    }
    let (r1, _) = traj.slices[k + 1].sample_linear(y, boundary);
    r0 + (r1 - r0) * theta
}

/// Index of the slice interval containing `t` and the position within it.
fn bracket(times: &[f64], t: f64) -> (usize, f64) {
    if t <= times[0] {
        return (0, 0.0);
    }
    for k in 0..times.len() - 1 {
        if t <= times[k + 1] {
            let dt = times[k + 1] - times[k];
            return (k, if dt > 0.0 { (t - times[k]) / dt } else { 0.0 });
        }
    }
    (times.len().saturating_sub(2), 1.0)
}

/// Integrates material characteristics through the trajectory with RK4
/// (four substeps per stored interval) and linear interpolation in time,
/// linear/bilinear in space.
pub fn trace_characteristics(
    eos: &EquationOfState,
    traj: &Trajectory,
    seeds: &[SpatialVec],
    periodic: bool,
) -> Result<Vec<CharacteristicTrace>> {
    if traj.times.len() < 2 {
        return Err(Error::InvalidInput(
            "trajectory needs at least two stored slices to trace characteristics".to_string(),
        ));
    }
    let grid = &traj.slices[0].grid;
    let boundary = if periodic {
        SampleBoundary::Periodic
    } else {
        SampleBoundary::Ghost(0.0, SpatialVec::zeros(grid.n()))
    };
    let mut out = Vec::with_capacity(seeds.len());
    for seed in seeds {
        if seed.dim() != grid.n() {
            return Err(Error::InvalidInput(format!(
                "seed dimension {} does not match the grid dimension {}",
                seed.dim(),
                grid.n()
            )));
        }
        if !periodic {
            for axis in 0..grid.n() {
                if seed[axis] < grid.lo(axis) || seed[axis] > grid.hi(axis) {
                    return Err(Error::InvalidInput(format!(
                        "seed {:?} lies outside the grid box",
                        seed.as_slice()
                    )));
                }
            }
        }
        let mut y = *seed;
        let mut times = vec![traj.times[0]];
        let mut positions = vec![y];
        let mut w_values = vec![eos.w_of_rho(rho_at(traj, &boundary, traj.times[0], &y).max(0.0))?];
        for k in 0..traj.times.len() - 1 {
            let (t0, t1) = (traj.times[k], traj.times[k + 1]);
            let nsub = 4;
            let dh = (t1 - t0) / nsub as f64;
            let mut t = t0;
            for _ in 0..nsub {
                let k1 = velocity_at(traj, &boundary, t, &y);
                let k2 = velocity_at(traj, &boundary, t + 0.5 * dh, &(y + k1 * (0.5 * dh)));
                let k3 = velocity_at(traj, &boundary, t + 0.5 * dh, &(y + k2 * (0.5 * dh)));
                let k4 = velocity_at(traj, &boundary, t + dh, &(y + k3 * dh));
                y = y + (k1 + (k2 + k3) * 2.0 + k4) * (dh / 6.0);
                t += dh;
            }
            times.push(t1);
            positions.push(y);
            w_values.push(eos.w_of_rho(rho_at(traj, &boundary, t1, &y).max(0.0))?);
        }
        let w0 = w_values[0];
        let w_max = w_values.iter().cloned().fold(0.0, f64::max);
        let growth_ratio = if w0 > SUPPORT_THRESHOLD { w_max / w0 } else { w_max };
        out.push(CharacteristicTrace {
            times,
            positions,
            w_values,
            growth_ratio,
        });
    }
    Ok(out)
}

/// Crude sup-norm of the velocity gradient over a trajectory, used to
/// calibrate growth envelopes for the transform along characteristics.
pub fn max_velocity_gradient(traj: &Trajectory) -> f64 {
    let mut g = 0.0_f64;
    for slice in &traj.slices {
        let grid = &slice.grid;
        let nx = grid.cells(0);
        let ny = if grid.n() == 2 { grid.cells(1) } else { 1 };
        for j in 0..ny {
            for i in 0..nx {
                for axis in 0..grid.n() {
                    let (di, dj) = if axis == 0 { (1, 0) } else { (0, 1) };
                    let a = grid.idx(grid.wrap(i as isize - di, 0), grid.wrap(j as isize - dj, 1));
                    let b = grid.idx(grid.wrap(i as isize + di, 0), grid.wrap(j as isize + dj, 1));
                    g = g.max((slice.u[b] - slice.u[a]).norm() / (2.0 * grid.h(axis)));
                }
            }
        }
    }
    g
}

/// Largest speed in a symmetric field, for Galilean-shift sizing.
pub fn max_flow_speed(eos: &EquationOfState, field: &SymmetricField) -> Result<f64> {
    let mut s = 0.0_f64;
    for sym in &field.values {
        s = s.max(speed_of_modified(eos.eps(), sym.v())?);
    }
    Ok(s)
}
