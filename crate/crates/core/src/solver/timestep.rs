//! Strong-stability-preserving third-order Runge–Kutta stepping for the
//! characteristic-variable system, with per-stage direction renormalization
//! and vacuum flooring.

use crate::eos::EquationOfState;
use crate::error::{Error, Result};
use crate::kinematics::SymmetricState;
use crate::linalg::SpatialVec;
use crate::solver::field::SymmetricField;
use crate::solver::rhs::{
    max_signal_speed, rhs_symmetric, CellDot, Frame, RhsOptions, VACUUM_W_THRESHOLD,
};

/// Default CFL number for the explicit scheme.
pub const DEFAULT_CFL: f64 = 0.4;

/// What the stepper did to keep states admissible; callers log these
/// instead of the stepper hiding them.
#[derive(Clone, Copy, Debug)]
pub struct StepDiagnostics {
    /// Largest `| |udir| - 1 |` seen before renormalization.
    pub max_udir_drift: f64,
    /// Smallest raw `w` seen before flooring (can be slightly negative).
    pub min_w_prefloor: f64,
    /// Smallest `w` after flooring (0 exactly in floored cells).
    pub min_w_post: f64,
}

impl StepDiagnostics {
    fn empty() -> Self {
        Self {
            max_udir_drift: 0.0,
            min_w_prefloor: f64::INFINITY,
            min_w_post: f64::INFINITY,
        }
    }

    fn absorb(&mut self, other: &StepDiagnostics) {
        self.max_udir_drift = self.max_udir_drift.max(other.max_udir_drift);
        self.min_w_prefloor = self.min_w_prefloor.min(other.min_w_prefloor);
        self.min_w_post = self.min_w_post.min(other.min_w_post);
    }
}

fn raw_of(field: &SymmetricField) -> Vec<CellDot> {
    let m = field.grid.n() + 2;
    field
        .values
        .iter()
        .map(|s| {
            let mut w = [0.0; 5];
            w[0] = s.z_plus;
            w[1] = s.z_minus;
            for k in 0..m - 2 {
                w[2 + k] = s.udir[k];
            }
            w
        })
        .collect()
}

/// Builds a valid field from raw updated components: renormalizes the
/// direction, floors near-vacuum cells to exact vacuum, and reports how
/// much it had to adjust.
fn finalize(
    grid: &crate::solver::grid::Grid,
    raw: Vec<CellDot>,
) -> Result<(SymmetricField, StepDiagnostics)> {
    let dim = grid.n();
    let mut diag = StepDiagnostics::empty();
    let mut values = Vec::with_capacity(raw.len());
    for (flat, cell) in raw.iter().enumerate() {
        let mut zp = cell[0];
        let mut zm = cell[1];
        let dir_raw = SpatialVec::new(&cell[2..2 + dim]);
        let norm = dir_raw.norm();
        if !(zp.is_finite() && zm.is_finite() && dir_raw.is_finite()) || norm < 0.5 {
            return Err(Error::InvalidInput(format!(
                "time step produced an invalid state at cell {flat}: z = ({zp}, {zm}), \
                 |dir| = {norm}"
            )));
        }
        diag.max_udir_drift = diag.max_udir_drift.max((norm - 1.0).abs());
        let dir = dir_raw * (1.0 / norm);

        let w_raw = 0.5 * (zp - zm);
        diag.min_w_prefloor = diag.min_w_prefloor.min(w_raw);
        if w_raw < VACUUM_W_THRESHOLD {
            let v = (0.5 * (zp + zm)).max(0.0);
            zp = v;
            zm = v;
        } else if zp + zm < 0.0 {
            // roundoff can push the speed infinitesimally negative near
            // stagnation; project back onto zero speed
            let scale = 1.0 + zp.abs() + zm.abs();
            if zp + zm < -1e-9 * scale {
                return Err(Error::InvalidInput(format!(
                    "time step produced negative speed at cell {flat}: z = ({zp}, {zm})"
                )));
            }
            let w = 0.5 * (zp - zm);
            zp = w;
            zm = -w;
        }
        let state = SymmetricState::new(zp, zm, dir)?;
        diag.min_w_post = diag.min_w_post.min(state.w());
        values.push(state);
    }
    Ok((
        SymmetricField {
            grid: grid.clone(),
            values,
        },
        diag,
    ))
}

fn lincomb(a: f64, xs: &[CellDot], b: f64, ys: &[CellDot], c: f64, dots: &[CellDot]) -> Vec<CellDot> {
    xs.iter()
        .zip(ys)
        .zip(dots)
        .map(|((x, y), d)| {
            let mut out = [0.0; 5];
            for k in 0..5 {
                out[k] = a * x[k] + b * y[k] + c * d[k];
            }
            out
        })
        .collect()
}

/// Largest stable time step for the field under the given CFL number;
/// infinite for a field with no signal at all.
pub fn max_stable_dt(
    eos: &EquationOfState,
    field: &SymmetricField,
    frame: &Frame,
    cfl: f64,
) -> Result<f64> {
    let s = max_signal_speed(eos, field, frame)?;
    if s <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(cfl * field.grid.min_h() / s)
}

/// Advances the field by one SSP-RK3 step of size `dt`.
///
/// Fails when `dt` exceeds the CFL-stable step. Each stage result is
/// projected back onto admissible states (unit direction, `w >= 0`); the
/// sizes of those projections are returned, never silently dropped.
pub fn step(
    eos: &EquationOfState,
    field: &SymmetricField,
    dt: f64,
    frame: &Frame,
    opts: &RhsOptions,
    cfl: f64,
) -> Result<(SymmetricField, StepDiagnostics)> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput(format!("invalid time step dt = {dt}")));
    }
    let stable = max_stable_dt(eos, field, frame, cfl)?;
    if dt > stable * (1.0 + 1e-12) {
        return Err(Error::Cfl(format!(
            "dt = {dt:.6e} exceeds the stable step {stable:.6e} (cfl = {cfl})"
        )));
    }

    let w0 = raw_of(field);
    let mut diag = StepDiagnostics::empty();

    // stage 1: forward Euler
    let k1 = rhs_symmetric(eos, field, frame, opts)?;
    let (f1, d1) = finalize(&field.grid, lincomb(1.0, &w0, 0.0, &w0, dt, &k1))?;
    diag.absorb(&d1);

    // stage 2: 3/4 old + 1/4 Euler(stage 1)
    let k2 = rhs_symmetric(eos, &f1, frame, opts)?;
    let (f2, d2) = finalize(
        &field.grid,
        lincomb(0.75, &w0, 0.25, &raw_of(&f1), 0.25 * dt, &k2),
    )?;
    diag.absorb(&d2);

    // stage 3: 1/3 old + 2/3 Euler(stage 2)
    let k3 = rhs_symmetric(eos, &f2, frame, opts)?;
    let (out, d3) = finalize(
        &field.grid,
        lincomb(1.0 / 3.0, &w0, 2.0 / 3.0, &raw_of(&f2), 2.0 / 3.0 * dt, &k3),
    )?;
    diag.absorb(&d3);

    Ok((out, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::field::FluidField;
    use crate::solver::grid::Grid;

    fn eos() -> EquationOfState {
        EquationOfState::new(1.0, 2.0, 0.5, 1.9).unwrap()
    }

    fn smooth(cells: usize) -> SymmetricField {
        let grid = Grid::new_1d(0.0, 1.0, cells).unwrap();
        FluidField::from_fn(grid, |x| {
            (
                0.2 + 0.05 * (std::f64::consts::TAU * x[0]).sin(),
                SpatialVec::new(&[0.3 + 0.05 * (std::f64::consts::TAU * x[0]).cos()]),
            )
        })
        .unwrap()
        .to_symmetric(&eos(), &SpatialVec::basis(1, 0))
        .unwrap()
    }

    #[test]
    fn constant_state_is_a_fixed_point() {
        let grid = Grid::new_1d(0.0, 1.0, 32).unwrap();
        let sym = FluidField::from_fn(grid, |_| (0.4, SpatialVec::new(&[0.25])))
            .unwrap()
            .to_symmetric(&eos(), &SpatialVec::basis(1, 0))
            .unwrap();
        let (next, diag) = step(
            &eos(),
            &sym,
            1e-3,
            &Frame::Lab,
            &RhsOptions::default(),
            DEFAULT_CFL,
        )
        .unwrap();
        for (a, b) in next.values.iter().zip(&sym.values) {
            assert!((a.z_plus - b.z_plus).abs() < 1e-14);
            assert!((a.z_minus - b.z_minus).abs() < 1e-14);
        }
        assert!(diag.max_udir_drift < 1e-14);
    }

    #[test]
    fn vacuum_field_is_a_fixed_point() {
        let grid = Grid::new_1d(-1.0, 1.0, 16).unwrap();
        let sym = FluidField::from_fn(grid, |_| (0.0, SpatialVec::zeros(1)))
            .unwrap()
            .to_symmetric(&eos(), &SpatialVec::basis(1, 0))
            .unwrap();
        let (next, _) = step(
            &eos(),
            &sym,
            1e-3,
            &Frame::Lab,
            &RhsOptions::default(),
            DEFAULT_CFL,
        )
        .unwrap();
        for s in &next.values {
            assert_eq!(s.w(), 0.0);
            assert_eq!(s.v(), 0.0);
        }
    }

    #[test]
    fn oversized_step_is_rejected() {
        let sym = smooth(32);
        let stable = max_stable_dt(&eos(), &sym, &Frame::Lab, DEFAULT_CFL).unwrap();
        assert!(matches!(
            step(
                &eos(),
                &sym,
                stable * 2.0,
                &Frame::Lab,
                &RhsOptions::default(),
                DEFAULT_CFL
            ),
            Err(Error::Cfl(_))
        ));
    }

    #[test]
    fn one_step_error_decays_at_third_order() {
        // Richardson: compare one step of size dt against two of dt/2. The
        // defect of a third-order one-step method scales like dt^4, so
        // halving dt must shrink the gap by about 16.
        let e = eos();
        let sym = smooth(64);
        let opts = RhsOptions {
            dissipation: 0.0,
            ..RhsOptions::default()
        };
        let err_at = |dt: f64| -> f64 {
            let (one, _) = step(&e, &sym, dt, &Frame::Lab, &opts, DEFAULT_CFL).unwrap();
            let (half, _) = step(&e, &sym, dt / 2.0, &Frame::Lab, &opts, DEFAULT_CFL).unwrap();
            let (two, _) = step(&e, &half, dt / 2.0, &Frame::Lab, &opts, DEFAULT_CFL).unwrap();
            one.values
                .iter()
                .zip(&two.values)
                .map(|(a, b)| {
                    (a.z_plus - b.z_plus)
                        .abs()
                        .max((a.z_minus - b.z_minus).abs())
                })
                .fold(0.0, f64::max)
        };
        let dt0 = max_stable_dt(&e, &sym, &Frame::Lab, DEFAULT_CFL).unwrap() * 0.5;
        let e1 = err_at(dt0);
        let e2 = err_at(dt0 / 2.0);
        let ratio = e1 / e2;
        assert!(
            (12.0..22.0).contains(&ratio),
            "expected roughly sixteenfold decay, got {ratio} ({e1} -> {e2})"
        );
    }
}
