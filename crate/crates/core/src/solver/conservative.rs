//! Reference solver in conserved variables: local Lax–Friedrichs fluxes
//! with optional unlimited linear reconstruction, and the conserved-to-
//! primitive recovery.
//!
//! The conserved pair is `D = q/(1 - eps^2 |u|^2) - eps^2 p` (mass) and
//! `S = q u/(1 - eps^2 |u|^2)` (momentum); the mass flux is exactly `S`
//! and the momentum flux is `S (x) u + p I`.

use crate::eos::EquationOfState;
use crate::error::{Error, Result};
use crate::linalg::SpatialVec;
use crate::solver::field::{ConservativeField, FluidField};
use crate::solver::grid::Grid;
use crate::solver::rhs::characteristic_speed;

/// Conserved mass densities below this are treated as exact vacuum by the
/// recovery.
pub const VACUUM_D_THRESHOLD: f64 = 1e-14;

/// Face-value reconstruction for the flux computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reconstruction {
    /// First-order: cell averages at faces.
    Flat,
    /// Second-order: unlimited central slopes on the primitive variables.
    Linear,
}

/// Boundary handling for the conservative stencils.
#[derive(Clone, Debug)]
pub enum ConsBoundary {
    Periodic,
    /// Vacuum ghost cells outside the box.
    VacuumGhost,
}

/// Inverts `q(rho) = rho + eps^2 k rho^gamma` by Newton from above; `q` is
/// increasing and convex, so the iteration is monotone and cannot overshoot
/// below the root. No density-cap check here: recovery iterates through
/// out-of-range trial densities before settling.
fn rho_from_q(eos: &EquationOfState, q_target: f64) -> f64 {
    if q_target <= 0.0 {
        return 0.0;
    }
    let e2k = eos.eps() * eos.eps() * eos.k();
    if e2k == 0.0 {
        return q_target;
    }
    let g = eos.gamma();
    let mut rho = q_target;
    for _ in 0..200 {
        let f = rho + e2k * rho.powf(g) - q_target;
        let fp = 1.0 + e2k * g * rho.powf(g - 1.0);
        let next = rho - f / fp;
        if (next - rho).abs() <= 1e-15 * (1.0 + rho) {
            return next;
        }
        rho = next;
    }
    rho
}

/// Maps a primitive state to `(D, S)`.
pub fn primitive_to_conservative(
    eos: &EquationOfState,
    rho: f64,
    u: &SpatialVec,
) -> Result<(f64, SpatialVec)> {
    let eps = eos.eps();
    if eps * u.norm() >= 1.0 {
        return Err(Error::Admissibility(format!(
            "eps |u| = {} >= 1",
            eps * u.norm()
        )));
    }
    let p = eos.pressure(rho)?;
    let gamma_fac = 1.0 - eps * eps * u.norm_sq();
    let g = (rho + eps * eps * p) / gamma_fac;
    Ok((g - eps * eps * p, *u * g))
}

/// Recovers `(rho, u)` from `(D, S)`.
///
/// With `beta = eps |u|`, eliminating the Lorentz factor reduces the
/// defining equations to the scalar relation `D = eps |S| beta + rho(beta)`
/// where `rho(beta)` inverts `q(rho) = eps |S| (1 - beta^2)/beta`; the
/// right-hand side is strictly increasing in `beta`, so bisection finds the
/// unique root.
pub fn conservative_to_primitive(
    eos: &EquationOfState,
    d: f64,
    s: &SpatialVec,
) -> Result<(f64, SpatialVec)> {
    let eps = eos.eps();
    let dim = s.dim();
    if !d.is_finite() || !s.is_finite() {
        return Err(Error::Recovery(format!("non-finite conserved pair ({d}, {:?})", s.as_slice())));
    }
    if d < -1e-10 {
        return Err(Error::Recovery(format!("conserved mass density {d} is negative")));
    }
    if d <= VACUUM_D_THRESHOLD {
        return Ok((0.0, SpatialVec::zeros(dim)));
    }
    let s_norm = s.norm();
    if eps == 0.0 {
        return Ok((d, *s * (1.0 / d)));
    }
    if s_norm <= 1e-14 * d.max(1.0) {
        return Ok((d, SpatialVec::zeros(dim)));
    }
    if d <= eps * s_norm {
        return Err(Error::Recovery(format!(
            "no admissible state: D = {d} <= eps |S| = {}",
            eps * s_norm
        )));
    }
    let residual = |beta: f64| -> f64 {
        let q_target = eps * s_norm * (1.0 - beta * beta) / beta;
        d - eps * s_norm * beta - rho_from_q(eos, q_target)
    };
    let mut lo = 1e-12;
    let mut hi = 1.0 - 1e-12;
    if residual(lo) > 0.0 {
        // the root sits below machine-size beta: the state is at rest
        return Ok((d, SpatialVec::zeros(dim)));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    let rho = rho_from_q(eos, eps * s_norm * (1.0 - beta * beta) / beta);
    if rho > eos.rho_max() * (1.0 + 1e-9) {
        return Err(Error::Recovery(format!(
            "recovered density {rho} exceeds the admissible cap {}",
            eos.rho_max()
        )));
    }
    let u = *s * (beta / (eps * s_norm));
    Ok((rho, u))
}

impl ConservativeField {
    pub fn from_fluid(eos: &EquationOfState, fluid: &FluidField) -> Result<Self> {
        let mut d = Vec::with_capacity(fluid.rho.len());
        let mut s = Vec::with_capacity(fluid.rho.len());
        for (rho, u) in fluid.rho.iter().zip(&fluid.u) {
            let (di, si) = primitive_to_conservative(eos, *rho, u)?;
            d.push(di);
            s.push(si);
        }
        Ok(Self {
            grid: fluid.grid.clone(),
            d,
            s,
        })
    }

    pub fn to_fluid(&self, eos: &EquationOfState) -> Result<FluidField> {
        let mut rho = Vec::with_capacity(self.d.len());
        let mut u = Vec::with_capacity(self.d.len());
        for (d, s) in self.d.iter().zip(&self.s) {
            let (r, vel) = conservative_to_primitive(eos, *d, s)?;
            rho.push(r);
            u.push(vel);
        }
        Ok(FluidField {
            grid: self.grid.clone(),
            rho,
            u,
        })
    }

    /// Total conserved mass, `sum D * cell volume`.
    pub fn total_mass(&self) -> f64 {
        let vol: f64 = (0..self.grid.n()).map(|a| self.grid.h(a)).product();
        self.d.iter().sum::<f64>() * vol
    }
}

/// Physical flux of `(D, S)` along `axis`, from a primitive state.
fn flux(
    eos: &EquationOfState,
    rho: f64,
    u: &SpatialVec,
    axis: usize,
) -> Result<(f64, SpatialVec)> {
    let (_, s) = primitive_to_conservative(eos, rho, u)?;
    let p = eos.pressure(rho)?;
    let mut fs = s * u[axis];
    fs[axis] += p;
    Ok((s[axis], fs))
}

struct PrimCell {
    rho: f64,
    u: SpatialVec,
}

fn prim_at(
    prims: &[PrimCell],
    grid: &Grid,
    boundary: &ConsBoundary,
    i: isize,
    j: isize,
) -> (f64, SpatialVec) {
    let (nx, ny) = (grid.cells(0) as isize, grid.cells(1) as isize);
    match boundary {
        ConsBoundary::Periodic => {
            let flat = grid.idx(grid.wrap(i, 0), if grid.n() == 2 { grid.wrap(j, 1) } else { 0 });
            (prims[flat].rho, prims[flat].u)
        }
        ConsBoundary::VacuumGhost => {
            if (0..nx).contains(&i) && (grid.n() == 1 || (0..ny).contains(&j)) {
                let flat = grid.idx(i as usize, j as usize);
                (prims[flat].rho, prims[flat].u)
            } else {
                (0.0, SpatialVec::zeros(grid.n()))
            }
        }
    }
}

/// Local Lax–Friedrichs time derivative of the conserved field.
pub fn rhs_conservative(
    eos: &EquationOfState,
    field: &ConservativeField,
    recon: Reconstruction,
    boundary: &ConsBoundary,
) -> Result<(Vec<f64>, Vec<SpatialVec>)> {
    let grid = &field.grid;
    let dim = grid.n();
    let eps = eos.eps();
    let total = field.d.len();

    let mut prims = Vec::with_capacity(total);
    for (d, s) in field.d.iter().zip(&field.s) {
        let (rho, u) = conservative_to_primitive(eos, *d, s)?;
        prims.push(PrimCell { rho, u });
    }

    // face value of (rho, u) on the `side` of the interface cell `base`
    // (side 0: right face of base; side 1: left face of base)
    let face = |i: isize, j: isize, axis: usize, toward: f64| -> (f64, SpatialVec) {
        let (rho_c, u_c) = prim_at(&prims, grid, boundary, i, j);
        match recon {
            Reconstruction::Flat => (rho_c, u_c),
            Reconstruction::Linear => {
                let (di, dj) = if axis == 0 { (1, 0) } else { (0, 1) };
                let (rho_m, u_m) = prim_at(&prims, grid, boundary, i - di, j - dj);
                let (rho_p, u_p) = prim_at(&prims, grid, boundary, i + di, j + dj);
                let rho_f = (rho_c + toward * 0.25 * (rho_p - rho_m)).max(0.0);
                let u_f = u_c + (u_p - u_m) * (toward * 0.25);
                (rho_f, u_f)
            }
        }
    };

    // numerical flux through the interface whose left cell is `(i, j)`
    // along `axis`
    let iface = |i: isize, j: isize, axis: usize| -> Result<(f64, SpatialVec)> {
        let (di, dj) = if axis == 0 { (1, 0) } else { (0, 1) };
        let (rho_l, u_l) = face(i, j, axis, 1.0);
        let (rho_r, u_r) = face(i + di, j + dj, axis, -1.0);
        let (fd_l, fs_l) = flux(eos, rho_l, &u_l, axis)?;
        let (fd_r, fs_r) = flux(eos, rho_r, &u_r, axis)?;
        let (dl, sl) = primitive_to_conservative(eos, rho_l, &u_l)?;
        let (dr, sr) = primitive_to_conservative(eos, rho_r, &u_r)?;
        let alpha = characteristic_speed(eps, u_l.norm(), eos.sound_speed(rho_l)?)
            .max(characteristic_speed(eps, u_r.norm(), eos.sound_speed(rho_r)?));
        Ok((
            0.5 * (fd_l + fd_r) - 0.5 * alpha * (dr - dl),
            (fs_l + fs_r) * 0.5 - (sr - sl) * (0.5 * alpha),
        ))
    };

    let mut d_dot = vec![0.0; total];
    let mut s_dot = vec![SpatialVec::zeros(dim); total];

    // flux difference per cell; the same interface flux is evaluated for
    // both of its cells, so the telescoping sum cancels exactly
    let nx = grid.cells(0);
    let ny = if dim == 2 { grid.cells(1) } else { 1 };
    for axis in 0..dim {
        let (di, dj) = if axis == 0 { (1isize, 0isize) } else { (0, 1) };
        let h = grid.h(axis);
        for j in 0..ny {
            for i in 0..nx {
                let (fr_d, fr_s) = iface(i as isize, j as isize, axis)?;
                let (fl_d, fl_s) = iface(i as isize - di, j as isize - dj, axis)?;
                let here = grid.idx(i, j);
                d_dot[here] -= (fr_d - fl_d) / h;
                s_dot[here] = s_dot[here] - (fr_s - fl_s) * (1.0 / h);
            }
        }
    }

    Ok((d_dot, s_dot))
}

/// One SSP-RK3 step of the conservative solver.
pub fn step_conservative(
    eos: &EquationOfState,
    field: &ConservativeField,
    dt: f64,
    recon: Reconstruction,
    boundary: &ConsBoundary,
    cfl: f64,
) -> Result<ConservativeField> {
    let prims = field.to_fluid(eos)?;
    let mut smax = 0.0_f64;
    for (rho, u) in prims.rho.iter().zip(&prims.u) {
        smax = smax.max(characteristic_speed(
            eos.eps(),
            u.norm(),
            eos.sound_speed(*rho)?,
        ));
    }
    if smax > 0.0 && dt > cfl * field.grid.min_h() / smax * (1.0 + 1e-12) {
        return Err(Error::Cfl(format!(
            "dt = {dt:.6e} exceeds the stable conservative step {:.6e}",
            cfl * field.grid.min_h() / smax
        )));
    }

    let euler = |f: &ConservativeField, w: f64| -> Result<ConservativeField> {
        let (dd, ds) = rhs_conservative(eos, f, recon, boundary)?;
        let mut out = f.clone();
        for idx in 0..out.d.len() {
            out.d[idx] += w * dd[idx];
            out.s[idx] = out.s[idx] + ds[idx] * w;
        }
        Ok(out)
    };
    let blend = |a: f64, x: &ConservativeField, b: f64, y: &ConservativeField| {
        let mut out = x.clone();
        for idx in 0..out.d.len() {
            out.d[idx] = a * x.d[idx] + b * y.d[idx];
            out.s[idx] = x.s[idx] * a + y.s[idx] * b;
        }
        out
    };

    let f1 = euler(field, dt)?;
    let f2 = blend(0.75, field, 0.25, &euler(&f1, dt)?);
    Ok(blend(1.0 / 3.0, field, 2.0 / 3.0, &euler(&f2, dt)?))
}

/// Evolves an initial fluid field to `t_end` in conserved variables,
/// storing every `store_stride`-th slice (plus first and last) as
/// primitives.
#[allow(clippy::too_many_arguments)]
pub fn solve_conservative(
    eos: &EquationOfState,
    initial: &FluidField,
    t_end: f64,
    fixed_dt: Option<f64>,
    recon: Reconstruction,
    boundary: &ConsBoundary,
    cfl: f64,
    store_stride: usize,
) -> Result<Vec<(f64, FluidField)>> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidInput(format!("invalid end time {t_end}")));
    }
    let mut field = ConservativeField::from_fluid(eos, initial)?;
    let mut t = 0.0;
    let mut slices = vec![(0.0, initial.clone())];
    let mut step_idx = 0usize;
    while t < t_end * (1.0 - 1e-12) {
        let prims = field.to_fluid(eos)?;
        let mut smax = 0.0_f64;
        for (rho, u) in prims.rho.iter().zip(&prims.u) {
            smax = smax.max(characteristic_speed(
                eos.eps(),
                u.norm(),
                eos.sound_speed(*rho)?,
            ));
        }
        let dt_cfl = if smax > 0.0 {
            cfl * field.grid.min_h() / smax
        } else {
            t_end - t
        };
        let dt = fixed_dt.unwrap_or(dt_cfl).min(t_end - t);
        field = step_conservative(eos, &field, dt, recon, boundary, cfl)?;
        t += dt;
        step_idx += 1;
        if step_idx.is_multiple_of(store_stride) || t >= t_end * (1.0 - 1e-12) {
            slices.push((t, field.to_fluid(eos)?));
        }
    }
    Ok(slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eos() -> EquationOfState {
        EquationOfState::new(1.0, 2.0, 0.5, 1.9).unwrap()
    }

    #[test]
    fn recovery_inverts_the_forward_map() {
        let e = eos();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let rho: f64 = if rng.gen_bool(0.2) {
                rng.gen_range(0.0..1e-8) // near vacuum
            } else {
                rng.gen_range(0.0..1.5)
            };
            let mut u = [0.0; 2];
            for v in u.iter_mut() {
                *v = rng.gen_range(-1.3..1.3);
            }
            let u = SpatialVec::new(&u);
            if e.eps() * u.norm() >= 0.98 {
                continue;
            }
            let (d, s) = primitive_to_conservative(&e, rho, &u).unwrap();
            let (rho2, u2) = conservative_to_primitive(&e, d, &s).unwrap();
            let scale = 1.0 + rho;
            assert!(
                (rho2 - rho).abs() < 1e-10 * scale,
                "rho {rho} -> {rho2}"
            );
            if rho > VACUUM_D_THRESHOLD {
                assert!((u2 - u).norm() < 1e-9 * (1.0 + u.norm()), "u mismatch at rho {rho}");
            }
        }
    }

    #[test]
    fn recovery_rejects_inadmissible_pairs() {
        let e = eos();
        // D < eps |S| cannot come from any state
        assert!(matches!(
            conservative_to_primitive(&e, 0.1, &SpatialVec::new(&[1.0])),
            Err(Error::Recovery(_))
        ));
        assert!(matches!(
            conservative_to_primitive(&e, -1.0, &SpatialVec::zeros(1)),
            Err(Error::Recovery(_))
        ));
        // exact vacuum and rest states take the short paths
        assert_eq!(
            conservative_to_primitive(&e, 0.0, &SpatialVec::zeros(1)).unwrap(),
            (0.0, SpatialVec::zeros(1))
        );
        let (r, u) = conservative_to_primitive(&e, 0.7, &SpatialVec::zeros(1)).unwrap();
        assert_eq!((r, u[0]), (0.7, 0.0));
    }

    #[test]
    fn nonrelativistic_fluxes_are_classical() {
        let e0 = EquationOfState::new(1.0, 2.0, 0.0, 1e6).unwrap();
        let rho = 0.37;
        let u = SpatialVec::new(&[0.52]);
        let (d, s) = primitive_to_conservative(&e0, rho, &u).unwrap();
        assert!((d - rho).abs() < 1e-15);
        assert!((s[0] - rho * u[0]).abs() < 1e-15);
        let (fd, fs) = flux(&e0, rho, &u, 0).unwrap();
        let p = e0.pressure(rho).unwrap();
        assert!((fd - rho * u[0]).abs() < 1e-15);
        assert!((fs[0] - (rho * u[0] * u[0] + p)).abs() < 1e-15);
    }

    #[test]
    fn constant_state_has_zero_rhs() {
        let e = eos();
        let grid = Grid::new_2d((0.0, 1.0), 16, (0.0, 1.0), 16).unwrap();
        let f = FluidField::from_fn(grid, |_| (0.4, SpatialVec::new(&[0.2, -0.05]))).unwrap();
        let c = ConservativeField::from_fluid(&e, &f).unwrap();
        for recon in [Reconstruction::Flat, Reconstruction::Linear] {
            let (dd, ds) = rhs_conservative(&e, &c, recon, &ConsBoundary::Periodic).unwrap();
            for (a, b) in dd.iter().zip(&ds) {
                assert!(a.abs() < 1e-12);
                assert!(b.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn periodic_step_conserves_mass() {
        let e = eos();
        let grid = Grid::new_1d(0.0, 1.0, 64).unwrap();
        let f = FluidField::from_fn(grid, |x| {
            (
                0.3 + 0.1 * (std::f64::consts::TAU * x[0]).sin(),
                SpatialVec::new(&[0.2 + 0.05 * (std::f64::consts::TAU * x[0]).cos()]),
            )
        })
        .unwrap();
        let mut c = ConservativeField::from_fluid(&e, &f).unwrap();
        let m0 = c.total_mass();
        for _ in 0..20 {
            c = step_conservative(
                &e,
                &c,
                2e-3,
                Reconstruction::Linear,
                &ConsBoundary::Periodic,
                0.4,
            )
            .unwrap();
        }
        assert!(
            (c.total_mass() - m0).abs() < 1e-12 * m0,
            "mass drifted from {m0} to {}",
            c.total_mass()
        );
    }

    #[test]
    fn vacuum_bump_run_stays_admissible() {
        let e = eos();
        let grid = Grid::new_1d(-1.0, 1.0, 64).unwrap();
        let f = FluidField::from_fn(grid, |x| {
            let s: f64 = (1.0 - (x[0] / 0.4) * (x[0] / 0.4)).max(0.0);
            (0.2 * s * s, SpatialVec::zeros(1))
        })
        .unwrap();
        let mut c = ConservativeField::from_fluid(&e, &f).unwrap();
        for _ in 0..30 {
            c = step_conservative(
                &e,
                &c,
                2e-3,
                Reconstruction::Flat,
                &ConsBoundary::VacuumGhost,
                0.4,
            )
            .unwrap();
        }
        let back = c.to_fluid(&e).unwrap();
        for rho in &back.rho {
            assert!(*rho >= 0.0 && rho.is_finite());
        }
    }
}
