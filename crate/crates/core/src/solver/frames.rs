//! End-to-end solve drivers.
//!
//! Three pipelines share one march loop:
//! - `solve_lab`: direct evolution in the given frame; requires the flow to
//!   stay away from stagnation wherever there is matter.
//! - `solve_boosted`: certifies a boost from the data bounds, transplants
//!   the initial slice into sheared coordinates (boosted space, rescaled
//!   original time) where the time matrix is uniformly definite, evolves
//!   there, and samples back at the requested physical times. This is the
//!   vacuum-capable path.
//! - `solve_nonrelativistic`: the zero-`eps` limit of the same idea, where
//!   the boost degenerates to a Galilean shift of the velocity field.
//!
//! The sheared coordinates are `t'' = t / gamma` and `x''` equal to the
//! boosted spatial coordinate: substituting `t' = t'' - eps^2 U . x''`,
//! `x' = x''` into the boosted-frame system turns its time matrix into
//! exactly the combination `A_0 + eps^2 sum_j U_j A_j` this solver
//! integrates, while keeping the whole initial slice at `t'' = 0`. Both
//! directions of the map are applied pointwise, so no approximation beyond
//! interpolation enters the pipeline.

use crate::eos::EquationOfState;
use crate::error::{Error, Result};
use crate::kinematics::{
    modified_speed, speed_of_modified, to_symmetric_with_fallback, PhysicalState, SymmetricState,
};
use crate::linalg::SpatialVec;
use crate::lorentz::Boost;
use crate::solver::diagnostics::{support_radius, SUPPORT_THRESHOLD};
use crate::solver::field::{FluidField, SampleBoundary, SymmetricField};
use crate::solver::grid::Grid;
use crate::solver::rhs::{Boundary, Frame, RhsOptions, DEFAULT_DISSIPATION};
use crate::solver::timestep::{max_stable_dt, step, DEFAULT_CFL};
use crate::symmetric_system::{
    assemble_b, certify_positivity, min_symmetric_eigenvalue, PositivityCertificate,
};

/// Margin applied to the data's density bound when sizing the certificate.
pub const DENSITY_HEADROOM: f64 = 1.25;

/// Tolerance on the certified speed band before a warning is logged.
pub const BAND_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub cfl: f64,
    pub dissipation: f64,
    /// Physical times at which slices are reported; the end time is always
    /// included.
    pub output_times: Vec<f64>,
    /// Periodic box, or vacuum extension outside it.
    pub periodic: bool,
    /// Overrides the CFL-chosen step (still validated against stability).
    pub fixed_dt: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            cfl: DEFAULT_CFL,
            dissipation: DEFAULT_DISSIPATION,
            output_times: Vec::new(),
            periodic: true,
            fixed_dt: None,
        }
    }
}

/// Stored physical-frame slices of a run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub slices: Vec<FluidField>,
}

/// Health record of a run, populated for every pipeline.
#[derive(Clone, Debug)]
pub struct TameRunReport {
    /// `(t, support radius)` at every stored time.
    pub support_radius_series: Vec<(f64, f64)>,
    /// Smallest `w` over the whole run (after flooring; never negative).
    pub w_min: f64,
    /// Smallest raw `w` before flooring; how far roundoff undershot zero.
    pub w_min_prefloor: f64,
    /// Largest `| |udir| - 1 |` seen before renormalization.
    pub udir_norm_drift: f64,
    /// Squared scaled-speed bound certified for the run, if one was built.
    pub kappa: Option<f64>,
    /// Smallest sheared-time-matrix eigenvalue observed at output times.
    pub min_boosted_time_eig: Option<f64>,
    /// Largest `w` clipped outside the advected vacuum region: the material
    /// interface rule deletes whatever the stencils smear past the front,
    /// so this records how much that was.
    pub max_tame_snap: f64,
    pub warnings: Vec<String>,
}

impl TameRunReport {
    fn new(initial_w_min: f64) -> Self {
        Self {
            support_radius_series: Vec::new(),
            w_min: initial_w_min,
            w_min_prefloor: initial_w_min,
            udir_norm_drift: 0.0,
            kappa: None,
            min_boosted_time_eig: None,
            max_tame_snap: 0.0,
            warnings: Vec::new(),
        }
    }

    fn warn(&mut self, msg: String) {
        if self.warnings.len() < 20 {
            self.warnings.push(msg);
        } else if self.warnings.len() == 20 {
            self.warnings
                .push("... further warnings suppressed".to_string());
        }
    }
}

/// Optional per-step check that scaled speeds stay in the certified band.
struct BandCheck {
    eps: f64,
    lo: f64,
    hi: f64,
}

/// The vacuum region of compactly supported data is material: every point
/// of it moves at the (uniform) vacuum velocity of the computational
/// frame, so the matter support is the rigid translate of the initial one
/// and never expands in physical coordinates. Holding cells outside the
/// translated support at exact vacuum realizes that at grid resolution;
/// without it, any consistent stencil smears density past the front at
/// levels far above the vacuum threshold.
struct TameMask {
    initial: Vec<bool>,
    /// Velocity of the vacuum region in the computational frame.
    velocity: SpatialVec,
    periodic: bool,
}

impl TameMask {
    fn from_field(sym: &SymmetricField, velocity: SpatialVec, periodic: bool) -> Self {
        Self {
            initial: sym
                .values
                .iter()
                .map(|s| s.w() >= crate::solver::rhs::VACUUM_W_THRESHOLD)
                .collect(),
            velocity,
            periodic,
        }
    }

    /// Whether the cell's material preimage at time 0 lay in the support.
    fn in_support(&self, grid: &Grid, flat: usize, t: f64) -> bool {
        let (i, j) = grid.coords(flat);
        let mut idx = [i as isize, j as isize];
        for (a, ix) in idx.iter_mut().enumerate().take(grid.n()) {
            *ix -= (self.velocity[a] * t / grid.h(a)).round() as isize;
        }
        if self.periodic {
            let i = grid.wrap(idx[0], 0);
            let j = if grid.n() == 2 { grid.wrap(idx[1], 1) } else { 0 };
            self.initial[grid.idx(i, j)]
        } else {
            let in_x = (0..grid.cells(0) as isize).contains(&idx[0]);
            let in_y = grid.n() == 1 || (0..grid.cells(1) as isize).contains(&idx[1]);
            if !(in_x && in_y) {
                return false;
            }
            self.initial[grid.idx(idx[0] as usize, idx[1] as usize)]
        }
    }

    /// Clips anything the stencils pushed beyond the advected front back to
    /// exact vacuum, reporting the largest value deleted.
    fn apply(
        &self,
        sym: &mut SymmetricField,
        t: f64,
        report: &mut TameRunReport,
    ) -> Result<()> {
        let grid = sym.grid.clone();
        for flat in 0..sym.values.len() {
            let s = sym.values[flat];
            if s.w() > 0.0 && !self.in_support(&grid, flat, t) {
                report.max_tame_snap = report.max_tame_snap.max(s.w());
                sym.values[flat] = SymmetricState::new(s.v(), s.v(), s.udir)?;
            }
        }
        Ok(())
    }
}

fn output_schedule(t_end: f64, requested: &[f64]) -> Result<Vec<f64>> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidInput(format!("invalid end time {t_end}")));
    }
    let mut out: Vec<f64> = Vec::new();
    for &t in requested {
        if !(t.is_finite() && t > 0.0 && t <= t_end * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput(format!(
                "output time {t} outside (0, {t_end}]"
            )));
        }
        out.push(t.min(t_end));
    }
    out.push(t_end);
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * t_end);
    Ok(out)
}

/// Integrates `sym` in the time variable of `frame` from 0 through every
/// time in `outputs`, calling `emit` at each of them.
#[allow(clippy::too_many_arguments)]
fn march(
    eos: &EquationOfState,
    mut sym: SymmetricField,
    frame: &Frame,
    rhs_opts: &RhsOptions,
    opts: &SolveOptions,
    outputs: &[f64],
    report: &mut TameRunReport,
    band: Option<&BandCheck>,
    tame: Option<&TameMask>,
    mut emit: impl FnMut(f64, &SymmetricField, &mut TameRunReport) -> Result<()>,
) -> Result<()> {
    let mut t = 0.0_f64;
    for &target in outputs {
        while t < target * (1.0 - 1e-12) {
            let stable = max_stable_dt(eos, &sym, frame, opts.cfl)?;
            let mut dt = opts.fixed_dt.unwrap_or(stable);
            dt = dt.min(target - t);
            if !dt.is_finite() {
                dt = target - t; // nothing moves: jump to the target
            }
            let (next, diag) = step(eos, &sym, dt, frame, rhs_opts, opts.cfl)?;
            sym = next;
            t += dt;
            if let Some(mask) = tame {
                mask.apply(&mut sym, t, report)?;
            }
            report.w_min = report.w_min.min(diag.min_w_post);
            report.w_min_prefloor = report.w_min_prefloor.min(diag.min_w_prefloor);
            report.udir_norm_drift = report.udir_norm_drift.max(diag.max_udir_drift);
            if let Some(b) = band {
                let mut lo = f64::INFINITY;
                let mut hi = 0.0_f64;
                for s in &sym.values {
                    let scaled = b.eps * speed_of_modified(b.eps, s.v())?;
                    lo = lo.min(scaled);
                    hi = hi.max(scaled);
                }
                if lo < b.lo - BAND_TOLERANCE || hi > b.hi + BAND_TOLERANCE {
                    report.warn(format!(
                        "t = {t:.6}: scaled speeds [{lo:.6}, {hi:.6}] left the certified \
                         band [{:.6}, {:.6}]",
                        b.lo, b.hi
                    ));
                }
            }
        }
        t = target;
        emit(t, &sym, report)?;
    }
    Ok(())
}

fn vacuum_rest(dim: usize) -> SymmetricState {
    SymmetricState::new(0.0, 0.0, SpatialVec::basis(dim, 0)).expect("rest vacuum is admissible")
}

/// Extends `base` by whole cells (`pad_lo[a]` / `pad_hi[a]` distances on
/// axis `a`), keeping the spacing and the original cell centers; returns
/// the padded grid and the index offset of the original block.
fn padded_grid(base: &Grid, pad_lo: &[f64; 2], pad_hi: &[f64; 2]) -> Result<(Grid, [usize; 2])> {
    let n = base.n();
    let mut lo = [0.0_f64; 2];
    let mut hi = [0.0_f64; 2];
    let mut cells = [0_usize; 2];
    let mut offset = [0_usize; 2];
    for a in 0..n {
        let h = base.h(a);
        if !(pad_lo[a].is_finite() && pad_hi[a].is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite padding requested for the computational box".to_string(),
            ));
        }
        let c_lo = (pad_lo[a].max(0.0) / h).ceil() as usize;
        let c_hi = (pad_hi[a].max(0.0) / h).ceil() as usize;
        lo[a] = base.lo(a) - c_lo as f64 * h;
        hi[a] = base.hi(a) + c_hi as f64 * h;
        cells[a] = base.cells(a) + c_lo + c_hi;
        offset[a] = c_lo;
    }
    let g = if n == 1 {
        Grid::new_1d(lo[0], hi[0], cells[0])?
    } else {
        Grid::new_2d((lo[0], hi[0]), cells[0], (lo[1], hi[1]), cells[1])?
    };
    Ok((g, offset))
}

/// Fills a field on `grid` by transplanting `inner` values into the block
/// at `offset` and `filler` everywhere else.
fn transplant(
    grid: Grid,
    inner_cells: [usize; 2],
    offset: [usize; 2],
    inner: Vec<SymmetricState>,
    filler: &SymmetricState,
) -> SymmetricField {
    let mut values = vec![*filler; grid.total_cells()];
    for j in 0..inner_cells[1] {
        for i in 0..inner_cells[0] {
            values[grid.idx(i + offset[0], j + offset[1])] = inner[i + inner_cells[0] * j];
        }
    }
    SymmetricField { grid, values }
}

fn min_time_eig(eos: &EquationOfState, sym: &SymmetricField, boost: &Boost) -> Result<f64> {
    let mut min_eig = f64::INFINITY;
    for s in &sym.values {
        let b = assemble_b(eos, s, boost)?;
        min_eig = min_eig.min(min_symmetric_eigenvalue(&b.time)?);
    }
    Ok(min_eig)
}

/// Evolves the field directly in its own frame.
pub fn solve_lab(
    eos: &EquationOfState,
    initial: &FluidField,
    t_end: f64,
    opts: &SolveOptions,
) -> Result<(Trajectory, TameRunReport)> {
    let dim = initial.grid.n();
    let sym0 = initial.to_symmetric(eos, &SpatialVec::basis(dim, 0))?;
    let outputs = output_schedule(t_end, &opts.output_times)?;
    let rhs_opts = RhsOptions {
        dissipation: opts.dissipation,
        boundary: if opts.periodic {
            Boundary::Periodic
        } else {
            Boundary::Ghost(vacuum_rest(dim))
        },
    };
    let mut report = TameRunReport::new(sym0.min_w());
    // Report the physical image of the evolved state at every output time,
    // including t = 0, so a steady state stays bit-identical across slices.
    let init_slice = sym0.to_fluid(eos)?;
    report
        .support_radius_series
        .push((0.0, support_radius(eos, &init_slice, SUPPORT_THRESHOLD)?));
    let mut traj = Trajectory {
        times: vec![0.0],
        slices: vec![init_slice],
    };
    march(
        eos,
        sym0,
        &Frame::Lab,
        &rhs_opts,
        opts,
        &outputs,
        &mut report,
        None,
        // stagnant vacuum is frozen by the stencil rules, which is the
        // static-frame version of the material vacuum region
        None,
        |t, sym, report| {
            let fluid = sym.to_fluid(eos)?;
            report
                .support_radius_series
                .push((t, support_radius(eos, &fluid, SUPPORT_THRESHOLD)?));
            traj.times.push(t);
            traj.slices.push(fluid);
            Ok(())
        },
    )?;
    Ok((traj, report))
}

/// Certifies a boost from the data bounds, evolves in the sheared
/// coordinates, and samples back at the requested physical times.
pub fn solve_boosted(
    eos: &EquationOfState,
    initial: &FluidField,
    t_end: f64,
    opts: &SolveOptions,
) -> Result<(Trajectory, TameRunReport, PositivityCertificate)> {
    let eps = eos.eps();
    if eps == 0.0 {
        return Err(Error::InvalidInput(
            "boosted solves need eps > 0; use the Galilean-shifted solver instead".to_string(),
        ));
    }
    let dim = initial.grid.n();
    let lab_grid = initial.grid.clone();

    // certificate sized from the data bounds
    let m_bound = (DENSITY_HEADROOM * initial.max_rho()).min(eos.rho_max());
    let y0 = eps * eos.sound_speed(m_bound)?;
    let cert = certify_positivity(y0, dim)?;
    let kappa = cert.kappa();
    let max_speed = initial.max_speed();
    if (eps * max_speed).powi(2) > kappa * (1.0 + 1e-12) {
        return Err(Error::Admissibility(format!(
            "initial scaled speed {:.6} exceeds the certified bound sqrt(kappa) = {:.6}",
            eps * max_speed,
            kappa.sqrt()
        )));
    }

    let boost = Boost::new(eps, cert.z * (1.0 / eps))?;
    let gamma = boost.gamma();
    let minus_udir = *boost.dir() * -1.0;
    let t_end_sheared = t_end / gamma;

    // the image of the lab grid under the spatial stretch is again uniform,
    // so the pointwise transform lands exactly on cell centers and the
    // transplant is an index copy
    let stretched = if dim == 1 {
        Grid::new_1d(
            gamma * lab_grid.lo(0),
            gamma * lab_grid.hi(0),
            lab_grid.cells(0),
        )?
    } else {
        Grid::new_2d(
            (gamma * lab_grid.lo(0), gamma * lab_grid.hi(0)),
            lab_grid.cells(0),
            (lab_grid.lo(1), lab_grid.hi(1)),
            lab_grid.cells(1),
        )?
    };

    let mut inner = Vec::with_capacity(initial.rho.len());
    for (rho, u) in initial.rho.iter().zip(&initial.u) {
        let u_prime = boost.compose_velocity(u)?;
        inner.push(to_symmetric_with_fallback(
            eos,
            &PhysicalState {
                rho: *rho,
                u: u_prime,
            },
            &minus_udir,
        )?);
    }

    let ghost_v = modified_speed(eps, boost.speed())?;
    let sheared_vacuum = SymmetricState::new(ghost_v, ghost_v, minus_udir)?;

    let sym0 = if opts.periodic {
        SymmetricField {
            grid: stretched,
            values: inner,
        }
    } else {
        // vacuum box: pad so the backward-swept queries and every signal
        // reaching them stay inside the evolved region for the whole run
        let s_prime = (cert.phi_sup + cert.y0) / (eps * (1.0 + cert.phi_sup * cert.y0));
        let s_sheared = s_prime / (1.0 - eps * eps * boost.speed() * s_prime);
        let sweep = gamma * boost.speed() * t_end;
        let spread = s_sheared * t_end_sheared;
        let mut pad_lo = [0.0_f64; 2];
        let mut pad_hi = [0.0_f64; 2];
        pad_lo[0] = sweep + spread + 6.0 * stretched.h(0);
        pad_hi[0] = spread + 6.0 * stretched.h(0);
        if dim == 2 {
            pad_lo[1] = spread + 6.0 * stretched.h(1);
            pad_hi[1] = pad_lo[1];
        }
        let inner_cells = [stretched.cells(0), stretched.cells(1)];
        let (padded, offset) = padded_grid(&stretched, &pad_lo, &pad_hi)?;
        transplant(padded, inner_cells, offset, inner, &sheared_vacuum)
    };

    let rhs_opts = RhsOptions {
        dissipation: opts.dissipation,
        boundary: if opts.periodic {
            Boundary::Periodic
        } else {
            Boundary::Ghost(sheared_vacuum)
        },
    };
    let sample_boundary = if opts.periodic {
        SampleBoundary::Periodic
    } else {
        SampleBoundary::Ghost(0.0, *boost.velocity() * -1.0)
    };

    // requested physical times become sheared times t / gamma
    let outputs_lab = output_schedule(t_end, &opts.output_times)?;
    let outputs: Vec<f64> = outputs_lab.iter().map(|t| t / gamma).collect();

    let mut report = TameRunReport::new(sym0.min_w());
    report.kappa = Some(kappa);
    report.min_boosted_time_eig = Some(min_time_eig(eos, &sym0, &boost)?);
    // a lab-static point travels at dx''/dt'' = -gamma^2 U in the sheared
    // coordinates, and the vacuum region of tame data is lab-static
    let tame_mask = TameMask::from_field(
        &sym0,
        *boost.velocity() * (-gamma * gamma),
        opts.periodic,
    );
    let band = BandCheck {
        eps,
        lo: cert.phi_inf,
        hi: cert.phi_sup,
    };
    let mut traj = Trajectory {
        times: vec![0.0],
        slices: vec![initial.clone()],
    };
    report
        .support_radius_series
        .push((0.0, support_radius(eos, initial, SUPPORT_THRESHOLD)?));

    let frame = Frame::Boosted(boost.clone());
    let inverse = boost.inverse();
    march(
        eos,
        sym0,
        &frame,
        &rhs_opts,
        opts,
        &outputs,
        &mut report,
        Some(&band),
        Some(&tame_mask),
        |t_sheared, sym, report| {
            let eig = min_time_eig(eos, sym, &boost)?;
            report.min_boosted_time_eig =
                Some(report.min_boosted_time_eig.map_or(eig, |m: f64| m.min(eig)));

            let t_lab = gamma * t_sheared;
            let prim = sym.to_fluid(eos)?;
            let mut rho = Vec::with_capacity(lab_grid.total_cells());
            let mut u = Vec::with_capacity(lab_grid.total_cells());
            for flat in 0..lab_grid.total_cells() {
                let x = lab_grid.cell_center(flat);
                let query = boost.spatial_stretch(&x) - *boost.velocity() * (gamma * t_lab);
                let (r, u_prime) = prim.sample_linear(&query, &sample_boundary);
                rho.push(r.max(0.0));
                u.push(inverse.compose_velocity(&u_prime)?);
            }
            let lab_slice = FluidField {
                grid: lab_grid.clone(),
                rho,
                u,
            };
            report
                .support_radius_series
                .push((t_lab, support_radius(eos, &lab_slice, SUPPORT_THRESHOLD)?));
            traj.times.push(t_lab);
            traj.slices.push(lab_slice);
            Ok(())
        },
    )?;
    Ok((traj, report, cert))
}

/// Galilean-shifted evolution for `eps = 0`: the shifted velocity field
/// `u - shift` never stagnates when `|shift|` dominates the flow, and the
/// physical solution is recovered by sampling at `x - shift t`.
pub fn solve_nonrelativistic(
    eos: &EquationOfState,
    initial: &FluidField,
    t_end: f64,
    shift: &SpatialVec,
    opts: &SolveOptions,
) -> Result<(Trajectory, TameRunReport)> {
    if eos.eps() != 0.0 {
        return Err(Error::InvalidInput(format!(
            "the Galilean-shifted solver needs eps = 0, got {}",
            eos.eps()
        )));
    }
    let dim = initial.grid.n();
    if shift.dim() != dim {
        return Err(Error::InvalidInput(
            "shift dimension does not match the grid".to_string(),
        ));
    }
    let max_speed = initial.max_speed();
    if shift.norm() < 2.0 * max_speed || shift.norm() == 0.0 {
        return Err(Error::InvalidInput(format!(
            "shift speed {} must be positive and at least twice the flow bound {}",
            shift.norm(),
            max_speed
        )));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidInput(format!("invalid end time {t_end}")));
    }
    let lab_grid = initial.grid.clone();
    let minus_dir = shift.normalized().expect("shift is nonzero") * -1.0;

    let mut inner = Vec::with_capacity(initial.rho.len());
    for (rho, u) in initial.rho.iter().zip(&initial.u) {
        inner.push(to_symmetric_with_fallback(
            eos,
            &PhysicalState {
                rho: *rho,
                u: *u - *shift,
            },
            &minus_dir,
        )?);
    }
    let ghost = SymmetricState::new(shift.norm(), shift.norm(), minus_dir)?;

    let sym0 = if opts.periodic {
        SymmetricField {
            grid: lab_grid.clone(),
            values: inner,
        }
    } else {
        let m_bound = (DENSITY_HEADROOM * initial.max_rho()).min(eos.rho_max());
        let c_bound = eos.sound_speed(m_bound)?;
        let signal = shift.norm() + max_speed + c_bound;
        let mut pad_lo = [0.0_f64; 2];
        let mut pad_hi = [0.0_f64; 2];
        for a in 0..dim {
            let pad = (shift[a].abs() + signal) * t_end + 6.0 * lab_grid.h(a);
            pad_lo[a] = pad;
            pad_hi[a] = pad;
        }
        let inner_cells = [lab_grid.cells(0), lab_grid.cells(1)];
        let (padded, offset) = padded_grid(&lab_grid, &pad_lo, &pad_hi)?;
        transplant(padded, inner_cells, offset, inner, &ghost)
    };

    let rhs_opts = RhsOptions {
        dissipation: opts.dissipation,
        boundary: if opts.periodic {
            Boundary::Periodic
        } else {
            Boundary::Ghost(ghost)
        },
    };
    let sample_boundary = if opts.periodic {
        SampleBoundary::Periodic
    } else {
        SampleBoundary::Ghost(0.0, *shift * -1.0)
    };

    let outputs = output_schedule(t_end, &opts.output_times)?;
    let mut report = TameRunReport::new(sym0.min_w());
    // in the shifted variables the lab-static vacuum region moves at -shift
    let tame_mask = TameMask::from_field(&sym0, *shift * -1.0, opts.periodic);
    let mut traj = Trajectory {
        times: vec![0.0],
        slices: vec![initial.clone()],
    };
    report
        .support_radius_series
        .push((0.0, support_radius(eos, initial, SUPPORT_THRESHOLD)?));

    march(
        eos,
        sym0,
        &Frame::Lab,
        &rhs_opts,
        opts,
        &outputs,
        &mut report,
        None,
        Some(&tame_mask),
        |t, sym, report| {
            let prim = sym.to_fluid(eos)?;
            let mut rho = Vec::with_capacity(lab_grid.total_cells());
            let mut u = Vec::with_capacity(lab_grid.total_cells());
            for flat in 0..lab_grid.total_cells() {
                let x = lab_grid.cell_center(flat);
                let query = x - *shift * t;
                let (r, u_shifted) = prim.sample_linear(&query, &sample_boundary);
                rho.push(r.max(0.0));
                u.push(u_shifted + *shift);
            }
            let lab_slice = FluidField {
                grid: lab_grid.clone(),
                rho,
                u,
            };
            report
                .support_radius_series
                .push((t, support_radius(eos, &lab_slice, SUPPORT_THRESHOLD)?));
            traj.times.push(t);
            traj.slices.push(lab_slice);
            Ok(())
        },
    )?;
    Ok((traj, report))
}
