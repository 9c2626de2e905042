//! Semi-discrete right-hand side of the characteristic-variable system:
//! central second-order differences (one-sided toward the matter at
//! matter/vacuum interfaces), a per-cell time-matrix solve, and
//! fourth-order artificial dissipation away from interfaces.
//!
//! In the lab frame the time matrix is diagonal but degenerates where the
//! flow stagnates; genuinely vacuum stagnant cells are frozen by the
//! tame-flow rule, while stagnant cells with matter are a hard error (the
//! boosted frame exists precisely to avoid them). In a boosted frame every
//! cell is solved with the uniformly definite boosted time matrix and no
//! freezing is applied.

use crate::eos::EquationOfState;
use crate::error::{Error, Result};
use crate::kinematics::{speed_of_modified, SymmetricState};
use crate::lorentz::Boost;
use crate::solver::field::SymmetricField;
use crate::symmetric_system::{assemble_a, assemble_b};

/// Cells with `w` below this carry no matter.
pub const VACUUM_W_THRESHOLD: f64 = 1e-10;

/// Lab-frame flows slower than this make the time matrix numerically
/// singular: frozen if vacuum, an error otherwise.
pub const SINGULAR_SPEED_THRESHOLD: f64 = 1e-6;

/// Default strength of the fourth-difference dissipation.
pub const DEFAULT_DISSIPATION: f64 = 0.05;

/// Which frame the field lives in, and therefore which time matrix the
/// per-cell solve uses.
#[derive(Clone, Debug)]
pub enum Frame {
    Lab,
    Boosted(Boost),
}

/// Treatment of neighbors beyond the box.
#[derive(Clone, Debug)]
pub enum Boundary {
    Periodic,
    /// Constant ghost state outside the box (vacuum extension).
    Ghost(SymmetricState),
}

#[derive(Clone, Debug)]
pub struct RhsOptions {
    pub dissipation: f64,
    pub boundary: Boundary,
}

impl Default for RhsOptions {
    fn default() -> Self {
        Self {
            dissipation: DEFAULT_DISSIPATION,
            boundary: Boundary::Periodic,
        }
    }
}

/// Per-cell time derivative; only the first `n + 2` entries are used.
pub type CellDot = [f64; 5];

/// Largest characteristic speed of a single state: the relativistic
/// composition of flow and sound speed.
pub fn characteristic_speed(eps: f64, speed: f64, c: f64) -> f64 {
    (speed + c) / (1.0 + eps * eps * speed * c)
}

/// Largest signal speed over the field, in the time variable of `frame`.
pub fn max_signal_speed(
    eos: &EquationOfState,
    field: &SymmetricField,
    frame: &Frame,
) -> Result<f64> {
    let eps = eos.eps();
    let mut s = 0.0_f64;
    for sym in &field.values {
        let rho = eos.rho_of_w(sym.w())?;
        let c = eos.sound_speed(rho)?;
        let speed = speed_of_modified(eps, sym.v())?;
        s = s.max(characteristic_speed(eps, speed, c));
    }
    match frame {
        Frame::Lab => Ok(s),
        Frame::Boosted(b) => {
            // the boosted time coordinate tilts against the wave: worst case
            // over directions is s / (1 - eps^2 |U| s)
            let denom = 1.0 - eps * eps * b.speed() * s;
            if denom <= 0.0 {
                return Err(Error::Admissibility(format!(
                    "signal speed {s} super-causal in the boosted frame"
                )));
            }
            Ok(s / denom)
        }
    }
}

struct CellInfo {
    frozen: bool,
}

fn classify(
    eos: &EquationOfState,
    field: &SymmetricField,
    frame: &Frame,
) -> Result<Vec<CellInfo>> {
    let eps = eos.eps();
    let mut out = Vec::with_capacity(field.values.len());
    for (flat, sym) in field.values.iter().enumerate() {
        let frozen = match frame {
            Frame::Boosted(_) => false,
            Frame::Lab => {
                let speed = speed_of_modified(eps, sym.v())?;
                if speed < SINGULAR_SPEED_THRESHOLD {
                    if sym.w() < VACUUM_W_THRESHOLD {
                        true
                    } else {
                        return Err(Error::Singular(format!(
                            "cell {flat} has matter (w = {:.3e}) but speed {speed:.3e}; \
                             the lab-frame time matrix is singular there — use a boosted \
                             or shifted solve",
                            sym.w()
                        )));
                    }
                } else {
                    false
                }
            }
        };
        out.push(CellInfo { frozen });
    }
    Ok(out)
}

/// A neighbor state plus whether it is frozen (inert stagnant vacuum).
#[derive(Clone, Copy)]
struct Fetched {
    state: SymmetricState,
    frozen: bool,
}

fn fetch(
    field: &SymmetricField,
    info: &[CellInfo],
    boundary: &Boundary,
    lab: bool,
    i: isize,
    j: isize,
) -> Fetched {
    let g = &field.grid;
    let (nx, ny) = (g.cells(0) as isize, g.cells(1) as isize);
    let in_x = (0..nx).contains(&i);
    let in_y = g.n() == 1 || (0..ny).contains(&j);
    match boundary {
        Boundary::Periodic => {
            let flat = g.idx(g.wrap(i, 0), if g.n() == 2 { g.wrap(j, 1) } else { 0 });
            Fetched {
                state: field.values[flat],
                frozen: info[flat].frozen,
            }
        }
        Boundary::Ghost(ghost) => {
            if in_x && in_y {
                let flat = g.idx(i as usize, j as usize);
                Fetched {
                    state: field.values[flat],
                    frozen: info[flat].frozen,
                }
            } else {
                // the vacuum extension is inert in the lab frame
                Fetched {
                    state: *ghost,
                    frozen: lab,
                }
            }
        }
    }
}

fn components(s: &SymmetricState, m: usize) -> [f64; 5] {
    let mut w = [0.0; 5];
    w[0] = s.z_plus;
    w[1] = s.z_minus;
    for k in 0..m - 2 {
        w[2 + k] = s.udir[k];
    }
    w
}

/// Computes the per-cell time derivative of the field.
pub fn rhs_symmetric(
    eos: &EquationOfState,
    field: &SymmetricField,
    frame: &Frame,
    opts: &RhsOptions,
) -> Result<Vec<CellDot>> {
    let g = field.grid.clone();
    let dim = g.n();
    let m = dim + 2;
    let lab = matches!(frame, Frame::Lab);
    let info = classify(eos, field, frame)?;
    let smax = if opts.dissipation > 0.0 {
        max_signal_speed(eos, field, frame)?
    } else {
        0.0
    };

    let mut dots = vec![[0.0; 5]; field.values.len()];
    for flat in 0..field.values.len() {
        if info[flat].frozen {
            continue;
        }
        let (ci, cj) = g.coords(flat);
        let (ci, cj) = (ci as isize, cj as isize);
        let state = &field.values[flat];
        let nbr = |di: isize, dj: isize| {
            fetch(field, &info, &opts.boundary, lab, ci + di, cj + dj)
        };

        let matrices = match frame {
            Frame::Lab => assemble_a(eos, state)?,
            Frame::Boosted(b) => assemble_b(eos, state, b)?,
        };

        // spatial term: r = -sum_axis A_axis dW/dx_axis
        let mut r = [0.0; 5];
        let mut flux = [0.0; 5];
        for axis in 0..dim {
            let step = |o: isize| if axis == 0 { (o, 0) } else { (0, o) };
            let (dl, dr) = (step(-1), step(1));
            let left = nbr(dl.0, dl.1);
            let right = nbr(dr.0, dr.1);
            let h = g.h(axis);
            let wc = components(state, m);
            let wl = components(&left.state, m);
            let wr = components(&right.state, m);
            // Mixed matter/vacuum neighbor pairs difference one-sidedly
            // toward the matter side (frozen cells are vacuum, so this
            // subsumes the frozen rule). Vacuum cells then fill only from
            // an arriving front, and cells behind a receding front drain
            // past zero within a cell-crossing time and are floored to
            // exact vacuum, instead of leaving a slowly decaying wake.
            let left_matter = left.state.w() >= VACUUM_W_THRESHOLD;
            let right_matter = right.state.w() >= VACUUM_W_THRESHOLD;
            let mut dw = [0.0; 5];
            if left_matter == right_matter {
                for k in 0..m {
                    dw[k] = (wr[k] - wl[k]) / (2.0 * h);
                }
            } else if left_matter {
                for k in 0..m {
                    dw[k] = (wc[k] - wl[k]) / h;
                }
            } else {
                for k in 0..m {
                    dw[k] = (wr[k] - wc[k]) / h;
                }
            }
            matrices.space[axis].mul_vec(&dw[..m], &mut flux[..m]);
            for k in 0..m {
                r[k] -= flux[k];
            }
        }

        // time-matrix solve
        let mut dot = [0.0; 5];
        match frame {
            Frame::Lab => {
                for k in 0..m {
                    let d = matrices.time.get(k, k);
                    dot[k] = r[k] / d;
                }
            }
            Frame::Boosted(_) => {
                matrices.time.cholesky_solve(&r[..m], &mut dot[..m])?;
            }
        }

        // fourth-difference dissipation, scaled by signal speed over h;
        // suppressed on stencils that mix matter and vacuum (it would pump
        // mass across the interface, which only the advection terms may
        // do), and next to frozen cells whose data is inert
        if opts.dissipation > 0.0 && smax > 0.0 {
            for axis in 0..dim {
                let step = |o: isize| if axis == 0 { (o, 0) } else { (0, o) };
                let stencil: Vec<Fetched> = (-2..=2)
                    .map(|o| {
                        let (di, dj) = step(o);
                        nbr(di, dj)
                    })
                    .collect();
                let any_vacuum = stencil
                    .iter()
                    .any(|f| f.state.w() < VACUUM_W_THRESHOLD);
                let any_matter = stencil
                    .iter()
                    .any(|f| f.state.w() >= VACUUM_W_THRESHOLD);
                if (any_vacuum && any_matter) || (lab && stencil.iter().any(|f| f.frozen)) {
                    continue;
                }
                let coeffs = [1.0, -4.0, 6.0, -4.0, 1.0];
                let scale = opts.dissipation * smax / g.h(axis);
                for (k, d) in dot.iter_mut().enumerate().take(m) {
                    let mut d4 = 0.0;
                    for (f, c) in stencil.iter().zip(coeffs) {
                        d4 += c * components(&f.state, m)[k];
                    }
                    *d -= scale * d4;
                }
            }
        }
        dots[flat] = dot;
    }
    Ok(dots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::modified_speed;
    use crate::linalg::SpatialVec;
    use crate::solver::field::FluidField;
    use crate::solver::grid::Grid;

    fn eos() -> EquationOfState {
        EquationOfState::new(1.0, 2.0, 0.5, 1.9).unwrap()
    }

    fn smooth_1d(cells: usize) -> SymmetricField {
        let grid = Grid::new_1d(0.0, 1.0, cells).unwrap();
        let f = FluidField::from_fn(grid, |x| {
            (
                0.2 + 0.05 * (std::f64::consts::TAU * x[0]).sin(),
                SpatialVec::new(&[0.3 + 0.05 * (std::f64::consts::TAU * x[0]).cos()]),
            )
        })
        .unwrap();
        f.to_symmetric(&eos(), &SpatialVec::basis(1, 0)).unwrap()
    }

    #[test]
    fn constant_state_gives_zero_derivative() {
        let grid = Grid::new_2d((0.0, 1.0), 16, (0.0, 1.0), 16).unwrap();
        let f = FluidField::from_fn(grid, |_| (0.4, SpatialVec::new(&[0.2, -0.1]))).unwrap();
        let sym = f.to_symmetric(&eos(), &SpatialVec::basis(2, 0)).unwrap();
        let dots = rhs_symmetric(&eos(), &sym, &Frame::Lab, &RhsOptions::default()).unwrap();
        for d in dots {
            for v in d.iter().take(4) {
                assert!(v.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn vacuum_field_is_inert() {
        let grid = Grid::new_1d(-1.0, 1.0, 32).unwrap();
        let f = FluidField::from_fn(grid, |_| (0.0, SpatialVec::zeros(1))).unwrap();
        let sym = f.to_symmetric(&eos(), &SpatialVec::basis(1, 0)).unwrap();
        let dots = rhs_symmetric(&eos(), &sym, &Frame::Lab, &RhsOptions::default()).unwrap();
        for d in dots {
            assert_eq!(d, [0.0; 5]);
        }
    }

    #[test]
    fn stagnant_matter_is_a_singular_error_in_the_lab_frame() {
        let grid = Grid::new_1d(0.0, 1.0, 16).unwrap();
        let f = FluidField::from_fn(grid, |_| (0.5, SpatialVec::zeros(1))).unwrap();
        let sym = f.to_symmetric(&eos(), &SpatialVec::basis(1, 0)).unwrap();
        assert!(matches!(
            rhs_symmetric(&eos(), &sym, &Frame::Lab, &RhsOptions::default()),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn one_dimensional_derivative_matches_direct_pair_evaluation() {
        // independent evaluation of the same semi-discretization written in
        // the (w, v) variables instead of matrices
        let e = eos();
        let eps = e.eps();
        let sym = smooth_1d(64);
        let opts = RhsOptions {
            dissipation: 0.0,
            boundary: Boundary::Periodic,
        };
        let dots = rhs_symmetric(&e, &sym, &Frame::Lab, &opts).unwrap();
        let n = sym.values.len();
        let h = sym.grid.h(0);
        for (i, dot) in dots.iter().enumerate() {
            let l = &sym.values[(i + n - 1) % n];
            let r = &sym.values[(i + 1) % n];
            let c0 = &sym.values[i];
            let dw = (r.w() - l.w()) / (2.0 * h);
            let dv = (r.v() - l.v()) / (2.0 * h);
            let rho = e.rho_of_w(c0.w()).unwrap();
            let c = e.sound_speed(rho).unwrap();
            let u = speed_of_modified(eps, c0.v()).unwrap() * c0.udir[0];
            let den = 1.0 - eps.powi(4) * u * u * c * c;
            let w_dot = -((1.0 - eps * eps * c * c) * u * dw
                + c * (1.0 - eps * eps * u * u) * dv)
                / den;
            let v_dot = -(c * (1.0 - eps * eps * u * u) * dw
                + (1.0 - eps * eps * c * c) * u * dv)
                / den;
            let got_w = 0.5 * (dot[0] - dot[1]);
            let got_v = 0.5 * (dot[0] + dot[1]);
            assert!(
                (got_w - w_dot).abs() < 1e-12 && (got_v - v_dot).abs() < 1e-12,
                "cell {i}: ({got_w}, {got_v}) vs ({w_dot}, {v_dot})"
            );
            // the direction cannot turn in one dimension (up to the
            // roundoff of normalizing u / |u|, which leaves ~1e-16 in the
            // off-diagonal coupling blocks)
            assert!(dot[2].abs() < 1e-13, "direction dot = {}", dot[2]);
        }
    }

    #[test]
    fn boosted_solve_handles_stagnation_points() {
        // matter at rest is fatal in the lab frame but fine after a boost
        let e = eos();
        let grid = Grid::new_1d(-1.0, 1.0, 32).unwrap();
        let f = FluidField::from_fn(grid, |x| {
            let r: f64 = (1.0 - (x[0] / 0.5) * (x[0] / 0.5)).max(0.0);
            (0.3 * r * r, SpatialVec::zeros(1))
        })
        .unwrap();
        let boost = Boost::new(e.eps(), SpatialVec::new(&[0.9])).unwrap();
        let mut vals = Vec::new();
        for (rho, u) in f.rho.iter().zip(&f.u) {
            let up = boost.compose_velocity(u).unwrap();
            vals.push(
                crate::kinematics::to_symmetric_with_fallback(
                    &e,
                    &crate::kinematics::PhysicalState { rho: *rho, u: up },
                    &(*boost.dir() * -1.0),
                )
                .unwrap(),
            );
        }
        let sym = SymmetricField {
            grid: f.grid.clone(),
            values: vals,
        };
        let ghost_v = modified_speed(e.eps(), boost.speed()).unwrap();
        let ghost =
            SymmetricState::new(ghost_v, ghost_v, *boost.dir() * -1.0).unwrap();
        let opts = RhsOptions {
            dissipation: DEFAULT_DISSIPATION,
            boundary: Boundary::Ghost(ghost),
        };
        let dots = rhs_symmetric(&e, &sym, &Frame::Boosted(boost), &opts).unwrap();
        // vacuum cells see a uniform state moving at -U: zero derivative
        assert!(dots[0][0].abs() < 1e-12 && dots[0][1].abs() < 1e-12);
        // the bump interior must evolve
        let mid = sym.values.len() / 2;
        assert!(dots[mid][0].abs() > 1e-6 || dots[mid][1].abs() > 1e-6);
    }

    #[test]
    fn signal_speed_respects_the_causal_bound() {
        let e = eos();
        let sym = smooth_1d(32);
        let s = max_signal_speed(&e, &sym, &Frame::Lab).unwrap();
        assert!(s > 0.0 && s < 1.0 / e.eps());
        let boost = Boost::new(e.eps(), SpatialVec::new(&[0.9])).unwrap();
        let sb = max_signal_speed(&e, &sym, &Frame::Boosted(boost)).unwrap();
        assert!(sb > s);
    }
}
