//! Deterministic CSV serialization of solution slices and run reports.
//!
//! Numbers are printed with Rust's shortest-roundtrip formatting, so the
//! same inputs always produce byte-identical output.

use crate::eos::EquationOfState;
use crate::error::Result;
use crate::kinematics::to_symmetric_with_fallback;
use crate::linalg::SpatialVec;
use crate::solver::field::FluidField;
use crate::solver::frames::TameRunReport;

use std::fmt::Write as _;

/// One row per cell: coordinates, physical state, and the symmetric
/// variables derived from it. Stagnant cells report the first basis
/// direction as their (arbitrary) flow direction.
pub fn snapshot_csv(eos: &EquationOfState, field: &FluidField, t: f64) -> Result<String> {
    let n = field.grid.n();
    let mut out = String::new();
    out.push_str("t,x1");
    if n == 2 {
        out.push_str(",x2");
    }
    out.push_str(",rho,u1");
    if n == 2 {
        out.push_str(",u2");
    }
    out.push_str(",w,v,z_plus,z_minus,udir1");
    if n == 2 {
        out.push_str(",udir2");
    }
    out.push('\n');

    let fallback = SpatialVec::basis(n, 0);
    for flat in 0..field.grid.total_cells() {
        let x = field.grid.cell_center(flat);
        let rho = field.rho[flat];
        let u = &field.u[flat];
        let sym = to_symmetric_with_fallback(
            eos,
            &crate::kinematics::PhysicalState { rho, u: *u },
            &fallback,
        )?;
        write!(out, "{t},{}", x[0]).expect("string writes cannot fail");
        if n == 2 {
            write!(out, ",{}", x[1]).expect("string writes cannot fail");
        }
        write!(out, ",{rho},{}", u[0]).expect("string writes cannot fail");
        if n == 2 {
            write!(out, ",{}", u[1]).expect("string writes cannot fail");
        }
        write!(
            out,
            ",{},{},{},{},{}",
            sym.w(),
            sym.v(),
            sym.z_plus,
            sym.z_minus,
            sym.udir[0]
        )
        .expect("string writes cannot fail");
        if n == 2 {
            write!(out, ",{}", sym.udir[1]).expect("string writes cannot fail");
        }
        out.push('\n');
    }
    Ok(out)
}

/// The support-radius history of a run, one `(t, radius)` row per stored
/// time.
pub fn tame_report_csv(report: &TameRunReport) -> String {
    let mut out = String::from("t,support_radius\n");
    for (t, r) in &report.support_radius_series {
        writeln!(out, "{t},{r}").expect("string writes cannot fail");
    }
    out
}
