//! State representations and the velocity transform.
//!
//! Physical states carry density and velocity. The symmetric formulation
//! instead carries the characteristic pair `z = v + w`, `z = v - w` built
//! from the density transform `w` (see [`crate::eos`]) and a rapidity-like
//! modified speed `v = atanh(eps |u|) / eps`, together with the unit flow
//! direction. Direction is tracked separately because the symmetric system
//! is degenerate exactly where the speed vanishes, and because near vacuum
//! the direction is the only meaningful remnant of the velocity.

use crate::eos::EquationOfState;
use crate::error::{Error, Result};
use crate::linalg::{SmallMatrix, SpatialVec};

/// Speeds below this are treated as directionless for the purpose of
/// extracting a unit flow direction.
pub const VACUUM_SPEED_THRESHOLD: f64 = 1e-13;

/// Allowed deviation of a stored flow direction from unit length.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Density and velocity at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalState {
    pub rho: f64,
    pub u: SpatialVec,
}

/// Characteristic pair plus unit flow direction.
///
/// Invariants enforced at construction: `z_plus >= z_minus` (the transform
/// `w` is nonnegative), `z_plus + z_minus >= 0` (the modified speed is
/// nonnegative), and the direction has unit length. Tiny violations within
/// roundoff of zero are accepted and read back clamped.
#[derive(Clone, Copy, Debug)]
pub struct SymmetricState {
    pub z_plus: f64,
    pub z_minus: f64,
    pub udir: SpatialVec,
}

impl SymmetricState {
    pub fn new(z_plus: f64, z_minus: f64, udir: SpatialVec) -> Result<Self> {
        if !(z_plus.is_finite() && z_minus.is_finite() && udir.is_finite()) {
            return Err(Error::InvalidInput(
                "symmetric state has non-finite entries".to_string(),
            ));
        }
        let scale = 1.0 + z_plus.abs() + z_minus.abs();
        if z_plus - z_minus < -UNIT_NORM_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "z_plus = {z_plus} < z_minus = {z_minus}"
            )));
        }
        if z_plus + z_minus < -UNIT_NORM_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "negative modified speed: z_plus + z_minus = {}",
                z_plus + z_minus
            )));
        }
        if (udir.norm() - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "flow direction has norm {}, expected 1",
                udir.norm()
            )));
        }
        Ok(Self {
            z_plus,
            z_minus,
            udir,
        })
    }

    /// Density transform `w = (z_plus - z_minus) / 2`, clamped at zero.
    pub fn w(&self) -> f64 {
        (0.5 * (self.z_plus - self.z_minus)).max(0.0)
    }

    /// Modified speed `v = (z_plus + z_minus) / 2`, clamped at zero.
    pub fn v(&self) -> f64 {
        (0.5 * (self.z_plus + self.z_minus)).max(0.0)
    }
}

/// Modified speed `v = atanh(eps * speed) / eps`; the identity when
/// `eps = 0`. Rejects negative speeds and speeds at or beyond the causal
/// bound `1/eps`.
pub fn modified_speed(eps: f64, speed: f64) -> Result<f64> {
    if !speed.is_finite() || speed < 0.0 {
        return Err(Error::Domain(format!(
            "modified_speed: speed = {speed} negative"
        )));
    }
    if eps == 0.0 {
        return Ok(speed);
    }
    let x = eps * speed;
    if x >= 1.0 {
        return Err(Error::Admissibility(format!(
            "modified_speed: eps * speed = {x} >= 1"
        )));
    }
    Ok(x.atanh() / eps)
}

/// Inverse of [`modified_speed`]: `speed = tanh(eps * v) / eps`.
pub fn speed_of_modified(eps: f64, v: f64) -> Result<f64> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Domain(format!(
            "speed_of_modified: v = {v} negative"
        )));
    }
    if eps == 0.0 {
        Ok(v)
    } else {
        Ok((eps * v).tanh() / eps)
    }
}

/// Orthogonal projector `I - d d^T / |d|^2` onto the complement of `d`.
pub fn projector(d: &SpatialVec) -> Result<SmallMatrix> {
    let n = d.norm();
    if n.is_nan() || n <= VACUUM_SPEED_THRESHOLD {
        return Err(Error::Degenerate(format!(
            "projector: direction norm {n} too small to normalize"
        )));
    }
    let dim = d.dim();
    let mut e = SmallMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            e.add_to(i, j, -d[i] * d[j] / (n * n));
        }
    }
    Ok(e)
}

/// Converts a physical state to the symmetric variables. Fails with a
/// degeneracy error when the speed is below [`VACUUM_SPEED_THRESHOLD`],
/// because no flow direction can be extracted; see
/// [`to_symmetric_with_fallback`] for the variant used at vacuum and
/// stagnation points.
pub fn to_symmetric(eos: &EquationOfState, state: &PhysicalState) -> Result<SymmetricState> {
    let speed = state.u.norm();
    if speed < VACUUM_SPEED_THRESHOLD {
        return Err(Error::Degenerate(format!(
            "to_symmetric: speed {speed} carries no direction; supply a fallback"
        )));
    }
    to_symmetric_with_fallback(eos, state, &SpatialVec::basis(state.u.dim(), 0))
}

/// Converts a physical state to the symmetric variables, using `fallback`
/// (normalized) as the flow direction when the speed is below
/// [`VACUUM_SPEED_THRESHOLD`].
pub fn to_symmetric_with_fallback(
    eos: &EquationOfState,
    state: &PhysicalState,
    fallback: &SpatialVec,
) -> Result<SymmetricState> {
    let speed = state.u.norm();
    let w = eos.w_of_rho(state.rho)?;
    let v = modified_speed(eos.eps(), speed)?;
    let udir = if speed < VACUUM_SPEED_THRESHOLD {
        fallback.normalized().ok_or_else(|| {
            Error::Degenerate("to_symmetric: fallback direction is zero".to_string())
        })?
    } else {
        state
            .u
            .normalized()
            .expect("speed above threshold must normalize")
    };
    SymmetricState::new(v + w, v - w, udir)
}

/// Converts symmetric variables back to density and velocity. The modified
/// speed may sit a hair below zero from roundoff and is clamped; a genuinely
/// negative speed is a domain error.
pub fn from_symmetric(eos: &EquationOfState, sym: &SymmetricState) -> Result<PhysicalState> {
    let scale = 1.0 + sym.z_plus.abs() + sym.z_minus.abs();
    let raw_w = 0.5 * (sym.z_plus - sym.z_minus);
    let raw_v = 0.5 * (sym.z_plus + sym.z_minus);
    if raw_w < -UNIT_NORM_TOL * scale {
        return Err(Error::Domain(format!(
            "from_symmetric: z_plus - z_minus = {} negative",
            2.0 * raw_w
        )));
    }
    if raw_v < -UNIT_NORM_TOL * scale {
        return Err(Error::Domain(format!(
            "from_symmetric: modified speed {raw_v} negative"
        )));
    }
    let rho = eos.rho_of_w(raw_w.max(0.0))?;
    let speed = speed_of_modified(eos.eps(), raw_v.max(0.0))?;
    let udir = sym.udir.normalized().ok_or_else(|| {
        Error::Degenerate("from_symmetric: flow direction is zero".to_string())
    })?;
    Ok(PhysicalState {
        rho,
        u: udir * speed,
    })
}
