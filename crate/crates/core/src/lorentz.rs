//! Lorentz boosts with an explicit signal-speed scale.
//!
//! The light speed enters as `1/eps`, so every formula here carries `eps`
//! explicitly and degenerates gracefully as `eps -> 0`. Besides coordinate
//! maps and velocity composition, this module exposes the boosted speed in
//! scaled variables (`X = eps u`, `Z = eps U`) and a closed form for its
//! square, which is what the positivity analysis of the boosted symmetrizer
//! is built on: boosting a slow flow by a slightly faster frame velocity
//! pins the transformed speed inside a band bounded away from both zero and
//! the causal limit.

use crate::error::{Error, Result};
use crate::kinematics::modified_speed;
use crate::linalg::SpatialVec;

/// A pure boost with frame velocity `U`, `0 < eps |U| < 1`.
#[derive(Clone, Debug)]
pub struct Boost {
    eps: f64,
    velocity: SpatialVec,
    dir: SpatialVec,
    speed: f64,
    rapidity: f64,
    gamma: f64,
}

impl Boost {
    pub fn new(eps: f64, velocity: SpatialVec) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidInput(format!(
                "boost needs eps > 0, got {eps}"
            )));
        }
        if !velocity.is_finite() {
            return Err(Error::InvalidInput(
                "boost velocity has non-finite entries".to_string(),
            ));
        }
        let speed = velocity.norm();
        if speed.is_nan() || speed <= 0.0 {
            return Err(Error::InvalidInput(
                "boost velocity must be nonzero".to_string(),
            ));
        }
        if eps * speed >= 1.0 {
            return Err(Error::Admissibility(format!(
                "boost speed is not sub-causal: eps |U| = {}",
                eps * speed
            )));
        }
        let dir = velocity.normalized().expect("nonzero by the checks above");
        let rapidity = modified_speed(eps, speed)?;
        let gamma = 1.0 / (1.0 - eps * eps * speed * speed).sqrt();
        Ok(Self {
            eps,
            velocity,
            dir,
            speed,
            rapidity,
            gamma,
        })
    }

    /// Builds the boost whose rapidity-like modified speed is `v` along
    /// `dir`.
    pub fn from_rapidity(eps: f64, v: f64, dir: &SpatialVec) -> Result<Self> {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidInput(format!(
                "boost rapidity must be positive, got {v}"
            )));
        }
        let d = dir.normalized().ok_or_else(|| {
            Error::InvalidInput("boost direction is zero".to_string())
        })?;
        let speed = (eps * v).tanh() / eps;
        Self::new(eps, d * speed)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn velocity(&self) -> &SpatialVec {
        &self.velocity
    }

    pub fn dir(&self) -> &SpatialVec {
        &self.dir
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn rapidity(&self) -> f64 {
        self.rapidity
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn inverse(&self) -> Self {
        let mut inv = self.clone();
        inv.velocity = self.velocity * -1.0;
        inv.dir = self.dir * -1.0;
        inv
    }

    /// Longitudinal stretch `(I + (gamma - 1) d d^T) x`.
    pub fn spatial_stretch(&self, x: &SpatialVec) -> SpatialVec {
        *x + self.dir * ((self.gamma - 1.0) * self.dir.dot(x))
    }

    /// Inverse of [`spatial_stretch`].
    pub fn spatial_unstretch(&self, x: &SpatialVec) -> SpatialVec {
        *x + self.dir * ((1.0 / self.gamma - 1.0) * self.dir.dot(x))
    }

    /// Maps event coordinates to the boosted frame:
    /// `t' = gamma (t - eps^2 U . x)`,
    /// `x' = -gamma U t + (I + (gamma - 1) d d^T) x`.
    pub fn coords(&self, t: f64, x: &SpatialVec) -> (f64, SpatialVec) {
        let tp = self.gamma * (t - self.eps * self.eps * self.velocity.dot(x));
        let xp = self.spatial_stretch(x) - self.velocity * (self.gamma * t);
        (tp, xp)
    }

    /// Relativistic velocity composition: the velocity, as seen from the
    /// boosted frame, of a particle moving at `u` in the original frame.
    pub fn compose_velocity(&self, u: &SpatialVec) -> Result<SpatialVec> {
        if self.eps * u.norm() >= 1.0 {
            return Err(Error::Admissibility(format!(
                "compose_velocity: eps |u| = {} not sub-causal",
                self.eps * u.norm()
            )));
        }
        let denom = 1.0 - self.eps * self.eps * self.velocity.dot(u);
        // keep the parallel part, shrink the perpendicular part by gamma
        let num = *u * (1.0 / self.gamma)
            + self.dir * ((1.0 - 1.0 / self.gamma) * self.dir.dot(u))
            - self.velocity;
        Ok(num.scaled(1.0 / denom))
    }
}

/// Velocity composition in scaled variables: for `X = eps u` and
/// `Z = eps U`, returns `eps` times the composed velocity,
/// `(g^-1 X + (1 - g^-1)(Zhat . X) Zhat - Z) / (1 - X . Z)` with
/// `g = 1/sqrt(1 - |Z|^2)`. `Z = 0` returns `X` unchanged.
pub fn boost_velocity_scaled(x: &SpatialVec, z: &SpatialVec) -> Result<SpatialVec> {
    let rx = x.norm();
    let rz = z.norm();
    if rx >= 1.0 || rz >= 1.0 || !x.is_finite() || !z.is_finite() {
        return Err(Error::Admissibility(format!(
            "scaled speeds must be < 1, got |X| = {rx}, |Z| = {rz}"
        )));
    }
    if rz == 0.0 {
        return Ok(*x);
    }
    let zhat = z.normalized().expect("|Z| > 0");
    let ginv = (1.0 - rz * rz).sqrt();
    let num = *x * ginv + zhat * ((1.0 - ginv) * zhat.dot(x)) - *z;
    Ok(num.scaled(1.0 / (1.0 - x.dot(z))))
}

/// Squared norm of [`boost_velocity_scaled`] through a closed form that
/// never builds the composed vector: with `r1 = |Z|` and `X1 = X . Zhat`,
/// `|Phi|^2 = ((X1 - r1)^2 + (1 - r1^2)(|X|^2 - X1^2)) / (1 - r1 X1)^2`.
pub fn transformed_speed_sq(x: &SpatialVec, z: &SpatialVec) -> Result<f64> {
    let rx = x.norm();
    let r1 = z.norm();
    if rx >= 1.0 || r1 >= 1.0 || !x.is_finite() || !z.is_finite() {
        return Err(Error::Admissibility(format!(
            "scaled speeds must be < 1, got |X| = {rx}, |Z| = {r1}"
        )));
    }
    if r1 == 0.0 {
        return Ok(rx * rx);
    }
    let x1 = x.dot(z) / r1;
    let perp_sq = (x.norm_sq() - x1 * x1).max(0.0);
    let d = 1.0 - r1 * x1;
    Ok(((x1 - r1) * (x1 - r1) + (1.0 - r1 * r1) * perp_sq) / (d * d))
}

/// Range of the transformed speed when `|X| <= r0` and `|Z| = r1`:
/// the minimum `(r1 - r0)/(1 - r0 r1)` is attained with `X` aligned with
/// `Z`, the maximum `(r1 + r0)/(1 + r0 r1)` with `X` opposed. Requires
/// `0 <= r0 < r1 < 1` so the band stays away from zero.
pub fn speed_bounds(r0: f64, r1: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&r0) || !(0.0..1.0).contains(&r1) || r0 >= r1 {
        return Err(Error::InvalidInput(format!(
            "speed_bounds needs 0 <= r0 < r1 < 1, got r0 = {r0}, r1 = {r1}"
        )));
    }
    Ok(((r1 - r0) / (1.0 - r0 * r1), (r1 + r0) / (1.0 + r0 * r1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> SpatialVec {
        loop {
            let mut c = [0.0; 3];
            for v in c.iter_mut().take(dim) {
                *v = rng.gen_range(-1.0..1.0);
            }
            let x = SpatialVec::new(&c[..dim]);
            if x.norm() <= 1.0 {
                return x * radius;
            }
        }
    }

    #[test]
    fn boost_preserves_the_interval() {
        let eps = 0.5;
        let b = Boost::new(eps, SpatialVec::new(&[0.9, -0.4, 0.3])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let t: f64 = rng.gen_range(-2.0..2.0);
            let x = sample_ball(&mut rng, 3, 3.0);
            let (tp, xp) = b.coords(t, &x);
            let s = t * t / (eps * eps) - x.norm_sq();
            let sp = tp * tp / (eps * eps) - xp.norm_sq();
            assert!((s - sp).abs() <= 1e-10 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn coordinate_map_matches_rapidity_form() {
        // Along the boost axis the map factors over the null directions:
        // t' + eps x'_par = e^{-eps V} (t + eps x_par) and
        // t' - eps x'_par = e^{+eps V} (t - eps x_par);
        // the orthogonal part is untouched.
        let eps = 0.4;
        let b = Boost::new(eps, SpatialVec::new(&[1.1, 0.7])).unwrap();
        let v = b.rapidity();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(-2.0..2.0);
            let x = sample_ball(&mut rng, 2, 2.0);
            let (tp, xp) = b.coords(t, &x);
            let xpar = b.dir().dot(&x);
            let xppar = b.dir().dot(&xp);
            let plus = tp + eps * xppar - (-(eps * v)).exp() * (t + eps * xpar);
            let minus = tp - eps * xppar - (eps * v).exp() * (t - eps * xpar);
            assert!(plus.abs() < 1e-12 * (1.0 + t.abs() + x.norm()));
            assert!(minus.abs() < 1e-12 * (1.0 + t.abs() + x.norm()));
            let perp = x - *b.dir() * xpar;
            let perp_p = xp - *b.dir() * xppar;
            assert!((perp - perp_p).norm() < 1e-13 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn roundtrip_through_the_inverse() {
        let b = Boost::new(0.3, SpatialVec::new(&[-0.6, 1.2, 0.4])).unwrap();
        let inv = b.inverse();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(-1.0..1.0);
            let x = sample_ball(&mut rng, 3, 2.0);
            let (tp, xp) = b.coords(t, &x);
            let (tb, xb) = inv.coords(tp, &xp);
            assert!((tb - t).abs() < 1e-12 * (1.0 + t.abs()));
            assert!((xb - x).norm() < 1e-12 * (1.0 + x.norm()));
            let u = sample_ball(&mut rng, 3, 1.5);
            if b.eps() * u.norm() < 0.98 {
                let up = b.compose_velocity(&u).unwrap();
                let ub = inv.compose_velocity(&up).unwrap();
                assert!((ub - u).norm() < 1e-11 * (1.0 + u.norm()));
            }
        }
    }

    #[test]
    fn velocity_composition_matches_componentwise_formulas() {
        // With U along an axis the composed parallel and orthogonal parts
        // have the familiar scalar forms; compare against the matrix form.
        let eps = 0.5;
        let uu = 1.3;
        let b = Boost::new(eps, SpatialVec::new(&[uu, 0.0, 0.0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let u = sample_ball(&mut rng, 3, 1.8);
            if eps * u.norm() >= 0.95 {
                continue;
            }
            let got = b.compose_velocity(&u).unwrap();
            let denom = 1.0 - eps * eps * uu * u[0];
            let par = (u[0] - uu) / denom;
            let ort = 1.0 / (b.gamma() * denom);
            assert!((got[0] - par).abs() < 1e-13 * (1.0 + par.abs()));
            assert!((got[1] - u[1] * ort).abs() < 1e-13);
            assert!((got[2] - u[2] * ort).abs() < 1e-13);
        }
    }

    #[test]
    fn rapidities_add_for_parallel_boosts() {
        let eps = 0.7;
        let d = SpatialVec::new(&[0.0, 1.0]);
        let b1 = Boost::from_rapidity(eps, 0.9, &d).unwrap();
        let b2 = Boost::from_rapidity(eps, 0.4, &d).unwrap();
        // Seen from frame 2's perspective, frame 1's origin recedes at the
        // composed speed; its rapidity is the sum.
        let u12 = b2.compose_velocity(&(d * -b1.speed())).unwrap();
        let total = modified_speed(eps, u12.norm()).unwrap();
        assert!((total - 1.3).abs() < 1e-12);
        assert!(u12.dot(&d) < 0.0);
    }

    #[test]
    fn scaled_composition_agrees_with_the_boost() {
        let eps = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..300 {
            let uvec = sample_ball(&mut rng, 3, 1.9);
            let bvec = sample_ball(&mut rng, 3, 1.9);
            if eps * uvec.norm() >= 0.97 || eps * bvec.norm() <= 1e-6 || eps * bvec.norm() >= 0.97
            {
                continue;
            }
            let b = Boost::new(eps, bvec).unwrap();
            let composed = b.compose_velocity(&uvec).unwrap() * eps;
            let scaled =
                boost_velocity_scaled(&(uvec * eps), &(bvec * eps)).unwrap();
            assert!((composed - scaled).norm() < 1e-12 * (1.0 + scaled.norm()));
        }
    }

    #[test]
    fn closed_form_speed_matches_the_composed_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..500 {
            let x = sample_ball(&mut rng, 3, 0.95);
            let z = sample_ball(&mut rng, 3, 0.95);
            let phi = boost_velocity_scaled(&x, &z).unwrap();
            let wsq = transformed_speed_sq(&x, &z).unwrap();
            assert!(
                (phi.norm_sq() - wsq).abs() <= 1e-12 * (1.0 + wsq),
                "|Phi|^2 = {} vs closed form {}",
                phi.norm_sq(),
                wsq
            );
        }
        let x = SpatialVec::new(&[0.3, -0.1, 0.2]);
        assert!(
            (transformed_speed_sq(&x, &SpatialVec::zeros(3)).unwrap() - x.norm_sq()).abs()
                < 1e-15
        );
    }

    #[test]
    fn band_extremes_are_attained_on_the_axis() {
        let r0 = 0.35;
        let r1 = 0.6;
        let z = SpatialVec::new(&[0.0, r1, 0.0]);
        let zhat = z.normalized().unwrap();
        let (lo, hi) = speed_bounds(r0, r1).unwrap();
        let at = |x: &SpatialVec| transformed_speed_sq(x, &z).unwrap().sqrt();
        assert!((at(&(zhat * r0)) - lo).abs() < 1e-14);
        assert!((at(&(zhat * -r0)) - hi).abs() < 1e-14);
        assert!((at(&SpatialVec::zeros(3)) - r1).abs() < 1e-14);
        assert!(speed_bounds(0.6, 0.35).is_err());
        assert!(speed_bounds(0.2, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn prop_transformed_speed_stays_in_the_band(
            xc in proptest::array::uniform3(-1.0f64..1.0),
            zc in proptest::array::uniform3(-1.0f64..1.0),
            r0 in 0.01f64..0.5,
            r1s in 0.05f64..0.95,
        ) {
            // scale X into the slow ball and Z onto the faster shell
            let r1 = r0 + (1.0 - r0) * r1s * 0.999;
            prop_assume!(r1 < 1.0 && r1 > r0);
            let xraw = SpatialVec::new(&xc);
            let zraw = SpatialVec::new(&zc);
            prop_assume!(xraw.norm() > 1e-3 && zraw.norm() > 1e-3);
            let x = xraw * (r0 / xraw.norm() * 0.999);
            let z = zraw * (r1 / zraw.norm());
            let speed = transformed_speed_sq(&x, &z).unwrap().sqrt();
            let (lo, hi) = speed_bounds(r0, r1).unwrap();
            prop_assert!(speed >= lo - 1e-12);
            prop_assert!(speed <= hi + 1e-12);

            // the composed flow always recedes along the boost axis
            let phi = boost_velocity_scaled(&x, &z).unwrap();
            prop_assert!(z.dot(&phi) < 0.0);
        }
    }
}
