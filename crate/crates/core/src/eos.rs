//! Polytropic equation of state and the vacuum-regular density transform.
//!
//! Pressure follows the power law `p = k * rho^gamma`. The transform
//! `w(rho)` integrates `sound_speed / enthalpy_density` from the vacuum up to
//! `rho`; it stays finite at `rho = 0` even though the integrand blows up
//! there, and it is the quantity the symmetric formulation evolves in place
//! of the density. All state admissibility in this crate is phrased against
//! a density cap `rho_max` chosen so the sound speed stays strictly below
//! the causal bound `1/eps`.

use crate::error::{Error, Result};

/// Relative safety margin used when deriving the default density cap:
/// the cap is placed where `eps * sound_speed` reaches this fraction of 1.
pub const DEFAULT_SOUND_SPEED_MARGIN: f64 = 0.99;
/// Density cap used when `eps = 0`, where no causal bound applies.
pub const DEFAULT_RHO_MAX_NONRELATIVISTIC: f64 = 1e6;
/// Absolute tolerance of the quadrature behind `w_of_rho`.
pub const W_QUADRATURE_TOL: f64 = 1e-13;

/// Barotropic pressure law `p = k rho^gamma` with signal-scaling parameter
/// `eps` (inverse light speed) and an admissible density range
/// `[0, rho_max]`.
#[derive(Clone, Debug)]
pub struct EquationOfState {
    k: f64,
    gamma: f64,
    eps: f64,
    rho_max: f64,
    w_max: f64,
}

/// Result of sampling `sound_speed / w` down toward the vacuum.
///
/// A bounded ratio is what keeps characteristic growth of `w` exponential
/// near vacuum; `finite` is false when the sampled ratio keeps climbing as
/// `rho -> 0`.
#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub sup_ratio: f64,
    pub ratio_near_vacuum: f64,
    pub finite: bool,
    pub samples: usize,
}

impl EquationOfState {
    pub fn new(k: f64, gamma: f64, eps: f64, rho_max: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
        }
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::InvalidInput(format!(
                "gamma must exceed 1, got {gamma}"
            )));
        }
        if !(eps.is_finite() && (0.0..1.0).contains(&eps)) {
            return Err(Error::InvalidInput(format!(
                "eps must lie in [0, 1), got {eps}"
            )));
        }
        if !(rho_max.is_finite() && rho_max > 0.0) {
            return Err(Error::InvalidInput(format!(
                "rho_max must be positive, got {rho_max}"
            )));
        }
        let mut eos = Self {
            k,
            gamma,
            eps,
            rho_max,
            w_max: 0.0,
        };
        let c_max = eos.sound_speed_raw(rho_max);
        if eps > 0.0 && eps * c_max >= 1.0 {
            return Err(Error::Admissibility(format!(
                "eps * sound_speed(rho_max) = {:.6} >= 1; the system is not \
                 hyperbolic on [0, rho_max]",
                eps * c_max
            )));
        }
        eos.w_max = eos.w_from_sigma(eos.sigma_of_rho(rho_max));
        if !eos.w_max.is_finite() {
            return Err(Error::InvalidInput(
                "w(rho_max) is not finite".to_string(),
            ));
        }
        Ok(eos)
    }

    /// Constructs with the largest density cap that keeps
    /// `eps * sound_speed <= DEFAULT_SOUND_SPEED_MARGIN` (a fixed large cap
    /// when `eps = 0`).
    pub fn with_default_rho_max(k: f64, gamma: f64, eps: f64) -> Result<Self> {
        if eps > 0.0 {
            // eps^2 k gamma rho^(gamma-1) = margin^2
            let m2 = DEFAULT_SOUND_SPEED_MARGIN * DEFAULT_SOUND_SPEED_MARGIN;
            let rho_max = (m2 / (eps * eps * k * gamma)).powf(1.0 / (gamma - 1.0));
            Self::new(k, gamma, eps, rho_max)
        } else {
            Self::new(k, gamma, eps, DEFAULT_RHO_MAX_NONRELATIVISTIC)
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// `w(rho_max)`, the upper end of the admissible transform range.
    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    fn check_rho_domain(&self, rho: f64, what: &str) -> Result<()> {
        if !rho.is_finite() || rho < 0.0 || rho > self.rho_max * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "{what}: rho = {rho} outside [0, {}]",
                self.rho_max
            )));
        }
        Ok(())
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        self.check_rho_domain(rho, "pressure")?;
        Ok(self.k * rho.powf(self.gamma))
    }

    fn sound_speed_raw(&self, rho: f64) -> f64 {
        // c = sqrt(p'(rho)) = sqrt(k gamma) rho^((gamma-1)/2)
        (self.k * self.gamma).sqrt() * rho.powf(0.5 * (self.gamma - 1.0))
    }

    /// Sound speed `sqrt(p'(rho))`. Rejects states whose signal speed would
    /// reach the causal bound before rejecting out-of-range densities, so a
    /// super-causal density reports the physical violation rather than the
    /// bookkeeping one.
    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::Domain(format!("sound_speed: rho = {rho} negative")));
        }
        let c = self.sound_speed_raw(rho);
        if self.eps > 0.0 && self.eps * c >= 1.0 {
            return Err(Error::Admissibility(format!(
                "eps * sound_speed = {:.6} >= 1 at rho = {rho}",
                self.eps * c
            )));
        }
        self.check_rho_domain(rho, "sound_speed")?;
        Ok(c)
    }

    /// Relativistic enthalpy-like density `q = rho + eps^2 p`.
    pub fn enthalpy_density(&self, rho: f64) -> Result<f64> {
        self.check_rho_domain(rho, "enthalpy_density")?;
        Ok(rho + self.eps * self.eps * self.k * rho.powf(self.gamma))
    }

    fn sigma_of_rho(&self, rho: f64) -> f64 {
        rho.powf(0.5 * (self.gamma - 1.0))
    }

    fn rho_of_sigma(&self, sigma: f64) -> f64 {
        sigma.powf(2.0 / (self.gamma - 1.0))
    }

    /// Coefficient `A` of the substituted integrand: with
    /// `s = sigma^(2/(gamma-1))` the integrand `c(s)/q(s) ds` becomes
    /// `A / (1 + eps^2 k sigma^2) dsigma`, which is smooth on the whole
    /// range. The substitution removes the `s^((gamma-3)/2)` endpoint
    /// singularity of the raw integrand.
    fn subst_coefficient(&self) -> f64 {
        2.0 * (self.k * self.gamma).sqrt() / (self.gamma - 1.0)
    }

    fn w_from_sigma(&self, sigma_hi: f64) -> f64 {
        let a = self.subst_coefficient();
        let b2 = self.eps * self.eps * self.k;
        if b2 == 0.0 {
            return a * sigma_hi;
        }
        adaptive_gauss_legendre(&|s| a / (1.0 + b2 * s * s), 0.0, sigma_hi, W_QUADRATURE_TOL)
    }

    /// Vacuum-regular density transform `w(rho) = int_0^rho c/q ds`.
    pub fn w_of_rho(&self, rho: f64) -> Result<f64> {
        self.check_rho_domain(rho, "w_of_rho")?;
        Ok(self.w_from_sigma(self.sigma_of_rho(rho)))
    }

    /// Inverse of [`w_of_rho`] by bracketed Newton iteration in the
    /// substituted variable, where the slope is bounded and the map is
    /// concave; relative accuracy ~1e-12.
    pub fn rho_of_w(&self, w: f64) -> Result<f64> {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Domain(format!("rho_of_w: w = {w} negative")));
        }
        if w > self.w_max * (1.0 + 1e-9) {
            return Err(Error::Domain(format!(
                "rho_of_w: w = {w} exceeds w(rho_max) = {}",
                self.w_max
            )));
        }
        if w == 0.0 {
            return Ok(0.0);
        }
        let a = self.subst_coefficient();
        let b2 = self.eps * self.eps * self.k;
        let sigma_max = self.sigma_of_rho(self.rho_max);
        if b2 == 0.0 {
            return Ok(self.rho_of_sigma((w / a).min(sigma_max)));
        }
        let mut lo = 0.0_f64;
        let mut hi = sigma_max;
        // w(sigma) <= A sigma, so this starts at or below the root.
        let mut sig = (w / a).min(sigma_max);
        for _ in 0..80 {
            let f = self.w_from_sigma(sig) - w;
            if f > 0.0 {
                hi = sig;
            } else {
                lo = sig;
            }
            let fp = a / (1.0 + b2 * sig * sig);
            let mut next = sig - f / fp;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - sig).abs() <= 1e-14 * next.max(1e-300) {
                sig = next;
                break;
            }
            sig = next;
        }
        Ok(self.rho_of_sigma(sig).clamp(0.0, self.rho_max))
    }

    /// Samples `sound_speed / w` on a geometric density ladder down to
    /// `1e-12 * rho_max` and reports whether the ratio stays bounded toward
    /// the vacuum.
    pub fn check_growth_condition(&self) -> GrowthReport {
        let n = 97usize;
        let decades = 12.0;
        let mut ratios = Vec::with_capacity(n);
        for i in 0..n {
            let rho = self.rho_max * 10f64.powf(-decades * i as f64 / (n - 1) as f64);
            let c = self.sound_speed_raw(rho);
            let w = self.w_from_sigma(self.sigma_of_rho(rho));
            ratios.push(if w > 0.0 { c / w } else { f64::INFINITY });
        }
        let sup = ratios.iter().cloned().fold(0.0_f64, f64::max);
        let tail = ratios[n - 8..].iter().cloned().fold(0.0_f64, f64::max);
        let mid = ratios[n / 3..2 * n / 3]
            .iter()
            .cloned()
            .fold(0.0_f64, f64::max);
        GrowthReport {
            sup_ratio: sup,
            ratio_near_vacuum: tail,
            finite: tail.is_finite() && tail <= 2.0 * mid + 1e-12,
            samples: n,
        }
    }
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_27,
    0.222_381_034_453_374_48,
    0.101_228_536_290_376_26,
];

fn gl8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..4 {
        let dx = half * GL8_X[i];
        s += GL8_W[i] * (f(mid - dx) + f(mid + dx));
    }
    s * half
}

fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl8(f, a, m);
    let right = gl8(f, m, b);
    let refined = left + right;
    if (refined - whole).abs() <= tol || depth >= 48 {
        refined
    } else {
        adaptive_step(f, a, m, left, 0.5 * tol, depth + 1)
            + adaptive_step(f, m, b, right, 0.5 * tol, depth + 1)
    }
}

/// Adaptive Gauss-Legendre quadrature with an absolute tolerance.
pub fn adaptive_gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    adaptive_step(f, a, b, gl8(f, a, b), tol, 0)
}
