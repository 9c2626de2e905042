//! Scenario configuration: JSON with five named blocks, parsed fail-closed
//! (unknown keys are errors) and validated before anything runs.

use serde::Deserialize;

use relvac::eos::EquationOfState;
use relvac::linalg::SpatialVec;
use relvac::solver::field::FluidField;
use relvac::solver::grid::Grid;

/// Raw on-disk shape of a scenario.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub eos: EosBlock,
    pub grid: GridBlock,
    pub initial: InitialBlock,
    pub run: RunBlock,
    #[serde(default)]
    pub verify: Option<VerifyBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EosBlock {
    pub k: f64,
    pub gamma: f64,
    pub eps: f64,
    pub rho_max: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    /// Spatial dimension: 1 or 2.
    pub n: usize,
    /// `[lo, hi]` per axis.
    pub extent: Vec<[f64; 2]>,
    /// Cell count per axis.
    pub cells: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBlock {
    /// One of `constant`, `gaussian-bump`, `riemann-1d`.
    pub profile: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(rename = "T")]
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub output_times: Vec<f64>,
    pub frame: FrameChoice,
    /// Translation velocity; required by (and only meaningful for) the
    /// galilean frame.
    #[serde(default)]
    pub shift: Option<Vec<f64>>,
    /// Overrides the profile's default boundary treatment.
    #[serde(default)]
    pub periodic: Option<bool>,
}

fn default_cfl() -> f64 {
    0.4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameChoice {
    Lab,
    Boosted,
    Galilean,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyBlock {
    pub suites: Vec<String>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_samples() -> usize {
    10_000
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantParams {
    rho: f64,
    u: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianBumpParams {
    amplitude: f64,
    width: f64,
    #[serde(default)]
    center: Option<Vec<f64>>,
    #[serde(default)]
    u: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Riemann1dParams {
    rho_left: f64,
    u_left: f64,
    rho_right: f64,
    u_right: f64,
    #[serde(default)]
    x0: f64,
}

/// A fully validated, ready-to-run scenario.
pub struct Scenario {
    pub name: String,
    pub eos_params: EosBlock,
    pub initial: FluidField,
    pub t_end: f64,
    pub cfl: f64,
    pub output_times: Vec<f64>,
    pub frame: FrameChoice,
    pub shift: Option<SpatialVec>,
    pub periodic: bool,
    pub verify: Option<VerifyBlock>,
}

/// Errors found while reading a config, before any physics runs.
/// Structural problems exit 1; physically inadmissible parameters exit 2.
pub enum ConfigError {
    Structural(String),
    Inadmissible(String),
}

impl ConfigError {
    pub fn message(&self) -> &str {
        match self {
            ConfigError::Structural(m) | ConfigError::Inadmissible(m) => m,
        }
    }
}

fn structural(field: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError::Structural(format!("{field}: {msg}"))
}

fn parse_params<T: serde::de::DeserializeOwned>(
    profile: &str,
    params: &serde_json::Value,
) -> Result<T, ConfigError> {
    serde_json::from_value(params.clone())
        .map_err(|e| structural(&format!("initial.params ({profile})"), e))
}

fn to_vec(field: &str, raw: &[f64], dim: usize) -> Result<SpatialVec, ConfigError> {
    if raw.len() != dim {
        return Err(structural(
            field,
            format!("expected {dim} components, got {}", raw.len()),
        ));
    }
    if !raw.iter().all(|v| v.is_finite()) {
        return Err(structural(field, "components must be finite"));
    }
    Ok(SpatialVec::new(raw))
}

impl ScenarioConfig {
    /// Parses the JSON text, reporting serde's line/column context.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| {
            ConfigError::Structural(format!(
                "line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    /// Validates everything that does not require physics: shapes,
    /// dimensions, profile names and parameters.
    pub fn into_scenario(self, name: String) -> Result<Scenario, ConfigError> {
        let n = self.grid.n;
        if !(1..=2).contains(&n) {
            return Err(structural("grid.n", "the solver runs in dimension 1 or 2"));
        }
        if self.grid.extent.len() != n || self.grid.cells.len() != n {
            return Err(structural(
                "grid",
                format!(
                    "extent and cells must each have {n} entries, got {} and {}",
                    self.grid.extent.len(),
                    self.grid.cells.len()
                ),
            ));
        }
        let grid = match n {
            1 => Grid::new_1d(self.grid.extent[0][0], self.grid.extent[0][1], self.grid.cells[0]),
            _ => Grid::new_2d(
                (self.grid.extent[0][0], self.grid.extent[0][1]),
                self.grid.cells[0],
                (self.grid.extent[1][0], self.grid.extent[1][1]),
                self.grid.cells[1],
            ),
        }
        .map_err(|e| structural("grid", e))?;

        let (initial, compact_support) = build_initial(&self.initial, grid)?;

        if !(self.run.t_end.is_finite() && self.run.t_end > 0.0) {
            return Err(structural("run.T", "end time must be positive and finite"));
        }
        if !(self.run.cfl.is_finite() && self.run.cfl > 0.0 && self.run.cfl < 1.0) {
            return Err(structural("run.cfl", "CFL number must lie in (0, 1)"));
        }
        if self
            .run
            .output_times
            .iter()
            .any(|t| !t.is_finite() || *t < 0.0 || *t > self.run.t_end)
        {
            return Err(structural(
                "run.output_times",
                "output times must lie in [0, T]",
            ));
        }

        let shift = match (self.run.frame, &self.run.shift) {
            (FrameChoice::Galilean, Some(raw)) => Some(to_vec("run.shift", raw, n)?),
            (FrameChoice::Galilean, None) => {
                return Err(structural("run.shift", "the galilean frame needs a shift velocity"));
            }
            (_, Some(_)) => {
                return Err(structural(
                    "run.shift",
                    "a shift velocity only makes sense for the galilean frame",
                ));
            }
            (_, None) => None,
        };

        Ok(Scenario {
            name,
            eos_params: self.eos,
            initial,
            t_end: self.run.t_end,
            cfl: self.run.cfl,
            output_times: self.run.output_times,
            frame: self.run.frame,
            shift,
            periodic: self.run.periodic.unwrap_or(!compact_support),
            verify: self.verify,
        })
    }
}

/// Builds the initial field; the bool marks compactly supported profiles,
/// which default to a vacuum-extension (non-periodic) boundary.
fn build_initial(block: &InitialBlock, grid: Grid) -> Result<(FluidField, bool), ConfigError> {
    let n = grid.n();
    match block.profile.as_str() {
        "constant" => {
            let p: ConstantParams = parse_params("constant", &block.params)?;
            let u = to_vec("initial.params.u", &p.u, n)?;
            if !(p.rho.is_finite() && p.rho >= 0.0) {
                return Err(structural("initial.params.rho", "density must be >= 0"));
            }
            let f = FluidField::from_fn(grid, |_| (p.rho, u))
                .map_err(|e| structural("initial", e))?;
            Ok((f, false))
        }
        "gaussian-bump" => {
            let p: GaussianBumpParams = parse_params("gaussian-bump", &block.params)?;
            if !(p.amplitude.is_finite() && p.amplitude > 0.0) {
                return Err(structural("initial.params.amplitude", "must be > 0"));
            }
            if !(p.width.is_finite() && p.width > 0.0) {
                return Err(structural("initial.params.width", "must be > 0"));
            }
            let center = match &p.center {
                Some(raw) => to_vec("initial.params.center", raw, n)?,
                None => SpatialVec::zeros(n),
            };
            let u = match &p.u {
                Some(raw) => to_vec("initial.params.u", raw, n)?,
                None => SpatialVec::zeros(n),
            };
            let (amp, width) = (p.amplitude, p.width);
            let f = FluidField::from_fn(grid, |x| {
                let r2 = (*x - center).norm_sq();
                (amp * (-r2 / (width * width)).exp(), u)
            })
            .map_err(|e| structural("initial", e))?;
            Ok((f, true))
        }
        "riemann-1d" => {
            if n != 1 {
                return Err(structural("initial", "riemann-1d requires grid.n = 1"));
            }
            let p: Riemann1dParams = parse_params("riemann-1d", &block.params)?;
            for (name, v) in [
                ("rho_left", p.rho_left),
                ("rho_right", p.rho_right),
                ("u_left", p.u_left),
                ("u_right", p.u_right),
                ("x0", p.x0),
            ] {
                if !v.is_finite() {
                    return Err(structural(&format!("initial.params.{name}"), "must be finite"));
                }
            }
            if p.rho_left < 0.0 || p.rho_right < 0.0 {
                return Err(structural("initial.params", "densities must be >= 0"));
            }
            let f = FluidField::from_fn(grid, |x| {
                if x[0] < p.x0 {
                    (p.rho_left, SpatialVec::new(&[p.u_left]))
                } else {
                    (p.rho_right, SpatialVec::new(&[p.u_right]))
                }
            })
            .map_err(|e| structural("initial", e))?;
            Ok((f, false))
        }
        other => Err(structural(
            "initial.profile",
            format!("unknown profile '{other}' (expected constant, gaussian-bump, or riemann-1d)"),
        )),
    }
}

impl Scenario {
    /// Physical admissibility gate, run before any compute: equation-of-state
    /// parameters, sub-causal flow everywhere, densities inside the certified
    /// range, and a frame choice consistent with the model parameter.
    pub fn admissibility_gate(&self) -> Result<EquationOfState, ConfigError> {
        let p = &self.eos_params;
        let eos = EquationOfState::new(p.k, p.gamma, p.eps, p.rho_max)
            .map_err(|e| ConfigError::Inadmissible(format!("eos: {e}")))?;
        let max_speed = self.initial.max_speed();
        if p.eps > 0.0 && p.eps * max_speed >= 1.0 {
            return Err(ConfigError::Inadmissible(format!(
                "initial flow speed {max_speed} is not sub-causal (eps * |u| = {} >= 1)",
                p.eps * max_speed
            )));
        }
        let max_rho = self.initial.max_rho();
        if max_rho > p.rho_max {
            return Err(ConfigError::Inadmissible(format!(
                "initial density {max_rho} exceeds rho_max = {}",
                p.rho_max
            )));
        }
        match self.frame {
            FrameChoice::Boosted if p.eps == 0.0 => Err(ConfigError::Inadmissible(
                "the boosted frame needs eps > 0; use the galilean frame".to_string(),
            )),
            FrameChoice::Galilean if p.eps != 0.0 => Err(ConfigError::Inadmissible(
                "the galilean frame needs eps = 0; use the boosted frame".to_string(),
            )),
            _ => Ok(eos),
        }
    }
}
