use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::surfaces::SurfaceSpec;

pub const SCHEMA_VERSION: u32 = 1;

/// Verification checks a suite can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `‖∇⊥H‖`, the Ricci commutator, and `‖H‖²` against an expected value if given.
    Pmc,
    /// Holomorphicity of Θ, plus its expected value if given.
    Hopf,
    /// `|Cⱼ| ≤ 1`, and `C₁² = C₂²` with a constant sign pattern on vanishing-Θ surfaces.
    Kahler,
    /// Frenet invariants and equations; adapted-frame identities on vanishing-Θ surfaces.
    Frames,
    /// Codazzi residual with a step-halving convergence check.
    Codazzi,
    /// `min(smin_dphi, smin_dpsi) ≈ 0`.
    Intersection,
}

impl Check {
    pub const ALL: [Check; 6] = [Check::Pmc, Check::Hopf, Check::Kahler, Check::Frames, Check::Codazzi, Check::Intersection];

    pub fn name(self) -> &'static str {
        match self {
            Check::Pmc => "pmc",
            Check::Hopf => "hopf",
            Check::Kahler => "kahler",
            Check::Frames => "frames",
            Check::Codazzi => "codazzi",
            Check::Intersection => "intersection",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::Pmc => 1e-4,
            Check::Hopf => 1e-4,
            Check::Kahler => 1e-6,
            Check::Frames => 1e-3,
            Check::Codazzi => 1e-3,
            Check::Intersection => 1e-5,
        }
    }
}

/// Sample grid over the surface's chart domain (or an override).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// Absolute inset from every side of the domain.
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_margin() -> f64 {
    0.02
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nx: 10, ny: 10, margin: default_margin() }
    }
}

/// Expected closed-form values.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    /// Θ coefficient as `[re, im]`.
    #[serde(default)]
    pub theta: Option<[f64; 2]>,
    #[serde(default)]
    pub h_norm2: Option<f64>,
    /// Tolerance for the expected values (defaults to the check tolerance).
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceEntry {
    pub name: String,
    pub spec: SurfaceSpec,
    #[serde(default)]
    pub grid: GridSpec,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub tolerances: BTreeMap<Check, f64>,
    #[serde(default)]
    pub expect: Expectations,
}

impl SurfaceEntry {
    /// Whether the entry declares Θ ≡ 0.
    pub fn vanishing_theta(&self) -> bool {
        matches!(self.expect.theta, Some([re, im]) if re == 0.0 && im == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_ode_step")]
    pub ode_step: f64,
    #[serde(default = "one")]
    pub tol_scale: f64,
    pub surfaces: Vec<SurfaceEntry>,
}

fn default_fd_step() -> f64 {
    crate::extrinsic::DEFAULT_FD_STEP
}

fn default_ode_step() -> f64 {
    crate::surfaces::DEFAULT_ODE_STEP
}

fn one() -> f64 {
    1.0
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SuiteConfig =
            serde_json::from_str(text).map_err(|e| GeomError::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GeomError::InvalidParameter(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {}", self.schema_version));
        }
        for (name, v) in [("fd_step", self.fd_step), ("ode_step", self.ode_step), ("tol_scale", self.tol_scale)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive"));
            }
        }
        for s in &self.surfaces {
            if s.grid.nx == 0 || s.grid.ny == 0 || !(s.grid.margin >= 0.0) {
                return bad(format!("{}: grid needs nx, ny ≥ 1 and margin ≥ 0", s.name));
            }
            if let Some((c, t)) = s.tolerances.iter().find(|(_, t)| !(**t > 0.0)) {
                return bad(format!("{}: tolerance for {} must be positive, got {t}", s.name, c.name()));
            }
            if let Some(t) = s.expect.tolerance {
                if !(t > 0.0) {
                    return bad(format!("{}: expectation tolerance must be positive", s.name));
                }
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, entry: &SurfaceEntry, check: Check) -> f64 {
        entry.tolerances.get(&check).copied().unwrap_or(check.default_tolerance()) * self.tol_scale
    }
}

const VANISHING_THETA: &str = include_str!("../../configs/vanishing_theta.json");
const NONVANISHING: &str = include_str!("../../configs/nonvanishing.json");

/// Bundled configuration files by name.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".json") {
        "vanishing_theta" => Some(VANISHING_THETA),
        "nonvanishing" => Some(NONVANISHING),
        _ => None,
    }
}
