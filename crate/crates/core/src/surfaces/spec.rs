use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::hode::{initial_slope, ProfileParams, SlopeSign, Variant};

/// Rectangle `[x0, x1] × [y0, y1]` in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDomain {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl ChartDomain {
    pub fn new(x: [f64; 2], y: [f64; 2]) -> Self {
        ChartDomain { x, y }
    }

    /// Whether `(x, y)` lies at least `margin` inside the rectangle.
    pub fn contains(&self, x: f64, y: f64, margin: f64) -> bool {
        let slack = 1e-12;
        x >= self.x[0] + margin - slack
            && x <= self.x[1] - margin + slack
            && y >= self.y[0] + margin - slack
            && y <= self.y[1] - margin + slack
    }

    pub fn intersect(&self, other: &ChartDomain) -> ChartDomain {
        ChartDomain {
            x: [self.x[0].max(other.x[0]), self.x[1].min(other.x[1])],
            y: [self.y[0].max(other.y[0]), self.y[1].min(other.y[1])],
        }
    }

    /// Row-major grid of `nx × ny` points, shrunk by `margin` on every side.
    pub fn grid(&self, nx: usize, ny: usize, margin: f64) -> Vec<(f64, f64)> {
        let lerp = |r: [f64; 2], i: usize, n: usize| {
            let (a, b) = (r[0] + margin, r[1] - margin);
            if n <= 1 {
                0.5 * (a + b)
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        };
        (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| (lerp(self.x, i, nx), lerp(self.y, j, ny)))
            .collect()
    }
}

/// CMC surface of M²(ε)×ℝ to be lifted into S²×H².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CmcGenerator {
    /// Vertical cylinder over a curve of constant geodesic curvature.
    Cylinder { curvature: f64 },
    /// Rotational sphere with the given mean curvature.
    RotationalSphere { mean_curvature: f64 },
}

/// Which totally geodesic hypersurface carries the lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftFactor {
    S2xR,
    H2xR,
}

fn default_x_max() -> f64 {
    crate::hode::DEFAULT_X_MAX
}

fn plus() -> SlopeSign {
    SlopeSign::Plus
}

/// Serializable description of a surface family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum SurfaceSpec {
    #[serde(rename = "lift_S2xR")]
    LiftS2xR {
        generator: CmcGenerator,
        #[serde(default)]
        geodesic_angle: f64,
        #[serde(default)]
        minimal: bool,
        #[serde(default)]
        domain: Option<ChartDomain>,
    },
    #[serde(rename = "lift_H2xR")]
    LiftH2xR {
        generator: CmcGenerator,
        #[serde(default)]
        geodesic_angle: f64,
        #[serde(default)]
        minimal: bool,
        #[serde(default)]
        domain: Option<ChartDomain>,
    },
    #[serde(rename = "curve_product")]
    CurveProduct {
        k_alpha: f64,
        k_beta: f64,
        #[serde(default)]
        minimal: bool,
        /// Amplitude of a `sin(y)` modulation of β's curvature (0 for the true family).
        #[serde(default)]
        curvature_modulation: f64,
        #[serde(default)]
        domain: Option<ChartDomain>,
    },
    #[serde(rename = "special_1")]
    Special1 {
        a: f64,
        b: f64,
        c: f64,
        h0: f64,
        #[serde(default = "plus")]
        slope_sign: SlopeSign,
        #[serde(default = "default_x_max")]
        x_max: f64,
        #[serde(default)]
        domain: Option<ChartDomain>,
    },
    #[serde(rename = "special_2")]
    Special2 {
        a: f64,
        b: f64,
        c: f64,
        h0: f64,
        #[serde(default = "plus")]
        slope_sign: SlopeSign,
        #[serde(default = "default_x_max")]
        x_max: f64,
        #[serde(default)]
        domain: Option<ChartDomain>,
    },
}

impl SurfaceSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            SurfaceSpec::LiftS2xR { .. } => "lift_S2xR",
            SurfaceSpec::LiftH2xR { .. } => "lift_H2xR",
            SurfaceSpec::CurveProduct { .. } => "curve_product",
            SurfaceSpec::Special1 { .. } => "special_1",
            SurfaceSpec::Special2 { .. } => "special_2",
        }
    }

    pub fn domain_override(&self) -> Option<ChartDomain> {
        match self {
            SurfaceSpec::LiftS2xR { domain, .. }
            | SurfaceSpec::LiftH2xR { domain, .. }
            | SurfaceSpec::CurveProduct { domain, .. }
            | SurfaceSpec::Special1 { domain, .. }
            | SurfaceSpec::Special2 { domain, .. } => *domain,
        }
    }

    pub fn with_domain(mut self, d: ChartDomain) -> Self {
        match &mut self {
            SurfaceSpec::LiftS2xR { domain, .. }
            | SurfaceSpec::LiftH2xR { domain, .. }
            | SurfaceSpec::CurveProduct { domain, .. }
            | SurfaceSpec::Special1 { domain, .. }
            | SurfaceSpec::Special2 { domain, .. } => *domain = Some(d),
        }
        self
    }

    /// Profile parameters of the special families.
    pub fn profile(&self) -> Option<(ProfileParams, f64, SlopeSign, f64)> {
        match *self {
            SurfaceSpec::Special1 { a, b, c, h0, slope_sign, x_max, .. } => {
                Some((ProfileParams::new(a, b, c, Variant::S1), h0, slope_sign, x_max))
            }
            SurfaceSpec::Special2 { a, b, c, h0, slope_sign, x_max, .. } => {
                Some((ProfileParams::new(a, b, c, Variant::S2), h0, slope_sign, x_max))
            }
            _ => None,
        }
    }

    /// Checks the family preconditions without building the surface.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SurfaceSpec::CurveProduct { k_alpha, k_beta, minimal, curvature_modulation, .. } => {
                if !(k_alpha.is_finite() && k_beta.is_finite() && curvature_modulation.is_finite()) {
                    return Err(GeomError::InvalidParameter("curvatures must be finite".into()));
                }
                if k_alpha == 0.0 && k_beta == 0.0 && curvature_modulation == 0.0 && !minimal {
                    return Err(GeomError::InvalidParameter(
                        "both curvatures vanish: the product is minimal (set `minimal` to allow)".into(),
                    ));
                }
            }
            SurfaceSpec::Special1 { .. } | SurfaceSpec::Special2 { .. } => {
                let (p, h0, sign, x_max) = self.profile().expect("special family");
                if !(x_max > 0.0) {
                    return Err(GeomError::InvalidParameter("x_max must be positive".into()));
                }
                initial_slope(&p, h0, sign)?;
            }
            SurfaceSpec::LiftS2xR { generator, minimal, .. } | SurfaceSpec::LiftH2xR { generator, minimal, .. } => {
                let eps = if matches!(self, SurfaceSpec::LiftS2xR { .. }) { 1.0 } else { -1.0 };
                match generator {
                    CmcGenerator::Cylinder { curvature } => {
                        if !curvature.is_finite() {
                            return Err(GeomError::InvalidParameter("curvature must be finite".into()));
                        }
                        if curvature == 0.0 && !minimal {
                            return Err(GeomError::InvalidParameter(
                                "cylinder over a geodesic is minimal (set `minimal` to allow)".into(),
                            ));
                        }
                    }
                    CmcGenerator::RotationalSphere { mean_curvature } => {
                        super::rotational::check_sphere_params(eps, mean_curvature)?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn make_curve_product(k_alpha: f64, k_beta: f64) -> Result<SurfaceSpec> {
    let spec = SurfaceSpec::CurveProduct { k_alpha, k_beta, minimal: false, curvature_modulation: 0.0, domain: None };
    spec.validate()?;
    Ok(spec)
}

pub fn make_special_1(a: f64, b: f64, c: f64, h0: f64, slope_sign: SlopeSign) -> Result<SurfaceSpec> {
    let spec = SurfaceSpec::Special1 { a, b, c, h0, slope_sign, x_max: default_x_max(), domain: None };
    spec.validate()?;
    Ok(spec)
}

pub fn make_special_2(a: f64, b: f64, c: f64, h0: f64, slope_sign: SlopeSign) -> Result<SurfaceSpec> {
    let spec = SurfaceSpec::Special2 { a, b, c, h0, slope_sign, x_max: default_x_max(), domain: None };
    spec.validate()?;
    Ok(spec)
}

/// `geodesic_angle` picks the direction of the geodesic γ through the base
/// point of the opposite factor.
pub fn make_lift(factor: LiftFactor, generator: CmcGenerator, geodesic_angle: f64) -> Result<SurfaceSpec> {
    let spec = match factor {
        LiftFactor::S2xR => SurfaceSpec::LiftS2xR { generator, geodesic_angle, minimal: false, domain: None },
        LiftFactor::H2xR => SurfaceSpec::LiftH2xR { generator, geodesic_angle, minimal: false, domain: None },
    };
    spec.validate()?;
    Ok(spec)
}
