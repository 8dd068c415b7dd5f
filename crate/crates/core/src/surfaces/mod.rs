//! Jet-evaluable immersions of the PMC families into S²×H² ⊂ ℝ⁶₁.
//!
//! Every family is a sum of products `A(x)·B(y)` in each ambient component,
//! with `A` and `B` available as Taylor series. Mixed partials of any order
//! up to three are then exact products of one-variable derivatives.

mod rotational;
mod spec;

pub use rotational::{rotational_cmc_profile, RotationalField, RotationalProfile, POLE_OFFSET};
pub use spec::{
    make_curve_product, make_lift, make_special_1, make_special_2, ChartDomain, CmcGenerator, LiftFactor,
    SurfaceSpec,
};

use serde::{Deserialize, Serialize};

use crate::ambient::{Factor, MinkowskiVector6, ProductPoint, ProductTangent};
use crate::curves::{
    frenet_integrate, hyperbolic_curve_at, sphere_circle_at, FrenetCurve, ModulatedLaw, PrescribedCurveProblem,
};
use crate::error::{GeomError, Result};
use crate::hode::{initial_slope, ProfileParams};
use crate::series::{Scalar, Series};

pub const DEFAULT_ODE_STEP: f64 = 1e-3;

/// Third-order partials `(xxx, xxy, xyy, yyy)`.
pub type ThirdOrder = [MinkowskiVector6; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JetKind {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImmersionJet {
    pub x: f64,
    pub y: f64,
    pub point: ProductPoint,
    pub dx: MinkowskiVector6,
    pub dy: MinkowskiVector6,
    pub dxx: MinkowskiVector6,
    pub dxy: MinkowskiVector6,
    pub dyy: MinkowskiVector6,
    pub third: Option<ThirdOrder>,
    pub kind: JetKind,
}

impl ImmersionJet {
    pub fn phi(&self) -> MinkowskiVector6 {
        self.point.position()
    }

    pub fn tangent_x(&self) -> ProductTangent {
        ProductTangent { base: self.point, v: self.dx }
    }

    pub fn tangent_y(&self) -> ProductTangent {
        ProductTangent { base: self.point, v: self.dy }
    }

    /// `(E, F, G)`.
    pub fn first_fundamental(&self) -> (f64, f64, f64) {
        (self.dx.inner(&self.dx), self.dx.inner(&self.dy), self.dy.inner(&self.dy))
    }

    /// Jet of `Φ(λx, λy)` at the rescaled chart point `(x/λ, y/λ)`.
    pub fn rescaled(&self, lambda: f64) -> ImmersionJet {
        let l2 = lambda * lambda;
        let l3 = l2 * lambda;
        ImmersionJet {
            x: self.x / lambda,
            y: self.y / lambda,
            dx: self.dx * lambda,
            dy: self.dy * lambda,
            dxx: self.dxx * l2,
            dxy: self.dxy * l2,
            dyy: self.dyy * l2,
            third: self.third.map(|t| t.map(|v| v * l3)),
            ..*self
        }
    }
}

/// One product term `A(x)·B(y)` of an ambient component.
#[derive(Debug, Clone, Copy)]
struct Term {
    comp: usize,
    a: Series,
    b: Series,
}

fn one() -> Series {
    Series::constant(1.0)
}

fn x_curve(offset: usize, c: &[Series; 3]) -> impl Iterator<Item = Term> + '_ {
    (0..3).map(move |i| Term { comp: offset + i, a: c[i], b: one() })
}

fn y_curve(offset: usize, c: &[Series; 3]) -> impl Iterator<Item = Term> + '_ {
    (0..3).map(move |i| Term { comp: offset + i, a: one(), b: c[i] })
}

/// A factor curve used by the product-type families.
#[derive(Debug, Clone)]
enum FactorCurve {
    SphereCircle(f64),
    HyperbolicConstant(f64),
    SphereGeodesic(f64),
    HyperbolicGeodesic(f64),
    Integrated(FrenetCurve<ModulatedLaw>),
}

impl FactorCurve {
    fn series(&self, t: f64) -> [Series; 3] {
        let s = Series::variable(t);
        match self {
            FactorCurve::SphereCircle(k) => sphere_circle_at(*k, s),
            FactorCurve::HyperbolicConstant(k) => hyperbolic_curve_at(*k, s),
            FactorCurve::SphereGeodesic(d) => {
                let st = s.sin();
                [st * d.cos(), st * d.sin(), s.cos()]
            }
            FactorCurve::HyperbolicGeodesic(d) => {
                let sh = s.sinh();
                [sh * d.cos(), sh * d.sin(), s.cosh()]
            }
            FactorCurve::Integrated(c) => c.field.curve_series(&c.series(t)),
        }
    }
}

#[derive(Debug, Clone)]
enum Built {
    /// Sphere curve in x, hyperbolic curve in y (or the other way round).
    Product { sphere: FactorCurve, hyperbolic: FactorCurve, sphere_in_x: bool },
    Special1 { params: ProfileParams, curve: FrenetCurve<ProfileParams> },
    Special2 { params: ProfileParams, curve: FrenetCurve<ProfileParams> },
    Rotational { profile: RotationalProfile, angle: f64 },
}

/// A constructed surface ready for jet evaluation.
#[derive(Debug, Clone)]
pub struct Surface {
    pub spec: SurfaceSpec,
    pub ode_step: f64,
    domain: ChartDomain,
    built: Built,
}

impl Surface {
    pub fn new(spec: SurfaceSpec) -> Result<Self> {
        Surface::build(spec, DEFAULT_ODE_STEP)
    }

    pub fn build(spec: SurfaceSpec, ode_step: f64) -> Result<Self> {
        spec.validate()?;
        if !(ode_step > 0.0) {
            return Err(GeomError::InvalidParameter("ODE step must be positive".into()));
        }
        let (built, natural) = match &spec {
            SurfaceSpec::CurveProduct { k_alpha, k_beta, curvature_modulation, domain, .. } => {
                let d = domain.unwrap_or(ChartDomain::new([-1.0, 1.0], [-1.0, 1.0]));
                let hyperbolic = if *curvature_modulation == 0.0 {
                    FactorCurve::HyperbolicConstant(*k_beta)
                } else {
                    let law = ModulatedLaw { speed: 1.0, curvature: *k_beta, amplitude: *curvature_modulation, frequency: 1.0 };
                    let (y0, y1) = (d.y[0] - 0.05, d.y[1] + 0.05);
                    let prob = PrescribedCurveProblem::from_base_point(Factor::Hyperbolic, law, vec![y0], y0, y1, ode_step);
                    FactorCurve::Integrated(frenet_integrate(prob)?)
                };
                (Built::Product { sphere: FactorCurve::SphereCircle(*k_alpha), hyperbolic, sphere_in_x: true }, d)
            }
            SurfaceSpec::LiftS2xR { generator, geodesic_angle, .. } | SurfaceSpec::LiftH2xR { generator, geodesic_angle, .. } => {
                let on_sphere = matches!(spec, SurfaceSpec::LiftS2xR { .. });
                let eps = if on_sphere { 1.0 } else { -1.0 };
                match *generator {
                    CmcGenerator::Cylinder { curvature } => {
                        let (sphere, hyperbolic) = if on_sphere {
                            (FactorCurve::SphereCircle(curvature), FactorCurve::HyperbolicGeodesic(*geodesic_angle))
                        } else {
                            (FactorCurve::SphereGeodesic(*geodesic_angle), FactorCurve::HyperbolicConstant(curvature))
                        };
                        let built = Built::Product { sphere, hyperbolic, sphere_in_x: on_sphere };
                        (built, ChartDomain::new([-1.0, 1.0], [-1.0, 1.0]))
                    }
                    CmcGenerator::RotationalSphere { mean_curvature } => {
                        let profile = rotational_cmc_profile(eps, mean_curvature, ode_step)?;
                        let (w0, w1) = profile.core_range(0.2);
                        let d = ChartDomain::new([w0, w1], [0.0, std::f64::consts::TAU]);
                        (Built::Rotational { profile, angle: *geodesic_angle }, d)
                    }
                }
            }
            SurfaceSpec::Special1 { .. } | SurfaceSpec::Special2 { .. } => {
                let (params, h0, sign, x_max) = spec.profile().expect("special family");
                let hp0 = initial_slope(&params, h0, sign)?;
                let first = matches!(spec, SurfaceSpec::Special1 { .. });
                let factor = if first { Factor::Hyperbolic } else { Factor::Sphere };
                let prob = PrescribedCurveProblem::from_base_point(factor, params, vec![h0, hp0], 0.0, x_max, ode_step);
                let curve = frenet_integrate(prob)?;
                let (x0, x1) = curve.range();
                let y = if params.a != 0.0 {
                    [0.0, std::f64::consts::TAU / params.a.abs().sqrt()]
                } else {
                    [-1.0, 1.0]
                };
                let d = ChartDomain::new([x0, x1], y);
                let built = if first { Built::Special1 { params, curve } } else { Built::Special2 { params, curve } };
                (built, d)
            }
        };
        let domain = match spec.domain_override() {
            Some(d) => d.intersect(&natural_limits(&built, &natural)),
            None => natural,
        };
        if !(domain.x[0] < domain.x[1] && domain.y[0] < domain.y[1]) {
            return Err(GeomError::InvalidParameter("chart domain is empty".into()));
        }
        Ok(Surface { spec, ode_step, domain, built })
    }

    pub fn domain(&self) -> ChartDomain {
        self.domain
    }

    /// Profile height `h(x)` of the special families.
    pub fn profile_height(&self, x: f64) -> Option<f64> {
        match &self.built {
            Built::Special1 { curve, .. } | Built::Special2 { curve, .. } => Some(curve.series(x)[0].value()),
            _ => None,
        }
    }

    fn terms(&self, x: f64, y: f64) -> Vec<Term> {
        match &self.built {
            Built::Product { sphere, hyperbolic, sphere_in_x } => {
                if *sphere_in_x {
                    x_curve(0, &sphere.series(x)).chain(y_curve(3, &hyperbolic.series(y))).collect()
                } else {
                    y_curve(0, &sphere.series(y)).chain(x_curve(3, &hyperbolic.series(x))).collect()
                }
            }
            Built::Special1 { params, curve } => {
                let s = curve.series(x);
                let (h, psi) = (s[0], curve.field.curve_series(&s));
                let ra = params.a.sqrt();
                let r = (h * h * -1.0 + params.a).sqrt() / ra;
                let ty = Series::variable(y) * ra;
                let mut t = vec![
                    Term { comp: 0, a: r, b: ty.cos() },
                    Term { comp: 1, a: r, b: ty.sin() },
                    Term { comp: 2, a: h / ra, b: one() },
                ];
                t.extend(x_curve(3, &psi));
                t
            }
            Built::Special2 { params, curve } => {
                let s = curve.series(x);
                let (h, phi) = (s[0], curve.field.curve_series(&s));
                let a = params.a;
                let vy = Series::variable(y);
                let mut t: Vec<Term> = x_curve(0, &phi).collect();
                if a > 0.0 {
                    let ra = a.sqrt();
                    let r = (h * h - a).sqrt() / ra;
                    let ty = vy * ra;
                    t.push(Term { comp: 3, a: r, b: ty.cos() });
                    t.push(Term { comp: 4, a: r, b: ty.sin() });
                    t.push(Term { comp: 5, a: h / ra, b: one() });
                } else if a < 0.0 {
                    let ra = (-a).sqrt();
                    let r = (h * h - a).sqrt() / ra;
                    let ty = vy * ra;
                    t.push(Term { comp: 3, a: h / ra, b: one() });
                    t.push(Term { comp: 4, a: r, b: ty.sinh() });
                    t.push(Term { comp: 5, a: r, b: ty.cosh() });
                } else {
                    // ((y²−1)h² + 1, 2yh², (y²+1)h² + 1) / (2h)
                    let half_h = h * 0.5;
                    let inv = one() / (h * 2.0);
                    let y2 = vy * vy;
                    t.push(Term { comp: 3, a: half_h, b: y2 });
                    t.push(Term { comp: 3, a: inv - half_h, b: one() });
                    t.push(Term { comp: 4, a: h, b: vy });
                    t.push(Term { comp: 5, a: half_h, b: y2 });
                    t.push(Term { comp: 5, a: inv + half_h, b: one() });
                }
                t
            }
            Built::Rotational { profile, angle } => {
                let s = profile.series_at(x);
                let (theta, tt) = (s[0], s[1]);
                let vy = Series::variable(y);
                let (cy, sy) = (vy.cos(), vy.sin());
                let (sn, cn) = profile.field.sn_cn(theta);
                let (d_c, d_s) = (angle.cos(), angle.sin());
                let mut t = Vec::with_capacity(6);
                if profile.field.epsilon > 0.0 {
                    t.push(Term { comp: 0, a: sn, b: cy });
                    t.push(Term { comp: 1, a: sn, b: sy });
                    t.push(Term { comp: 2, a: cn, b: one() });
                    let sh = tt.sinh();
                    t.push(Term { comp: 3, a: sh * d_c, b: one() });
                    t.push(Term { comp: 4, a: sh * d_s, b: one() });
                    t.push(Term { comp: 5, a: tt.cosh(), b: one() });
                } else {
                    let st = tt.sin();
                    t.push(Term { comp: 0, a: st * d_c, b: one() });
                    t.push(Term { comp: 1, a: st * d_s, b: one() });
                    t.push(Term { comp: 2, a: tt.cos(), b: one() });
                    t.push(Term { comp: 3, a: sn, b: cy });
                    t.push(Term { comp: 4, a: sn, b: sy });
                    t.push(Term { comp: 5, a: cn, b: one() });
                }
                t
            }
        }
    }

    fn partial(terms: &[Term], i: usize, j: usize) -> MinkowskiVector6 {
        let mut v = MinkowskiVector6::ZERO;
        for t in terms {
            v[t.comp] += t.a.derivative(i) * t.b.derivative(j);
        }
        v
    }

    /// Position only, without domain checks (used by finite-difference stencils).
    pub fn position(&self, x: f64, y: f64) -> MinkowskiVector6 {
        Self::partial(&self.terms(x, y), 0, 0)
    }

    fn check_domain(&self, x: f64, y: f64) -> Result<()> {
        if self.domain.contains(x, y, 0.0) {
            Ok(())
        } else {
            Err(GeomError::OutOfDomain { x, y })
        }
    }

    /// Analytic jet of order 2 or 3.
    pub fn eval_jet(&self, x: f64, y: f64, order: usize) -> Result<ImmersionJet> {
        self.check_domain(x, y)?;
        let t = self.terms(x, y);
        let p = |i, j| Self::partial(&t, i, j);
        let point = ProductPoint::new(p(0, 0))?;
        let jet = ImmersionJet {
            x,
            y,
            point,
            dx: ProductTangent::new(point, p(1, 0))?.v,
            dy: ProductTangent::new(point, p(0, 1))?.v,
            dxx: p(2, 0),
            dxy: p(1, 1),
            dyy: p(0, 2),
            third: (order >= 3).then(|| [p(3, 0), p(2, 1), p(1, 2), p(0, 3)]),
            kind: JetKind::Analytic,
        };
        Ok(jet)
    }

    /// Jet from central differences of the position (second order at most).
    pub fn eval_jet_fd(&self, x: f64, y: f64, step: f64) -> Result<ImmersionJet> {
        self.check_domain(x, y)?;
        let f = |dx: f64, dy: f64| self.position(x + dx, y + dy);
        let h = step;
        let c = f(0.0, 0.0);
        let (xp, xm, yp, ym) = (f(h, 0.0), f(-h, 0.0), f(0.0, h), f(0.0, -h));
        let point = ProductPoint::normalized(c)?;
        Ok(ImmersionJet {
            x,
            y,
            point,
            dx: (xp - xm) * (0.5 / h),
            dy: (yp - ym) * (0.5 / h),
            dxx: (xp + xm - c * 2.0) * (1.0 / (h * h)),
            dyy: (yp + ym - c * 2.0) * (1.0 / (h * h)),
            dxy: (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) * (0.25 / (h * h)),
            third: None,
            kind: JetKind::FiniteDifference,
        })
    }
}

/// The largest chart a family supports, used to clip user-supplied domains.
fn natural_limits(built: &Built, natural: &ChartDomain) -> ChartDomain {
    let inf = [f64::NEG_INFINITY, f64::INFINITY];
    match built {
        Built::Special1 { .. } | Built::Special2 { .. } => ChartDomain::new(natural.x, inf),
        Built::Rotational { profile, .. } => {
            let (a, b) = profile.trajectory.range();
            ChartDomain::new([a, b], inf)
        }
        Built::Product { hyperbolic: FactorCurve::Integrated(c), .. } => {
            let (a, b) = c.range();
            ChartDomain::new(inf, [a, b])
        }
        Built::Product { .. } => ChartDomain::new(inf, inf),
    }
}
