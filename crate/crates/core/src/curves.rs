//! Curves in the factors S² and H².
//!
//! Closed-form constant-curvature curves, and a Frenet integrator for curves
//! with prescribed speed and signed geodesic curvature. Signed curvature is
//! measured against the normal `N = J T`, with J the factor rotation of
//! [`Factor::rotate`].

use serde::{Deserialize, Serialize};

use crate::ambient::{Factor, TAU_MEM};
use crate::error::{GeomError, Result};
use crate::ode::{Halt, Trajectory, VectorField};
use crate::series::{Scalar, Series};

/// Default fixed step of the Frenet integrator.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub x: f64,
    pub pos: [f64; 3],
    pub d1: [f64; 3],
    pub d2: [f64; 3],
    pub d3: [f64; 3],
}

impl CurveSample {
    pub fn from_series(x: f64, c: &[Series; 3]) -> Self {
        let d = |k: usize| [c[0].derivative(k), c[1].derivative(k), c[2].derivative(k)];
        CurveSample { x, pos: d(0), d1: d(1), d2: d(2), d3: d(3) }
    }

    pub fn speed(&self, factor: Factor) -> f64 {
        factor.inner(&self.d1, &self.d1).sqrt()
    }

    /// Signed geodesic curvature read off the sample's derivatives.
    pub fn geodesic_curvature(&self, factor: Factor) -> f64 {
        let accel = factor.project(&self.pos, &self.d2);
        let n = factor.rotate(&self.pos, &self.d1);
        factor.inner(&accel, &n) / self.speed(factor).powi(3)
    }
}

/// Unit-speed latitude circle of S² with geodesic curvature `k`, generic in
/// the parameter so it can be expanded as a series.
pub fn sphere_circle_at<S: Scalar>(k: f64, t: S) -> [S; 3] {
    let theta = f64::atan2(1.0, k);
    let r = theta.sin();
    let arg = t / r;
    [arg.cos() * r, arg.sin() * r, S::cst(theta.cos())]
}

/// Unit-speed curve of H² with constant signed geodesic curvature `k`:
/// geodesic, hypercycle, horocycle or circle.
pub fn hyperbolic_curve_at<S: Scalar>(k: f64, s: S) -> [S; 3] {
    if k < 0.0 {
        let p = hyperbolic_curve_at(-k, s);
        return [p[0], -p[1], p[2]];
    }
    if k == 0.0 {
        [s.sinh(), S::cst(0.0), s.cosh()]
    } else if k < 1.0 {
        // equidistant curve at signed distance -atanh(k) from the geodesic
        let d = -k.atanh();
        let (ch, sh) = (d.cosh(), d.sinh());
        let t = s / ch;
        [t.sinh() * ch, S::cst(sh), t.cosh() * ch]
    } else if k == 1.0 {
        let half = s * s * 0.5;
        [s, half, half + 1.0]
    } else {
        let rho = (1.0 / k).atanh();
        let (ch, sh) = (rho.cosh(), rho.sinh());
        let t = s / sh;
        [t.cos() * sh, t.sin() * sh, S::cst(ch)]
    }
}

pub fn sphere_circle(k: f64, t: f64) -> CurveSample {
    CurveSample::from_series(t, &sphere_circle_at(k, Series::variable(t)))
}

pub fn hyperbolic_constant_curvature(k: f64, s: f64) -> CurveSample {
    CurveSample::from_series(s, &hyperbolic_curve_at(k, Series::variable(s)))
}

/// Speed and curvature prescription for [`frenet_integrate`].
///
/// The law may carry its own autonomous "driver" state (for instance the
/// parameter itself, or a profile function and its derivative) that is
/// integrated alongside the curve.
pub trait CurveLaw {
    fn driver_dim(&self) -> usize;
    fn driver_field<S: Scalar>(&self, d: &[S], out: &mut [S]);
    /// `(speed, d speed / dx, signed curvature)` as functions of the driver.
    fn law<S: Scalar>(&self, d: &[S]) -> (S, S, S);

    /// Vetoes driver states outside the law's domain. The integration then
    /// ends early and the achieved range is reported, not an error.
    fn admissible(&self, _d: &[f64]) -> std::result::Result<(), String> {
        Ok(())
    }
}

/// Constant speed with curvature `k + amplitude·sin(frequency·x)`.
/// The driver is the parameter x itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulatedLaw {
    pub speed: f64,
    pub curvature: f64,
    pub amplitude: f64,
    pub frequency: f64,
}

impl ModulatedLaw {
    pub fn constant(speed: f64, curvature: f64) -> Self {
        ModulatedLaw { speed, curvature, amplitude: 0.0, frequency: 1.0 }
    }
}

impl CurveLaw for ModulatedLaw {
    fn driver_dim(&self) -> usize {
        1
    }
    fn driver_field<S: Scalar>(&self, _d: &[S], out: &mut [S]) {
        out[0] = S::cst(1.0);
    }
    fn law<S: Scalar>(&self, d: &[S]) -> (S, S, S) {
        let k = (d[0] * self.frequency).sin() * self.amplitude + self.curvature;
        (S::cst(self.speed), S::cst(0.0), k)
    }
}

/// Frenet system `c'' = (v'/v) c' + κ v J c' − ⟨c',c'⟩ c / ⟨c,c⟩` with the
/// driver state in front: `[driver.., c, c']`.
#[derive(Debug, Clone)]
pub struct FrenetField<L> {
    pub factor: Factor,
    pub law: L,
}

impl<L: CurveLaw> FrenetField<L> {
    fn offset(&self) -> usize {
        self.law.driver_dim()
    }

    pub fn curve_series(&self, state: &[Series]) -> [Series; 3] {
        let o = self.offset();
        [state[o], state[o + 1], state[o + 2]]
    }
}

impl<L: CurveLaw> VectorField for FrenetField<L> {
    fn dim(&self) -> usize {
        self.offset() + 6
    }

    fn eval<S: Scalar>(&self, y: &[S], out: &mut [S]) {
        let o = self.offset();
        self.law.driver_field(&y[..o], &mut out[..o]);
        let (v, vp, kappa) = self.law.law(&y[..o]);
        let c = [y[o], y[o + 1], y[o + 2]];
        let cp = [y[o + 3], y[o + 4], y[o + 5]];
        let jc = self.factor.rotate(&c, &cp);
        let normal = self.factor.inner(&cp, &cp) * (-self.factor.position_norm2());
        let rate = vp / v;
        let bend = kappa * v;
        for i in 0..3 {
            out[o + i] = cp[i];
            out[o + 3 + i] = rate * cp[i] + bend * jc[i] + normal * c[i];
        }
    }

    fn project(&self, y: &mut [f64]) {
        let o = self.offset();
        let c = self.factor.renormalize(&[y[o], y[o + 1], y[o + 2]]);
        let cp = self.factor.project(&c, &[y[o + 3], y[o + 4], y[o + 5]]);
        y[o..o + 3].copy_from_slice(&c);
        y[o + 3..o + 6].copy_from_slice(&cp);
    }
}

#[derive(Debug, Clone)]
pub struct PrescribedCurveProblem<L> {
    pub factor: Factor,
    pub law: L,
    pub driver0: Vec<f64>,
    pub position: [f64; 3],
    pub unit_tangent: [f64; 3],
    pub x0: f64,
    pub x_end: f64,
    pub step: f64,
}

impl<L: CurveLaw> PrescribedCurveProblem<L> {
    /// Starts at the factor base point ((0,0,1) in both models) heading along
    /// the first coordinate axis.
    pub fn from_base_point(factor: Factor, law: L, driver0: Vec<f64>, x0: f64, x_end: f64, step: f64) -> Self {
        PrescribedCurveProblem {
            factor,
            law,
            driver0,
            position: [0.0, 0.0, 1.0],
            unit_tangent: [1.0, 0.0, 0.0],
            x0,
            x_end,
            step,
        }
    }
}

/// Integrated curve with dense, derivative-bearing evaluation.
#[derive(Debug, Clone)]
pub struct FrenetCurve<L> {
    pub field: FrenetField<L>,
    pub trajectory: Trajectory,
    /// Set when the law's domain ended the integration early.
    pub halt: Halt,
}

impl<L: CurveLaw> FrenetCurve<L> {
    pub fn eval(&self, x: f64) -> CurveSample {
        let s = self.trajectory.series_at(&self.field, x);
        CurveSample::from_series(x, &self.field.curve_series(&s))
    }

    pub fn series(&self, x: f64) -> Vec<Series> {
        self.trajectory.series_at(&self.field, x)
    }

    pub fn samples(&self) -> Vec<CurveSample> {
        (0..self.trajectory.len())
            .map(|i| {
                let x = self.trajectory.x_at(i);
                let s = crate::ode::taylor_expand(&self.field, &self.trajectory.states[i]);
                CurveSample::from_series(x, &self.field.curve_series(&s))
            })
            .collect()
    }

    pub fn range(&self) -> (f64, f64) {
        self.trajectory.range()
    }
}

pub fn frenet_integrate<L: CurveLaw>(prob: PrescribedCurveProblem<L>) -> Result<FrenetCurve<L>> {
    if !(prob.step > 0.0) {
        return Err(GeomError::InvalidParameter(format!("step must be positive, got {}", prob.step)));
    }
    let factor = prob.factor;
    if prob.driver0.len() != prob.law.driver_dim() {
        return Err(GeomError::InvalidParameter("driver state has the wrong dimension".into()));
    }
    let p = prob.position;
    let t = prob.unit_tangent;
    if factor.membership_residual(&p) > TAU_MEM {
        return Err(GeomError::InvariantViolation("initial position off the factor".into()));
    }
    if factor.inner(&p, &t).abs() > TAU_MEM || (factor.inner(&t, &t) - 1.0).abs() > TAU_MEM {
        return Err(GeomError::InvariantViolation("initial tangent is not a unit tangent vector".into()));
    }
    let (v0, _, _) = prob.law.law(&prob.driver0);
    if !(v0 > 0.0) {
        return Err(GeomError::InvalidParameter(format!("speed must be positive, got {v0}")));
    }

    let field = FrenetField { factor, law: prob.law };
    let o = field.offset();
    let mut y0 = prob.driver0.clone();
    y0.extend_from_slice(&p);
    y0.extend(t.iter().map(|c| c * v0));

    let mut bad_speed = None;
    let mut law_stop = false;
    let (trajectory, halt) = Trajectory::integrate(&field, prob.x0, y0, prob.x_end, prob.step, |x, y| {
        let (v, _, _) = field.law.law(&y[..o]);
        if !(v > 0.0) {
            bad_speed = Some((x, v));
            return Err("non-positive speed".into());
        }
        field.law.admissible(&y[..o]).inspect_err(|_| law_stop = true)
    });
    if let Some((x, v)) = bad_speed {
        return Err(GeomError::InvalidParameter(format!("speed {v} is not positive at x = {x}")));
    }
    match halt {
        Halt::Stopped { x, reason } if !law_stop => {
            Err(GeomError::Integration(format!("stopped at x = {x}: {reason}")))
        }
        halt => Ok(FrenetCurve { field, trajectory, halt }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Curvature oracles: `‖α'' + α‖` on the sphere and `‖β'' − β‖_L` on the
    /// hyperboloid, valid for unit-speed curves.
    fn sphere_oracle(c: &CurveSample) -> f64 {
        let a: Vec<f64> = (0..3).map(|i| c.d2[i] + c.pos[i]).collect();
        (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
    }

    fn hyperbolic_oracle(c: &CurveSample) -> f64 {
        let a: Vec<f64> = (0..3).map(|i| c.d2[i] - c.pos[i]).collect();
        (a[0] * a[0] + a[1] * a[1] - a[2] * a[2]).sqrt()
    }

    #[test]
    fn sphere_circle_examples() {
        let c = sphere_circle(1.0, 0.0);
        let r = 0.5f64.sqrt();
        assert!((c.pos[0] - r).abs() < 1e-15 && c.pos[1].abs() < 1e-15 && (c.pos[2] - r).abs() < 1e-15);
        assert!((sphere_oracle(&c) - 1.0).abs() < 1e-12);
        for t in [0.0, 0.7, 2.0] {
            assert!(sphere_oracle(&sphere_circle(0.0, t)) < 1e-14);
        }
        for k in [0.0, 0.5, 2.0] {
            for i in 0..100 {
                let c = sphere_circle(k, i as f64 * 0.1);
                assert!((c.speed(Factor::Sphere) - 1.0).abs() < 1e-12);
                assert!((sphere_oracle(&c) - k).abs() < 1e-10);
                assert!((c.geodesic_curvature(Factor::Sphere) - k).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hyperbolic_curve_examples() {
        let g = hyperbolic_constant_curvature(0.0, 0.4);
        assert_eq!(g.pos, [0.4f64.sinh(), 0.0, 0.4f64.cosh()]);
        assert!(hyperbolic_oracle(&g) < 1e-14);

        let h = hyperbolic_constant_curvature(1.0, 1.0);
        assert_eq!(h.pos, [1.0, 0.5, 1.5]);
        assert!((hyperbolic_oracle(&h) - 1.0).abs() < 1e-14);
        assert!((Factor::Hyperbolic.inner(&h.pos, &h.pos) + 1.0).abs() < 1e-15);

        for k in [0.3, 1.0, 2.0, -0.6] {
            for i in 0..100 {
                let c = hyperbolic_constant_curvature(k, -2.0 + i as f64 * 0.04);
                assert!((c.speed(Factor::Hyperbolic) - 1.0).abs() < 1e-10);
                assert!((hyperbolic_oracle(&c) - k.abs()).abs() < 1e-8);
                assert!((c.geodesic_curvature(Factor::Hyperbolic) - k).abs() < 1e-8);
            }
        }
    }

    fn constant_problem(factor: Factor, k: f64, x_end: f64) -> PrescribedCurveProblem<ModulatedLaw> {
        PrescribedCurveProblem::from_base_point(factor, ModulatedLaw::constant(1.0, k), vec![0.0], 0.0, x_end, DEFAULT_STEP)
    }

    #[test]
    fn integrator_reproduces_geodesic() {
        let curve = frenet_integrate(constant_problem(Factor::Hyperbolic, 0.0, 2.0)).unwrap();
        for s in curve.samples() {
            let g = hyperbolic_constant_curvature(0.0, s.x);
            for i in 0..3 {
                assert!((s.pos[i] - g.pos[i]).abs() < 1e-8, "{s:?}");
            }
        }
    }

    #[test]
    fn integrator_reproduces_horocycle_and_circle() {
        let curve = frenet_integrate(constant_problem(Factor::Hyperbolic, 1.0, 2.0)).unwrap();
        for s in curve.samples().iter().step_by(50) {
            let closed = hyperbolic_constant_curvature(1.0, s.x);
            // same base point and initial frame, so the curves coincide
            for i in 0..3 {
                assert!((s.pos[i] - closed.pos[i]).abs() < 1e-8);
            }
            assert!((hyperbolic_oracle(s) - 1.0).abs() < 1e-7);
        }

        let curve = frenet_integrate(constant_problem(Factor::Sphere, 1.0, 3.0)).unwrap();
        for s in curve.samples().iter().step_by(50) {
            // height above the equator of the osculating latitude circle is fixed by k
            assert!((sphere_oracle(s) - 1.0).abs() < 1e-7);
            assert!((s.speed(Factor::Sphere) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn prescribed_speed_and_curvature_are_honoured() {
        struct Varying;
        impl CurveLaw for Varying {
            fn driver_dim(&self) -> usize {
                1
            }
            fn driver_field<S: Scalar>(&self, _d: &[S], out: &mut [S]) {
                out[0] = S::cst(1.0);
            }
            fn law<S: Scalar>(&self, d: &[S]) -> (S, S, S) {
                let x = d[0];
                let v = x * x * 0.5 + 1.0;
                (v, x, (x * 2.0).sin() * 0.7 - 0.2)
            }
        }
        for factor in [Factor::Sphere, Factor::Hyperbolic] {
            let prob = PrescribedCurveProblem::from_base_point(factor, Varying, vec![0.0], 0.0, 1.5, 1e-3);
            let curve = frenet_integrate(prob).unwrap();
            for s in curve.samples() {
                let v = 1.0 + 0.5 * s.x * s.x;
                let k = 0.7 * (2.0 * s.x).sin() - 0.2;
                assert!(factor.membership_residual(&s.pos) < 1e-8);
                assert!(factor.inner(&s.pos, &s.d1).abs() < 1e-8);
                assert!((s.speed(factor) - v).abs() < 1e-6);
                assert!((s.geodesic_curvature(factor) - k).abs() < 1e-5);
            }
            // off-grid evaluation agrees with the grid
            let mid = curve.eval(0.7005);
            assert!((mid.speed(factor) - (1.0 + 0.5 * 0.7005f64.powi(2))).abs() < 1e-9);
        }
    }

    #[test]
    fn curvature_sign_reflects_the_curve() {
        let a = frenet_integrate(constant_problem(Factor::Hyperbolic, 0.6, 1.0)).unwrap();
        let b = frenet_integrate(constant_problem(Factor::Hyperbolic, -0.6, 1.0)).unwrap();
        for (p, q) in a.samples().iter().zip(b.samples()) {
            // reflection across the initial tangent line y = 0
            assert!((p.pos[0] - q.pos[0]).abs() < 1e-10);
            assert!((p.pos[1] + q.pos[1]).abs() < 1e-10);
            assert!((p.geodesic_curvature(Factor::Hyperbolic) + q.geodesic_curvature(Factor::Hyperbolic)).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_problems() {
        let mut p = constant_problem(Factor::Sphere, 0.0, 1.0);
        p.step = 0.0;
        assert!(matches!(frenet_integrate(p), Err(GeomError::InvalidParameter(_))));
        let mut p = constant_problem(Factor::Sphere, 0.0, 1.0);
        p.unit_tangent = [0.0, 0.0, 1.0];
        assert!(matches!(frenet_integrate(p), Err(GeomError::InvariantViolation(_))));
        let mut p = constant_problem(Factor::Sphere, 0.0, 1.0);
        p.law.speed = -1.0;
        assert!(matches!(frenet_integrate(p), Err(GeomError::InvalidParameter(_))));
    }
}
