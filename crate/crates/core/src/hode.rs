//! Profile equations of the two special surface families.
//!
//! The profile `h` satisfies `(h')² = P(h)` with
//! `P = (a − h² − σ b Q)(a − h²)`, `Q = 1 + (h − c)²`, `σ = +1` for the first
//! family and `σ = −1` for the second. It is integrated in the second-order
//! form `h'' = P'(h)/2`; the first-order equation is only used as an energy
//! monitor.

use serde::{Deserialize, Serialize};

use crate::curves::CurveLaw;
use crate::error::{GeomError, Result};
use crate::ode::{Halt, Trajectory, VectorField};
use crate::series::{Scalar, Series};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_X_MAX: f64 = 5.0;

/// Integration stops once the domain quantity `±(a − h²)` drops below this.
pub const DOMAIN_MARGIN: f64 = 1e-4;

/// Second-family profiles can blow up in finite time; integration stops at this |h|.
pub const BLOW_UP_CAP: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    S1,
    S2,
}

impl Variant {
    fn sigma(self) -> f64 {
        match self {
            Variant::S1 => 1.0,
            Variant::S2 => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlopeSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl SlopeSign {
    pub fn value(self) -> f64 {
        match self {
            SlopeSign::Plus => 1.0,
            SlopeSign::Minus => -1.0,
        }
    }
}

/// Parameters `(a, b, c)` and the variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub variant: Variant,
}

impl ProfileParams {
    pub fn new(a: f64, b: f64, c: f64, variant: Variant) -> Self {
        ProfileParams { a, b, c, variant }
    }

    pub fn q<S: Scalar>(&self, h: S) -> S {
        let d = h - self.c;
        d * d + 1.0
    }

    /// `a − h²` for the first family, `h² − a` for the second; positive on the domain.
    pub fn domain<S: Scalar>(&self, h: S) -> S {
        (h * h * -1.0 + self.a) * self.variant.sigma()
    }

    pub fn p<S: Scalar>(&self, h: S) -> S {
        let base = h * h * -1.0 + self.a;
        (base - self.q(h) * (self.b * self.variant.sigma())) * base
    }

    pub fn dp(&self, h: f64) -> f64 {
        let base = self.a - h * h;
        let inner = base - self.variant.sigma() * self.b * self.q(h);
        let d_inner = -2.0 * h - self.variant.sigma() * self.b * 2.0 * (h - self.c);
        d_inner * base + inner * (-2.0 * h)
    }

    fn dp_generic<S: Scalar>(&self, h: S) -> S {
        let sigma = self.variant.sigma();
        let base = h * h * -1.0 + self.a;
        let inner = base - self.q(h) * (self.b * sigma);
        let d_inner = h * -2.0 - (h - self.c) * (2.0 * self.b * sigma);
        d_inner * base + inner * (h * -2.0)
    }

    /// Whether `h` lies on the admissible side of the domain inequality (and on
    /// the upper hyperboloid sheet for the second family when `a ≥ 0`).
    pub fn admissible(&self, h: f64, margin: f64) -> bool {
        let sheet = self.variant == Variant::S1 || self.a < 0.0 || h > 0.0;
        sheet && self.domain(h) > margin
    }

    /// Integration veto: blow-up cap and domain margin.
    pub fn check_state(&self, h: f64) -> std::result::Result<(), String> {
        if h.abs() > BLOW_UP_CAP {
            Err("profile exceeds the blow-up cap".into())
        } else if !self.admissible(h, DOMAIN_MARGIN) {
            Err("domain inequality about to fail".into())
        } else {
            Ok(())
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) {
            return Err(GeomError::InvalidParameter(format!("b must be positive, got {}", self.b)));
        }
        if self.variant == Variant::S1 && !(self.a > 0.0) {
            return Err(GeomError::InvalidParameter(format!("first family needs a > 0, got {}", self.a)));
        }
        if ![self.a, self.b, self.c].iter().all(|v| v.is_finite()) {
            return Err(GeomError::InvalidParameter("parameters must be finite".into()));
        }
        Ok(())
    }

    /// A deterministic starting height for parameter sweeps: the grid point of
    /// the admissible interval where `P` is largest (first family) or the first
    /// grid point where `P` reaches half its maximum over a window (second family).
    pub fn default_h0(&self) -> Option<f64> {
        let (lo, hi) = match self.variant {
            Variant::S1 => (-self.a.sqrt(), self.a.sqrt()),
            Variant::S2 if self.a >= 0.0 => (self.a.sqrt(), self.a.sqrt() + 3.0),
            Variant::S2 => (self.c - 3.0, self.c + 3.0),
        };
        let n = 600;
        let grid: Vec<f64> = (1..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let ok: Vec<(f64, f64)> = grid
            .into_iter()
            .filter(|&h| self.admissible(h, 0.01))
            .map(|h| (h, self.p(h)))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        let pmax = ok.iter().map(|&(_, p)| p).fold(f64::NEG_INFINITY, f64::max);
        match self.variant {
            Variant::S1 => ok.iter().find(|&&(_, p)| p == pmax).map(|&(h, _)| h),
            Variant::S2 => ok.iter().find(|&&(_, p)| p >= 0.5 * pmax).map(|&(h, _)| h),
        }
    }
}

/// `(h, h')' = (h', P'(h)/2)`.
impl VectorField for ProfileParams {
    fn dim(&self) -> usize {
        2
    }
    fn eval<S: Scalar>(&self, y: &[S], out: &mut [S]) {
        out[0] = y[1];
        out[1] = self.dp_generic(y[0]) * 0.5;
    }
}

/// Speed `√(bQ)` and curvature `−b·domain(h)/speed³` of the companion curve,
/// driven by the profile state `(h, h')`.
impl CurveLaw for ProfileParams {
    fn driver_dim(&self) -> usize {
        2
    }
    fn driver_field<S: Scalar>(&self, d: &[S], out: &mut [S]) {
        self.eval(d, out);
    }
    fn law<S: Scalar>(&self, d: &[S]) -> (S, S, S) {
        let (h, hp) = (d[0], d[1]);
        let v = (self.q(h) * self.b).sqrt();
        let vp = (h - self.c) * hp * self.b / v;
        let kappa = self.domain(h) * (-self.b) / (v * v * v);
        (v, vp, kappa)
    }
    fn admissible(&self, d: &[f64]) -> std::result::Result<(), String> {
        self.check_state(d[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub x: f64,
    pub h: f64,
    pub hp: f64,
    pub hpp: f64,
}

#[derive(Debug, Clone)]
pub struct ProfileSolution {
    pub params: ProfileParams,
    pub trajectory: Trajectory,
    /// Why integration ended before `x_max`, if it did.
    pub halt: Halt,
}

impl ProfileSolution {
    pub fn admissible_range(&self) -> (f64, f64) {
        self.trajectory.range()
    }

    pub fn samples(&self) -> Vec<ProfileSample> {
        self.trajectory
            .states
            .iter()
            .enumerate()
            .map(|(i, y)| ProfileSample { x: self.trajectory.x_at(i), h: y[0], hp: y[1], hpp: 0.5 * self.params.dp(y[0]) })
            .collect()
    }

    pub fn max_energy_residual(&self) -> f64 {
        self.samples()
            .iter()
            .map(|s| (s.hp * s.hp - self.params.p(s.h)).abs())
            .fold(0.0, f64::max)
    }

    /// `h` and `h'` as Taylor series at `x` (so `h''` and `h'''` come with them).
    pub fn series_at(&self, x: f64) -> [Series; 2] {
        let s = self.trajectory.series_at(&self.params, x);
        [s[0], s[1]]
    }
}

/// Initial slope for `h(0) = h0`, with the preconditions of the profile equation.
pub fn initial_slope(params: &ProfileParams, h0: f64, sign: SlopeSign) -> Result<f64> {
    params.validate()?;
    if !params.admissible(h0, 0.0) {
        return Err(GeomError::InvalidParameter(format!(
            "h0 = {h0} violates the domain inequality of {:?}",
            params.variant
        )));
    }
    let p0 = params.p(h0);
    if p0 < 0.0 {
        return Err(GeomError::InvalidParameter(format!("P(h0) = {p0} is negative")));
    }
    if p0 == 0.0 && params.dp(h0) == 0.0 {
        return Err(GeomError::InvalidParameter("initial data gives a constant profile".into()));
    }
    Ok(sign.value() * p0.sqrt())
}

pub fn integrate_h(params: ProfileParams, h0: f64, sign: SlopeSign, x_max: f64, step: f64) -> Result<ProfileSolution> {
    if !(step > 0.0) || !(x_max > 0.0) {
        return Err(GeomError::InvalidParameter("step and x_max must be positive".into()));
    }
    let hp0 = initial_slope(&params, h0, sign)?;
    let (trajectory, halt) =
        Trajectory::integrate(&params, 0.0, vec![h0, hp0], x_max, step, |_, y| params.check_state(y[0]));
    Ok(ProfileSolution { params, trajectory, halt })
}
