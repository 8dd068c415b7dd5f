//! Rotational CMC spheres of M²(ε)×ℝ.
//!
//! The profile is written in the conformal coordinate `w` of the rotational
//! chart `(w, φ)`, in which the metric is `sn²θ (dw² + dφ²)`:
//!
//! ```text
//! θ_w = sn θ cos σ,   t_w = sn θ sin σ,   σ_w = 2H sn θ − cn θ sin σ
//! ```
//!
//! with `(sn, cn) = (sin, cos)` for ε = +1 and `(sinh, cosh)` for ε = −1.

use crate::error::{GeomError, Result};
use crate::ode::{Halt, Trajectory, VectorField};
use crate::series::{Scalar, Series};

/// Polar angle at which integration starts, off the rotation axis.
pub const POLE_OFFSET: f64 = 1e-4;
const W_MAX: f64 = 80.0;

pub(crate) fn check_sphere_params(epsilon: f64, mean_curvature: f64) -> Result<()> {
    if !(mean_curvature > 0.0) || !mean_curvature.is_finite() {
        return Err(GeomError::InvalidParameter(format!("mean curvature must be positive, got {mean_curvature}")));
    }
    if epsilon < 0.0 && mean_curvature <= 0.5 {
        return Err(GeomError::InvalidParameter(format!(
            "rotational spheres in H2xR need H > 1/2, got {mean_curvature}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct RotationalField {
    pub epsilon: f64,
    pub mean_curvature: f64,
}

impl RotationalField {
    pub fn sn_cn<S: Scalar>(&self, t: S) -> (S, S) {
        if self.epsilon > 0.0 {
            (t.sin(), t.cos())
        } else {
            (t.sinh(), t.cosh())
        }
    }
}

impl VectorField for RotationalField {
    fn dim(&self) -> usize {
        3
    }
    fn eval<S: Scalar>(&self, y: &[S], out: &mut [S]) {
        let (sn, cn) = self.sn_cn(y[0]);
        let (ss, cs) = (y[2].sin(), y[2].cos());
        out[0] = sn * cs;
        out[1] = sn * ss;
        out[2] = sn * (2.0 * self.mean_curvature) - cn * ss;
    }
}

/// Integrated profile `(θ, t, σ)(w)` of a rotational CMC sphere.
#[derive(Debug, Clone)]
pub struct RotationalProfile {
    pub field: RotationalField,
    pub trajectory: Trajectory,
}

impl RotationalProfile {
    /// `[θ, t, σ]` as Taylor series at `w`.
    pub fn series_at(&self, w: f64) -> Vec<Series> {
        self.trajectory.series_at(&self.field, w)
    }

    pub fn max_polar_angle(&self) -> f64 {
        self.trajectory.states.iter().map(|s| s[0]).fold(0.0, f64::max)
    }

    /// The `w`-interval on which `θ` exceeds `fraction` of its maximum.
    pub fn core_range(&self, fraction: f64) -> (f64, f64) {
        let cut = fraction * self.max_polar_angle();
        let idx: Vec<usize> = (0..self.trajectory.len()).filter(|&i| self.trajectory.states[i][0] >= cut).collect();
        (self.trajectory.x_at(idx[0]), self.trajectory.x_at(*idx.last().unwrap_or(&idx[0])))
    }
}

/// Integrates the profile from near the south axis until it returns to the axis.
pub fn rotational_cmc_profile(epsilon: f64, mean_curvature: f64, step: f64) -> Result<RotationalProfile> {
    check_sphere_params(epsilon, mean_curvature)?;
    if !(step > 0.0) {
        return Err(GeomError::InvalidParameter("step must be positive".into()));
    }
    let field = RotationalField { epsilon: epsilon.signum(), mean_curvature };
    let t0 = POLE_OFFSET;
    // axis regularity: σ ≈ Hθ and t ≈ Hθ²/2 near θ = 0
    let y0 = vec![t0, 0.5 * mean_curvature * t0 * t0, mean_curvature * t0];
    let (trajectory, halt) = Trajectory::integrate(&field, 0.0, y0, W_MAX, step, |_, y| {
        if y[2] > std::f64::consts::FRAC_PI_2 && y[0] < POLE_OFFSET {
            Err("profile closed at the axis".into())
        } else {
            Ok(())
        }
    });
    match halt {
        Halt::Stopped { reason, .. } if reason.starts_with("profile closed") => Ok(RotationalProfile { field, trajectory }),
        Halt::Stopped { x, reason } => Err(GeomError::Integration(format!("rotational profile failed at w = {x}: {reason}"))),
        Halt::Completed => Err(GeomError::Integration("rotational profile did not close".into())),
    }
}
