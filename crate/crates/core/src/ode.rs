//! Fixed-step RK4 trajectories with Taylor-series dense output.
//!
//! A [`Trajectory`] stores the state on a uniform grid. Evaluating it off the
//! grid takes one partial RK4 step from the nearest stored sample, and the
//! Taylor recursion of [`taylor_expand`] then supplies derivatives of every
//! state component up to [`ORDER`] straight from the vector field.

use crate::series::{Scalar, Series, ORDER};

/// An autonomous first-order system `y' = f(y)`.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval<S: Scalar>(&self, y: &[S], out: &mut [S]);

    /// Projection applied after each accepted step (constraint renormalization).
    fn project(&self, _y: &mut [f64]) {}
}

/// One classical Runge–Kutta step of size `h`.
pub fn rk4_step<F: VectorField>(field: &F, y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    field.eval(y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    field.eval(&tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    field.eval(&tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    field.eval(&tmp, &mut k4);

    (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Taylor coefficients of the solution through `y0`, one series per component.
pub fn taylor_expand<F: VectorField>(field: &F, y0: &[f64]) -> Vec<Series> {
    let n = y0.len();
    let mut ys: Vec<Series> = y0.iter().map(|&v| Series::constant(v)).collect();
    let mut rhs = vec![Series::default(); n];
    for k in 0..ORDER {
        field.eval(&ys, &mut rhs);
        for i in 0..n {
            // (k+1) y_{k+1} = [f(y)]_k, and [f(y)]_k only sees y_0..y_k
            ys[i].0[k + 1] = rhs[i].0[k] / (k + 1) as f64;
        }
    }
    ys
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub x0: f64,
    pub step: f64,
    pub states: Vec<Vec<f64>>,
}

/// Why an integration stopped before reaching its target.
#[derive(Debug, Clone, PartialEq)]
pub enum Halt {
    Completed,
    Stopped { x: f64, reason: String },
}

impl Trajectory {
    /// Integrates forward from `x0` to `x_end` (or backward if `x_end < x0`).
    /// `keep_going` sees each proposed state and may veto it; the trajectory
    /// then ends at the last accepted state.
    pub fn integrate<F, G>(field: &F, x0: f64, y0: Vec<f64>, x_end: f64, step: f64, mut keep_going: G) -> (Self, Halt)
    where
        F: VectorField,
        G: FnMut(f64, &[f64]) -> Result<(), String>,
    {
        let h = if x_end >= x0 { step.abs() } else { -step.abs() };
        let n = ((x_end - x0) / h).round().max(0.0) as usize;
        let mut states = Vec::with_capacity(n + 1);
        let mut y = y0;
        field.project(&mut y);
        states.push(y.clone());
        let mut halt = Halt::Completed;
        for i in 0..n {
            let mut next = rk4_step(field, &y, h);
            field.project(&mut next);
            let x = x0 + (i + 1) as f64 * h;
            if next.iter().any(|v| !v.is_finite()) {
                halt = Halt::Stopped { x, reason: "non-finite state".into() };
                break;
            }
            if let Err(reason) = keep_going(x, &next) {
                halt = Halt::Stopped { x, reason };
                break;
            }
            states.push(next.clone());
            y = next;
        }
        (Trajectory { x0, step: h, states }, halt)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.step
    }

    /// Closed interval covered by the stored samples.
    pub fn range(&self) -> (f64, f64) {
        let a = self.x0;
        let b = self.x_at(self.len().saturating_sub(1));
        (a.min(b), a.max(b))
    }

    pub fn contains(&self, x: f64) -> bool {
        let (a, b) = self.range();
        x >= a - 1e-12 && x <= b + 1e-12
    }

    /// State at `x` by a partial step from the nearest grid sample.
    pub fn state_at<F: VectorField>(&self, field: &F, x: f64) -> Vec<f64> {
        let t = ((x - self.x0) / self.step).round();
        let i = (t.max(0.0) as usize).min(self.len() - 1);
        let tau = x - self.x_at(i);
        if tau == 0.0 {
            return self.states[i].clone();
        }
        rk4_step(field, &self.states[i], tau)
    }

    /// Taylor expansion of every state component at `x`.
    pub fn series_at<F: VectorField>(&self, field: &F, x: f64) -> Vec<Series> {
        taylor_expand(field, &self.state_at(field, x))
    }
}
