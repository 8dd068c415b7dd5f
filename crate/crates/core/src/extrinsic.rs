//! Pointwise extrinsic geometry of a surface Σ in S²×H².
//!
//! Everything is computed from an [`ImmersionJet`]. The normal space of Σ is
//! taken inside T(S²×H²), which is Riemannian even though ℝ⁶₁ is not.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambient::{Factor, Kahler, MinkowskiVector6, ProductTangent};
use crate::linalg::{adj2, commutator2, det4, inv2, mat2_norm, mat2_sub, sym2_eigen, Mat2};
use crate::error::{GeomError, Result};
use crate::surfaces::{ImmersionJet, Surface};

/// Default step for finite differences of analytic fields.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Tolerance on `|E − G|` and `|F|` (relative to `E`) for conformal charts.
pub const CONFORMAL_TOL: f64 = 1e-6;

/// Chart-level geometry at one point: metric, orthonormal frames and `h`.
#[derive(Debug, Clone, Copy)]
pub struct LocalGeometry {
    pub jet: ImmersionJet,
    pub g: Mat2,
    pub g_inv: Mat2,
    /// `h(∂x,∂x), h(∂x,∂y), h(∂y,∂y)`.
    pub h: [MinkowskiVector6; 3],
    /// Positively oriented orthonormal tangent frame (Gram–Schmidt of `∂x, ∂y`).
    pub e: [MinkowskiVector6; 2],
    /// Chart coefficients of `e`: `e_i = c[i][0] ∂x + c[i][1] ∂y`.
    pub e_coeffs: [[f64; 2]; 2],
    /// Orthonormal normal frame with `(e₁, e₂, n₁, n₂)` positive.
    pub normal: [MinkowskiVector6; 2],
}

fn coords4(basis: &[MinkowskiVector6; 4], v: &MinkowskiVector6) -> [f64; 4] {
    [0, 1, 2, 3].map(|k| v.inner(&basis[k]))
}

impl LocalGeometry {
    pub fn new(jet: &ImmersionJet) -> Result<Self> {
        let (e, f, g) = jet.first_fundamental();
        let gm = [[e, f], [f, g]];
        let (vals, _) = sym2_eigen(&gm);
        if !(vals[1] > 1e-12 * (1.0 + vals[0])) {
            return Err(GeomError::RankDeficient(e * g - f * f));
        }
        let g_inv = inv2(&gm).ok_or(GeomError::RankDeficient(e * g - f * f))?;
        let p = jet.point;
        let tangent = |w: &MinkowskiVector6| {
            let a = [w.inner(&jet.dx), w.inner(&jet.dy)];
            let cx = g_inv[0][0] * a[0] + g_inv[0][1] * a[1];
            let cy = g_inv[1][0] * a[0] + g_inv[1][1] * a[1];
            jet.dx * cx + jet.dy * cy
        };
        let h = [jet.dxx, jet.dxy, jet.dyy].map(|d| {
            let t = p.project(&d);
            t - tangent(&t)
        });

        let sx = e.sqrt();
        let e1 = jet.dx * (1.0 / sx);
        let w = jet.dy - e1 * jet.dy.inner(&e1);
        let nw = w.inner(&w).sqrt();
        let e2 = w * (1.0 / nw);
        let c2y = 1.0 / nw;
        let c2x = -(jet.dy.inner(&e1) / sx) * c2y;
        let e_coeffs = [[1.0 / sx, 0.0], [c2x, c2y]];

        // complete (e₁, e₂) with the two ambient frame vectors least tangent to Σ
        let basis = p.frame();
        let mut cand: Vec<MinkowskiVector6> = basis
            .iter()
            .map(|b| *b - e1 * b.inner(&e1) - e2 * b.inner(&e2))
            .collect();
        cand.sort_by(|a, b| b.inner(b).total_cmp(&a.inner(a)));
        let n1 = cand[0] * (1.0 / cand[0].inner(&cand[0]).sqrt());
        let r = cand[1] - n1 * cand[1].inner(&n1);
        let mut n2 = r * (1.0 / r.inner(&r).sqrt());
        let m = [e1, e2, n1, n2].map(|v| coords4(&basis, &v));
        if det4(&m) < 0.0 {
            n2 = -n2;
        }
        Ok(LocalGeometry { jet: *jet, g: gm, g_inv, h, e: [e1, e2], e_coeffs, normal: [n1, n2] })
    }

    /// Component of `w ∈ T(S²×H²)` tangent to Σ.
    pub fn tangent_part(&self, w: &MinkowskiVector6) -> MinkowskiVector6 {
        self.e[0] * w.inner(&self.e[0]) + self.e[1] * w.inner(&self.e[1])
    }

    /// Component of `w ∈ ℝ⁶₁` normal to Σ inside T(S²×H²).
    pub fn normal_part(&self, w: &MinkowskiVector6) -> MinkowskiVector6 {
        let t = self.jet.point.project(w);
        t - self.tangent_part(&t)
    }

    /// `h(X, Y)` for chart-coefficient vectors `X, Y`.
    pub fn h_of(&self, a: [f64; 2], b: [f64; 2]) -> MinkowskiVector6 {
        self.h[0] * (a[0] * b[0]) + self.h[1] * (a[0] * b[1] + a[1] * b[0]) + self.h[2] * (a[1] * b[1])
    }

    /// `h(eᵢ, eⱼ)`.
    pub fn h_ortho(&self, i: usize, j: usize) -> MinkowskiVector6 {
        self.h_of(self.e_coeffs[i], self.e_coeffs[j])
    }

    /// Matrix of `A_ξ` in `(e₁, e₂)`.
    pub fn shape_operator(&self, xi: &MinkowskiVector6) -> Mat2 {
        let a = |i, j| self.h_ortho(i, j).inner(xi);
        let off = a(0, 1);
        [[a(0, 0), off], [off, a(1, 1)]]
    }

    /// Matrix of `f: v ↦ (Fv)ᵀ` in `(e₁, e₂)`.
    pub fn f_matrix(&self) -> Mat2 {
        let fe = self.e.map(|v| v.flip_hyperbolic());
        let off = 0.5 * (fe[0].inner(&self.e[1]) + fe[1].inner(&self.e[0]));
        [[fe[0].inner(&self.e[0]), off], [off, fe[1].inner(&self.e[1])]]
    }

    /// `H = ½ gⁱʲ hᵢⱼ`.
    pub fn mean_curvature(&self) -> MinkowskiVector6 {
        let gi = &self.g_inv;
        (self.h[0] * gi[0][0] + self.h[1] * (2.0 * gi[0][1]) + self.h[2] * gi[1][1]) * 0.5
    }

    /// `e^{2u}` with `u` the conformal factor (mean of `E` and `G`).
    pub fn conformal_factor(&self) -> f64 {
        0.5 * (self.g[0][0] + self.g[1][1])
    }

    pub fn check_conformal(&self) -> Result<()> {
        let (e, f, g) = (self.g[0][0], self.g[0][1], self.g[1][1]);
        let tol = CONFORMAL_TOL * e.max(1.0);
        if (e - g).abs() > tol || f.abs() > tol {
            return Err(GeomError::NonConformal { e_minus_g: (e - g).abs(), f: f.abs() });
        }
        Ok(())
    }

    /// Christoffel coefficients: `∇_{∂ᵢ}∂ⱼ = Σ_k gamma[i][j][k] ∂_k`.
    pub fn christoffel(&self) -> [[[f64; 2]; 2]; 2] {
        let d = [[self.jet.dxx, self.jet.dxy], [self.jet.dxy, self.jet.dyy]];
        let mut out = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let a = [d[i][j].inner(&self.jet.dx), d[i][j].inner(&self.jet.dy)];
                for k in 0..2 {
                    out[i][j][k] = self.g_inv[k][0] * a[0] + self.g_inv[k][1] * a[1];
                }
            }
        }
        out
    }
}

/// Second fundamental form `(h_xx, h_xy, h_yy)`.
pub fn second_fundamental(jet: &ImmersionJet) -> Result<[MinkowskiVector6; 3]> {
    Ok(LocalGeometry::new(jet)?.h)
}

/// `(H, ‖H‖²)`.
pub fn mean_curvature(jet: &ImmersionJet) -> Result<(MinkowskiVector6, f64)> {
    let hv = LocalGeometry::new(jet)?.mean_curvature();
    Ok((hv, hv.inner(&hv)))
}

/// Coefficient of Θ = (4⟨h(∂z,∂z),H⟩ + ⟨F∂z,∂z⟩) dz⊗dz, with ∂z = (∂x − i∂y)/2.
pub fn hopf_coefficient(jet: &ImmersionJet, h_vec: &MinkowskiVector6) -> Result<Complex64> {
    let geo = LocalGeometry::new(jet)?;
    geo.check_conformal()?;
    Ok(hopf_from(&geo, h_vec))
}

fn hopf_from(geo: &LocalGeometry, h_vec: &MinkowskiVector6) -> Complex64 {
    let j = &geo.jet;
    let [hxx, hxy, hyy] = geo.h;
    let hzz = Complex64::new((hxx - hyy).inner(h_vec), -2.0 * hxy.inner(h_vec)) * 0.25;
    let fx = j.dx.flip_hyperbolic();
    let fy = j.dy.flip_hyperbolic();
    let fzz = Complex64::new(fx.inner(&j.dx) - fy.inner(&j.dy), -2.0 * fx.inner(&j.dy)) * 0.25;
    hzz * 4.0 + fzz
}

/// Kähler functions `Cⱼ = ⟨Jⱼe₁, e₂⟩`.
pub fn kahler_functions(jet: &ImmersionJet) -> Result<(f64, f64)> {
    let geo = LocalGeometry::new(jet)?;
    Ok(kahler_from(&geo))
}

fn kahler_from(geo: &LocalGeometry) -> (f64, f64) {
    let p = &geo.jet.point;
    let c = |k: Kahler| k.apply(p, &geo.e[0]).inner(&geo.e[1]);
    (c(Kahler::J1), c(Kahler::J2))
}

/// Shape-operator data in the orthonormal chart frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeData {
    pub a_h: Mat2,
    pub a_perp: Mat2,
    pub f_mat: Mat2,
    pub pseudo_umbilical: bool,
    /// `‖[A_{n₁}, A_{n₂}]‖` for an orthonormal normal frame.
    pub ricci_residual: f64,
    /// `‖A_H − (‖H‖² id − f/8 + Adj(f)/8)‖`.
    pub ah_formula_residual: f64,
}

/// Unit normal orthogonal to `H` with `(e₁, e₂, H^⊥, H/‖H‖)` positive, or `n₁` when `H = 0`.
fn perp_normal(geo: &LocalGeometry, h_vec: &MinkowskiVector6) -> MinkowskiVector6 {
    let n = h_vec.inner(h_vec).sqrt();
    if n < 1e-14 {
        return geo.normal[0];
    }
    let eta = *h_vec * (1.0 / n);
    // (n₁, n₂) is positive, so rotating η by −90° inside the normal plane gives η̃
    let (a, b) = (eta.inner(&geo.normal[0]), eta.inner(&geo.normal[1]));
    geo.normal[0] * b - geo.normal[1] * a
}

pub fn shape_and_f(jet: &ImmersionJet) -> Result<ShapeData> {
    let geo = LocalGeometry::new(jet)?;
    Ok(shape_from(&geo))
}

fn shape_from(geo: &LocalGeometry) -> ShapeData {
    let hv = geo.mean_curvature();
    let h2 = hv.inner(&hv);
    let a_h = geo.shape_operator(&hv);
    let a_perp = geo.shape_operator(&perp_normal(geo, &hv));
    let f_mat = geo.f_matrix();
    let id = [[h2, 0.0], [0.0, h2]];
    let tau = 1e-7 * (1.0 + mat2_norm(&a_h));
    let pseudo_umbilical = mat2_norm(&mat2_sub(&a_h, &id)) < tau;
    let an = geo.normal.map(|n| geo.shape_operator(&n));
    let ricci_residual = mat2_norm(&commutator2(&an[0], &an[1]));
    let adj = adj2(&f_mat);
    let predicted = [0, 1].map(|i| [0, 1].map(|j| id[i][j] - f_mat[i][j] / 8.0 + adj[i][j] / 8.0));
    let ah_formula_residual = mat2_norm(&mat2_sub(&a_h, &predicted));
    ShapeData { a_h, a_perp, f_mat, pseudo_umbilical, ricci_residual, ah_formula_residual }
}

fn smallest_singular(v: [[f64; 3]; 2], factor: Factor) -> f64 {
    let g = [[factor.inner(&v[0], &v[0]), factor.inner(&v[0], &v[1])], [factor.inner(&v[1], &v[0]), factor.inner(&v[1], &v[1])]];
    sym2_eigen(&g).0[1].max(0.0).sqrt()
}

/// Smallest singular values of `d(π₁∘Φ)` and `d(π₂∘Φ)` in the orthonormal frame.
pub fn projection_rank_defect(jet: &ImmersionJet) -> Result<(f64, f64)> {
    let geo = LocalGeometry::new(jet)?;
    Ok(rank_defect_from(&geo))
}

fn rank_defect_from(geo: &LocalGeometry) -> (f64, f64) {
    let s = geo.e.map(|v| v.sphere_part());
    let h = geo.e.map(|v| v.hyperbolic_part());
    (smallest_singular(s, Factor::Sphere), smallest_singular(h, Factor::Hyperbolic))
}

fn check_stencil(surface: &Surface, x: f64, y: f64, step: f64) -> Result<()> {
    if !(step > 0.0) {
        return Err(GeomError::InvalidParameter("finite-difference step must be positive".into()));
    }
    if !surface.domain().contains(x, y, step) {
        return Err(GeomError::OutOfDomain { x, y });
    }
    Ok(())
}

fn geometry_at(surface: &Surface, x: f64, y: f64, order: usize) -> Result<LocalGeometry> {
    LocalGeometry::new(&surface.eval_jet(x, y, order)?)
}

/// Central difference of a vector field along the chart direction `dir`.
fn directional<F>(x: f64, y: f64, dir: [f64; 2], step: f64, field: F) -> Result<MinkowskiVector6>
where
    F: Fn(f64, f64) -> Result<MinkowskiVector6>,
{
    let p = field(x + step * dir[0], y + step * dir[1])?;
    let m = field(x - step * dir[0], y - step * dir[1])?;
    Ok((p - m) * (0.5 / step))
}

/// `max_i ‖∇⊥_{eᵢ}H‖` over the unit chart directions, from central differences of the analytic `H`.
pub fn pmc_residual(surface: &Surface, x: f64, y: f64, fd_step: f64) -> Result<f64> {
    check_stencil(surface, x, y, fd_step)?;
    let geo = geometry_at(surface, x, y, 2)?;
    let field = |a, b| Ok(geometry_at(surface, a, b, 2)?.mean_curvature());
    let mut worst: f64 = 0.0;
    for (k, dir) in [[1.0, 0.0], [0.0, 1.0]].into_iter().enumerate() {
        let d = directional(x, y, dir, fd_step, field)?;
        let n = geo.normal_part(&d);
        worst = worst.max(n.inner(&n).max(0.0).sqrt() / geo.g[k][k].sqrt());
    }
    Ok(worst)
}

/// `max |⟨A_ξ eᵢ, eⱼ⟩ + ⟨D_{eᵢ}ξ, eⱼ⟩|` for `ξ ∈ {H, H^⊥}`: the shape operator
/// built from `h` against the Weingarten formula, with `Dξ` from Richardson-extrapolated
/// central differences of the normal fields.
pub fn weingarten_residual(surface: &Surface, x: f64, y: f64, fd_step: f64) -> Result<f64> {
    check_stencil(surface, x, y, fd_step)?;
    let geo = geometry_at(surface, x, y, 2)?;
    let hv = geo.mean_curvature();
    let fields: [fn(&LocalGeometry) -> MinkowskiVector6; 2] =
        [|g| g.mean_curvature(), |g| perp_normal(g, &g.mean_curvature())];
    let mut worst: f64 = 0.0;
    for (k, field) in fields.into_iter().enumerate() {
        let xi = if k == 0 { hv } else { perp_normal(&geo, &hv) };
        let a = geo.shape_operator(&xi);
        let f = |u, v| Ok(field(&geometry_at(surface, u, v, 2)?));
        let d = [[1.0, 0.0], [0.0, 1.0]].map(|dir| -> Result<MinkowskiVector6> {
            let coarse = directional(x, y, dir, fd_step, f)?;
            let fine = directional(x, y, dir, 0.5 * fd_step, f)?;
            Ok((fine * 4.0 - coarse) * (1.0 / 3.0))
        });
        let [dx, dy] = [d[0].clone()?, d[1].clone()?];
        for i in 0..2 {
            let c = geo.e_coeffs[i];
            let dxi = dx * c[0] + dy * c[1];
            for j in 0..2 {
                worst = worst.max((a[i][j] + dxi.inner(&geo.e[j])).abs());
            }
        }
    }
    Ok(worst)
}

/// `‖(∇̄h)(X,Y,Z) − (∇̄h)(Y,X,Z) − (R̃(X,Y)Z)^⊥‖` for chart-coefficient directions.
pub fn codazzi_residual(surface: &Surface, x: f64, y: f64, dirs: [[f64; 2]; 3], fd_step: f64) -> Result<f64> {
    let [xd, yd, zd] = dirs;
    if xd == yd {
        return Ok(0.0);
    }
    check_stencil(surface, x, y, fd_step)?;
    let jet = surface.eval_jet(x, y, 3)?;
    if jet.third.is_none() {
        return Err(GeomError::JetOrder);
    }
    let geo = LocalGeometry::new(&jet)?;
    let gamma = geo.christoffel();
    let nabla = |a: [f64; 2], b: [f64; 2]| {
        let mut out = [0.0; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[k] += a[i] * b[j] * gamma[i][j][k];
                }
            }
        }
        out
    };
    let cov = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| -> Result<MinkowskiVector6> {
        let field = |u, v| Ok(geometry_at(surface, u, v, 2)?.h_of(b, c));
        let d = geo.normal_part(&directional(x, y, a, fd_step, field)?);
        Ok(d - geo.h_of(nabla(a, b), c) - geo.h_of(b, nabla(a, c)))
    };
    let lhs = cov(xd, yd, zd)? - cov(yd, xd, zd)?;
    let vec = |c: [f64; 2]| ProductTangent { base: jet.point, v: jet.dx * c[0] + jet.dy * c[1] };
    let r = crate::ambient::riemann_tensor(&vec(xd), &vec(yd), &vec(zd))?;
    let res = lhs - geo.normal_part(&r.v);
    Ok(res.inner(&res).max(0.0).sqrt())
}

/// One row of pointwise extrinsic data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtrinsicReport {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "F")]
    pub f_metric: f64,
    #[serde(rename = "G")]
    pub g: f64,
    pub u: Option<f64>,
    pub h_vec: MinkowskiVector6,
    pub h_norm2: f64,
    pub theta: Option<Complex64>,
    pub c1: f64,
    pub c2: f64,
    pub a_h: Mat2,
    pub a_perp: Mat2,
    pub f_mat: Mat2,
    pub smin_dphi: f64,
    pub smin_dpsi: f64,
    pub pmc_residual: f64,
    pub pseudo_umbilical: bool,
    pub ricci_residual: f64,
    pub ah_formula_residual: f64,
}

pub const CSV_HEADER: &str =
    "x,y,E,F,G,u,Hnorm2,theta_re,theta_im,C1,C2,smin_dphi,smin_dpsi,pmc_residual,pseudo_umbilical";

impl ExtrinsicReport {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("NaN".to_string(), |v| format!("{v:.12e}"));
        let cols = [
            format!("{:.12e}", self.x),
            format!("{:.12e}", self.y),
            format!("{:.12e}", self.e),
            format!("{:.12e}", self.f_metric),
            format!("{:.12e}", self.g),
            opt(self.u),
            format!("{:.12e}", self.h_norm2),
            opt(self.theta.map(|t| t.re)),
            opt(self.theta.map(|t| t.im)),
            format!("{:.12e}", self.c1),
            format!("{:.12e}", self.c2),
            format!("{:.12e}", self.smin_dphi),
            format!("{:.12e}", self.smin_dpsi),
            format!("{:.12e}", self.pmc_residual),
            self.pseudo_umbilical.to_string(),
        ];
        cols.join(",")
    }
}

/// Full report at `(x, y)`. Θ and `u` are left empty on non-conformal charts.
pub fn extrinsic_report(surface: &Surface, x: f64, y: f64, fd_step: f64) -> Result<ExtrinsicReport> {
    let jet = surface.eval_jet(x, y, 2)?;
    let geo = LocalGeometry::new(&jet)?;
    let hv = geo.mean_curvature();
    let conformal = geo.check_conformal().is_ok();
    let (c1, c2) = kahler_from(&geo);
    let shape = shape_from(&geo);
    let (smin_dphi, smin_dpsi) = rank_defect_from(&geo);
    Ok(ExtrinsicReport {
        x,
        y,
        e: geo.g[0][0],
        f_metric: geo.g[0][1],
        g: geo.g[1][1],
        u: conformal.then(|| 0.5 * geo.conformal_factor().ln()),
        h_vec: hv,
        h_norm2: hv.inner(&hv),
        theta: conformal.then(|| hopf_from(&geo, &hv)),
        c1,
        c2,
        a_h: shape.a_h,
        a_perp: shape.a_perp,
        f_mat: shape.f_mat,
        smin_dphi,
        smin_dpsi,
        pmc_residual: pmc_residual(surface, x, y, fd_step)?,
        pseudo_umbilical: shape.pseudo_umbilical,
        ricci_residual: shape.ricci_residual,
        ah_formula_residual: shape.ah_formula_residual,
    })
}
