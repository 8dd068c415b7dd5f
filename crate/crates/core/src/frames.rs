//! Complexified Frenet data and the F-adapted orthonormal frame.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambient::{Kahler, MinkowskiVector6, ProductTangent};
use crate::error::{GeomError, Result};
use crate::extrinsic::LocalGeometry;
use crate::linalg::sym2_eigen;
use crate::surfaces::Surface;

/// Complex vector `re + i·im` in ℝ⁶₁ ⊗ ℂ.
#[derive(Debug, Clone, Copy)]
struct CVec {
    re: MinkowskiVector6,
    im: MinkowskiVector6,
}

impl CVec {
    /// Complex-bilinear extension of the ambient inner product.
    fn dot(&self, o: &CVec) -> Complex64 {
        Complex64::new(self.re.inner(&o.re) - self.im.inner(&o.im), self.re.inner(&o.im) + self.im.inner(&o.re))
    }
}

/// Frenet data of a conformal chart at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetData {
    pub u: f64,
    pub h_norm: f64,
    pub c1: f64,
    pub c2: f64,
    pub gamma1: Complex64,
    pub gamma2: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    /// `η = H/‖H‖`.
    pub eta: MinkowskiVector6,
    /// `η̃`, completing `(e^{−u}∂x, e^{−u}∂y, η̃, η)` to a positive frame.
    pub eta_tilde: MinkowskiVector6,
}

impl FrenetData {
    /// `2√2‖H‖(f₁+f₂) + γ₁γ₂`.
    pub fn hopf_alternative(&self) -> Complex64 {
        (self.f1 + self.f2) * (2.0 * SQRT_2 * self.h_norm) + self.gamma1 * self.gamma2
    }

    /// `max_j | |γⱼ|² − e^{2u}(1−Cⱼ²)/2 |`.
    pub fn gamma_norm_residual(&self) -> f64 {
        let e2u = (2.0 * self.u).exp();
        let r = |g: Complex64, c: f64| (g.norm_sqr() - 0.5 * e2u * (1.0 - c * c)).abs();
        r(self.gamma1, self.c1).max(r(self.gamma2, self.c2))
    }
}

fn require_h(geo: &LocalGeometry) -> Result<(MinkowskiVector6, f64)> {
    let hv = geo.mean_curvature();
    let n = hv.inner(&hv).max(0.0).sqrt();
    if n < 1e-10 {
        return Err(GeomError::ZeroMeanCurvature);
    }
    Ok((hv, n))
}

/// Complex pieces shared by the Frenet data: `∂z`, `ξ`, `ξ̄`.
struct ComplexFrame {
    dz: CVec,
    xi: CVec,
    xi_bar: CVec,
    eta: MinkowskiVector6,
    eta_tilde: MinkowskiVector6,
    h_norm: f64,
}

fn complex_frame(geo: &LocalGeometry) -> Result<ComplexFrame> {
    geo.check_conformal()?;
    let (hv, h_norm) = require_h(geo)?;
    let eta = hv * (1.0 / h_norm);
    let (a, b) = (eta.inner(&geo.normal[0]), eta.inner(&geo.normal[1]));
    let eta_tilde = geo.normal[0] * b - geo.normal[1] * a;
    let s = 1.0 / SQRT_2;
    Ok(ComplexFrame {
        dz: CVec { re: geo.jet.dx * 0.5, im: geo.jet.dy * -0.5 },
        xi: CVec { re: eta * s, im: eta_tilde * -s },
        xi_bar: CVec { re: eta * s, im: eta_tilde * s },
        eta,
        eta_tilde,
        h_norm,
    })
}

/// `γ₁ = ⟨J₁∂z, ξ̄⟩`, `γ₂ = ⟨J₂∂z, ξ⟩`, `f₁ = ⟨h(∂z,∂z), ξ̄⟩`, `f₂ = ⟨h(∂z,∂z), ξ⟩`.
pub fn frenet_data_from(geo: &LocalGeometry) -> Result<FrenetData> {
    let cf = complex_frame(geo)?;
    let p = &geo.jet.point;
    let jz = |k: Kahler| CVec { re: k.apply(p, &cf.dz.re), im: k.apply(p, &cf.dz.im) };
    let [hxx, hxy, hyy] = geo.h;
    let hzz = CVec { re: (hxx - hyy) * 0.25, im: hxy * -0.5 };
    let c = |k: Kahler| k.apply(p, &geo.e[0]).inner(&geo.e[1]);
    Ok(FrenetData {
        u: 0.5 * geo.conformal_factor().ln(),
        h_norm: cf.h_norm,
        c1: c(Kahler::J1),
        c2: c(Kahler::J2),
        gamma1: jz(Kahler::J1).dot(&cf.xi_bar),
        gamma2: jz(Kahler::J2).dot(&cf.xi),
        f1: hzz.dot(&cf.xi_bar),
        f2: hzz.dot(&cf.xi),
        eta: cf.eta,
        eta_tilde: cf.eta_tilde,
    })
}

pub fn frenet_data(jet: &crate::surfaces::ImmersionJet) -> Result<FrenetData> {
    frenet_data_from(&LocalGeometry::new(jet)?)
}

/// `⟨F∂z, ∂z⟩`.
pub fn f_dz_dz(geo: &LocalGeometry) -> Complex64 {
    let j = &geo.jet;
    let fx = j.dx.flip_hyperbolic();
    Complex64::new(fx.inner(&j.dx) - j.dy.flip_hyperbolic().inner(&j.dy), -2.0 * fx.inner(&j.dy)) * 0.25
}

fn frenet_at(surface: &Surface, x: f64, y: f64) -> Result<FrenetData> {
    frenet_data_from(&LocalGeometry::new(&surface.eval_jet(x, y, 2)?)?)
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

/// Residual magnitudes of the Frenet compatibility equations, indexed by `j − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetPdeResiduals {
    pub dz_c: [f64; 2],
    pub dzbar_gamma: [f64; 2],
    pub dz_gamma: [f64; 2],
    pub dzbar_f: [f64; 2],
}

impl FrenetPdeResiduals {
    pub fn max(&self) -> f64 {
        [self.dz_c, self.dzbar_gamma, self.dz_gamma, self.dzbar_f].iter().flatten().fold(0.0, |a, &b| a.max(b))
    }
}

pub fn frenet_pde_residuals(surface: &Surface, x: f64, y: f64, fd_step: f64) -> Result<FrenetPdeResiduals> {
    check_stencil(surface, x, y, fd_step)?;
    let c = frenet_at(surface, x, y)?;
    let s = fd_step;
    let (xp, xm) = (frenet_at(surface, x + s, y)?, frenet_at(surface, x - s, y)?);
    let (yp, ym) = (frenet_at(surface, x, y + s)?, frenet_at(surface, x, y - s)?);
    let i = Complex64::i();
    // ∂z = (∂x − i∂y)/2, ∂z̄ = (∂x + i∂y)/2
    let dz = |g: &dyn Fn(&FrenetData) -> Complex64| {
        let gx = (g(&xp) - g(&xm)) / (2.0 * s);
        let gy = (g(&yp) - g(&ym)) / (2.0 * s);
        ((gx - i * gy) * 0.5, (gx + i * gy) * 0.5)
    };
    let e2u = (2.0 * c.u).exp();
    let (dzu, _) = dz(&|d| Complex64::new(d.u, 0.0));
    let mut out = FrenetPdeResiduals { dz_c: [0.0; 2], dzbar_gamma: [0.0; 2], dz_gamma: [0.0; 2], dzbar_f: [0.0; 2] };
    for j in 0..2 {
        let cj = |d: &FrenetData| if j == 0 { d.c1 } else { d.c2 };
        let gj = |d: &FrenetData| if j == 0 { d.gamma1 } else { d.gamma2 };
        let fj = |d: &FrenetData| if j == 0 { d.f1 } else { d.f2 };
        let (dzc, _) = dz(&|d| Complex64::new(cj(d), 0.0));
        let (dzg, dzbg) = dz(&|d| gj(d));
        let (_, dzbf) = dz(&|d| fj(d));
        let (g, f, cc) = (gj(&c), fj(&c), cj(&c));
        let c_other = if j == 0 { c.c2 } else { c.c1 };
        out.dz_c[j] = (dzc - (i * 2.0 / e2u * g.conj() * f - i * (c.h_norm / SQRT_2) * g)).norm();
        out.dzbar_gamma[j] = (dzbg + i * (c.h_norm * e2u * cc / SQRT_2)).norm();
        out.dz_gamma[j] = (dzg - (dzu * 2.0 * g - i * 2.0 * cc * f)).norm();
        out.dzbar_f[j] = (dzbf - i * (e2u / 4.0) * c_other * g).norm();
    }
    Ok(out)
}

/// F-adapted orthonormal frame `(X₁, X₂, ξ₁, ξ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptedFrame {
    pub x1: ProductTangent,
    pub x2: ProductTangent,
    pub xi1: ProductTangent,
    pub xi2: ProductTangent,
    /// Chart coefficients of `X₁` and `X₂`.
    pub x_coeffs: [[f64; 2]; 2],
    pub alpha: f64,
    pub beta: f64,
    pub gamma_angle: f64,
    pub nu: f64,
    pub h_norm: f64,
    /// Largest entry of `M − F(α,β)` with `M` the measured matrix of F in the frame.
    pub f_matrix_residual: f64,
}

impl AdaptedFrame {
    pub fn cos_gap(&self) -> f64 {
        self.alpha.cos() - self.beta.cos()
    }

    /// `⟨h(Xᵢ,Xᵢ), ξⱼ⟩` (zero-based indices) from the supplied geometry.
    pub fn h_pair(&self, geo: &LocalGeometry, i: usize, j: usize) -> f64 {
        let c = self.x_coeffs[i];
        let xi = if j == 0 { self.xi1.v } else { self.xi2.v };
        geo.h_of(c, c).inner(&xi)
    }

    /// Largest entry of `A_H − diag(‖H‖² − (cos α − cos β)/8, ‖H‖² + (cos α − cos β)/8)` in `(X₁, X₂)`.
    pub fn ah_matrix_residual(&self, geo: &LocalGeometry) -> f64 {
        let hv = geo.mean_curvature();
        let h2 = self.h_norm * self.h_norm;
        let k = self.cos_gap() / 8.0;
        let a = |i: usize, j: usize| geo.h_of(self.x_coeffs[i], self.x_coeffs[j]).inner(&hv);
        (a(0, 0) - (h2 - k)).abs().max((a(1, 1) - (h2 + k)).abs()).max(a(0, 1).abs())
    }

    /// The same frame with `(X₁, ξ₁)` replaced by `(−X₁, −ξ₁)`.
    pub fn flipped_first(&self) -> AdaptedFrame {
        AdaptedFrame {
            x1: self.x1 * -1.0,
            xi1: self.xi1 * -1.0,
            x_coeffs: [self.x_coeffs[0].map(|c| -c), self.x_coeffs[1]],
            ..*self
        }
    }
}

/// Frame whose signs are aligned with a reference (for stencil neighbours).
#[derive(Debug, Clone, Copy)]
pub struct FrameReference {
    pub x: [MinkowskiVector6; 2],
    pub xi: [MinkowskiVector6; 2],
    pub alpha: f64,
    pub beta: f64,
    pub gamma_angle: f64,
}

impl From<&AdaptedFrame> for FrameReference {
    fn from(f: &AdaptedFrame) -> Self {
        FrameReference { x: [f.x1.v, f.x2.v], xi: [f.xi1.v, f.xi2.v], alpha: f.alpha, beta: f.beta, gamma_angle: f.gamma_angle }
    }
}

fn orient(v: MinkowskiVector6, reference: Option<&MinkowskiVector6>) -> Result<MinkowskiVector6> {
    match reference {
        Some(r) => {
            let d = v.inner(r);
            if d.abs() < 0.5 {
                return Err(GeomError::FrameDiscontinuity);
            }
            Ok(if d < 0.0 { -v } else { v })
        }
        None => {
            // deterministic gauge: largest ambient coordinate positive
            let k = (0..6).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
            Ok(if v[k] < 0.0 { -v } else { v })
        }
    }
}

/// The representative of `angle` mod 2π closest to `reference`.
fn unwrap_near(angle: f64, reference: f64) -> f64 {
    reference + (angle - reference + PI).rem_euclid(2.0 * PI) - PI
}

/// Minimal gap `cos α − cos β` below which the point counts as pseudo-umbilical.
pub const MIN_COS_GAP: f64 = 1e-6;

/// Adapted frame at a point. Without a reference, signs follow `⟨FXᵢ, ξᵢ⟩ ≥ 0`;
/// with one, every vector is aligned to the reference instead.
pub fn adapted_frame_from(geo: &LocalGeometry, reference: Option<&FrameReference>) -> Result<AdaptedFrame> {
    let (hv, h_norm) = require_h(geo)?;
    let fm = geo.f_matrix();
    let (vals, vecs) = sym2_eigen(&fm);
    if vals[0] - vals[1] < MIN_COS_GAP {
        return Err(GeomError::PseudoUmbilical);
    }
    let tangent = |k: usize| geo.e[0] * vecs[k][0] + geo.e[1] * vecs[k][1];
    let mut x = [tangent(0), tangent(1)];
    for k in 0..2 {
        x[k] = orient(x[k], reference.map(|r| &r.x[k]))?;
    }
    // f^⊥ in (n₁, n₂); its eigenvalues are −cos α < −cos β
    let n = geo.normal;
    let fp = |a: usize, b: usize| n[a].flip_hyperbolic().inner(&n[b]);
    let fperp = [[fp(0, 0), 0.5 * (fp(0, 1) + fp(1, 0))], [0.5 * (fp(0, 1) + fp(1, 0)), fp(1, 1)]];
    let (_, nvecs) = sym2_eigen(&fperp);
    let normal = |k: usize| n[0] * nvecs[k][0] + n[1] * nvecs[k][1];
    // ξ₁ pairs with the smaller f^⊥ eigenvalue −cos α
    let mut xi = [normal(1), normal(0)];
    for k in 0..2 {
        xi[k] = match reference {
            Some(r) => orient(xi[k], Some(&r.xi[k]))?,
            None => {
                let s = x[k].flip_hyperbolic().inner(&xi[k]);
                if s.abs() > 1e-9 {
                    if s < 0.0 {
                        -xi[k]
                    } else {
                        xi[k]
                    }
                } else {
                    orient(xi[k], None)?
                }
            }
        };
    }
    let fx = x.map(|v| v.flip_hyperbolic());
    let mut alpha = fx[0].inner(&xi[0]).atan2(fx[0].inner(&x[0]));
    let mut beta = fx[1].inner(&xi[1]).atan2(fx[1].inner(&x[1]));

    let basis = [x[0], x[1], xi[0], xi[1]];
    let (ca, sa, cb, sb) = (alpha.cos(), alpha.sin(), beta.cos(), beta.sin());
    let model = [[ca, 0.0, sa, 0.0], [0.0, cb, 0.0, sb], [sa, 0.0, -ca, 0.0], [0.0, sb, 0.0, -cb]];
    let mut f_matrix_residual: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let m = basis[a].flip_hyperbolic().inner(&basis[b]);
            f_matrix_residual = f_matrix_residual.max((m - model[a][b]).abs());
        }
    }

    let eta = hv * (1.0 / h_norm);
    let mut gamma_angle = eta.inner(&xi[1]).atan2(eta.inner(&xi[0]));
    if let Some(r) = reference {
        alpha = unwrap_near(alpha, r.alpha);
        beta = unwrap_near(beta, r.beta);
        gamma_angle = unwrap_near(gamma_angle, r.gamma_angle);
    }
    let h_tilde = (xi[0] * -gamma_angle.sin() + xi[1] * gamma_angle.cos()) * h_norm;
    let coeffs = |k: usize| {
        let c = geo.e_coeffs;
        let w = [vecs[k][0], vecs[k][1]];
        let v = [w[0] * c[0][0] + w[1] * c[1][0], w[0] * c[0][1] + w[1] * c[1][1]];
        // match the sign chosen for x[k]
        if tangent(k).inner(&x[k]) < 0.0 {
            v.map(|t| -t)
        } else {
            v
        }
    };
    let x_coeffs = [coeffs(0), coeffs(1)];
    let a11 = geo.h_of(x_coeffs[0], x_coeffs[0]).inner(&h_tilde);
    let nu = 8.0 * a11 / (ca - cb);
    let base = geo.jet.point;
    let t = |v: MinkowskiVector6| ProductTangent { base, v };
    Ok(AdaptedFrame {
        x1: t(x[0]),
        x2: t(x[1]),
        xi1: t(xi[0]),
        xi2: t(xi[1]),
        x_coeffs,
        alpha,
        beta,
        gamma_angle,
        nu,
        h_norm,
        f_matrix_residual,
    })
}

pub fn adapted_frame(jet: &crate::surfaces::ImmersionJet) -> Result<AdaptedFrame> {
    adapted_frame_from(&LocalGeometry::new(jet)?, None)
}

/// Which alternative of the α/β/γ/ν compatibility lemma holds at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuCompDisjunct {
    SinAlphaZero,
    SinBetaZero,
    Algebraic,
    None,
}

/// Residuals of the adapted-frame equations at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptedPdeResiduals {
    /// `X₁(α) + 2⟨h(X₁,X₁),ξ₁⟩`, `X₂(α)`.
    pub x_alpha: [f64; 2],
    /// `X₁(β)`, `X₂(β) + 2⟨h(X₂,X₂),ξ₂⟩`.
    pub x_beta: [f64; 2],
    pub connection: [f64; 2],
    pub x_gamma: [f64; 2],
    pub x_nu: [f64; 2],
    /// The four algebraic expressions of `⟨h(Xᵢ,Xᵢ),ξⱼ⟩`.
    pub h_identities: [f64; 4],
    pub f_matrix: f64,
    pub sin_alpha: f64,
    pub sin_beta: f64,
    /// `8‖H‖² + (cos α − cos β)((1−ν²)cos 2γ + 2ν sin 2γ)`.
    pub nucomp_iii: f64,
    pub nucomp_disjunct: NuCompDisjunct,
}

impl AdaptedPdeResiduals {
    /// Largest residual among the differential equations.
    pub fn max_pde(&self) -> f64 {
        [self.x_alpha, self.x_beta, self.connection, self.x_gamma, self.x_nu].iter().flatten().fold(0.0, |a, &b| a.max(b))
    }

    pub fn max_identity(&self) -> f64 {
        self.h_identities.iter().fold(self.f_matrix, |a, &b| a.max(b))
    }
}

/// Tolerance for classifying the compatibility disjunct.
pub const NUCOMP_TOL: f64 = 1e-4;

pub fn adapted_pde_residuals(surface: &Surface, x: f64, y: f64, fd_step: f64) -> Result<AdaptedPdeResiduals> {
    check_stencil(surface, x, y, fd_step)?;
    let geo = LocalGeometry::new(&surface.eval_jet(x, y, 2)?)?;
    let fr = adapted_frame_from(&geo, None)?;
    let reference = FrameReference::from(&fr);
    let (ca, cb, sa, sb) = (fr.alpha.cos(), fr.beta.cos(), fr.alpha.sin(), fr.beta.sin());
    let gap = ca - cb;
    let (g, nu, hn) = (fr.gamma_angle, fr.nu, fr.h_norm);
    let hp = |i, j| fr.h_pair(&geo, i, j);

    let at = |dir: [f64; 2], t: f64| -> Result<AdaptedFrame> {
        let p = (x + t * dir[0], y + t * dir[1]);
        let geo = LocalGeometry::new(&surface.eval_jet(p.0, p.1, 2)?)?;
        adapted_frame_from(&geo, Some(&reference))
    };
    let mut d = [[0.0f64; 4]; 2];
    let mut conn = [0.0; 2];
    for k in 0..2 {
        let dir = fr.x_coeffs[k];
        let (p, m) = (at(dir, fd_step)?, at(dir, -fd_step)?);
        let dd = |a: f64, b: f64| (a - b) / (2.0 * fd_step);
        d[k] = [dd(p.alpha, m.alpha), dd(p.beta, m.beta), dd(p.gamma_angle, m.gamma_angle), dd(p.nu, m.nu)];
        // ⟨∇_{X_k} X₁, X₂⟩ from the ambient derivative of the X₁ field
        conn[k] = ((p.x1.v - m.x1.v) * (1.0 / (2.0 * fd_step))).inner(&fr.x2.v);
    }
    let x_alpha = [(d[0][0] + 2.0 * hp(0, 0)).abs(), d[1][0].abs()];
    let x_beta = [d[0][1].abs(), (d[1][1] + 2.0 * hp(1, 1)).abs()];
    let connection = [(conn[0] - sb / gap * hp(0, 1)).abs(), (conn[1] - sa / gap * hp(1, 0)).abs()];
    let x_gamma = [(d[0][2] + sa / gap * hp(0, 1)).abs(), (d[1][2] + sb / gap * hp(1, 0)).abs()];
    let x_nu = [
        (d[0][3] - 4.0 * hn * sa * (g.sin() - nu * g.cos()) / gap).abs(),
        (d[1][3] - 4.0 * hn * sb * (g.cos() + nu * g.sin()) / gap).abs(),
    ];
    let k = gap / (8.0 * hn);
    let (cg, sg) = (g.cos(), g.sin());
    let h_identities = [
        (hp(0, 0) - (hn * cg - k * (cg + nu * sg))).abs(),
        (hp(0, 1) - (hn * sg - k * (sg - nu * cg))).abs(),
        (hp(1, 0) - (hn * cg + k * (cg + nu * sg))).abs(),
        (hp(1, 1) - (hn * sg + k * (sg - nu * cg))).abs(),
    ];
    let nucomp_iii = 8.0 * hn * hn + gap * ((1.0 - nu * nu) * (2.0 * g).cos() + 2.0 * nu * (2.0 * g).sin());
    let nucomp_disjunct = if sa.abs() < NUCOMP_TOL {
        NuCompDisjunct::SinAlphaZero
    } else if sb.abs() < NUCOMP_TOL {
        NuCompDisjunct::SinBetaZero
    } else if nucomp_iii.abs() < NUCOMP_TOL {
        NuCompDisjunct::Algebraic
    } else {
        NuCompDisjunct::None
    };
    Ok(AdaptedPdeResiduals {
        x_alpha,
        x_beta,
        connection,
        x_gamma,
        x_nu,
        h_identities,
        f_matrix: fr.f_matrix_residual,
        sin_alpha: sa,
        sin_beta: sb,
        nucomp_iii,
        nucomp_disjunct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extrinsic::hopf_coefficient;
    use crate::hode::SlopeSign;
    use crate::surfaces::{make_curve_product, make_special_1, make_special_2, SurfaceSpec};

    fn geo(s: &Surface, x: f64, y: f64) -> LocalGeometry {
        LocalGeometry::new(&s.eval_jet(x, y, 2).unwrap()).unwrap()
    }

    fn all_pmc() -> Vec<SurfaceSpec> {
        vec![
            make_curve_product(0.0, 1.0).unwrap(),
            make_curve_product(1.0, SQRT_2).unwrap(),
            make_curve_product(0.5, 2.0).unwrap(),
            make_special_1(1.0, 0.5, 0.0, 0.0, SlopeSign::Plus).unwrap(),
            make_special_1(2.0, 0.5, 0.0, 0.0, SlopeSign::Plus).unwrap(),
            make_special_2(1.0, 0.5, 0.0, 2.0, SlopeSign::Plus).unwrap(),
            make_special_2(1.25, 0.5, 0.5, 2.0, SlopeSign::Plus).unwrap(),
        ]
    }

    #[test]
    fn frenet_invariants() {
        for spec in all_pmc() {
            let s = Surface::new(spec.clone()).unwrap();
            for (x, y) in s.domain().grid(4, 3, 0.02) {
                let g = geo(&s, x, y);
                let fd = frenet_data_from(&g).unwrap();
                assert!(fd.gamma_norm_residual() < 1e-6, "{spec:?}");
                assert!((fd.gamma1 * fd.gamma2 - f_dz_dz(&g)).norm() < 1e-6, "{spec:?}");
                let hv = g.mean_curvature();
                let theta = hopf_coefficient(&g.jet, &hv).unwrap();
                assert!((fd.hopf_alternative() - theta).norm() < 1e-5, "{spec:?}");
                let xi = CVec { re: fd.eta * (1.0 / SQRT_2), im: fd.eta_tilde * (-1.0 / SQRT_2) };
                let xi_bar = CVec { re: xi.re, im: -xi.im };
                assert!((xi.dot(&xi_bar) - 1.0).norm() < 1e-12 && xi.dot(&xi).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn horocycle_product_gamma_norm() {
        let s = Surface::new(make_curve_product(0.0, 1.0).unwrap()).unwrap();
        let fd = frenet_data_from(&geo(&s, 0.1, 0.2)).unwrap();
        assert!((fd.gamma1.norm_sqr() - 0.5).abs() < 1e-12 && (fd.gamma2.norm_sqr() - 0.5).abs() < 1e-12);
        // constant C: the ∂zC equation reduces to 2ie^{−2u}γ̄f = i‖H‖γ/√2
        let lhs = Complex64::i() * 2.0 * fd.gamma1.conj() * fd.f1;
        assert!((lhs - Complex64::i() * fd.h_norm / SQRT_2 * fd.gamma1).norm() < 1e-12);
    }

    #[test]
    fn frenet_pdes_hold() {
        let s = Surface::new(make_curve_product(1.0, SQRT_2).unwrap()).unwrap();
        for (x, y) in ChartPatch::around(0.0, 0.0, 0.2).grid(5, 5, 0.0) {
            let r = frenet_pde_residuals(&s, x, y, 1e-4).unwrap();
            assert!(r.max() < 1e-4, "{r:?}");
        }
        let s = Surface::new(make_special_1(1.0, 0.5, 0.0, 0.0, SlopeSign::Plus).unwrap()).unwrap();
        for (x, y) in s.domain().grid(3, 3, 0.05) {
            let coarse = frenet_pde_residuals(&s, x, y, 1e-3).unwrap().max();
            assert!(coarse < 1e-3, "{coarse}");
        }
    }

    struct ChartPatch;
    impl ChartPatch {
        fn around(x: f64, y: f64, r: f64) -> crate::surfaces::ChartDomain {
            crate::surfaces::ChartDomain::new([x - r, x + r], [y - r, y + r])
        }
    }

    #[test]
    fn adapted_frame_on_vanishing_theta() {
        let s = Surface::new(make_special_1(1.0, 0.5, 0.0, 0.0, SlopeSign::Plus).unwrap()).unwrap();
        for (x, y) in s.domain().grid(5, 4, 0.05) {
            let g = geo(&s, x, y);
            let fr = adapted_frame_from(&g, None).unwrap();
            assert!(fr.f_matrix_residual < 1e-6, "{}", fr.f_matrix_residual);
            assert!(fr.cos_gap() > 0.0);
            assert!(fr.ah_matrix_residual(&g) < 1e-6);
            // A_H is invariant under the gauge flip
            assert!((fr.flipped_first().ah_matrix_residual(&g) - fr.ah_matrix_residual(&g)).abs() < 1e-15);
            assert!((fr.alpha.sin() * fr.beta.sin()).abs() < 1e-4);
        }
    }

    #[test]
    fn adapted_pdes_and_identities() {
        for spec in [
            make_special_1(1.0, 0.5, 0.0, 0.0, SlopeSign::Plus).unwrap(),
            make_curve_product(1.0, SQRT_2).unwrap(),
        ] {
            let s = Surface::new(spec.clone()).unwrap();
            for (x, y) in s.domain().grid(4, 3, 0.05) {
                let r = adapted_pde_residuals(&s, x, y, 1e-4).unwrap();
                assert!(r.max_identity() < 1e-5, "{spec:?}: {r:?}");
                assert!(r.max_pde() < 1e-3, "{spec:?}: {r:?}");
                assert!(matches!(r.nucomp_disjunct, NuCompDisjunct::SinAlphaZero | NuCompDisjunct::SinBetaZero));
            }
        }
    }

    #[test]
    fn x_alpha_converges() {
        let s = Surface::new(make_special_1(1.0, 0.5, 0.0, 0.0, SlopeSign::Plus).unwrap()).unwrap();
        let r1 = adapted_pde_residuals(&s, 0.6, 1.3, 1e-3).unwrap();
        let r2 = adapted_pde_residuals(&s, 0.6, 1.3, 5e-4).unwrap();
        let (a, b) = (r1.x_alpha[0].max(r1.x_alpha[1]), r2.x_alpha[0].max(r2.x_alpha[1]));
        assert!(a < 1e-3);
        assert!(b <= a / 2.0 || a < 1e-9, "{a} {b}");
    }

    #[test]
    fn gauge_flip_is_harmless() {
        let s = Surface::new(make_special_1(1.0, 0.5, 0.0, 0.0, SlopeSign::Plus).unwrap()).unwrap();
        let g = geo(&s, 0.4, 0.8);
        let fr = adapted_frame_from(&g, None).unwrap();
        let fl = fr.flipped_first();
        for i in 0..2 {
            for j in 0..2 {
                let a = fr.h_pair(&g, i, j);
                let b = fl.h_pair(&g, i, j) * if j == 0 { -1.0 } else { 1.0 };
                assert!((a - b).abs() < 1e-14);
            }
        }
        // ⟨FX₁, ξ₁⟩ is even under the joint flip
        let sa = |f: &AdaptedFrame| f.x1.v.flip_hyperbolic().inner(&f.xi1.v);
        assert!((sa(&fr) - sa(&fl)).abs() < 1e-15);
    }
}
