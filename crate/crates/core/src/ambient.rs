//! The ambient space S²×H² ⊂ ℝ³ × ℝ³₁ ≅ ℝ⁶₁.
//!
//! Components 0..3 of a [`MinkowskiVector6`] belong to the sphere factor,
//! components 3..6 to the hyperboloid factor with index 5 timelike. The
//! hyperbolic plane is the upper sheet `p₅ > 0`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::series::Scalar;

/// Membership tolerance for points of S²×H².
pub const TAU_MEM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkowskiVector6(pub [f64; 6]);

impl MinkowskiVector6 {
    pub const ZERO: Self = MinkowskiVector6([0.0; 6]);

    pub fn new(c: [f64; 6]) -> Self {
        MinkowskiVector6(c)
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 6];
        c[i] = 1.0;
        MinkowskiVector6(c)
    }

    pub fn from_parts(s: [f64; 3], h: [f64; 3]) -> Self {
        MinkowskiVector6([s[0], s[1], s[2], h[0], h[1], h[2]])
    }

    pub fn sphere_part(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn hyperbolic_part(&self) -> [f64; 3] {
        [self.0[3], self.0[4], self.0[5]]
    }

    pub fn inner(&self, other: &Self) -> f64 {
        minkowski_inner(self, other)
    }

    /// `⟨v,v⟩`, which is negative for timelike vectors.
    pub fn norm2(&self) -> f64 {
        self.inner(self)
    }

    /// Euclidean length of the coefficient vector, used for residual reporting.
    pub fn coord_norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `Φ̂ = (φ, −ψ)`; on tangent vectors this is the product structure F.
    pub fn flip_hyperbolic(&self) -> Self {
        let c = self.0;
        MinkowskiVector6([c[0], c[1], c[2], -c[3], -c[4], -c[5]])
    }
}

impl Index<usize> for MinkowskiVector6 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for MinkowskiVector6 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for MinkowskiVector6 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.0;
        for i in 0..6 {
            c[i] += rhs.0[i];
        }
        MinkowskiVector6(c)
    }
}

impl AddAssign for MinkowskiVector6 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for MinkowskiVector6 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for MinkowskiVector6 {
    type Output = Self;
    fn neg(self) -> Self {
        MinkowskiVector6(self.0.map(|v| -v))
    }
}

impl Mul<f64> for MinkowskiVector6 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        MinkowskiVector6(self.0.map(|v| v * rhs))
    }
}

impl Mul<MinkowskiVector6> for f64 {
    type Output = MinkowskiVector6;
    fn mul(self, rhs: MinkowskiVector6) -> MinkowskiVector6 {
        rhs * self
    }
}

/// Signature (+,+,+,+,+,−) inner product of ℝ⁶₁.
pub fn minkowski_inner(u: &MinkowskiVector6, v: &MinkowskiVector6) -> f64 {
    let (a, b) = (&u.0, &v.0);
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4] - a[5] * b[5]
}

// Three-vector helpers shared by the factor curves. They are generic so the
// same formulas run on plain values and on Taylor series.

pub fn dot3<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Lorentz inner product of ℝ³₁ (last coordinate timelike).
pub fn lorentz_dot3<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

pub fn cross3<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Lorentz cross product of ℝ³₁: the Euclidean cross product with its
/// timelike coordinate negated, so that `⟨a ⊠ b, c⟩_L = det(a, b, c)`.
pub fn lorentz_cross3<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    let c = cross3(a, b);
    [c[0], c[1], -c[2]]
}

/// Which factor of S²×H² a curve or vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Sphere,
    Hyperbolic,
}

impl Factor {
    pub fn inner<S: Scalar>(self, a: &[S; 3], b: &[S; 3]) -> S {
        match self {
            Factor::Sphere => dot3(a, b),
            Factor::Hyperbolic => lorentz_dot3(a, b),
        }
    }

    /// The standard complex structure of the factor at `p` applied to `v`.
    pub fn rotate<S: Scalar>(self, p: &[S; 3], v: &[S; 3]) -> [S; 3] {
        match self {
            Factor::Sphere => cross3(p, v),
            Factor::Hyperbolic => lorentz_cross3(p, v),
        }
    }

    /// `⟨p,p⟩` on the factor: +1 on the sphere, −1 on the hyperboloid.
    pub fn position_norm2(self) -> f64 {
        match self {
            Factor::Sphere => 1.0,
            Factor::Hyperbolic => -1.0,
        }
    }

    /// Residual of the membership equation.
    pub fn membership_residual(self, p: &[f64; 3]) -> f64 {
        let r = (self.inner(p, p) - self.position_norm2()).abs();
        match self {
            Factor::Hyperbolic if p[2] <= 0.0 => f64::INFINITY,
            _ => r,
        }
    }

    /// Pull `p` back onto the factor (radial projection / Lorentz rescaling).
    pub fn renormalize(self, p: &[f64; 3]) -> [f64; 3] {
        let n = (self.inner(p, p) * self.position_norm2()).sqrt();
        [p[0] / n, p[1] / n, p[2] / n]
    }

    /// Orthogonal projection of `w` onto the tangent plane at `p`.
    pub fn project<S: Scalar>(self, p: &[S; 3], w: &[S; 3]) -> [S; 3] {
        // ⟨p,p⟩ = ±1, so the normal coefficient is ⟨w,p⟩/⟨p,p⟩
        let k = self.inner(w, p) * self.position_norm2();
        [w[0] - p[0] * k, w[1] - p[1] * k, w[2] - p[2] * k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    p: MinkowskiVector6,
}

impl ProductPoint {
    pub fn new(p: MinkowskiVector6) -> Result<Self> {
        let rs = Factor::Sphere.membership_residual(&p.sphere_part());
        let rh = Factor::Hyperbolic.membership_residual(&p.hyperbolic_part());
        if rs > TAU_MEM || rh > TAU_MEM {
            return Err(GeomError::InvariantViolation(format!(
                "point off S2xH2 (sphere residual {rs:e}, hyperboloid residual {rh:e})"
            )));
        }
        Ok(ProductPoint { p })
    }

    /// Re-normalizes each factor; fails only for points not near the upper sheet.
    pub fn normalized(p: MinkowskiVector6) -> Result<Self> {
        let h = p.hyperbolic_part();
        if Factor::Hyperbolic.inner(&h, &h) >= 0.0 || h[2] <= 0.0 {
            return Err(GeomError::InvariantViolation("hyperbolic part not timelike".into()));
        }
        let s = Factor::Sphere.renormalize(&p.sphere_part());
        let h = Factor::Hyperbolic.renormalize(&h);
        Ok(ProductPoint { p: MinkowskiVector6::from_parts(s, h) })
    }

    pub fn position(&self) -> MinkowskiVector6 {
        self.p
    }

    pub fn sphere(&self) -> [f64; 3] {
        self.p.sphere_part()
    }

    pub fn hyperbolic(&self) -> [f64; 3] {
        self.p.hyperbolic_part()
    }

    /// Φ̂ = (p_S, −p_H).
    pub fn hat(&self) -> MinkowskiVector6 {
        self.p.flip_hyperbolic()
    }

    pub fn membership_residual(&self) -> f64 {
        Factor::Sphere
            .membership_residual(&self.sphere())
            .max(Factor::Hyperbolic.membership_residual(&self.hyperbolic()))
    }

    /// Orthogonal projection of an arbitrary ℝ⁶₁ vector onto T_p(S²×H²).
    pub fn project(&self, w: &MinkowskiVector6) -> MinkowskiVector6 {
        let s = Factor::Sphere.project(&self.sphere(), &w.sphere_part());
        let h = Factor::Hyperbolic.project(&self.hyperbolic(), &w.hyperbolic_part());
        MinkowskiVector6::from_parts(s, h)
    }

    /// Orthonormal, positively oriented basis `(e_S, J e_S, e_H, J e_H)` of
    /// the tangent space. This orientation is the one used throughout.
    pub fn frame(&self) -> [MinkowskiVector6; 4] {
        let ps = self.sphere();
        let ph = self.hyperbolic();
        let es = {
            // the coordinate axis least aligned with p_S
            let i = (0..3)
                .min_by(|&a, &b| ps[a].abs().total_cmp(&ps[b].abs()))
                .unwrap_or(0);
            let mut axis = [0.0; 3];
            axis[i] = 1.0;
            let t = Factor::Sphere.project(&ps, &axis);
            let n = dot3(&t, &t).sqrt();
            [t[0] / n, t[1] / n, t[2] / n]
        };
        let eh = {
            let axis = if ph[0].abs() <= ph[1].abs() { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let t = Factor::Hyperbolic.project(&ph, &axis);
            let n = lorentz_dot3(&t, &t).sqrt();
            [t[0] / n, t[1] / n, t[2] / n]
        };
        let z = [0.0; 3];
        [
            MinkowskiVector6::from_parts(es, z),
            MinkowskiVector6::from_parts(Factor::Sphere.rotate(&ps, &es), z),
            MinkowskiVector6::from_parts(z, eh),
            MinkowskiVector6::from_parts(z, Factor::Hyperbolic.rotate(&ph, &eh)),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductTangent {
    pub base: ProductPoint,
    pub v: MinkowskiVector6,
}

impl ProductTangent {
    pub fn new(base: ProductPoint, v: MinkowskiVector6) -> Result<Self> {
        let scale = 1.0 + v.coord_norm();
        let rs = dot3(&base.sphere(), &v.sphere_part()).abs();
        let rh = lorentz_dot3(&base.hyperbolic(), &v.hyperbolic_part()).abs();
        if rs > TAU_MEM * scale || rh > TAU_MEM * scale {
            return Err(GeomError::InvariantViolation(format!(
                "vector not tangent (sphere {rs:e}, hyperboloid {rh:e})"
            )));
        }
        Ok(ProductTangent { base, v })
    }

    /// Tangent vector obtained by projecting `w` onto T_p(S²×H²).
    pub fn projected(base: ProductPoint, w: MinkowskiVector6) -> Self {
        ProductTangent { base, v: base.project(&w) }
    }

    pub fn inner(&self, other: &ProductTangent) -> f64 {
        self.v.inner(&other.v)
    }

    fn with(&self, v: MinkowskiVector6) -> Self {
        ProductTangent { base: self.base, v }
    }

    fn same_base(&self, other: &ProductTangent) -> Result<()> {
        let d = (self.base.position() - other.base.position()).coord_norm();
        if d > TAU_MEM {
            Err(GeomError::BaseMismatch)
        } else {
            Ok(())
        }
    }
}

impl Add for ProductTangent {
    type Output = ProductTangent;
    fn add(self, rhs: ProductTangent) -> ProductTangent {
        self.with(self.v + rhs.v)
    }
}

impl Sub for ProductTangent {
    type Output = ProductTangent;
    fn sub(self, rhs: ProductTangent) -> ProductTangent {
        self.with(self.v - rhs.v)
    }
}

impl Mul<f64> for ProductTangent {
    type Output = ProductTangent;
    fn mul(self, rhs: f64) -> ProductTangent {
        self.with(self.v * rhs)
    }
}

/// Product structure F: (v₁, v₂) ↦ (v₁, −v₂).
pub fn product_structure_f(t: &ProductTangent) -> ProductTangent {
    t.with(t.v.flip_hyperbolic())
}

/// The Kähler structures J₁ = (J_S, J_H) and J₂ = (J_S, −J_H).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kahler {
    J1,
    J2,
}

impl Kahler {
    pub fn index(self) -> usize {
        match self {
            Kahler::J1 => 1,
            Kahler::J2 => 2,
        }
    }

    pub fn apply(self, base: &ProductPoint, v: &MinkowskiVector6) -> MinkowskiVector6 {
        let s = Factor::Sphere.rotate(&base.sphere(), &v.sphere_part());
        let mut h = Factor::Hyperbolic.rotate(&base.hyperbolic(), &v.hyperbolic_part());
        if self == Kahler::J2 {
            h = h.map(|c| -c);
        }
        MinkowskiVector6::from_parts(s, h)
    }
}

pub fn apply_j(j: Kahler, t: &ProductTangent) -> ProductTangent {
    t.with(j.apply(&t.base, &t.v))
}

/// `(A ∧ B)C = ⟨B,C⟩A − ⟨A,C⟩B`.
pub fn wedge_apply(a: &MinkowskiVector6, b: &MinkowskiVector6, c: &MinkowskiVector6) -> MinkowskiVector6 {
    *a * b.inner(c) - *b * a.inner(c)
}

fn d_pi1(v: &MinkowskiVector6) -> MinkowskiVector6 {
    (*v + v.flip_hyperbolic()) * 0.5
}

fn d_pi2(v: &MinkowskiVector6) -> MinkowskiVector6 {
    (*v - v.flip_hyperbolic()) * 0.5
}

/// Curvature tensor R̃(x,y)z of S²×H² written with F.
pub fn riemann_tensor(x: &ProductTangent, y: &ProductTangent, z: &ProductTangent) -> Result<ProductTangent> {
    x.same_base(y)?;
    x.same_base(z)?;
    let (xv, yv, zv) = (x.v, y.v, z.v);
    let xp = (xv + xv.flip_hyperbolic()) * 0.5;
    let yp = (yv + yv.flip_hyperbolic()) * 0.5;
    let xm = (xv - xv.flip_hyperbolic()) * 0.5;
    let ym = (yv - yv.flip_hyperbolic()) * 0.5;
    Ok(x.with(wedge_apply(&xp, &yp, &zv) - wedge_apply(&xm, &ym, &zv)))
}

/// The three rewritings of R̃ through dπ₁ = (id+F)/2 and dπ₂ = (id−F)/2.
/// Used as an independent check of [`riemann_tensor`].
pub fn riemann_tensor_alternatives(
    x: &ProductTangent,
    y: &ProductTangent,
    z: &ProductTangent,
) -> Result<[ProductTangent; 3]> {
    x.same_base(y)?;
    x.same_base(z)?;
    let (xv, yv, zv) = (x.v, y.v, z.v);
    let projections = wedge_apply(&d_pi1(&xv), &d_pi1(&yv), &zv) - wedge_apply(&d_pi2(&xv), &d_pi2(&yv), &zv);
    let via_pi1 = -wedge_apply(&xv, &yv, &zv)
        + wedge_apply(&d_pi1(&xv), &yv, &zv)
        + wedge_apply(&xv, &d_pi1(&yv), &zv);
    let via_pi2 = wedge_apply(&xv, &yv, &zv)
        - wedge_apply(&d_pi2(&xv), &yv, &zv)
        - wedge_apply(&xv, &d_pi2(&yv), &zv);
    Ok([x.with(projections), x.with(via_pi1), x.with(via_pi2)])
}

/// Orthogonal projection of `w ∈ ℝ⁶₁` onto T_p(S²×H²).
pub fn tangent_project(p: &ProductPoint, w: &MinkowskiVector6) -> ProductTangent {
    ProductTangent::projected(*p, *w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn point() -> ProductPoint {
        let s = Factor::Sphere.renormalize(&[0.3, -0.5, 0.8]);
        let h = Factor::Hyperbolic.renormalize(&[0.4, 1.1, 2.0]);
        ProductPoint::new(MinkowskiVector6::from_parts(s, h)).unwrap()
    }

    #[test]
    fn inner_product_signature() {
        let e1 = MinkowskiVector6::basis(0);
        let e6 = MinkowskiVector6::basis(5);
        let null = MinkowskiVector6::new([1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(minkowski_inner(&e1, &e1), 1.0);
        assert_eq!(minkowski_inner(&e6, &e6), -1.0);
        assert_eq!(minkowski_inner(&null, &null), 0.0);
    }

    #[test]
    fn product_structure_eigenspaces() {
        let p = point();
        let [es, _, eh, _] = p.frame();
        let ts = ProductTangent::new(p, es).unwrap();
        let th = ProductTangent::new(p, eh).unwrap();
        assert_eq!(product_structure_f(&ts).v, es);
        assert_eq!(product_structure_f(&th).v, -eh);
        let t = ts + th;
        assert_eq!(product_structure_f(&product_structure_f(&t)).v, t.v);
    }

    #[test]
    fn sphere_rotation_at_north_pole() {
        let p = ProductPoint::new(MinkowskiVector6::new([0.0, 0.0, 1.0, 0.0, 0.0, 1.0])).unwrap();
        let t = ProductTangent::new(p, MinkowskiVector6::basis(0)).unwrap();
        let r = apply_j(Kahler::J1, &t);
        assert_eq!(r.v.sphere_part(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn complex_structures_square_to_minus_identity() {
        let p = point();
        let f = p.frame();
        let t = ProductTangent::new(p, f[0] * 0.3 + f[1] * -1.2 + f[2] * 0.7 + f[3] * 2.0).unwrap();
        for j in [Kahler::J1, Kahler::J2] {
            let jj = apply_j(j, &apply_j(j, &t));
            for i in 0..6 {
                assert_relative_eq!(jj.v[i], -t.v[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn frame_is_orthonormal_and_tangent() {
        let p = point();
        let f = p.frame();
        for i in 0..4 {
            ProductTangent::new(p, f[i]).unwrap();
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(f[i].inner(&f[j]), expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn curvature_of_factor_planes() {
        let p = point();
        let [es, js, eh, jh] = p.frame();
        let t = |v| ProductTangent::new(p, v).unwrap();
        let r = riemann_tensor(&t(es), &t(js), &t(js)).unwrap();
        for i in 0..6 {
            assert_relative_eq!(r.v[i], es[i], epsilon = 1e-12);
        }
        let r = riemann_tensor(&t(eh), &t(jh), &t(jh)).unwrap();
        for i in 0..6 {
            assert_relative_eq!(r.v[i], -eh[i], epsilon = 1e-12);
        }
        let r = riemann_tensor(&t(es), &t(eh), &t(jh)).unwrap();
        assert!(r.v.coord_norm() < 1e-14);
    }

    #[test]
    fn tangent_projection_kills_position_and_hat() {
        let p = point();
        assert!(tangent_project(&p, &p.position()).v.coord_norm() < 1e-14);
        assert!(tangent_project(&p, &p.hat()).v.coord_norm() < 1e-14);
        let f = p.frame();
        let w = f[1] * 0.4 - f[2] * 1.5;
        let pw = tangent_project(&p, &w);
        assert!((pw.v - w).coord_norm() < 1e-14);
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let p = point();
        let q = ProductPoint::new(MinkowskiVector6::new([0.0, 0.0, 1.0, 0.0, 0.0, 1.0])).unwrap();
        let a = ProductTangent { base: p, v: MinkowskiVector6::ZERO };
        let b = ProductTangent { base: q, v: MinkowskiVector6::ZERO };
        assert_eq!(riemann_tensor(&a, &b, &a), Err(GeomError::BaseMismatch));
    }
}
