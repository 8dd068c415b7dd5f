//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;

use num_complex::Complex64;
use pmc_core::ambient::{apply_j, product_structure_f, riemann_tensor, riemann_tensor_alternatives, Factor};
use pmc_core::extrinsic::{
    codazzi_residual, hopf_coefficient, kahler_functions, pmc_residual, projection_rank_defect, shape_and_f,
    weingarten_residual, LocalGeometry,
};
use pmc_core::frames::{adapted_frame_from, adapted_pde_residuals, f_dz_dz, frenet_data_from, frenet_pde_residuals};
use pmc_core::hode::{integrate_h, ProfileParams, SlopeSign, Variant, DEFAULT_X_MAX};
use pmc_core::surfaces::{
    make_curve_product, make_lift, make_special_1, make_special_2, CmcGenerator, LiftFactor, Surface, SurfaceSpec,
};
use pmc_core::{GeomError, Kahler, MinkowskiVector6, ProductPoint, ProductTangent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FD: f64 = 1e-4;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn surface(spec: SurfaceSpec) -> Surface {
    Surface::new(spec).expect("surface builds")
}

fn geo(s: &Surface, x: f64, y: f64) -> LocalGeometry {
    LocalGeometry::new(&s.eval_jet(x, y, 2).expect("jet")).expect("geometry")
}

fn theta(s: &Surface, x: f64, y: f64) -> Complex64 {
    let g = geo(s, x, y);
    hopf_coefficient(&g.jet, &g.mean_curvature()).expect("conformal chart")
}

fn samples(s: &Surface, n: usize, margin: f64) -> Vec<(f64, f64)> {
    s.domain().grid(n, n, margin)
}

fn special(variant: Variant, a: f64, b: f64, c: f64) -> SurfaceSpec {
    let h0 = ProfileParams::new(a, b, c, variant).default_h0().expect("admissible start");
    match variant {
        Variant::S1 => make_special_1(a, b, c, h0, SlopeSign::Plus),
        Variant::S2 => make_special_2(a, b, c, h0, SlopeSign::Plus),
    }
    .expect("valid special surface")
}

fn label(spec: &SurfaceSpec) -> String {
    match spec {
        SurfaceSpec::CurveProduct { k_alpha, k_beta, .. } => format!("curve_product({k_alpha},{k_beta:.4})"),
        SurfaceSpec::Special1 { a, b, c, .. } => format!("special_1({a},{b},{c})"),
        SurfaceSpec::Special2 { a, b, c, .. } => format!("special_2({a},{b},{c})"),
        other => other.family_name().to_string(),
    }
}

const K_ALPHA: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
const K_BETA: [f64; 4] = [0.5, 1.0, SQRT_2, 2.0];

fn vanishing_surfaces() -> Vec<SurfaceSpec> {
    vec![
        make_curve_product(0.0, 1.0).unwrap(),
        make_curve_product(1.0, SQRT_2).unwrap(),
        special(Variant::S1, 1.0, 0.5, 0.0),
        special(Variant::S1, 1.25, 0.5, 0.5),
        special(Variant::S2, 1.0, 0.5, 0.0),
        special(Variant::S2, 1.25, 0.5, 0.5),
    ]
}

fn all_families() -> Vec<SurfaceSpec> {
    vec![
        make_curve_product(1.0, 1.0).unwrap(),
        make_curve_product(0.5, 2.0).unwrap(),
        make_special_1(1.0, 0.5, 0.0, 0.0, SlopeSign::Plus).unwrap(),
        make_special_2(1.0, 0.5, 0.0, 2.0, SlopeSign::Plus).unwrap(),
        make_lift(LiftFactor::S2xR, CmcGenerator::RotationalSphere { mean_curvature: 1.0 }, 0.0).unwrap(),
        make_lift(LiftFactor::S2xR, CmcGenerator::Cylinder { curvature: 0.5 }, 0.3).unwrap(),
        make_lift(LiftFactor::H2xR, CmcGenerator::RotationalSphere { mean_curvature: 1.0 }, 0.0).unwrap(),
        make_lift(LiftFactor::H2xR, CmcGenerator::Cylinder { curvature: 0.5 }, 0.3).unwrap(),
    ]
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut zero_ok = true;
    let mut zeros = Vec::new();
    for ka in K_ALPHA {
        for kb in K_BETA {
            let s = surface(make_curve_product(ka, kb).unwrap());
            let expected = 0.5 * (ka * ka - kb * kb) + 0.5;
            let mut max_abs: f64 = 0.0;
            for (x, y) in samples(&s, 4, 0.05) {
                let t = theta(&s, x, y);
                worst = worst.max((t - expected).norm());
                max_abs = max_abs.max(t.norm());
            }
            let should_vanish = (kb * kb - (1.0 + ka * ka)).abs() < 1e-12;
            if should_vanish {
                zeros.push(format!("({ka},{kb:.4})"));
            }
            zero_ok &= (max_abs < 1e-8) == should_vanish;
        }
    }
    outcome(
        worst < 1e-6 && zero_ok,
        format!("max |Θ − closed form| = {worst:.2e}; |Θ| < 1e-8 exactly at {}", zeros.join(" ")),
    )
}

fn criterion_2() -> Outcome {
    let mut worst_cp: f64 = 0.0;
    for ka in K_ALPHA {
        for kb in K_BETA {
            let s = surface(make_curve_product(ka, kb).unwrap());
            for (x, y) in samples(&s, 3, 0.05) {
                let h = geo(&s, x, y).mean_curvature();
                worst_cp = worst_cp.max((h.inner(&h) - 0.25 * (ka * ka + kb * kb)).abs());
            }
        }
    }
    let mut worst_sp: f64 = 0.0;
    for variant in [Variant::S1, Variant::S2] {
        for (a, b, c) in [(1.0, 0.5, 0.0), (2.0, 0.5, 0.0), (1.0, 0.25, 0.5)] {
            let s = surface(special(variant, a, b, c));
            for (x, y) in samples(&s, 5, 0.05) {
                let h = geo(&s, x, y).mean_curvature();
                worst_sp = worst_sp.max((h.inner(&h) - b / 4.0).abs());
            }
        }
    }
    outcome(
        worst_cp < 1e-8 && worst_sp < 1e-4,
        format!("curve products max err {worst_cp:.2e}; special families max |‖H‖² − b/4| = {worst_sp:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for spec in all_families() {
        let s = surface(spec.clone());
        let pts = samples(&s, 10, 0.02);
        let r = pts.iter().map(|&(x, y)| pmc_residual(&s, x, y, FD).unwrap()).fold(0.0, f64::max);
        ok &= r < 1e-4 && pts.len() >= 100;
        parts.push(format!("{} {r:.1e}", label(&spec)));
    }
    outcome(ok, format!("max pmc_residual over 100 samples: {}", parts.join(", ")))
}

fn criterion_4() -> Outcome {
    let mut vanish: f64 = 0.0;
    for variant in [Variant::S1, Variant::S2] {
        for (a, c) in [(1.0, 0.0), (1.25, 0.5)] {
            let s = surface(special(variant, a, 0.5, c));
            for (x, y) in samples(&s, 5, 0.05) {
                vanish = vanish.max(theta(&s, x, y).norm());
            }
        }
    }
    // closed form (b/2)(a−1−c²) = 0.25; the second family's chart carries the opposite sign
    let expected = 0.5 / 2.0 * (2.0 - 1.0 - 0.0);
    let mut off: f64 = 0.0;
    let mut values = Vec::new();
    for (variant, sign) in [(Variant::S1, 1.0), (Variant::S2, -1.0)] {
        let s = surface(special(variant, 2.0, 0.5, 0.0));
        let mut last = Complex64::default();
        for (x, y) in samples(&s, 5, 0.05) {
            last = theta(&s, x, y);
            off = off.max((last - sign * expected).norm());
        }
        values.push(format!("{variant:?} {:.6}", last.re));
    }
    outcome(
        vanish < 1e-4 && off < 1e-3,
        format!("a = 1+c²: max |Θ| = {vanish:.2e}; (2,0.5,0): Θ = {}, max error {off:.2e}", values.join(", ")),
    )
}

fn criterion_5() -> Outcome {
    let mut smin: f64 = 0.0;
    let mut csq: f64 = 0.0;
    let mut patterns = true;
    for spec in vanishing_surfaces() {
        let s = surface(spec);
        let mut signs = Vec::new();
        for (x, y) in samples(&s, 6, 0.05) {
            let jet = s.eval_jet(x, y, 2).unwrap();
            let (a, b) = projection_rank_defect(&jet).unwrap();
            smin = smin.max(a.min(b));
            let (c1, c2) = kahler_functions(&jet).unwrap();
            csq = csq.max((c1 * c1 - c2 * c2).abs());
            // which of C₁ = ±C₂ holds, where decidable
            if (c1 - c2).abs().max((c1 + c2).abs()) > 1e-8 {
                signs.push((c1 - c2).abs() <= (c1 + c2).abs());
            }
        }
        patterns &= signs.windows(2).all(|w| w[0] == w[1]);
    }
    outcome(
        smin < 1e-5 && csq < 1e-6 && patterns,
        format!("max min(smin) = {smin:.2e}; max |C₁² − C₂²| = {csq:.2e}; sign pattern constant: {patterns}"),
    )
}

fn criterion_6() -> Outcome {
    let mut weingarten: f64 = 0.0;
    let mut ricci: f64 = 0.0;
    let mut codazzi: f64 = 0.0;
    let mut order = f64::INFINITY;
    let dirs = [[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]], [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.6, 0.8], [0.0, 1.0]]];
    for spec in all_families() {
        let s = surface(spec);
        for (x, y) in samples(&s, 4, 0.05) {
            weingarten = weingarten.max(weingarten_residual(&s, x, y, 1e-3).unwrap());
            ricci = ricci.max(shape_and_f(&s.eval_jet(x, y, 2).unwrap()).unwrap().ricci_residual);
            for d in dirs {
                let coarse = codazzi_residual(&s, x, y, d, 1e-3).unwrap();
                let fine = codazzi_residual(&s, x, y, d, 5e-4).unwrap();
                codazzi = codazzi.max(fine);
                if fine > 1e-10 {
                    order = order.min(coarse / fine);
                }
            }
        }
    }
    let mut ah: f64 = 0.0;
    for spec in vanishing_surfaces() {
        let s = surface(spec);
        for (x, y) in samples(&s, 5, 0.05) {
            ah = ah.max(shape_and_f(&s.eval_jet(x, y, 2).unwrap()).unwrap().ah_formula_residual);
        }
    }
    let order_ok = order >= 2.0;
    outcome(
        weingarten < 1e-9 && ah < 1e-5 && ricci < 1e-6 && codazzi < 1e-3 && order_ok,
        format!(
            "Weingarten {weingarten:.1e}; A_H formula {ah:.1e}; Ricci {ricci:.1e}; Codazzi {codazzi:.1e} (min halving factor {})",
            if order.is_finite() { format!("{order:.2}") } else { "n/a, all below 1e-10".into() }
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut inv: f64 = 0.0;
    let mut hopf: f64 = 0.0;
    let mut pde: f64 = 0.0;
    let mut converged = true;
    for spec in all_families().into_iter().chain(vanishing_surfaces()) {
        let s = surface(spec);
        for (x, y) in samples(&s, 4, 0.05) {
            let g = geo(&s, x, y);
            let fd = frenet_data_from(&g).unwrap();
            inv = inv.max(fd.gamma_norm_residual()).max((fd.gamma1 * fd.gamma2 - f_dz_dz(&g)).norm());
            let t = hopf_coefficient(&g.jet, &g.mean_curvature()).unwrap();
            hopf = hopf.max((fd.hopf_alternative() - t).norm());
            let coarse = frenet_pde_residuals(&s, x, y, 1e-3).unwrap().max();
            let fine = frenet_pde_residuals(&s, x, y, 5e-4).unwrap().max();
            pde = pde.max(fine);
            // truncation error must shrink unless it is already at the floor set by the profile ODE
            converged &= fine < 1e-7 || coarse / fine >= 2.0;
        }
    }
    outcome(
        inv < 1e-6 && hopf < 1e-5 && pde < 1e-3 && converged,
        format!("invariants {inv:.1e}; Θ two ways {hopf:.1e}; PDE residuals {pde:.1e}; converging: {converged}"),
    )
}

fn criterion_8() -> Outcome {
    let (mut fmat, mut ah, mut ident, mut sin): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut skipped = 0;
    let mut total = 0;
    for spec in vanishing_surfaces() {
        let s = surface(spec);
        for (x, y) in samples(&s, 6, 0.05) {
            total += 1;
            let g = geo(&s, x, y);
            let fr = match adapted_frame_from(&g, None) {
                Err(GeomError::PseudoUmbilical) => {
                    skipped += 1;
                    continue;
                }
                other => other.unwrap(),
            };
            fmat = fmat.max(fr.f_matrix_residual);
            ah = ah.max(fr.ah_matrix_residual(&g));
            let r = adapted_pde_residuals(&s, x, y, FD).unwrap();
            ident = ident.max(r.h_identities.iter().fold(0.0, |a: f64, &b| a.max(b)));
            sin = sin.max(r.sin_alpha.abs().min(r.sin_beta.abs()));
        }
    }
    outcome(
        fmat < 1e-6 && ah < 1e-6 && ident < 1e-5 && sin < 1e-4 && skipped < total,
        format!(
            "F-matrix {fmat:.1e}; A_H matrix {ah:.1e}; h identities {ident:.1e}; max min(|sin α|,|sin β|) {sin:.1e}; {skipped}/{total} pseudo-umbilical"
        ),
    )
}

fn random_point(rng: &mut ChaCha8Rng) -> ProductPoint {
    let s = Factor::Sphere.renormalize(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
    let (r, t): (f64, f64) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
    let h = [r.sinh() * t.cos(), r.sinh() * t.sin(), r.cosh()];
    ProductPoint::normalized(MinkowskiVector6::from_parts(s, h)).unwrap()
}

fn random_tangent(rng: &mut ChaCha8Rng, p: ProductPoint) -> ProductTangent {
    ProductTangent::projected(p, MinkowskiVector6::new(std::array::from_fn(|_| rng.gen_range(-1.0..1.0))))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut f_err: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_point(&mut rng);
        let [x, y, z] = [0; 3].map(|_| random_tangent(&mut rng, p));
        let r = riemann_tensor(&x, &y, &z).unwrap();
        for alt in riemann_tensor_alternatives(&x, &y, &z).unwrap() {
            worst = worst.max((alt.v - r.v).coord_norm());
        }
        let ff = product_structure_f(&x);
        let jj = apply_j(Kahler::J1, &apply_j(Kahler::J2, &x));
        f_err = f_err.max((ff.v + jj.v).coord_norm());
    }
    outcome(worst < 1e-12 && f_err < 1e-12, format!("1000 random triples: R̃ alternatives {worst:.1e}; F + J₁J₂ {f_err:.1e}"))
}

fn criterion_10() -> Outcome {
    const FLOOR: f64 = 1e-12;
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, b, c, variant, h0) in [(1.0, 0.5, 0.0, Variant::S1, 0.0), (2.0, 0.5, 0.0, Variant::S1, 0.0), (1.0, 0.5, 0.0, Variant::S2, 2.0)] {
        let p = ProfileParams::new(a, b, c, variant);
        let res = |step| integrate_h(p, h0, SlopeSign::Plus, DEFAULT_X_MAX, step).unwrap().max_energy_residual();
        let (r1, r2) = (res(1e-3), res(5e-4));
        let ratio = r1 / r2;
        // a residual already at roundoff cannot shrink 8×; the coarse-step ratio still shows the order
        let coarse = res(2e-2) / res(1e-2);
        ok &= r1 < 1e-6 && (ratio >= 8.0 || r2 < FLOOR);
        parts.push(format!(
            "{variant:?}({a},{b},{c}) {r1:.1e}, halving {ratio:.1}×{} [coarse {coarse:.1}×]",
            if ratio < 8.0 && r2 < FLOOR { " at roundoff floor" } else { "" }
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_11() -> Outcome {
    let spec = SurfaceSpec::CurveProduct {
        k_alpha: 1.0,
        k_beta: 1.0,
        minimal: false,
        curvature_modulation: 0.01,
        domain: None,
    };
    let s = surface(spec);
    let r = samples(&s, 10, 0.1).iter().map(|&(x, y)| pmc_residual(&s, x, y, FD).unwrap()).fold(0.0, f64::max);
    let clean = surface(make_curve_product(1.0, 1.0).unwrap());
    let r0 = samples(&clean, 10, 0.1).iter().map(|&(x, y)| pmc_residual(&clean, x, y, FD).unwrap()).fold(0.0, f64::max);
    outcome(r > 1e-3, format!("perturbed max pmc_residual {r:.2e} (unperturbed {r0:.1e})"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("curve-product Hopf formula", criterion_1),
        ("mean-curvature magnitudes", criterion_2),
        ("parallel mean curvature", criterion_3),
        ("Θ-vanishing for special surfaces", criterion_4),
        ("degenerate projection on Θ = 0", criterion_5),
        ("structural identities", criterion_6),
        ("Frenet system", criterion_7),
        ("adapted frame", criterion_8),
        ("ambient oracle equivalence", criterion_9),
        ("profile ODE quality", criterion_10),
        ("negative control", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let o = run();
        println!(
            "criterion {:>2} {} {name}: {} ({:.1}s)",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.passed);
    }
    println!("{}/11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
