//! Verification suites, parameter scans and mesh export.

mod config;
mod mesh;
mod scan;

pub use config::{bundled, Check, Expectations, GridSpec, SuiteConfig, SurfaceEntry, SCHEMA_VERSION};
pub use mesh::{build_mesh, export_mesh, Mesh, MeshFormat, MeshVertex};
pub use scan::{parse_params, scan_grid, AxisValues, ParamAxis, ScanFamily, ScanOptions, ScanRow, ScanTable};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::extrinsic::{codazzi_residual, pmc_residual, LocalGeometry};
use crate::frames::{adapted_pde_residuals, f_dz_dz, frenet_data_from, frenet_pde_residuals};
use crate::surfaces::Surface;

/// Codazzi residuals below this are treated as converged regardless of order.
pub const CONVERGENCE_FLOOR: f64 = 1e-10;
const CODAZZI_STEP: f64 = 5e-4;

/// Largest value of one measured quantity over the sample grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub max: f64,
    pub tolerance: f64,
    /// Chart point of the largest value.
    pub worst: Option<[f64; 2]>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: Check,
    pub passed: bool,
    pub metrics: Vec<Metric>,
    /// Samples where the check is undefined (e.g. pseudo-umbilical points for the adapted frame).
    pub skipped_samples: usize,
    /// First evaluation error, if any sample failed outright.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub name: String,
    pub family: String,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub fd_step: f64,
    pub ode_step: f64,
    pub tol_scale: f64,
    pub description: Option<String>,
    /// The configuration that produced the report, verbatim.
    pub config: SuiteConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub surfaces: usize,
    pub surface_errors: usize,
    pub checks_run: usize,
    pub checks_passed: usize,
    pub checks_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub surfaces: Vec<SurfaceReport>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.summary.checks_failed == 0 && self.summary.surface_errors == 0
    }

    /// Process exit code: 0 when everything passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One per-sample measurement: `Ok(Some(v))`, skipped (`Ok(None)`) or failed.
type Sample = Result<Option<f64>>;

type Evaluator<'a> = Box<dyn Fn(&Surface, f64, f64) -> Sample + Sync + 'a>;

struct MetricSpec<'a> {
    name: &'a str,
    tolerance: f64,
    eval: Evaluator<'a>,
}

fn reduce(points: &[(f64, f64)], values: &[Sample]) -> (f64, Option<[f64; 2]>, usize, Option<String>) {
    let mut max = 0.0;
    let mut worst = None;
    let mut skipped = 0;
    let mut error = None;
    for (p, v) in points.iter().zip(values) {
        match v {
            Ok(Some(v)) => {
                let v = if v.is_nan() { f64::INFINITY } else { *v };
                if worst.is_none() || v > max {
                    max = v;
                    worst = Some([p.0, p.1]);
                }
            }
            Ok(None) => skipped += 1,
            Err(e) => {
                if error.is_none() {
                    error = Some(format!("at ({}, {}): {e}", p.0, p.1));
                    max = f64::INFINITY;
                    worst = Some([p.0, p.1]);
                }
            }
        }
    }
    (max, worst, skipped, error)
}

fn run_check(surface: &Surface, points: &[(f64, f64)], check: Check, specs: Vec<MetricSpec<'_>>) -> CheckResult {
    let mut metrics = Vec::new();
    let mut skipped = 0;
    let mut error = None;
    for spec in specs {
        let values: Vec<Sample> = points.par_iter().map(|&(x, y)| (spec.eval)(surface, x, y)).collect();
        let (max, worst, sk, err) = reduce(points, &values);
        skipped = skipped.max(sk);
        if error.is_none() {
            error = err.map(|e| format!("{}: {e}", spec.name));
        }
        metrics.push(Metric { name: spec.name.to_string(), max, tolerance: spec.tolerance, worst, passed: max < spec.tolerance });
    }
    let passed = error.is_none() && metrics.iter().all(|m| m.passed);
    CheckResult { check, passed, metrics, skipped_samples: skipped, error }
}

fn geometry(s: &Surface, x: f64, y: f64) -> Result<LocalGeometry> {
    LocalGeometry::new(&s.eval_jet(x, y, 2)?)
}

fn theta_at(s: &Surface, x: f64, y: f64) -> Result<Complex64> {
    let g = geometry(s, x, y)?;
    crate::extrinsic::hopf_coefficient(&g.jet, &g.mean_curvature())
}

fn metric<'a, F>(name: &'a str, tolerance: f64, f: F) -> MetricSpec<'a>
where
    F: Fn(&Surface, f64, f64) -> Sample + Sync + 'a,
{
    MetricSpec { name, tolerance, eval: Box::new(f) }
}

fn check_metrics<'a>(cfg: &'a SuiteConfig, entry: &'a SurfaceEntry, check: Check) -> Vec<MetricSpec<'a>> {
    let tol = cfg.tolerance(entry, check);
    let scale = cfg.tol_scale;
    let h = cfg.fd_step;
    let expect_tol = entry.expect.tolerance.map(|t| t * scale);
    let vanishing = entry.vanishing_theta();
    let mut out = Vec::new();
    match check {
        Check::Pmc => {
            out.push(metric("pmc_residual", tol, move |s, x, y| pmc_residual(s, x, y, h).map(Some)));
            out.push(metric("ricci_residual", 1e-6 * scale, |s, x, y| {
                Ok(Some(crate::extrinsic::shape_and_f(&s.eval_jet(x, y, 2)?)?.ricci_residual))
            }));
            out.push(metric("weingarten_residual", 1e-9 * scale, move |s, x, y| {
                crate::extrinsic::weingarten_residual(s, x, y, 10.0 * h).map(Some)
            }));
            if let Some(target) = entry.expect.h_norm2 {
                out.push(metric("h_norm2_error", expect_tol.unwrap_or(tol), move |s, x, y| {
                    let hv = geometry(s, x, y)?.mean_curvature();
                    Ok(Some((hv.inner(&hv) - target).abs()))
                }));
            }
        }
        Check::Hopf => {
            out.push(metric("theta_dzbar", tol, move |s, x, y| {
                let d = |dx: f64, dy: f64| theta_at(s, x + dx, y + dy);
                if !s.domain().contains(x, y, h) {
                    return Err(GeomError::OutOfDomain { x, y });
                }
                let tx = (d(h, 0.0)? - d(-h, 0.0)?) / (2.0 * h);
                let ty = (d(0.0, h)? - d(0.0, -h)?) / (2.0 * h);
                Ok(Some(((tx + Complex64::i() * ty) * 0.5).norm()))
            }));
            if let Some([re, im]) = entry.expect.theta {
                out.push(metric("theta_error", expect_tol.unwrap_or(tol), move |s, x, y| {
                    Ok(Some((theta_at(s, x, y)? - Complex64::new(re, im)).norm()))
                }));
            }
        }
        Check::Kahler => {
            out.push(metric("c_bound_excess", 1e-9 * scale, |s, x, y| {
                let (c1, c2) = crate::extrinsic::kahler_functions(&s.eval_jet(x, y, 2)?)?;
                Ok(Some((c1.abs().max(c2.abs()) - 1.0).max(0.0)))
            }));
            if vanishing {
                out.push(metric("c_squared_difference", tol, |s, x, y| {
                    let (c1, c2) = crate::extrinsic::kahler_functions(&s.eval_jet(x, y, 2)?)?;
                    Ok(Some((c1 * c1 - c2 * c2).abs()))
                }));
            }
        }
        Check::Frames => {
            out.push(metric("frenet_invariants", 1e-5 * scale, |s, x, y| {
                let g = geometry(s, x, y)?;
                let fd = frenet_data_from(&g)?;
                let theta = crate::extrinsic::hopf_coefficient(&g.jet, &g.mean_curvature())?;
                let r = fd
                    .gamma_norm_residual()
                    .max((fd.gamma1 * fd.gamma2 - f_dz_dz(&g)).norm())
                    .max((fd.hopf_alternative() - theta).norm());
                Ok(Some(r))
            }));
            out.push(metric("frenet_pde", tol, move |s, x, y| Ok(Some(frenet_pde_residuals(s, x, y, h)?.max()))));
            if vanishing {
                let adapted = move |s: &Surface, x: f64, y: f64| match adapted_pde_residuals(s, x, y, h) {
                    Err(GeomError::PseudoUmbilical) => Ok(None),
                    other => other.map(Some),
                };
                out.push(metric("adapted_identities", 1e-5 * scale, move |s, x, y| {
                    Ok(adapted(s, x, y)?.map(|r| r.max_identity()))
                }));
                out.push(metric("ah_formula_residual", 1e-5 * scale, |s, x, y| {
                    Ok(Some(crate::extrinsic::shape_and_f(&s.eval_jet(x, y, 2)?)?.ah_formula_residual))
                }));
                out.push(metric("ah_matrix_residual", 1e-6 * scale, |s, x, y| {
                    let g = geometry(s, x, y)?;
                    match crate::frames::adapted_frame_from(&g, None) {
                        Err(GeomError::PseudoUmbilical) => Ok(None),
                        other => Ok(Some(other?.ah_matrix_residual(&g))),
                    }
                }));
                out.push(metric("adapted_pde", tol, move |s, x, y| Ok(adapted(s, x, y)?.map(|r| r.max_pde()))));
                out.push(metric("min_abs_sin", 1e-4 * scale, move |s, x, y| {
                    Ok(adapted(s, x, y)?.map(|r| r.sin_alpha.abs().min(r.sin_beta.abs())))
                }));
            }
        }
        Check::Codazzi => {
            let triples = [[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]], [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.6, 0.8], [0.0, 1.0]]];
            out.push(metric("codazzi_residual", tol, move |s, x, y| {
                let mut r: f64 = 0.0;
                for t in triples {
                    r = r.max(codazzi_residual(s, x, y, t, CODAZZI_STEP)?);
                }
                Ok(Some(r))
            }));
            // 1 when halving the step fails to reduce a non-negligible residual by 2×
            out.push(metric("codazzi_convergence_failure", 0.5, move |s, x, y| {
                let mut fail: f64 = 0.0;
                for t in triples {
                    let coarse = codazzi_residual(s, x, y, t, 2.0 * CODAZZI_STEP)?;
                    let fine = codazzi_residual(s, x, y, t, CODAZZI_STEP)?;
                    if coarse > CONVERGENCE_FLOOR && fine > CONVERGENCE_FLOOR && coarse / fine < 2.0 {
                        fail = 1.0;
                    }
                }
                Ok(Some(fail))
            }));
        }
        Check::Intersection => {
            out.push(metric("min_projection_singular_value", tol, |s, x, y| {
                let (a, b) = crate::extrinsic::projection_rank_defect(&s.eval_jet(x, y, 2)?)?;
                Ok(Some(a.min(b)))
            }));
        }
    }
    out
}

fn run_surface(cfg: &SuiteConfig, entry: &SurfaceEntry) -> SurfaceReport {
    let family = entry.spec.family_name().to_string();
    let surface = match Surface::build(entry.spec.clone(), cfg.ode_step) {
        Ok(s) => s,
        Err(e) => {
            return SurfaceReport { name: entry.name.clone(), family, samples: 0, checks: Vec::new(), error: Some(e.to_string()) }
        }
    };
    let points = surface.domain().grid(entry.grid.nx, entry.grid.ny, entry.grid.margin);
    let mut checks = Vec::new();
    let mut seen = Vec::new();
    for &check in &entry.checks {
        if seen.contains(&check) {
            continue;
        }
        seen.push(check);
        checks.push(run_check(&surface, &points, check, check_metrics(cfg, entry, check)));
    }
    // Lemma-level sign pattern on vanishing-Θ surfaces
    if entry.vanishing_theta() && entry.checks.contains(&Check::Kahler) {
        if let Some(k) = checks.iter_mut().find(|c| c.check == Check::Kahler) {
            let pattern: Vec<Option<bool>> = points
                .par_iter()
                .map(|&(x, y)| {
                    let (c1, c2) = crate::extrinsic::kahler_functions(&surface.eval_jet(x, y, 2).ok()?).ok()?;
                    ((c1 - c2).abs().max((c1 + c2).abs()) > 1e-8).then(|| (c1 - c2).abs() <= (c1 + c2).abs())
                })
                .collect();
            let defined: Vec<bool> = pattern.into_iter().flatten().collect();
            let mixed = defined.windows(2).any(|w| w[0] != w[1]);
            k.metrics.push(Metric {
                name: "sign_pattern_changes".into(),
                max: if mixed { 1.0 } else { 0.0 },
                tolerance: 0.5,
                worst: None,
                passed: !mixed,
            });
            k.passed &= !mixed;
        }
    }
    SurfaceReport { name: entry.name.clone(), family, samples: points.len(), checks, error: None }
}

/// Runs every requested check. Constructor failures are recorded per surface.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let surfaces: Vec<SurfaceReport> = cfg.surfaces.iter().map(|e| run_surface(cfg, e)).collect();
    let checks_run = surfaces.iter().map(|s| s.checks.len()).sum();
    let checks_passed = surfaces.iter().flat_map(|s| &s.checks).filter(|c| c.passed).count();
    let summary = Summary {
        surfaces: surfaces.len(),
        surface_errors: surfaces.iter().filter(|s| s.error.is_some()).count(),
        checks_run,
        checks_passed,
        checks_failed: checks_run - checks_passed,
    };
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema_version: SCHEMA_VERSION,
            fd_step: cfg.fd_step,
            ode_step: cfg.ode_step,
            tol_scale: cfg.tol_scale,
            description: cfg.description.clone(),
            config: cfg.clone(),
        },
        surfaces,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mut cfg: SuiteConfig) -> SuiteConfig {
        for s in &mut cfg.surfaces {
            s.grid.nx = 4;
            s.grid.ny = 3;
        }
        cfg
    }

    #[test]
    fn vanishing_suite_passes() {
        let cfg = small(SuiteConfig::from_json(bundled("vanishing_theta").unwrap()).unwrap());
        let report = run_suite(&cfg).unwrap();
        for s in &report.surfaces {
            for c in &s.checks {
                assert!(c.passed, "{}: {:?}", s.name, c);
            }
        }
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn nonvanishing_suite_passes() {
        let cfg = small(SuiteConfig::from_json(bundled("nonvanishing").unwrap()).unwrap());
        let report = run_suite(&cfg).unwrap();
        assert!(report.all_passed(), "{}", report.to_json());
        let theta = report.surfaces[0].checks.iter().find(|c| c.check == Check::Hopf).unwrap();
        assert!(theta.metrics.iter().any(|m| m.name == "theta_error" && m.max < 1e-3));
    }

    #[test]
    fn empty_checks_give_empty_report() {
        let cfg = SuiteConfig::from_json(r#"{"schema_version":1,"surfaces":[]}"#).unwrap();
        let report = run_suite(&cfg).unwrap();
        assert_eq!(report.summary.checks_run, 0);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn constructor_failure_is_per_surface() {
        let text = r#"{"schema_version":1,"surfaces":[
            {"name":"bad","spec":{"family":"special_2","a":2,"b":0.5,"c":0,"h0":2},"checks":["pmc"]},
            {"name":"good","spec":{"family":"curve_product","k_alpha":1,"k_beta":1},"grid":{"nx":2,"ny":2},"checks":["pmc"]}]}"#;
        let report = run_suite(&SuiteConfig::from_json(text).unwrap()).unwrap();
        assert!(report.surfaces[0].error.is_some());
        assert!(report.surfaces[1].checks[0].passed);
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn wrong_expectation_fails() {
        let text = r#"{"schema_version":1,"surfaces":[
            {"name":"cp","spec":{"family":"curve_product","k_alpha":1,"k_beta":1},"grid":{"nx":2,"ny":2},
             "checks":["hopf"],"expect":{"theta":[0.4,0.0]}}]}"#;
        let report = run_suite(&SuiteConfig::from_json(text).unwrap()).unwrap();
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = small(SuiteConfig::from_json(bundled("nonvanishing").unwrap()).unwrap());
        assert_eq!(run_suite(&cfg).unwrap().to_json(), run_suite(&cfg).unwrap().to_json());
    }
}
