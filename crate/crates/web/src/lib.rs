//! wasm-bindgen bindings behind `www/index.html`.
//!
//! Every entry point takes and returns JSON strings so the page needs no
//! generated TypeScript types.

use pmc_core::extrinsic::{extrinsic_report, DEFAULT_FD_STEP};
use pmc_core::harness::{build_mesh, parse_params, scan_grid, GridSpec, ScanFamily, ScanOptions};
use pmc_core::surfaces::{Surface, SurfaceSpec, DEFAULT_ODE_STEP};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn spec_from(json: &str) -> Result<SurfaceSpec, String> {
    let spec: SurfaceSpec = serde_json::from_str(json).map_err(|e| format!("surface spec: {e}"))?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

#[derive(Serialize)]
struct PointInfo {
    domain: [[f64; 2]; 2],
    report: pmc_core::extrinsic::ExtrinsicReport,
}

/// Extrinsic report at `(s, t) ∈ [0,1]²`, mapped affinely onto the chart domain.
pub fn point_report_json(spec: &str, s: f64, t: f64) -> Result<String, String> {
    let surface = Surface::build(spec_from(spec)?, DEFAULT_ODE_STEP).map_err(|e| e.to_string())?;
    let d = surface.domain();
    let inset = 2.0 * DEFAULT_FD_STEP;
    let lerp = |r: [f64; 2], u: f64| r[0] + inset + (r[1] - r[0] - 2.0 * inset) * u.clamp(0.0, 1.0);
    let report = extrinsic_report(&surface, lerp(d.x, s), lerp(d.y, t), DEFAULT_FD_STEP).map_err(|e| e.to_string())?;
    serde_json::to_string(&PointInfo { domain: [d.x, d.y], report }).map_err(|e| e.to_string())
}

/// Parameter sweep as CSV.
pub fn scan_csv(family: &str, params: &str) -> Result<String, String> {
    let family: ScanFamily = family.parse().map_err(|e: pmc_core::GeomError| e.to_string())?;
    let axes = parse_params(family, params).map_err(|e| e.to_string())?;
    let opts = ScanOptions { nx: 3, ny: 3, ..Default::default() };
    Ok(scan_grid(family, &axes, &opts).map_err(|e| e.to_string())?.to_csv())
}

#[derive(Serialize)]
struct ChartMesh {
    n: usize,
    sphere: Vec<[f64; 2]>,
    disk: Vec<[f64; 2]>,
    h_norm2: Vec<f64>,
    theta_abs: Vec<f64>,
    c1: Vec<f64>,
    c2: Vec<f64>,
}

/// `n × n` mesh in the stereographic and Poincaré-disk charts.
pub fn chart_mesh_json(spec: &str, n: usize) -> Result<String, String> {
    let n = n.clamp(2, 80);
    let grid = GridSpec { nx: n, ny: n, margin: 0.02 };
    let mesh = build_mesh(&spec_from(spec)?, &grid, DEFAULT_ODE_STEP).map_err(|e| e.to_string())?;
    let v = &mesh.vertices;
    let out = ChartMesh {
        n,
        sphere: v.iter().map(|v| v.sphere_chart()).collect(),
        disk: v.iter().map(|v| v.disk_chart()).collect(),
        h_norm2: v.iter().map(|v| v.h_norm2).collect(),
        theta_abs: v.iter().map(|v| v.theta_abs).collect(),
        c1: v.iter().map(|v| v.c1).collect(),
        c2: v.iter().map(|v| v.c2).collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = pointReport)]
pub fn point_report(spec: &str, s: f64, t: f64) -> Result<String, JsError> {
    point_report_json(spec, s, t).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn scan(family: &str, params: &str) -> Result<String, JsError> {
    scan_csv(family, params).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = chartMesh)]
pub fn chart_mesh(spec: &str, n: usize) -> Result<String, JsError> {
    chart_mesh_json(spec, n).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CP: &str = r#"{"family":"curve_product","k_alpha":1,"k_beta":1}"#;

    #[test]
    fn point_report_has_closed_form_values() {
        let v: serde_json::Value = serde_json::from_str(&point_report_json(CP, 0.5, 0.5).unwrap()).unwrap();
        assert!((v["report"]["h_norm2"].as_f64().unwrap() - 0.5).abs() < 1e-10, "{v}");
    }

    #[test]
    fn bad_spec_is_an_error_string() {
        assert!(point_report_json(r#"{"family":"curve_product","k_alpha":0,"k_beta":0}"#, 0.5, 0.5).is_err());
        assert!(point_report_json("not json", 0.5, 0.5).is_err());
    }

    #[test]
    fn scan_returns_csv() {
        let csv = scan_csv("curve_product", "k_alpha=0|1,k_beta=@vanishing").unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(scan_csv("torus", "a=1").is_err());
    }

    #[test]
    fn mesh_has_n_squared_vertices() {
        let v: serde_json::Value = serde_json::from_str(&chart_mesh_json(CP, 5).unwrap()).unwrap();
        assert_eq!(v["disk"].as_array().unwrap().len(), 25);
        assert_eq!(v["c1"].as_array().unwrap().len(), 25);
    }
}
