use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::extrinsic::{hopf_coefficient, kahler_functions, pmc_residual, LocalGeometry};
use crate::hode::{ProfileParams, SlopeSign, Variant};
use crate::surfaces::{Surface, SurfaceSpec};

/// Families that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanFamily {
    CurveProduct,
    Special1,
    Special2,
}

impl ScanFamily {
    pub fn name(self) -> &'static str {
        match self {
            ScanFamily::CurveProduct => "curve_product",
            ScanFamily::Special1 => "special_1",
            ScanFamily::Special2 => "special_2",
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            ScanFamily::CurveProduct => &["k_alpha", "k_beta"],
            _ => &["a", "b", "c"],
        }
    }

    fn optional(self) -> &'static [&'static str] {
        match self {
            ScanFamily::CurveProduct => &[],
            _ => &["h0"],
        }
    }

    /// The parameter that `@vanishing` may be attached to.
    fn vanishing_param(self) -> &'static str {
        match self {
            ScanFamily::CurveProduct => "k_beta",
            _ => "a",
        }
    }
}

impl FromStr for ScanFamily {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "curve_product" => Ok(ScanFamily::CurveProduct),
            "special_1" => Ok(ScanFamily::Special1),
            "special_2" => Ok(ScanFamily::Special2),
            _ => Err(GeomError::InvalidParameter(format!("unknown scan family `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AxisValues {
    List(Vec<f64>),
    /// Derived from the other parameters so that Θ vanishes.
    Vanishing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamAxis {
    pub name: String,
    pub values: AxisValues,
}

fn number(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| GeomError::InvalidParameter(format!("not a number: `{s}`")))
}

fn parse_values(text: &str) -> Result<AxisValues> {
    let text = text.trim();
    if text == "@vanishing" {
        return Ok(AxisValues::Vanishing);
    }
    if text.contains('|') {
        return text.split('|').map(number).collect::<Result<_>>().map(AxisValues::List);
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(AxisValues::List(vec![number(v)?])),
        [lo, hi, step] => {
            let (lo, hi, step) = (number(lo)?, number(hi)?, number(step)?);
            if !(step > 0.0) || hi < lo {
                return Err(GeomError::InvalidParameter(format!("bad range `{text}`")));
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok(AxisValues::List((0..=n).map(|i| lo + step * i as f64).collect()))
        }
        _ => Err(GeomError::InvalidParameter(format!("bad range `{text}` (use v, lo:hi:step or a|b|c)"))),
    }
}

/// Parses `name=value,...` where a value is `v`, `lo:hi:step`, `a|b|c` or `@vanishing`.
pub fn parse_params(family: ScanFamily, text: &str) -> Result<Vec<ParamAxis>> {
    let mut axes: Vec<ParamAxis> = Vec::new();
    for item in text.split([',', ';']).map(str::trim).filter(|s| !s.is_empty()) {
        let (name, values) = item
            .split_once('=')
            .ok_or_else(|| GeomError::InvalidParameter(format!("expected name=value, got `{item}`")))?;
        let name = name.trim();
        if !family.required().contains(&name) && !family.optional().contains(&name) {
            return Err(GeomError::InvalidParameter(format!("{} has no parameter `{name}`", family.name())));
        }
        if axes.iter().any(|a| a.name == name) {
            return Err(GeomError::InvalidParameter(format!("parameter `{name}` given twice")));
        }
        let values = parse_values(values)?;
        if values == AxisValues::Vanishing && name != family.vanishing_param() {
            return Err(GeomError::InvalidParameter(format!(
                "@vanishing applies to `{}` only",
                family.vanishing_param()
            )));
        }
        axes.push(ParamAxis { name: name.to_string(), values });
    }
    for req in family.required() {
        if !axes.iter().any(|a| a.name == *req) {
            return Err(GeomError::InvalidParameter(format!("missing parameter `{req}`")));
        }
    }
    Ok(axes)
}

/// One parameter point of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub params: Vec<(String, f64)>,
    pub h_norm2: Option<f64>,
    pub theta: Option<[f64; 2]>,
    pub max_pmc: Option<f64>,
    /// `C1=C2`, `C1=-C2`, `both`, `none` or `mixed` over the sample grid.
    pub c_sign: Option<String>,
    pub status: String,
    pub message: String,
}

impl ScanRow {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub family: ScanFamily,
    pub columns: Vec<String>,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "family,{},h_norm2,theta_re,theta_im,max_pmc,c_sign,status,message", self.columns.join(","));
        let num = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.12e}"));
        for r in &self.rows {
            let params: Vec<String> =
                self.columns.iter().map(|c| r.param(c).map_or_else(String::new, |v| format!("{v}"))).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.family.name(),
                params.join(","),
                num(r.h_norm2),
                num(r.theta.map(|t| t[0])),
                num(r.theta.map(|t| t[1])),
                num(r.max_pmc),
                r.c_sign.clone().unwrap_or_default(),
                r.status,
                r.message.replace([',', '\n'], ";"),
            );
        }
        out
    }
}

/// Grid used per parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub nx: usize,
    pub ny: usize,
    pub margin: f64,
    pub fd_step: f64,
    pub ode_step: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            nx: 4,
            ny: 4,
            margin: 0.05,
            fd_step: crate::extrinsic::DEFAULT_FD_STEP,
            ode_step: crate::surfaces::DEFAULT_ODE_STEP,
        }
    }
}

fn points(axes: &[ParamAxis]) -> Vec<Vec<(String, Option<f64>)>> {
    let mut acc: Vec<Vec<(String, Option<f64>)>> = vec![Vec::new()];
    for axis in axes {
        let values: Vec<Option<f64>> = match &axis.values {
            AxisValues::List(v) => v.iter().copied().map(Some).collect(),
            AxisValues::Vanishing => vec![None],
        };
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push((axis.name.clone(), *v));
                    p
                })
            })
            .collect();
    }
    acc
}

fn resolve(family: ScanFamily, raw: &[(String, Option<f64>)]) -> Result<(Vec<(String, f64)>, SurfaceSpec)> {
    let get = |n: &str| raw.iter().find(|(k, _)| k == n).and_then(|(_, v)| *v);
    let mut params: Vec<(String, f64)> = Vec::new();
    let spec = match family {
        ScanFamily::CurveProduct => {
            let ka = get("k_alpha").unwrap_or(f64::NAN);
            let kb = get("k_beta").unwrap_or_else(|| (1.0 + ka * ka).sqrt());
            params.extend([("k_alpha".to_string(), ka), ("k_beta".to_string(), kb)]);
            crate::surfaces::make_curve_product(ka, kb)
        }
        ScanFamily::Special1 | ScanFamily::Special2 => {
            let (b, c) = (get("b").unwrap_or(f64::NAN), get("c").unwrap_or(f64::NAN));
            let a = get("a").unwrap_or(1.0 + c * c);
            let variant = if family == ScanFamily::Special1 { Variant::S1 } else { Variant::S2 };
            let h0 = get("h0").or_else(|| ProfileParams::new(a, b, c, variant).default_h0());
            params.extend([("a".to_string(), a), ("b".to_string(), b), ("c".to_string(), c)]);
            params.push(("h0".to_string(), h0.unwrap_or(f64::NAN)));
            match h0 {
                None => Err(GeomError::InvalidParameter("no admissible starting height".into())),
                Some(h0) if family == ScanFamily::Special1 => {
                    crate::surfaces::make_special_1(a, b, c, h0, SlopeSign::Plus)
                }
                Some(h0) => crate::surfaces::make_special_2(a, b, c, h0, SlopeSign::Plus),
            }
        }
    };
    spec.map(|s| (params.clone(), s)).map_err(|e| {
        let shown: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        GeomError::InvalidParameter(format!("{} ({e})", shown.join(" ")))
    })
}

fn classify(c1: f64, c2: f64) -> &'static str {
    const TOL: f64 = 1e-6;
    match ((c1 - c2).abs() < TOL, (c1 + c2).abs() < TOL) {
        (true, true) => "both",
        (true, false) => "C1=C2",
        (false, true) => "C1=-C2",
        (false, false) => "none",
    }
}

fn evaluate(spec: SurfaceSpec, opts: &ScanOptions) -> Result<(f64, [f64; 2], f64, String)> {
    let surface = Surface::build(spec, opts.ode_step)?;
    let d = surface.domain();
    let (xc, yc) = (0.5 * (d.x[0] + d.x[1]), 0.5 * (d.y[0] + d.y[1]));
    let geo = LocalGeometry::new(&surface.eval_jet(xc, yc, 2)?)?;
    let h = geo.mean_curvature();
    let theta = hopf_coefficient(&geo.jet, &h)?;
    let mut max_pmc: f64 = 0.0;
    let mut labels: Vec<&str> = Vec::new();
    for (x, y) in d.grid(opts.nx, opts.ny, opts.margin) {
        max_pmc = max_pmc.max(pmc_residual(&surface, x, y, opts.fd_step)?);
        let (c1, c2) = kahler_functions(&surface.eval_jet(x, y, 2)?)?;
        labels.push(classify(c1, c2));
    }
    let first = labels.first().copied().unwrap_or("none");
    let pattern = if labels.iter().all(|l| *l == first) { first } else { "mixed" };
    Ok((h.inner(&h), [theta.re, theta.im], max_pmc, pattern.to_string()))
}

/// Sweeps the Cartesian product of the axes. Infeasible points become skipped rows.
pub fn scan_grid(family: ScanFamily, axes: &[ParamAxis], opts: &ScanOptions) -> Result<ScanTable> {
    let mut columns: Vec<String> = family.required().iter().map(|s| s.to_string()).collect();
    if family != ScanFamily::CurveProduct {
        columns.push("h0".into());
    }
    let rows = points(axes)
        .par_iter()
        .map(|raw| {
            let fallback: Vec<(String, f64)> = raw.iter().map(|(k, v)| (k.clone(), v.unwrap_or(f64::NAN))).collect();
            let skipped = |params, e: GeomError| ScanRow {
                params,
                h_norm2: None,
                theta: None,
                max_pmc: None,
                c_sign: None,
                status: "skipped".into(),
                message: e.to_string(),
            };
            let (params, spec) = match resolve(family, raw) {
                Ok(v) => v,
                Err(e) => return skipped(fallback, e),
            };
            match evaluate(spec, opts) {
                Ok((h2, theta, pmc, sign)) => ScanRow {
                    params,
                    h_norm2: Some(h2),
                    theta: Some(theta),
                    max_pmc: Some(pmc),
                    c_sign: Some(sign),
                    status: "ok".into(),
                    message: String::new(),
                },
                Err(e) => skipped(params, e),
            }
        })
        .collect();
    Ok(ScanTable { family, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges_lists_and_markers() {
        let axes = parse_params(ScanFamily::CurveProduct, "k_alpha=0:2:0.25, k_beta=@vanishing").unwrap();
        assert_eq!(axes[0].values, AxisValues::List((0..=8).map(|i| 0.25 * i as f64).collect()));
        assert_eq!(axes[1].values, AxisValues::Vanishing);
        let axes = parse_params(ScanFamily::Special1, "b=0.25|0.5|1;a=@vanishing;c=0|0.5").unwrap();
        assert_eq!(axes[0].values, AxisValues::List(vec![0.25, 0.5, 1.0]));
        for bad in ["k_alpha=1", "k_alpha=1,k_gamma=2,k_beta=1", "k_alpha=@vanishing,k_beta=1", "k_alpha=2:1:0.5,k_beta=1"] {
            assert!(parse_params(ScanFamily::CurveProduct, bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn vanishing_curve_products_have_zero_theta() {
        let axes = parse_params(ScanFamily::CurveProduct, "k_alpha=0:2:0.25,k_beta=@vanishing").unwrap();
        let table = scan_grid(ScanFamily::CurveProduct, &axes, &ScanOptions { nx: 2, ny: 2, ..Default::default() }).unwrap();
        assert_eq!(table.rows.len(), 9);
        for r in &table.rows {
            let [re, im] = r.theta.unwrap();
            assert!(re.hypot(im) < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn theta_follows_closed_form() {
        let axes = parse_params(ScanFamily::CurveProduct, "k_alpha=1,k_beta=0.5:2:0.25").unwrap();
        let table = scan_grid(ScanFamily::CurveProduct, &axes, &ScanOptions { nx: 2, ny: 2, ..Default::default() }).unwrap();
        for r in &table.rows {
            let kb = r.param("k_beta").unwrap();
            let expected = 0.5 * (1.0 - kb * kb) + 0.5;
            assert!((r.theta.unwrap()[0] - expected).abs() < 1e-8, "{r:?}");
        }
        assert_eq!(table.to_csv().lines().count(), 1 + table.rows.len());
    }

    #[test]
    fn special_h_norm_is_quarter_b() {
        let axes = parse_params(ScanFamily::Special1, "a=@vanishing,b=0.25|0.5|1,c=0|0.5").unwrap();
        let table = scan_grid(ScanFamily::Special1, &axes, &ScanOptions { nx: 2, ny: 2, ..Default::default() }).unwrap();
        assert_eq!(table.rows.len(), 6);
        for r in &table.rows {
            // P(h) = −2h²(1−h²) ≤ 0 at (a,b,c) = (1,1,0): no profile exists
            if r.param("b") == Some(1.0) && r.param("c") == Some(0.0) {
                assert_eq!(r.status, "skipped");
                continue;
            }
            assert_eq!(r.status, "ok", "{r:?}");
            assert!((r.h_norm2.unwrap() - r.param("b").unwrap() / 4.0).abs() < 1e-4);
        }
    }

    #[test]
    fn infeasible_points_are_skipped() {
        let axes = parse_params(ScanFamily::CurveProduct, "k_alpha=0,k_beta=0|1").unwrap();
        let table = scan_grid(ScanFamily::CurveProduct, &axes, &ScanOptions { nx: 2, ny: 2, ..Default::default() }).unwrap();
        assert_eq!(table.rows[0].status, "skipped");
        assert!(!table.rows[0].message.is_empty());
        assert_eq!(table.rows[1].status, "ok");
    }
}
