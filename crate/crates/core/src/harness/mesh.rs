use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::Factor;
use crate::error::{GeomError, Result};
use crate::extrinsic::{hopf_coefficient, kahler_functions, LocalGeometry};
use crate::surfaces::{Surface, SurfaceSpec};

use super::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFormat {
    /// One OBJ per factor in planar charts.
    ObjCharts,
    /// Raw ambient coordinates.
    Csv6d,
}

impl FromStr for MeshFormat {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obj_charts" => Ok(MeshFormat::ObjCharts),
            "csv6d" => Ok(MeshFormat::Csv6d),
            _ => Err(GeomError::InvalidParameter(format!("unknown mesh format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshVertex {
    pub x: f64,
    pub y: f64,
    pub position: [f64; 6],
    pub h_norm2: f64,
    /// NaN where the chart is not conformal.
    pub theta_abs: f64,
    pub c1: f64,
    pub c2: f64,
    pub membership_residual: f64,
}

impl MeshVertex {
    /// Stereographic projection from the south pole.
    pub fn sphere_chart(&self) -> [f64; 2] {
        let [a, b, c, ..] = self.position;
        [a / (1.0 + c), b / (1.0 + c)]
    }

    /// Poincaré disk model.
    pub fn disk_chart(&self) -> [f64; 2] {
        let [.., a, b, c] = self.position;
        [a / (1.0 + c), b / (1.0 + c)]
    }
}

/// Row-major `nx × ny` vertex grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nx: usize,
    pub ny: usize,
    pub vertices: Vec<MeshVertex>,
}

pub fn build_mesh(spec: &SurfaceSpec, grid: &GridSpec, ode_step: f64) -> Result<Mesh> {
    let surface = Surface::build(spec.clone(), ode_step)?;
    let d = surface.domain();
    if grid.nx < 2 || grid.ny < 2 {
        return Err(GeomError::InvalidParameter("mesh grid needs at least 2×2 vertices".into()));
    }
    if 2.0 * grid.margin >= (d.x[1] - d.x[0]).min(d.y[1] - d.y[0]) {
        return Err(GeomError::OutOfDomain { x: d.x[0] + grid.margin, y: d.y[0] + grid.margin });
    }
    let vertices = d
        .grid(grid.nx, grid.ny, grid.margin)
        .par_iter()
        .map(|&(x, y)| {
            let raw = surface.position(x, y);
            let geo = LocalGeometry::new(&surface.eval_jet(x, y, 2)?)?;
            let h = geo.mean_curvature();
            let theta_abs = hopf_coefficient(&geo.jet, &h).map_or(f64::NAN, |t| t.norm());
            let (c1, c2) = kahler_functions(&geo.jet)?;
            let membership = Factor::Sphere
                .membership_residual(&raw.sphere_part())
                .max(Factor::Hyperbolic.membership_residual(&raw.hyperbolic_part()));
            Ok(MeshVertex { x, y, position: raw.0, h_norm2: h.inner(&h), theta_abs, c1, c2, membership_residual: membership })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mesh { nx: grid.nx, ny: grid.ny, vertices })
}

impl Mesh {
    pub fn to_obj(&self, factor: Factor) -> String {
        let mut out = String::new();
        let chart = match factor {
            Factor::Sphere => "sphere factor, stereographic projection from the south pole",
            Factor::Hyperbolic => "hyperbolic factor, Poincare disk",
        };
        let _ = writeln!(out, "# {chart}\n# {}x{} grid\n# attributes: index Hnorm2 |Theta| C1 C2", self.nx, self.ny);
        for v in &self.vertices {
            let [a, b] = match factor {
                Factor::Sphere => v.sphere_chart(),
                Factor::Hyperbolic => v.disk_chart(),
            };
            let _ = writeln!(out, "v {a:.12} {b:.12} 0");
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "# attr {} {:.12e} {:.12e} {:.12e} {:.12e}", i + 1, v.h_norm2, v.theta_abs, v.c1, v.c2);
        }
        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                let k = j * self.nx + i + 1;
                let (a, b, c, d) = (k, k + 1, k + self.nx + 1, k + self.nx);
                let _ = writeln!(out, "f {a} {b} {c}\nf {a} {c} {d}");
            }
        }
        out
    }

    pub fn to_csv6d(&self) -> String {
        let mut out = String::from("x,y,p1,p2,p3,p4,p5,p6,Hnorm2,theta_abs,C1,C2,membership_residual\n");
        for v in &self.vertices {
            let p: Vec<String> = v.position.iter().map(|c| format!("{c:.15e}")).collect();
            let _ = writeln!(
                out,
                "{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}",
                v.x,
                v.y,
                p.join(","),
                v.h_norm2,
                v.theta_abs,
                v.c1,
                v.c2,
                v.membership_residual
            );
        }
        out
    }
}

/// Writes `<stem>_sphere.obj` and `<stem>_hyperbolic.obj`, or `<stem>.csv`.
pub fn export_mesh(
    spec: &SurfaceSpec,
    grid: &GridSpec,
    format: MeshFormat,
    ode_step: f64,
    out_dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    let mesh = build_mesh(spec, grid, ode_step)?;
    let io = |e: std::io::Error| GeomError::Io(e.to_string());
    std::fs::create_dir_all(out_dir).map_err(io)?;
    let files = match format {
        MeshFormat::ObjCharts => vec![
            (out_dir.join(format!("{stem}_sphere.obj")), mesh.to_obj(Factor::Sphere)),
            (out_dir.join(format!("{stem}_hyperbolic.obj")), mesh.to_obj(Factor::Hyperbolic)),
        ],
        MeshFormat::Csv6d => vec![(out_dir.join(format!("{stem}.csv")), mesh.to_csv6d())],
    };
    for (path, text) in &files {
        std::fs::write(path, text).map_err(io)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
