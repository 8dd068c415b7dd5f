//! `pmc verify | scan | mesh`.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 for
//! unreadable or invalid configuration. Thread count follows `RAYON_NUM_THREADS`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use pmc_core::harness::{
    bundled, export_mesh, parse_params, run_suite, scan_grid, MeshFormat, ScanFamily, ScanOptions, SuiteConfig,
};

#[derive(Parser)]
#[command(name = "pmc", version, about = "Numerical verification of PMC surfaces in S2xH2")]
struct Cli {
    /// Finite-difference step (overrides the config).
    #[arg(long, global = true)]
    fd_step: Option<f64>,
    /// Fixed RK4 step for integrated curves and profiles (overrides the config).
    #[arg(long, global = true)]
    ode_step: Option<f64>,
    /// Multiplier applied to every tolerance (overrides the config).
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a JSON report.
    Verify {
        /// Config file, or `bundled:<name>` (vanishing_theta, nonvanishing).
        #[arg(long)]
        config: String,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a family over parameter ranges and write a CSV table.
    Scan {
        /// curve_product, special_1 or special_2.
        #[arg(long)]
        family: String,
        /// e.g. `k_alpha=0:2:0.25,k_beta=@vanishing` or `a=@vanishing,b=0.25|0.5,c=0`.
        #[arg(long)]
        params: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Samples per chart direction for the pmc residual and sign pattern.
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
    /// Export every surface of a config as meshes.
    Mesh {
        #[arg(long)]
        config: String,
        #[arg(long, default_value = "obj_charts")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure class for exit codes.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

fn config_err<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Config(e.into())
}

fn load_config(source: &str, cli: &Cli) -> anyhow::Result<SuiteConfig> {
    let text = match source.strip_prefix("bundled:") {
        Some(name) => match bundled(name) {
            Some(t) => t.to_string(),
            None => bail!("no bundled config named `{name}`"),
        },
        None => std::fs::read_to_string(source).with_context(|| format!("reading {source}"))?,
    };
    let mut cfg = SuiteConfig::from_json(&text)?;
    if let Some(v) = cli.fd_step {
        cfg.fd_step = v;
    }
    if let Some(v) = cli.ode_step {
        cfg.ode_step = v;
    }
    if let Some(v) = cli.tol_scale {
        cfg.tol_scale = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Verify { config, out } => {
            let cfg = load_config(config, cli).map_err(Failure::Config)?;
            let report = run_suite(&cfg).map_err(config_err)?;
            for s in &report.surfaces {
                if let Some(e) = &s.error {
                    eprintln!("FAIL {:<28} {e}", s.name);
                }
                for c in &s.checks {
                    let worst = c.metrics.iter().filter(|m| !m.passed).map(|m| m.name.as_str()).collect::<Vec<_>>();
                    let status = if c.passed { "pass" } else { "FAIL" };
                    eprintln!("{status} {:<28} {:<12} {}", s.name, c.check.name(), worst.join(" "));
                }
            }
            let sum = report.summary;
            eprintln!("{}/{} checks passed, {} surface errors", sum.checks_passed, sum.checks_run, sum.surface_errors);
            write_or_print(out.as_deref(), &report.to_json()).map_err(Failure::Runtime)?;
            Ok(report.all_passed())
        }
        Command::Scan { family, params, out, samples } => {
            let family: ScanFamily = family.parse().map_err(config_err)?;
            let axes = parse_params(family, params).map_err(config_err)?;
            let mut opts = ScanOptions { nx: *samples, ny: *samples, ..Default::default() };
            if let Some(v) = cli.fd_step {
                opts.fd_step = v;
            }
            if let Some(v) = cli.ode_step {
                opts.ode_step = v;
            }
            if opts.nx == 0 || opts.fd_step.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || opts.ode_step.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                return Err(Failure::Config(anyhow::anyhow!("samples and steps must be positive")));
            }
            let table = scan_grid(family, &axes, &opts).map_err(config_err)?;
            for r in table.rows.iter().filter(|r| r.status != "ok") {
                eprintln!("warning: skipped {}", r.message);
            }
            write_or_print(out.as_deref(), &table.to_csv()).map_err(Failure::Runtime)?;
            Ok(true)
        }
        Command::Mesh { config, format, out } => {
            let cfg = load_config(config, cli).map_err(Failure::Config)?;
            let format: MeshFormat = format.parse().map_err(config_err)?;
            let mut ok = true;
            for entry in &cfg.surfaces {
                match export_mesh(&entry.spec, &entry.grid, format, cfg.ode_step, out, &stem(&entry.name)) {
                    Ok(files) => {
                        for f in files {
                            eprintln!("wrote {}", f.display());
                        }
                    }
                    Err(e) => {
                        eprintln!("FAIL {}: {e}", entry.name);
                        ok = false;
                    }
                }
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
    }
}
