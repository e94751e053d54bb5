//! Command-line surface. Every command reads one scene, applies the camera
//! overrides and writes its artifacts into the output directory.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::camera::{PanTiltPose, PixelMargins, PoseSearch, PoseSearcher};
use crate::error::{Error, Result};
use crate::oracle::{oracle_compare, write_grid_csv, write_summary_json, GridSpec};
use crate::path::{
    plan_boundary_path, simulate, write_trace_csv, write_trajectory_json, Trajectory, DEFAULT_CLEARANCE, DEFAULT_SPEED,
};
use crate::region::{build_regions, Regions, DEFAULT_ARC_TOL};
use crate::scene::{CameraModel, Scene, Vec3};
use crate::svg::{render_svg, DEFAULT_M_PER_PX};

#[derive(Debug, Parser)]
#[command(
    name = "fovregion",
    version,
    about = "No-view regions of a pan-tilt camera tracking planar markers"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Scene description (JSON).
    #[arg(long, global = true, default_value = "scene.json")]
    pub scene: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Override the horizontal aperture, radians.
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Override the vertical aperture, radians.
    #[arg(long, global = true)]
    pub phi: Option<f64>,
    /// Override the optical center height.
    #[arg(long = "hc", global = true)]
    pub h_c: Option<f64>,
    /// Outward tolerance of the polygonized boundaries, meters.
    #[arg(long, global = true, default_value_t = DEFAULT_ARC_TOL)]
    pub arc_tol: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Write the region description (region.json) and a drawing (region.svg).
    Region {
        /// Drawing scale, meters per pixel.
        #[arg(long, default_value_t = DEFAULT_M_PER_PX)]
        m_per_px: f64,
    },
    /// Membership and best achievable margins at one position (check.json).
    Check {
        #[arg(allow_negative_numbers = true)]
        x: f64,
        #[arg(allow_negative_numbers = true)]
        y: f64,
    },
    /// Log margins along a waypoint file (trace.csv).
    Simulate {
        path: PathBuf,
        /// Sampling step, seconds.
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Plan a path around the region (plan.json, plan_trace.csv, plan.svg).
    Plan {
        #[arg(allow_negative_numbers = true)]
        x0: f64,
        #[arg(allow_negative_numbers = true)]
        y0: f64,
        #[arg(allow_negative_numbers = true)]
        x1: f64,
        #[arg(allow_negative_numbers = true)]
        y1: f64,
        /// Distance kept from the region, meters.
        #[arg(long, default_value_t = DEFAULT_CLEARANCE)]
        clearance: f64,
        /// Travel speed, m/s.
        #[arg(long, default_value_t = DEFAULT_SPEED)]
        speed: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = DEFAULT_M_PER_PX)]
        m_per_px: f64,
    },
    /// Compare the region with the pinhole oracle on a grid
    /// (oracle_grid.csv, oracle_summary.json).
    OracleCompare {
        /// Samples per side.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Window side, meters.
        #[arg(long, default_value_t = 6.0)]
        window: f64,
        /// Lower-left corner of the window; centered on the region if omitted.
        #[arg(long, allow_negative_numbers = true)]
        x0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y0: Option<f64>,
        /// Random offset of each sample, as a fraction of a cell.
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allowed width of the missed band, in cells.
        #[arg(long, default_value_t = 2)]
        band: usize,
    },
}

/// Loads the scene and applies the camera overrides.
pub fn load_scene(opts: &GlobalOpts) -> Result<Scene> {
    let scene = Scene::load(&opts.scene)?;
    let c = scene.camera;
    let cam = CameraModel::new(
        opts.theta.unwrap_or(c.theta),
        opts.phi.unwrap_or(c.phi),
        c.width,
        c.height,
        opts.h_c.unwrap_or(c.h_c),
    )?;
    scene.with_camera(cam)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct CheckReport {
    x: f64,
    y: f64,
    h_c: f64,
    in_rnh: bool,
    in_rnv: bool,
    in_rna: bool,
    margins: PixelMargins,
    min_margin_px: f64,
    pose: PanTiltPose,
}

/// Runs one command. Returns the paths written, in order.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let opts = &cli.opts;
    if !(opts.arc_tol > 0.0 && opts.arc_tol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "arc tolerance must be positive, got {}",
            opts.arc_tol
        )));
    }
    let scene = load_scene(opts)?;
    let regions = build_regions(&scene, opts.arc_tol)?;
    std::fs::create_dir_all(&opts.out)?;
    let out = |name: &str| opts.out.join(name);
    let search = PoseSearch::default();
    let mut written = Vec::new();

    match &cli.command {
        Command::Region { m_per_px } => {
            check_scale(*m_per_px)?;
            let json = out("region.json");
            write_json(&regions.rna.export(), &json)?;
            let svg = out("region.svg");
            std::fs::write(&svg, render_svg(&scene, &regions.rna, None, *m_per_px))?;
            written.extend([json, svg]);
        }
        Command::Check { x, y } => {
            let report = check(&scene, &regions, *x, *y, &search)?;
            let path = out("check.json");
            write_json(&report, &path)?;
            println!("{}", serde_json::to_string(&report)?);
            written.push(path);
        }
        Command::Simulate { path, dt } => {
            let traj = Trajectory::load(path)?;
            let records = simulate(&traj, &scene, &regions.rna, *dt, &search)?;
            let csv = out("trace.csv");
            write_trace_csv(&records, &csv)?;
            written.push(csv);
        }
        Command::Plan {
            x0,
            y0,
            x1,
            y1,
            clearance,
            speed,
            dt,
            m_per_px,
        } => {
            check_scale(*m_per_px)?;
            let traj = plan_boundary_path(
                &Vec3::new(*x0, *y0, 0.0),
                &Vec3::new(*x1, *y1, 0.0),
                &regions.rna,
                *clearance,
                *speed,
            )?;
            let plan = out("plan.json");
            write_trajectory_json(&traj, &plan)?;
            let records = simulate(&traj, &scene, &regions.rna, *dt, &search)?;
            let csv = out("plan_trace.csv");
            write_trace_csv(&records, &csv)?;
            let svg = out("plan.svg");
            std::fs::write(&svg, render_svg(&scene, &regions.rna, Some(&traj.points()), *m_per_px))?;
            written.extend([plan, csv, svg]);
        }
        Command::OracleCompare {
            grid,
            window,
            x0,
            y0,
            jitter,
            seed,
            band,
        } => {
            if *grid == 0 || !(*window > 0.0 && window.is_finite()) {
                return Err(Error::InvalidInput("grid and window must be positive".into()));
            }
            if !(0.0..=1.0).contains(jitter) {
                return Err(Error::InvalidInput(format!("jitter must lie in [0, 1], got {jitter}")));
            }
            let mut spec = GridSpec::centered_on(&regions.rna, *window, *grid);
            spec.x0 = x0.unwrap_or(spec.x0);
            spec.y0 = y0.unwrap_or(spec.y0);
            spec.jitter = *jitter;
            spec.seed = *seed;
            let (samples, summary) = oracle_compare(&scene, &regions.rna, &spec, &search, *band);
            let csv = out("oracle_grid.csv");
            write_grid_csv(&samples, &csv)?;
            let json = out("oracle_summary.json");
            write_summary_json(&summary, &json)?;
            log::info!(
                "agreement {:.4}, missed {} ({} beyond {} cells)",
                summary.agreement,
                summary.missed,
                summary.missed_beyond_band,
                band
            );
            written.extend([csv, json]);
        }
    }
    Ok(written)
}

fn check_scale(m_per_px: f64) -> Result<()> {
    if m_per_px > 0.0 && m_per_px.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("scale must be positive, got {m_per_px}")))
    }
}

fn check(scene: &Scene, regions: &Regions, x: f64, y: f64, search: &PoseSearch) -> Result<CheckReport> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidInput("position must be finite".into()));
    }
    let h_c = scene.camera.h_c;
    let (pose, margins) = PoseSearcher::new(scene, search).best(&Vec3::new(x, y, h_c));
    let in_rnh = regions.rnh().contains_xy(x, y);
    let in_rnv = regions.rnv().contains_xy(x, y);
    Ok(CheckReport {
        x,
        y,
        h_c,
        in_rnh,
        in_rnv,
        in_rna: in_rnh || in_rnv,
        margins,
        min_margin_px: margins.min(),
        pose,
    })
}
