//! Grid comparison of the analytic no-view region against the pinhole
//! oracle.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::camera::{faces_all_markers, PoseSearch, PoseSearcher};
use crate::error::Result;
use crate::format::sig6;
use crate::region::RnaRegion;
use crate::scene::{Scene, Vec3};

/// Square window of positions sampled at cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x0: f64,
    pub y0: f64,
    pub size: f64,
    pub n: usize,
    /// Random offset of each sample, as a fraction of the cell width.
    pub jitter: f64,
    pub seed: u64,
}

impl GridSpec {
    /// A `size` x `size` window centered on the bounding box of the region.
    pub fn centered_on(rna: &RnaRegion, size: f64, n: usize) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in rna.rings.iter().flatten() {
            lo = [lo[0].min(p.x), lo[1].min(p.y)];
            hi = [hi[0].max(p.x), hi[1].max(p.y)];
        }
        let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        Self {
            x0: c[0] - size / 2.0,
            y0: c[1] - size / 2.0,
            size,
            n,
            jitter: 0.0,
            seed: 0,
        }
    }

    pub fn cell(&self) -> f64 {
        self.size / self.n as f64
    }

    /// Sample positions in row-major order (y outer, x inner).
    pub fn positions(&self) -> Vec<(f64, f64)> {
        let h = self.cell();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.n * self.n);
        for j in 0..self.n {
            for i in 0..self.n {
                let (mut x, mut y) = (self.x0 + (i as f64 + 0.5) * h, self.y0 + (j as f64 + 0.5) * h);
                if self.jitter > 0.0 {
                    x += rng.random_range(-0.5..0.5) * self.jitter * h;
                    y += rng.random_range(-0.5..0.5) * self.jitter * h;
                }
                out.push((x, y));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSample {
    pub x: f64,
    pub y: f64,
    /// Whether every marker faces this position. Samples behind a marker
    /// are reported but left out of the summary.
    pub facing: bool,
    pub analytic_in_rna: bool,
    pub oracle_visible: bool,
    pub min_margin_px: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareSummary {
    pub grid: GridSpec,
    /// Samples in front of every marker; the rest are not scored.
    pub samples: usize,
    pub behind_markers: usize,
    pub in_rna: usize,
    pub oracle_infeasible: usize,
    /// Fraction of samples where the region and the oracle agree.
    pub agreement: f64,
    /// Inside the region but visible to the oracle (the region is
    /// conservative there).
    pub conservative_excess: usize,
    /// Outside the region yet infeasible for the oracle.
    pub missed: usize,
    /// Largest Chebyshev distance, in cells, from a missed sample to the
    /// nearest in-region sample. Zero when nothing is missed.
    pub missed_band_cells: usize,
    /// Missed samples farther than `band_limit_cells` from the region.
    pub missed_beyond_band: usize,
    pub band_limit_cells: usize,
}

pub fn oracle_compare(
    scene: &Scene,
    rna: &RnaRegion,
    grid: &GridSpec,
    search: &PoseSearch,
    band_limit_cells: usize,
) -> (Vec<GridSample>, CompareSummary) {
    let h_c = scene.camera.h_c;
    let searcher = PoseSearcher::new(scene, search);
    let samples: Vec<GridSample> = grid
        .positions()
        .into_par_iter()
        .map(|(x, y)| {
            let p = Vec3::new(x, y, h_c);
            let (_, m) = searcher.best(&p);
            let facing = faces_all_markers(&p, scene);
            GridSample {
                x,
                y,
                facing,
                analytic_in_rna: rna.contains_xy(x, y),
                oracle_visible: facing && m.visible(),
                min_margin_px: m.min(),
            }
        })
        .collect();
    let summary = summarize(&samples, grid, band_limit_cells);
    (samples, summary)
}

fn summarize(samples: &[GridSample], grid: &GridSpec, band_limit_cells: usize) -> CompareSummary {
    let n = grid.n;
    let scored: Vec<(usize, &GridSample)> = samples.iter().enumerate().filter(|(_, s)| s.facing).collect();
    let in_rna: Vec<(usize, usize)> = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.analytic_in_rna)
        .map(|(k, _)| (k % n, k / n))
        .collect();
    let mut missed = 0;
    let mut band = 0;
    let mut beyond = 0;
    for &(k, s) in &scored {
        if s.analytic_in_rna || s.oracle_visible {
            continue;
        }
        missed += 1;
        let (i, j) = (k % n, k / n);
        let dist = in_rna
            .iter()
            .map(|&(a, b)| a.abs_diff(i).max(b.abs_diff(j)))
            .min()
            .unwrap_or(usize::MAX);
        band = band.max(dist);
        if dist > band_limit_cells {
            beyond += 1;
        }
    }
    let count = |f: &dyn Fn(&GridSample) -> bool| scored.iter().filter(|(_, s)| f(s)).count();
    let agree = count(&|s| s.analytic_in_rna != s.oracle_visible);
    CompareSummary {
        grid: *grid,
        samples: scored.len(),
        behind_markers: samples.len() - scored.len(),
        in_rna: count(&|s| s.analytic_in_rna),
        oracle_infeasible: count(&|s| !s.oracle_visible),
        agreement: agree as f64 / scored.len().max(1) as f64,
        conservative_excess: count(&|s| s.analytic_in_rna && s.oracle_visible),
        missed,
        missed_band_cells: band,
        missed_beyond_band: beyond,
        band_limit_cells,
    }
}

pub fn write_grid_csv(samples: &[GridSample], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "analytic_in_rna", "oracle_visible", "min_margin_px"])?;
    for s in samples {
        w.write_record([
            sig6(s.x),
            sig6(s.y),
            u8::from(s.analytic_in_rna).to_string(),
            u8::from(s.oracle_visible).to_string(),
            sig6(s.min_margin_px),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_json(summary: &CompareSummary, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, summary)?;
    writeln!(f)?;
    Ok(())
}
