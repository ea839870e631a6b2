//! Image renderings of polar lightfields and of their sampling pattern.

use super::{angular_bins, bin_ray, LightfieldGeometry, PolarGridParams, PolarLightfield};
use crate::raster::Raster;

/// 8-bit level used for samples outside the captured raster.
pub const GRAY_LEVEL: u8 = 128;

fn level(v: u8) -> f64 {
    v as f64 / 255.0
}

/// `(width, height)` of the block layout.
pub fn layout_size(r1max: usize, r2max: usize, separators: bool) -> (usize, usize) {
    let sep = usize::from(separators);
    let width = (0..=r2max).map(angular_bins).sum::<usize>() + sep * r2max;
    let height = (0..=r1max).map(angular_bins).sum::<usize>() + sep * r1max;
    (width, height)
}

/// Top-left pixel offsets of every block row (R1) and column (R2).
fn block_origins(rmax: usize, separators: bool) -> Vec<usize> {
    let sep = usize::from(separators);
    (0..=rmax)
        .scan(0, |at, r| {
            let start = *at;
            *at += angular_bins(r) + sep;
            Some(start)
        })
        .collect()
}

/// Staircase layout: R1 grows downward, R2 rightward; inside a block θ1
/// indexes rows and θ2 columns. Invalid bins are gray, separators black.
pub fn render_polar_layout(pl: &PolarLightfield, separators: bool) -> Raster {
    let (w, h) = layout_size(pl.r1max(), pl.r2max(), separators);
    let ch = pl.channels();
    let mut img = Raster::new(w, h, ch);
    let rows = block_origins(pl.r1max(), separators);
    let cols = block_origins(pl.r2max(), separators);
    let gray = vec![level(GRAY_LEVEL); ch];
    for block in pl.blocks() {
        let (r1, r2) = block.radii();
        let mut px = vec![0.0; ch];
        for k1 in 0..block.rows() {
            for k2 in 0..block.cols() {
                let i = k1 * block.cols() + k2;
                let (c, r) = (cols[r2] + k2, rows[r1] + k1);
                if block.is_valid(i) {
                    for (p, v) in px.iter_mut().zip(block.value(i)) {
                        *p = *v as f64;
                    }
                    img.set_pixel(c, r, &px);
                } else {
                    img.set_pixel(c, r, &gray);
                }
            }
        }
    }
    img
}

/// Fill color of block `(r1, r2)`: red tracks R2, green tracks R1.
pub fn block_color(r1: usize, r2: usize, r1max: usize, r2max: usize) -> [u8; 3] {
    let tone = |r: usize, rmax: usize| (255.0 * (r + 1) as f64 / (rmax + 1) as f64).round() as u8;
    [tone(r2, r2max), tone(r1, r1max), 0]
}

/// Color-coded block layout: each block in its `(R1, R2)` color, invalid
/// bins gray.
pub fn render_colormap(pl: &PolarLightfield) -> Raster {
    let (w, h) = layout_size(pl.r1max(), pl.r2max(), false);
    let mut img = Raster::new(w, h, 3);
    let rows = block_origins(pl.r1max(), false);
    let cols = block_origins(pl.r2max(), false);
    let gray = [level(GRAY_LEVEL); 3];
    for block in pl.blocks() {
        let (r1, r2) = block.radii();
        let color = block_color(r1, r2, pl.r1max(), pl.r2max()).map(level);
        for k1 in 0..block.rows() {
            for k2 in 0..block.cols() {
                let valid = block.is_valid(k1 * block.cols() + k2);
                img.set_pixel(cols[r2] + k2, rows[r1] + k1, if valid { &color } else { &gray });
            }
        }
    }
    img
}

/// Sampling pattern drawn back into the original raster layout.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateMap {
    pub image: Raster,
    /// Writes that overwrote a pixel already claimed by a different bin.
    pub collisions: usize,
    /// Pixels colored at least once.
    pub covered: usize,
}

impl CoordinateMap {
    /// Per-pixel coverage flags in raster order.
    pub fn coverage_mask(&self) -> Vec<bool> {
        self.image
            .data
            .chunks(3)
            .map(|p| p.iter().any(|&v| v != 0.0))
            .collect()
    }
}

/// Colors every raster pixel read by a polar bin with that bin's block
/// color. Bins are visited in `(R1, R2, k1, k2)` order and later bins
/// overwrite earlier ones; pixels no bin reads stay black.
pub fn render_coordinate_map_original(geom: &LightfieldGeometry, params: &PolarGridParams) -> CoordinateMap {
    let (w, h) = geom.raster_size();
    let mut image = Raster::new(w, h, 3);
    let mut owner: Vec<Option<(usize, usize, usize, usize)>> = vec![None; w * h];
    let mut collisions = 0;
    let os = params.oversample;
    for r1 in 0..=params.r1max {
        let a1 = params.ring_angles(r1, None);
        for r2 in 0..=params.r2max {
            let a2 = params.ring_angles(r2, None);
            let color = block_color(r1, r2, params.r1max, params.r2max).map(level);
            for k1 in 0..angular_bins(r1) {
                for k2 in 0..angular_bins(r2) {
                    let id = (r1, r2, k1, k2);
                    for &t1 in &a1[k1 * os..(k1 + 1) * os] {
                        for &t2 in &a2[k2 * os..(k2 + 1) * os] {
                            let Some((c, r)) = geom.resolve_pixel(bin_ray(t1, t2, r1, r2, params.rho)) else {
                                continue;
                            };
                            let slot = &mut owner[r * w + c];
                            if matches!(slot, Some(prev) if *prev != id) {
                                collisions += 1;
                            }
                            *slot = Some(id);
                            image.set_pixel(c, r, &color);
                        }
                    }
                }
            }
        }
    }
    let covered = owner.iter().filter(|o| o.is_some()).count();
    CoordinateMap {
        image,
        collisions,
        covered,
    }
}
