//! Polar discretization of ray space and resampling of plenoptic rasters.
//!
//! Both radii are discretized to integers and the angle of ring `R` is split
//! into `7R + 1` equal bins, so block `(R1, R2)` of a [`PolarLightfield`]
//! holds `(7R1 + 1) × (7R2 + 1)` samples (θ1 along rows, θ2 along columns).
//!
//! Captured rasters are read with nearest-neighbour lookup. A fractional
//! angular coordinate `u` is split into the nearest captured microimage
//! `round(u)` and a residual `δu`; the residual is absorbed by moving the
//! spatial coordinate by `shift · δu` pixels along the epipolar line.

mod render;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coords::{ray_from_polar, PolarPoint, Ray};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::RadianceField;
use crate::raster::{luminance, Raster};

pub use render::{
    block_color, layout_size, render_colormap, render_coordinate_map_original,
    render_polar_layout, CoordinateMap, GRAY_LEVEL,
};

/// Number of angular bins on ring `r`.
pub const fn angular_bins(r: usize) -> usize {
    7 * r + 1
}

/// Angle of bin `k` on ring `r`, taken at the bin's left edge.
pub fn bin_center_angle(r: usize, k: usize) -> Result<f64> {
    let bins = angular_bins(r);
    if k >= bins {
        return Err(Error::BinOutOfRange { radius: r, k, bins });
    }
    Ok(TAU * k as f64 / bins as f64)
}

/// Direction of the shift correction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ShiftSign {
    #[default]
    Positive,
    Negative,
}

impl ShiftSign {
    pub fn factor(self) -> f64 {
        match self {
            ShiftSign::Positive => 1.0,
            ShiftSign::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            ShiftSign::Positive => ShiftSign::Negative,
            ShiftSign::Negative => ShiftSign::Positive,
        }
    }
}

/// Layout of a plenoptic raster: a grid of equally sized microimages.
#[derive(Clone, Debug, PartialEq)]
pub struct LightfieldGeometry {
    pub microimage_cols: usize,
    pub microimage_rows: usize,
    pub pitch_x: usize,
    pub pitch_y: usize,
    /// Microimage `(u0, v0)` holding the coordinate origin.
    pub ref_micro: (usize, usize),
    /// Pixel `(x0, y0)` within the reference microimage.
    pub ref_pixel: (usize, usize),
    /// Epipolar shift in pixels per unit of `u` (and `v`).
    pub shift: f64,
    pub shift_sign: ShiftSign,
}

impl LightfieldGeometry {
    pub fn new(
        microimage_cols: usize,
        microimage_rows: usize,
        pitch_x: usize,
        pitch_y: usize,
        ref_micro: (usize, usize),
        ref_pixel: (usize, usize),
        shift: f64,
    ) -> Result<Self> {
        let g = LightfieldGeometry {
            microimage_cols,
            microimage_rows,
            pitch_x,
            pitch_y,
            ref_micro,
            ref_pixel,
            shift,
            shift_sign: ShiftSign::Positive,
        };
        g.validate()?;
        Ok(g)
    }

    /// Reference point at the central pixel of the central microimage.
    pub fn centered(cols: usize, rows: usize, pitch_x: usize, pitch_y: usize, shift: f64) -> Result<Self> {
        Self::new(cols, rows, pitch_x, pitch_y, (cols / 2, rows / 2), (pitch_x / 2, pitch_y / 2), shift)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGeometry(m));
        if self.microimage_cols == 0 || self.microimage_rows == 0 {
            return bad("microimage grid must be at least 1x1".into());
        }
        if self.pitch_x == 0 || self.pitch_y == 0 {
            return bad("pitch must be at least 1 pixel".into());
        }
        if self.ref_micro.0 >= self.microimage_cols || self.ref_micro.1 >= self.microimage_rows {
            return bad(format!("reference microimage {:?} outside grid", self.ref_micro));
        }
        if self.ref_pixel.0 >= self.pitch_x || self.ref_pixel.1 >= self.pitch_y {
            return bad(format!("reference pixel {:?} outside microimage", self.ref_pixel));
        }
        if !(self.shift.is_finite() && self.shift >= 0.0) {
            return bad(format!("shift must be finite and >= 0, got {}", self.shift));
        }
        Ok(())
    }

    pub fn with_shift(mut self, shift: f64, sign: ShiftSign) -> Result<Self> {
        self.shift = shift;
        self.shift_sign = sign;
        self.validate()?;
        Ok(self)
    }

    /// `(width, height)` of the full raster in pixels.
    pub fn raster_size(&self) -> (usize, usize) {
        (self.microimage_cols * self.pitch_x, self.microimage_rows * self.pitch_y)
    }

    fn signed_shift(&self) -> f64 {
        self.shift * self.shift_sign.factor()
    }

    /// Raster pixel `(col, row)` read for `ray`, or `None` when the ray
    /// leaves the captured microimages.
    ///
    /// A pixel index that falls outside its microimage counts as out of
    /// bounds: the neighbouring microimage samples a different ray bundle.
    pub fn resolve_pixel(&self, ray: Ray) -> Option<(usize, usize)> {
        let s = self.signed_shift();
        let (mu, px) = resolve_axis(ray.u, ray.x, s, self.ref_micro.0, self.ref_pixel.0)?;
        let (mv, py) = resolve_axis(ray.v, ray.y, s, self.ref_micro.1, self.ref_pixel.1)?;
        if mu >= self.microimage_cols || mv >= self.microimage_rows || px >= self.pitch_x || py >= self.pitch_y {
            return None;
        }
        Some((mu * self.pitch_x + px, mv * self.pitch_y + py))
    }
}

/// Splits one angular/spatial coordinate pair into (microimage, pixel)
/// indices; `None` when either goes negative or is not representable.
fn resolve_axis(angular: f64, spatial: f64, shift: f64, ref_micro: usize, ref_pixel: usize) -> Option<(usize, usize)> {
    let micro = angular.round();
    let residual = angular - micro;
    let pixel = (spatial + shift * residual).round();
    let m = ref_micro as f64 + micro;
    let p = ref_pixel as f64 + pixel;
    // also rejects NaN
    if !(m >= 0.0 && p >= 0.0 && m < 1e15 && p < 1e15) {
        return None;
    }
    Some((m as usize, p as usize))
}

/// A captured (or synthesized) raster together with its geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteLightfield {
    geometry: LightfieldGeometry,
    raster: Raster,
}

impl DiscreteLightfield {
    pub fn new(geometry: LightfieldGeometry, raster: Raster) -> Result<Self> {
        geometry.validate()?;
        let (w, h) = geometry.raster_size();
        if (raster.width, raster.height) != (w, h) {
            return Err(Error::InvalidGeometry(format!(
                "raster is {}x{} but geometry implies {w}x{h}",
                raster.width, raster.height
            )));
        }
        if raster.channels != 1 && raster.channels != 3 {
            return Err(Error::InvalidArgument(format!(
                "raster must have 1 or 3 channels, got {}",
                raster.channels
            )));
        }
        Ok(DiscreteLightfield { geometry, raster })
    }

    pub fn geometry(&self) -> &LightfieldGeometry {
        &self.geometry
    }

    pub fn raster(&self) -> &Raster {
        &self.raster
    }

    pub fn into_raster(self) -> Raster {
        self.raster
    }

    /// Same raster, different shift configuration.
    pub fn with_shift(&self, shift: f64, sign: ShiftSign) -> Result<Self> {
        Ok(DiscreteLightfield {
            geometry: self.geometry.clone().with_shift(shift, sign)?,
            raster: self.raster.clone(),
        })
    }
}

/// Nearest-neighbour, shift-corrected lookup. `None` is the out-of-bounds
/// marker.
pub fn sample_ray_nn(lf: &DiscreteLightfield, ray: Ray) -> Option<&[f64]> {
    lf.geometry
        .resolve_pixel(ray)
        .map(|(col, row)| lf.raster.pixel(col, row))
}

/// Anything that can be read at a continuous ray.
pub trait RaySampler: Sync {
    fn channels(&self) -> usize;

    /// Writes the channel values seen along `ray` into `out`; returns
    /// `false` when the ray is outside the data.
    fn sample_into(&self, ray: Ray, out: &mut [f64]) -> bool;
}

impl RaySampler for DiscreteLightfield {
    fn channels(&self) -> usize {
        self.raster.channels
    }

    fn sample_into(&self, ray: Ray, out: &mut [f64]) -> bool {
        match sample_ray_nn(self, ray) {
            Some(px) => {
                out.copy_from_slice(px);
                true
            }
            None => false,
        }
    }
}

/// Direct evaluation of a continuous field; never out of bounds.
pub struct Analytic<'a, F: ?Sized>(pub &'a F);

impl<F: RadianceField + ?Sized> RaySampler for Analytic<'_, F> {
    fn channels(&self) -> usize {
        1
    }

    fn sample_into(&self, ray: Ray, out: &mut [f64]) -> bool {
        out[0] = self.0.radiance(ray);
        true
    }
}

/// Geometry-only sampler: reads 1 wherever a pixel exists, used to derive
/// validity masks without pixel data.
pub struct Coverage<'a>(pub &'a LightfieldGeometry);

impl RaySampler for Coverage<'_> {
    fn channels(&self) -> usize {
        1
    }

    fn sample_into(&self, ray: Ray, out: &mut [f64]) -> bool {
        out[0] = 1.0;
        self.0.resolve_pixel(ray).is_some()
    }
}

/// Parameters of the polar resampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarGridParams {
    pub r1max: usize,
    pub r2max: usize,
    /// Ray-space length of one radial step.
    pub rho: f64,
    /// Sub-samples per bin along each angle; the bin value is the mean of
    /// `oversample²` sub-samples.
    pub oversample: usize,
    /// Seed for random sub-sample offsets; `None` places sub-samples on a
    /// regular sub-grid starting at the bin edge.
    pub jitter: Option<u64>,
}

impl PolarGridParams {
    pub fn new(r1max: usize, r2max: usize) -> Self {
        PolarGridParams {
            r1max,
            r2max,
            rho: 1.0,
            oversample: 1,
            jitter: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("rho must be > 0, got {}", self.rho)));
        }
        if self.oversample == 0 {
            return Err(Error::InvalidArgument("oversample must be >= 1".into()));
        }
        Ok(())
    }

    /// Sub-sample angles `(θ, sub-bin index)` for every bin of ring `r`,
    /// flattened as `k * oversample + j`.
    fn ring_angles(&self, r: usize, rng: Option<&mut ChaCha8Rng>) -> Vec<f64> {
        let bins = angular_bins(r) as f64;
        let os = self.oversample;
        let offsets: Vec<f64> = match rng {
            Some(rng) => (0..angular_bins(r) * os)
                .map(|i| ((i % os) as f64 + rng.random::<f64>()) / os as f64)
                .collect(),
            None => (0..angular_bins(r) * os)
                .map(|i| (i % os) as f64 / os as f64)
                .collect(),
        };
        offsets
            .iter()
            .enumerate()
            .map(|(i, off)| TAU * ((i / os) as f64 + off) / bins)
            .collect()
    }
}

/// One `(R1, R2)` microimage of the polar representation.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarBlock {
    r1: usize,
    r2: usize,
    channels: usize,
    values: Vec<f32>,
    mask: Vec<bool>,
}

impl PolarBlock {
    pub fn new(r1: usize, r2: usize, channels: usize, values: Vec<f32>, mask: Vec<bool>) -> Result<Self> {
        let n = angular_bins(r1) * angular_bins(r2);
        if mask.len() != n || values.len() != n * channels {
            return Err(Error::InvalidArgument(format!(
                "block ({r1}, {r2}) needs {n} bins x {channels} channels, got {} values / {} mask bits",
                values.len(),
                mask.len()
            )));
        }
        Ok(PolarBlock {
            r1,
            r2,
            channels,
            values,
            mask,
        })
    }

    pub fn radii(&self) -> (usize, usize) {
        (self.r1, self.r2)
    }

    /// θ1 bins.
    pub fn rows(&self) -> usize {
        angular_bins(self.r1)
    }

    /// θ2 bins.
    pub fn cols(&self) -> usize {
        angular_bins(self.r2)
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn value(&self, i: usize) -> &[f32] {
        &self.values[i * self.channels..(i + 1) * self.channels]
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn luminance(&self, i: usize) -> f64 {
        let px: Vec<f64> = self.value(i).iter().map(|&v| v as f64).collect();
        luminance(&px)
    }
}

/// All blocks `(R1, R2)` for `R1 ≤ r1max`, `R2 ≤ r2max`, stored R1-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarLightfield {
    r1max: usize,
    r2max: usize,
    channels: usize,
    blocks: Vec<PolarBlock>,
}

impl PolarLightfield {
    pub fn from_blocks(r1max: usize, r2max: usize, channels: usize, blocks: Vec<PolarBlock>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidArgument(format!("channel count must be 1 or 3, got {channels}")));
        }
        if blocks.len() != (r1max + 1) * (r2max + 1) {
            return Err(Error::InvalidArgument(format!(
                "expected {} blocks, got {}",
                (r1max + 1) * (r2max + 1),
                blocks.len()
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.radii() != (i / (r2max + 1), i % (r2max + 1)) || b.channels != channels {
                return Err(Error::InvalidArgument(format!("block {i} out of order or wrong channel count")));
            }
        }
        Ok(PolarLightfield {
            r1max,
            r2max,
            channels,
            blocks,
        })
    }

    pub fn r1max(&self) -> usize {
        self.r1max
    }

    pub fn r2max(&self) -> usize {
        self.r2max
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn blocks(&self) -> &[PolarBlock] {
        &self.blocks
    }

    pub fn block(&self, r1: usize, r2: usize) -> Option<&PolarBlock> {
        (r1 <= self.r1max && r2 <= self.r2max).then(|| &self.blocks[r1 * (self.r2max + 1) + r2])
    }
}

/// The continuous ray probed by bin sub-sample angles at radii `(r1, r2)`.
pub fn bin_ray(theta1: f64, theta2: f64, r1: usize, r2: usize, rho: f64) -> Ray {
    ray_from_polar(PolarPoint::new(theta1, theta2, r1 as f64 * rho, r2 as f64 * rho))
}

/// Resamples `sampler` onto the polar grid.
pub fn to_polar_grid<S: RaySampler + ?Sized>(sampler: &S, params: &PolarGridParams) -> Result<PolarLightfield> {
    to_polar_grid_with(sampler, params, Exec::default())
}

pub fn to_polar_grid_with<S: RaySampler + ?Sized>(
    sampler: &S,
    params: &PolarGridParams,
    exec: Exec,
) -> Result<PolarLightfield> {
    params.validate()?;
    let stride = params.r2max + 1;
    let n_blocks = (params.r1max + 1) * stride;
    let blocks = exec.map_range(n_blocks, |i| polar_block(sampler, params, i / stride, i % stride, i as u64));
    PolarLightfield::from_blocks(params.r1max, params.r2max, sampler.channels(), blocks)
}

fn polar_block<S: RaySampler + ?Sized>(
    sampler: &S,
    params: &PolarGridParams,
    r1: usize,
    r2: usize,
    stream: u64,
) -> PolarBlock {
    let mut rng = params.jitter.map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    });
    let a1 = params.ring_angles(r1, rng.as_mut());
    let a2 = params.ring_angles(r2, rng.as_mut());
    let os = params.oversample;
    let ch = sampler.channels();
    let (n1, n2) = (angular_bins(r1), angular_bins(r2));
    let mut values = vec![0f32; n1 * n2 * ch];
    let mut mask = vec![false; n1 * n2];
    let mut acc = vec![0.0; ch];
    let mut px = vec![0.0; ch];
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            acc.iter_mut().for_each(|a| *a = 0.0);
            let mut valid = true;
            'sub: for &t1 in &a1[k1 * os..(k1 + 1) * os] {
                for &t2 in &a2[k2 * os..(k2 + 1) * os] {
                    if !sampler.sample_into(bin_ray(t1, t2, r1, r2, params.rho), &mut px) {
                        valid = false;
                        break 'sub;
                    }
                    acc.iter_mut().zip(&px).for_each(|(a, p)| *a += p);
                }
            }
            let bin = k1 * n2 + k2;
            if valid {
                let norm = (os * os) as f64;
                for (c, a) in acc.iter().enumerate() {
                    values[bin * ch + c] = (a / norm) as f32;
                }
                mask[bin] = true;
            }
        }
    }
    PolarBlock {
        r1,
        r2,
        channels: ch,
        values,
        mask,
    }
}

/// Rays `(x − s·t, y, u + t, v)` for `t = j / steps`, `j = 0..steps`: the
/// line along which a scene point at depth `s` keeps its radiance.
pub fn epipolar_walk(start: Ray, slope: f64, steps: usize) -> Vec<Ray> {
    (0..steps)
        .map(|j| {
            let t = j as f64 / steps as f64;
            Ray::new(start.x - slope * t, start.y, start.u + t, start.v)
        })
        .collect()
}

/// Population variance of the luminance read along `rays`; `None` if any
/// ray is out of bounds.
pub fn walk_variance(lf: &DiscreteLightfield, rays: &[Ray]) -> Option<f64> {
    let vals: Vec<f64> = rays
        .iter()
        .map(|&r| sample_ray_nn(lf, r).map(luminance))
        .collect::<Option<_>>()?;
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    Some(vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n)
}

/// Picks the shift sign under which length-`steps` epipolar walks from
/// `starts` read the most constant values.
///
/// Returns `None` if no walk stays in bounds under both signs.
pub fn select_shift_sign(lf: &DiscreteLightfield, starts: &[Ray], steps: usize) -> Option<ShiftSign> {
    let shift = lf.geometry.shift;
    let score = |sign: ShiftSign| -> Option<(f64, usize)> {
        let view = lf.with_shift(shift, sign).ok()?;
        let slope = shift * sign.factor();
        let mut total = 0.0;
        let mut used = 0;
        for &s in starts {
            if let Some(v) = walk_variance(&view, &epipolar_walk(s, slope, steps)) {
                total += v;
                used += 1;
            }
        }
        Some((total, used))
    };
    let (pos, npos) = score(ShiftSign::Positive)?;
    let (neg, nneg) = score(ShiftSign::Negative)?;
    if npos == 0 || nneg == 0 {
        return None;
    }
    let pos = pos / npos as f64;
    let neg = neg / nneg as f64;
    Some(if pos <= neg { ShiftSign::Positive } else { ShiftSign::Negative })
}
