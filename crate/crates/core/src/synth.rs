//! Ground-truth radiance from scenes of isotropic Gaussian emitters.
//!
//! A ray `(x, y, u, v)` visits the points `(x + u z, y + v z, z)`. For an
//! emitter `f(p) = A · exp(−|p − c|² / σ²)` the line integral over `z` has
//! the closed form
//!
//! ```text
//! r = A · σ √(π / a) · exp(−(C − B² / a) / σ²)
//! a = 1 + u² + v²
//! B = u (c_x − x) + v (c_y − y) + c_z
//! C = (x − c_x)² + (y − c_y)² + c_z²
//! ```
//!
//! obtained by completing the square in `z`. [`radiance_quadrature`] is the
//! independent check: composite Simpson on a truncated `z` interval.

use std::f64::consts::PI;

use crate::coords::Ray;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::RadianceField;
use crate::raster::Raster;
use crate::resample::{DiscreteLightfield, LightfieldGeometry};

/// One isotropic Gaussian emitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBlob {
    pub center: [f64; 3],
    pub sigma: f64,
    pub amplitude: f64,
}

impl GaussianBlob {
    pub fn new(center: [f64; 3], sigma: f64, amplitude: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma must be > 0, got {sigma}")));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "amplitude must be > 0, got {amplitude}"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("blob center must be finite".into()));
        }
        Ok(GaussianBlob {
            center,
            sigma,
            amplitude,
        })
    }

    /// Emitter density at a point.
    pub fn density(&self, p: [f64; 3]) -> f64 {
        let [a, b, c] = self.center;
        let d2 = (p[0] - a).powi(2) + (p[1] - b).powi(2) + (p[2] - c).powi(2);
        self.amplitude * (-d2 / (self.sigma * self.sigma)).exp()
    }

    /// Exact line integral of this emitter along `ray`.
    pub fn line_integral(&self, ray: Ray) -> f64 {
        let [a, b, c] = self.center;
        let Ray { x, y, u, v } = ray;
        let quad = 1.0 + u * u + v * v;
        let lin = u * (a - x) + v * (b - y) + c;
        let dx = x - a;
        let dy = y - b;
        let konst = dx * dx + dy * dy + c * c;
        // squared distance from the center to the ray's closest point,
        // clamped against cancellation
        let miss = (konst - lin * lin / quad).max(0.0);
        let s2 = self.sigma * self.sigma;
        self.amplitude * self.sigma * (PI / quad).sqrt() * (-miss / s2).exp()
    }

    pub fn translated(&self, by: [f64; 3]) -> Self {
        GaussianBlob {
            center: [
                self.center[0] + by[0],
                self.center[1] + by[1],
                self.center[2] + by[2],
            ],
            ..*self
        }
    }
}

/// A non-empty set of emitters.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    blobs: Vec<GaussianBlob>,
}

impl Scene {
    pub fn new(blobs: Vec<GaussianBlob>) -> Result<Self> {
        if blobs.is_empty() {
            return Err(Error::InvalidArgument("scene must contain at least one blob".into()));
        }
        Ok(Scene { blobs })
    }

    pub fn single(blob: GaussianBlob) -> Self {
        Scene { blobs: vec![blob] }
    }

    /// Unit emitter at the origin: `σ = 1`, amplitude 1.
    pub fn unit() -> Self {
        Scene::single(GaussianBlob {
            center: [0.0; 3],
            sigma: 1.0,
            amplitude: 1.0,
        })
    }

    /// The three-blob, mixed-depth scene shipped in `fixtures/fixture.scene`.
    pub fn fixture() -> Self {
        crate::io::parse_scene(FIXTURE_SCENE).expect("bundled fixture scene parses")
    }

    pub fn blobs(&self) -> &[GaussianBlob] {
        &self.blobs
    }

    pub fn max_sigma(&self) -> f64 {
        self.blobs.iter().map(|b| b.sigma).fold(0.0, f64::max)
    }

    pub fn max_center_norm(&self) -> f64 {
        self.blobs
            .iter()
            .map(|b| b.center.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Truncation half-width used by the quadrature oracle.
    pub fn oracle_half_width(&self) -> f64 {
        12.0 * self.max_sigma() + self.max_center_norm()
    }

    pub fn density(&self, p: [f64; 3]) -> f64 {
        self.blobs.iter().map(|b| b.density(p)).sum()
    }

    pub fn scaled(&self, k: f64) -> Result<Scene> {
        Scene::new(
            self.blobs
                .iter()
                .map(|b| GaussianBlob::new(b.center, b.sigma, b.amplitude * k))
                .collect::<Result<_>>()?,
        )
    }

    pub fn translated(&self, by: [f64; 3]) -> Scene {
        Scene {
            blobs: self.blobs.iter().map(|b| b.translated(by)).collect(),
        }
    }

    /// Concatenation of two scenes.
    pub fn union(&self, other: &Scene) -> Scene {
        Scene {
            blobs: self.blobs.iter().chain(&other.blobs).copied().collect(),
        }
    }
}

pub const FIXTURE_SCENE: &str = include_str!("../fixtures/fixture.scene");

impl RadianceField for Scene {
    fn radiance(&self, ray: Ray) -> f64 {
        radiance_closed_form(self, ray)
    }
}

pub fn radiance_closed_form(scene: &Scene, ray: Ray) -> f64 {
    scene.blobs.iter().map(|b| b.line_integral(ray)).sum()
}

/// Composite Simpson estimate of the line integral over
/// `z ∈ [−half_width, half_width]` with `n_points` nodes (odd, ≥ 3).
pub fn radiance_quadrature(scene: &Scene, ray: Ray, half_width: f64, n_points: usize) -> Result<f64> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "half_width must be > 0, got {half_width}"
        )));
    }
    if n_points < 3 || n_points.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "n_points must be odd and >= 3, got {n_points}"
        )));
    }
    let h = 2.0 * half_width / (n_points - 1) as f64;
    let f = |i: usize| {
        let z = -half_width + i as f64 * h;
        scene.density([ray.x + ray.u * z, ray.y + ray.v * z, z])
    };
    let last = n_points - 1;
    let mut acc = f(0) + f(last);
    for i in 1..last {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
    }
    Ok(acc * h / 3.0)
}

/// Continuous ray seen by raster pixel `(col, row)`: microimage offsets
/// relative to the reference microimage give `(u, v)`, pixel offsets within
/// the microimage relative to the reference pixel give `(x, y)`.
pub fn pixel_ray(geom: &LightfieldGeometry, col: usize, row: usize) -> Ray {
    let (mu, px) = (col / geom.pitch_x, col % geom.pitch_x);
    let (mv, py) = (row / geom.pitch_y, row % geom.pitch_y);
    Ray {
        x: px as f64 - geom.ref_pixel.0 as f64,
        y: py as f64 - geom.ref_pixel.1 as f64,
        u: mu as f64 - geom.ref_micro.0 as f64,
        v: mv as f64 - geom.ref_micro.1 as f64,
    }
}

/// Fills a plenoptic raster with the exact radiance of `field`.
pub fn sample_plenoptic_raster<F: RadianceField + ?Sized>(
    field: &F,
    geom: &LightfieldGeometry,
) -> DiscreteLightfield {
    sample_plenoptic_raster_with(field, geom, Exec::default())
}

pub fn sample_plenoptic_raster_with<F: RadianceField + ?Sized>(
    field: &F,
    geom: &LightfieldGeometry,
    exec: Exec,
) -> DiscreteLightfield {
    let (width, height) = geom.raster_size();
    let mut raster = Raster::new(width, height, 1);
    exec.fill_chunks(&mut raster.data, width, |row, line| {
        for (col, px) in line.iter_mut().enumerate() {
            *px = field.radiance(pixel_ray(geom, col, row));
        }
    });
    DiscreteLightfield::new(geom.clone(), raster).expect("raster shaped from geometry")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn unit_blob_examples() {
        let s = Scene::unit();
        // quadrature reference values: ∫exp(-z²) = √π, ∫exp(-2z²) = √(π/2)
        assert!(rel(radiance_closed_form(&s, Ray::default()), SQRT_PI) < 1e-15);
        assert!(
            rel(radiance_closed_form(&s, Ray::new(1., 0., 0., 0.)), SQRT_PI * (-1f64).exp())
                < 1e-15
        );
        assert!(rel(radiance_closed_form(&s, Ray::new(0., 0., 1., 0.)), (PI / 2.0).sqrt()) < 1e-15);
        assert!((radiance_closed_form(&s, Ray::default()) - 1.772_453_9).abs() < 1e-7);
        assert!((radiance_closed_form(&s, Ray::new(1., 0., 0., 0.)) - 0.652_049_4).abs() < 1e-7);
        assert!((radiance_closed_form(&s, Ray::new(0., 0., 1., 0.)) - 1.253_314_1).abs() < 1e-7);
    }

    #[test]
    fn simpson_reaches_sqrt_pi() {
        let q = radiance_quadrature(&Scene::unit(), Ray::default(), 10.0, 2001).unwrap();
        assert!((q - SQRT_PI).abs() < 1e-10);
    }

    #[test]
    fn far_ray_is_dark() {
        let s = Scene::single(GaussianBlob::new([0.0; 3], 0.1, 1.0).unwrap());
        let q = radiance_quadrature(&s, Ray::new(5., 5., 0., 0.), 2.0, 401).unwrap();
        assert!(q < 1e-30);
        assert!(radiance_closed_form(&s, Ray::new(5., 5., 0., 0.)) < 1e-30);
    }

    #[test]
    fn quadrature_converges_with_resolution() {
        let s = Scene::fixture();
        let ray = Ray::new(0.4, -0.7, 0.9, 0.3);
        let exact = radiance_closed_form(&s, ray);
        let hw = s.oracle_half_width();
        let errs: Vec<f64> = [101, 201, 401, 801]
            .iter()
            .map(|&n| (radiance_quadrature(&s, ray, hw, n).unwrap() - exact).abs())
            .collect();
        // decreasing until the rounding floor is reached
        assert!(errs[1] < errs[0], "{errs:?}");
        assert!(errs[1..].iter().all(|&e| e < 1e-14 * exact.max(1.0)), "{errs:?}");
    }

    #[test]
    fn rejects_bad_quadrature_args() {
        let s = Scene::unit();
        assert!(radiance_quadrature(&s, Ray::default(), 0.0, 11).is_err());
        assert!(radiance_quadrature(&s, Ray::default(), 1.0, 10).is_err());
        assert!(radiance_quadrature(&s, Ray::default(), 1.0, 1).is_err());
    }

    #[test]
    fn blob_invariants_enforced() {
        assert!(GaussianBlob::new([0.0; 3], 0.0, 1.0).is_err());
        assert!(GaussianBlob::new([0.0; 3], 1.0, -1.0).is_err());
        assert!(GaussianBlob::new([f64::NAN, 0.0, 0.0], 1.0, 1.0).is_err());
        assert!(Scene::new(vec![]).is_err());
    }

    #[test]
    fn fixture_blobs_are_convergence_safe() {
        let s = Scene::fixture();
        assert_eq!(s.blobs().len(), 3);
        assert!(s.blobs().iter().all(|b| b.sigma >= 0.5));
        let depths: Vec<f64> = s.blobs().iter().map(|b| b.center[2]).collect();
        assert!(depths.windows(2).all(|w| w[0] != w[1]));
    }

    fn geom(cols: usize, pitch: usize) -> LightfieldGeometry {
        LightfieldGeometry::centered(cols, cols, pitch, pitch, 0.0).unwrap()
    }

    #[test]
    fn raster_peaks_at_center() {
        let lf = sample_plenoptic_raster(&Scene::unit(), &geom(5, 9));
        let r = lf.raster();
        let (mut best, mut at) = (f64::NEG_INFINITY, (0, 0));
        for row in 0..r.height {
            for col in 0..r.width {
                if r.pixel(col, row)[0] > best {
                    best = r.pixel(col, row)[0];
                    at = (col, row);
                }
            }
        }
        assert_eq!(at, (2 * 9 + 4, 2 * 9 + 4));
    }

    #[test]
    fn raster_is_linear_in_the_scene() {
        let g = geom(3, 5);
        let a = Scene::single(GaussianBlob::new([0.5, -0.2, 0.3], 0.8, 1.0).unwrap());
        let b = Scene::single(GaussianBlob::new([-0.4, 0.1, -0.6], 1.3, 2.0).unwrap());
        let ra = sample_plenoptic_raster(&a, &g);
        let rb = sample_plenoptic_raster(&b, &g);
        let rab = sample_plenoptic_raster(&a.union(&b), &g);
        for ((x, y), z) in ra.raster().data.iter().zip(&rb.raster().data).zip(&rab.raster().data) {
            assert!((x + y - z).abs() <= 1e-15 * z.abs().max(1.0));
        }
        let r3 = sample_plenoptic_raster(&a.scaled(3.0).unwrap(), &g);
        for (x, z) in ra.raster().data.iter().zip(&r3.raster().data) {
            assert!((3.0 * x - z).abs() <= 1e-15 * z.abs().max(1.0));
        }
    }

    #[test]
    fn exec_modes_match() {
        let g = geom(4, 7);
        let s = Scene::fixture();
        let a = sample_plenoptic_raster_with(&s, &g, Exec::Sequential);
        let b = sample_plenoptic_raster_with(&s, &g, Exec::Parallel);
        assert_eq!(a.raster().data, b.raster().data);
    }

    use proptest::prelude::*;

    fn small_ray() -> impl Strategy<Value = Ray> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(Ray::from_array)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closed_form_matches_oracle(ray in small_ray()) {
            let s = Scene::fixture();
            let exact = radiance_closed_form(&s, ray);
            let q = radiance_quadrature(&s, ray, s.oracle_half_width(), 4001).unwrap();
            prop_assert!((exact - q).abs() <= 1e-8 * exact + 1e-12);
            prop_assert!(exact > 0.0);
        }

        #[test]
        fn translation_covariance(ray in small_ray(), da in -2.0f64..2.0, db in -2.0f64..2.0) {
            let s = Scene::fixture();
            let moved = s.translated([da, db, 0.0]);
            let shifted = Ray::new(ray.x - da, ray.y - db, ray.u, ray.v);
            let a = radiance_closed_form(&moved, ray);
            let b = radiance_closed_form(&s, shifted);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(b).max(1e-300));
        }
    }
}
