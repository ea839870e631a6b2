//! Central-difference residuals of John's equation
//! `(∂y∂u − ∂x∂v) r = 0` and of its ultrahyperbolic form
//! `(∂ξ1² − ∂ξ2² − ∂ξ3² + ∂ξ4²) r̃ = 0`.
//!
//! Under `ξ = (u+y, u−y, v+x, v−x)/2` the second operator equals four times
//! the first, so both residuals vanish together on line-integral fields.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coords::{Ray, XiPoint};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{InXi, RadianceField, XiField};

/// Step size of the second-order central stencils.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StencilSpec {
    h: f64,
}

impl StencilSpec {
    pub const DEFAULT_H: f64 = 0.05;

    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h.is_finite() {
            Ok(StencilSpec { h })
        } else {
            Err(Error::InvalidArgument(format!("stencil step must be > 0, got {h}")))
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

impl Default for StencilSpec {
    fn default() -> Self {
        StencilSpec { h: Self::DEFAULT_H }
    }
}

/// Which operator a sweep evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    John,
    Ultrahyperbolic,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::John => "john",
            Operator::Ultrahyperbolic => "ultrahyperbolic",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "john" => Ok(Operator::John),
            "ultrahyperbolic" => Ok(Operator::Ultrahyperbolic),
            _ => Err(Error::InvalidArgument(format!("unknown operator {s:?}"))),
        }
    }
}

/// Four-corner estimate of a mixed second derivative in ray axes `a`, `b`.
fn mixed<F: RadianceField + ?Sized>(r: &F, p: [f64; 4], a: usize, b: usize, h: f64) -> f64 {
    let at = |sa: f64, sb: f64| {
        let mut q = p;
        q[a] += sa * h;
        q[b] += sb * h;
        r.radiance(Ray::from_array(q))
    };
    (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h)
}

/// `(∂y∂u − ∂x∂v) r` at `p`.
pub fn john_residual<F: RadianceField + ?Sized>(r: &F, p: Ray, st: StencilSpec) -> f64 {
    let a = p.to_array();
    // axes: 0 = x, 1 = y, 2 = u, 3 = v
    mixed(r, a, 1, 2, st.h) - mixed(r, a, 0, 3, st.h)
}

const ULTRA_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// `(∂ξ1² − ∂ξ2² − ∂ξ3² + ∂ξ4²) r̃` at `q`.
pub fn ultrahyperbolic_residual<F: XiField + ?Sized>(rt: &F, q: XiPoint, st: StencilSpec) -> f64 {
    let h = st.h;
    let center = 2.0 * rt.value(q);
    ULTRA_SIGNS
        .iter()
        .enumerate()
        .map(|(axis, sign)| {
            sign * (rt.value(q.offset(axis, h)) - center + rt.value(q.offset(axis, -h)))
        })
        .sum::<f64>()
        / (h * h)
}

/// Summary of absolute residuals over a point set.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub operator: Operator,
    pub h: f64,
    pub sample_count: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub rms: f64,
    /// Largest `|r|` at the sample points themselves.
    pub field_max: f64,
}

impl ResidualReport {
    fn from_samples(operator: Operator, h: f64, samples: &[(f64, f64)]) -> Self {
        let n = samples.len();
        let (mut max_abs, mut sum, mut sum2, mut field_max) = (0.0f64, 0.0, 0.0, 0.0f64);
        for &(res, val) in samples {
            let a = res.abs();
            max_abs = max_abs.max(a);
            sum += a;
            sum2 += a * a;
            field_max = field_max.max(val.abs());
        }
        ResidualReport {
            operator,
            h,
            sample_count: n,
            max_abs,
            // clamp so max_abs >= mean_abs survives summation rounding
            mean_abs: (sum / n as f64).min(max_abs),
            rms: (sum2 / n as f64).sqrt(),
            field_max,
        }
    }
}

/// Evaluates one operator at every point and aggregates `|residual|`.
///
/// Points are interpreted as rays `(x, y, u, v)` for [`Operator::John`] and
/// as `(ξ1, ξ2, ξ3, ξ4)` for [`Operator::Ultrahyperbolic`].
pub fn residual_sweep<F: RadianceField + ?Sized>(
    r: &F,
    points: &[[f64; 4]],
    st: StencilSpec,
    operator: Operator,
) -> Result<ResidualReport> {
    residual_sweep_with(r, points, st, operator, Exec::default())
}

pub fn residual_sweep_with<F: RadianceField + ?Sized>(
    r: &F,
    points: &[[f64; 4]],
    st: StencilSpec,
    operator: Operator,
    exec: Exec,
) -> Result<ResidualReport> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("residual sweep needs at least one point".into()));
    }
    let samples = match operator {
        Operator::John => exec.map_slice(points, |&p| {
            let ray = Ray::from_array(p);
            (john_residual(r, ray, st), r.radiance(ray))
        }),
        Operator::Ultrahyperbolic => {
            let rt = InXi(r);
            exec.map_slice(points, |&p| {
                let q = XiPoint::from_array(p);
                (ultrahyperbolic_residual(&rt, q, st), rt.value(q))
            })
        }
    };
    Ok(ResidualReport::from_samples(operator, st.h, &samples))
}

/// `n` points uniform in `[-extent, extent]⁴`, reproducible from `seed`.
pub fn uniform_points(n: usize, extent: f64, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| std::array::from_fn(|_| rng.random_range(-extent..=extent)))
        .collect()
}
