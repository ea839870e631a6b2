//! Circle-mean identities for solutions of the ultrahyperbolic equation.
//!
//! For a solution `r̃`, the integral over a circle of radius `R` in the
//! `(ξ1, ξ4)` plane equals the integral over the same-radius circle in the
//! `(ξ2, ξ3)` plane, and the double integral over a pair of circles with
//! radii `(R1, R2)` is unchanged when the radii are swapped. The continuous
//! checks use the uniform periodic trapezoid rule; the discrete check sums
//! pixel blocks of a [`PolarLightfield`].

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coords::XiPoint;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::XiField;
use crate::resample::PolarLightfield;

/// Denominator floor for relative differences.
pub const REL_DIFF_FLOOR: f64 = 1e-300;

/// Smallest node count accepted by the circle quadratures.
pub const MIN_NODES: usize = 8;

pub fn rel_diff(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(REL_DIFF_FLOOR)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleSpec {
    pub center: XiPoint,
    pub radius: f64,
    pub n_nodes: usize,
}

impl CircleSpec {
    pub fn new(center: XiPoint, radius: f64, n_nodes: usize) -> Result<Self> {
        check_radius(radius)?;
        check_nodes(n_nodes)?;
        Ok(CircleSpec {
            center,
            radius,
            n_nodes,
        })
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius >= 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be >= 0, got {radius}")))
    }
}

fn check_nodes(n: usize) -> Result<()> {
    if n >= MIN_NODES {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("need at least {MIN_NODES} nodes, got {n}")))
    }
}

/// Unit-circle nodes `(cos θk, sin θk)` for `θk = 2πk/n`.
fn nodes(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let (s, c) = (TAU * k as f64 / n as f64).sin_cos();
            (c, s)
        })
        .collect()
}

/// `∫₀^{2π} r̃(ξ1 + R cos θ, ξ2, ξ3, ξ4 + R sin θ) dθ`.
pub fn circle_integral_14<F: XiField + ?Sized>(r: &F, c: &CircleSpec) -> f64 {
    let q = c.center;
    let sum: f64 = nodes(c.n_nodes)
        .into_iter()
        .map(|(cs, sn)| {
            r.value(XiPoint::new(
                q.xi1 + c.radius * cs,
                q.xi2,
                q.xi3,
                q.xi4 + c.radius * sn,
            ))
        })
        .sum();
    sum * TAU / c.n_nodes as f64
}

/// `∫₀^{2π} r̃(ξ1, ξ2 + R cos θ, ξ3 + R sin θ, ξ4) dθ`.
pub fn circle_integral_23<F: XiField + ?Sized>(r: &F, c: &CircleSpec) -> f64 {
    let q = c.center;
    let sum: f64 = nodes(c.n_nodes)
        .into_iter()
        .map(|(cs, sn)| {
            r.value(XiPoint::new(
                q.xi1,
                q.xi2 + c.radius * cs,
                q.xi3 + c.radius * sn,
                q.xi4,
            ))
        })
        .sum();
    sum * TAU / c.n_nodes as f64
}

/// `∬ r̃(ξ1 + R14 cos θ1, ξ2 + R23 cos θ2, ξ3 + R23 sin θ2, ξ4 + R14 sin θ1)`
/// over `[0, 2π)²`, tensor-product trapezoid with `n` nodes per axis.
pub fn double_circle_integral<F: XiField + ?Sized>(
    r: &F,
    center: XiPoint,
    r14: f64,
    r23: f64,
    n: usize,
) -> Result<f64> {
    check_radius(r14)?;
    check_radius(r23)?;
    check_nodes(n)?;
    let ring = nodes(n);
    let q = center;
    let mut total = 0.0;
    for &(c1, s1) in &ring {
        let mut row = 0.0;
        for &(c2, s2) in &ring {
            row += r.value(XiPoint::new(
                q.xi1 + r14 * c1,
                q.xi2 + r23 * c2,
                q.xi3 + r23 * s2,
                q.xi4 + r14 * s1,
            ));
        }
        total += row;
    }
    let w = TAU / n as f64;
    Ok(total * w * w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Single circles of equal radius in the (1,4) and (2,3) planes.
    SingleCircle,
    /// Circle pairs with radii swapped between the planes.
    DoubleCircle,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::SingleCircle => "theorem1",
            Theorem::DoubleCircle => "theorem2",
        }
    }
}

/// Parameters of one theorem evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremConfig {
    pub theorem: Theorem,
    pub center: XiPoint,
    /// Radius in the (1,4) plane for the left-hand side; for the single-circle
    /// theorem the shared radius.
    pub r1: f64,
    /// Radius in the (2,3) plane for the left-hand side; ignored by the
    /// single-circle theorem.
    pub r2: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremReport {
    pub config: TheoremConfig,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
}

impl TheoremReport {
    fn new(config: TheoremConfig, lhs: f64, rhs: f64) -> Self {
        TheoremReport {
            config,
            lhs,
            rhs,
            abs_diff: (lhs - rhs).abs(),
            rel_diff: rel_diff(lhs, rhs),
        }
    }
}

pub fn theorem1_check<F: XiField + ?Sized>(
    r: &F,
    center: XiPoint,
    radius: f64,
    n: usize,
) -> Result<TheoremReport> {
    let c = CircleSpec::new(center, radius, n)?;
    let config = TheoremConfig {
        theorem: Theorem::SingleCircle,
        center,
        r1: radius,
        r2: radius,
        n,
    };
    Ok(TheoremReport::new(config, circle_integral_14(r, &c), circle_integral_23(r, &c)))
}

pub fn theorem2_check<F: XiField + ?Sized>(
    r: &F,
    center: XiPoint,
    r1: f64,
    r2: f64,
    n: usize,
) -> Result<TheoremReport> {
    let lhs = double_circle_integral(r, center, r1, r2, n)?;
    let rhs = double_circle_integral(r, center, r2, r1, n)?;
    let config = TheoremConfig {
        theorem: Theorem::DoubleCircle,
        center,
        r1,
        r2,
        n,
    };
    Ok(TheoremReport::new(config, lhs, rhs))
}

pub fn run_theorem_check<F: XiField + ?Sized>(r: &F, config: &TheoremConfig) -> Result<TheoremReport> {
    match config.theorem {
        Theorem::SingleCircle => theorem1_check(r, config.center, config.r1, config.n),
        Theorem::DoubleCircle => theorem2_check(r, config.center, config.r1, config.r2, config.n),
    }
}

/// Evaluates many configurations, one task per configuration.
pub fn run_theorem_checks<F: XiField + ?Sized>(
    r: &F,
    configs: &[TheoremConfig],
    exec: Exec,
) -> Result<Vec<TheoremReport>> {
    exec.map_slice(configs, |c| run_theorem_check(r, c))
        .into_iter()
        .collect()
}

/// `count` reproducible configurations: centers uniform in
/// `[-center_extent, center_extent]⁴`, radii uniform in `(0, max_radius]`.
/// Double-circle configurations always have distinct radii.
pub fn random_configs(
    theorem: Theorem,
    count: usize,
    n: usize,
    center_extent: f64,
    max_radius: f64,
    seed: u64,
) -> Vec<TheoremConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 1 - U maps [0, 1) onto (0, 1]
    let radius = |rng: &mut ChaCha8Rng| max_radius * (1.0 - rng.random::<f64>());
    (0..count)
        .map(|_| {
            let center = XiPoint::from_array(std::array::from_fn(|_| {
                rng.random_range(-center_extent..=center_extent)
            }));
            let r1 = radius(&mut rng);
            let r2 = match theorem {
                Theorem::SingleCircle => r1,
                Theorem::DoubleCircle => loop {
                    let r = radius(&mut rng);
                    if r != r1 {
                        break r;
                    }
                },
            };
            TheoremConfig {
                theorem,
                center,
                r1,
                r2,
                n,
            }
        })
        .collect()
}

/// Pixel sum of one polar microimage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MicroimageSum {
    pub sum: f64,
    pub valid_count: usize,
    pub total_count: usize,
}

impl MicroimageSum {
    pub fn fully_valid(&self) -> bool {
        self.valid_count == self.total_count
    }
}

/// Sum of valid pixel luminances in block `(r1, r2)`.
pub fn discrete_microimage_sum(pl: &PolarLightfield, r1: usize, r2: usize) -> Result<MicroimageSum> {
    let block = pl.block(r1, r2).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "block ({r1}, {r2}) outside polar lightfield ({}, {})",
            pl.r1max(),
            pl.r2max()
        ))
    })?;
    let mut sum = 0.0;
    let mut valid_count = 0;
    for i in 0..block.len() {
        if block.is_valid(i) {
            sum += block.luminance(i);
            valid_count += 1;
        }
    }
    Ok(MicroimageSum {
        sum,
        valid_count,
        total_count: block.len(),
    })
}

/// One off-diagonal pair of the discrete symmetry check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairRow {
    pub r1: usize,
    pub r2: usize,
    /// Sum of block `(r1, r2)`.
    pub sum_ab: f64,
    /// Sum of block `(r2, r1)`.
    pub sum_ba: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub fully_valid: bool,
}

/// Compares every block `(r1, r2)`, `r1 < r2`, with its mirror `(r2, r1)`.
///
/// Only pairs whose both blocks exist are reported. Diagonal blocks are
/// their own mirror and are omitted.
pub fn discrete_asgeirsson_report(pl: &PolarLightfield) -> Vec<PairRow> {
    let lim = pl.r1max().min(pl.r2max());
    let mut rows = Vec::new();
    for r1 in 0..=lim {
        for r2 in r1 + 1..=lim {
            let ab = discrete_microimage_sum(pl, r1, r2).expect("block in range");
            let ba = discrete_microimage_sum(pl, r2, r1).expect("block in range");
            rows.push(PairRow {
                r1,
                r2,
                sum_ab: ab.sum,
                sum_ba: ba.sum,
                abs_diff: (ab.sum - ba.sum).abs(),
                rel_diff: rel_diff(ab.sum, ba.sum),
                fully_valid: ab.fully_valid() && ba.fully_valid(),
            });
        }
    }
    rows
}

/// Largest `rel_diff` among rows, optionally including partially valid ones.
pub fn worst_rel_diff(rows: &[PairRow], include_partial: bool) -> Option<f64> {
    rows.iter()
        .filter(|r| include_partial || r.fully_valid)
        .map(|r| r.rel_diff)
        .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}
