//! Ray coordinates: two-plane `(x, y, u, v)`, ultrahyperbolic `(ξ1..ξ4)`
//! and the double-polar `(θ1, θ2, R1, R2)` system, with the exact maps
//! between them.
//!
//! The ultrahyperbolic coordinates are the linear change of variables
//!
//! ```text
//! ξ1 = (u + y)/2   ξ2 = (u − y)/2   ξ3 = (v + x)/2   ξ4 = (v − x)/2
//! ```
//!
//! and the polar coordinates are polar coordinates in the `(ξ1, ξ4)` and
//! `(ξ2, ξ3)` planes: `ξ1 = R1 cos θ1`, `ξ4 = R1 sin θ1`, `ξ2 = R2 cos θ2`,
//! `ξ3 = R2 sin θ2`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// A ray in two-plane coordinates: `(x, y)` on the first plane and the
/// displacement `(u, v)` on the second.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Ray {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
}

impl Ray {
    pub const fn new(x: f64, y: f64, u: f64, v: f64) -> Self {
        Ray { x, y, u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.u.is_finite() && self.v.is_finite()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.u, self.v]
    }

    pub fn from_array([x, y, u, v]: [f64; 4]) -> Self {
        Ray { x, y, u, v }
    }
}

/// A ray in ultrahyperbolic coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct XiPoint {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub xi4: f64,
}

impl XiPoint {
    pub const fn new(xi1: f64, xi2: f64, xi3: f64, xi4: f64) -> Self {
        XiPoint { xi1, xi2, xi3, xi4 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.xi1, self.xi2, self.xi3, self.xi4]
    }

    pub fn from_array([xi1, xi2, xi3, xi4]: [f64; 4]) -> Self {
        XiPoint { xi1, xi2, xi3, xi4 }
    }

    /// Moves along one axis (0-based: `axis = 0` is ξ1).
    pub fn offset(mut self, axis: usize, h: f64) -> Self {
        match axis {
            0 => self.xi1 += h,
            1 => self.xi2 += h,
            2 => self.xi3 += h,
            3 => self.xi4 += h,
            _ => panic!("xi axis {axis} out of range"),
        }
        self
    }
}

/// A ray in double-polar coordinates.
///
/// Angles live in `[0, 2π)`, radii are non-negative, and an angle whose
/// radius is zero is canonically `0`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PolarPoint {
    pub theta1: f64,
    pub theta2: f64,
    pub r1: f64,
    pub r2: f64,
}

impl PolarPoint {
    pub const fn new(theta1: f64, theta2: f64, r1: f64, r2: f64) -> Self {
        PolarPoint {
            theta1,
            theta2,
            r1,
            r2,
        }
    }
}

pub fn xi_from_ray(p: Ray) -> XiPoint {
    XiPoint {
        xi1: 0.5 * (p.u + p.y),
        xi2: 0.5 * (p.u - p.y),
        xi3: 0.5 * (p.v + p.x),
        xi4: 0.5 * (p.v - p.x),
    }
}

pub fn ray_from_xi(q: XiPoint) -> Ray {
    Ray {
        x: q.xi3 - q.xi4,
        y: q.xi1 - q.xi2,
        u: q.xi1 + q.xi2,
        v: q.xi3 + q.xi4,
    }
}

/// Four-quadrant arctangent of `yy / xx`, mapped into `[0, 2π)`.
///
/// Fails with [`Error::UndefinedAngle`] at the origin.
pub fn arctan2_normalized(yy: f64, xx: f64) -> Result<f64> {
    if xx == 0.0 && yy == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    Ok(wrap_angle(yy.atan2(xx)))
}

/// Wraps an angle from `(-π, π]` into `[0, 2π)`.
fn wrap_angle(theta: f64) -> f64 {
    if theta >= 0.0 {
        return theta;
    }
    let wrapped = theta + TAU;
    // tiny negative angles round up to exactly 2π
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Angle of `(a, b)` with the `R = 0` canonicalization.
fn canonical_angle(b: f64, a: f64) -> f64 {
    arctan2_normalized(b, a).unwrap_or(0.0)
}

pub fn polar_from_ray(p: Ray) -> PolarPoint {
    let (a1, b1) = (p.u + p.y, p.v - p.x);
    let (a2, b2) = (p.u - p.y, p.v + p.x);
    PolarPoint {
        theta1: canonical_angle(b1, a1),
        theta2: canonical_angle(b2, a2),
        r1: 0.5 * a1.hypot(b1),
        r2: 0.5 * a2.hypot(b2),
    }
}

pub fn ray_from_polar(p: PolarPoint) -> Ray {
    let (s1, c1) = p.theta1.sin_cos();
    let (s2, c2) = p.theta2.sin_cos();
    Ray {
        x: p.r2 * s2 - p.r1 * s1,
        y: p.r1 * c1 - p.r2 * c2,
        u: p.r1 * c1 + p.r2 * c2,
        v: p.r2 * s2 + p.r1 * s1,
    }
}

/// Polar coordinates of an ultrahyperbolic point, plane by plane.
pub fn polar_from_xi(q: XiPoint) -> PolarPoint {
    PolarPoint {
        theta1: canonical_angle(q.xi4, q.xi1),
        theta2: canonical_angle(q.xi3, q.xi2),
        r1: q.xi1.hypot(q.xi4),
        r2: q.xi2.hypot(q.xi3),
    }
}

pub fn xi_from_polar(p: PolarPoint) -> XiPoint {
    let (s1, c1) = p.theta1.sin_cos();
    let (s2, c2) = p.theta2.sin_cos();
    XiPoint {
        xi1: p.r1 * c1,
        xi2: p.r2 * c2,
        xi3: p.r2 * s2,
        xi4: p.r1 * s1,
    }
}

/// Worst-case errors of the two round trips over a set of rays.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RoundTripStats {
    pub count: usize,
    /// Largest `|ray_from_xi(xi_from_ray(p)) − p|` component.
    pub xi_max_abs: f64,
    /// The same error in units of `ε · max|p|` for the offending ray.
    pub xi_max_ulps: f64,
    /// Largest `|ray_from_polar(polar_from_ray(p)) − p|` component.
    pub polar_max_abs: f64,
}

impl RoundTripStats {
    fn merge(self, o: Self) -> Self {
        RoundTripStats {
            count: self.count + o.count,
            xi_max_abs: self.xi_max_abs.max(o.xi_max_abs),
            xi_max_ulps: self.xi_max_ulps.max(o.xi_max_ulps),
            polar_max_abs: self.polar_max_abs.max(o.polar_max_abs),
        }
    }
}

fn max_component_diff(a: Ray, b: Ray) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn round_trip_stats(rays: &[Ray], exec: crate::exec::Exec) -> RoundTripStats {
    let per_ray = |&p: &Ray| {
        let xi_err = max_component_diff(ray_from_xi(xi_from_ray(p)), p);
        let scale = p.to_array().iter().fold(f64::MIN_POSITIVE, |m, c| m.max(c.abs()));
        RoundTripStats {
            count: 1,
            xi_max_abs: xi_err,
            xi_max_ulps: xi_err / (f64::EPSILON * scale),
            polar_max_abs: max_component_diff(ray_from_polar(polar_from_ray(p)), p),
        }
    };
    exec.map_slice(rays, per_ray)
        .into_iter()
        .fold(RoundTripStats::default(), RoundTripStats::merge)
}
