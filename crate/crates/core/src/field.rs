//! Scalar fields over ray space.

use crate::coords::{ray_from_xi, Ray, XiPoint};

/// A radiance function `r(x, y, u, v)` on two-plane rays.
pub trait RadianceField: Sync {
    fn radiance(&self, ray: Ray) -> f64;
}

impl<F> RadianceField for F
where
    F: Fn(Ray) -> f64 + Sync,
{
    fn radiance(&self, ray: Ray) -> f64 {
        self(ray)
    }
}

/// A function `r̃(ξ1, ξ2, ξ3, ξ4)` in ultrahyperbolic coordinates.
pub trait XiField: Sync {
    fn value(&self, q: XiPoint) -> f64;
}

impl<F> XiField for F
where
    F: Fn(XiPoint) -> f64 + Sync,
{
    fn value(&self, q: XiPoint) -> f64 {
        self(q)
    }
}

/// Views a radiance field in ultrahyperbolic coordinates:
/// `r̃(q) = r(ray_from_xi(q))`.
#[derive(Clone, Copy, Debug)]
pub struct InXi<'a, R: ?Sized>(pub &'a R);

impl<R: RadianceField + ?Sized> XiField for InXi<'_, R> {
    fn value(&self, q: XiPoint) -> f64 {
        self.0.radiance(ray_from_xi(q))
    }
}
