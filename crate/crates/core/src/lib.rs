//! Lightfield coordinates and the checks that come with them.
//!
//! * [`coords`]: two-plane, ultrahyperbolic and double-polar ray coordinates.
//! * [`synth`]: exact radiance of Gaussian emitter scenes (line integrals).
//! * [`residuals`]: finite-difference residuals of John's equation and its
//!   ultrahyperbolic form.
//! * [`asgeirsson`]: circle-integral identities, continuous and on pixel
//!   grids.
//! * [`resample`]: polar discretization, shift-corrected nearest-neighbour
//!   sampling of plenoptic rasters, and renderings.
//! * [`io`]: PGM/PPM, scene/geometry text, polar archives, CSV reports.
//!
//! Heavy loops run on rayon when the `parallel` feature is enabled (the
//! default); see [`Exec`].

pub mod asgeirsson;
pub mod coords;
pub mod error;
pub mod exec;
pub mod field;
pub mod io;
pub mod raster;
pub mod resample;
pub mod residuals;
pub mod synth;

pub use coords::{PolarPoint, Ray, XiPoint};
pub use error::{Error, Result};
pub use exec::Exec;
pub use field::{InXi, RadianceField, XiField};
pub use raster::Raster;
pub use synth::{GaussianBlob, Scene};
