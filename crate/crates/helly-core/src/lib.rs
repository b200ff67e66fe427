//! Convex-geometry kernel and quantitative Helly-type selection pipelines
//! with brute-force-verifiable numeric certificates at desk scale (d <= 3).
//!
//! The crate is organized around the pipelines it certifies:
//!
//! - [`geometry`]: halfspace/vertex polytopes, LP, widths, diameters, polars;
//! - [`ellipsoid`]: John and Lowner ellipsoids with contact certificates;
//! - [`witness`]: small-width direction sets, covering zones, diameter bounds;
//! - [`diameter`]: the colorful diameter selector over 2d color classes;
//! - [`logconcave`]: log-concave representations, integration, John functions;
//! - [`steinitz`]: sparsification keeping a quantitative inscribed ball;
//! - [`functional`]: subset selection for minima of log-concave functions;
//! - [`colorful`]: the colorful functional selector over 3d+1 classes.
//!
//! Data-parallel inner loops run through [`parallel`], which falls back to
//! sequential execution without the `parallel` feature.

pub mod colorful;
pub mod diameter;
pub mod ellipsoid;
pub mod functional;
pub mod geometry;
pub mod logbound;
pub mod logconcave;
pub mod lp;
pub mod numerics;
pub mod parallel;
pub mod steinitz;
pub mod witness;

pub use geometry::{Direction, HPolytope, VPolytope};
pub use logbound::LogBound;
