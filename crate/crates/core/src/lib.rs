//! Geodesic active contours on arbitrary planar graphs.

pub mod calculus;
pub mod engine;
pub mod error;
pub mod field;
pub mod filters;
pub mod fixtures;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod raster;
pub mod validation;

pub use error::{GacError, Result};
pub use field::{ScalarField, VectorField};
pub use geometry::{Point2, Rect};
pub use graph::{NeighborFan, SpatialGraph};
pub use engine::{GacConfig, GacState, RunSummary, SeedRegion};
pub use fixtures::DiskFixture;
pub use filters::GaussianParams;
pub use raster::{LabelMap, RasterImage};
pub use validation::{AnalyticField, ErrorTable};
