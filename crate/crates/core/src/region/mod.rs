//! Grid analysis of two- and higher-dimensional feasible regions where every
//! player controls one coordinate.

mod export;
mod file;
mod grid;
mod slices;

pub use export::{write_components_csv, write_pgm};
pub use file::{parse_region, MonomialSum, RegionFile};
pub use grid::{rasterize, GridRegion, CELL_BUDGET};
pub use slices::{component_slice_support, slice_convexity_check, SliceSupport, SliceViolation};
