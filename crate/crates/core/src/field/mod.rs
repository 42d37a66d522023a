// SPDX-License-Identifier: MIT OR Apache-2.0

//! The bandwidth-indexed MOSUM field on the triangle.

pub mod centering;
pub mod geometry;
pub mod mosum;
pub mod prefix;
pub mod triangle;

pub use centering::{
    centering_at, centering_field, decomposition_at, slope_bounds, limit_decomposition,
    ChangeModel, LimitDecomposition,
};
pub use geometry::{in_cone, Geometry, GeometryExport};
pub use mosum::{
    compute_field, compute_field_capped, mosum_at, write_field_tsv, Field, FieldKind, MosumField,
    MosumStatistic,
};
pub use prefix::{PrefixSums, Side, WindowMoments};
pub use triangle::{TrianglePoint, TriangleSpec, DEFAULT_MAX_HORIZON};
