//! Exact tiling geometry, corona search and convexification.

pub mod atlas;
pub mod builtins;
pub mod convexify;
pub mod geometry;
pub mod io;
pub mod patch;
pub mod polygon;
pub mod protoset;
pub mod recompose;
pub mod render;
pub mod rows;
pub mod scalar;
pub mod search;
