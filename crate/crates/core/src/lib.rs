#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod distributions;
pub mod geometry;
pub mod models;
pub mod numeric;
pub mod randgen;
pub mod reachability;
pub mod symcore;
pub mod tangent;
