#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Campanato-type seminorms, atoms and Carleson checks under Musielak-Orlicz growth.
//!
//! Everything lives on a midpoint grid over a one- or two-dimensional box.
//! Suprema over "all balls" are replaced by a deterministic ball family, so
//! every reported seminorm is a lower bound of the continuum quantity.

pub mod atoms;
pub mod campanato;
pub mod carleson;
pub mod cli;
pub mod error;
pub mod grid;
pub mod growth;
pub mod johnnirenberg;
pub mod luxembourg;
pub mod polyproj;
pub mod suite;

pub use error::{Error, Result};
pub use grid::{ball_family, integrate, Ball, BallFamilyConfig, Grid, GridBox, GridFunction, Region};
pub use growth::{GrowthFunction, GrowthSpec, WeightSpec};
