//! Discrete TV-regularized deconvolution on a pixel grid.

pub mod diff;
mod forward;
mod gnorm;
mod image;
mod labeling;
mod phantom;
mod solver;

pub use forward::{add_gaussian_noise, ForwardBlurSubsample, Subsampling};
pub use gnorm::{discrete_gnorm, GnormParams, GnormResult};
pub use image::GridImage;
pub use labeling::{level_structure, BoundingBox, Component, LevelStructure, ZERO_LEVEL};
pub use phantom::{make_phantom, PhantomKind};
pub use solver::{composite_norm, lambda_max, solve_tv, GapRecord, SolveParams, SolveResult, AVERAGE_BURN_IN};
