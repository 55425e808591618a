//! Recovery of K linear subspaces from contaminated samples by minimizing the
//! lp energy `Σ_x dist(x, L_1 ∪ … ∪ L_K)^p`.
//!
//! * [`grassmann`]: subspaces, principal angles, metrics, geodesics.
//! * [`model`]: mixture models, sampling, and the recovery-bound calculators.
//! * [`energy`]: the energy, Voronoi regions, first-order residuals.
//! * [`optimize`]: alternating lp K-flats, IRLS fitting, the 2-D grid oracle.
//! * [`experiments`]: reproducible trials, sweeps and the property suite.

// NaN must fail range checks, so `!(x > 0.0)` is intentional
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod experiments;
pub mod grassmann;
pub mod model;
pub mod optimize;
pub mod rng;

pub use error::{Error, Result};
