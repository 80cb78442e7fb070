//! Reliability analysis of finite signal constellations under isotropic
//! multivariate Cauchy noise.
//!
//! Small noise: pairwise error terms, union bounds, and their linear
//! asymptotes driven by reciprocal-distance burdens ([`bounds`]). Large noise:
//! angular robustness of each point's recession cone and the resulting
//! collapse criterion ([`geometry`], [`descriptors`]). Seeded Monte Carlo under
//! maximum-likelihood detection checks both regimes ([`detector`]).

pub mod bounds;
pub mod catalog;
pub mod cli;
pub mod descriptors;
pub mod detector;
pub mod error;
pub mod geometry;
pub mod io;
pub mod noise;
pub mod reproduce;
pub mod rng;
pub mod server;

pub use error::{Error, Result};
