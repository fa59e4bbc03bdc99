//! osilab: a laboratory for isotropic one-sided sketches.
//!
//! The crate has five layers:
//!
//! - [`linalg`]: small dense kernels (QR, Jacobi SVD, pseudoinverse,
//!   symmetric eigensolver) that everything else is built on.
//! - [`sketch`]: a catalog of random sketch-matrix families with declared
//!   theoretical parameters, seeded sampling, and isotropy/injectivity
//!   checks, plus a plain-text descriptor format.
//! - [`bounds`]: closed-form evaluation of the guarantees that hold for
//!   these sketches, each returning a factor and a success probability.
//! - [`estimators`]: sketch-and-solve least squares, the rangefinder
//!   low-rank approximation, and an IRLS lp regression solver.
//! - [`montecarlo`]: a seeded, parallel trial harness with named experiment
//!   presets that verify every probability claim against simulation.

pub mod bounds;
pub mod estimators;
pub mod linalg;
pub mod montecarlo;
pub mod sketch;
