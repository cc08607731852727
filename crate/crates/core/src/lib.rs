//! Numerics for subordinate Brownian motion in the upper half-space.
//!
//! The library is organized around a small catalog of subordinator Laplace
//! exponents ([`bernstein`]), the radial free-space kernels they induce
//! ([`kernels`]), half-space comparability envelopes and the explicit stable
//! Martin kernel ([`halfspace`]), integral tests that decide minimal thinness
//! of sets attached to the boundary ([`thinness`]), and a path-level Monte
//! Carlo layer that cross-checks the analytic verdicts ([`montecarlo`]).
//!
//! Everything downstream of a [`bernstein::ExponentSpec`] is deterministic:
//! quadrature ([`quad`]) and transform inversion ([`laplace`]) carry explicit
//! error estimates, and the simulation layer derives one ChaCha stream per
//! path so results are bit-identical across thread counts.

pub mod bernstein;
pub mod config;
pub mod csvnum;
pub mod error;
pub mod halfspace;
pub mod kernels;
pub mod laplace;
pub mod montecarlo;
pub mod quad;
pub mod special;
pub mod thinness;
pub mod verify;

pub use error::{Error, Result};
