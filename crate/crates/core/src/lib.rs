//! Toroidal circle planes on 𝕊¹ × 𝕊¹.
//!
//! Constructions of the classical Minkowski plane, swapping half planes
//! `𝓜(f, g)` and generalized Hartmann planes, the geometric operations on
//! them (joining, parallel intersection and projection, intersection,
//! touching), randomized axiom verification, explicit automorphism groups
//! and derived planes.

#[cfg(test)]
extern crate self as toroidal;
#[cfg(test)]
#[path = "../tests/common/mod.rs"]
mod fixtures;

pub mod automorphisms;
pub mod derived;
pub mod error;
pub mod geometry;
pub mod moebius;
pub mod operations;
pub mod planes;
pub mod roots;
pub mod verification;

pub use error::{GeomError, Result};
pub use geometry::{S1Point, TorusPoint, INF};
pub use moebius::MoebiusMap;
pub use planes::{Circle, Homeo, Plane};
