//! Exact generating functions for corner statistics of monotone lattice
//! paths on rectangular grids decorated with scramblers, the closed
//! Vandermonde-type formulas they satisfy, and the explicit bijections
//! between differently ornated grids.

pub mod biject;
pub mod cli;
pub mod error;
pub mod identities;
pub mod lattice;
pub mod qpoly;
pub mod scramble;

pub use error::{Error, Result};
pub use lattice::{enumerate, Gap, PathWord, Step, Sweep};
pub use qpoly::{qbinom, BiPoly, UniPoly};
pub use scramble::{gf_scrambled, marked_gaps, scrambled_cindex, scrambled_corners, OrnatedPath, Scrambler};
