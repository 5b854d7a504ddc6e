//! Simulation and planning for in-hand manipulation between two compliant,
//! belt-driven fingers.
//!
//! The object is held between two powered belts. Moving both belts the same
//! way slides it along the fingers; moving them in opposite directions spins
//! it. [`dynamics`] integrates that motion, [`primitives`] plans belt
//! commands and reads the results back, and [`harness`] runs scenario files
//! and seeded Monte Carlo trials.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod compliance;
pub mod contact;
pub mod dynamics;
mod error;
pub mod harness;
pub mod model;
pub mod primitives;
mod schedule;

pub use error::{Error, Result};
