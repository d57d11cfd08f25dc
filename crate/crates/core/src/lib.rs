//! Exact and heuristic solvers for the line-based dial-a-ride problem without
//! time windows.
//!
//! Vehicles drive back and forth along a fixed line of stations and may only
//! turn when empty, so a tour is a sequence of directed sublines, each
//! described by the set of stations it stops at. The crate provides the
//! pattern-assignment MILP over an explicit pattern set, a column generation
//! engine with a pricing MILP, a branch-and-price driver, brute-force oracles
//! and a generator for the clique hardness gadget.

pub mod backend;
pub mod bnp;
pub mod error;
pub mod explicit;
pub mod gadgets;
pub mod master;
pub mod model;
pub mod pricing;

pub use error::{Error, Result};
