//! Exact computations with sheaves, torsors, descent data and gerbes over
//! finite topological spaces.
//!
//! A finite T0 space is a finite poset whose opens are the up-sets. Everything
//! here is enumerated exhaustively, so every answer comes with a witness or a
//! complete search behind it.
//!
//! * [`space`]: posets, opens, covers and nerves
//! * [`groups`]: multiplication-table groups with Aut/Inn/Out and centers
//! * [`sheaves`]: presheaves, sheafification, stalks and étale spaces
//! * [`torsors`]: group sheaves, torsors and non-abelian H¹
//! * [`groupoid`] and [`descent`]: strict presheaves of groupoids, descent
//!   categories and stacks
//! * [`gerbes`]: bands, normal 2-cocycles, H², the obstruction class and
//!   groupoid extensions
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod budget;
mod error;
mod linalg;

pub mod descent;
pub mod gerbes;
pub mod groupoid;
pub mod groups;
pub mod sheaves;
pub mod space;
pub mod torsors;

pub use budget::Budget;
pub use error::{Check, Error, Result};
