//! Frobenius-trace statistics for the Clausen elliptic curves
//! `y^2 = (x-1)(x^2+λ)` and the K3 family they parametrize, with exact
//! checks of the class-number moment identities, Rankin-Cohen bracket
//! coefficients and the explicit O(3) discrepancy bounds.

pub mod brackets;
pub mod clausen;
pub mod cli;
pub mod error;
pub mod field;
pub mod hurwitz;
pub mod measures;
pub mod selberg;
pub mod stats;

pub use error::{Error, Result};
