//! Blow-up analysis of nilpotent equilibria in network dynamical systems.

pub mod blowup;
pub mod dynamics;
pub mod error;
pub mod netsys;
pub mod nilpotent;
pub mod poly;
pub mod registry;

pub use error::{Error, Result};
