//! Rate statistics and transmission capacity of Poisson bipolar wireless
//! networks under a continuum-layered broadcast strategy, with the single-layer
//! outage strategy as baseline and a Monte Carlo simulator as an independent
//! cross-check.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod broadcast;
pub mod capacity;
pub mod error;
pub mod montecarlo;
pub mod network;
pub mod numeric;
pub mod outage;
pub mod specfun;

pub use broadcast::{PowerProfile, RateOrigin, RateStats};
pub use capacity::{CapacityQuery, CapacityResult};
pub use error::{Error, Result};
pub use montecarlo::{SimConfig, SimResult};
pub use network::{DerivedConstants, NetworkParams, Regime};
pub use specfun::Tolerance;
