//! At-the-money option pricing under exponential tempered-stable Lévy models.
//!
//! The crate computes second-order short-maturity expansions of ATM call
//! prices and implied volatilities for CGMY and general tempered-stable-like
//! models, together with two independent reference pricers (Fourier
//! inversion against a Black–Scholes control, and Monte Carlo under the
//! stable-limit measure) and a term-structure calibration of the jump
//! parameters.

pub mod error;
pub mod mathkit;
pub mod model;
pub mod stable;
pub mod asymptotics;
pub mod pricing;
pub mod calibration;
pub mod cli;

pub use error::{Error, Result};
