//! Spread option pricing under two jump-diffusion stochastic volatility
//! models.
//!
//! The pricing path is:
//!
//! 1. [`model`] holds the parameter sets (a common CIR variance scaled per
//!    asset, or one CIR variance per asset) plus correlated compound Poisson
//!    jumps.
//! 2. [`charfn`] evaluates the closed-form characteristic function of the
//!    log-price increment at complex arguments.
//! 3. [`payoff_transform`] gives the Fourier transform of the unit-strike
//!    spread payoff through the complex gamma function.
//! 4. [`fft_pricer`] lays both on a damped two-dimensional lattice, inverts
//!    it with a radix-2 FFT and reads the price off the grid node that sits
//!    exactly on the initial log-moneyness.
//!
//! [`mc_engine`] is an independent Euler Monte Carlo simulation of the same
//! dynamics, used to cross-check prices and characteristic functions.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. The `parallel` feature spreads grid assembly, the transform and
//! Monte Carlo paths over a rayon pool without changing any result bit.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod charfn;
mod cmath;
pub mod error;
pub mod fft_pricer;
pub mod linalg;
pub mod mc_engine;
pub mod model;
pub mod payoff_transform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
