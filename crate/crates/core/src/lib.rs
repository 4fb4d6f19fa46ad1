//! Channel-capacity machinery for the nonlinear SWIPT integrated receiver.
//!
//! The rectifier output is modelled by the 4th-order Taylor expansion of the
//! diode law, `y = k2|x + n|^2 + k4|x + n|^4 + n_rec`. This crate provides
//!
//! - [`phys`]: link budget, noise powers and diode Taylor coefficients,
//! - [`stats`]: noncentral chi-squared special functions and the input laws
//!   used for the capacity lower bounds,
//! - [`channel`]: the Gaussian closed-form transition density `p(y | u)`
//!   together with an exact numeric transform and a Monte-Carlo sampler,
//! - [`infotheory`]: mutual information on noise-scaled grids, optimized
//!   gamma lower bounds and a mean-constrained Blahut-Arimoto solver.
//!
//! The crate is `no_std` (it needs `alloc`); file formats and the command
//! line live in the companion `swipt-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod channel;
mod error;
pub mod infotheory;
pub mod phys;
pub mod stats;

pub use error::{Error, Result};
