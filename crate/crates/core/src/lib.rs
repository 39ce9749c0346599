//! Collective verification of Bell-pair ensembles.
//!
//! An ensemble of `n` noisy Bell pairs is coupled to an auxiliary qudit
//! Bell pair by counter gates; the auxiliary amplitude index then records the
//! net number of amplitude errors, and a single (or subspace) readout of the
//! auxiliary pair decides whether to accept the ensemble.
//!
//! * [`analytic`]: closed-form failure probabilities and resource solvers.
//! * [`oracle`]: exact enumeration used to cross-check the closed forms.
//! * [`protocol`]: symbolic protocol engine and Monte Carlo sampler.
//! * [`dense`]: small dense state-vector / density-matrix simulator.
//! * [`ghz`]: the same construction for GHZ ensembles.
//! * [`reproduce`]: reference datasets in a fixed CSV schema.

pub mod analytic;
pub mod arith;
pub mod crosscheck;
pub mod dense;
pub mod error;
pub mod ghz;
pub mod model;
pub mod oracle;
pub mod protocol;
pub mod reproduce;

pub use error::{Error, Result};
