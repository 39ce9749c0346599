//! Protocol engine: strategy descriptions, the symbolic (label-level)
//! simulation of the counter gates and readouts, and the Monte Carlo driver.

pub mod montecarlo;
pub mod strategy;
pub mod symbolic;

pub use montecarlo::{monte_carlo, sample_run, MonteCarloEstimate, BATCH_SIZE};
pub use strategy::{AuxInit, Readout, Strategy, StrategySpec, MAX_EMBEDDED};
pub use symbolic::{counter_update, qudit_counter_update, readout_full, readout_subspace, run_eng, SubspaceOutcome, SymbolicAux};
