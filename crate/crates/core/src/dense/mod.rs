//! Dense state-vector and density-matrix simulation for small systems.

pub mod channels;
pub mod dump;
pub mod gates;
pub mod protocol;
pub mod state;

pub use channels::{
    difference_distribution, embed_pairs, embed_pairs_pure, measure_parity_pair, noise_density,
    reembed_and_correct, sample_parity_pair, twirl_channel, twirl_to_isotropic, twirl_to_werner,
    MeasurementRecord, ParityOutcome,
};
pub use gates::{
    apply_amplitude_shift, apply_bcx, apply_bcx_inverse, apply_bgcx, apply_bgcx_inverse, apply_eng,
    apply_eng_inverse, make_bell, make_qudit_bell, Pair,
};
pub use protocol::{dense_run, DenseRun};
pub use state::{pure_trace_distance, total_variation, trace_distance, DensityMatrix, Layout, StateVector, TraceDistance};
