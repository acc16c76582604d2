//! Exact statevector simulation for the gate alphabet used by the feature
//! maps and the swap test, plus sampled fidelity estimators.
//!
//! Qubit 0 is the most significant bit of a basis index: for a two-qubit
//! register the amplitudes are ordered |00⟩, |01⟩, |10⟩, |11⟩ with the left
//! digit belonging to qubit 0.

mod amplitude;
mod density;
mod gate;
mod state;
mod swap_test;

pub use amplitude::{
    amplitude_estimation_error_bound, amplitude_estimation_outcomes, amplitude_estimation_sample,
};
pub use density::DensityMatrix;
pub use gate::{apply_gate, Gate, GateKind};
pub use state::{fidelity, new_zero_state, Statevector, MAX_QUBITS};
pub use swap_test::{
    estimate_kernel, exact_swap_test, sample_swap_test, swap_test_probability, EstimationMode,
    SwapTestEstimate,
};
