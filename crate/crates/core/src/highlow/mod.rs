//! High-low frequency decomposition and the modified Hamiltonian experiment.

mod datum;
mod experiment;
mod params;
mod split;

pub use datum::{synthetic_datum, DatumFamily, DatumSpec, FIT_TOP};
pub use experiment::{
    fit_slope, i_prime_check, i_prime_rhs, log_log_slope, run_experiment, ExperimentReport, IPrimeCheck,
};
pub use params::{
    compute_theta, deviation_exponent, exponent_pair, growth_condition_ok, is_admissible, p_max, predicted_t, qa,
    HighLowParams,
};
pub use split::{k_functional_estimate, low_sobolev_norm, split_data, split_norms, SplitData, SplitNorms};
