//! Nonlinear dynamics: energies, Strang splitting and the Duhamel iteration.

mod duhamel;
mod energy;
mod state;
mod strang;

pub use duhamel::{
    contraction_factor_at, contraction_time, duhamel_map, linear_trajectory, local_time_exponent, picard_solve,
    sup_l2_distance, ContractionSweep, PicardOptions, PicardOutcome,
};
pub use energy::{conserved_energy, energy, field_hamiltonian, hamiltonian, nonlinearity, potential};
pub use state::{from_first_order, to_first_order, FirstOrderState, KgState};
pub use strang::{
    evolve, evolve_with, strang_step, ConservedEnergyObserver, EnergyObserver, EvolveOptions, FnObserver, Observer,
    Series, Stepper, Trajectory, BLOWUP_GUARD,
};
