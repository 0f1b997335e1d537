//! Fock-state lattice bases, operators, and states.

mod basis;
mod op;
mod state;

pub use basis::{sector_dim_closed_form, FockBasis, FockState, Spin};
pub use op::{
    annihilation, creation, hop, mode_annihilation, mode_number, number_op, sigma_z, spin_ops,
    up_projector, Operator, SpinOps,
};
pub use state::{
    binomial_amplitudes, binomial_state, check_lambda_pair, coherent_product_state, default_n_max,
    MixedBlock, MixedState, PureBlock, PureState, QuantumState, TruncationReport,
};
