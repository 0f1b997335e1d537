//! Fock-state lattice simulator.
//!
//! Topological states of quantized light in lattices of Fock states
//! |s; n_1..n_d> built from d tunably-coupled resonators and one qubit.
//! The crate constructs multimode Jaynes-Cummings Hamiltonians in
//! fixed-excitation sectors, evolves them under the control protocols of the
//! underlying experiment (SSH coupling sweeps, static valley potentials,
//! Floquet-modulated couplings), and analyzes the results (pseudo-Landau
//! spectra, chirality, Wigner functions, swap readout and tomography).
//!
//! Start with the runnable examples, one per capability:
//!
//! ```text
//! cargo run --release --example transport          # SSH zero-mode transport
//! cargo run --release --example landau_levels      # sqrt(n) pseudo-Landau spectroscopy
//! cargo run --release --example vhe_binomial       # valley Hall drift of a binomial state
//! cargo run --release --example vhe_coherent       # valley Hall with coherent states
//! cargo run --release --example haldane            # Floquet Haldane chiral edge currents
//! cargo run --release --example classical_quantum  # classical-to-quantum crossover sweep
//! cargo run --release --example readout_tomography # swap readout + displacement tomography
//! cargo run --release --example wigner_gallery     # displaced-parity Wigner functions
//! ```
//!
//! The same scenarios are scriptable through the thin `fsl` binary
//! (`fsl transport --out runs/`, `fsl selftest`, ...), which writes
//! deterministic CSV bundles; see the README for the config schema.
//!
//! Units: times are in ns and every frequency-like quantity is stored as an
//! angular frequency in rad/ns. Configs and CLI accept MHz meaning omega/2pi,
//! converted once at the boundary by [`units::ang_mhz`].

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fock;
mod linalg;
pub mod model;
pub mod output;
pub mod readout;
pub mod scenarios;

pub use error::{Error, Result};

/// Complex double, the amplitude scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Pure-state norm tolerance.
pub const NORM_TOL: f64 = 1e-10;
/// Density-matrix trace tolerance.
pub const TRACE_TOL: f64 = 1e-10;
/// Hermiticity tolerance for flagged operators (relative to entry scale).
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Unit conversions between the MHz/ns boundary and internal angular units.
pub mod units {
    use std::f64::consts::PI;

    /// omega [rad/ns] from f = omega/2pi in MHz.
    pub fn ang_mhz(f_mhz: f64) -> f64 {
        2.0 * PI * f_mhz * 1e-3
    }

    /// f = omega/2pi in MHz from omega [rad/ns].
    pub fn mhz_ang(omega: f64) -> f64 {
        omega / (2.0 * PI) * 1e3
    }

    /// Cyclic frequency in cycles/ns from MHz.
    pub fn cycles_mhz(f_mhz: f64) -> f64 {
        f_mhz * 1e-3
    }
}
