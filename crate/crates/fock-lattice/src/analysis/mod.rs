//! Spectral and topological analysis: diagonalization, Landau-level grouping,
//! chirality, FFT spectroscopy, lattice maps, and Wigner functions.

mod observables;
mod spectrum;
pub mod wigner;

pub use observables::{
    classify_phase_progression, fft_spectroscopy, lattice_map, mean_photons, mean_photons_mixed,
    mean_photons_pure, valley_phase_readout, FftReport, LatticeMap, LatticeSite, ModeObservables,
    PhaseReadout, Rotation, SpectralPeak,
};
pub use spectrum::{
    chirality_operator, diagonalize, diagonalize_with_chirality, group_landau_levels, LevelGroup,
    SpectrumReport,
};
pub use wigner::{
    displacement, unitarity_defect, wigner, wigner_two_mode_cut, CutAxes, WignerField, WignerGrid,
};
