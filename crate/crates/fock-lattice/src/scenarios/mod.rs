//! End-to-end experiment runners binding model + dynamics + analysis +
//! readout into the named scenarios.

mod haldane;
mod landau;
mod transport;
mod vhe;

pub use haldane::run_haldane;
pub use landau::run_landau_spectroscopy;
pub use transport::run_ssh_transport;
pub use vhe::{run_classical_quantum_sweep, run_vhe_binomial, run_vhe_coherent};

use std::sync::Arc;

use ndarray::Array1;

use crate::analysis::{LatticeMap, WignerField};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fock::{binomial_state, FockBasis, FockState, PureState};
use crate::C64;

/// Observable snapshot at one time.
pub struct Snapshot {
    pub t_ns: f64,
    pub lattice: Option<LatticeMap>,
    /// Labelled Wigner fields (single-mode maps or two-mode plane cuts).
    pub wigner: Vec<(String, WignerField)>,
}

/// Extra rectangular output (spectra, peak lists, sweep summaries).
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Everything a scenario produces; every series shares `times_ns`.
pub struct ScenarioResult {
    pub scenario: &'static str,
    pub config_echo: String,
    pub times_ns: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
    pub snapshots: Vec<Snapshot>,
    pub tables: Vec<Table>,
    pub metrics: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl ScenarioResult {
    pub fn series_named(&self, name: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }
}

/// Dispatches a parsed config to its runner.
pub fn run(config: &RunConfig) -> Result<ScenarioResult> {
    match config {
        RunConfig::Transport(c) => run_ssh_transport(c),
        RunConfig::Landau(c) => run_landau_spectroscopy(c),
        RunConfig::VheBinomial(c) => run_vhe_binomial(c),
        RunConfig::VheCoherent(c) => run_vhe_coherent(c),
        RunConfig::Haldane(c) => run_haldane(c),
        RunConfig::ClassicalQuantum(c) => run_classical_quantum_sweep(c),
    }
}

/// Sample grid [0, horizon] every dt, with extra times merged in.
pub(crate) fn sample_grid(horizon: f64, dt: f64, extra: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = Vec::new();
    let mut t = 0.0;
    while t < horizon - 1e-9 {
        ts.push(t);
        t += dt;
    }
    ts.push(horizon);
    for &e in extra {
        if e >= 0.0 && e <= horizon + 1e-9 {
            ts.push(e.min(horizon));
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    ts
}

/// Embeds a d=2 state onto modes (j, k) of a d=3 sector (third mode empty).
pub(crate) fn embed_two_mode_state(state: &PureState, j: usize, k: usize) -> Result<PureState> {
    if state.d() != 2 {
        return Err(Error::WrongModeCount {
            required: 2,
            got: state.d(),
        });
    }
    let mut blocks = Vec::new();
    for b in state.blocks() {
        let b3 = FockBasis::enumerate(3, b.basis.n_total())?;
        let jm = b3.mode_index(j)?;
        let km = b3.mode_index(k)?;
        if jm == km {
            return Err(Error::EqualModes(j));
        }
        let mut amp = Array1::<C64>::zeros(b3.dim());
        for (i, st) in b.basis.states().iter().enumerate() {
            let mut occ = vec![0u32; 3];
            occ[jm] = st.occ[0];
            occ[km] = st.occ[1];
            let t = b3
                .index_of(&FockState::new(st.spin, occ))
                .expect("embedding stays in-sector");
            amp[t] = b.amp[i];
        }
        blocks.push(crate::fock::PureBlock { basis: b3, amp });
    }
    PureState::from_blocks(blocks)
}

/// Binomial zero-energy state embedded on modes (1,2) of the d=3 sector.
pub(crate) fn binomial_d3(n: u32, lambda1: f64, lambda2: f64) -> Result<PureState> {
    embed_two_mode_state(&binomial_state(n, lambda1, lambda2)?, 1, 2)
}

/// Accumulated signed area of a planar trajectory, positive for
/// counter-clockwise circulation about the origin of the (x, y) axes.
pub(crate) fn signed_area(xs: &[f64], ys: &[f64]) -> f64 {
    let mut area = 0.0;
    for k in 0..xs.len().saturating_sub(1) {
        area += 0.5 * (xs[k] * ys[k + 1] - xs[k + 1] * ys[k]);
    }
    area
}

/// Midrange crossings of a series: (index, upward?) pairs.
pub(crate) fn midrange_crossings(values: &[f64]) -> Vec<(usize, bool)> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mid = 0.5 * (max + min);
    let mut out = Vec::new();
    for k in 0..values.len() - 1 {
        let a = values[k] - mid;
        let b = values[k + 1] - mid;
        if a * b < 0.0 {
            out.push((k, b > a));
        }
    }
    out
}

/// Per-sector coherent-state Hamiltonian set for a static JC + diagonal
/// potential problem over sectors 0..=n_max.
pub(crate) fn coherent_sector_hamiltonians(
    g0: f64,
    delta: f64,
    plus_mode: usize,
    minus_mode: usize,
    blocks: &[crate::fock::PureBlock],
) -> Result<Vec<crate::dynamics::TimeDependentH>> {
    use crate::model::{build_jc, linear_potential, SystemConfig};
    let mut hs = Vec::with_capacity(blocks.len());
    for b in blocks {
        let basis: &Arc<FockBasis> = &b.basis;
        let jc = build_jc(&SystemConfig::resonant(3, g0), &[g0, g0, g0], basis)?;
        let h = if delta != 0.0 {
            jc.add(&linear_potential(basis, delta, plus_mode, minus_mode)?)?
                .assert_hermitian()?
        } else {
            jc
        };
        hs.push(crate::dynamics::TimeDependentH::from_static(h)?);
    }
    Ok(hs)
}
