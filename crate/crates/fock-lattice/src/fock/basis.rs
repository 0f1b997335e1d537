//! Enumeration of Fock-state lattice bases.
//!
//! A basis collects every state |s; n_1..n_d> of d resonator modes plus the
//! central qubit with fixed total excitation number N = sum_j n_j + [s = up],
//! which the multimode Jaynes-Cummings Hamiltonian conserves. States are
//! ordered ascending-lexicographically by (s, n_1, ..., n_d) with down < up,
//! so indices are reproducible across runs.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Qubit spin label; `Down` sorts before `Up`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    /// Excitation carried by the qubit: [s = up].
    pub fn excitation(self) -> u32 {
        match self {
            Spin::Down => 0,
            Spin::Up => 1,
        }
    }

    /// sigma_z eigenvalue, +1 on up and -1 on down.
    pub fn sigma_z(self) -> f64 {
        match self {
            Spin::Down => -1.0,
            Spin::Up => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Spin::Down => "down",
            Spin::Up => "up",
        }
    }
}

/// One lattice site |s; n_1..n_d>.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState {
    pub spin: Spin,
    pub occ: Vec<u32>,
}

impl FockState {
    pub fn new(spin: Spin, occ: Vec<u32>) -> Self {
        FockState { spin, occ }
    }

    /// Total excitation number sum_j n_j + [s = up].
    pub fn total_excitation(&self) -> u32 {
        self.occ.iter().sum::<u32>() + self.spin.excitation()
    }
}

/// All states of a fixed-N sector, with a bijective state <-> index map.
#[derive(Debug)]
pub struct FockBasis {
    d: usize,
    n_total: u32,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl FockBasis {
    /// Enumerate the sector with `d` modes and total excitation `n_total`.
    pub fn enumerate(d: usize, n_total: u32) -> Result<Arc<Self>> {
        if d == 0 {
            return Err(Error::InvalidModeCount(0));
        }
        let mut states = Vec::new();
        for spin in [Spin::Down, Spin::Up] {
            let Some(photons) = n_total.checked_sub(spin.excitation()) else {
                continue;
            };
            let mut occ = vec![0u32; d];
            push_compositions(photons, 0, &mut occ, spin, &mut states);
        }
        states.sort();
        let index = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, s)| (s, k))
            .collect();
        Ok(Arc::new(FockBasis {
            d,
            n_total,
            states,
            index,
        }))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_total(&self) -> u32 {
        self.n_total
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &FockState {
        &self.states[k]
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Checks that `other` describes the same sector.
    pub fn same_sector(&self, other: &FockBasis) -> bool {
        self.d == other.d && self.n_total == other.n_total
    }

    pub fn check_same_sector(&self, other: &FockBasis) -> Result<()> {
        if self.same_sector(other) {
            Ok(())
        } else {
            Err(Error::BasisMismatch {
                expected_d: self.d,
                expected_n: self.n_total,
                got_d: other.d,
                got_n: other.n_total,
            })
        }
    }

    /// Validated 1-based mode index -> 0-based internal index.
    pub fn mode_index(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.d {
            Err(Error::InvalidModeIndex { j, d: self.d })
        } else {
            Ok(j - 1)
        }
    }
}

fn push_compositions(
    remaining: u32,
    mode: usize,
    occ: &mut Vec<u32>,
    spin: Spin,
    out: &mut Vec<FockState>,
) {
    if mode == occ.len() - 1 {
        occ[mode] = remaining;
        out.push(FockState::new(spin, occ.clone()));
        occ[mode] = 0;
        return;
    }
    for n in 0..=remaining {
        occ[mode] = n;
        push_compositions(remaining - n, mode + 1, occ, spin, out);
    }
    occ[mode] = 0;
}

/// Closed-form sector dimension for d = 1, 2, 3.
pub fn sector_dim_closed_form(d: usize, n: u32) -> Option<usize> {
    let n = n as usize;
    match d {
        1 => Some(if n == 0 { 1 } else { 2 }),
        2 => Some(2 * n + 1),
        3 => Some((n + 1) * (n + 1)),
        _ => None,
    }
}
