//! Quantum states over one sector or a direct sum of sectors.
//!
//! Pure states keep one amplitude block per sector; cross-sector coherence is
//! retained implicitly because a number-conserving Hamiltonian never mixes
//! blocks, so each block only accumulates its own phase. Mixed states store
//! one density block per sector (block-diagonal). Promoting a multi-sector
//! pure state to mixed drops cross-sector coherences; observables diagonal in
//! the sector decomposition (photon numbers, P_up, chirality) are unaffected.

use std::sync::Arc;

use ndarray::{Array1, Array2};

use super::basis::{FockBasis, FockState, Spin};
use crate::error::{Error, Result};
use crate::{C64, NORM_TOL, TRACE_TOL};

/// Amplitude components grouped by traced-out environment configuration.
/// Ordered map: the accumulation order of the partial trace must not vary
/// between runs, or rerun outputs would differ in the last floating bits.
type EnvGroups = std::collections::BTreeMap<(Spin, Vec<u32>), Vec<(usize, C64)>>;

/// One sector block of a pure state.
#[derive(Clone, Debug)]
pub struct PureBlock {
    pub basis: Arc<FockBasis>,
    pub amp: Array1<C64>,
}

/// Pure state: amplitude vector over one sector or an ordered direct sum.
#[derive(Clone, Debug)]
pub struct PureState {
    blocks: Vec<PureBlock>,
}

impl PureState {
    /// Single-sector state; the norm must be 1 within tolerance.
    pub fn single(basis: Arc<FockBasis>, amp: Array1<C64>) -> Result<Self> {
        Self::from_blocks(vec![PureBlock { basis, amp }])
    }

    /// Direct-sum state from per-sector blocks (ascending, distinct sectors).
    pub fn from_blocks(blocks: Vec<PureBlock>) -> Result<Self> {
        for b in &blocks {
            if b.amp.len() != b.basis.dim() {
                return Err(Error::DimensionMismatch {
                    expected: b.basis.dim(),
                    got: b.amp.len(),
                });
            }
        }
        for w in blocks.windows(2) {
            if w[0].basis.n_total() >= w[1].basis.n_total() || w[0].basis.d() != w[1].basis.d() {
                return Err(Error::InvalidEvolutionSpec(
                    "direct-sum blocks must have ascending sectors over one mode count".into(),
                ));
            }
        }
        let st = PureState { blocks };
        let norm = st.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(st)
    }

    /// Basis state |s; occ> within the matching sector.
    pub fn basis_state(basis: Arc<FockBasis>, state: &FockState) -> Result<Self> {
        let k = basis.index_of(state).ok_or_else(|| Error::BasisMismatch {
            expected_d: basis.d(),
            expected_n: basis.n_total(),
            got_d: state.occ.len(),
            got_n: state.total_excitation(),
        })?;
        let mut amp = Array1::zeros(basis.dim());
        amp[k] = C64::new(1.0, 0.0);
        Self::single(basis, amp)
    }

    pub fn blocks(&self) -> &[PureBlock] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [PureBlock] {
        &mut self.blocks
    }

    pub fn d(&self) -> usize {
        self.blocks[0].basis.d()
    }

    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.amp.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = C64::new(1.0 / n, 0.0);
            for b in &mut self.blocks {
                b.amp.mapv_inplace(|z| z * inv);
            }
        }
    }

    /// <self|other>; sectors missing from either side contribute zero.
    pub fn overlap(&self, other: &PureState) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for a in &self.blocks {
            for b in &other.blocks {
                if a.basis.same_sector(&b.basis) {
                    s += a
                        .amp
                        .iter()
                        .zip(b.amp.iter())
                        .map(|(x, y)| x.conj() * y)
                        .sum::<C64>();
                }
            }
        }
        s
    }

    /// |<self|other>|^2.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// Weight on the up sublattice.
    pub fn up_weight(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                b.basis
                    .states()
                    .iter()
                    .zip(b.amp.iter())
                    .filter(|(s, _)| s.spin == Spin::Up)
                    .map(|(_, z)| z.norm_sqr())
                    .sum::<f64>()
            })
            .sum()
    }

    /// Block-diagonal density matrix; cross-sector coherences are dropped
    /// (exact for sector-diagonal observables).
    pub fn to_mixed(&self) -> MixedState {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let n = b.amp.len();
                let mut rho = Array2::zeros((n, n));
                for i in 0..n {
                    for j in 0..n {
                        rho[[i, j]] = b.amp[i] * b.amp[j].conj();
                    }
                }
                MixedBlock {
                    basis: b.basis.clone(),
                    rho,
                }
            })
            .collect();
        MixedState { blocks }
    }

    /// Reduced density matrix of mode `j` (1-based) on span{|0..max_level>},
    /// tracing out the qubit and the other modes. Keeps cross-sector
    /// coherences of the full pure state.
    pub fn reduced_single_mode(&self, j: usize, max_level: usize) -> Result<Array2<C64>> {
        let jm = self.blocks[0].basis.mode_index(j)?;
        let dim = max_level + 1;
        let mut rho = Array2::<C64>::zeros((dim, dim));
        // group amplitudes by environment (spin, occupations without mode j)
        let mut env: EnvGroups = std::collections::BTreeMap::new();
        for b in &self.blocks {
            for (k, st) in b.basis.states().iter().enumerate() {
                let mut rest = st.occ.clone();
                let nj = rest.remove(jm) as usize;
                env.entry((st.spin, rest)).or_default().push((nj, b.amp[k]));
            }
        }
        for comps in env.values() {
            for &(n1, a1) in comps {
                if n1 >= dim {
                    continue;
                }
                for &(n2, a2) in comps {
                    if n2 < dim {
                        rho[[n1, n2]] += a1 * a2.conj();
                    }
                }
            }
        }
        Ok(rho)
    }

    /// Reduced density matrix of modes (j, k), indexed row-major as
    /// n_j * (max_level+1) + n_k.
    pub fn reduced_two_modes(&self, j: usize, k: usize, max_level: usize) -> Result<Array2<C64>> {
        let jm = self.blocks[0].basis.mode_index(j)?;
        let km = self.blocks[0].basis.mode_index(k)?;
        if jm == km {
            return Err(Error::EqualModes(j));
        }
        let dim = max_level + 1;
        let mut rho = Array2::<C64>::zeros((dim * dim, dim * dim));
        let mut env: EnvGroups = std::collections::BTreeMap::new();
        for b in &self.blocks {
            for (s, st) in b.basis.states().iter().enumerate() {
                let nj = st.occ[jm] as usize;
                let nk = st.occ[km] as usize;
                if nj >= dim || nk >= dim {
                    continue;
                }
                let rest: Vec<u32> = st
                    .occ
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != jm && *i != km)
                    .map(|(_, &n)| n)
                    .collect();
                env.entry((st.spin, rest))
                    .or_default()
                    .push((nj * dim + nk, b.amp[s]));
            }
        }
        for comps in env.values() {
            for &(i1, a1) in comps {
                for &(i2, a2) in comps {
                    rho[[i1, i2]] += a1 * a2.conj();
                }
            }
        }
        Ok(rho)
    }
}

/// One sector block of a density matrix.
#[derive(Clone, Debug)]
pub struct MixedBlock {
    pub basis: Arc<FockBasis>,
    pub rho: Array2<C64>,
}

/// Block-diagonal density matrix over sectors.
#[derive(Clone, Debug)]
pub struct MixedState {
    pub blocks: Vec<MixedBlock>,
}

impl MixedState {
    pub fn trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.rho.diag().iter().map(|z| z.re).sum::<f64>())
            .sum()
    }

    /// Hermiticity + unit trace; eigenvalue positivity via `min_eigenvalue`.
    pub fn validate(&self) -> Result<()> {
        for b in &self.blocks {
            let mut defect = 0.0f64;
            for i in 0..b.rho.nrows() {
                for j in i..b.rho.ncols() {
                    defect = defect.max((b.rho[[i, j]] - b.rho[[j, i]].conj()).norm());
                }
            }
            if defect > 1e-10 {
                return Err(Error::NotHermitian { defect });
            }
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace: tr });
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let mut min = f64::INFINITY;
        for b in &self.blocks {
            let (vals, _) = crate::linalg::eigh_c(&b.rho)?;
            min = min.min(vals.iter().cloned().fold(f64::INFINITY, f64::min));
        }
        Ok(min)
    }
}

/// Pure amplitude vector or block-diagonal density matrix.
#[derive(Clone, Debug)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(MixedState),
}

impl QuantumState {
    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            QuantumState::Pure(p) => Some(p),
            QuantumState::Mixed(_) => None,
        }
    }

    pub fn as_mixed(&self) -> Option<&MixedState> {
        match self {
            QuantumState::Mixed(m) => Some(m),
            QuantumState::Pure(_) => None,
        }
    }
}

/// Two-mode binomial zero-energy state on |down; n, N-n>:
/// amplitudes sqrt(C(N,n)) lambda2^n (-lambda1)^(N-n).
pub fn binomial_state(n_total: u32, lambda1: f64, lambda2: f64) -> Result<PureState> {
    check_lambda_pair(lambda1, lambda2)?;
    let basis = FockBasis::enumerate(2, n_total)?;
    let mut amp = Array1::<C64>::zeros(basis.dim());
    for (n, a) in binomial_amplitudes(n_total, lambda1, lambda2)
        .into_iter()
        .enumerate()
    {
        let k = basis
            .index_of(&FockState::new(
                Spin::Down,
                vec![n as u32, n_total - n as u32],
            ))
            .expect("binomial support is in-sector");
        amp[k] = C64::new(a, 0.0);
    }
    let mut st = PureState::single(basis, amp)?;
    st.normalize();
    Ok(st)
}

/// The amplitude on |down; n, N-n> for n = 0..=N.
pub fn binomial_amplitudes(n_total: u32, lambda1: f64, lambda2: f64) -> Vec<f64> {
    (0..=n_total)
        .map(|n| {
            let mut c = 1.0f64; // sqrt(N choose n), built factor by factor
            for i in 0..n {
                c *= ((n_total - i) as f64 / (i + 1) as f64).sqrt();
            }
            c * lambda2.powi(n as i32) * (-lambda1).powi((n_total - n) as i32)
        })
        .collect()
}

pub fn check_lambda_pair(lambda1: f64, lambda2: f64) -> Result<()> {
    if (lambda1 * lambda1 + lambda2 * lambda2 - 1.0).abs() > 1e-9 {
        Err(Error::UnnormalizedPair {
            l1: lambda1,
            l2: lambda2,
        })
    } else {
        Ok(())
    }
}

/// Report on a coherent-state sector truncation.
#[derive(Clone, Copy, Debug)]
pub struct TruncationReport {
    pub n_max: u32,
    pub discarded_weight: f64,
}

/// Default truncation rule: N_max = ceil(<N> + 6 sqrt(<N>) + 4).
pub fn default_n_max(mean_total_photons: f64) -> u32 {
    (mean_total_photons + 6.0 * mean_total_photons.sqrt() + 4.0).ceil() as u32
}

/// Product of coherent states |alpha_1 .. alpha_d> with the qubit in `spin`,
/// laid out as a direct sum over sectors 0..=N_max with Poissonian weights.
pub fn coherent_product_state(
    alphas: &[C64],
    spin: Spin,
    n_max: Option<u32>,
) -> Result<(PureState, TruncationReport)> {
    let d = alphas.len();
    if d == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    let mean: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
    let n_max = n_max.unwrap_or_else(|| default_n_max(mean));
    let threshold = 1e-6;

    let mut blocks = Vec::new();
    let mut captured = 0.0f64;
    for n in 0..=n_max {
        let Some(photons) = n.checked_sub(spin.excitation()) else {
            continue;
        };
        let basis = FockBasis::enumerate(d, n)?;
        let mut amp = Array1::<C64>::zeros(basis.dim());
        for (k, st) in basis.states().iter().enumerate() {
            if st.spin != spin {
                continue;
            }
            debug_assert_eq!(st.occ.iter().sum::<u32>(), photons);
            // e^{-sum|alpha|^2/2} prod_j alpha_j^{n_j} / sqrt(n_j!)
            let mut a = C64::new((-mean / 2.0).exp(), 0.0);
            for (j, &nj) in st.occ.iter().enumerate() {
                for i in 1..=nj {
                    a *= alphas[j] / C64::new((i as f64).sqrt(), 0.0);
                }
            }
            amp[k] = a;
        }
        captured += amp.iter().map(|z| z.norm_sqr()).sum::<f64>();
        blocks.push(PureBlock { basis, amp });
    }
    let discarded = (1.0 - captured).max(0.0);
    if discarded > threshold {
        // Poisson tail shrinks ~e^{-x}; stepping the bound by sqrt(mean)
        // chunks until the tail is small gives the required N_max.
        let mut req = n_max;
        let mut tail = discarded;
        while tail > threshold && req < n_max + 200 {
            req += (mean.sqrt().ceil() as u32).max(2);
            tail *= 0.05;
        }
        return Err(Error::TruncationFailure {
            n_max,
            discarded,
            threshold,
            required: req,
        });
    }
    let mut st = PureState { blocks };
    st.normalize();
    let norm = st.norm();
    debug_assert!((norm - 1.0).abs() < 1e-12);
    Ok((
        st,
        TruncationReport {
            n_max,
            discarded_weight: discarded,
        },
    ))
}
