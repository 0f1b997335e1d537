//! Lattice observables: mean photon numbers, site population maps, FFT
//! spectroscopy of Rabi signals, and valley-phase readout.

use ndarray::Array2;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fock::{MixedState, PureState, QuantumState, Spin};
use crate::C64;

/// Per-mode mean photon numbers and the qubit excited population.
#[derive(Clone, Debug)]
pub struct ModeObservables {
    pub mean_photons: Vec<f64>,
    pub p_up: f64,
}

/// <a_j^dag a_j> per mode and P_up, summed over sector blocks.
pub fn mean_photons(state: &QuantumState) -> ModeObservables {
    match state {
        QuantumState::Pure(p) => mean_photons_pure(p),
        QuantumState::Mixed(m) => mean_photons_mixed(m),
    }
}

pub fn mean_photons_pure(state: &PureState) -> ModeObservables {
    let d = state.d();
    let mut mean = vec![0.0; d];
    let mut p_up = 0.0;
    for b in state.blocks() {
        for (k, st) in b.basis.states().iter().enumerate() {
            let w = b.amp[k].norm_sqr();
            for (m, &n) in mean.iter_mut().zip(&st.occ) {
                *m += w * n as f64;
            }
            if st.spin == Spin::Up {
                p_up += w;
            }
        }
    }
    ModeObservables {
        mean_photons: mean,
        p_up,
    }
}

pub fn mean_photons_mixed(state: &MixedState) -> ModeObservables {
    let d = state.blocks[0].basis.d();
    let mut mean = vec![0.0; d];
    let mut p_up = 0.0;
    for b in &state.blocks {
        for (k, st) in b.basis.states().iter().enumerate() {
            let w = b.rho[[k, k]].re.max(0.0);
            for (m, &n) in mean.iter_mut().zip(&st.occ) {
                *m += w * n as f64;
            }
            if st.spin == Spin::Up {
                p_up += w;
            }
        }
    }
    ModeObservables {
        mean_photons: mean,
        p_up,
    }
}

/// One plotted lattice site.
#[derive(Clone, Debug)]
pub struct LatticeSite {
    pub spin: Spin,
    pub occ: Vec<u32>,
    pub x: f64,
    pub y: f64,
    pub population: f64,
}

/// Site populations of one d=3 sector with triangular plot coordinates.
/// Vertices: all photons in R1 (left, origin), R2 (right), R3 (top), as in
/// the population-map figures. The Lifshitz topological edge lies on the
/// incircle.
#[derive(Clone, Debug)]
pub struct LatticeMap {
    pub n_total: u32,
    pub sites: Vec<LatticeSite>,
    pub incircle_center: (f64, f64),
    pub incircle_radius: f64,
}

const VERTEX_R1: (f64, f64) = (0.0, 0.0);
const VERTEX_R2: (f64, f64) = (1.0, 0.0);
const VERTEX_R3: (f64, f64) = (0.5, 0.8660254037844386);

/// Maps one sector of a pure state onto the triangular lattice.
/// Sites on the down sublattice sit at the barycentric point of
/// (n1, n2, n3)/N; up sites inherit the coordinate of their photon part
/// shifted by the fixed sub-offset to the centroid of their three
/// down-neighbors.
pub fn lattice_map(state: &PureState, sector: u32) -> Result<LatticeMap> {
    let block = state
        .blocks()
        .iter()
        .find(|b| b.basis.n_total() == sector)
        .ok_or_else(|| Error::InvalidEvolutionSpec(format!("no sector N={sector} in state")))?;
    if block.basis.d() != 3 {
        return Err(Error::WrongModeCount {
            required: 3,
            got: block.basis.d(),
        });
    }
    let n = sector as f64;
    if sector == 0 {
        return Err(Error::InvalidEvolutionSpec(
            "sector N=0 has no lattice extent".into(),
        ));
    }
    let sub_offset = (
        (VERTEX_R1.0 + VERTEX_R2.0 + VERTEX_R3.0) / (3.0 * n),
        (VERTEX_R1.1 + VERTEX_R2.1 + VERTEX_R3.1) / (3.0 * n),
    );
    let mut sites = Vec::with_capacity(block.basis.dim());
    for (k, st) in block.basis.states().iter().enumerate() {
        let (w1, w2, w3) = (
            st.occ[0] as f64 / n,
            st.occ[1] as f64 / n,
            st.occ[2] as f64 / n,
        );
        let mut x = w1 * VERTEX_R1.0 + w2 * VERTEX_R2.0 + w3 * VERTEX_R3.0;
        let mut y = w1 * VERTEX_R1.1 + w2 * VERTEX_R2.1 + w3 * VERTEX_R3.1;
        if st.spin == Spin::Up {
            x += sub_offset.0;
            y += sub_offset.1;
        }
        sites.push(LatticeSite {
            spin: st.spin,
            occ: st.occ.clone(),
            x,
            y,
            population: block.amp[k].norm_sqr(),
        });
    }
    // incircle of the equilateral triangle with unit side
    let center = (
        (VERTEX_R1.0 + VERTEX_R2.0 + VERTEX_R3.0) / 3.0,
        (VERTEX_R1.1 + VERTEX_R2.1 + VERTEX_R3.1) / 3.0,
    );
    Ok(LatticeMap {
        n_total: sector,
        sites,
        incircle_center: center,
        incircle_radius: 1.0 / (2.0 * 3f64.sqrt()),
    })
}

/// One extracted spectral peak.
#[derive(Clone, Copy, Debug)]
pub struct SpectralPeak {
    /// Peak frequency in MHz (cycles), from the padded FFT grid.
    pub freq_mhz: f64,
    /// The displayed halved frequency f/2 in MHz.
    pub half_freq_mhz: f64,
    pub magnitude: f64,
}

/// FFT spectroscopy report.
#[derive(Clone, Debug)]
pub struct FftReport {
    pub peaks: Vec<SpectralPeak>,
    /// Median magnitude used as the noise floor.
    pub floor: f64,
    /// Unpadded frequency resolution in MHz.
    pub resolution_mhz: f64,
}

/// Hann-windowed, 4x zero-padded FFT of a uniformly sampled P_up(t) signal
/// with peak extraction. Peaks are local maxima above the floor
/// max(5 x median magnitude, 1% of the strongest line), thinned by
/// non-maximum suppression over four unpadded bins (the large Hann sidelobes
/// of a strong line sit closer than that; genuine sqrt(n)-ladder lines sit
/// farther apart, and their more distant sidelobes fall below 1%). `times`
/// are in ns; frequencies are reported in MHz together with the halved axis
/// used for comparing against eigenenergies.
pub fn fft_spectroscopy(signal: &[f64], times: &[f64]) -> Result<FftReport> {
    const MIN_LEN: usize = 256;
    const PAD: usize = 4;
    const FLOOR_FACTOR: f64 = 5.0;
    const REL_FLOOR: f64 = 0.01;
    if signal.len() < MIN_LEN {
        return Err(Error::SignalTooShort {
            got: signal.len(),
            needed: MIN_LEN,
        });
    }
    if times.len() != signal.len() {
        return Err(Error::DimensionMismatch {
            expected: signal.len(),
            got: times.len(),
        });
    }
    let dt = times[1] - times[0];
    let mut worst = 0.0f64;
    for w in times.windows(2) {
        worst = worst.max(((w[1] - w[0]) - dt).abs());
    }
    if worst > 1e-9 * dt.abs().max(1e-12) {
        return Err(Error::NonUniformGrid(worst));
    }

    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<C64> = (0..PAD * n)
        .map(|i| {
            if i < n {
                let w =
                    0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n as f64 - 1.0)).cos());
                C64::new((signal[i] - mean) * w, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    FftPlanner::new()
        .plan_fft_forward(PAD * n)
        .process(&mut buf);
    let half = PAD * n / 2;
    let mags: Vec<f64> = buf[..half].iter().map(|z| z.norm()).collect();
    let mut sorted = mags.clone();
    sorted.sort_by(f64::total_cmp);
    let floor = sorted[half / 2];
    let threshold = (FLOOR_FACTOR * floor).max(REL_FLOOR * sorted[half - 1]);

    // grid in MHz: bin k -> k / (PAD n dt) cycles/ns
    let bin_mhz = 1e3 / (PAD as f64 * n as f64 * dt);
    let resolution_mhz = 1e3 / (n as f64 * dt);
    let guard_bins = 4 * PAD; // skip the DC main lobe
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    for k in guard_bins.max(1)..half - 1 {
        if mags[k] > mags[k - 1] && mags[k] >= mags[k + 1] && mags[k] > threshold {
            candidates.push((k, mags[k]));
        }
    }
    // non-maximum suppression within 4 unpadded bins
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
    let min_sep = 4 * PAD;
    let mut kept: Vec<(usize, f64)> = Vec::new();
    for (k, m) in candidates {
        if kept.iter().all(|&(kk, _)| k.abs_diff(kk) >= min_sep) {
            kept.push((k, m));
        }
    }
    kept.sort_by_key(|&(k, _)| k);
    let peaks = kept
        .into_iter()
        .map(|(k, m)| {
            let f = k as f64 * bin_mhz;
            SpectralPeak {
                freq_mhz: f,
                half_freq_mhz: f / 2.0,
                magnitude: m,
            }
        })
        .collect();
    Ok(FftReport {
        peaks,
        floor,
        resolution_mhz,
    })
}

/// Rotation sense of the valley phase progression.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Rotation {
    /// Phases advance by about +2pi/3 from mode j to j+1 (chirality C > 0).
    CounterClockwise,
    /// Phases regress by about -2pi/3 (chirality C < 0).
    Clockwise,
}

/// Valley phase readout result.
#[derive(Clone, Debug)]
pub struct PhaseReadout {
    /// arg of the Wigner-maximum location per mode, in radians.
    pub phases: Vec<f64>,
    pub rotation: Rotation,
}

/// Classifies the phase progression of per-mode Wigner maxima. Inputs are the
/// maximum locations (as complex points) of the three single-mode Wigner
/// functions; modes with |beta_max| below `min_radius` are ambiguous.
pub fn classify_phase_progression(maxima: &[C64; 3], min_radius: f64) -> Result<PhaseReadout> {
    for (j, b) in maxima.iter().enumerate() {
        if b.norm() < min_radius {
            return Err(Error::AmbiguousPhase(format!(
                "mode {} Wigner maximum at |beta| = {:.3} is too close to vacuum",
                j + 1,
                b.norm()
            )));
        }
    }
    let phases: Vec<f64> = maxima.iter().map(|b| b.arg()).collect();
    let wrap = |x: f64| {
        let mut y = x % (2.0 * std::f64::consts::PI);
        if y <= -std::f64::consts::PI {
            y += 2.0 * std::f64::consts::PI;
        } else if y > std::f64::consts::PI {
            y -= 2.0 * std::f64::consts::PI;
        }
        y
    };
    let d21 = wrap(phases[1] - phases[0]);
    let d32 = wrap(phases[2] - phases[1]);
    let rotation = if d21 > 0.0 && d32 > 0.0 {
        Rotation::CounterClockwise
    } else if d21 < 0.0 && d32 < 0.0 {
        Rotation::Clockwise
    } else {
        return Err(Error::AmbiguousPhase(format!(
            "inconsistent phase steps: d21 = {d21:.3} rad, d32 = {d32:.3} rad"
        )));
    };
    Ok(PhaseReadout { phases, rotation })
}

/// Full valley phase readout from per-mode reduced density matrices: locates
/// each Wigner maximum on `grid`, checks purity, classifies the progression.
pub fn valley_phase_readout(
    rhos: &[Array2<C64>; 3],
    grid: &super::wigner::WignerGrid,
    min_purity: f64,
) -> Result<PhaseReadout> {
    let mut maxima = [C64::new(0.0, 0.0); 3];
    for (j, rho) in rhos.iter().enumerate() {
        let tr: f64 = rho.diag().iter().map(|z| z.re).sum();
        let purity = rho.dot(rho).diag().iter().map(|z| z.re).sum::<f64>() / (tr * tr);
        if purity < min_purity {
            return Err(Error::AmbiguousPhase(format!(
                "mode {} purity {purity:.3} below {min_purity}",
                j + 1
            )));
        }
        let field = super::wigner::wigner(rho, grid)?;
        let (re, im, _) = field.max_point();
        maxima[j] = C64::new(re, im);
    }
    classify_phase_progression(&maxima, 0.15)
}
