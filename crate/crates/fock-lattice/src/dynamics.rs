//! Time evolution engines: unitary propagation under time-dependent
//! Hamiltonians and Lindblad propagation with resonator dephasing.
//!
//! Number conservation makes every Hamiltonian block-diagonal over sectors,
//! so states evolve block by block. Static blocks are propagated spectrally
//! (exact); time-dependent blocks use midpoint-sampled piecewise-constant
//! steps with an exact matrix exponential per step, caching the step
//! unitaries over one drive period when the schedule is periodic. An
//! adaptive Dormand-Prince integrator is available as an alternative.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    FockBasis, MixedBlock, MixedState, Operator, PureBlock, PureState, QuantumState,
};
use crate::model::{build_jc, haldane_effective, kappa_from_drive, ControlSchedule, SystemConfig};
use crate::C64;

/// Integration scheme for time-dependent blocks.
#[derive(Clone, Copy, Debug)]
pub enum Integrator {
    /// Piecewise-constant H with midpoint sampling and exact exponential per
    /// step (default; `step` in ns).
    SteppedExponential { step: f64 },
    /// Adaptive Dormand-Prince 5(4).
    AdaptiveRk { rtol: f64, atol: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::SteppedExponential { step: 0.25 }
    }
}

/// Dephasing channel L_j = sqrt(2 gamma_j) a_j^dag a_j on 1-based mode j.
#[derive(Clone, Copy, Debug)]
pub struct CollapseChannel {
    pub mode: usize,
    pub rate: f64,
}

/// What to compute: time window, sample grid, integrator, open-system flags.
#[derive(Clone, Debug)]
pub struct EvolutionSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub sample_times: Vec<f64>,
    pub integrator: Integrator,
    pub open_system: bool,
    pub channels: Vec<CollapseChannel>,
}

impl EvolutionSpec {
    /// Closed-system spec sampling [0, horizon] every `sample_dt`.
    pub fn closed(horizon: f64, sample_dt: f64) -> Self {
        let mut sample_times = Vec::new();
        let mut t = 0.0;
        while t < horizon - 1e-9 {
            sample_times.push(t);
            t += sample_dt;
        }
        sample_times.push(horizon);
        EvolutionSpec {
            t_start: 0.0,
            t_end: horizon,
            sample_times,
            integrator: Integrator::default(),
            open_system: false,
            channels: Vec::new(),
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.integrator = Integrator::SteppedExponential { step };
        self
    }

    pub fn open(mut self, channels: Vec<CollapseChannel>) -> Self {
        self.open_system = true;
        self.channels = channels;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_end <= self.t_start {
            return Err(Error::InvalidEvolutionSpec(format!(
                "t_end {} must exceed t_start {}",
                self.t_end, self.t_start
            )));
        }
        if self.sample_times.is_empty() {
            return Err(Error::InvalidEvolutionSpec("no sample times".into()));
        }
        for w in self.sample_times.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidEvolutionSpec(
                    "sample times must be strictly increasing".into(),
                ));
            }
        }
        let eps = 1e-9;
        if self.sample_times[0] < self.t_start - eps
            || self.sample_times[self.sample_times.len() - 1] > self.t_end + eps
        {
            return Err(Error::InvalidEvolutionSpec(
                "sample times must lie inside [t_start, t_end]".into(),
            ));
        }
        for c in &self.channels {
            if c.rate < 0.0 {
                return Err(Error::NegativeRate(c.rate));
            }
        }
        match self.integrator {
            Integrator::SteppedExponential { step } if step <= 0.0 => Err(
                Error::InvalidEvolutionSpec(format!("nonpositive step {step}")),
            ),
            Integrator::AdaptiveRk { rtol, atol } if rtol <= 0.0 || atol <= 0.0 => Err(
                Error::InvalidEvolutionSpec("nonpositive adaptive tolerance".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Time-dependent Hamiltonian over one sector basis.
pub struct TimeDependentH {
    pub basis: Arc<FockBasis>,
    kind: HKind,
}

enum HKind {
    Static(Array2<C64>),
    Periodic {
        period: f64,
        f: Box<dyn Fn(f64) -> Array2<C64> + Send + Sync>,
    },
    General(Box<dyn Fn(f64) -> Array2<C64> + Send + Sync>),
}

impl TimeDependentH {
    /// Wraps a static Hermitian operator.
    pub fn from_static(op: Operator) -> Result<Self> {
        if !op.is_hermitian() {
            return Err(Error::NotHermitian {
                defect: op.hermiticity_defect(),
            });
        }
        Ok(TimeDependentH {
            basis: op.basis().clone(),
            kind: HKind::Static(op.into_matrix()),
        })
    }

    /// JC Hamiltonian under a coupling schedule plus an optional static term
    /// (potential, Kerr, ...). Static and periodic schedules are propagated
    /// by their faster dedicated paths.
    pub fn jc_schedule(
        config: SystemConfig,
        schedule: ControlSchedule,
        basis: Arc<FockBasis>,
        extra: Option<Operator>,
    ) -> Result<Self> {
        if let Some(x) = &extra {
            basis.check_same_sector(x.basis())?;
            if !x.is_hermitian() {
                return Err(Error::NotHermitian {
                    defect: x.hermiticity_defect(),
                });
            }
        }
        let extra_m = extra.map(Operator::into_matrix);
        match &schedule {
            ControlSchedule::Static { couplings } => {
                let mut h = build_jc(&config, couplings, &basis)?.into_matrix();
                if let Some(x) = &extra_m {
                    h += x;
                }
                Ok(TimeDependentH {
                    basis,
                    kind: HKind::Static(h),
                })
            }
            _ => {
                let period = schedule.period();
                let d = basis.d();
                let basis2 = basis.clone();
                let f = Box::new(move |t: f64| {
                    let g = schedule
                        .couplings_at(t, d)
                        .expect("schedule validated at construction");
                    let mut h = build_jc(&config, &g, &basis2)
                        .expect("couplings stay in-sector")
                        .into_matrix();
                    if let Some(x) = &extra_m {
                        h += x;
                    }
                    h
                });
                Ok(TimeDependentH {
                    basis,
                    kind: match period {
                        Some(p) => HKind::Periodic { period: p, f },
                        None => HKind::General(f),
                    },
                })
            }
        }
    }

    pub fn at(&self, t: f64) -> Array2<C64> {
        match &self.kind {
            HKind::Static(m) => m.clone(),
            HKind::Periodic { f, .. } => f(t),
            HKind::General(f) => f(t),
        }
    }
}

/// Time series of states with per-sample conservation diagnostics.
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    /// |norm - 1| (pure path) or |trace - 1| (mixed path) per sample.
    pub defects: Vec<f64>,
}

impl Trajectory {
    pub fn pure_states(&self) -> impl Iterator<Item = &PureState> {
        self.states.iter().filter_map(|s| s.as_pure())
    }
}

const NORM_DRIFT_TOL: f64 = 1e-8;
const TRACE_DRIFT_TOL: f64 = 1e-7;

fn check_hermitian(h: &Array2<C64>, scale_hint: f64) -> Result<()> {
    let mut defect = 0.0f64;
    let mut scale = scale_hint;
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            defect = defect.max((h[[i, j]] - h[[j, i]].conj()).norm());
            scale = scale.max(h[[i, j]].norm());
        }
    }
    if defect >= 1e-10 * scale.max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// V exp(-i L dt) V^dag from an eigendecomposition.
fn step_unitary(h: &Array2<C64>, dt: f64) -> Result<Array2<C64>> {
    let (vals, vecs) = crate::linalg::eigh_c(h)?;
    let mut phased = vecs.clone();
    for (k, &e) in vals.iter().enumerate() {
        let ph = C64::from_polar(1.0, -e * dt);
        phased.column_mut(k).mapv_inplace(|z| z * ph);
    }
    Ok(phased.dot(&vecs.t().mapv(|z| z.conj())))
}

/// Unitary evolution of one amplitude block; returns the block at each
/// sample time.
fn evolve_block_unitary(
    h: &TimeDependentH,
    amp0: &Array1<C64>,
    spec: &EvolutionSpec,
) -> Result<Vec<Array1<C64>>> {
    match (&h.kind, spec.integrator) {
        (HKind::Static(m), _) => {
            check_hermitian(m, 0.0)?;
            let (vals, vecs) = crate::linalg::eigh_c(m)?;
            let c = vecs.t().mapv(|z| z.conj()).dot(amp0);
            let mut out = Vec::with_capacity(spec.sample_times.len());
            for &t in &spec.sample_times {
                let dt = t - spec.t_start;
                let mut coeff = c.clone();
                for (k, &e) in vals.iter().enumerate() {
                    coeff[k] *= C64::from_polar(1.0, -e * dt);
                }
                out.push(vecs.dot(&coeff));
            }
            Ok(out)
        }
        (_, Integrator::SteppedExponential { step }) => evolve_block_stepped(h, amp0, spec, step),
        (_, Integrator::AdaptiveRk { rtol, atol }) => {
            let mut out = Vec::with_capacity(spec.sample_times.len());
            let mut psi = amp0.clone();
            let mut t = spec.t_start;
            for &ts in &spec.sample_times {
                if ts > t {
                    let hm = h.at(0.5 * (t + ts));
                    check_hermitian(&hm, 0.0)?;
                    psi = dp45(
                        |tt, y| {
                            let m = h.at(tt);
                            m.dot(y).mapv(|z| z * C64::new(0.0, -1.0))
                        },
                        psi,
                        t,
                        ts,
                        rtol,
                        atol,
                    )?;
                    t = ts;
                }
                out.push(psi.clone());
            }
            Ok(out)
        }
    }
}

fn evolve_block_stepped(
    h: &TimeDependentH,
    amp0: &Array1<C64>,
    spec: &EvolutionSpec,
    step: f64,
) -> Result<Vec<Array1<C64>>> {
    // periodic fast path: cache one period of step unitaries when the sample
    // grid sits on the step grid
    if let HKind::Periodic { period, f } = &h.kind {
        let spp = (period / step).round().max(1.0) as usize;
        let dt = period / spp as f64;
        let aligned = spec.sample_times.iter().all(|&t| {
            let k = (t - spec.t_start) / dt;
            (k - k.round()).abs() < 1e-6
        });
        if aligned {
            let mut cache: Vec<Array2<C64>> = Vec::with_capacity(spp);
            for k in 0..spp {
                let hm = f(spec.t_start + (k as f64 + 0.5) * dt);
                check_hermitian(&hm, 0.0)?;
                cache.push(step_unitary(&hm, dt)?);
            }
            let mut out = Vec::with_capacity(spec.sample_times.len());
            let mut psi = amp0.clone();
            let mut node = 0usize;
            for &ts in &spec.sample_times {
                let target = ((ts - spec.t_start) / dt).round() as usize;
                while node < target {
                    psi = cache[node % spp].dot(&psi);
                    node += 1;
                }
                out.push(psi.clone());
            }
            return Ok(out);
        }
    }
    // general stepping: subdivide each sample interval into equal steps
    let mut out = Vec::with_capacity(spec.sample_times.len());
    let mut psi = amp0.clone();
    let mut t = spec.t_start;
    for &ts in &spec.sample_times {
        if ts > t + 1e-15 {
            let n = ((ts - t) / step).ceil().max(1.0) as usize;
            let dt = (ts - t) / n as f64;
            for k in 0..n {
                let hm = h.at(t + (k as f64 + 0.5) * dt);
                if k == 0 {
                    check_hermitian(&hm, 0.0)?;
                }
                psi = step_unitary(&hm, dt)?.dot(&psi);
            }
            t = ts;
        }
        out.push(psi.clone());
    }
    Ok(out)
}

/// Evolves a pure state under per-block Hamiltonians. `hs` must list one
/// Hamiltonian per state block, sector-matched and in order; blocks evolve
/// independently (and in parallel) because the dynamics conserves N.
pub fn evolve_unitary(
    hs: &[TimeDependentH],
    psi0: &PureState,
    spec: &EvolutionSpec,
) -> Result<Trajectory> {
    spec.validate()?;
    if spec.open_system {
        return Err(Error::InvalidEvolutionSpec(
            "pure-state path is forbidden when open_system is set; use evolve_lindblad".into(),
        ));
    }
    if hs.len() != psi0.blocks().len() {
        return Err(Error::DimensionMismatch {
            expected: psi0.blocks().len(),
            got: hs.len(),
        });
    }
    for (h, b) in hs.iter().zip(psi0.blocks()) {
        h.basis.check_same_sector(&b.basis)?;
    }

    let per_block: Vec<Vec<Array1<C64>>> = hs
        .par_iter()
        .zip(psi0.blocks().par_iter())
        .map(|(h, b)| evolve_block_unitary(h, &b.amp, spec))
        .collect::<Result<_>>()?;

    let mut states = Vec::with_capacity(spec.sample_times.len());
    let mut defects = Vec::with_capacity(spec.sample_times.len());
    for (si, &t) in spec.sample_times.iter().enumerate() {
        let blocks: Vec<PureBlock> = psi0
            .blocks()
            .iter()
            .enumerate()
            .map(|(bi, b)| PureBlock {
                basis: b.basis.clone(),
                amp: per_block[bi][si].clone(),
            })
            .collect();
        let norm = blocks
            .iter()
            .flat_map(|b| b.amp.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let defect = (norm - 1.0).abs();
        if defect > NORM_DRIFT_TOL {
            return Err(Error::NormDrift {
                norm,
                t,
                tol: NORM_DRIFT_TOL,
            });
        }
        states.push(QuantumState::Pure(PureState::from_blocks(blocks)?));
        defects.push(defect);
    }
    Ok(Trajectory {
        times: spec.sample_times.clone(),
        states,
        defects,
    })
}

/// Elementwise dephasing decay over time tau:
/// rho_ab -> rho_ab exp(-sum_j gamma_j (n_j(a) - n_j(b))^2 tau).
fn dephasing_mask(
    basis: &FockBasis,
    channels: &[CollapseChannel],
    tau: f64,
) -> Result<Array2<f64>> {
    let dim = basis.dim();
    let mut mask = Array2::from_elem((dim, dim), 1.0);
    for c in channels {
        let jm = basis.mode_index(c.mode)?;
        for a in 0..dim {
            let na = basis.state(a).occ[jm] as f64;
            for b in 0..dim {
                let nb = basis.state(b).occ[jm] as f64;
                mask[[a, b]] *= (-c.rate * (na - nb) * (na - nb) * tau).exp();
            }
        }
    }
    Ok(mask)
}

fn evolve_block_lindblad(
    h: &TimeDependentH,
    rho0: &Array2<C64>,
    spec: &EvolutionSpec,
    step: f64,
) -> Result<Vec<Array2<C64>>> {
    let basis = &h.basis;
    let mut out = Vec::with_capacity(spec.sample_times.len());
    let mut rho = rho0.clone();
    let mut t = spec.t_start;

    // caches keyed by the current substep size
    let mut cached_dt = f64::NAN;
    let mut half_mask: Array2<f64> = Array2::zeros((0, 0));
    let mut static_u: Option<Array2<C64>> = None;
    let mut periodic_cache: Vec<Array2<C64>> = Vec::new();
    let spp_of = |period: f64, dt: f64| (period / dt).round().max(1.0) as usize;

    for &ts in &spec.sample_times {
        if ts > t + 1e-15 {
            let n = ((ts - t) / step).ceil().max(1.0) as usize;
            let dt = (ts - t) / n as f64;
            if cached_dt.is_nan() || (dt - cached_dt).abs() > 1e-12 {
                cached_dt = dt;
                half_mask = dephasing_mask(basis, &spec.channels, dt / 2.0)?;
                static_u = None;
                periodic_cache.clear();
            }
            for k in 0..n {
                let tm = t + (k as f64 + 0.5) * dt;
                // Strang split: half dephasing, unitary sandwich, half dephasing
                for ((a, b), z) in rho.indexed_iter_mut() {
                    *z *= half_mask[[a, b]];
                }
                let fresh_u;
                let u: &Array2<C64> = match &h.kind {
                    HKind::Static(m) => {
                        if static_u.is_none() {
                            check_hermitian(m, 0.0)?;
                            static_u = Some(step_unitary(m, dt)?);
                        }
                        static_u.as_ref().unwrap()
                    }
                    HKind::Periodic { period, f } => {
                        // the cache is valid only when this midpoint sits on
                        // the period-commensurate grid anchored at t_start
                        let spp = spp_of(*period, dt);
                        let phase_f = (tm - spec.t_start) / dt - 0.5;
                        let grid_ok = (*period / dt - spp as f64).abs() < 1e-9
                            && (phase_f - phase_f.round()).abs() < 1e-6;
                        if grid_ok {
                            let phase = (phase_f.round() as usize) % spp;
                            if periodic_cache.len() != spp {
                                periodic_cache.clear();
                                for p in 0..spp {
                                    let hm = f(spec.t_start + (p as f64 + 0.5) * dt);
                                    check_hermitian(&hm, 0.0)?;
                                    periodic_cache.push(step_unitary(&hm, dt)?);
                                }
                            }
                            &periodic_cache[phase]
                        } else {
                            let hm = f(tm);
                            if k == 0 {
                                check_hermitian(&hm, 0.0)?;
                            }
                            fresh_u = step_unitary(&hm, dt)?;
                            &fresh_u
                        }
                    }
                    HKind::General(f) => {
                        let hm = f(tm);
                        if k == 0 {
                            check_hermitian(&hm, 0.0)?;
                        }
                        fresh_u = step_unitary(&hm, dt)?;
                        &fresh_u
                    }
                };
                rho = u.dot(&rho).dot(&u.t().mapv(|z| z.conj()));
                for ((a, b), z) in rho.indexed_iter_mut() {
                    *z *= half_mask[[a, b]];
                }
            }
            t = ts;
        }
        out.push(rho.clone());
    }
    Ok(out)
}

/// Lindblad evolution with dephasing channels L_j = sqrt(2 gamma_j) n_j.
/// Pure inputs are auto-promoted to block-diagonal density matrices
/// (cross-sector coherences dropped; sector-diagonal observables are exact).
pub fn evolve_lindblad(
    hs: &[TimeDependentH],
    rho0: &QuantumState,
    spec: &EvolutionSpec,
) -> Result<Trajectory> {
    spec.validate()?;
    if !spec.open_system {
        return Err(Error::InvalidEvolutionSpec(
            "evolve_lindblad requires an open-system spec".into(),
        ));
    }
    let mixed = match rho0 {
        QuantumState::Mixed(m) => m.clone(),
        QuantumState::Pure(p) => p.to_mixed(),
    };
    mixed.validate()?;
    if hs.len() != mixed.blocks.len() {
        return Err(Error::DimensionMismatch {
            expected: mixed.blocks.len(),
            got: hs.len(),
        });
    }
    for (h, b) in hs.iter().zip(&mixed.blocks) {
        h.basis.check_same_sector(&b.basis)?;
    }
    let step = match spec.integrator {
        Integrator::SteppedExponential { step } => step,
        // the split-step scheme is the sole Lindblad path; adaptive specs
        // fall back to its default resolution
        Integrator::AdaptiveRk { .. } => 0.25,
    };

    let per_block: Vec<Vec<Array2<C64>>> = hs
        .par_iter()
        .zip(mixed.blocks.par_iter())
        .map(|(h, b)| evolve_block_lindblad(h, &b.rho, spec, step))
        .collect::<Result<_>>()?;

    let mut states = Vec::with_capacity(spec.sample_times.len());
    let mut defects = Vec::with_capacity(spec.sample_times.len());
    for (si, &t) in spec.sample_times.iter().enumerate() {
        let blocks: Vec<MixedBlock> = mixed
            .blocks
            .iter()
            .enumerate()
            .map(|(bi, b)| MixedBlock {
                basis: b.basis.clone(),
                rho: per_block[bi][si].clone(),
            })
            .collect();
        let state = MixedState { blocks };
        let trace = state.trace();
        let defect = (trace - 1.0).abs();
        if defect > TRACE_DRIFT_TOL {
            return Err(Error::TraceDrift {
                trace,
                t,
                tol: TRACE_DRIFT_TOL,
            });
        }
        let min_eig = state.min_eigenvalue()?;
        if min_eig < -1e-6 {
            return Err(Error::PositivityLost { min_eig, t });
        }
        states.push(QuantumState::Mixed(state));
        defects.push(defect);
    }
    Ok(Trajectory {
        times: spec.sample_times.clone(),
        states,
        defects,
    })
}

/// Overlap series between full-Floquet and effective-Haldane evolution.
pub struct FloquetComparison {
    pub times: Vec<f64>,
    /// |<psi_full(t) | psi_eff(t)>|^2 over the direct sum.
    pub overlaps: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Evolves `psi0` under the full Floquet schedule g_j(t) and under the
/// second-order effective Hamiltonian with kappa = -3 g_d^2 / nu_d, returning
/// the squared overlap on a uniform sample grid.
pub fn floquet_vs_effective(
    psi0: &PureState,
    g0: f64,
    g_drive: f64,
    nu_drive: f64,
    horizon: f64,
    sample_dt: f64,
    step: f64,
) -> Result<FloquetComparison> {
    if psi0.d() != 3 {
        return Err(Error::WrongModeCount {
            required: 3,
            got: psi0.d(),
        });
    }
    let mut warnings = Vec::new();
    if nu_drive.abs() < 5.0 * g0.abs().max(g_drive.abs()) {
        warnings.push(format!(
            "high-frequency expansion is marginal: nu_d = {nu_drive:.3e} vs g = {:.3e}",
            g0.abs().max(g_drive.abs())
        ));
    }
    let kappa = kappa_from_drive(g_drive, nu_drive)?;
    let schedule = ControlSchedule::Floquet {
        g0,
        g_drive,
        nu_drive,
    };
    let spec = EvolutionSpec::closed(horizon, sample_dt).with_step(step);

    let mut hs_full = Vec::new();
    let mut hs_eff = Vec::new();
    for b in psi0.blocks() {
        hs_full.push(TimeDependentH::jc_schedule(
            SystemConfig::resonant(3, g0),
            schedule.clone(),
            b.basis.clone(),
            None,
        )?);
        hs_eff.push(TimeDependentH::from_static(haldane_effective(
            &b.basis, g0, kappa,
        )?)?);
    }
    let full = evolve_unitary(&hs_full, psi0, &spec)?;
    let eff = evolve_unitary(&hs_eff, psi0, &spec)?;
    let overlaps = full
        .pure_states()
        .zip(eff.pure_states())
        .map(|(a, b)| a.fidelity(b))
        .collect();
    Ok(FloquetComparison {
        times: spec.sample_times,
        overlaps,
        warnings,
    })
}

/// Adaptive Dormand-Prince 5(4) step solver for dy/dt = f(t, y).
fn dp45<F>(f: F, mut y: Array1<C64>, t0: f64, t1: f64, rtol: f64, atol: f64) -> Result<Array1<C64>>
where
    F: Fn(f64, &Array1<C64>) -> Array1<C64>,
{
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const E: [f64; 7] = [
        35.0 / 384.0 - 5179.0 / 57600.0,
        0.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    ];

    let mut t = t0;
    let mut h = ((t1 - t0) / 100.0).clamp(1e-6, 1.0);
    let mut k1 = f(t, &y);
    let mut steps = 0usize;
    while t < t1 - 1e-12 {
        if steps > 2_000_000 {
            return Err(Error::InvalidEvolutionSpec(
                "adaptive integrator exceeded step budget".into(),
            ));
        }
        steps += 1;
        h = h.min(t1 - t);
        let mut ks: Vec<Array1<C64>> = Vec::with_capacity(7);
        ks.push(k1.clone());
        for s in 0..6 {
            let mut ys = y.clone();
            for (j, kj) in ks.iter().enumerate() {
                if A[s][j] != 0.0 {
                    ys = ys + kj.mapv(|z| z * C64::new(A[s][j] * h, 0.0));
                }
            }
            ks.push(f(t + C[s] * h, &ys));
        }
        let y5 = {
            let mut acc = y.clone();
            for (j, kj) in ks.iter().take(6).enumerate() {
                if A[5][j] != 0.0 {
                    acc = acc + kj.mapv(|z| z * C64::new(A[5][j] * h, 0.0));
                }
            }
            acc
        };
        // weighted rms error
        let mut err2 = 0.0f64;
        for i in 0..y.len() {
            let mut e = C64::new(0.0, 0.0);
            for (j, kj) in ks.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * C64::new(E[j] * h, 0.0);
                }
            }
            let sc = atol + rtol * y[i].norm().max(y5[i].norm());
            err2 += (e.norm() / sc).powi(2);
        }
        let err = (err2 / y.len() as f64).sqrt();
        if err <= 1.0 {
            t += h;
            y = y5;
            k1 = ks.pop().expect("k7 present"); // FSAL
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Ok(y)
}
