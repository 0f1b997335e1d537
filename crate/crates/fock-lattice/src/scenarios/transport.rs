//! Adiabatic transport of the topological zero-energy state in the SSH FSL.

use ndarray::Array2;

use super::{sample_grid, ScenarioResult, Snapshot};
use crate::analysis::wigner::{wigner_two_mode_cut, CutAxes, WignerGrid};
use crate::config::{RunConfig, TransportConfig};
use crate::dynamics::{
    evolve_lindblad, evolve_unitary, CollapseChannel, EvolutionSpec, TimeDependentH,
};
use crate::error::Result;
use crate::fock::{binomial_state, FockBasis, FockState, PureState, QuantumState, Spin};
use crate::model::{ControlSchedule, SystemConfig};
use crate::units::ang_mhz;
use crate::C64;

/// Runs the lambda-sweep transport protocol from |down; 0, N>.
pub fn run_ssh_transport(cfg: &TransportConfig) -> Result<ScenarioResult> {
    let echo = RunConfig::Transport(cfg.clone()).canonical_echo();
    let mut warnings = Vec::new();
    if cfg.nu_mhz >= cfg.g0_mhz / 10.0 {
        warnings.push(format!(
            "adiabaticity is marginal: nu = {} MHz vs g0/10 = {} MHz",
            cfg.nu_mhz,
            cfg.g0_mhz / 10.0
        ));
    }
    let g0 = ang_mhz(cfg.g0_mhz);
    let nu = crate::units::cycles_mhz(cfg.nu_mhz);
    let basis = FockBasis::enumerate(2, cfg.n)?;
    let psi0 = PureState::basis_state(basis.clone(), &FockState::new(Spin::Down, vec![0, cfg.n]))?;
    let schedule = ControlSchedule::SshSweep { g0, nu, phase: 0.0 };
    let sys = SystemConfig::resonant(2, g0);
    let h = TimeDependentH::jc_schedule(sys.clone(), schedule.clone(), basis.clone(), None)?;

    let times = sample_grid(cfg.horizon_ns, cfg.sample_dt_ns, &cfg.snapshot_times_ns);
    let mut spec = EvolutionSpec {
        t_start: 0.0,
        t_end: cfg.horizon_ns,
        sample_times: times.clone(),
        integrator: crate::dynamics::Integrator::SteppedExponential { step: cfg.step_ns },
        open_system: false,
        channels: Vec::new(),
    };

    let target =
        PureState::basis_state(basis.clone(), &FockState::new(Spin::Down, vec![cfg.n, 0]))?;

    // per-sample observable rows
    let dim = basis.dim();
    let mut n1 = Vec::new();
    let mut n2 = Vec::new();
    let mut p_up = Vec::new();
    let mut fidelity = Vec::new();
    let mut site_pops: Vec<Vec<f64>> = vec![Vec::new(); dim];
    let mut snapshots = Vec::new();
    let mut final_target_overlap = 0.0;

    let mut record = |t: f64, pops: &[f64], fid: f64, two_mode: Option<Array2<C64>>| {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        let mut up = 0.0;
        for (k, st) in basis.states().iter().enumerate() {
            m1 += pops[k] * st.occ[0] as f64;
            m2 += pops[k] * st.occ[1] as f64;
            if st.spin == Spin::Up {
                up += pops[k];
            }
            site_pops[k].push(pops[k]);
        }
        n1.push(m1);
        n2.push(m2);
        p_up.push(up);
        fidelity.push(fid);
        if let Some(rho) = two_mode {
            let grid = WignerGrid::square(3.0, 61);
            let mut wigner = Vec::new();
            for (axes, label) in [(CutAxes::ReRe, "cut_rere"), (CutAxes::ImIm, "cut_imim")] {
                if let Ok(field) = wigner_two_mode_cut(&rho, axes, &grid) {
                    wigner.push((label.to_string(), field));
                }
            }
            snapshots.push(Snapshot {
                t_ns: t,
                lattice: None,
                wigner,
            });
        }
    };

    if cfg.open_system {
        spec.open_system = true;
        spec.channels = vec![
            CollapseChannel {
                mode: 1,
                rate: ang_mhz(cfg.gamma_mhz),
            },
            CollapseChannel {
                mode: 2,
                rate: ang_mhz(cfg.gamma_mhz),
            },
        ];
        let traj = evolve_lindblad(&[h], &QuantumState::Pure(psi0), &spec)?;
        for (state, &t) in traj.states.iter().zip(&traj.times) {
            let m = state.as_mixed().expect("lindblad path yields mixed states");
            let rho = &m.blocks[0].rho;
            let pops: Vec<f64> = rho.diag().iter().map(|z| z.re.max(0.0)).collect();
            let (l1, l2) = schedule.ssh_coupling(t)?;
            let refst = binomial_state(cfg.n, l1, l2)?;
            let fid = mixed_pure_fidelity(rho, &refst, &basis);
            let is_snap = cfg.snapshot_times_ns.iter().any(|&s| (s - t).abs() < 1e-9);
            record(
                t,
                &pops,
                fid,
                is_snap.then(|| two_mode_rho_mixed(rho, &basis, cfg.n)),
            );
            if (t - cfg.horizon_ns).abs() < 1e-9 {
                final_target_overlap = mixed_pure_fidelity(rho, &target, &basis);
            }
        }
    } else {
        let traj = evolve_unitary(&[h], &psi0, &spec)?;
        for (state, &t) in traj.pure_states().zip(&traj.times) {
            let amp = &state.blocks()[0].amp;
            let pops: Vec<f64> = amp.iter().map(|z| z.norm_sqr()).collect();
            let (l1, l2) = schedule.ssh_coupling(t)?;
            let refst = binomial_state(cfg.n, l1, l2)?;
            let fid = state.fidelity(&refst);
            let is_snap = cfg.snapshot_times_ns.iter().any(|&s| (s - t).abs() < 1e-9);
            record(
                t,
                &pops,
                fid,
                is_snap.then(|| {
                    state
                        .reduced_two_modes(1, 2, cfg.n as usize)
                        .expect("transport state is two-mode")
                }),
            );
            if (t - cfg.horizon_ns).abs() < 1e-9 {
                final_target_overlap = state.fidelity(&target);
            }
        }
    }

    let min_fidelity = fidelity.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_up_weight = p_up.iter().cloned().fold(0.0, f64::max);

    let mut series = vec![
        ("n1".to_string(), n1),
        ("n2".to_string(), n2),
        ("p_up".to_string(), p_up),
        ("fidelity".to_string(), fidelity),
    ];
    for (k, st) in basis.states().iter().enumerate() {
        series.push((
            format!("pop_{}_{}_{}", st.spin.label(), st.occ[0], st.occ[1]),
            std::mem::take(&mut site_pops[k]),
        ));
    }

    Ok(ScenarioResult {
        scenario: "transport",
        config_echo: echo,
        times_ns: times,
        series,
        snapshots,
        tables: Vec::new(),
        metrics: vec![
            ("min_fidelity".to_string(), min_fidelity),
            ("final_target_overlap".to_string(), final_target_overlap),
            ("max_up_weight".to_string(), max_up_weight),
        ],
        warnings,
    })
}

/// <ref| rho |ref> for a pure reference over one sector.
fn mixed_pure_fidelity(
    rho: &Array2<C64>,
    reference: &PureState,
    basis: &std::sync::Arc<FockBasis>,
) -> f64 {
    let amp = &reference.blocks()[0].amp;
    debug_assert!(reference.blocks()[0].basis.same_sector(basis));
    let mut f = C64::new(0.0, 0.0);
    for i in 0..basis.dim() {
        for j in 0..basis.dim() {
            f += amp[i].conj() * rho[[i, j]] * amp[j];
        }
    }
    f.re.max(0.0)
}

/// Two-mode reduced density matrix from a one-sector mixed state (traces out
/// the qubit), indexed n1 * (m+1) + n2.
fn two_mode_rho_mixed(rho: &Array2<C64>, basis: &std::sync::Arc<FockBasis>, n: u32) -> Array2<C64> {
    let dim = n as usize + 1;
    let mut out = Array2::<C64>::zeros((dim * dim, dim * dim));
    for (a, sa) in basis.states().iter().enumerate() {
        for (b, sb) in basis.states().iter().enumerate() {
            if sa.spin != sb.spin {
                continue;
            }
            let ia = sa.occ[0] as usize * dim + sa.occ[1] as usize;
            let ib = sb.occ[0] as usize * dim + sb.occ[1] as usize;
            out[[ia, ib]] += rho[[a, b]];
        }
    }
    out
}
