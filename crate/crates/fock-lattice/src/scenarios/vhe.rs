//! Valley Hall effect runners: binomial and coherent initial states, plus the
//! classical-to-quantum crossover sweep.

use ndarray::Array2;

use super::{
    binomial_d3, coherent_sector_hamiltonians, embed_two_mode_state, midrange_crossings,
    sample_grid, ScenarioResult, Snapshot, Table,
};
use crate::analysis::wigner::{wigner, WignerGrid};
use crate::analysis::{
    chirality_operator, lattice_map, mean_photons_pure, valley_phase_readout, Rotation,
};
use crate::config::{ClassicalQuantumConfig, RunConfig, VheBinomialConfig, VheCoherentConfig};
use crate::dynamics::{evolve_unitary, EvolutionSpec, TimeDependentH};
use crate::error::Result;
use crate::fock::{coherent_product_state, FockBasis, PureState, Spin};
use crate::model::{build_jc, linear_potential, ControlSchedule, SystemConfig};
use crate::units::ang_mhz;
use crate::C64;

/// Purity floor below which the valley phase readout refuses to classify.
const PHASE_READOUT_MIN_PURITY: f64 = 0.75;

/// Binomial-state valley Hall run: resonant JC + delta (n_1 - n_2).
pub fn run_vhe_binomial(cfg: &VheBinomialConfig) -> Result<ScenarioResult> {
    let echo = RunConfig::VheBinomial(cfg.clone()).canonical_echo();
    let mut warnings = Vec::new();
    let g0 = ang_mhz(cfg.g0_mhz);
    let delta = ang_mhz(cfg.delta_mhz);
    let basis = FockBasis::enumerate(3, cfg.n)?;

    let s = 0.5f64.sqrt();
    let psi0 = if cfg.prepare_via_transport {
        // simulate the SSH sweep up to lambda1 = lambda2 (an eighth period)
        let nu = crate::units::cycles_mhz(cfg.nu_mhz); // cycles/ns
        let eighth = 1.0 / (8.0 * nu); // ns to reach lambda1 = lambda2
        let b2 = FockBasis::enumerate(2, cfg.n)?;
        let start = PureState::basis_state(
            b2.clone(),
            &crate::fock::FockState::new(Spin::Down, vec![0, cfg.n]),
        )?;
        let h = TimeDependentH::jc_schedule(
            SystemConfig::resonant(2, g0),
            ControlSchedule::SshSweep { g0, nu, phase: 0.0 },
            b2,
            None,
        )?;
        let spec = EvolutionSpec::closed(eighth, eighth).with_step(0.25);
        let traj = evolve_unitary(&[h], &start, &spec)?;
        let prepared = traj.pure_states().last().expect("trajectory non-empty");
        warnings.push(format!(
            "initial state prepared via transport protocol (fidelity to ideal binomial {:.6})",
            prepared.fidelity(&crate::fock::binomial_state(cfg.n, s, s)?)
        ));
        embed_two_mode_state(prepared, 1, 2)?
    } else {
        binomial_d3(cfg.n, s, s)?
    };

    let jc = build_jc(&SystemConfig::resonant(3, g0), &[g0, g0, g0], &basis)?;
    let h_op = if delta != 0.0 {
        jc.add(&linear_potential(&basis, delta, 1, 2)?)?
            .assert_hermitian()?
    } else {
        jc
    };
    let times = sample_grid(cfg.horizon_ns, cfg.sample_dt_ns, &cfg.snapshot_times_ns);
    let spec = EvolutionSpec {
        t_start: 0.0,
        t_end: cfg.horizon_ns,
        sample_times: times.clone(),
        integrator: crate::dynamics::Integrator::SteppedExponential { step: 0.25 },
        open_system: false,
        channels: Vec::new(),
    };
    let traj = evolve_unitary(&[TimeDependentH::from_static(h_op)?], &psi0, &spec)?;
    let c_op = chirality_operator(&basis)?;

    let mut n1 = Vec::new();
    let mut n2 = Vec::new();
    let mut n3 = Vec::new();
    let mut p_up = Vec::new();
    let mut chirality = Vec::new();
    let mut fidelity = Vec::new();
    let mut snapshots = Vec::new();
    for (state, &t) in traj.pure_states().zip(&times) {
        let obs = mean_photons_pure(state);
        n1.push(obs.mean_photons[0]);
        n2.push(obs.mean_photons[1]);
        n3.push(obs.mean_photons[2]);
        p_up.push(obs.p_up);
        chirality.push(c_op.expectation(&state.blocks()[0].amp)?.re);
        fidelity.push(state.fidelity(&psi0));
        if cfg
            .snapshot_times_ns
            .iter()
            .any(|&sn| (sn - t).abs() < 1e-9)
        {
            snapshots.push(Snapshot {
                t_ns: t,
                lattice: Some(lattice_map(state, cfg.n)?),
                wigner: Vec::new(),
            });
        }
    }

    // lattice-center passages: <n3> crossing its midrange
    let crossings = midrange_crossings(&n3);
    let mut metrics = vec![
        (
            "max_p_up".to_string(),
            p_up.iter().cloned().fold(0.0, f64::max),
        ),
        (
            "fidelity_at_revival_time".to_string(),
            value_at(&times, &fidelity, cfg.revival_time_ns),
        ),
    ];
    let revival = times
        .iter()
        .zip(&fidelity)
        .filter(|(&t, _)| t >= cfg.revival_window_ns[0] && t <= cfg.revival_window_ns[1])
        .max_by(|a, b| a.1.total_cmp(b.1));
    if let Some((&t_rev, &f_rev)) = revival {
        metrics.push(("revival_fidelity".to_string(), f_rev));
        metrics.push(("revival_peak_time_ns".to_string(), t_rev));
    } else {
        warnings.push("revival window lies outside the horizon".into());
    }
    for (which, cross) in crossings.iter().take(2).enumerate() {
        let k = cross.0;
        metrics.push((format!("chirality_passage_{}", which + 1), chirality[k]));
        metrics.push((format!("passage_time_ns_{}", which + 1), times[k]));
    }
    if crossings.len() < 2 {
        warnings.push("fewer than two lattice-center passages detected".into());
    }

    Ok(ScenarioResult {
        scenario: "vhe-binomial",
        config_echo: echo,
        times_ns: times,
        series: vec![
            ("n1".to_string(), n1),
            ("n2".to_string(), n2),
            ("n3".to_string(), n3),
            ("p_up".to_string(), p_up),
            ("chirality".to_string(), chirality),
            ("fidelity".to_string(), fidelity),
        ],
        snapshots,
        tables: Vec::new(),
        metrics,
        warnings,
    })
}

fn value_at(times: &[f64], values: &[f64], t: f64) -> f64 {
    let k = times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
        .map(|(k, _)| k)
        .unwrap_or(0);
    values[k]
}

/// Coherent-state valley Hall run: |down; alpha, 0, -alpha> under resonant
/// JC + delta (n_1 - n_3).
pub fn run_vhe_coherent(cfg: &VheCoherentConfig) -> Result<ScenarioResult> {
    let echo = RunConfig::VheCoherent(cfg.clone()).canonical_echo();
    let mut warnings = Vec::new();
    let g0 = ang_mhz(cfg.g0_mhz);
    let delta = ang_mhz(cfg.delta_mhz);
    let alpha = cfg.alpha_sq.sqrt();
    let alphas = [
        C64::new(alpha, 0.0),
        C64::new(0.0, 0.0),
        C64::new(-alpha, 0.0),
    ];
    let (psi0, trunc) = coherent_product_state(&alphas, Spin::Down, Some(cfg.n_max))?;
    let hs = coherent_sector_hamiltonians(g0, delta, 1, 3, psi0.blocks())?;
    let times = sample_grid(cfg.horizon_ns, cfg.sample_dt_ns, &cfg.snapshot_times_ns);
    let spec = EvolutionSpec {
        t_start: 0.0,
        t_end: cfg.horizon_ns,
        sample_times: times.clone(),
        integrator: crate::dynamics::Integrator::SteppedExponential { step: 0.25 },
        open_system: false,
        channels: Vec::new(),
    };
    let traj = evolve_unitary(&hs, &psi0, &spec)?;

    let red_dim = cfg.n_max as usize; // reduced single-mode space 0..n_max
    let mut n_series = [Vec::new(), Vec::new(), Vec::new()];
    let mut p_up = Vec::new();
    let mut purity = [Vec::new(), Vec::new(), Vec::new()];
    let mut snapshots = Vec::new();
    let mut rotation_metrics: Vec<(String, f64)> = Vec::new();

    for (state, &t) in traj.pure_states().zip(&times) {
        let obs = mean_photons_pure(state);
        for (series, &v) in n_series.iter_mut().zip(&obs.mean_photons) {
            series.push(v);
        }
        p_up.push(obs.p_up);
        let mut rhos: Vec<Array2<C64>> = Vec::with_capacity(3);
        for j in 1..=3usize {
            let rho = state.reduced_single_mode(j, red_dim)?;
            let pur = rho.dot(&rho).diag().iter().map(|z| z.re).sum::<f64>();
            purity[j - 1].push(pur);
            rhos.push(rho);
        }
        if cfg
            .snapshot_times_ns
            .iter()
            .any(|&sn| (sn - t).abs() < 1e-9)
        {
            let grid = WignerGrid::default();
            let mut fields = Vec::new();
            for (j, rho) in rhos.iter().enumerate() {
                fields.push((format!("mode{}", j + 1), wigner(rho, &grid)?));
            }
            let rho_arr: [Array2<C64>; 3] = [rhos[0].clone(), rhos[1].clone(), rhos[2].clone()];
            match valley_phase_readout(&rho_arr, &grid, PHASE_READOUT_MIN_PURITY) {
                Ok(readout) => {
                    let label = match readout.rotation {
                        Rotation::CounterClockwise => 1.0,
                        Rotation::Clockwise => -1.0,
                    };
                    rotation_metrics.push((format!("rotation_at_{t}ns"), label));
                    for (j, ph) in readout.phases.iter().enumerate() {
                        rotation_metrics.push((format!("phase{}_at_{t}ns_rad", j + 1), *ph));
                    }
                }
                Err(e) => warnings.push(format!("phase readout at t={t} ns: {e}")),
            }
            snapshots.push(Snapshot {
                t_ns: t,
                lattice: None,
                wigner: fields,
            });
        }
    }

    let mut metrics = vec![
        ("n_max".to_string(), cfg.n_max as f64),
        ("discarded_weight".to_string(), trunc.discarded_weight),
        (
            "max_p_up".to_string(),
            p_up.iter().cloned().fold(0.0, f64::max),
        ),
        (
            "min_purity".to_string(),
            purity
                .iter()
                .flat_map(|p| p.iter().cloned())
                .fold(f64::INFINITY, f64::min),
        ),
        (
            "initial_total_photons".to_string(),
            n_series[0][0] + n_series[1][0] + n_series[2][0],
        ),
    ];
    metrics.append(&mut rotation_metrics);

    let [n1, n2, n3] = n_series;
    let [pur1, pur2, pur3] = purity;
    Ok(ScenarioResult {
        scenario: "vhe-coherent",
        config_echo: echo,
        times_ns: times,
        series: vec![
            ("n1".to_string(), n1),
            ("n2".to_string(), n2),
            ("n3".to_string(), n3),
            ("p_up".to_string(), p_up),
            ("purity1".to_string(), pur1),
            ("purity2".to_string(), pur2),
            ("purity3".to_string(), pur3),
        ],
        snapshots,
        tables: Vec::new(),
        metrics,
        warnings,
    })
}

/// P_up sweep over detunings: fringe visibility across the classical-quantum
/// boundary. Visibility is the time-averaged P_up over the horizon (the
/// windowed max/min contrast is scale invariant and degenerates for the
/// near-zero quantum-regime signals).
pub fn run_classical_quantum_sweep(cfg: &ClassicalQuantumConfig) -> Result<ScenarioResult> {
    let echo = RunConfig::ClassicalQuantum(cfg.clone()).canonical_echo();
    let g0 = ang_mhz(cfg.g0_mhz);
    let alpha = cfg.alpha_sq.sqrt();
    let alphas = [
        C64::new(alpha, 0.0),
        C64::new(0.0, 0.0),
        C64::new(-alpha, 0.0),
    ];
    let (psi0, trunc) = coherent_product_state(&alphas, Spin::Down, Some(cfg.n_max))?;
    let times = sample_grid(cfg.horizon_ns, cfg.sample_dt_ns, &[]);
    let spec = EvolutionSpec {
        t_start: 0.0,
        t_end: cfg.horizon_ns,
        sample_times: times.clone(),
        integrator: crate::dynamics::Integrator::SteppedExponential { step: 0.25 },
        open_system: false,
        channels: Vec::new(),
    };

    let mut series = Vec::new();
    let mut vis_rows = Vec::new();
    let mut visibilities = Vec::new();
    for &delta_mhz in &cfg.delta_list_mhz {
        let hs = coherent_sector_hamiltonians(g0, ang_mhz(delta_mhz), 1, 3, psi0.blocks())?;
        let traj = evolve_unitary(&hs, &psi0, &spec)?;
        let p_up: Vec<f64> = traj
            .pure_states()
            .map(|s| mean_photons_pure(s).p_up)
            .collect();
        let visibility = p_up.iter().sum::<f64>() / p_up.len() as f64;
        let max_p_up = p_up.iter().cloned().fold(0.0, f64::max);
        vis_rows.push(vec![delta_mhz, visibility, max_p_up]);
        visibilities.push(visibility);
        series.push((format!("p_up_delta_{delta_mhz}"), p_up));
    }

    let monotone = visibilities.windows(2).all(|w| w[1] > w[0]);
    let steepest = visibilities
        .windows(2)
        .enumerate()
        .max_by(|a, b| (a.1[1] - a.1[0]).total_cmp(&(b.1[1] - b.1[0])))
        .map(|(k, _)| k)
        .unwrap_or(0);

    // the inter-Landau-level criterion delta < 3 g / N, evaluated at the
    // mean total excitation of the initial state
    let boundary_mhz = 3.0 * cfg.g0_mhz / (2.0 * cfg.alpha_sq).max(1e-12);
    let crossover_mhz = 0.5 * (cfg.delta_list_mhz[steepest] + cfg.delta_list_mhz[steepest + 1]);
    let metrics = vec![
        ("n_max".to_string(), cfg.n_max as f64),
        ("discarded_weight".to_string(), trunc.discarded_weight),
        ("visibility_monotone".to_string(), f64::from(monotone)),
        (
            "steepest_increase_lo_mhz".to_string(),
            cfg.delta_list_mhz[steepest],
        ),
        (
            "steepest_increase_hi_mhz".to_string(),
            cfg.delta_list_mhz[steepest + 1],
        ),
        ("crossover_mhz".to_string(), crossover_mhz),
        ("boundary_criterion_mhz".to_string(), boundary_mhz),
    ];

    Ok(ScenarioResult {
        scenario: "classical-quantum",
        config_echo: echo,
        times_ns: times,
        series,
        snapshots: Vec::new(),
        tables: vec![Table {
            name: "visibility".to_string(),
            headers: vec!["delta_mhz".into(), "visibility".into(), "max_p_up".into()],
            rows: vis_rows,
        }],
        metrics,
        warnings: Vec::new(),
    })
}
